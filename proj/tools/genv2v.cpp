#include <CLI11.hpp>

#ifdef __GLIBC__
#include <malloc.h>
#endif

#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "genv2v/acceptance.hpp"
#include "genv2v/config.hpp"
#include "genv2v/harness.hpp"

namespace fs = std::filesystem;
using namespace genv2v;

namespace {

enum Exit { kOk = 0, kRuntime = 1, kConfig = 2, kAcceptance = 3 };

config::ExperimentConfig load(const std::string& path) {
  return path.empty() ? config::ExperimentConfig{} : config::parse_config(path);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int report(const std::vector<acceptance::CheckResult>& results) {
  for (const auto& r : results) std::cout << acceptance::format_line(r) << "\n";
  const bool ok = acceptance::all_passed(results);
  std::cout << (ok ? "all checks passed" : "some checks failed") << std::endl;
  return ok ? kOk : kAcceptance;
}

int cmd_train(const std::string& config_path, const std::string& agent, std::uint64_t seed, const fs::path& out,
              const std::string& greedy_info) {
  auto cfg = load(config_path);
  if (!greedy_info.empty()) cfg.greedy_info = agents::parse_greedy_info(greedy_info);
  const auto csv = harness::run_training(cfg, agents::parse_policy_kind(agent), seed, out);
  std::cout << csv.string() << std::endl;
  return kOk;
}

int cmd_eval(const fs::path& checkpoint, const std::string& config_path, const fs::path& out) {
  const auto cfg = load(config_path);
  const auto ckpt = harness::load_checkpoint(checkpoint);
  const auto seed_it = ckpt.meta.find("seed");
  const std::uint64_t seed = seed_it == ckpt.meta.end() ? cfg.seeds.front() : std::stoull(seed_it->second);
  env::Environment env(cfg.env_for(cfg.payload_bits, seed));
  auto agent = harness::agent_from_checkpoint(ckpt, cfg, env);
  const auto result = harness::evaluate(*agent, cfg, seed, cfg.payload_bits, cfg.eval_episodes);

  std::ostringstream csv;
  csv << "# genv2v " << harness::kVersion << "\n"
      << "# checkpoint=" << checkpoint.filename().string() << "\n"
      << "# agent=" << agents::to_string(agent->kind()) << "\n"
      << "# seed=" << seed << "\n"
      << "# payload_bits=" << num(cfg.payload_bits) << "\n"
      << "# config_hash=" << config::config_hash(cfg) << "\n";
  const auto links = cfg.env.num_links();
  csv << "episode,reward,mean_system_qoe,successful_data_bits";
  for (std::size_t k = 0; k < links; ++k) csv << ",outage_" << k;
  csv << "\n";
  for (std::size_t e = 0; e < result.episodes.size(); ++e) {
    const auto& ep = result.episodes[e];
    csv << e << ',' << num(ep.reward) << ',' << num(ep.mean_system_qoe) << ','
        << num(harness::successful_data_bits(ep, cfg.env.qoe.outage_cap));
    for (double o : ep.final_outage) csv << ',' << num(o);
    csv << "\n";
  }
  auto path = out / ("eval_" + checkpoint.stem().string() + ".csv");
  harness::write_file(path, csv.str());
  std::printf("mean_qoe=%.6g mean_reward=%.6g successful_data_bits=%.6g\n%s\n", result.mean_qoe, result.mean_reward,
              result.successful_data, path.c_str());
  return kOk;
}

int cmd_sweep(const std::string& config_path, std::vector<double> payloads, const fs::path& out, int threads) {
  auto cfg = load(config_path);
  if (payloads.empty()) payloads = cfg.payload_sweep;
  if (threads >= 0) cfg.threads = threads;
  const auto records = harness::payload_sweep(cfg, payloads, cfg.sweep_agents);
  const auto hash = config::config_hash(cfg);
  harness::write_file(out / "sweep_per_seed.csv", harness::sweep_records_csv(records, hash));
  harness::write_file(out / "sweep.csv", harness::sweep_points_csv(harness::aggregate(records), hash));
  std::cout << (out / "sweep.csv").string() << std::endl;
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
#ifdef __GLIBC__
  // Keep freed pages; training regrows the heap every step.
  mallopt(M_TRIM_THRESHOLD, 256 << 20);
#endif
  CLI::App app{"Generative-AI V2V resource allocation simulator"};
  app.set_version_flag("--version", std::string(harness::kVersion));
  app.require_subcommand(1);

  std::string config_path, agent = "ddqn", greedy_info, checkpoint, out = "out";
  std::uint64_t seed = 1;
  std::vector<double> payloads;
  int threads = -1;

  auto* train = app.add_subcommand("train", "train one agent on one seed");
  train->add_option("--config", config_path, "YAML config (defaults when omitted)");
  train->add_option("--agent", agent)->check(CLI::IsMember({"ddqn", "dqn", "greedy", "random"}));
  train->add_option("--seed", seed);
  train->add_option("--out", out);
  train->add_option("--greedy-info", greedy_info, "greedy channel knowledge")->check(CLI::IsMember({"prev", "frozen"}));

  auto* eval = app.add_subcommand("eval", "evaluate a saved checkpoint");
  eval->add_option("--checkpoint", checkpoint)->required();
  eval->add_option("--config", config_path);
  eval->add_option("--out", out);

  auto* sweep = app.add_subcommand("sweep", "train and evaluate every agent across payloads");
  sweep->add_option("--config", config_path);
  sweep->add_option("--payloads", payloads, "comma-separated payload sizes in bits")->delimiter(',');
  sweep->add_option("--out", out);
  sweep->add_option("--threads", threads, "worker threads (0 = all cores)");

  auto* summary = app.add_subcommand("summary", "check the acceptance criteria against an output directory");
  summary->add_option("--out", out);

  auto* selftest = app.add_subcommand("selftest", "oracle, gradient, outage and determinism property suites");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfig;
  }

  try {
    if (*train) return cmd_train(config_path, agent, seed, out, greedy_info);
    if (*eval) return cmd_eval(checkpoint, config_path, out);
    if (*sweep) return cmd_sweep(config_path, payloads, out, threads);
    if (*summary) return report(acceptance::summary_checks(out));
    if (*selftest) return report(acceptance::selftest_checks());
  } catch (const config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << std::endl;
    return kConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return kRuntime;
  }
  return kRuntime;
}
