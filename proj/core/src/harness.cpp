#include "genv2v/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "genv2v/stats.hpp"

namespace genv2v::harness {

namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kEvalSeedOffset = 1'000'000;

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

}  // namespace

std::vector<double> sliding_window_smooth(std::span<const double> series, int window) {
  if (window < 1) throw std::invalid_argument("sliding_window_smooth: window must be at least 1");
  std::vector<double> out(series.size());
  double running = 0.0;
  const auto w = static_cast<std::size_t>(window);
  for (std::size_t i = 0; i < series.size(); ++i) {
    running += series[i];
    if (i >= w) running -= series[i - w];
    // Recompute exactly every window to keep the running sum from drifting.
    if (i % 4096 == 4095) {
      running = 0.0;
      for (std::size_t j = (i + 1 >= w ? i + 1 - w : 0); j <= i; ++j) running += series[j];
    }
    out[i] = running / static_cast<double>(std::min(i + 1, w));
  }
  return out;
}

double successful_data_bits(const EpisodeOutcome& episode, double outage_cap) {
  double total = 0.0;
  for (std::size_t k = 0; k < episode.delivered_bits.size(); ++k) {
    if (episode.final_outage[k] <= outage_cap) total += episode.delivered_bits[k];
  }
  return total;
}

double successful_data_metric(std::span<const EpisodeOutcome> episodes, double outage_cap) {
  if (episodes.empty()) return 0.0;
  double total = 0.0;
  for (const auto& e : episodes) total += successful_data_bits(e, outage_cap);
  return total / static_cast<double>(episodes.size());
}

EpisodeOutcome run_episode(env::Environment& env, agents::Policy& policy, std::uint64_t episode_seed) {
  auto obs = env.reset(episode_seed);
  const auto n = env.config().num_links();
  EpisodeOutcome out;
  out.delivered_bits.assign(n, 0.0);
  double qoe_sum = 0.0;
  int slots = 0;
  while (!env.done()) {
    const auto actions = policy.act(env, obs);
    auto step = env.step(actions);
    policy.observe(obs, actions, step.reward, step.observations, step.done);
    out.reward += step.reward;
    qoe_sum += step.info.system_qoe;
    for (std::size_t k = 0; k < n; ++k) out.delivered_bits[k] += step.info.delivered_bits[k];
    obs = std::move(step.observations);
    ++slots;
  }
  out.mean_system_qoe = qoe_sum / slots;
  for (std::size_t k = 0; k < n; ++k) out.final_outage.push_back(env.outage_tracker().outage(k));
  return out;
}

std::unique_ptr<agents::Policy> make_policy(agents::PolicyKind kind, const config::ExperimentConfig& cfg,
                                            const env::Environment& env, std::uint64_t seed,
                                            std::int64_t total_slots) {
  switch (kind) {
    case agents::PolicyKind::ddqn:
    case agents::PolicyKind::dqn:
      return std::make_unique<agents::DqnAgent>(kind, cfg.agent, static_cast<int>(env.observation_dim()),
                                                env.actions().per_link_size(), total_slots, seed);
    case agents::PolicyKind::greedy: return std::make_unique<agents::GreedyPolicy>(cfg.greedy_info);
    case agents::PolicyKind::random: return std::make_unique<agents::RandomPolicy>(seed);
    case agents::PolicyKind::oracle: return std::make_unique<agents::OraclePolicy>();
  }
  throw std::invalid_argument("make_policy: unknown kind");
}

TrainingRun train(const config::ExperimentConfig& cfg, agents::PolicyKind kind, std::uint64_t seed,
                  double payload_bits) {
  env::Environment env(cfg.env_for(payload_bits, seed));
  const std::int64_t total_slots = static_cast<std::int64_t>(cfg.episodes) * cfg.env.episode_length;
  TrainingRun run;
  run.policy = make_policy(kind, cfg, env, seed, total_slots);
  run.policy->set_training(true);
  std::vector<double> rewards;
  for (int e = 0; e < cfg.episodes; ++e) {
    const auto outcome = run_episode(env, *run.policy, static_cast<std::uint64_t>(e));
    MetricsRow row;
    row.seed = seed;
    row.episode = e;
    row.raw_reward = outcome.reward;
    row.mean_system_qoe = outcome.mean_system_qoe;
    row.successful_data_bits = successful_data_bits(outcome, cfg.env.qoe.outage_cap);
    row.outage = outcome.final_outage;
    for (double o : outcome.final_outage) row.constraint_satisfied.push_back(o <= cfg.env.qoe.outage_cap);
    rewards.push_back(outcome.reward);
    run.rows.push_back(std::move(row));
  }
  const auto smoothed = sliding_window_smooth(rewards, cfg.smoothing_window);
  for (std::size_t i = 0; i < run.rows.size(); ++i) run.rows[i].smoothed_reward = smoothed[i];
  return run;
}

EvalResult evaluate(agents::Policy& policy, const config::ExperimentConfig& cfg, std::uint64_t seed,
                    double payload_bits, int episodes) {
  env::Environment env(cfg.env_for(payload_bits, seed));
  policy.set_training(false);
  EvalResult result;
  std::vector<double> qoe;
  std::vector<double> reward;
  for (int e = 0; e < episodes; ++e) {
    result.episodes.push_back(run_episode(env, policy, kEvalSeedOffset + static_cast<std::uint64_t>(e)));
    qoe.push_back(result.episodes.back().mean_system_qoe);
    reward.push_back(result.episodes.back().reward);
  }
  result.mean_qoe = stats::mean(qoe);
  result.mean_reward = stats::mean(reward);
  result.successful_data = successful_data_metric(result.episodes, cfg.env.qoe.outage_cap);
  return result;
}

std::string metrics_csv(std::span<const MetricsRow> rows, const RunHeader& header) {
  std::ostringstream out;
  out << "# genv2v " << kVersion << "\n"
      << "# agent=" << header.agent << "\n"
      << "# seed=" << header.seed << "\n"
      << "# payload_bits=" << num(header.payload_bits) << "\n"
      << "# config_hash=" << header.config_hash << "\n";
  const std::size_t links = rows.empty() ? 0 : rows.front().outage.size();
  out << "seed,episode,raw_reward,smoothed_reward,mean_system_qoe,successful_data_bits";
  for (std::size_t k = 0; k < links; ++k) out << ",outage_" << k;
  for (std::size_t k = 0; k < links; ++k) out << ",constraint_ok_" << k;
  out << "\n";
  for (const auto& r : rows) {
    out << r.seed << ',' << r.episode << ',' << num(r.raw_reward) << ',' << num(r.smoothed_reward) << ','
        << num(r.mean_system_qoe) << ',' << num(r.successful_data_bits);
    for (double o : r.outage) out << ',' << num(o);
    for (bool ok : r.constraint_satisfied) out << ',' << (ok ? 1 : 0);
    out << "\n";
  }
  return out.str();
}

std::vector<MetricsRow> read_metrics_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::vector<MetricsRow> rows;
  std::size_t links = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto cells = split(line, ',');
    if (!header_seen) {
      header_seen = true;
      if (cells.size() < 6 || (cells.size() - 6) % 2 != 0) throw std::runtime_error("bad metrics header in " + path.string());
      links = (cells.size() - 6) / 2;
      continue;
    }
    if (cells.size() != 6 + 2 * links) throw std::runtime_error("ragged row in " + path.string());
    MetricsRow r;
    r.seed = std::stoull(cells[0]);
    r.episode = std::stoi(cells[1]);
    r.raw_reward = std::stod(cells[2]);
    r.smoothed_reward = std::stod(cells[3]);
    r.mean_system_qoe = std::stod(cells[4]);
    r.successful_data_bits = std::stod(cells[5]);
    for (std::size_t k = 0; k < links; ++k) r.outage.push_back(std::stod(cells[6 + k]));
    for (std::size_t k = 0; k < links; ++k) r.constraint_satisfied.push_back(cells[6 + links + k] == "1");
    rows.push_back(std::move(r));
  }
  return rows;
}

void write_file(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

fs::path metrics_path(const fs::path& dir, agents::PolicyKind kind, std::uint64_t seed) {
  return dir / ("train_" + std::string(agents::to_string(kind)) + "_seed" + std::to_string(seed) + ".csv");
}

fs::path run_training(const config::ExperimentConfig& cfg, agents::PolicyKind kind, std::uint64_t seed,
                      const fs::path& out_dir) {
  auto run = train(cfg, kind, seed, cfg.payload_bits);
  const auto hash = config::config_hash(cfg);
  const auto csv = metrics_path(out_dir, kind, seed);
  write_file(csv, metrics_csv(run.rows, RunHeader{std::string(agents::to_string(kind)), seed, cfg.payload_bits, hash}));

  std::ostringstream meta;
  meta << "# genv2v " << kVersion << " run metadata\n"
       << "# agent=" << agents::to_string(kind) << " seed=" << seed << " config_hash=" << hash << "\n"
       << config::echo(cfg);
  auto meta_path = csv;
  meta_path.replace_extension(".meta");
  write_file(meta_path, meta.str());

  if (auto* agent = dynamic_cast<agents::DqnAgent*>(run.policy.get())) {
    save_checkpoint(*agent, cfg, seed,
                    out_dir / (std::string(agents::to_string(kind)) + "_seed" + std::to_string(seed) + ".gv2vnn"));
  }
  return csv;
}

void save_checkpoint(const agents::DqnAgent& agent, const config::ExperimentConfig& cfg, std::uint64_t seed,
                     const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  neural::save_parameters(agent.online(), path);
  const auto& a = agent.config();
  std::ostringstream meta;
  meta << "agent=" << agents::to_string(agent.kind()) << "\n"
       << "gamma=" << num(a.gamma) << "\n"
       << "epsilon_start=" << num(a.epsilon_start) << "\n"
       << "epsilon_end=" << num(a.epsilon_end) << "\n"
       << "epsilon_decay_fraction=" << num(a.epsilon_decay_fraction) << "\n"
       << "target_sync_interval=" << a.target_sync_interval << "\n"
       << "train_steps=" << agent.train_steps() << "\n"
       << "seed=" << seed << "\n"
       << "payload_bits=" << num(cfg.payload_bits) << "\n"
       << "env_config_hash=" << config::config_hash(cfg) << "\n";
  write_file(fs::path(path.string() + ".meta"), meta.str());
}

Checkpoint load_checkpoint(const fs::path& path) {
  Checkpoint ckpt;
  ckpt.net = neural::load_parameters(path);
  std::ifstream in(path.string() + ".meta");
  if (!in) throw std::runtime_error("missing checkpoint sidecar " + path.string() + ".meta");
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (line.empty() || line[0] == '#' || eq == std::string::npos) continue;
    ckpt.meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return ckpt;
}

std::unique_ptr<agents::DqnAgent> agent_from_checkpoint(const Checkpoint& ckpt, const config::ExperimentConfig& cfg,
                                                        const env::Environment& env) {
  const auto it = ckpt.meta.find("agent");
  const auto kind = agents::parse_policy_kind(it == ckpt.meta.end() ? "ddqn" : it->second);
  const auto& dims = ckpt.net.dims();
  if (dims.front() != static_cast<int>(env.observation_dim()) || dims.back() != env.actions().per_link_size()) {
    throw std::invalid_argument("checkpoint dimensions do not match the configured environment");
  }
  auto agent_cfg = cfg.agent;
  agent_cfg.hidden.assign(dims.begin() + 1, dims.end() - 1);
  auto agent = std::make_unique<agents::DqnAgent>(kind, agent_cfg, dims.front(), dims.back(), 1, 0);
  neural::copy_parameters(ckpt.net, agent->online());
  agent->set_training(false);
  return agent;
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads) : std::thread::hardware_concurrency();
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(count, 1));
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = count;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }
  if (error) std::rethrow_exception(error);
}

std::vector<SweepRecord> payload_sweep(const config::ExperimentConfig& cfg, std::span<const double> payloads,
                                       std::span<const agents::PolicyKind> kinds) {
  if (payloads.size() < 3) throw std::invalid_argument("payload_sweep: need at least three payload points");
  std::vector<SweepRecord> jobs;
  for (auto kind : kinds) {
    for (double p : payloads) {
      for (auto seed : cfg.seeds) jobs.push_back(SweepRecord{kind, p, seed, 0, 0, 0});
    }
  }
  parallel_for(jobs.size(), cfg.threads, [&](std::size_t i) {
    auto& job = jobs[i];
    auto run = train(cfg, job.kind, job.seed, job.payload_bits);
    const auto eval = evaluate(*run.policy, cfg, job.seed, job.payload_bits, cfg.eval_episodes);
    job.mean_qoe = eval.mean_qoe;
    job.successful_data = eval.successful_data;
    job.mean_reward = eval.mean_reward;
  });
  std::sort(jobs.begin(), jobs.end(), [](const auto& a, const auto& b) {
    return std::tie(a.kind, a.payload_bits, a.seed) < std::tie(b.kind, b.payload_bits, b.seed);
  });
  return jobs;
}

std::vector<SweepPoint> aggregate(std::span<const SweepRecord> records) {
  std::map<std::pair<agents::PolicyKind, double>, std::pair<std::vector<double>, std::vector<double>>> groups;
  for (const auto& r : records) {
    auto& g = groups[{r.kind, r.payload_bits}];
    g.first.push_back(r.mean_qoe);
    g.second.push_back(r.successful_data);
  }
  std::vector<SweepPoint> out;
  for (const auto& [key, values] : groups) {
    out.push_back(SweepPoint{key.first, key.second, stats::mean(values.first), stats::stddev(values.first),
                             stats::mean(values.second), stats::stddev(values.second), values.first.size()});
  }
  return out;
}

std::string sweep_records_csv(std::span<const SweepRecord> records, const std::string& config_hash) {
  std::ostringstream out;
  out << "# genv2v " << kVersion << "\n# config_hash=" << config_hash << "\n"
      << "agent,payload_bits,seed,mean_system_qoe,successful_data_bits,mean_reward\n";
  for (const auto& r : records) {
    out << agents::to_string(r.kind) << ',' << num(r.payload_bits) << ',' << r.seed << ',' << num(r.mean_qoe) << ','
        << num(r.successful_data) << ',' << num(r.mean_reward) << "\n";
  }
  return out.str();
}

std::string sweep_points_csv(std::span<const SweepPoint> points, const std::string& config_hash) {
  std::ostringstream out;
  out << "# genv2v " << kVersion << "\n# config_hash=" << config_hash << "\n"
      << "agent,payload_bits,qoe_mean,qoe_std,successful_data_mean,successful_data_std,seeds\n";
  for (const auto& p : points) {
    out << agents::to_string(p.kind) << ',' << num(p.payload_bits) << ',' << num(p.qoe_mean) << ','
        << num(p.qoe_std) << ',' << num(p.data_mean) << ',' << num(p.data_std) << ',' << p.n << "\n";
  }
  return out.str();
}

std::vector<SweepRecord> read_sweep_records_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::string line;
  std::vector<SweepRecord> out;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header_seen) {
      header_seen = true;
      continue;
    }
    const auto c = split(line, ',');
    if (c.size() != 6) throw std::runtime_error("bad sweep row in " + path.string());
    out.push_back(SweepRecord{agents::parse_policy_kind(c[0]), std::stod(c[1]), std::stoull(c[2]), std::stod(c[3]),
                              std::stod(c[4]), std::stod(c[5])});
  }
  return out;
}

}  // namespace genv2v::harness
