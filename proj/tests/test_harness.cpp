#include <doctest.h>

#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "genv2v/harness.hpp"
#include "genv2v/stats.hpp"

using namespace genv2v;
using namespace genv2v::harness;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("genv2v_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

config::ExperimentConfig tiny(int episodes = 6) {
  config::ExperimentConfig cfg;
  cfg.episodes = episodes;
  cfg.eval_episodes = 2;
  cfg.smoothing_window = 3;
  cfg.seeds = {1, 2};
  cfg.agent.hidden = {16};
  cfg.agent.batch_size = 16;
  cfg.agent.learning_starts = 100;
  cfg.threads = 1;
  return cfg;
}

// One interference-free link with a single sub-channel.
config::ExperimentConfig single_link(int episodes) {
  auto cfg = tiny(episodes);
  auto& g = cfg.env.geometry;
  g.tx_rx_distance_m = {300.0};
  g.cross_distance_m = {{0.0}};
  g.speed_mps = {2.0};
  return cfg;
}

}  // namespace

TEST_CASE("sliding window smoothing") {
  const std::vector<double> x = {1, 3, 5};
  CHECK(sliding_window_smooth(x, 2) == std::vector<double>{1, 2, 4});
  CHECK(sliding_window_smooth(x, 1) == x);
  const std::vector<double> flat(250, -3.25);
  CHECK(sliding_window_smooth(flat, 7) == flat);
  CHECK(sliding_window_smooth(std::vector<double>(10000, 0.1), 100).size() == 10000);
  CHECK(sliding_window_smooth(std::vector<double>{}, 3).empty());
  CHECK_THROWS_AS(sliding_window_smooth(x, 0), std::invalid_argument);

  std::vector<double> ramp(9000);
  for (std::size_t i = 0; i < ramp.size(); ++i) ramp[i] = std::sin(0.01 * static_cast<double>(i)) * 1e3;
  const auto s = sliding_window_smooth(ramp, 50);
  for (std::size_t i : {0ul, 30ul, 4095ul, 4096ul, 8999ul}) {
    const std::size_t lo = i + 1 >= 50 ? i + 1 - 50 : 0;
    double sum = 0;
    for (std::size_t j = lo; j <= i; ++j) sum += ramp[j];
    CHECK(s[i] == doctest::Approx(sum / static_cast<double>(i - lo + 1)).epsilon(1e-12));
  }
}

TEST_CASE("successful data gating") {
  EpisodeOutcome all_ok{0.0, 0.0, {100 * 10e3}, {0.0}};
  CHECK(successful_data_bits(all_ok, 0.1) == doctest::Approx(1.0e6));

  EpisodeOutcome mixed{0.0, 0.0, {5e5, 7e5}, {0.04, 0.3}};
  CHECK(successful_data_bits(mixed, 0.1) == 5e5);

  EpisodeOutcome none{0.0, 0.0, {5e5, 7e5}, {0.2, 0.3}};
  CHECK(successful_data_bits(none, 0.1) == 0.0);

  const std::vector<EpisodeOutcome> eps = {all_ok, mixed, none};
  CHECK(successful_data_metric(eps, 0.1) == doctest::Approx((1e6 + 5e5) / 3));
  CHECK(successful_data_metric(std::span<const EpisodeOutcome>{}, 0.1) == 0.0);

  // more delivered bits never lower the metric, more violations never raise it
  auto more = mixed;
  more.delivered_bits[0] += 1e4;
  CHECK(successful_data_bits(more, 0.1) >= successful_data_bits(mixed, 0.1));
  auto worse = mixed;
  worse.final_outage[0] = 0.5;
  CHECK(successful_data_bits(worse, 0.1) <= successful_data_bits(mixed, 0.1));
}

TEST_CASE("a clean link delivers its full payload every slot") {
  auto cfg = single_link(1);
  cfg.env.geometry.tx_rx_distance_m = {20.0};
  cfg.env.channel.shadowing_sigma_db = 0.0;
  cfg.env.unit_fading = true;
  env::Environment env(cfg.env_for(10e3, 1));
  agents::GreedyPolicy greedy;
  const auto out = run_episode(env, greedy, 0);
  CHECK(out.final_outage[0] == 0.0);
  CHECK(successful_data_bits(out, 0.1) == doctest::Approx(1.0e6));
}

TEST_CASE("metrics csv layout and round trip") {
  auto run = train(tiny(), agents::PolicyKind::random, 3, 20e3);
  REQUIRE(run.rows.size() == 6);
  const auto text = metrics_csv(run.rows, RunHeader{"random", 3, 20e3, "00ff"});
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == std::string("# genv2v ") + kVersion);
  int comments = 1;
  while (std::getline(in, line) && line[0] == '#') ++comments;
  CHECK(comments == 5);
  CHECK(line ==
        "seed,episode,raw_reward,smoothed_reward,mean_system_qoe,successful_data_bits,outage_0,outage_1,outage_2,"
        "constraint_ok_0,constraint_ok_1,constraint_ok_2");
  CHECK(text.find("# config_hash=00ff") != std::string::npos);

  const auto dir = scratch("csv");
  write_file(dir / "m.csv", text);
  const auto back = read_metrics_csv(dir / "m.csv");
  REQUIRE(back.size() == run.rows.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].raw_reward == run.rows[i].raw_reward);
    CHECK(back[i].smoothed_reward == run.rows[i].smoothed_reward);
    CHECK(back[i].outage == run.rows[i].outage);
    CHECK(back[i].constraint_satisfied == run.rows[i].constraint_satisfied);
  }
  std::vector<double> raw;
  for (const auto& r : run.rows) raw.push_back(r.raw_reward);
  const auto smooth = sliding_window_smooth(raw, 3);
  for (std::size_t i = 0; i < raw.size(); ++i) CHECK(run.rows[i].smoothed_reward == smooth[i]);
  fs::remove_all(dir);
}

TEST_CASE("training output is byte-stable across re-runs") {
  const auto cfg = tiny(4);
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  const auto pa = run_training(cfg, agents::PolicyKind::ddqn, 1, a);
  const auto pb = run_training(cfg, agents::PolicyKind::ddqn, 1, b);
  CHECK(slurp(pa) == slurp(pb));
  CHECK(slurp(a / "ddqn_seed1.gv2vnn") == slurp(b / "ddqn_seed1.gv2vnn"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("run files, metadata and checkpoint") {
  const auto cfg = tiny(4);
  const auto dir = scratch("run");
  const auto csv = run_training(cfg, agents::PolicyKind::dqn, 2, dir);
  CHECK(csv == dir / "train_dqn_seed2.csv");
  const auto meta = slurp(dir / "train_dqn_seed2.meta");
  CHECK(meta.find("episodes: 4") != std::string::npos);
  CHECK(config::echo(config::parse_config_text(meta)) == config::echo(cfg));

  const auto ckpt = load_checkpoint(dir / "dqn_seed2.gv2vnn");
  CHECK(ckpt.meta.at("agent") == "dqn");
  CHECK(ckpt.meta.at("gamma") == "0.94999999999999996");
  CHECK(ckpt.meta.at("env_config_hash") == config::config_hash(cfg));
  CHECK(ckpt.meta.count("epsilon_start") == 1);
  CHECK(ckpt.meta.count("target_sync_interval") == 1);

  env::Environment env(cfg.env_for(cfg.payload_bits, 2));
  auto agent = agent_from_checkpoint(ckpt, cfg, env);
  CHECK(agent->online() == ckpt.net);
  CHECK(agent->epsilon() == 0.0);
  CHECK_FALSE(fs::exists(dir / "greedy_seed2.gv2vnn"));
  fs::remove_all(dir);
}

TEST_CASE("random policy reward has no trend") {
  auto cfg = tiny(600);
  cfg.smoothing_window = 20;
  std::vector<double> mean_curve(600, 0.0);
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto run = train(cfg, agents::PolicyKind::random, seed, cfg.payload_bits);
    for (std::size_t i = 0; i < 600; ++i) mean_curve[i] += run.rows[i].smoothed_reward / 5.0;
  }
  // one point per window keeps the samples nearly independent
  std::vector<double> thinned;
  for (std::size_t i = 19; i < 600; i += 20) thinned.push_back(mean_curve[i]);
  CHECK(stats::slope_pvalue(thinned) > 0.05);
}

TEST_CASE("double DQN improves on an interference-free link") {
  auto cfg = single_link(300);
  cfg.agent.hidden = {64, 32};
  cfg.agent.batch_size = 32;
  cfg.agent.train_interval = 1;
  cfg.agent.learning_starts = 200;
  for (std::uint64_t seed : {1, 2}) {
    const auto run = train(cfg, agents::PolicyKind::ddqn, seed, cfg.payload_bits);
    double first = 0, last = 0;
    for (int i = 0; i < 30; ++i) {
      first += run.rows[static_cast<std::size_t>(i)].smoothed_reward;
      last += run.rows[run.rows.size() - 1 - static_cast<std::size_t>(i)].smoothed_reward;
    }
    CHECK(last > first);
  }
}

TEST_CASE("parallel_for covers every index and rethrows") {
  std::vector<std::atomic<int>> hits(50);
  parallel_for(50, 4, [&](std::size_t i) { hits[i]++; });
  for (const auto& h : hits) CHECK(h == 1);
  CHECK_THROWS_AS(parallel_for(10, 3,
                               [](std::size_t i) {
                                 if (i == 6) throw std::runtime_error("boom");
                               }),
                  std::runtime_error);
  parallel_for(0, 2, [](std::size_t) { FAIL("called on empty range"); });
}

TEST_CASE("payload sweep is ordered, aggregated and thread-count independent") {
  auto cfg = tiny(3);
  const std::vector<double> payloads = {5e3, 20e3, 80e3};
  const std::vector<agents::PolicyKind> kinds = {agents::PolicyKind::greedy, agents::PolicyKind::random};
  const auto one = payload_sweep(cfg, payloads, kinds);
  cfg.threads = 3;
  const auto three = payload_sweep(cfg, payloads, kinds);
  REQUIRE(one.size() == 2 * 3 * 2);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].kind == three[i].kind);
    CHECK(one[i].payload_bits == three[i].payload_bits);
    CHECK(one[i].seed == three[i].seed);
    CHECK(one[i].mean_qoe == three[i].mean_qoe);
    CHECK(one[i].successful_data == three[i].successful_data);
  }
  CHECK(one.front().kind == agents::PolicyKind::greedy);
  CHECK(one[0].payload_bits == 5e3);
  CHECK(one[0].seed == 1);
  CHECK(one[1].seed == 2);

  const auto points = aggregate(one);
  REQUIRE(points.size() == 6);
  CHECK(points[0].n == 2);
  const std::vector<double> q = {one[0].mean_qoe, one[1].mean_qoe};
  CHECK(points[0].qoe_mean == doctest::Approx(stats::mean(q)));
  CHECK(points[0].qoe_std == doctest::Approx(stats::stddev(q)));

  const auto dir = scratch("sweep");
  write_file(dir / "sweep_per_seed.csv", sweep_records_csv(one, "abc"));
  const auto back = read_sweep_records_csv(dir / "sweep_per_seed.csv");
  REQUIRE(back.size() == one.size());
  CHECK(back[5].mean_qoe == one[5].mean_qoe);
  CHECK(sweep_points_csv(points, "abc").find("agent,payload_bits,qoe_mean,qoe_std") != std::string::npos);
  fs::remove_all(dir);

  const std::vector<double> two = {5e3, 10e3};
  CHECK_THROWS_AS(payload_sweep(cfg, two, kinds), std::invalid_argument);
}
