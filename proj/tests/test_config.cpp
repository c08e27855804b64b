#include <doctest.h>

#include <stdexcept>
#include <string>

#include "genv2v/config.hpp"

using namespace genv2v;
using namespace genv2v::config;

namespace {

std::string error_of(const std::string& yaml) {
  try {
    parse_config_text(yaml);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST_CASE("empty document yields the documented defaults") {
  const auto cfg = parse_config_text("");
  const ExperimentConfig def;
  CHECK(echo(cfg) == echo(def));
  CHECK(cfg.env.num_links() == 3);
  CHECK(cfg.env.channel.num_subchannels == 4);
  CHECK(cfg.episodes == 3000);
  CHECK(cfg.seeds.size() == 5);
  CHECK(cfg.agent.gamma == 0.95);
  CHECK(cfg.env.qoe.outage_cap == 0.1);
  const auto text = echo(cfg);
  for (const char* key : {"channel:", "geometry:", "content:", "qoe:", "env:", "agent:", "experiment:",
                          "obs_gain_db_offset", "payload_sweep", "train_interval"}) {
    CHECK(text.find(key) != std::string::npos);
  }
}

TEST_CASE("echo round-trips through the parser") {
  auto cfg = parse_config_text("experiment:\n  episodes: 12\n  seeds: [4, 9]\nagent:\n  hidden: [32]\n");
  CHECK(cfg.episodes == 12);
  CHECK(cfg.agent.hidden == std::vector<int>{32});
  const auto again = parse_config_text(echo(cfg));
  CHECK(echo(again) == echo(cfg));
  CHECK(config_hash(again) == config_hash(cfg));
}

TEST_CASE("hash ignores output location and thread count only") {
  ExperimentConfig a;
  auto b = a;
  b.output_dir = "elsewhere";
  b.threads = 7;
  CHECK(config_hash(a) == config_hash(b));
  b.episodes = 10;
  CHECK(config_hash(a) != config_hash(b));
  CHECK(config_hash(a).size() == 16);
}

TEST_CASE("power above the budget is rejected") {
  const auto msg = error_of("env:\n  power_levels_dbm: [5, 10, 30]\n  power_budget_dbm: 23\n");
  CHECK(msg.find("power_levels_dbm") != std::string::npos);
}

TEST_CASE("slot longer than the coherence time is rejected with a reason") {
  const auto msg = error_of("env:\n  slot_duration_s: 0.02\n");
  CHECK(msg.find("coherence") != std::string::npos);
  CHECK(msg.find("slot_duration_s") != std::string::npos);
}

TEST_CASE("unknown keys and bad types carry line numbers") {
  const auto unknown = error_of("channel:\n  pathloss_exponent: 3\n  bogus_key: 1\n");
  CHECK(unknown.find("bogus_key") != std::string::npos);
  CHECK(unknown.find("line 3") != std::string::npos);

  const auto section = error_of("mystery:\n  a: 1\n");
  CHECK(section.find("mystery") != std::string::npos);

  const auto type = error_of("experiment:\n  episodes: many\n");
  CHECK(type.find("episodes") != std::string::npos);
  CHECK(type.find("line 2") != std::string::npos);

  CHECK_FALSE(error_of("experiment: [1, 2]\n").empty());
  CHECK_FALSE(error_of("agent:\n  agent_kind: ddqn\n").empty());
}

TEST_CASE("invariant violations surface as config errors") {
  CHECK_FALSE(error_of("qoe:\n  outage_cap: 1.5\n").empty());
  CHECK_FALSE(error_of("experiment:\n  episodes: 0\n").empty());
  CHECK_FALSE(error_of("experiment:\n  agent: sarsa\n").empty());
  CHECK_FALSE(error_of("geometry:\n  tx_rx_distance_m: [100, 200]\n").empty());
  CHECK_FALSE(error_of("agent:\n  gamma: 1.5\n").empty());
  CHECK_THROWS_AS(parse_config("/nonexistent/genv2v.yaml"), ConfigError);
}

TEST_CASE("run environment applies payload and seed") {
  ExperimentConfig cfg;
  const auto env = cfg.env_for(40e3, 9);
  CHECK(env.content.payload_bits() == doctest::Approx(40e3));
  CHECK(env.seed == 9);
}
