#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "genv2v/agents.hpp"
#include "genv2v/env.hpp"

namespace genv2v::config {

/// Parse or validation failure. `line` is 1-based, 0 when not tied to a line.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& message, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + message : message), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct ExperimentConfig {
  env::EnvConfig env = env::EnvConfig::defaults();
  agents::DqnConfig agent;
  agents::PolicyKind agent_kind = agents::PolicyKind::ddqn;
  agents::GreedyInfo greedy_info = agents::GreedyInfo::previous;
  int episodes = 3000;
  int eval_episodes = 20;
  std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
  int smoothing_window = 100;
  double payload_bits = 20e3;  // transmitted bits per slot for train/eval
  std::vector<double> payload_sweep = {5e3, 10e3, 20e3, 40e3, 80e3};
  std::vector<agents::PolicyKind> sweep_agents = {agents::PolicyKind::ddqn, agents::PolicyKind::dqn,
                                                  agents::PolicyKind::greedy, agents::PolicyKind::random};
  std::filesystem::path output_dir = "out";
  int threads = 0;  // 0: hardware concurrency

  /// Throws ConfigError.
  void validate() const;

  /// Environment for one run: payload applied, seed set.
  env::EnvConfig env_for(double payload_bits, std::uint64_t seed) const;
};

/// Loads a YAML config. Missing keys take defaults; unknown keys, type errors
/// and invariant violations throw ConfigError.
ExperimentConfig parse_config(const std::filesystem::path& path);
ExperimentConfig parse_config_text(const std::string& text);

/// Every resolved field, in schema order, as YAML.
std::string echo(const ExperimentConfig& config);

/// FNV-1a of echo(), as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

}  // namespace genv2v::config
