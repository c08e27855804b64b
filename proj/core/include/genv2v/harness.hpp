#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "genv2v/agents.hpp"
#include "genv2v/config.hpp"
#include "genv2v/env.hpp"

namespace genv2v::harness {

inline constexpr const char* kVersion = "0.1.0";

/// Trailing mean: element i averages inputs max(0, i - window + 1) .. i.
/// Throws std::invalid_argument for window < 1.
std::vector<double> sliding_window_smooth(std::span<const double> series, int window);

/// What one episode produced, before any constraint gating.
struct EpisodeOutcome {
  double reward = 0.0;
  double mean_system_qoe = 0.0;  // per slot
  std::vector<double> delivered_bits;  // per link, whole episode
  std::vector<double> final_outage;    // per link, tracker value at the last slot
};

/// Delivered bits summed over the links whose final outage is within the cap.
double successful_data_bits(const EpisodeOutcome& episode, double outage_cap);

/// Mean of successful_data_bits over episodes (0 for none).
double successful_data_metric(std::span<const EpisodeOutcome> episodes, double outage_cap);

/// Plays one episode; the policy sees every transition.
EpisodeOutcome run_episode(env::Environment& env, agents::Policy& policy, std::uint64_t episode_seed);

struct MetricsRow {
  std::uint64_t seed = 0;
  int episode = 0;
  double raw_reward = 0.0;
  double smoothed_reward = 0.0;
  double mean_system_qoe = 0.0;
  double successful_data_bits = 0.0;
  std::vector<double> outage;
  std::vector<bool> constraint_satisfied;
};

/// Fresh policy of `kind` sized for `env`. Learning agents decay epsilon over
/// `total_slots`.
std::unique_ptr<agents::Policy> make_policy(agents::PolicyKind kind, const config::ExperimentConfig& cfg,
                                            const env::Environment& env, std::uint64_t seed,
                                            std::int64_t total_slots);

struct TrainingRun {
  std::vector<MetricsRow> rows;
  std::unique_ptr<agents::Policy> policy;
};

/// `cfg.episodes` episodes at `payload_bits`, one row per episode.
TrainingRun train(const config::ExperimentConfig& cfg, agents::PolicyKind kind, std::uint64_t seed,
                  double payload_bits);

struct EvalResult {
  std::vector<EpisodeOutcome> episodes;
  double mean_qoe = 0.0;
  double mean_reward = 0.0;
  double successful_data = 0.0;
};

/// Frozen-policy episodes on seeds disjoint from training.
EvalResult evaluate(agents::Policy& policy, const config::ExperimentConfig& cfg, std::uint64_t seed,
                    double payload_bits, int episodes);

// ---- files ---------------------------------------------------------------

struct RunHeader {
  std::string agent;
  std::uint64_t seed = 0;
  double payload_bits = 0.0;
  std::string config_hash;
};

std::string metrics_csv(std::span<const MetricsRow> rows, const RunHeader& header);
std::vector<MetricsRow> read_metrics_csv(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

std::filesystem::path metrics_path(const std::filesystem::path& dir, agents::PolicyKind kind, std::uint64_t seed);

/// Trains, writes train_<agent>_seed<N>.csv plus a .meta run-metadata file,
/// and for learning agents a parameter checkpoint with its sidecar. Returns
/// the CSV path.
std::filesystem::path run_training(const config::ExperimentConfig& cfg, agents::PolicyKind kind,
                                   std::uint64_t seed, const std::filesystem::path& out_dir);

/// Learned-agent checkpoint: parameter file plus `<file>.meta` key=value text.
void save_checkpoint(const agents::DqnAgent& agent, const config::ExperimentConfig& cfg, std::uint64_t seed,
                     const std::filesystem::path& path);

struct Checkpoint {
  neural::Mlp net;
  std::map<std::string, std::string> meta;
};

Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Agent with the checkpoint's parameters, in evaluation mode.
std::unique_ptr<agents::DqnAgent> agent_from_checkpoint(const Checkpoint& ckpt, const config::ExperimentConfig& cfg,
                                                        const env::Environment& env);

// ---- sweeps --------------------------------------------------------------

struct SweepRecord {
  agents::PolicyKind kind = agents::PolicyKind::ddqn;
  double payload_bits = 0.0;
  std::uint64_t seed = 0;
  double mean_qoe = 0.0;
  double successful_data = 0.0;
  double mean_reward = 0.0;
};

struct SweepPoint {
  agents::PolicyKind kind = agents::PolicyKind::ddqn;
  double payload_bits = 0.0;
  double qoe_mean = 0.0;
  double qoe_std = 0.0;
  double data_mean = 0.0;
  double data_std = 0.0;
  std::size_t n = 0;
};

/// Train-then-evaluate every (kind, payload, seed). Jobs run on `cfg.threads`
/// workers; results come back sorted by (kind, payload, seed).
std::vector<SweepRecord> payload_sweep(const config::ExperimentConfig& cfg, std::span<const double> payloads,
                                       std::span<const agents::PolicyKind> kinds);

std::vector<SweepPoint> aggregate(std::span<const SweepRecord> records);

std::string sweep_records_csv(std::span<const SweepRecord> records, const std::string& config_hash);
std::string sweep_points_csv(std::span<const SweepPoint> points, const std::string& config_hash);
std::vector<SweepRecord> read_sweep_records_csv(const std::filesystem::path& path);

/// Runs fn(0..count-1) on up to `threads` workers (0 = hardware concurrency).
/// The first exception thrown by any job is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace genv2v::harness
