#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "genv2v/channel.hpp"
#include "genv2v/content.hpp"
#include "genv2v/qoe.hpp"
#include "genv2v/rng.hpp"

namespace genv2v::env {

/// Everything needed to instantiate the V2V allocation MDP.
struct EnvConfig {
  channel::ChannelParams channel;
  channel::LinkGeometry geometry;
  content::ContentParams content;
  qoe::QoeParams qoe;

  std::vector<double> power_levels_w;  // ascending
  double power_budget_w = 0.0;
  std::vector<int> diffusion_levels;
  double slot_duration_s = 1e-3;
  int episode_length = 100;
  double penalty_weight = 10.0;
  std::uint64_t seed = 1;

  // Observation scaling. A NaN offset means 10*log10(noise / power budget),
  // i.e. own-gain features read as max-power SNR in dB over `obs_db_scale`.
  double obs_gain_db_offset = std::numeric_limits<double>::quiet_NaN();
  double obs_db_scale = 10.0;
  double obs_payload_ref_bits = 80e3;

  // Test hooks.
  bool unit_fading = false;     // small-scale fading fixed at 1
  bool frozen_channel = false;  // slot-0 realization reused for the whole episode

  std::size_t num_links() const { return geometry.num_links(); }
  std::size_t num_subchannels() const { return static_cast<std::size_t>(channel.num_subchannels); }
  double gain_db_offset() const;

  /// Throws std::invalid_argument with a dotted field path on any violation.
  void validate() const;

  /// Three links on four sub-channels with the documented default layout.
  static EnvConfig defaults();
};

/// One link's decoded choice.
struct LinkAction {
  int subchannel = 0;
  int power = 0;
  int diffusion = 0;
  bool operator==(const LinkAction&) const = default;
};

struct ActionSpace {
  int num_subchannels = 1;
  int num_power_levels = 1;
  int num_diffusion_levels = 1;
  std::size_t num_links = 1;

  int per_link_size() const { return num_subchannels * num_power_levels * num_diffusion_levels; }
  /// per_link_size ^ num_links, saturating at UINT64_MAX.
  std::uint64_t joint_size() const;

  int encode(const LinkAction& a) const;
  /// Throws std::out_of_range for ids outside [0, per_link_size).
  LinkAction decode(int flat_id) const;
  bool valid(int flat_id) const { return flat_id >= 0 && flat_id < per_link_size(); }
};

ActionSpace action_space(const EnvConfig& config);

using Observation = std::vector<double>;

struct Transition {
  Observation obs;
  int action = 0;
  double reward = 0.0;
  Observation next_obs;
  bool done = false;
};

/// Per-link outcome of one slot plus the reward decomposition.
struct StepInfo {
  std::vector<double> rate_bps;
  std::vector<double> sinr;
  std::vector<bool> success;
  std::vector<double> outage;
  std::vector<double> qoe;
  std::vector<double> delivered_bits;
  double system_qoe = 0.0;
  double constraint_excess = 0.0;  // sum_k max(0, outage_k - cap)
  double penalty = 0.0;            // penalty_weight * constraint_excess
  double reward = 0.0;             // system_qoe - penalty
};

struct StepResult {
  std::vector<Observation> observations;
  double reward = 0.0;
  bool done = false;
  StepInfo info;
};

/// Single-threaded MDP instance. Observation layout per link:
/// [own gain per sub-channel | interference per sub-channel (previous slot) |
///  previous rate | payload | one-hot previous action].
class Environment {
 public:
  explicit Environment(EnvConfig config);

  std::vector<Observation> reset(std::uint64_t episode_seed);

  /// Throws std::out_of_range for an invalid action id and std::logic_error
  /// when called on a finished episode.
  StepResult step(std::span<const int> actions);

  /// Evaluates `actions` on the current slot without changing any state.
  StepInfo preview(std::span<const int> actions) const;

  std::vector<Observation> observations() const;
  std::size_t observation_dim() const;

  const EnvConfig& config() const { return config_; }
  const ActionSpace& actions() const { return space_; }
  const channel::ChannelRealization& current_channel() const { return current_; }
  const channel::ChannelRealization& previous_channel() const { return previous_; }
  const qoe::OutageTracker& outage_tracker() const { return tracker_; }
  double coherence_time(std::size_t link) const { return coherence_[link]; }
  /// Transmitted bits per link per slot (skeleton + prompt).
  double payload_bits() const { return config_.content.payload_bits(); }

  int slot() const { return slot_; }
  bool done() const { return done_; }

 private:
  StepInfo evaluate(std::span<const int> actions, qoe::OutageTracker& tracker) const;
  void draw_next();

  EnvConfig config_;
  ActionSpace space_;
  std::vector<double> coherence_;
  Rng rng_;
  std::vector<double> shadowing_;
  channel::ChannelRealization current_;
  channel::ChannelRealization previous_;
  qoe::OutageTracker tracker_;
  std::vector<double> prev_interference_;  // [link][subchannel]
  std::vector<double> prev_rate_;
  std::vector<int> prev_action_;  // -1 before the first step
  int slot_ = 0;
  bool done_ = true;
};

}  // namespace genv2v::env
