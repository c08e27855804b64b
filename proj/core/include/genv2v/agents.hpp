#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "genv2v/env.hpp"
#include "genv2v/neural.hpp"
#include "genv2v/rng.hpp"

namespace genv2v::agents {

enum class PolicyKind { ddqn, dqn, greedy, random, oracle };

std::string_view to_string(PolicyKind kind);
/// Throws std::invalid_argument for unknown names.
PolicyKind parse_policy_kind(std::string_view name);

/// Which channel knowledge the greedy baseline acts on.
enum class GreedyInfo { previous, current };

std::string_view to_string(GreedyInfo info);
GreedyInfo parse_greedy_info(std::string_view name);  // "prev" | "frozen"

/// Common interface driven by the harness. All policies act per link.
class Policy {
 public:
  virtual ~Policy() = default;
  virtual PolicyKind kind() const = 0;

  /// One flat per-link action id per link.
  virtual std::vector<int> act(const env::Environment& env, std::span<const env::Observation> obs) = 0;

  /// Feedback after a step. Learning policies store transitions and train.
  virtual void observe(std::span<const env::Observation> /*obs*/, std::span<const int> /*actions*/,
                       double /*reward*/, std::span<const env::Observation> /*next_obs*/, bool /*done*/) {}

  /// Exploration and learning on (training) or frozen greedy play (evaluation).
  virtual void set_training(bool /*training*/) {}
};

/// Index of the largest entry; ties go to the lowest index.
int argmax(std::span<const double> values);

/// Epsilon-greedy over `net`'s outputs for one observation.
int select_action(const neural::Mlp& net, const env::Observation& obs, double epsilon, Rng& rng);

/// Decoupled target: the online network picks the next action, the target
/// network values it. Column i of the Q matrices is sample i's next state.
std::vector<double> ddqn_target(std::span<const double> rewards, std::span<const char> terminal,
                                const neural::Matrix& q_online_next, const neural::Matrix& q_target_next,
                                double gamma);

/// Standard max target over the target network.
std::vector<double> dqn_target(std::span<const double> rewards, std::span<const char> terminal,
                               const neural::Matrix& q_target_next, double gamma);

/// Linear decay from `start` to `end` over `horizon` steps, then flat.
struct EpsilonSchedule {
  double start = 1.0;
  double end = 0.05;
  std::int64_t horizon = 1;

  double at(std::int64_t step) const;
};

struct DqnConfig {
  std::vector<int> hidden = {128, 64};
  double gamma = 0.95;
  double epsilon_start = 1.0;
  double epsilon_end = 0.05;
  double epsilon_decay_fraction = 0.6;  // of total training slots
  int target_sync_interval = 200;       // train steps
  int batch_size = 64;
  std::size_t replay_capacity = 50000;
  neural::AdamConfig adam;
  double huber_delta = 1.0;
  int train_interval = 4;      // environment slots per train step
  int learning_starts = 1000;  // stored transitions before the first train step
  double reward_scale = 0.1;   // applied to stored rewards only

  void validate() const;
};

/// DDQN (PolicyKind::ddqn) or vanilla DQN (PolicyKind::dqn) with one network
/// shared by every link. Each link contributes its own transition carrying
/// the shared system reward.
class DqnAgent : public Policy {
 public:
  DqnAgent(PolicyKind kind, DqnConfig config, int obs_dim, int num_actions, std::int64_t total_slots,
           std::uint64_t seed);

  PolicyKind kind() const override { return kind_; }
  std::vector<int> act(const env::Environment& env, std::span<const env::Observation> obs) override;
  void observe(std::span<const env::Observation> obs, std::span<const int> actions, double reward,
               std::span<const env::Observation> next_obs, bool done) override;
  void set_training(bool training) override { training_ = training; }

  void remember(env::Transition t);
  /// One gradient step on a sampled batch. Returns nullopt (and does nothing)
  /// while the replay holds fewer than batch_size transitions.
  std::optional<double> train_step();

  /// Bootstrap targets for a batch under this agent's rule.
  std::vector<double> targets(std::span<const env::Transition* const> batch) const;

  double epsilon() const;
  double max_q(const env::Observation& obs) const;

  const neural::Mlp& online() const { return online_; }
  const neural::Mlp& target() const { return target_; }
  neural::Mlp& online() { return online_; }
  const DqnConfig& config() const { return config_; }
  std::int64_t slots_seen() const { return slots_; }
  std::int64_t train_steps() const { return train_steps_; }
  std::int64_t skipped_updates() const { return skipped_; }
  std::size_t replay_size() const { return replay_.size(); }

 private:
  PolicyKind kind_;
  DqnConfig config_;
  int num_actions_;
  neural::Mlp online_;
  neural::Mlp target_;
  neural::AdamOptimizer optimizer_;
  neural::ReplayBuffer<env::Transition> replay_;
  EpsilonSchedule schedule_;
  Rng explore_rng_;
  Rng replay_rng_;
  bool training_ = true;
  std::int64_t slots_ = 0;
  std::int64_t train_steps_ = 0;
  std::int64_t skipped_ = 0;
};

/// Per link: the (sub-channel, power, diffusion) maximizing instantaneous
/// link QoE predicted from own-link gains alone, with no interference and no
/// regard for the outage cap.
class GreedyPolicy : public Policy {
 public:
  explicit GreedyPolicy(GreedyInfo info = GreedyInfo::previous) : info_(info) {}
  PolicyKind kind() const override { return PolicyKind::greedy; }
  std::vector<int> act(const env::Environment& env, std::span<const env::Observation> obs) override;

 private:
  GreedyInfo info_;
};

class RandomPolicy : public Policy {
 public:
  explicit RandomPolicy(std::uint64_t seed) : rng_(make_rng(seed, {stream::kPolicy})) {}
  PolicyKind kind() const override { return PolicyKind::random; }
  std::vector<int> act(const env::Environment& env, std::span<const env::Observation> obs) override;

 private:
  Rng rng_;
};

inline constexpr std::uint64_t kOracleMaxJointSize = 100000;

/// Exhaustive one-step search over joint actions on the current slot.
/// Ties go to the lowest joint id (link 0 most significant). Throws
/// std::length_error when the joint space exceeds `max_joint`.
std::vector<int> oracle_search(const env::Environment& env, std::uint64_t max_joint = kOracleMaxJointSize);

class OraclePolicy : public Policy {
 public:
  PolicyKind kind() const override { return PolicyKind::oracle; }
  std::vector<int> act(const env::Environment& env, std::span<const env::Observation> /*obs*/) override {
    return oracle_search(env);
  }
};

}  // namespace genv2v::agents
