#include "genv2v/agents.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "genv2v/channel.hpp"
#include "genv2v/content.hpp"
#include "genv2v/qoe.hpp"

namespace genv2v::agents {

std::string_view to_string(PolicyKind kind) {
  switch (kind) {
    case PolicyKind::ddqn: return "ddqn";
    case PolicyKind::dqn: return "dqn";
    case PolicyKind::greedy: return "greedy";
    case PolicyKind::random: return "random";
    case PolicyKind::oracle: return "oracle";
  }
  return "unknown";
}

PolicyKind parse_policy_kind(std::string_view name) {
  for (auto k : {PolicyKind::ddqn, PolicyKind::dqn, PolicyKind::greedy, PolicyKind::random, PolicyKind::oracle}) {
    if (name == to_string(k)) return k;
  }
  throw std::invalid_argument("unknown agent kind '" + std::string(name) + "'");
}

std::string_view to_string(GreedyInfo info) { return info == GreedyInfo::previous ? "prev" : "frozen"; }

GreedyInfo parse_greedy_info(std::string_view name) {
  if (name == "prev") return GreedyInfo::previous;
  if (name == "frozen") return GreedyInfo::current;
  throw std::invalid_argument("unknown greedy information set '" + std::string(name) + "' (prev|frozen)");
}

int argmax(std::span<const double> values) {
  int best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[static_cast<std::size_t>(best)]) best = static_cast<int>(i);
  }
  return best;
}

int select_action(const neural::Mlp& net, const env::Observation& obs, double epsilon, Rng& rng) {
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (epsilon > 0 && coin(rng) < epsilon) {
    std::uniform_int_distribution<int> pick(0, net.output_dim() - 1);
    return pick(rng);
  }
  const auto q = net.forward(obs);
  return argmax(std::span<const double>(q.data(), static_cast<std::size_t>(q.size())));
}

namespace {

double column_max(const neural::Matrix& q, Eigen::Index col) { return q.col(col).maxCoeff(); }

int column_argmax(const neural::Matrix& q, Eigen::Index col) {
  return argmax(std::span<const double>(q.col(col).data(), static_cast<std::size_t>(q.rows())));
}

}  // namespace

std::vector<double> ddqn_target(std::span<const double> rewards, std::span<const char> terminal,
                                const neural::Matrix& q_online_next, const neural::Matrix& q_target_next,
                                double gamma) {
  std::vector<double> y(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    y[i] = rewards[i];
    if (terminal[i]) continue;
    const auto col = static_cast<Eigen::Index>(i);
    y[i] += gamma * q_target_next(column_argmax(q_online_next, col), col);
  }
  return y;
}

std::vector<double> dqn_target(std::span<const double> rewards, std::span<const char> terminal,
                               const neural::Matrix& q_target_next, double gamma) {
  std::vector<double> y(rewards.size());
  for (std::size_t i = 0; i < rewards.size(); ++i) {
    y[i] = rewards[i];
    if (!terminal[i]) y[i] += gamma * column_max(q_target_next, static_cast<Eigen::Index>(i));
  }
  return y;
}

double EpsilonSchedule::at(std::int64_t step) const {
  if (step >= horizon) return end;
  if (step <= 0) return start;
  const double frac = static_cast<double>(step) / static_cast<double>(horizon);
  return start + (end - start) * frac;
}

void DqnConfig::validate() const {
  auto fail = [](const char* field, const char* what) {
    throw std::invalid_argument(std::string("agent.") + field + ": " + what);
  };
  for (int h : hidden) {
    if (h <= 0) fail("hidden", "layer widths must be positive");
  }
  if (!(gamma >= 0 && gamma < 1)) fail("gamma", "must lie in [0, 1)");
  if (!(epsilon_start >= 0 && epsilon_start <= 1)) fail("epsilon_start", "must lie in [0, 1]");
  if (!(epsilon_end >= 0 && epsilon_end <= epsilon_start)) fail("epsilon_end", "must lie in [0, epsilon_start]");
  if (!(epsilon_decay_fraction > 0 && epsilon_decay_fraction <= 1)) {
    fail("epsilon_decay_fraction", "must lie in (0, 1]");
  }
  if (target_sync_interval < 1) fail("target_sync_interval", "must be at least 1");
  if (batch_size < 1) fail("batch_size", "must be at least 1");
  if (replay_capacity < static_cast<std::size_t>(batch_size)) fail("replay_capacity", "must hold one batch");
  if (!(adam.learning_rate > 0)) fail("learning_rate", "must be positive");
  if (!(adam.beta1 >= 0 && adam.beta1 < 1) || !(adam.beta2 >= 0 && adam.beta2 < 1)) {
    fail("beta1", "moment decays must lie in [0, 1)");
  }
  if (!(adam.epsilon > 0)) fail("adam_epsilon", "must be positive");
  if (!(huber_delta > 0)) fail("huber_delta", "must be positive");
  if (train_interval < 1) fail("train_interval", "must be at least 1");
  if (learning_starts < 0) fail("learning_starts", "must be non-negative");
  if (!(reward_scale > 0)) fail("reward_scale", "must be positive");
}

namespace {

std::vector<int> layer_dims(int obs_dim, const std::vector<int>& hidden, int num_actions) {
  std::vector<int> dims{obs_dim};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(num_actions);
  return dims;
}

neural::Matrix stack(std::span<const env::Transition* const> batch, bool next) {
  const auto rows = static_cast<Eigen::Index>(batch.front()->obs.size());
  neural::Matrix m(rows, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const auto& v = next ? batch[i]->next_obs : batch[i]->obs;
    m.col(static_cast<Eigen::Index>(i)) = Eigen::Map<const neural::Vector>(v.data(), rows);
  }
  return m;
}

}  // namespace

DqnAgent::DqnAgent(PolicyKind kind, DqnConfig config, int obs_dim, int num_actions, std::int64_t total_slots,
                   std::uint64_t seed)
    : kind_(kind),
      config_(std::move(config)),
      num_actions_(num_actions),
      online_(neural::Mlp::init(layer_dims(obs_dim, config_.hidden, num_actions), seed)),
      target_(online_),
      optimizer_(online_, config_.adam),
      replay_(config_.replay_capacity),
      explore_rng_(make_rng(seed, {stream::kExploration})),
      replay_rng_(make_rng(seed, {stream::kReplay})) {
  if (kind != PolicyKind::ddqn && kind != PolicyKind::dqn) {
    throw std::invalid_argument("DqnAgent: kind must be ddqn or dqn");
  }
  config_.validate();
  schedule_.start = config_.epsilon_start;
  schedule_.end = config_.epsilon_end;
  schedule_.horizon = std::max<std::int64_t>(
      1, static_cast<std::int64_t>(std::llround(config_.epsilon_decay_fraction * static_cast<double>(total_slots))));
}

double DqnAgent::epsilon() const { return training_ ? schedule_.at(slots_) : 0.0; }

std::vector<int> DqnAgent::act(const env::Environment& /*env*/, std::span<const env::Observation> obs) {
  const double eps = epsilon();
  const auto rows = static_cast<Eigen::Index>(obs.front().size());
  neural::Matrix x(rows, static_cast<Eigen::Index>(obs.size()));
  for (std::size_t k = 0; k < obs.size(); ++k) {
    x.col(static_cast<Eigen::Index>(k)) = Eigen::Map<const neural::Vector>(obs[k].data(), rows);
  }
  const neural::Matrix q = online_.forward_batch(x);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  std::uniform_int_distribution<int> pick(0, num_actions_ - 1);
  std::vector<int> actions(obs.size());
  for (std::size_t k = 0; k < obs.size(); ++k) {
    if (eps > 0 && coin(explore_rng_) < eps) {
      actions[k] = pick(explore_rng_);
    } else {
      actions[k] = column_argmax(q, static_cast<Eigen::Index>(k));
    }
  }
  return actions;
}

void DqnAgent::observe(std::span<const env::Observation> obs, std::span<const int> actions, double reward,
                       std::span<const env::Observation> next_obs, bool done) {
  if (!training_) return;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    remember(env::Transition{obs[k], actions[k], reward, next_obs[k], done});
  }
  ++slots_;
  if (slots_ % config_.train_interval == 0 &&
      replay_.size() >= static_cast<std::size_t>(std::max(config_.batch_size, config_.learning_starts))) {
    train_step();
  }
}

void DqnAgent::remember(env::Transition t) {
  t.reward *= config_.reward_scale;
  replay_.push(std::move(t));
}

std::vector<double> DqnAgent::targets(std::span<const env::Transition* const> batch) const {
  std::vector<double> rewards(batch.size());
  std::vector<char> terminal(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    rewards[i] = batch[i]->reward;
    terminal[i] = batch[i]->done ? 1 : 0;
  }
  const neural::Matrix next = stack(batch, true);
  const neural::Matrix q_target_next = target_.forward_batch(next);
  if (kind_ == PolicyKind::ddqn) {
    return ddqn_target(rewards, terminal, online_.forward_batch(next), q_target_next, config_.gamma);
  }
  return dqn_target(rewards, terminal, q_target_next, config_.gamma);
}

std::optional<double> DqnAgent::train_step() {
  const auto batch_size = static_cast<std::size_t>(config_.batch_size);
  if (replay_.size() < batch_size) return std::nullopt;
  const auto batch = replay_.sample(batch_size, replay_rng_);
  const auto y = targets(batch);
  const neural::Matrix x = stack(batch, false);
  const neural::Matrix q = online_.forward_batch(x);

  std::vector<double> chosen(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) chosen[i] = q(batch[i]->action, static_cast<Eigen::Index>(i));
  const auto huber = neural::huber_loss(chosen, y, config_.huber_delta);

  // Mean loss over the batch; only the taken action's output receives gradient.
  neural::Matrix d_out = neural::Matrix::Zero(q.rows(), q.cols());
  const double inv_batch = 1.0 / static_cast<double>(batch_size);
  for (std::size_t i = 0; i < batch_size; ++i) {
    d_out(batch[i]->action, static_cast<Eigen::Index>(i)) = huber.gradient(static_cast<Eigen::Index>(i)) * inv_batch;
  }
  try {
    optimizer_.step(online_, online_.backward(x, d_out));
  } catch (const neural::NonFiniteGradient& e) {
    ++skipped_;
    std::cerr << "warning: " << e.what() << " (train step " << train_steps_ << ")\n";
  }
  ++train_steps_;
  if (train_steps_ % config_.target_sync_interval == 0) neural::copy_parameters(online_, target_);
  return huber.loss;
}

double DqnAgent::max_q(const env::Observation& obs) const { return online_.forward(obs).maxCoeff(); }

std::vector<int> GreedyPolicy::act(const env::Environment& env, std::span<const env::Observation> /*obs*/) {
  const auto& cfg = env.config();
  const auto& space = env.actions();
  const auto& gains = info_ == GreedyInfo::previous ? env.previous_channel() : env.current_channel();
  const double payload = env.payload_bits();
  std::vector<int> actions(cfg.num_links());
  std::vector<double> predicted(static_cast<std::size_t>(space.per_link_size()));
  for (std::size_t k = 0; k < cfg.num_links(); ++k) {
    for (int id = 0; id < space.per_link_size(); ++id) {
      const auto a = space.decode(id);
      const double p = cfg.power_levels_w[static_cast<std::size_t>(a.power)];
      const double snr = p * gains.gain(k, k, static_cast<std::size_t>(a.subchannel)) / cfg.channel.noise_power_w;
      const double rate = channel::rate_bps(snr, cfg.channel.subchannel_bandwidth_hz);
      const int steps = cfg.diffusion_levels[static_cast<std::size_t>(a.diffusion)];
      const double gen = content::generation_time(steps, cfg.content);
      const bool ok = qoe::success_indicator(rate, payload, gen, cfg.qoe.deadline_s, env.coherence_time(k));
      predicted[static_cast<std::size_t>(id)] =
          qoe::link_qoe(rate, content::similarity(steps, cfg.content), ok, cfg.qoe);
    }
    actions[k] = argmax(predicted);
  }
  return actions;
}

std::vector<int> RandomPolicy::act(const env::Environment& env, std::span<const env::Observation> /*obs*/) {
  std::uniform_int_distribution<int> pick(0, env.actions().per_link_size() - 1);
  std::vector<int> actions(env.config().num_links());
  for (auto& a : actions) a = pick(rng_);
  return actions;
}

std::vector<int> oracle_search(const env::Environment& env, std::uint64_t max_joint) {
  const auto& space = env.actions();
  const std::uint64_t joint = space.joint_size();
  if (joint > max_joint) {
    throw std::length_error("oracle_search: joint action space of " + std::to_string(joint) +
                            " exceeds the limit of " + std::to_string(max_joint));
  }
  const auto n = env.config().num_links();
  const auto per = static_cast<std::uint64_t>(space.per_link_size());
  std::vector<int> candidate(n);
  std::vector<int> best;
  double best_reward = -std::numeric_limits<double>::infinity();
  for (std::uint64_t id = 0; id < joint; ++id) {
    std::uint64_t rest = id;
    for (std::size_t k = n; k-- > 0;) {
      candidate[k] = static_cast<int>(rest % per);
      rest /= per;
    }
    const double r = env.preview(candidate).reward;
    if (r > best_reward) {
      best_reward = r;
      best = candidate;
    }
  }
  return best;
}

}  // namespace genv2v::agents
