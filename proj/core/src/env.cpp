#include "genv2v/env.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace genv2v::env {

namespace {

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw std::invalid_argument("env." + field + ": " + what);
}

}  // namespace

double EnvConfig::gain_db_offset() const {
  if (!std::isnan(obs_gain_db_offset)) return obs_gain_db_offset;
  return 10.0 * std::log10(channel.noise_power_w / power_budget_w);
}

void EnvConfig::validate() const {
  channel.validate();
  geometry.validate();
  content.validate();
  qoe.validate();
  if (power_levels_w.empty()) fail("power_levels_dbm", "must not be empty");
  if (!(power_budget_w > 0)) fail("power_budget_dbm", "must be positive");
  for (std::size_t i = 0; i < power_levels_w.size(); ++i) {
    if (!(power_levels_w[i] > 0)) fail("power_levels_dbm", "levels must be positive");
    if (i > 0 && !(power_levels_w[i] > power_levels_w[i - 1])) {
      fail("power_levels_dbm", "levels must be strictly ascending");
    }
  }
  // Tolerate dBm round-off when the top level is the budget itself.
  if (power_levels_w.back() > power_budget_w * (1.0 + 1e-9)) {
    fail("power_levels_dbm", "highest level " + std::to_string(channel::watt_to_dbm(power_levels_w.back())) +
                             " dBm exceeds the power budget of " +
                             std::to_string(channel::watt_to_dbm(power_budget_w)) + " dBm");
  }
  if (diffusion_levels.empty()) fail("diffusion_levels", "must not be empty");
  for (std::size_t i = 0; i < diffusion_levels.size(); ++i) {
    if (diffusion_levels[i] < 0) fail("diffusion_levels", "levels must be non-negative");
    if (i > 0 && diffusion_levels[i] <= diffusion_levels[i - 1]) {
      fail("diffusion_levels", "levels must be strictly ascending");
    }
  }
  if (!(slot_duration_s > 0)) fail("slot_duration_s", "must be positive");
  if (episode_length < 1) fail("episode_length", "must be at least 1");
  if (penalty_weight < 0) fail("penalty_weight", "must be non-negative");
  if (!(obs_db_scale > 0)) fail("obs_db_scale", "must be positive");
  if (!(obs_payload_ref_bits > 0)) fail("obs_payload_ref_bits", "must be positive");
  for (std::size_t k = 0; k < geometry.num_links(); ++k) {
    const double t_coh = channel::coherence_time(geometry.speed_mps[k], channel.carrier_freq_hz,
                                                 channel.coherence_time_cap_s);
    if (slot_duration_s > t_coh) {
      fail("slot_duration_s", "slot of " + std::to_string(slot_duration_s * 1e3) +
                                " ms exceeds the coherence time of link " + std::to_string(k) + " (" +
                                std::to_string(t_coh * 1e3) +
                                " ms); block fading per slot would not hold");
    }
  }
}

EnvConfig EnvConfig::defaults() {
  EnvConfig c;
  c.geometry.tx_rx_distance_m = {300.0, 350.0, 400.0};
  c.geometry.cross_distance_m = {{0.0, 110.0, 140.0}, {120.0, 0.0, 100.0}, {150.0, 130.0, 0.0}};
  c.geometry.speed_mps = {2.0, 2.5, 3.0};
  for (double dbm : {5.0, 10.0, 15.0, 23.0}) c.power_levels_w.push_back(channel::dbm_to_watt(dbm));
  c.power_budget_w = channel::dbm_to_watt(23.0);
  c.diffusion_levels = {5, 10, 15, 20};
  return c;
}

std::uint64_t ActionSpace::joint_size() const {
  std::uint64_t total = 1;
  const auto per = static_cast<std::uint64_t>(per_link_size());
  for (std::size_t k = 0; k < num_links; ++k) {
    if (per != 0 && total > std::numeric_limits<std::uint64_t>::max() / per) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    total *= per;
  }
  return total;
}

int ActionSpace::encode(const LinkAction& a) const {
  if (a.subchannel < 0 || a.subchannel >= num_subchannels || a.power < 0 || a.power >= num_power_levels ||
      a.diffusion < 0 || a.diffusion >= num_diffusion_levels) {
    throw std::out_of_range("ActionSpace::encode: index outside level set");
  }
  return (a.subchannel * num_power_levels + a.power) * num_diffusion_levels + a.diffusion;
}

LinkAction ActionSpace::decode(int flat_id) const {
  if (!valid(flat_id)) {
    throw std::out_of_range("invalid action id " + std::to_string(flat_id) + " (per-link space has " +
                            std::to_string(per_link_size()) + " actions)");
  }
  LinkAction a;
  a.diffusion = flat_id % num_diffusion_levels;
  flat_id /= num_diffusion_levels;
  a.power = flat_id % num_power_levels;
  a.subchannel = flat_id / num_power_levels;
  return a;
}

ActionSpace action_space(const EnvConfig& config) {
  ActionSpace s;
  s.num_subchannels = config.channel.num_subchannels;
  s.num_power_levels = static_cast<int>(config.power_levels_w.size());
  s.num_diffusion_levels = static_cast<int>(config.diffusion_levels.size());
  s.num_links = config.num_links();
  return s;
}

Environment::Environment(EnvConfig config) : config_(std::move(config)) {
  config_.validate();
  space_ = action_space(config_);
  for (std::size_t k = 0; k < config_.num_links(); ++k) {
    coherence_.push_back(channel::coherence_time(config_.geometry.speed_mps[k],
                                                 config_.channel.carrier_freq_hz,
                                                 config_.channel.coherence_time_cap_s));
  }
  tracker_ = qoe::OutageTracker(config_.num_links(), config_.qoe.outage_window);
}

std::vector<Observation> Environment::reset(std::uint64_t episode_seed) {
  const auto n = config_.num_links();
  const auto nc = config_.num_subchannels();
  rng_ = make_rng(config_.seed, {stream::kFading, episode_seed});
  shadowing_ = channel::draw_shadowing(config_.geometry, config_.channel, rng_);
  current_ = channel::draw_realization(config_.geometry, config_.channel, shadowing_, 0, rng_,
                                       config_.unit_fading);
  if (config_.frozen_channel) {
    previous_ = current_;
  } else {
    // Before the first slot only large-scale knowledge is available.
    previous_ = channel::draw_realization(config_.geometry, config_.channel, shadowing_, 0, rng_, true);
  }
  tracker_.reset();
  prev_interference_.assign(n * nc, 0.0);
  prev_rate_.assign(n, 0.0);
  prev_action_.assign(n, -1);
  slot_ = 0;
  done_ = false;
  return observations();
}

std::size_t Environment::observation_dim() const {
  return 2 * config_.num_subchannels() + 2 + static_cast<std::size_t>(space_.per_link_size());
}

std::vector<Observation> Environment::observations() const {
  const auto n = config_.num_links();
  const auto nc = config_.num_subchannels();
  const double offset = config_.gain_db_offset();
  const double scale = config_.obs_db_scale;
  const double noise = config_.channel.noise_power_w;
  std::vector<Observation> out(n, Observation(observation_dim(), 0.0));
  for (std::size_t k = 0; k < n; ++k) {
    auto& o = out[k];
    std::size_t i = 0;
    for (std::size_t c = 0; c < nc; ++c) o[i++] = (10.0 * std::log10(current_.gain(k, k, c)) - offset) / scale;
    for (std::size_t c = 0; c < nc; ++c) {
      o[i++] = 10.0 * std::log10(1.0 + prev_interference_[k * nc + c] / noise) / scale;
    }
    o[i++] = prev_rate_[k] / config_.qoe.rate_ref_bps;
    o[i++] = payload_bits() / config_.obs_payload_ref_bits;
    if (prev_action_[k] >= 0) o[i + static_cast<std::size_t>(prev_action_[k])] = 1.0;
  }
  return out;
}

StepInfo Environment::evaluate(std::span<const int> actions, qoe::OutageTracker& tracker) const {
  const auto n = config_.num_links();
  if (actions.size() != n) {
    throw std::out_of_range("step: expected " + std::to_string(n) + " actions, got " +
                            std::to_string(actions.size()));
  }
  std::vector<double> powers(n);
  std::vector<int> assignment(n);
  std::vector<LinkAction> decoded(n);
  for (std::size_t k = 0; k < n; ++k) {
    decoded[k] = space_.decode(actions[k]);
    powers[k] = config_.power_levels_w[static_cast<std::size_t>(decoded[k].power)];
    assignment[k] = decoded[k].subchannel;
  }

  StepInfo info;
  info.rate_bps.resize(n);
  info.sinr.resize(n);
  info.success.resize(n);
  info.outage.resize(n);
  info.qoe.resize(n);
  info.delivered_bits.resize(n);
  const double payload = payload_bits();
  for (std::size_t k = 0; k < n; ++k) {
    const auto c = static_cast<std::size_t>(assignment[k]);
    info.sinr[k] = channel::sinr(k, c, powers, assignment, current_, config_.channel);
    info.rate_bps[k] = channel::rate_bps(info.sinr[k], config_.channel.subchannel_bandwidth_hz);
    const auto profile = content::build_profile(
        config_.diffusion_levels[static_cast<std::size_t>(decoded[k].diffusion)], config_.content,
        config_.diffusion_levels);
    const bool ok = qoe::success_indicator(info.rate_bps[k], payload, profile.generation_time_s,
                                           config_.qoe.deadline_s, coherence_[k]);
    info.success[k] = ok;
    info.outage[k] = tracker.update(k, ok);
    info.qoe[k] = qoe::link_qoe(info.rate_bps[k], profile.similarity, ok, config_.qoe);
    info.delivered_bits[k] = ok ? payload : 0.0;
  }
  info.system_qoe = qoe::system_qoe(info.qoe);
  for (double o : info.outage) info.constraint_excess += std::max(0.0, o - config_.qoe.outage_cap);
  info.penalty = config_.penalty_weight * info.constraint_excess;
  info.reward = info.system_qoe - info.penalty;
  return info;
}

StepInfo Environment::preview(std::span<const int> actions) const {
  auto tracker = tracker_;
  return evaluate(actions, tracker);
}

StepResult Environment::step(std::span<const int> actions) {
  if (done_) throw std::logic_error("step: episode has finished; call reset()");
  StepResult result;
  result.info = evaluate(actions, tracker_);
  result.reward = result.info.reward;

  const auto n = config_.num_links();
  const auto nc = config_.num_subchannels();
  std::fill(prev_interference_.begin(), prev_interference_.end(), 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const auto a = space_.decode(actions[j]);
    const double p = config_.power_levels_w[static_cast<std::size_t>(a.power)];
    const auto c = static_cast<std::size_t>(a.subchannel);
    for (std::size_t k = 0; k < n; ++k) {
      if (k != j) prev_interference_[k * nc + c] += p * current_.gain(j, k, c);
    }
    prev_action_[j] = actions[j];
    prev_rate_[j] = result.info.rate_bps[j];
  }

  ++slot_;
  done_ = slot_ >= config_.episode_length;
  draw_next();
  result.done = done_;
  result.observations = observations();
  return result;
}

void Environment::draw_next() {
  if (config_.frozen_channel) return;
  previous_ = std::move(current_);
  current_ = channel::draw_realization(config_.geometry, config_.channel, shadowing_,
                                       static_cast<std::size_t>(slot_), rng_, config_.unit_fading);
}

}  // namespace genv2v::env
