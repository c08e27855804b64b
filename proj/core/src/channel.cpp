#include "genv2v/channel.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace genv2v::channel {

namespace {

void require(bool ok, const char* field, const char* what) {
  if (!ok) throw std::invalid_argument(std::string("channel.") + field + ": " + what);
}

}  // namespace

void ChannelParams::validate() const {
  require(carrier_freq_hz > 0, "carrier_freq_hz", "must be positive");
  require(subchannel_bandwidth_hz > 0, "subchannel_bandwidth_hz", "must be positive");
  require(num_subchannels >= 1, "num_subchannels", "must be at least 1");
  require(noise_power_w > 0, "noise_power_w", "must be positive");
  require(pathloss_ref_db > 0, "pathloss_ref_db", "must be positive");
  require(pathloss_ref_dist_m > 0, "pathloss_ref_dist_m", "must be positive");
  require(pathloss_exponent >= 1.6 && pathloss_exponent <= 6.0, "pathloss_exponent",
          "must lie in [1.6, 6.0]");
  require(shadowing_sigma_db >= 0, "shadowing_sigma_db", "must be non-negative");
  require(coherence_time_cap_s > 0, "coherence_time_cap_s", "must be positive");
}

void LinkGeometry::validate() const {
  auto require = [](bool ok, const char* field, const char* what) {
    if (!ok) throw std::invalid_argument(std::string("geometry.") + field + ": " + what);
  };
  const auto n = num_links();
  require(n >= 1, "tx_rx_distance_m", "needs at least one link");
  require(speed_mps.size() == n, "speed_mps", "needs one entry per link");
  require(cross_distance_m.size() == n, "cross_distance_m", "needs one row per link");
  for (std::size_t j = 0; j < n; ++j) {
    require(tx_rx_distance_m[j] > 0, "tx_rx_distance_m", "distances must be positive");
    require(speed_mps[j] >= 0, "speed_mps", "speeds must be non-negative");
    require(cross_distance_m[j].size() == n, "cross_distance_m", "must be a square matrix");
    for (std::size_t k = 0; k < n; ++k) {
      if (j != k) require(cross_distance_m[j][k] > 0, "cross_distance_m", "distances must be positive");
    }
  }
}

ChannelRealization::ChannelRealization(std::size_t num_links, std::size_t num_subchannels)
    : links_(num_links),
      subchannels_(num_subchannels),
      gain_(num_links * num_links * num_subchannels, 0.0),
      shadowing_db_(num_links * num_links, 0.0) {}

double path_loss_db(double distance_m, const ChannelParams& params) {
  if (!(distance_m > 0)) throw std::domain_error("path_loss_db: distance must be positive");
  return params.pathloss_ref_db +
         10.0 * params.pathloss_exponent * std::log10(distance_m / params.pathloss_ref_dist_m);
}

double coherence_time(double speed_mps, double carrier_freq_hz, double cap_s) {
  if (!(carrier_freq_hz > 0)) throw std::domain_error("coherence_time: carrier must be positive");
  if (speed_mps < 0) throw std::domain_error("coherence_time: speed must be non-negative");
  if (speed_mps == 0) return cap_s;
  const double doppler_hz = speed_mps * carrier_freq_hz / kSpeedOfLight;
  return 9.0 / (16.0 * std::numbers::pi * doppler_hz);
}

double mean_gain(double distance_m, double shadowing_db, const ChannelParams& params) {
  return std::pow(10.0, -(path_loss_db(distance_m, params) + shadowing_db) / 10.0);
}

std::vector<double> draw_shadowing(const LinkGeometry& geom, const ChannelParams& params, Rng& rng) {
  const auto n = geom.num_links();
  std::vector<double> out(n * n, 0.0);
  if (params.shadowing_sigma_db == 0) return out;
  std::normal_distribution<double> normal(0.0, params.shadowing_sigma_db);
  for (auto& x : out) x = normal(rng);
  return out;
}

ChannelRealization draw_realization(const LinkGeometry& geom, const ChannelParams& params,
                                    std::span<const double> shadowing_db, std::size_t slot,
                                    Rng& rng, bool unit_fading) {
  const auto n = geom.num_links();
  const auto nc = static_cast<std::size_t>(params.num_subchannels);
  if (shadowing_db.size() != n * n) throw std::invalid_argument("draw_realization: shadowing size mismatch");
  ChannelRealization real(n, nc);
  real.slot_ = slot;
  real.shadowing_db_.assign(shadowing_db.begin(), shadowing_db.end());
  std::exponential_distribution<double> fading(1.0);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      const double large_scale = mean_gain(geom.distance(j, k), shadowing_db[j * n + k], params);
      for (std::size_t c = 0; c < nc; ++c) {
        const double h = unit_fading ? 1.0 : fading(rng);
        real.gain(j, k, c) = large_scale * h;
      }
    }
  }
  return real;
}

ChannelRealization draw_realization(const LinkGeometry& geom, const ChannelParams& params, Rng& rng) {
  const auto shadow = draw_shadowing(geom, params, rng);
  return draw_realization(geom, params, shadow, 0, rng);
}

double sinr(std::size_t k, std::size_t c, std::span<const double> powers_w,
            std::span<const int> assignment, const ChannelRealization& real,
            const ChannelParams& params) {
  if (k >= assignment.size() || assignment[k] != static_cast<int>(c)) {
    throw std::logic_error("sinr: link is not assigned to the requested sub-channel");
  }
  double interference = 0.0;
  for (std::size_t j = 0; j < assignment.size(); ++j) {
    if (j != k && assignment[j] == static_cast<int>(c)) interference += powers_w[j] * real.gain(j, k, c);
  }
  return powers_w[k] * real.gain(k, k, c) / (params.noise_power_w + interference);
}

double rate_bps(double sinr, double bandwidth_hz) {
  if (sinr < 0) throw std::domain_error("rate_bps: negative SINR");
  return bandwidth_hz * std::log2(1.0 + sinr);
}

double analytic_outage(double power_w, double mean_gain, const ChannelParams& params,
                       double payload_bits, double window_s) {
  if (!(window_s > 0)) throw std::domain_error("analytic_outage: window must be positive");
  if (payload_bits < 0) throw std::domain_error("analytic_outage: payload must be non-negative");
  if (power_w <= 0 || mean_gain <= 0) return 1.0;
  const double threshold = std::exp2(payload_bits / (params.subchannel_bandwidth_hz * window_s)) - 1.0;
  return -std::expm1(-threshold * params.noise_power_w / (power_w * mean_gain));
}

}  // namespace genv2v::channel
