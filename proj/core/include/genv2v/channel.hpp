#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "genv2v/rng.hpp"

namespace genv2v::channel {

inline constexpr double kSpeedOfLight = 2.998e8;  // m/s

/// Large-scale and noise parameters shared by every sub-channel.
struct ChannelParams {
  double carrier_freq_hz = 5.9e9;
  double subchannel_bandwidth_hz = 1.0e6;
  int num_subchannels = 4;
  double noise_power_w = 3.98e-15;  // -114 dBm per 1 MHz
  double pathloss_ref_db = 63.3;
  double pathloss_ref_dist_m = 10.0;
  double pathloss_exponent = 2.7;
  double shadowing_sigma_db = 4.0;
  double coherence_time_cap_s = 1.0;  // returned at zero speed

  /// Throws std::invalid_argument naming the offending field.
  void validate() const;
};

/// Distances are indexed by link: transmitter of link j to receiver of link k.
struct LinkGeometry {
  std::vector<double> tx_rx_distance_m;
  std::vector<std::vector<double>> cross_distance_m;  // [j][k], diagonal unused
  std::vector<double> speed_mps;

  std::size_t num_links() const { return tx_rx_distance_m.size(); }
  double distance(std::size_t tx, std::size_t rx) const {
    return tx == rx ? tx_rx_distance_m[tx] : cross_distance_m[tx][rx];
  }
  void validate() const;
};

/// Per-slot linear power gains, flattened as [tx][rx][subchannel].
class ChannelRealization {
 public:
  ChannelRealization() = default;
  ChannelRealization(std::size_t num_links, std::size_t num_subchannels);

  double gain(std::size_t tx, std::size_t rx, std::size_t c) const {
    return gain_[(tx * links_ + rx) * subchannels_ + c];
  }
  double& gain(std::size_t tx, std::size_t rx, std::size_t c) {
    return gain_[(tx * links_ + rx) * subchannels_ + c];
  }
  double shadowing_db(std::size_t tx, std::size_t rx) const { return shadowing_db_[tx * links_ + rx]; }

  std::size_t num_links() const { return links_; }
  std::size_t num_subchannels() const { return subchannels_; }
  std::size_t slot_index() const { return slot_; }

  const std::vector<double>& raw_gains() const { return gain_; }
  bool operator==(const ChannelRealization&) const = default;

 private:
  friend ChannelRealization draw_realization(const LinkGeometry&, const ChannelParams&,
                                             std::span<const double>, std::size_t, Rng&, bool);
  std::size_t links_ = 0;
  std::size_t subchannels_ = 0;
  std::size_t slot_ = 0;
  std::vector<double> gain_;
  std::vector<double> shadowing_db_;
};

/// Log-distance path loss in dB. Throws std::domain_error for d <= 0.
double path_loss_db(double distance_m, const ChannelParams& params);

/// Clarke-model coherence time 9 / (16 pi f_d). Zero speed returns `cap_s`.
double coherence_time(double speed_mps, double carrier_freq_hz, double cap_s = 1.0);

/// One shadowing value in dB per (tx, rx) pair, flattened [tx][rx].
std::vector<double> draw_shadowing(const LinkGeometry& geom, const ChannelParams& params, Rng& rng);

/// Combines path loss, the given shadowing, and fresh Rayleigh power fading.
/// With `unit_fading` set the fading term is 1 and `rng` is not touched.
ChannelRealization draw_realization(const LinkGeometry& geom, const ChannelParams& params,
                                    std::span<const double> shadowing_db, std::size_t slot,
                                    Rng& rng, bool unit_fading = false);

/// Draws shadowing and fading together (one-shot convenience).
ChannelRealization draw_realization(const LinkGeometry& geom, const ChannelParams& params, Rng& rng);

/// Average power gain 10^(-(PL + X)/10) without small-scale fading.
double mean_gain(double distance_m, double shadowing_db, const ChannelParams& params);

/// SINR of link `k` on sub-channel `c`. Links whose assignment differs from
/// `c` do not interfere. Throws std::logic_error if `k` is not assigned to `c`.
double sinr(std::size_t k, std::size_t c, std::span<const double> powers_w,
            std::span<const int> assignment, const ChannelRealization& real,
            const ChannelParams& params);

/// Shannon rate. Throws std::domain_error for negative SINR.
double rate_bps(double sinr, double bandwidth_hz);

/// Closed-form outage of a single interference-free Rayleigh link that must
/// carry `payload_bits` within `window_s`.
double analytic_outage(double power_w, double mean_gain, const ChannelParams& params,
                       double payload_bits, double window_s);

inline double dbm_to_watt(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double watt_to_dbm(double w) { return 10.0 * std::log10(w / 1e-3); }

}  // namespace genv2v::channel
