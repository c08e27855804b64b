#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "genv2v/channel.hpp"
#include "genv2v/stats.hpp"

using namespace genv2v;
using namespace genv2v::channel;

namespace {

LinkGeometry single_link(double d, double speed = 0.0) {
  LinkGeometry g;
  g.tx_rx_distance_m = {d};
  g.cross_distance_m = {{0.0}};
  g.speed_mps = {speed};
  return g;
}

ChannelParams one_subchannel() {
  ChannelParams p;
  p.num_subchannels = 1;
  p.shadowing_sigma_db = 0.0;
  return p;
}

}  // namespace

TEST_CASE("path loss at reference, decade and half-decade distances") {
  ChannelParams p;
  CHECK(path_loss_db(10.0, p) == doctest::Approx(63.3).epsilon(1e-12));
  CHECK(path_loss_db(100.0, p) == doctest::Approx(90.3).epsilon(1e-12));
  // 27 * log10(3.1623) = 13.50005
  CHECK(path_loss_db(31.623, p) == doctest::Approx(76.8).epsilon(1e-5));
  CHECK_THROWS_AS(path_loss_db(0.0, p), std::domain_error);
  CHECK_THROWS_AS(path_loss_db(-3.0, p), std::domain_error);
}

TEST_CASE("path loss strictly increasing in distance") {
  ChannelParams p;
  double prev = path_loss_db(1.0, p);
  for (double d = 1.5; d < 2000; d *= 1.5) {
    const double cur = path_loss_db(d, p);
    CHECK(cur > prev);
    prev = cur;
  }
}

TEST_CASE("coherence time") {
  // f_d = 2 * 5.9e9 / 2.998e8 = 39.36 Hz; 9 / (16 pi 39.36) = 4.549 ms
  const double t = coherence_time(2.0, 5.9e9);
  CHECK(t == doctest::Approx(4.549e-3).epsilon(1e-3));
  CHECK(coherence_time(4.0, 5.9e9) == doctest::Approx(t / 2).epsilon(1e-12));
  CHECK(coherence_time(0.0, 5.9e9) == 1.0);
  CHECK(coherence_time(0.0, 5.9e9, 0.25) == 0.25);
  double prev = coherence_time(0.1, 5.9e9);
  for (double v = 0.2; v < 60; v += 0.7) {
    CHECK(coherence_time(v, 5.9e9) < prev);
    prev = coherence_time(v, 5.9e9);
  }
}

TEST_CASE("degenerate draw returns the path-loss gain exactly") {
  const auto g = single_link(120.0);
  const auto p = one_subchannel();
  Rng rng(3);
  const std::vector<double> shadow = {0.0};
  const auto real = draw_realization(g, p, shadow, 0, rng, true);
  CHECK(real.gain(0, 0, 0) == std::pow(10.0, -path_loss_db(120.0, p) / 10.0));
}

TEST_CASE("fading power is unit-mean exponential") {
  const auto g = single_link(10.0);
  const auto p = one_subchannel();
  const double base = mean_gain(10.0, 0.0, p);
  Rng rng(99);
  const std::vector<double> shadow = {0.0};
  std::vector<double> h;
  h.reserve(1'000'000);
  for (int i = 0; i < 1'000'000; ++i) h.push_back(draw_realization(g, p, shadow, 0, rng).gain(0, 0, 0) / base);
  const double m = stats::mean(h);
  CHECK(m >= 0.995);
  CHECK(m <= 1.005);
  CHECK(stats::kolmogorov_distance_exponential(h) < 0.002);
}

TEST_CASE("equal seeds give bitwise-equal realization sequences") {
  LinkGeometry g;
  g.tx_rx_distance_m = {100, 200};
  g.cross_distance_m = {{0, 150}, {170, 0}};
  g.speed_mps = {1, 2};
  ChannelParams p;
  Rng a(5), b(5);
  for (int i = 0; i < 20; ++i) CHECK(draw_realization(g, p, a) == draw_realization(g, p, b));
}

TEST_CASE("sinr constructed cases") {
  ChannelParams p;
  p.num_subchannels = 2;
  const double n = p.noise_power_w;

  ChannelRealization one(1, 1);
  one.gain(0, 0, 0) = 1.0;
  const std::vector<double> pw1 = {n};
  const std::vector<int> as1 = {0};
  CHECK(sinr(0, 0, pw1, as1, one, p) == doctest::Approx(1.0));

  ChannelRealization two(2, 2);
  for (std::size_t c = 0; c < 2; ++c) {
    two.gain(0, 0, c) = 2.0;
    two.gain(1, 0, c) = 1.0;
    two.gain(1, 1, c) = 1.0;
    two.gain(0, 1, c) = 1.0;
  }
  const std::vector<double> pw = {n, n};
  const std::vector<int> same = {0, 0};
  const std::vector<int> apart = {0, 1};
  CHECK(sinr(0, 0, pw, same, two, p) == doctest::Approx(1.0));
  CHECK(sinr(0, 0, pw, apart, two, p) == doctest::Approx(2.0));
  CHECK_THROWS_AS(sinr(0, 1, pw, same, two, p), std::logic_error);
}

TEST_CASE("sinr non-increasing in co-channel interferer power") {
  ChannelParams p;
  p.num_subchannels = 1;
  ChannelRealization r(2, 1);
  r.gain(0, 0, 0) = 1e-9;
  r.gain(1, 0, 0) = 3e-10;
  r.gain(1, 1, 0) = 1e-9;
  r.gain(0, 1, 0) = 2e-10;
  const std::vector<int> as = {0, 0};
  double prev = INFINITY;
  for (double q = 0.0; q < 0.3; q += 0.01) {
    const std::vector<double> pw = {0.1, q};
    const double s = sinr(0, 0, pw, as, r, p);
    CHECK(s <= prev);
    prev = s;
  }
}

TEST_CASE("shannon rate") {
  CHECK(rate_bps(1.0, 1e6) == doctest::Approx(1e6));
  CHECK(rate_bps(0.0, 1e6) == 0.0);
  CHECK(rate_bps(3.0, 1e6) == doctest::Approx(2e6));
  CHECK_THROWS_AS(rate_bps(-0.5, 1e6), std::domain_error);
  double prev = rate_bps(0.0, 1e6);
  for (double s = 1e-3; s < 1e4; s *= 1.7) {
    CHECK(rate_bps(s, 1e6) > prev);
    prev = rate_bps(s, 1e6);
  }
}

TEST_CASE("analytic outage closed form and limits") {
  ChannelParams p;
  const double n = p.noise_power_w;
  // payload / (W T) = 1, p g / N = 10
  CHECK(analytic_outage(10 * n, 1.0, p, 1000.0, 1e-3) == doctest::Approx(0.0951626).epsilon(1e-6));
  CHECK(analytic_outage(10 * n, 1.0, p, 1e-9, 1e-3) < 1e-9);
  CHECK(analytic_outage(1e-30, 1.0, p, 1000.0, 1e-3) == doctest::Approx(1.0));
}

TEST_CASE("analytic outage matches Monte Carlo through the fading generator") {
  auto p = one_subchannel();
  const auto g = single_link(10.0);
  const double mg = mean_gain(10.0, 0.0, p);
  const double power = 10 * p.noise_power_w / mg;
  const double expected = 1.0 - std::exp(-0.1);
  Rng rng(1234);
  const std::vector<double> shadow = {0.0};
  int failures = 0;
  constexpr int kDraws = 1'000'000;
  for (int i = 0; i < kDraws; ++i) {
    const auto r = draw_realization(g, p, shadow, 0, rng);
    if (rate_bps(power * r.gain(0, 0, 0) / p.noise_power_w, 1e6) * 1e-3 < 1000.0) ++failures;
  }
  CHECK(std::abs(static_cast<double>(failures) / kDraws - expected) <= 1e-3);
  CHECK(analytic_outage(power, mg, p, 1000.0, 1e-3) == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("unit conversions") {
  CHECK(dbm_to_watt(30.0) == doctest::Approx(1.0));
  CHECK(dbm_to_watt(23.0) == doctest::Approx(0.19952623));
  CHECK(watt_to_dbm(1e-3) == doctest::Approx(0.0));
}

TEST_CASE("parameter and geometry validation") {
  ChannelParams p;
  CHECK_NOTHROW(p.validate());
  p.noise_power_w = 0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  auto g = single_link(50.0);
  CHECK_NOTHROW(g.validate());
  g.tx_rx_distance_m = {-1.0};
  CHECK_THROWS_AS(g.validate(), std::invalid_argument);
}
