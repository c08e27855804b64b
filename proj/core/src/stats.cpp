#include "genv2v/stats.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace genv2v::stats {

double mean(std::span<const double> xs) {
  if (xs.empty()) return 0.0;
  return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

double median(std::span<const double> xs) {
  if (xs.empty()) throw std::domain_error("median: empty input");
  std::vector<double> v(xs.begin(), xs.end());
  std::sort(v.begin(), v.end());
  const auto n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

namespace {

std::vector<double> ranks(std::span<const double> xs) {
  std::vector<std::size_t> order(xs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](auto a, auto b) { return xs[a] < xs[b]; });
  std::vector<double> r(xs.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]]) ++j;
    const double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t) r[order[t]] = avg;
    i = j + 1;
  }
  return r;
}

double pearson(std::span<const double> xs, std::span<const double> ys) {
  const double mx = mean(xs);
  const double my = mean(ys);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0 || syy == 0) return 0.0;
  return sxy / std::sqrt(sxx * syy);
}

}  // namespace

double spearman(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw std::domain_error("spearman: need two equal-length series");
  const auto rx = ranks(xs);
  const auto ry = ranks(ys);
  return pearson(rx, ry);
}

double chi_square_uniform_pvalue(std::span<const std::int64_t> counts) {
  if (counts.size() < 2) throw std::domain_error("chi_square_uniform_pvalue: need at least two cells");
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::int64_t{0}));
  const double expected = total / static_cast<double>(counts.size());
  double stat = 0.0;
  for (auto c : counts) stat += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
  boost::math::chi_squared_distribution<double> dist(static_cast<double>(counts.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, stat));
}

double slope_pvalue(std::span<const double> ys) {
  const auto n = ys.size();
  if (n < 3) throw std::domain_error("slope_pvalue: need at least three points");
  const double mx = static_cast<double>(n - 1) / 2.0;
  const double my = mean(ys);
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (static_cast<double>(i) - mx) * (ys[i] - my);
    sxx += (static_cast<double>(i) - mx) * (static_cast<double>(i) - mx);
  }
  const double slope = sxy / sxx;
  double sse = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double fit = my + slope * (static_cast<double>(i) - mx);
    sse += (ys[i] - fit) * (ys[i] - fit);
  }
  const double se = std::sqrt(sse / static_cast<double>(n - 2) / sxx);
  if (se == 0) return slope == 0 ? 1.0 : 0.0;
  boost::math::students_t_distribution<double> dist(static_cast<double>(n - 2));
  return 2.0 * boost::math::cdf(boost::math::complement(dist, std::abs(slope / se)));
}

double t_test_greater_pvalue(std::span<const double> xs) {
  if (xs.size() < 2) throw std::domain_error("t_test_greater_pvalue: need at least two values");
  const double m = mean(xs);
  const double se = stddev(xs) / std::sqrt(static_cast<double>(xs.size()));
  if (se == 0) return m > 0 ? 0.0 : 1.0;
  boost::math::students_t_distribution<double> dist(static_cast<double>(xs.size() - 1));
  return boost::math::cdf(boost::math::complement(dist, m / se));
}

double kolmogorov_distance_exponential(std::vector<double> samples) {
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const double cdf = -std::expm1(-samples[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - cdf, cdf - static_cast<double>(i) / n});
  }
  return d;
}

}  // namespace genv2v::stats
