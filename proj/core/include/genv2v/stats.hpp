#pragma once

#include <cstdint>
#include <span>
#include <vector>

// Small statistics helpers shared by the harness, acceptance checks and tests.
namespace genv2v::stats {

double mean(std::span<const double> xs);
/// Sample standard deviation (n - 1); 0 for fewer than two values.
double stddev(std::span<const double> xs);
double median(std::span<const double> xs);

/// Spearman rank correlation with average ranks for ties.
double spearman(std::span<const double> xs, std::span<const double> ys);

/// Upper-tail p-value of Pearson's chi-square test against equal cell
/// probabilities.
double chi_square_uniform_pvalue(std::span<const std::int64_t> counts);

/// Two-sided p-value of the OLS slope of `ys` against 0, 1, 2, ...
double slope_pvalue(std::span<const double> ys);

/// One-sided p-value of a one-sample t-test for mean(xs) > 0.
double t_test_greater_pvalue(std::span<const double> xs);

/// Kolmogorov distance between the empirical CDF of `samples` and
/// Exponential(1). Sorts a copy.
double kolmogorov_distance_exponential(std::vector<double> samples);

}  // namespace genv2v::stats
