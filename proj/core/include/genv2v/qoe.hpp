#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace genv2v::qoe {

/// Weights and references of the logarithmic (Weber-Fechner) utility, plus the
/// per-link delivery constraint.
struct QoeParams {
  double rate_weight = 1.0;
  double similarity_weight = 1.0;
  double rate_ref_bps = 1.0e6;
  double similarity_ref = 0.5;
  double deadline_s = 50e-3;
  double outage_cap = 0.1;
  int outage_window = 50;  // slots

  void validate() const;
};

/// A payload is delivered when generation finishes before the deadline and
/// the link carries it within min(deadline - generation time, coherence time).
bool success_indicator(double rate_bps, double payload_bits, double gen_time_s, double deadline_s,
                       double coherence_time_s);

/// Logarithmic utility of rate and similarity; zero when delivery failed.
double link_qoe(double rate_bps, double similarity, bool success, const QoeParams& params);

/// Sum over links. Throws std::domain_error on an empty list.
double system_qoe(std::span<const double> link_qoes);

/// Windowed per-link failure counter. Outage is failures / window, so an
/// unfilled window counts missing slots as successes.
class OutageTracker {
 public:
  OutageTracker() = default;
  OutageTracker(std::size_t num_links, int window);

  /// Records one slot for `link` and returns its updated outage.
  double update(std::size_t link, bool success);
  double outage(std::size_t link) const;
  int failures(std::size_t link) const;
  int recorded(std::size_t link) const;
  void reset();

  std::size_t num_links() const { return failures_.size(); }
  int window() const { return window_; }

 private:
  void check(std::size_t link) const;

  int window_ = 1;
  std::vector<std::vector<char>> history_;  // ring per link, 1 = failure
  std::vector<int> head_;
  std::vector<int> count_;
  std::vector<int> failures_;
};

}  // namespace genv2v::qoe
