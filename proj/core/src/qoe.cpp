#include "genv2v/qoe.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace genv2v::qoe {

void QoeParams::validate() const {
  auto fail = [](const char* field, const char* what) {
    throw std::invalid_argument(std::string("qoe.") + field + ": " + what);
  };
  if (rate_weight < 0 || similarity_weight < 0) fail("rate_weight", "weights must be non-negative");
  if (rate_weight == 0 && similarity_weight == 0) fail("rate_weight", "weights must not both be zero");
  if (!(rate_ref_bps > 0)) fail("rate_ref_bps", "must be positive");
  if (!(similarity_ref > 0)) fail("similarity_ref", "must be positive");
  if (!(deadline_s > 0)) fail("deadline_s", "must be positive");
  if (!(outage_cap > 0 && outage_cap < 1)) fail("outage_cap", "must lie in (0, 1)");
  if (outage_window < 1) fail("outage_window", "must be at least 1");
}

bool success_indicator(double rate_bps, double payload_bits, double gen_time_s, double deadline_s,
                       double coherence_time_s) {
  if (!(gen_time_s < deadline_s)) return false;
  const double window = std::min(deadline_s - gen_time_s, coherence_time_s);
  return rate_bps * window >= payload_bits;
}

double link_qoe(double rate_bps, double similarity, bool success, const QoeParams& params) {
  if (!success) return 0.0;
  return params.rate_weight * std::log1p(rate_bps / params.rate_ref_bps) +
         params.similarity_weight * std::log1p(similarity / params.similarity_ref);
}

double system_qoe(std::span<const double> link_qoes) {
  if (link_qoes.empty()) throw std::domain_error("system_qoe: no links");
  return std::accumulate(link_qoes.begin(), link_qoes.end(), 0.0);
}

OutageTracker::OutageTracker(std::size_t num_links, int window)
    : window_(window),
      history_(num_links, std::vector<char>(static_cast<std::size_t>(std::max(window, 1)), 0)),
      head_(num_links, 0),
      count_(num_links, 0),
      failures_(num_links, 0) {
  if (window < 1) throw std::invalid_argument("OutageTracker: window must be at least 1");
}

void OutageTracker::check(std::size_t link) const {
  if (link >= failures_.size()) {
    throw std::domain_error("OutageTracker: link index " + std::to_string(link) + " out of range");
  }
}

double OutageTracker::update(std::size_t link, bool success) {
  check(link);
  auto& ring = history_[link];
  auto& head = head_[link];
  if (count_[link] == window_) {
    failures_[link] -= ring[static_cast<std::size_t>(head)];
  } else {
    ++count_[link];
  }
  ring[static_cast<std::size_t>(head)] = success ? 0 : 1;
  failures_[link] += success ? 0 : 1;
  head = (head + 1) % window_;
  return outage(link);
}

double OutageTracker::outage(std::size_t link) const {
  check(link);
  return static_cast<double>(failures_[link]) / window_;
}

int OutageTracker::failures(std::size_t link) const {
  check(link);
  return failures_[link];
}

int OutageTracker::recorded(std::size_t link) const {
  check(link);
  return count_[link];
}

void OutageTracker::reset() {
  for (auto& ring : history_) std::fill(ring.begin(), ring.end(), 0);
  std::fill(head_.begin(), head_.end(), 0);
  std::fill(count_.begin(), count_.end(), 0);
  std::fill(failures_.begin(), failures_.end(), 0);
}

}  // namespace genv2v::qoe
