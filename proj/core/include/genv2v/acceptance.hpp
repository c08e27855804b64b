#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "genv2v/config.hpp"
#include "genv2v/harness.hpp"

namespace genv2v::acceptance {

struct CheckResult {
  int criterion = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

/// "PASS [n] name: detail" or "FAIL [n] name: detail".
std::string format_line(const CheckResult& result);
bool all_passed(std::span<const CheckResult> results);

/// Training rows per agent kind, one inner vector per seed (seed order).
using TrainingSet = std::map<agents::PolicyKind, std::vector<std::vector<harness::MetricsRow>>>;

CheckResult check_reward_ordering(const TrainingSet& runs);
CheckResult check_qoe_trend(std::span<const harness::SweepRecord> records);
CheckResult check_successful_data(std::span<const harness::SweepRecord> records);
CheckResult check_outage_oracle(std::uint64_t seed = 20240601);
CheckResult check_gradients(std::uint64_t seed = 11);
CheckResult check_target_decoupling(int seeds = 10);
CheckResult check_oracle_equivalence(int snapshots = 25);
/// Trains twice (or once against `reference_csv` when non-empty) and compares
/// the metrics CSV bytes.
CheckResult check_determinism(const config::ExperimentConfig& cfg, agents::PolicyKind kind, std::uint64_t seed,
                              const std::string& reference_csv = {});

/// Every train_<agent>_seed<N>.csv under `dir`.
TrainingSet load_training_set(const std::filesystem::path& dir);

/// Criteria 1-3 from the files in `out_dir`, the property suites 4-7, and
/// criterion 8 by re-running one recorded training run from its metadata.
std::vector<CheckResult> summary_checks(const std::filesystem::path& out_dir);

/// Property suites 4-7 plus a short determinism run.
std::vector<CheckResult> selftest_checks();

/// Trains every configured agent kind on every seed, runs the payload sweep,
/// writes everything to `out_dir` and returns summary_checks(out_dir).
/// Progress lines go to `log` when non-null.
std::vector<CheckResult> full_run(const config::ExperimentConfig& cfg, const std::filesystem::path& out_dir,
                                  std::ostream* log = nullptr);

}  // namespace genv2v::acceptance
