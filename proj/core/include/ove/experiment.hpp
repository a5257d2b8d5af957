#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "ove/envs.hpp"

namespace ove {

// naive_is, naive_plugin, double_sampled, variance_reduced.
const std::vector<std::string>& point_methods();
// The point estimators plus hcove_ci and bootstrap.
const std::vector<std::string>& all_methods();

struct ExperimentConfig {
  std::string environment = "gridworld";
  std::string policy = "smoothed";
  double alpha = 0.5;  // behavior mix toward the evaluation policy
  std::vector<std::size_t> n_grid = {50, 200, 1000, 2000, 10000};
  int trials = 100;
  double delta = 0.05;
  std::vector<std::string> methods = all_methods();
  int bootstrap_b = 1000;
  std::uint64_t seed = 0;
  bool clip = true;  // intersect intervals with [0, Popoviciu]
  int threads = 1;   // evaluation parallelism; never affects the output bytes

  void validate() const;
};

// One (trial, method, n) result. Point estimators leave the interval columns
// nan; interval methods leave the point columns nan except bootstrap, which
// reports its centering estimate. A skipped cell records the reason.
struct CoverageCell {
  int trial = 0;
  std::string method;
  std::size_t n = 0;
  double point_raw = std::numeric_limits<double>::quiet_NaN();
  double point_clipped = std::numeric_limits<double>::quiet_NaN();
  double lower = std::numeric_limits<double>::quiet_NaN();
  double upper = std::numeric_limits<double>::quiet_NaN();
  bool failed = false;  // interval methods: true variance outside [lower, upper]
  bool skipped = false;
  std::string note;
};

struct CoverageSummary {
  std::string method;
  std::size_t n = 0;
  int cells = 0;
  int skipped = 0;
  int failures = 0;
  double mean_point = std::numeric_limits<double>::quiet_NaN();
  double mean_lower = std::numeric_limits<double>::quiet_NaN();
  double mean_upper = std::numeric_limits<double>::quiet_NaN();
};

struct CoverageReport {
  ExperimentConfig config;
  Moments oracle;
  std::vector<CoverageCell> cells;      // sorted by (trial, method, n)
  std::vector<CoverageSummary> summary; // sorted by (method, n)
};

/// Coverage experiment: for every (trial, n) draw one dataset under
/// beta = mix(policy, alpha) and run every configured method on it, scoring
/// interval methods against the exact oracle variance. Every random draw has
/// a (trial, n, purpose)-keyed stream, so results are byte-stable across
/// thread counts and method subsets. Per-cell ove errors become skipped
/// cells; anything else propagates.
CoverageReport run_coverage(const ExperimentConfig& cfg);

std::string coverage_csv(const CoverageReport& report);
std::string coverage_json(const CoverageReport& report);

struct ComparisonRow {
  std::string method;
  std::size_t n = 0;
  std::size_t datasets = 0;
  double mean = std::numeric_limits<double>::quiet_NaN();
  double stddev = std::numeric_limits<double>::quiet_NaN();
};

struct ComparisonTable {
  ExperimentConfig config;
  Moments oracle;
  bool exhaustive = false;
  std::vector<ComparisonRow> rows;  // sorted by (method, n)
};

/// Mean and spread of the point estimators over cfg.trials datasets per n,
/// sharing the coverage experiment's dataset streams. With exhaustive = true
/// the sampling is replaced by exact enumeration over all size-n datasets
/// (tiny models only) and the spread is the exact standard deviation of the
/// estimator under the behavior policy.
ComparisonTable run_estimator_comparison(const ExperimentConfig& cfg, bool exhaustive = false);

std::string comparison_csv(const ComparisonTable& table);
std::string comparison_json(const ComparisonTable& table);

// One dataset outcome in the exhaustive enumeration: which trajectory (by
// enumeration index) landed in each slot, the probability of that outcome
// under the behavior policy, and the estimate it produces.
struct ExhaustiveCell {
  std::vector<std::size_t> outcome;
  double probability = 0.0;
  double value = 0.0;
};

/// Every size-n dataset outcome for a point estimator, enumerated in
/// odometer order over the trajectory space under beta. Throws
/// IntractableModel when the outcome count exceeds limit.
std::vector<ExhaustiveCell> exhaustive_estimates(const TabularMdp& mdp, const TabularPolicy& beta,
                                                 const TabularPolicy& pi, std::size_t n,
                                                 const std::string& method,
                                                 std::size_t limit = 4'000'000);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace ove
