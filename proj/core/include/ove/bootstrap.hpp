#pragma once

#include <cstdint>

#include "ove/bounds.hpp"
#include "ove/rng.hpp"
#include "ove/types.hpp"

namespace ove {

struct BootstrapConfig {
  int b = 1000;          // resample count, at least 100
  double delta = 0.05;   // two-sided miss probability
  std::uint64_t seed = 0;
};

enum class BootstrapEstimator { double_sampled, variance_reduced };

struct BootstrapResult {
  Interval interval;
  double point = 0.0;      // full-data estimate the pivots are centered on
  bool degenerate = false; // every resample produced the same pivot
};

/// Sample n trajectories with replacement from an n-trajectory dataset.
Dataset resample(const Dataset& data, SeededRng& rng);

/// Percentile-pivot interval for the return variance: resample trajectories,
/// re-estimate, and invert the empirical distribution of (resampled - point).
/// Resample i draws from the independent stream SeededRng(cfg.seed, i), so
/// the result does not depend on evaluation order. No coverage guarantee.
BootstrapResult bootstrap_interval(const Dataset& data, const TabularPolicy& pi,
                                   const BootstrapConfig& cfg, BootstrapEstimator estimator);

}  // namespace ove
