#include "ove/bootstrap.hpp"

#include <algorithm>
#include <vector>

#include "ove/errors.hpp"
#include "ove/estimators.hpp"
#include "ove/numeric.hpp"

namespace ove {

Dataset resample(const Dataset& data, SeededRng& rng) {
  const std::size_t n = data.size();
  if (n < 1) throw InsufficientData("resample: empty dataset");
  Dataset out;
  out.spec = data.spec;
  out.trajectories.reserve(n);
  for (std::size_t k = 0; k < n; ++k)
    out.trajectories.push_back(data.trajectories[rng.next_below(n)]);
  return out;
}

BootstrapResult bootstrap_interval(const Dataset& data, const TabularPolicy& pi,
                                   const BootstrapConfig& cfg, BootstrapEstimator estimator) {
  if (cfg.b < 100) throw InvalidInput("bootstrap_interval: need at least 100 resamples");
  if (!(cfg.delta > 0.0 && cfg.delta <= 0.5))
    throw InvalidInput("bootstrap_interval: delta must be in (0, 0.5]");
  const std::size_t n = data.size();
  if (n < 2) throw InsufficientData("bootstrap_interval: need at least 2 trajectories");

  // Per-trajectory statistics depend only on the trajectory, so resampling
  // permutes precomputed rows instead of copying trajectories.
  const std::vector<TrajectoryStats> stats = dataset_stats(data, pi);
  const SplitPlan plan = SplitPlan::even_odd(n);
  auto estimate = [&](std::span<const TrajectoryStats> rows) {
    return estimator == BootstrapEstimator::double_sampled
               ? double_sampled_variance(rows, plan).raw
               : variance_reduced_variance(rows, plan).raw;
  };

  const double point = estimate(stats);
  std::vector<double> pivots(static_cast<std::size_t>(cfg.b));
  std::vector<TrajectoryStats> buf(n);
  for (int i = 0; i < cfg.b; ++i) {
    SeededRng rng(cfg.seed, static_cast<std::uint64_t>(i));
    for (std::size_t k = 0; k < n; ++k) buf[k] = stats[rng.next_below(n)];
    pivots[static_cast<std::size_t>(i)] = estimate(buf) - point;
  }
  std::sort(pivots.begin(), pivots.end());

  const double z_lo = quantile_sorted(pivots, cfg.delta / 2.0);
  const double z_hi = quantile_sorted(pivots, 1.0 - cfg.delta / 2.0);
  BootstrapResult out;
  out.point = point;
  out.degenerate = pivots.front() == pivots.back();
  out.interval = {point - z_hi, point - z_lo, cfg.delta};
  return out;
}

}  // namespace ove
