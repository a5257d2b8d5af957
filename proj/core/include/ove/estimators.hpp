#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "ove/rng.hpp"
#include "ove/types.hpp"

namespace ove {

// Disjoint index halves D_1 / D_2 used by the double-sampled estimators.
struct SplitPlan {
  std::vector<std::size_t> indices_d1;
  std::vector<std::size_t> indices_d2;

  // Deterministic default: even positions to D_1, odd to D_2, so the extra
  // trajectory of an odd-sized dataset lands in D_1.
  static SplitPlan even_odd(std::size_t n);

  // Seed-randomized alternative; still an exact half split of a permutation.
  static SplitPlan shuffled(std::size_t n, SeededRng& rng);

  // Disjoint, covering, sizes differing by at most 1; throws InvalidInput.
  void validate(std::size_t n) const;
};

struct VarianceEstimate {
  double raw = 0.0;      // may be negative
  double clipped = 0.0;  // max(raw, 0)
  std::size_t n = 0;
  std::string method;
};

// Per-trajectory statistics every estimator is assembled from. Computing
// them once per dataset and reusing across estimators, resamples, and
// enumeration keeps repeated evaluation cheap.
struct TrajectoryStats {
  double ratio = 1.0;  // rho(0, length-1)
  double ret = 0.0;    // discounted return G
  double pdis = 0.0;   // sum_j rho(0,j) gamma^j R_j
  double cdis = 0.0;   // sum_{j,k} rho(0,max(j,k)) gamma^{j+k} R_j R_k

  double is_return() const { return ratio * ret; }
  double is_square() const { return ratio * (ret * ret); }
};

TrajectoryStats trajectory_stats(const Trajectory& traj, const TabularPolicy& pi,
                                 const ReturnSpec& spec);
std::vector<TrajectoryStats> dataset_stats(const Dataset& data, const TabularPolicy& pi);

// Sample variance (Bessel) of the importance-weighted returns rho_i G_i.
// Biased and inconsistent in general; shipped for the comparison experiments.
VarianceEstimate naive_is_variance(std::span<const TrajectoryStats> stats);
VarianceEstimate naive_is_variance(const Dataset& data, const TabularPolicy& pi);

// Plug-in estimate (1/(n-1)) sum_i rho_i (G_i - mean(rho G))^2. Consistent
// but biased.
VarianceEstimate naive_plugin_variance(std::span<const TrajectoryStats> stats);
VarianceEstimate naive_plugin_variance(const Dataset& data, const TabularPolicy& pi);

// Unbiased split estimator: (1/n) sum_i rho_i G_i^2 over ALL n trajectories,
// minus the product of the rho G means over the two halves.
VarianceEstimate double_sampled_variance(std::span<const TrajectoryStats> stats, const SplitPlan& split);
VarianceEstimate double_sampled_variance(const Dataset& data, const TabularPolicy& pi, const SplitPlan& split);

// Same structure with the per-decision mean statistic replacing rho G on the
// halves and the coupled-decision second-moment statistic replacing rho G^2.
VarianceEstimate variance_reduced_variance(std::span<const TrajectoryStats> stats, const SplitPlan& split);
VarianceEstimate variance_reduced_variance(const Dataset& data, const TabularPolicy& pi, const SplitPlan& split);

// (1/n) sum_i sum_j rho_i(0,j) gamma^j R_{i(j)}.
double pdis_mean(std::span<const TrajectoryStats> stats);
double pdis_mean(const Dataset& data, const TabularPolicy& pi);

// (1/n) sum_i sum_{j,k} rho_i(0,max(j,k)) gamma^{j+k} R_{i(j)} R_{i(k)}.
double cdis_second_moment(std::span<const TrajectoryStats> stats);
double cdis_second_moment(const Dataset& data, const TabularPolicy& pi);

}  // namespace ove
