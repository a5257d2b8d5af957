#pragma once

#include <cstddef>
#include <vector>

#include "ove/types.hpp"

namespace ove {

/// Product of per-step ratios pi(a_j|s_j) / behavior_prob_j for j in
/// [from, to]. Returns 1 for an empty range (from > to). Padding steps
/// contribute a factor of exactly 1. Long products (> 32 steps) go through
/// log space to dodge underflow; zero factors short-circuit to 0.
/// Throws SupportViolation when pi puts mass on a step recorded with
/// behavior probability 0, InvalidRange on out-of-bounds indices.
double importance_ratio(const Trajectory& traj, const TabularPolicy& pi,
                        std::size_t from, std::size_t to);

/// rho(0, j) for every step j, cached front-to-back in one pass.
std::vector<double> prefix_ratios(const Trajectory& traj, const TabularPolicy& pi);

/// Sum of gamma^j * reward_j over the recorded steps.
double discounted_return(const Trajectory& traj, const ReturnSpec& spec);

/// Copy extended to exactly spec.horizon steps with padding steps (reward 0,
/// per-step ratio 1), so ratios and returns are unchanged while shifted
/// statistics can range over the full horizon. Idempotent.
Trajectory pad_trajectory(const Trajectory& traj, const ReturnSpec& spec);

}  // namespace ove
