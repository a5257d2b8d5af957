#include "ove/trajectory_ops.hpp"

#include <cmath>

#include "ove/errors.hpp"

namespace ove {

namespace {

constexpr std::size_t kLogSpaceThreshold = 32;

double step_ratio(const Step& st, const TabularPolicy& pi) {
  if (is_padding_step(st)) return 1.0;
  const double p = pi.prob(st.state, st.action);
  if (st.behavior_prob <= 0.0) {
    if (p > 0.0)
      throw SupportViolation("importance_ratio: evaluation policy covers an action logged with probability 0");
    return 0.0;
  }
  return p / st.behavior_prob;
}

}  // namespace

double importance_ratio(const Trajectory& traj, const TabularPolicy& pi,
                        std::size_t from, std::size_t to) {
  if (from > to) return 1.0;
  if (to >= traj.length()) throw InvalidRange("importance_ratio: step index out of bounds");

  const std::size_t span = to - from + 1;
  if (span <= kLogSpaceThreshold) {
    double prod = 1.0;
    for (std::size_t j = from; j <= to; ++j) prod *= step_ratio(traj.steps[j], pi);
    return prod;
  }

  double log_sum = 0.0;
  for (std::size_t j = from; j <= to; ++j) {
    const double r = step_ratio(traj.steps[j], pi);
    if (r == 0.0) return 0.0;
    log_sum += std::log(r);
  }
  return std::exp(log_sum);
}

std::vector<double> prefix_ratios(const Trajectory& traj, const TabularPolicy& pi) {
  std::vector<double> out(traj.length());
  double prod = 1.0;
  for (std::size_t j = 0; j < traj.length(); ++j) {
    prod *= step_ratio(traj.steps[j], pi);
    out[j] = prod;
  }
  return out;
}

double discounted_return(const Trajectory& traj, const ReturnSpec& spec) {
  double g = 1.0;
  double total = 0.0;
  for (const Step& st : traj.steps) {
    total += g * st.reward;
    g *= spec.gamma;
  }
  return total;
}

Trajectory pad_trajectory(const Trajectory& traj, const ReturnSpec& spec) {
  const auto horizon = static_cast<std::size_t>(spec.horizon);
  if (traj.length() > horizon) throw InvalidRange("pad_trajectory: trajectory longer than horizon");
  Trajectory out = traj;
  out.steps.reserve(horizon);
  while (out.steps.size() < horizon)
    out.steps.push_back(Step{kPaddingId, kPaddingId, 1.0, 0.0});
  return out;
}

}  // namespace ove
