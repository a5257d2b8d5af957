#include "ove/estimators.hpp"

#include <algorithm>

#include "ove/errors.hpp"
#include "ove/trajectory_ops.hpp"

namespace ove {

namespace {

double mean_over(std::span<const TrajectoryStats> stats, const std::vector<std::size_t>& idx,
                 double (*field)(const TrajectoryStats&)) {
  double total = 0.0;
  for (std::size_t i : idx) total += field(stats[i]);
  return total / static_cast<double>(idx.size());
}

VarianceEstimate finish(double raw, std::size_t n, const char* method) {
  return VarianceEstimate{raw, std::max(raw, 0.0), n, method};
}

void require_pair_split(std::span<const TrajectoryStats> stats, const SplitPlan& split) {
  if (stats.size() < 2) throw InsufficientData("split estimator: need at least 2 trajectories");
  split.validate(stats.size());
  if (split.indices_d1.empty() || split.indices_d2.empty())
    throw InsufficientData("split estimator: a split half is empty");
}

}  // namespace

SplitPlan SplitPlan::even_odd(std::size_t n) {
  SplitPlan plan;
  plan.indices_d1.reserve((n + 1) / 2);
  plan.indices_d2.reserve(n / 2);
  for (std::size_t i = 0; i < n; ++i)
    (i % 2 == 0 ? plan.indices_d1 : plan.indices_d2).push_back(i);
  return plan;
}

SplitPlan SplitPlan::shuffled(std::size_t n, SeededRng& rng) {
  const auto perm = rng.permutation(n);
  SplitPlan plan;
  const std::size_t half = (n + 1) / 2;
  plan.indices_d1.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(half));
  plan.indices_d2.assign(perm.begin() + static_cast<std::ptrdiff_t>(half), perm.end());
  return plan;
}

void SplitPlan::validate(std::size_t n) const {
  if (indices_d1.size() + indices_d2.size() != n)
    throw InvalidInput("SplitPlan: halves do not cover the dataset");
  const std::size_t a = indices_d1.size();
  const std::size_t b = indices_d2.size();
  if ((a > b ? a - b : b - a) > 1) throw InvalidInput("SplitPlan: half sizes differ by more than 1");
  std::vector<char> seen(n, 0);
  for (const auto& half : {&indices_d1, &indices_d2})
    for (std::size_t i : *half) {
      if (i >= n) throw InvalidInput("SplitPlan: index out of range");
      if (seen[i]) throw InvalidInput("SplitPlan: duplicate index");
      seen[i] = 1;
    }
}

TrajectoryStats trajectory_stats(const Trajectory& traj, const TabularPolicy& pi,
                                 const ReturnSpec& spec) {
  const std::size_t len = traj.length();
  const auto prefix = prefix_ratios(traj, pi);

  std::vector<double> pows(len);
  double g = 1.0;
  for (std::size_t j = 0; j < len; ++j) {
    pows[j] = g;
    g *= spec.gamma;
  }

  TrajectoryStats out;
  out.ratio = len == 0 ? 1.0 : prefix[len - 1];

  double ret = 0.0;
  double pdis = 0.0;
  double cdis = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const double rk = traj.steps[k].reward;
    ret += pows[k] * rk;
    const double wk = prefix[k];
    if (wk == 0.0) continue;  // whole pair row vanishes exactly
    pdis += wk * (pows[k] * rk);
    for (std::size_t j = 0; j <= k; ++j) {
      const double term = wk * (pows[j] * pows[k]) * (traj.steps[j].reward * rk);
      cdis += (j == k) ? term : 2.0 * term;
    }
  }
  out.ret = ret;
  out.pdis = pdis;
  out.cdis = cdis;
  return out;
}

std::vector<TrajectoryStats> dataset_stats(const Dataset& data, const TabularPolicy& pi) {
  std::vector<TrajectoryStats> out;
  out.reserve(data.size());
  for (const Trajectory& traj : data.trajectories)
    out.push_back(trajectory_stats(traj, pi, data.spec));
  return out;
}

VarianceEstimate naive_is_variance(std::span<const TrajectoryStats> stats) {
  const std::size_t n = stats.size();
  if (n < 2) throw InsufficientData("naive_is_variance: need at least 2 trajectories");
  double mean = 0.0;
  for (const auto& st : stats) mean += st.is_return();
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (const auto& st : stats) {
    const double d = st.is_return() - mean;
    ss += d * d;
  }
  return finish(ss / static_cast<double>(n - 1), n, "naive_is");
}

VarianceEstimate naive_plugin_variance(std::span<const TrajectoryStats> stats) {
  const std::size_t n = stats.size();
  if (n < 2) throw InsufficientData("naive_plugin_variance: need at least 2 trajectories");
  double mean = 0.0;
  for (const auto& st : stats) mean += st.is_return();
  mean /= static_cast<double>(n);
  double ss = 0.0;
  for (const auto& st : stats) {
    const double d = st.ret - mean;
    ss += st.ratio * (d * d);
  }
  return finish(ss / static_cast<double>(n - 1), n, "naive_plugin");
}

VarianceEstimate double_sampled_variance(std::span<const TrajectoryStats> stats, const SplitPlan& split) {
  require_pair_split(stats, split);
  const std::size_t n = stats.size();
  double first = 0.0;
  for (const auto& st : stats) first += st.is_square();
  first /= static_cast<double>(n);
  const double m1 = mean_over(stats, split.indices_d1, [](const TrajectoryStats& s) { return s.is_return(); });
  const double m2 = mean_over(stats, split.indices_d2, [](const TrajectoryStats& s) { return s.is_return(); });
  return finish(first - m1 * m2, n, "double_sampled");
}

VarianceEstimate variance_reduced_variance(std::span<const TrajectoryStats> stats, const SplitPlan& split) {
  require_pair_split(stats, split);
  const std::size_t n = stats.size();
  double x = 0.0;
  for (const auto& st : stats) x += st.cdis;
  x /= static_cast<double>(n);
  const double y1 = mean_over(stats, split.indices_d1, [](const TrajectoryStats& s) { return s.pdis; });
  const double y2 = mean_over(stats, split.indices_d2, [](const TrajectoryStats& s) { return s.pdis; });
  return finish(x - y1 * y2, n, "variance_reduced");
}

double pdis_mean(std::span<const TrajectoryStats> stats) {
  if (stats.empty()) throw InsufficientData("pdis_mean: empty dataset");
  double total = 0.0;
  for (const auto& st : stats) total += st.pdis;
  return total / static_cast<double>(stats.size());
}

double cdis_second_moment(std::span<const TrajectoryStats> stats) {
  if (stats.empty()) throw InsufficientData("cdis_second_moment: empty dataset");
  double total = 0.0;
  for (const auto& st : stats) total += st.cdis;
  return total / static_cast<double>(stats.size());
}

VarianceEstimate naive_is_variance(const Dataset& data, const TabularPolicy& pi) {
  return naive_is_variance(std::span<const TrajectoryStats>(dataset_stats(data, pi)));
}

VarianceEstimate naive_plugin_variance(const Dataset& data, const TabularPolicy& pi) {
  return naive_plugin_variance(std::span<const TrajectoryStats>(dataset_stats(data, pi)));
}

VarianceEstimate double_sampled_variance(const Dataset& data, const TabularPolicy& pi, const SplitPlan& split) {
  return double_sampled_variance(std::span<const TrajectoryStats>(dataset_stats(data, pi)), split);
}

VarianceEstimate variance_reduced_variance(const Dataset& data, const TabularPolicy& pi, const SplitPlan& split) {
  return variance_reduced_variance(std::span<const TrajectoryStats>(dataset_stats(data, pi)), split);
}

double pdis_mean(const Dataset& data, const TabularPolicy& pi) {
  return pdis_mean(std::span<const TrajectoryStats>(dataset_stats(data, pi)));
}

double cdis_second_moment(const Dataset& data, const TabularPolicy& pi) {
  return cdis_second_moment(std::span<const TrajectoryStats>(dataset_stats(data, pi)));
}

}  // namespace ove
