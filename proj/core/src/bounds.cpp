#include "ove/bounds.hpp"

#include <algorithm>
#include <cmath>

#include "ove/errors.hpp"
#include "ove/numeric.hpp"
#include "ove/trajectory_ops.hpp"

namespace ove {

namespace {

constexpr double kThresholdFloor = 1e-9;

void check_delta(double delta) {
  if (!(delta > 0.0 && delta <= 0.5)) throw InvalidInput("truncated bound: delta outside (0, 0.5]");
}

// Core lower bound. The public entry point insists on nonnegative samples;
// the high-confidence composition relaxes that for its signed second-moment
// statistics, which estimate a nonnegative quantity but are not pointwise
// nonnegative.
double lower_core(std::span<const double> samples, double c, double delta, bool require_nonneg) {
  const std::size_t n = samples.size();
  if (n < 2) throw InvalidInput("truncated bound: need at least 2 samples");
  if (!(c > 0.0)) throw InvalidInput("truncated bound: threshold must be positive");
  check_delta(delta);

  double sum_y = 0.0;
  double sum_u = 0.0;
  double sum_u2 = 0.0;
  for (double x : samples) {
    if (require_nonneg && x < 0.0) throw InvalidInput("ci_lower_truncated: negative sample");
    const double y = std::min(x, c);
    const double u = y / c;
    sum_y += y;
    sum_u += u;
    sum_u2 += u * u;
  }

  const double nn = static_cast<double>(n);
  const double lg = std::log(2.0 / delta);
  double pairwise = 2.0 * nn * sum_u2 - 2.0 * sum_u * sum_u;
  if (pairwise < 0.0) pairwise = 0.0;  // rounding can leave a negative sliver
  return sum_y / nn - 7.0 * c * lg / (3.0 * (nn - 1.0)) -
         (c / nn) * std::sqrt(lg / (nn - 1.0) * pairwise);
}

double upper_core(std::span<const double> samples, double c, double delta, bool require_nonpos) {
  if (!(c < 0.0)) throw InvalidInput("truncated bound: upper threshold must be negative");
  std::vector<double> negated;
  negated.reserve(samples.size());
  for (double x : samples) {
    if (require_nonpos && x > 0.0) throw InvalidInput("ci_upper_truncated: positive sample");
    negated.push_back(-x);
  }
  return -lower_core(negated, -c, delta, false);
}

double eval_bound(std::span<const double> samples, double cmag, double delta,
                  BoundDirection direction, bool allow_negative) {
  if (direction == BoundDirection::lower)
    return lower_core(samples, cmag, delta, !allow_negative);
  return upper_core(samples, -cmag, delta, true);
}

// Deciles of the nonzero absolute values, floored and deduplicated.
std::vector<double> candidate_grid(std::span<const double> tuning) {
  std::vector<double> mags;
  for (double x : tuning) {
    const double a = std::abs(x);
    if (a > 0.0) mags.push_back(a);
  }
  if (mags.empty()) return {kThresholdFloor};
  std::sort(mags.begin(), mags.end());
  std::vector<double> grid;
  grid.reserve(10);
  for (int i = 1; i <= 10; ++i)
    grid.push_back(std::max(quantile_sorted(mags, static_cast<double>(i) / 10.0), kThresholdFloor));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

struct ThresholdedBound {
  TruncationPlan plan;
  double bound = 0.0;
};

// Threshold selection on the shuffled 1/20 tuning slice, bound reported on
// the rest. perm is the caller's shuffle so the three sample sets of one
// high-confidence call share the partition.
ThresholdedBound bound_with_threshold(std::span<const double> samples, double delta,
                                      BoundDirection direction,
                                      std::span<const std::size_t> perm,
                                      bool allow_negative) {
  const std::size_t n = samples.size();
  if (n < 2) throw InsufficientData("threshold selection: need at least 2 samples");

  ThresholdedBound out;
  if (n < 40) {
    double cmax = 0.0;
    for (double x : samples) cmax = std::max(cmax, std::abs(x));
    cmax = std::max(cmax, kThresholdFloor);
    out.plan.c = cmax;
    out.plan.grid = {cmax};
    out.plan.pre_size = 0;
    out.plan.post_size = n;
    out.plan.fallback = true;
    out.bound = eval_bound(samples, cmax, delta, direction, allow_negative);
    return out;
  }

  const std::size_t npre = (n + 19) / 20;
  std::vector<double> pre;
  std::vector<double> post;
  pre.reserve(npre);
  post.reserve(n - npre);
  for (std::size_t i = 0; i < n; ++i)
    (i < npre ? pre : post).push_back(samples[perm[i]]);

  out.plan.grid = candidate_grid(pre);
  out.plan.pre_size = npre;
  out.plan.post_size = n - npre;

  double best_c = out.plan.grid.front();
  double best_val = 0.0;
  bool have = false;
  for (double c : out.plan.grid) {
    const double v = eval_bound(pre, c, delta, direction, allow_negative);
    const bool better =
        !have || (direction == BoundDirection::lower ? v > best_val : v < best_val);
    if (better) {
      have = true;
      best_val = v;
      best_c = c;
    }
  }
  out.plan.c = best_c;
  out.bound = eval_bound(post, best_c, delta, direction, allow_negative);
  return out;
}

// All four shifted statistics of one padded trajectory in a single pass over
// the cached prefix ratios. The pair terms keep the (reward product minus
// shift) factor explicit: rounding is monotone, so each factor has the exact
// advertised sign and the accumulated statistic does too.
struct ShiftedRow {
  double x_upper = 0.0;  // <= 0
  double x_plain = 0.0;  // signed
  double y_lower = 0.0;  // >= 0
  double y_upper = 0.0;  // <= 0
};

ShiftedRow shifted_row(const Trajectory& traj, const TabularPolicy& pi, const ReturnSpec& spec) {
  const auto horizon = static_cast<std::size_t>(spec.horizon);
  if (traj.length() < horizon)
    throw UnpaddedTrajectory("control_variate_shift: trajectory shorter than the horizon; pad it first");
  if (traj.length() > horizon)
    throw InvalidRange("control_variate_shift: trajectory longer than the horizon");

  const auto prefix = prefix_ratios(traj, pi);
  std::vector<double> pows(horizon);
  double g = 1.0;
  for (std::size_t j = 0; j < horizon; ++j) {
    pows[j] = g;
    g *= spec.gamma;
  }

  const double xi = spec.xi_r();
  // Padding steps carry reward 0, so the per-step shifts use the
  // zero-extended reward endpoints; otherwise a short trajectory under an
  // all-positive (or all-negative) reward range would break the sign
  // guarantee the truncated bound relies on.
  const double r_lo = spec.r_lo();
  const double r_hi = spec.r_hi();
  ShiftedRow row;
  for (std::size_t k = 0; k < horizon; ++k) {
    const double wk = prefix[k];
    if (wk == 0.0) continue;
    const double rk = traj.steps[k].reward;
    row.y_lower += wk * pows[k] * (rk - r_lo);
    row.y_upper += wk * pows[k] * (rk - r_hi);
    for (std::size_t j = 0; j <= k; ++j) {
      const double scale = (j == k) ? 1.0 : 2.0;
      const double wjk = wk * (pows[j] * pows[k]);
      const double prod = traj.steps[j].reward * rk;
      row.x_upper += scale * wjk * (prod - xi);
      row.x_plain += scale * (wjk * prod);
    }
  }
  return row;
}

struct HcoveSamples {
  std::vector<double> x_upper;
  std::vector<double> x_plain;
  std::vector<double> y_lower;
  std::vector<double> y_upper;
};

HcoveSamples hcove_samples(const Dataset& data, const TabularPolicy& pi) {
  HcoveSamples s;
  const std::size_t n = data.size();
  s.x_upper.reserve(n);
  s.x_plain.reserve(n);
  s.y_lower.reserve(n);
  s.y_upper.reserve(n);
  const auto horizon = static_cast<std::size_t>(data.spec.horizon);
  for (const Trajectory& traj : data.trajectories) {
    const ShiftedRow row = traj.length() == horizon
                               ? shifted_row(traj, pi, data.spec)
                               : shifted_row(pad_trajectory(traj, data.spec), pi, data.spec);
    s.x_upper.push_back(row.x_upper);
    s.x_plain.push_back(row.x_plain);
    s.y_lower.push_back(row.y_lower);
    s.y_upper.push_back(row.y_upper);
  }
  return s;
}

void check_sub_deltas(double dx, double dy) {
  check_delta(dx);
  check_delta(dy / 2.0);
}

struct MeanBounds {
  double lb = 0.0;
  double ub = 0.0;
};

// Mean bounds at dy/2 each, shifted back and clamped into the static return
// range before any squaring.
MeanBounds mean_bounds(const HcoveSamples& s, const ReturnSpec& spec, double dy,
                       std::span<const std::size_t> perm) {
  MeanBounds out;
  out.lb = bound_with_threshold(s.y_lower, dy / 2.0, BoundDirection::lower, perm, false).bound +
           spec.g_min();
  out.ub = bound_with_threshold(s.y_upper, dy / 2.0, BoundDirection::upper, perm, false).bound +
           spec.g_max();
  out.lb = std::clamp(out.lb, spec.g_min(), spec.g_max());
  out.ub = std::clamp(out.ub, spec.g_min(), spec.g_max());
  return out;
}

}  // namespace

void DeltaBudget::validate(double delta) const {
  for (double d : {d1, d2, d3, d4})
    if (!(d > 0.0)) throw InvalidInput("DeltaBudget: all parts must be positive");
  if (d1 + d2 + d3 + d4 > delta * (1.0 + 1e-12))
    throw InvalidInput("DeltaBudget: parts exceed the total budget");
}

double ci_lower_truncated(std::span<const double> samples, double c, double delta) {
  return lower_core(samples, c, delta, true);
}

double ci_upper_truncated(std::span<const double> samples, double c, double delta) {
  return upper_core(samples, c, delta, true);
}

TruncationPlan select_threshold(std::span<const double> samples, double delta,
                                BoundDirection direction, SeededRng& rng) {
  check_delta(delta);
  for (double x : samples) {
    if (direction == BoundDirection::lower && x < 0.0)
      throw InvalidInput("select_threshold: negative sample for a lower bound");
    if (direction == BoundDirection::upper && x > 0.0)
      throw InvalidInput("select_threshold: positive sample for an upper bound");
  }
  const auto perm = rng.permutation(samples.size());
  return bound_with_threshold(samples, delta, direction, perm, false).plan;
}

double control_variate_shift(ShiftKind kind, BoundDirection direction, const Trajectory& traj,
                             const TabularPolicy& pi, const ReturnSpec& spec) {
  const ShiftedRow row = shifted_row(traj, pi, spec);
  if (kind == ShiftKind::second_moment)
    return direction == BoundDirection::upper ? row.x_upper : row.x_plain;
  return direction == BoundDirection::upper ? row.y_upper : row.y_lower;
}

Interval propagate_square(const Interval& iv) {
  const double a = iv.lower * iv.lower;
  const double b = iv.upper * iv.upper;
  Interval out;
  out.delta = iv.delta;
  out.upper = std::max(a, b);
  out.lower = (iv.lower <= 0.0 && 0.0 <= iv.upper) ? 0.0 : std::min(a, b);
  return out;
}

ClippedInterval clip_interval(const Interval& iv, const ReturnSpec& spec) {
  const double hi = spec.popoviciu_bound();
  ClippedInterval out;
  out.interval.delta = iv.delta;
  if (iv.upper < 0.0) {
    out.interval.lower = out.interval.upper = 0.0;
    out.degenerate = true;
  } else if (iv.lower > hi) {
    out.interval.lower = out.interval.upper = hi;
    out.degenerate = true;
  } else {
    out.interval.lower = std::clamp(iv.lower, 0.0, hi);
    out.interval.upper = std::clamp(iv.upper, 0.0, hi);
  }
  return out;
}

double hcove_upper(const Dataset& data, const TabularPolicy& pi, const DeltaBudget& budget,
                   SeededRng& rng) {
  check_sub_deltas(budget.d3, budget.d4);
  if (data.size() < 2) throw InsufficientData("hcove_upper: need at least 2 trajectories");
  const HcoveSamples s = hcove_samples(data, pi);
  const auto perm = rng.permutation(data.size());

  const double xub =
      bound_with_threshold(s.x_upper, budget.d3, BoundDirection::upper, perm, false).bound +
      data.spec.xi_g();
  const MeanBounds y = mean_bounds(s, data.spec, budget.d4, perm);
  const double zlb =
      (y.lb <= 0.0 && 0.0 <= y.ub) ? 0.0 : std::min(y.lb * y.lb, y.ub * y.ub);
  return xub - zlb;
}

double hcove_lower(const Dataset& data, const TabularPolicy& pi, const DeltaBudget& budget,
                   SeededRng& rng) {
  check_sub_deltas(budget.d1, budget.d2);
  if (data.size() < 2) throw InsufficientData("hcove_lower: need at least 2 trajectories");
  const HcoveSamples s = hcove_samples(data, pi);
  const auto perm = rng.permutation(data.size());

  const double xlb =
      bound_with_threshold(s.x_plain, budget.d1, BoundDirection::lower, perm, true).bound;
  const MeanBounds y = mean_bounds(s, data.spec, budget.d2, perm);
  const double zub = std::max(y.lb * y.lb, y.ub * y.ub);
  return xlb - zub;
}

double hcove_upper(const Dataset& data, const TabularPolicy& pi, double delta, SeededRng& rng) {
  check_delta(delta);
  DeltaBudget budget;
  budget.d3 = delta / 2.0;
  budget.d4 = delta / 2.0;
  return hcove_upper(data, pi, budget, rng);
}

double hcove_lower(const Dataset& data, const TabularPolicy& pi, double delta, SeededRng& rng) {
  check_delta(delta);
  DeltaBudget budget;
  budget.d1 = delta / 2.0;
  budget.d2 = delta / 2.0;
  return hcove_lower(data, pi, budget, rng);
}

Interval hcove_interval(const Dataset& data, const TabularPolicy& pi, const DeltaBudget& budget,
                        double delta, SeededRng& rng) {
  budget.validate(delta);
  Interval out;
  out.lower = hcove_lower(data, pi, budget, rng);
  out.upper = hcove_upper(data, pi, budget, rng);
  out.delta = delta;
  return out;
}

Interval hcove_interval(const Dataset& data, const TabularPolicy& pi, double delta, SeededRng& rng) {
  check_delta(delta);
  return hcove_interval(data, pi, DeltaBudget::even_split(delta), delta, rng);
}

}  // namespace ove
