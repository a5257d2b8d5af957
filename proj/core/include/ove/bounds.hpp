#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ove/rng.hpp"
#include "ove/types.hpp"

namespace ove {

struct Interval {
  double lower = 0.0;
  double upper = 0.0;
  double delta = 0.0;  // failure budget the interval was computed at
};

// Budget split across the four sub-bounds of a two-sided interval: d1 feeds
// the second-moment lower bound, d2 the mean bounds inside it, d3 and d4 the
// same pair on the upper side. The simple (delta-only) entry points follow
// the fixed algorithmic split; this is the research knob.
struct DeltaBudget {
  double d1 = 0.0;
  double d2 = 0.0;
  double d3 = 0.0;
  double d4 = 0.0;

  static DeltaBudget even_split(double delta) {
    return DeltaBudget{delta / 4.0, delta / 4.0, delta / 4.0, delta / 4.0};
  }

  void validate(double delta) const;
};

// Truncation threshold chosen on the 1/20 tuning partition. c is stored as a
// positive magnitude; upper-direction bounds apply it with a negative sign.
struct TruncationPlan {
  double c = 0.0;
  std::vector<double> grid;  // candidate magnitudes searched, ascending
  std::size_t pre_size = 0;
  std::size_t post_size = 0;
  bool fallback = false;  // n < 40: no partition, c = max |sample|
};

enum class BoundDirection { lower, upper };
enum class ShiftKind { mean, second_moment };

/// Truncated-mean concentration lower bound at level delta with common
/// threshold c > 0: mean(min(x_i, c)) minus a 7c ln(2/delta)/(3(n-1)) term
/// minus a pairwise-variance term, the pairwise sum evaluated through
/// 2n*sum(u^2) - 2*(sum u)^2. Samples must be nonnegative.
double ci_lower_truncated(std::span<const double> samples, double c, double delta);

/// Mirrored upper bound for nonpositive samples and negative threshold c,
/// implemented as -ci_lower(-samples, -c, delta) so the sign symmetry is
/// exact by construction.
double ci_upper_truncated(std::span<const double> samples, double c, double delta);

/// Splits samples 1/20 : 19/20 by a fresh shuffle from rng, grid-searches the
/// threshold over the nonzero absolute-value deciles of the tuning part
/// (floored at 1e-9), and keeps the c that optimizes the bound there; ties go
/// to the smallest c. Below n = 40 returns a flagged fallback plan with
/// c = max |sample| and no partition.
TruncationPlan select_threshold(std::span<const double> samples, double delta,
                                BoundDirection direction, SeededRng& rng);

/// Tail-switched per-trajectory statistic on a horizon-padded trajectory.
/// kind=second_moment, direction=upper: coupled pair sum with reward products
/// shifted by xi_r, guaranteed <= 0 term by term, exactly, in floating point.
/// kind=second_moment, direction=lower: the unshifted coupled pair sum.
/// kind=mean: per-decision sum with rewards shifted by the zero-extended
/// range endpoint r_hi (upper, <= 0) or r_lo (lower, >= 0); zero extension
/// keeps the signs exact on padded steps, whose reward is 0.
double control_variate_shift(ShiftKind kind, BoundDirection direction,
                             const Trajectory& traj, const TabularPolicy& pi,
                             const ReturnSpec& spec);

/// Interval image under squaring: upper = max of endpoint squares; lower = 0
/// when the interval straddles 0, otherwise the min of endpoint squares.
Interval propagate_square(const Interval& iv);

struct ClippedInterval {
  Interval interval;
  bool degenerate = false;  // the input missed [0, (g_max-g_min)^2/4] entirely
};

/// Intersection with [0, (g_max-g_min)^2/4]; a disjoint input collapses to
/// the nearer endpoint and is flagged.
ClippedInterval clip_interval(const Interval& iv, const ReturnSpec& spec);

/// One-sided high-confidence bounds on the return variance, composed from
/// the truncated concentration bound over shifted per-trajectory statistics.
/// The delta overloads implement the fixed split (second moment at delta/2,
/// each mean bound at delta/4); the DeltaBudget overloads read (d3, d4) for
/// the upper bound and (d1, d2) for the lower, with the mean budget halved
/// across its two sides. rng drives the single pre/post shuffle per call.
double hcove_upper(const Dataset& data, const TabularPolicy& pi, double delta, SeededRng& rng);
double hcove_lower(const Dataset& data, const TabularPolicy& pi, double delta, SeededRng& rng);
double hcove_upper(const Dataset& data, const TabularPolicy& pi, const DeltaBudget& budget, SeededRng& rng);
double hcove_lower(const Dataset& data, const TabularPolicy& pi, const DeltaBudget& budget, SeededRng& rng);

/// Two-sided interval at total budget delta: lower and upper sides run at
/// delta/2 each (even DeltaBudget split), so the union bound gives 1 - delta.
Interval hcove_interval(const Dataset& data, const TabularPolicy& pi, double delta, SeededRng& rng);
Interval hcove_interval(const Dataset& data, const TabularPolicy& pi, const DeltaBudget& budget,
                        double delta, SeededRng& rng);

}  // namespace ove
