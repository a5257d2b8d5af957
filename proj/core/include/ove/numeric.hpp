#pragma once

#include <cmath>
#include <span>

#include "ove/errors.hpp"

namespace ove {

// Neumaier compensated summation; used where many small terms meet tight
// tolerances (enumeration expectations, pairwise penalty sums).
struct NeumaierSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

// Quantile with linear interpolation between order statistics
// (h = (n-1)q, interpolate x[floor(h)]..x[floor(h)+1]). Input must be sorted.
inline double quantile_sorted(std::span<const double> sorted, double q) {
  if (sorted.empty()) throw InvalidInput("quantile_sorted: empty sample");
  if (!(q >= 0.0 && q <= 1.0)) throw InvalidInput("quantile_sorted: q outside [0,1]");
  const std::size_t n = sorted.size();
  const double h = static_cast<double>(n - 1) * q;
  const auto lo = static_cast<std::size_t>(h);
  if (lo + 1 >= n) return sorted[n - 1];
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

}  // namespace ove
