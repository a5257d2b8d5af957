#pragma once

#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "ove/errors.hpp"

namespace ove {

namespace detail {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Order-sensitive mix of two words, used to key engines and substreams.
inline std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a;
  std::uint64_t z = splitmix64_next(s);
  s ^= b;
  z ^= splitmix64_next(s);
  return z;
}

}  // namespace detail

// Deterministic (seed, stream) keyed RNG. The same key yields the same draw
// sequence on every platform: mt19937_64 is fully specified by the standard
// and all distributions below are hand-rolled (libstdc++/libc++ distribution
// objects are not bit-compatible with each other).
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0)
      : seed_(seed), stream_(stream), engine_(detail::mix64(seed, stream)) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  // Child generator with an independent stream; does not advance this one.
  SeededRng substream(std::uint64_t child) const {
    return SeededRng(seed_, detail::mix64(stream_, child));
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  double next_in(double lo, double hi) {
    return lo + (hi - lo) * next_double();
  }

  // Uniform in [0, n) by rejection of the top partial block.
  std::uint64_t next_below(std::uint64_t n) {
    if (n == 0) throw InvalidInput("next_below: n must be positive");
    const std::uint64_t rem = (0ULL - n) % n;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (rem == 0 || r < 0ULL - rem) return r % n;
    }
  }

  // Index draw proportional to nonnegative weights (need not sum to 1).
  std::size_t sample_index(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
      if (w < 0.0) throw InvalidInput("sample_index: negative weight");
      total += w;
    }
    if (!(total > 0.0)) throw InvalidInput("sample_index: no probability mass");
    const double u = next_double() * total;
    double acc = 0.0;
    std::size_t last = weights.size();
    for (std::size_t i = 0; i < weights.size(); ++i) {
      if (weights[i] <= 0.0) continue;
      last = i;
      acc += weights[i];
      if (u < acc) return i;
    }
    return last;  // rounding sliver past the final cumulative weight
  }

  // Fisher-Yates.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(next_below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::vector<std::size_t> permutation(std::size_t n) {
    std::vector<std::size_t> p(n);
    std::iota(p.begin(), p.end(), std::size_t{0});
    shuffle(p);
    return p;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::mt19937_64 engine_;
};

}  // namespace ove
