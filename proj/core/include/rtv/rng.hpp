#pragma once

#include <cmath>
#include <cstdint>

namespace rtv {

/// Counter-based 64-bit generator (SplitMix64). The i-th draw from a given
/// seed is a pure function of (seed, i), so trial streams are reproducible
/// from the seed alone. Reports that carry seeds identify the algorithm as
/// "splitmix64".
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform double in [0, 1), 53 mantissa bits.
  double next_unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  /// Uniform double in [lo, hi).
  double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  /// Exponential variate with the given rate (inverse-CDF).
  double next_exponential(double rate) {
    return -std::log1p(-next_unit()) / rate;
  }

  static constexpr const char* kAlgorithmId = "splitmix64";

 private:
  std::uint64_t state_;
};

/// Stable derivation of sub-stream seeds, e.g. per (round, method) in the
/// batch simulator.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) {
  SplitMix64 g(seed ^ (0xd1342543de82ef95ULL * (stream + 1)));
  return g.next();
}

}  // namespace rtv
