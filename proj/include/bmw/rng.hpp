#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

// Self-contained random number machinery. Everything here is a fixed,
// documented algorithm (splitmix64, Fisher-Yates, Box-Muller) rather than
// std::shuffle / std::*_distribution, whose outputs are
// implementation-defined. Design runs must reproduce bit-for-bit across
// standard libraries and across serial/parallel schedules.

namespace bmw {

inline constexpr std::uint64_t kSplitMix64Gamma = 0x9E3779B97F4A7C15ULL;

inline std::uint64_t splitmix64_mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Stream seed for sub-task `index` of `master`: the (index+1)-th output of a
// splitmix64 sequence started at `master`. Repetition m of a design run uses
// derive_seed(master_seed, m), so any execution order sees the same draws.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  return splitmix64_mix(master + (index + 1) * kSplitMix64Gamma);
}

class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~0ULL; }

  result_type operator()() { return splitmix64_mix(state_ += kSplitMix64Gamma); }

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n) via the multiply-shift trick. The bias is
  // O(n / 2^64), irrelevant at the sizes used here.
  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>((*this)()) * n) >> 64);
  }

  // Standard normal deviate, Box-Muller with a cached spare.
  double normal() {
    if (spare_) {
      double v = *spare_;
      spare_.reset();
      return v;
    }
    double u1 = (static_cast<double>((*this)() >> 11) + 1.0) * 0x1.0p-53;  // (0,1]
    double u2 = uniform();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    return r * std::cos(a);
  }

 private:
  std::uint64_t state_;
  std::optional<double> spare_;
};

// In-place Fisher-Yates shuffle driven by the generator above.
template <typename T>
void fisher_yates_shuffle(std::vector<T>& values, SplitMix64& rng) {
  for (std::size_t i = values.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(values[i - 1], values[j]);
  }
}

}  // namespace bmw
