// rng.hpp
//
// Platform-stable random numbers for the simulator. The standard library
// distributions are implementation-defined, so every draw used by the
// simulator goes through the helpers here:
//
//   * SplitMix64 for seed expansion and per-run seed derivation
//   * xoshiro256** as the generator
//   * uniform doubles from the top 53 bits
//   * normals via Box-Muller (no cached second value)
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace prefetchsim {

inline std::uint64_t splitmix64_next(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seed for run `run_index` of a scenario seeded with `base_seed`.
inline std::uint64_t derive_run_seed(std::uint64_t base_seed, std::uint64_t run_index) {
  std::uint64_t s = base_seed;
  std::uint64_t mixed = splitmix64_next(s);
  std::uint64_t t = mixed ^ (run_index * 0xD1B54A32D192ED03ULL);
  return splitmix64_next(t);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t s = seed;
    for (auto& word : state_) word = splitmix64_next(s);
  }

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  /// Uniform in [0, 1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform in [lo, hi]; returns lo when the interval is degenerate.
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  double standard_normal() {
    double u1 = uniform01();
    while (u1 <= 0.0) u1 = uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

  std::array<std::uint64_t, 4> state_{};
};

}  // namespace prefetchsim
