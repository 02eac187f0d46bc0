#pragma once

#include <cstdint>
#include <random>
#include <stdexcept>

namespace lmq {

inline std::uint64_t splitmix64(std::uint64_t state) {
  std::uint64_t z = state + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Per-trial seed: the (index+1)-th output of a splitmix64 stream seeded with
/// the master seed. Fixed across platforms and thread counts so trial i always
/// sees the same randomness.
inline std::uint64_t derive_trial_seed(std::uint64_t master_seed, std::uint64_t trial_index) {
  return splitmix64(master_seed + trial_index * 0x9E3779B97F4A7C15ULL);
}

/// Seeded generator. All derived draws (doubles, bounded ints) are computed
/// from mt19937_64 outputs by fixed arithmetic, never through
/// implementation-defined std distributions, so results are identical on every
/// platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0,1) with 53 random bits.
  double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in [0, bound).
  std::uint64_t next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: bound must be positive");
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(engine_()) * bound) >> 64);
  }

  /// Uniform in [lo, hi] inclusive.
  int next_int(int lo, int hi) {
    if (lo > hi) throw std::invalid_argument("next_int: empty range");
    return lo + static_cast<int>(next_below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  bool next_bool(double p = 0.5) { return next_double() < p; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace lmq
