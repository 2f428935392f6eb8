#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace studentrisk {

/// Deterministic random source used by every stochastic routine in the
/// library. All draws go through the methods below; none of the
/// distribution adaptors from <random> are used, because their output is
/// not pinned down by the standard. std::mt19937_64 itself produces an
/// implementation-independent stream, so two builds given the same seed
/// produce bit-identical results.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(scramble(seed)) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform integer in [0, bound) via rejection sampling, so every value
  /// is exactly equally likely. bound must be positive.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = (UINT64_MAX / bound) * bound;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % bound;
  }

  /// Uniform integer in [lo, hi], both ends inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(
                    below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform_real() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Fisher-Yates shuffle, iterating from the back of the vector.
  template <class T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  /// Independent child stream. Derived from the seed this Rng was
  /// constructed with, not from its current state, so child(k) yields the
  /// same stream no matter how many draws the parent has made.
  Rng child(std::uint64_t stream) const {
    return Rng(scramble(seed_ ^ scramble(stream + 0x9E3779B97F4A7C15ULL)));
  }

 private:
  // splitmix64 finalizer; spreads low-entropy seeds across all 64 bits.
  static std::uint64_t scramble(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace studentrisk
