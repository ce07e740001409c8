#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace kac {

/// One SplitMix64 step; advances state and returns a well-mixed 64-bit value.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed for a sub-stream identified by a tag path, e.g. {stream, N, replica}.
/// Distinct tag paths give independent-looking seeds; the mapping is fixed.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> tags);

/// Deterministic generator used by every simulation. The draw helpers below
/// do not go through <random> distributions, so streams are stable across
/// standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 0) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n), unbiased (Lemire's method).
  std::uint64_t index(std::uint64_t n);

  /// Exponential waiting time with the given positive rate.
  double exponential(double rate);

  /// Standard normal via polar Box-Muller (no cached spare).
  double normal();

  friend bool operator==(const Rng& a, const Rng& b) { return a.engine_ == b.engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace kac
