#pragma once

#include <cstdint>
#include <random>

namespace pce {

/// Mixes a base seed with a stream index (trial, column, phase) into an
/// independent 64-bit seed. SplitMix64 finalizer; stable across platforms.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Seedable generator with platform-independent output.
///
/// The engine is std::mt19937_64, whose sequence is fixed by the standard. The
/// distributions are implemented here because the standard library ones are
/// implementation-defined:
///   uniform01  = (next >> 11) * 2^-53, in [0, 1)
///   normal     = Box-Muller on (1 - u1, u2), cosine branch only (one engine
///                pair per deviate)
///   index(n)   = rejection sampling on the top bits, unbiased
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  double uniform01();
  double uniform(double low, double high);
  double normal();
  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n);

 private:
  std::mt19937_64 engine_;
};

}  // namespace pce
