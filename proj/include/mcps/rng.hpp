#pragma once

#include <cstdint>
#include <random>

namespace mcps {

/// Seedable generator with a fully specified output sequence.
///
/// std::mt19937_64 has a bit-exact sequence mandated by the standard, but the
/// std:: distributions do not, so the variate transforms live here instead.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  double uniform(double lo, double hi);
  /// Standard normal via the Box-Muller transform, one draw per call.
  double normal();
  /// Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound);
  /// +1 or -1 with equal probability.
  double sign();

private:
  std::mt19937_64 engine_;
};

/// 64-bit finalizer from SplitMix64.
std::uint64_t mix64(std::uint64_t x);

/// Derives an independent stream seed from a master seed and two coordinates.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b);

}  // namespace mcps
