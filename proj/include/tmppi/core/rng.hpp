#pragma once

#include <array>
#include <cstdint>

#include "tmppi/core/types.hpp"

namespace tmppi {

/// Deterministic generator keyed by (seed, stream).
///
/// Built on xoshiro256** seeded through SplitMix64, with our own uniform and
/// Box-Muller transforms so the draw sequence does not depend on the standard
/// library implementation. Child streams are derived by hashing, so sample k of
/// iteration t can be given `base.fork(t).fork(k)` and be reproduced on any
/// thread in any order.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// Independent generator for a sub-stream; does not advance *this.
  SeededRng fork(std::uint64_t sub_stream) const;

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Unbiased integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal draw.
  double normal();

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::array<std::uint64_t, 4> s_{};
  double spare_normal_ = 0.0;
  bool has_spare_ = false;
};

std::uint64_t splitmix64(std::uint64_t& state);
std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b);

/// mean + eps, eps ~ N(0, cov) componentwise. Unclamped.
ControlInput sample_gaussian(SeededRng& rng, const ControlInput& mean, const DiagonalCovariance& cov);

}  // namespace tmppi
