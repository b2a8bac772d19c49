#pragma once

#include <cstdint>
#include <random>

#include "secrsma/types.hpp"

namespace secrsma {

/// Deterministic random source. Stream derivation uses a splitmix64 hash of
/// (seed, index) so that realization i is unaffected by whether realization j
/// was ever drawn. Gaussian draws are hand rolled (Box-Muller) to keep the
/// byte stream identical across standard library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  /// Independent child stream for a given index; safe to call repeatedly.
  Rng stream(std::uint64_t index) const;

  std::uint64_t raw();

  /// Uniform on [0, 1).
  double uniform();

  /// Uniform on [lo, hi).
  double uniform(double lo, double hi);

  /// Standard real Gaussian.
  double normal();

  /// Circularly symmetric complex Gaussian with unit variance,
  /// E[|z|^2] = 1.
  cplx cnormal();

  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 gen_;
};

}  // namespace secrsma
