#pragma once

#include <cstdint>

#include "netbend/tensor.hpp"

namespace netbend {

/// splitmix64 stream. Standard normals come from Box-Muller evaluated in
/// f64 on two uniforms and rounded to f32:
///   u1 = ((next() >> 11) + 1) * 2^-53   in (0, 1]
///   u2 =  (next() >> 11)      * 2^-53   in [0, 1)
///   r = sqrt(-2 ln u1), z0 = r cos(2 pi u2), z1 = r sin(2 pi u2)
class DeterministicRng {
 public:
  explicit DeterministicRng(std::uint64_t seed) noexcept : state_(seed) {}

  std::uint64_t next_u64() noexcept;

  /// One Box-Muller pair; consumes exactly two uniforms.
  struct NormalPair {
    double first;
    double second;
  };
  NormalPair normal_pair() noexcept;

  std::uint64_t state() const noexcept { return state_; }

 private:
  std::uint64_t state_;
};

/// n standard-normal draws. Draws come in pairs; for odd n the unused second
/// value of the last pair is discarded.
Tensor normal_vector(DeterministicRng& rng, std::size_t n);
Tensor normal_vector(std::uint64_t seed, std::size_t n);

}  // namespace netbend
