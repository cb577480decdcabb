#pragma once

// Straight-line reference implementations used as test oracles. They share
// no code with the library.

#include <cstdint>
#include <vector>

#include "netbend/activation.hpp"
#include "netbend/tensor.hpp"

namespace oracle {

// Triple loop, f32 accumulator, t ascending.
netbend::Tensor naive_matmul(const netbend::Tensor& a, const netbend::Tensor& b);

// Direct summation over every tap with explicit bounds checks.
netbend::Tensor naive_conv3x3(const netbend::Tensor& x, const netbend::Tensor& k, const netbend::Tensor& bias);

// Activation formulas in long double.
long double activation(const netbend::ActivationSpec& spec, long double x);

// Small xorshift generator for building random test inputs.
class TestRng {
 public:
  explicit TestRng(std::uint64_t seed) : s_(seed ? seed : 0x9E3779B97F4A7C15ull) {}
  std::uint64_t next();
  // Uniform in [lo, hi).
  float uniform(float lo, float hi);
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(next() % n); }
  netbend::Tensor tensor(netbend::Shape shape, float lo = -1.0f, float hi = 1.0f);

 private:
  std::uint64_t s_;
};

}  // namespace oracle
