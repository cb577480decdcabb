#include "netbend/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace netbend {

std::uint64_t DeterministicRng::next_u64() noexcept {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

DeterministicRng::NormalPair DeterministicRng::normal_pair() noexcept {
  constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53
  const double u1 = static_cast<double>((next_u64() >> 11) + 1) * kInv53;
  const double u2 = static_cast<double>(next_u64() >> 11) * kInv53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  return {r * std::cos(theta), r * std::sin(theta)};
}

Tensor normal_vector(DeterministicRng& rng, std::size_t n) {
  if (n == 0) throw std::invalid_argument("normal_vector: n must be >= 1");
  std::vector<float> out;
  out.reserve(n + 1);
  while (out.size() < n) {
    const auto [a, b] = rng.normal_pair();
    out.push_back(static_cast<float>(a));
    if (out.size() < n) out.push_back(static_cast<float>(b));
  }
  return Tensor({n}, std::move(out));
}

Tensor normal_vector(std::uint64_t seed, std::size_t n) {
  DeterministicRng rng(seed);
  return normal_vector(rng, n);
}

}  // namespace netbend
