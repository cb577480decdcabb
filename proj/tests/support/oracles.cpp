#include "oracles.hpp"

#include <cmath>
#include <stdexcept>

namespace oracle {

using netbend::ActivationKind;
using netbend::Tensor;

Tensor naive_matmul(const Tensor& a, const Tensor& b) {
  const std::size_t m = a.shape()[0], k = a.shape()[1], n = b.shape()[1];
  if (b.shape()[0] != k) throw std::invalid_argument("naive_matmul: inner mismatch");
  std::vector<float> out(m * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      float acc = 0.0f;
      for (std::size_t t = 0; t < k; ++t) {
        const float prod = a[i * k + t] * b[t * n + j];
        acc = acc + prod;
      }
      out[i * n + j] = acc;
    }
  }
  return Tensor({m, n}, out);
}

Tensor naive_conv3x3(const Tensor& x, const Tensor& k, const Tensor& bias) {
  const auto& xs = x.shape();
  const std::size_t N = xs[0], C = xs[1], H = xs[2], W = xs[3], F = k.shape()[0];
  std::vector<float> out(N * F * H * W);
  auto at = [&](std::size_t n, std::size_t c, long r, long q) -> float {
    if (r < 0 || q < 0 || r >= static_cast<long>(H) || q >= static_cast<long>(W)) return 0.0f;
    return x[((n * C + c) * H + static_cast<std::size_t>(r)) * W + static_cast<std::size_t>(q)];
  };
  for (std::size_t n = 0; n < N; ++n)
    for (std::size_t f = 0; f < F; ++f)
      for (std::size_t h = 0; h < H; ++h)
        for (std::size_t w = 0; w < W; ++w) {
          float acc = 0.0f;
          for (std::size_t c = 0; c < C; ++c)
            for (long i = 0; i < 3; ++i)
              for (long j = 0; j < 3; ++j) {
                const float tap = k[((f * C + c) * 3 + static_cast<std::size_t>(i)) * 3 + static_cast<std::size_t>(j)];
                const float prod = tap * at(n, c, static_cast<long>(h) + i - 1, static_cast<long>(w) + j - 1);
                acc = acc + prod;
              }
          out[((n * F + f) * H + h) * W + w] = acc + bias[f];
        }
  return Tensor({N, F, H, W}, out);
}

long double activation(const netbend::ActivationSpec& spec, long double x) {
  auto p = [&](const char* name) { return static_cast<long double>(spec.params.at(name)); };
  const long double sig = 1.0L / (1.0L + std::exp(-x));
  switch (spec.kind) {
    case ActivationKind::kReLU:
      return x > 0 ? x : 0.0L;
    case ActivationKind::kLeakyReLU:
      return x >= 0 ? x : p("slope") * x;
    case ActivationKind::kSigmoid:
      return sig;
    case ActivationKind::kTanh:
      return std::tanh(x);
    case ActivationKind::kSiLU:
      return x * sig;
    case ActivationKind::kSinLU:
      return (x + p("a") * std::sin(p("b") * x)) * sig;
    case ActivationKind::kReLUN:
      return std::min(std::max(0.0L, x), p("n"));
    case ActivationKind::kShiLU:
      return p("a") * (x > 0 ? x : 0.0L) + p("b");
    case ActivationKind::kPoly: {
      long double sum = 0.0L;
      for (int i = 0; i <= spec.degree; ++i) {
        sum += p(("w" + std::to_string(i)).c_str()) * std::pow(sig, static_cast<long double>(i));
      }
      return sum / std::pow(std::sqrt(2.0L), static_cast<long double>(spec.degree));
    }
  }
  throw std::invalid_argument("oracle: unknown kind");
}

std::uint64_t TestRng::next() {
  s_ ^= s_ << 13;
  s_ ^= s_ >> 7;
  s_ ^= s_ << 17;
  return s_;
}

float TestRng::uniform(float lo, float hi) {
  const double u = static_cast<double>(next() >> 11) * 0x1.0p-53;
  return static_cast<float>(lo + (hi - lo) * u);
}

Tensor TestRng::tensor(netbend::Shape shape, float lo, float hi) {
  Tensor t(std::move(shape));
  for (auto& v : t.data()) v = uniform(lo, hi);
  return t;
}

}  // namespace oracle
