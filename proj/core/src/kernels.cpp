#include "netbend/kernels.hpp"

#include <algorithm>

namespace netbend {

namespace {

void require_rank(const Tensor& t, std::size_t rank, const char* what) {
  if (t.rank() != rank) {
    throw ShapeError(std::string(what) + ": expected rank " + std::to_string(rank) + ", got shape " +
                     shape_to_string(t.shape()));
  }
}

[[noreturn]] void mismatch(const char* what, const Tensor& a, const Tensor& b) {
  throw ShapeError(std::string(what) + ": shape mismatch " + shape_to_string(a.shape()) + " vs " +
                   shape_to_string(b.shape()));
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_rank(a, 2, "matmul");
  require_rank(b, 2, "matmul");
  const std::size_t m = a.extent(0), k = a.extent(1), n = b.extent(1);
  if (b.extent(0) != k) mismatch("matmul", a, b);

  Tensor c({m, n});
  auto A = a.data();
  auto B = b.data();
  auto C = c.data();
  // Row of C accumulated t-major; each element still sees t ascending.
  for (std::size_t i = 0; i < m; ++i) {
    float* crow = C.data() + i * n;
    for (std::size_t t = 0; t < k; ++t) {
      const float av = A[i * k + t];
      const float* brow = B.data() + t * n;
      for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
    }
  }
  return c;
}

Tensor conv2d_same(const Tensor& x, const Tensor& kernel, const Tensor& bias) {
  require_rank(x, 4, "conv2d_same");
  require_rank(kernel, 4, "conv2d_same kernel");
  require_rank(bias, 1, "conv2d_same bias");
  const std::size_t N = x.extent(0), C = x.extent(1), H = x.extent(2), W = x.extent(3);
  const std::size_t F = kernel.extent(0);
  if (kernel.extent(1) != C || kernel.extent(2) != 3 || kernel.extent(3) != 3) mismatch("conv2d_same", x, kernel);
  if (bias.extent(0) != F) mismatch("conv2d_same bias", kernel, bias);

  Tensor out({N, F, H, W});
  auto X = x.data();
  auto K = kernel.data();
  auto O = out.data();
  const std::ptrdiff_t h = static_cast<std::ptrdiff_t>(H), w = static_cast<std::ptrdiff_t>(W);

  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t f = 0; f < F; ++f) {
      float* plane = O.data() + (n * F + f) * H * W;
      for (std::size_t c = 0; c < C; ++c) {
        const float* in = X.data() + (n * C + c) * H * W;
        for (std::ptrdiff_t ky = 0; ky < 3; ++ky) {
          for (std::ptrdiff_t kx = 0; kx < 3; ++kx) {
            const float wt = K[((f * C + c) * 3 + static_cast<std::size_t>(ky)) * 3 + static_cast<std::size_t>(kx)];
            const std::ptrdiff_t dy = ky - 1, dx = kx - 1;
            const std::ptrdiff_t y0 = std::max<std::ptrdiff_t>(0, -dy), y1 = std::min(h, h - dy);
            const std::ptrdiff_t x0 = std::max<std::ptrdiff_t>(0, -dx), x1 = std::min(w, w - dx);
            for (std::ptrdiff_t yy = y0; yy < y1; ++yy) {
              float* orow = plane + yy * w;
              const float* irow = in + (yy + dy) * w + dx;
              for (std::ptrdiff_t xx = x0; xx < x1; ++xx) orow[xx] += wt * irow[xx];
            }
          }
        }
      }
      const float b = bias[f];
      for (std::size_t p = 0; p < H * W; ++p) plane[p] += b;
    }
  }
  return out;
}

Tensor conv1x1(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require_rank(x, 4, "conv1x1");
  require_rank(weight, 2, "conv1x1 weight");
  require_rank(bias, 1, "conv1x1 bias");
  const std::size_t N = x.extent(0), C = x.extent(1), P = x.extent(2) * x.extent(3);
  const std::size_t F = weight.extent(0);
  if (weight.extent(1) != C) mismatch("conv1x1", x, weight);
  if (bias.extent(0) != F) mismatch("conv1x1 bias", weight, bias);

  Tensor out({N, F, x.extent(2), x.extent(3)});
  auto X = x.data();
  auto Wt = weight.data();
  auto O = out.data();
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t f = 0; f < F; ++f) {
      float* plane = O.data() + (n * F + f) * P;
      for (std::size_t c = 0; c < C; ++c) {
        const float wt = Wt[f * C + c];
        const float* in = X.data() + (n * C + c) * P;
        for (std::size_t p = 0; p < P; ++p) plane[p] += wt * in[p];
      }
      const float b = bias[f];
      for (std::size_t p = 0; p < P; ++p) plane[p] += b;
    }
  }
  return out;
}

Tensor upsample2x_nearest(const Tensor& x) {
  require_rank(x, 4, "upsample2x_nearest");
  const std::size_t N = x.extent(0), C = x.extent(1), H = x.extent(2), W = x.extent(3);
  Tensor out({N, C, 2 * H, 2 * W});
  auto X = x.data();
  auto O = out.data();
  for (std::size_t plane = 0; plane < N * C; ++plane) {
    const float* in = X.data() + plane * H * W;
    float* o = O.data() + plane * 4 * H * W;
    for (std::size_t y = 0; y < 2 * H; ++y) {
      for (std::size_t xx = 0; xx < 2 * W; ++xx) o[y * 2 * W + xx] = in[(y / 2) * W + xx / 2];
    }
  }
  return out;
}

Tensor add(const Tensor& a, const Tensor& b) {
  if (a.shape() != b.shape()) mismatch("add", a, b);
  Tensor out(a.shape());
  auto A = a.data();
  auto B = b.data();
  auto O = out.data();
  for (std::size_t i = 0; i < O.size(); ++i) O[i] = A[i] + B[i];
  return out;
}

Tensor scale(const Tensor& a, float s) {
  Tensor out(a.shape());
  auto A = a.data();
  auto O = out.data();
  for (std::size_t i = 0; i < O.size(); ++i) O[i] = A[i] * s;
  return out;
}

Tensor add_channelwise(const Tensor& x, const Tensor& v) {
  require_rank(x, 4, "add_channelwise");
  require_rank(v, 1, "add_channelwise vector");
  const std::size_t N = x.extent(0), C = x.extent(1), P = x.extent(2) * x.extent(3);
  if (v.extent(0) != C) mismatch("add_channelwise", x, v);
  Tensor out(x.shape());
  auto X = x.data();
  auto O = out.data();
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t c = 0; c < C; ++c) {
      const std::size_t base = (n * C + c) * P;
      for (std::size_t p = 0; p < P; ++p) O[base + p] = X[base + p] + v[c];
    }
  }
  return out;
}

Tensor dense(const Tensor& x, const Tensor& weight, const Tensor& bias) {
  require_rank(bias, 1, "dense bias");
  Tensor y = matmul(x, weight);
  if (bias.extent(0) != y.extent(1)) mismatch("dense bias", weight, bias);
  auto Y = y.data();
  const std::size_t n = y.extent(1);
  for (std::size_t i = 0; i < y.extent(0); ++i) {
    for (std::size_t j = 0; j < n; ++j) Y[i * n + j] += bias[j];
  }
  return y;
}

}  // namespace netbend
