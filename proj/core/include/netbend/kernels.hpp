#pragma once

#include "netbend/tensor.hpp"

// Scalar reference kernels. Every reduction runs in f32 with a fixed,
// ascending summation order and no fused multiply-add, so results are
// bit-reproducible across builds.

namespace netbend {

/// c[i,j] = sum over t ascending of a[i,t] * b[t,j].
Tensor matmul(const Tensor& a, const Tensor& b);

/// 3x3 cross-correlation, stride 1, zero padding 1.
/// x: [N,C,H,W], kernel: [F,C,3,3], bias: [F] -> [N,F,H,W].
/// Per output: taps summed c ascending, then kernel row, then column; bias
/// added last.
Tensor conv2d_same(const Tensor& x, const Tensor& kernel, const Tensor& bias);

/// Per-pixel dense projection. x: [N,C,H,W], weight: [F,C], bias: [F].
Tensor conv1x1(const Tensor& x, const Tensor& weight, const Tensor& bias);

/// Nearest-neighbour 2x upsampling of a rank-4 tensor.
Tensor upsample2x_nearest(const Tensor& x);

Tensor add(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, float s);

/// x[n,c,h,w] + v[c]. x: [N,C,H,W], v: [C].
Tensor add_channelwise(const Tensor& x, const Tensor& v);

/// Row vector times weight plus bias: x [1,in], weight [in,out], bias [out].
Tensor dense(const Tensor& x, const Tensor& weight, const Tensor& bias);

}  // namespace netbend
