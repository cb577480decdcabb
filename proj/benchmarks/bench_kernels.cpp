#include <benchmark/benchmark.h>

#include "netbend/kernels.hpp"
#include "netbend/rng.hpp"

using namespace netbend;

namespace {

Tensor random_tensor(Shape shape, std::uint64_t seed) {
  const std::size_t n = shape_numel(shape);
  return normal_vector(seed, n).reshaped(std::move(shape));
}

}  // namespace

static void BM_Matmul(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const Tensor a = random_tensor({1, n}, 1), b = random_tensor({n, n}, 2);
  for (auto _ : state) benchmark::DoNotOptimize(matmul(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n * n));
}
BENCHMARK(BM_Matmul)->Arg(64)->Arg(256);

// Shapes of the toy generator's synthesis blocks: {in, out, resolution}.
static void BM_Conv2d(benchmark::State& state) {
  const auto c = static_cast<std::size_t>(state.range(0)), f = static_cast<std::size_t>(state.range(1));
  const auto r = static_cast<std::size_t>(state.range(2));
  const Tensor x = random_tensor({1, c, r, r}, 3), k = random_tensor({f, c, 3, 3}, 4), bias({f});
  for (auto _ : state) benchmark::DoNotOptimize(conv2d_same(x, k, bias));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(f * c * r * r * 9));
}
BENCHMARK(BM_Conv2d)->Args({64, 64, 4})->Args({64, 32, 8})->Args({32, 16, 16})->Args({16, 8, 32});

static void BM_Upsample(benchmark::State& state) {
  const Tensor x = random_tensor({1, 16, 16, 16}, 5);
  for (auto _ : state) benchmark::DoNotOptimize(upsample2x_nearest(x));
}
BENCHMARK(BM_Upsample);
