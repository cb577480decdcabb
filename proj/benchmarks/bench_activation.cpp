#include <benchmark/benchmark.h>

#include "netbend/activation.hpp"
#include "netbend/rng.hpp"

using namespace netbend;

static void BM_EvalTensor(benchmark::State& state) {
  const auto kind = kAllActivationKinds[static_cast<std::size_t>(state.range(0))];
  const ActivationSpec spec = ActivationSpec::with_defaults(kind);
  const Tensor x = normal_vector(7, 8 * 32 * 32);
  for (auto _ : state) benchmark::DoNotOptimize(eval_tensor(spec, x));
  state.SetLabel(std::string(kind_name(kind)));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(x.numel()));
}
BENCHMARK(BM_EvalTensor)->DenseRange(0, static_cast<int>(kAllActivationKinds.size()) - 1);

static void BM_EvalScalarWithLookup(benchmark::State& state) {
  const ActivationSpec spec = sinlu(1.0f, 2.0f);
  float x = 0.25f;
  for (auto _ : state) {
    benchmark::DoNotOptimize(eval_scalar(spec, x));
    x += 1e-3f;
  }
}
BENCHMARK(BM_EvalScalarWithLookup);

static void BM_SampleCurve(benchmark::State& state) {
  const ActivationSpec spec = poly({1.0f, 0.9f, 1.1f, 1.2f});
  for (auto _ : state) benchmark::DoNotOptimize(sample_curve(spec, -5.0f, 5.0f, 101));
}
BENCHMARK(BM_SampleCurve);
