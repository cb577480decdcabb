#include <benchmark/benchmark.h>

#include "netbend/engine.hpp"
#include "netbend/patch.hpp"
#include "netbend/weights_io.hpp"

using namespace netbend;

namespace {

const Engine& engine() {
  static const Engine e(build_toy_generator(GeneratorConfig{}, random_init(GeneratorConfig{}, 1)));
  return e;
}

}  // namespace

static void BM_ForwardBaseline(benchmark::State& state) {
  const Tensor z = effective_latent({}, 42, 64);
  for (auto _ : state) benchmark::DoNotOptimize(forward(engine().graph(), {}, z));
}
BENCHMARK(BM_ForwardBaseline)->Unit(benchmark::kMillisecond);

static void BM_Render(benchmark::State& state) {
  PatchSet p;
  p.activation_overrides["map.0"] = sinlu(2.0f, 3.0f);
  p.activation_overrides["syn.2.conv"] = poly({1.0f, 0.9f, 1.1f, 1.2f});
  const RenderRequest req{p, 42, static_cast<ImageFormat>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(engine().render(req));
  state.SetLabel(std::string(format_name(req.format)));
}
BENCHMARK(BM_Render)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_PatchRoundTrip(benchmark::State& state) {
  PatchSet p;
  for (const auto& layer : engine().graph().layers()) p.activation_overrides[layer.id] = shilu(1.25f, -0.5f);
  p.latent_edits = LatentReplacement(64, 0.5f);
  for (auto _ : state) benchmark::DoNotOptimize(deserialize(serialize(p)));
}
BENCHMARK(BM_PatchRoundTrip);
