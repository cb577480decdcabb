// Acceptance suite: one PASS/FAIL line per criterion, each checked against
// its runtime budget. Exit status is non-zero when any criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "fixtures.hpp"
#include "net_client.hpp"
#include "netbend/activation.hpp"
#include "netbend/base64.hpp"
#include "netbend/engine.hpp"
#include "netbend/image.hpp"
#include "netbend/kernels.hpp"
#include "netbend/patch.hpp"
#include "netbend/rng.hpp"
#include "netbend/service.hpp"
#include "netbend/weights_io.hpp"
#include "oracles.hpp"
#include "random_patches.hpp"

using namespace netbend;
using nlohmann::json;

namespace {

// A failed check carries its explanation.
struct Failure {
  std::string what;
};

// Set by a check that times its own region instead of the whole run.
double g_timed_ms = -1;

void require(bool ok, const std::string& what) {
  if (!ok) throw Failure{what};
}

std::vector<float> grid(float lo, float hi, std::size_t n) {
  std::vector<float> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = static_cast<float>(lo + (hi - lo) * static_cast<double>(i) / (n - 1));
  return xs;
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// ---------------------------------------------------------------------------

std::string activation_identities() {
  double sinlu_silu = 0, shilu_relu = 0, relun_relu = 0;
  for (float x : grid(-10, 10, 10000)) {
    sinlu_silu = std::max(sinlu_silu, std::fabs(double(eval_scalar(sinlu(0, 1.7f), x)) - eval_scalar(silu(), x)));
    shilu_relu = std::max(shilu_relu, std::fabs(double(eval_scalar(shilu(1, 0), x)) - eval_scalar(relu(), x)));
  }
  for (float x : grid(-100, 100, 10000)) {
    relun_relu = std::max(relun_relu, std::fabs(double(eval_scalar(relun(1e6f), x)) - eval_scalar(relu(), x)));
  }
  require(sinlu_silu <= 1e-7, "SinLU(a=0) vs SiLU max diff " + fmt(sinlu_silu));
  require(shilu_relu == 0, "ShiLU(1,0) vs ReLU max diff " + fmt(shilu_relu));
  require(relun_relu == 0, "ReLUN(1e6) vs ReLU max diff " + fmt(relun_relu));
  return "max diffs " + fmt(sinlu_silu) + ", " + fmt(shilu_relu) + ", " + fmt(relun_relu);
}

std::string scalar_oracles() {
  oracle::TestRng rng(20240601);
  double worst = 0;
  for (auto kind : kAllActivationKinds) {
    for (int i = 0; i < 1000; ++i) {
      const int degree = kind == ActivationKind::kPoly ? 1 + static_cast<int>(rng.below(3)) : kDefaultPolyDegree;
      ActivationSpec spec = ActivationSpec::with_defaults(kind, degree);
      for (const auto& p : param_schema(kind, degree).params) {
        float v = rng.uniform(p.soft.lo, p.soft.hi);
        if (p.soft.lo_open && v <= p.soft.lo) v = p.soft.hi;
        spec.params[p.name] = v;
      }
      const float x = rng.uniform(-5, 5);
      const double err = std::fabs(double(eval_scalar(spec, x)) - double(oracle::activation(spec, x)));
      worst = std::max(worst, err);
      require(err <= 1e-6, std::string(kind_name(kind)) + " x=" + fmt(x) + " error " + fmt(err));
    }
  }
  return "9000 triples, max abs error " + fmt(worst);
}

std::string neutral_patch() {
  const auto engine = fixtures::toy_engine(1);
  PatchSet p;
  for (const auto& layer : engine->graph().layers()) {
    p.activation_overrides[layer.id] = layer.base_activation ? *layer.base_activation : leaky_relu(1.0f);
  }
  const std::string base = encode_ppm(engine->render_image({}, 42));
  const std::string patched = encode_ppm(engine->render_image(p, 42));
  require(base == patched, "neutral patch changed the PPM");
  return "16 layers overridden, PPM byte-identical";
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(NETBEND_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string end_to_end_determinism() {
  fixtures::TempDir dir;
  const std::string w = (dir / "w.nbw").string(), a = (dir / "a.ppm").string(), b = (dir / "b.ppm").string();
  require(run_cli("init-weights --seed 1 --out '" + w + "'") == 0, "init-weights failed");
  require(run_cli("render --weights '" + w + "' --seed 7 --out '" + a + "'") == 0, "first render failed");
  require(run_cli("render --weights '" + w + "' --seed 7 --out '" + b + "'") == 0, "second render failed");
  const std::string first = fixtures::read_bytes(a);
  require(first == fixtures::read_bytes(b), "CLI renders differ");

  ServiceOptions opts;
  opts.address = "127.0.0.1";
  opts.port = 0;
  RenderService service(std::make_shared<const Engine>(build_toy_generator(GeneratorConfig{}, load(w))), opts);
  service.start();
  const auto res = netclient::post(service.port(), "/api/render", R"({"seed":7,"format":"ppm"})");
  service.stop();
  require(res.status == 200, "POST /api/render status " + std::to_string(res.status));
  require(res.body == first, "service payload differs from CLI output");
  return "CLI x2 and POST /api/render byte-identical (" + std::to_string(first.size()) + " bytes)";
}

std::string cascade_continuity() {
  const auto engine = fixtures::toy_engine(1);
  auto with = [&](float a, float b) {
    PatchSet p;
    p.activation_overrides["map.0"] = sinlu(a, b);
    return engine->render_image(p, 42).rgb;
  };
  const auto base = engine->render_image({}, 42).rgb;
  const auto bent = with(2, 3);
  std::size_t changed = 0;
  for (std::size_t i = 0; i < base.size(); ++i) changed += base[i] != bent[i];
  require(changed >= 1, "SinLU(2,3) on map.0 left the image unchanged");

  const auto zero = with(0, 3);
  std::vector<int> diffs;
  for (float a : {1.0f, 0.1f, 0.01f}) {
    const auto img = with(a, 3);
    int worst = 0;
    for (std::size_t i = 0; i < img.size(); ++i) worst = std::max(worst, std::abs(int(img[i]) - int(zero[i])));
    diffs.push_back(worst);
  }
  require(diffs[0] >= diffs[1] && diffs[1] >= diffs[2],
          "max diffs not non-increasing: " + std::to_string(diffs[0]) + ", " + std::to_string(diffs[1]) + ", " +
              std::to_string(diffs[2]));
  return std::to_string(changed) + " bytes changed; max diffs " + std::to_string(diffs[0]) + " >= " +
         std::to_string(diffs[1]) + " >= " + std::to_string(diffs[2]);
}

std::string kernel_oracles() {
  oracle::TestRng rng(6);
  for (int i = 0; i < 50; ++i) {
    const std::size_t m = 1 + rng.below(8), k = 1 + rng.below(8), n = 1 + rng.below(8);
    const Tensor a = rng.tensor({m, k}, -3, 3), b = rng.tensor({k, n}, -3, 3);
    require(matmul(a, b).bit_equal(oracle::naive_matmul(a, b)), "matmul instance " + std::to_string(i));
  }
  for (int i = 0; i < 50; ++i) {
    const std::size_t c = 1 + rng.below(4), f = 1 + rng.below(4), h = 1 + rng.below(8), w = 1 + rng.below(8);
    const Tensor x = rng.tensor({1, c, h, w}), k = rng.tensor({f, c, 3, 3}), b = rng.tensor({f});
    require(conv2d_same(x, k, b).bit_equal(oracle::naive_conv3x3(x, k, b)), "conv2d instance " + std::to_string(i));
  }
  return "50 matmul + 50 conv2d instances bit-equal";
}

std::string patch_code(std::string_view text) {
  try {
    deserialize(text);
  } catch (const PatchFormatError& e) {
    return e.code();
  }
  return "ok";
}

std::string nbw_code(const std::vector<std::uint8_t>& bytes) {
  try {
    decode_nbw(bytes);
  } catch (const WeightsIoError& e) {
    return std::string(errc_name(e.code()));
  }
  return "ok";
}

std::string round_trips() {
  const ModelGraph graph = fixtures::toy_graph(1);
  const auto ids = fixtures::layer_ids(graph);
  oracle::TestRng rng(100);
  for (int i = 0; i < 100; ++i) {
    const PatchSet p = oracle::random_patchset(rng, ids, graph.config().latent_dim);
    require(validate(p, graph).ok(), "generated PatchSet " + std::to_string(i) + " is invalid");
    const std::string text = serialize(p);
    require(deserialize(text) == p && serialize(deserialize(text)) == text, "patch round-trip " + std::to_string(i));
  }

  fixtures::TempDir dir;
  const WeightTable table = random_init(GeneratorConfig{}, 1);
  save(table, dir / "w.nbw");
  require(load(dir / "w.nbw").bit_equal(table), "NBW1 save/load not bitwise");

  const std::string empty = serialize(PatchSet{});
  require(patch_code(R"({"version":1,"activation_overrides":{"map.0":{"kind":"sinloo","params":{}}},)"
                     R"("enable_overrides":{},"latent_edits":{},"seed":null})") == "unknown_activation",
          "sinloo not reported as unknown_activation");
  require(patch_code(empty.substr(0, 20)) == "parse_error", "truncated JSON not parse_error");
  require(patch_code(R"({"version":9,"activation_overrides":{},"enable_overrides":{},"latent_edits":{},"seed":null})") ==
              "bad_version",
          "version 9 not bad_version");

  const auto good = encode_nbw(table);
  auto bad_magic = good;
  std::copy_n("XXXX", 4, bad_magic.begin());
  require(nbw_code(bad_magic) == "bad_magic", "XXXX magic not bad_magic");
  auto bad_version = good;
  bad_version[4] = 2;
  require(nbw_code(bad_version) == "bad_version", "version 2 not bad_version");
  require(nbw_code({good.begin(), good.begin() + 100}) == "truncated", "cut file not truncated");
  WeightTable one;
  one.insert("x", Tensor({1}, {1.0f}));
  auto dup = encode_nbw(one);
  dup.insert(dup.end(), dup.begin() + 12, dup.end());
  dup[8] = 2;
  require(nbw_code(dup) == "duplicate_name", "repeated tensor not duplicate_name");

  // Random damage must end in a named error or a clean result.
  std::size_t fuzzed = 0;
  for (int i = 0; i < 2000; ++i, ++fuzzed) {
    std::string text = empty;
    text[rng.below(text.size())] = static_cast<char>(rng.next());
    try {
      validate(deserialize(text), graph);
    } catch (const PatchFormatError&) {
    }
    auto bytes = encode_nbw(one);
    bytes[rng.below(bytes.size())] = static_cast<std::uint8_t>(rng.next());
    try {
      decode_nbw(bytes);
    } catch (const WeightsIoError&) {
    }
  }
  return "100 PatchSets, NBW1 bitwise, 7 named codes, " + std::to_string(fuzzed) + " fuzzed inputs";
}

std::string service_contract() {
  const auto engine = fixtures::toy_engine(1);
  ServiceOptions opts;
  opts.address = "127.0.0.1";
  opts.port = 0;
  RenderService service(engine, opts);
  service.start();
  const std::uint16_t port = service.port();

  const auto bad = netclient::post(
      port, "/api/render",
      R"({"seed":1,"patches":{"version":1,"activation_overrides":{"nope":{"kind":"relu","params":{}}},)"
      R"("enable_overrides":{},"latent_edits":{},"seed":null}})");
  require(bad.status == 400, "unknown layer status " + std::to_string(bad.status));
  require(json::parse(bad.body).at("errors")[0].at("code") == "unknown_layer", "400 body lacks unknown_layer");

  PatchSet p;
  json last;
  {
    netclient::WsClient ws(port);
    for (int seq = 1; seq <= 3; ++seq) {
      p.activation_overrides["syn.1.conv"] = shilu(1.0f + 0.25f * seq, 0.0f);
      ws.send(json{{"seq", seq}, {"patches", json::parse(serialize(p))}, {"seed", 42}}.dump());
    }
    std::uint64_t seq = 0;
    while (seq < 3) {
      last = json::parse(ws.receive());
      const auto s = last.at("seq").get<std::uint64_t>();
      require(s >= seq, "reply seq went backwards");
      seq = s;
    }
  }
  require(last.at("seq") == 3 && last.contains("image"), "final reply is not an image for seq 3");
  const auto sync = netclient::post(port, "/api/render", json{{"patches", json::parse(serialize(p))}, {"seed", 42}}.dump());
  service.stop();
  require(base64_decode(last.at("image").get<std::string>()) == sync.body, "live payload differs from POST");
  return "400 unknown_layer; burst final seq 3 equals POST payload";
}

std::string realtime_budget() {
  const auto engine = fixtures::toy_engine(1);
  const RenderRequest req{{}, 42, ImageFormat::kPpm};
  engine->render(req);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const auto start = std::chrono::steady_clock::now();
    const RenderOutcome out = engine->render(req);
    const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    require(out.ok() && !out.payload.empty(), "render failed");
    worst = std::max(worst, ms);
  }
  g_timed_ms = worst;
  return "slowest of 20 renders (forward + quantize + PPM)";
}

struct Criterion {
  int id;
  const char* name;
  double budget_ms;
  std::function<std::string()> check;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "activation identities", 1000, activation_identities},
      {2, "scalar oracles", 5000, scalar_oracles},
      {3, "neutral-patch invariance", 2000, neutral_patch},
      {4, "end-to-end determinism", 5000, end_to_end_determinism},
      {5, "cascade and continuity", 5000, cascade_continuity},
      {6, "kernel oracles", 5000, kernel_oracles},
      {7, "round-trips and malformed inputs", 5000, round_trips},
      {8, "service contract", 5000, service_contract},
      {9, "real-time render budget", 100, realtime_budget},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    g_timed_ms = -1;
    const auto start = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    try {
      detail = c.check();
    } catch (const Failure& f) {
      ok = false;
      detail = f.what;
    } catch (const std::exception& e) {
      ok = false;
      detail = std::string("exception: ") + e.what();
    }
    double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
    if (g_timed_ms >= 0) ms = g_timed_ms;
    if (ok && ms >= c.budget_ms) {
      ok = false;
      detail += "; over budget";
    }
    failures += !ok;
    std::printf("%s  %d  %-34s %8.1f ms (budget %.0f ms)  %s\n", ok ? "PASS" : "FAIL", c.id, c.name, ms, c.budget_ms,
                detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
