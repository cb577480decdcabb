// netbend: render, sweep, plot, init-weights and serve from the command line.
//
// Exit codes: 0 success, 1 I/O or environment failure, 2 invalid input
// (patch validation, malformed patch file, bad activation spec).

#include <charconv>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "CLI11.hpp"

#include "netbend/activation.hpp"
#include "netbend/engine.hpp"
#include "netbend/format.hpp"
#include "netbend/image.hpp"
#include "netbend/model.hpp"
#include "netbend/patch.hpp"
#include "netbend/service.hpp"
#include "netbend/weights_io.hpp"

namespace fs = std::filesystem;
using namespace netbend;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitIo = 1;
constexpr int kExitInvalid = 2;

struct IoFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InputFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelOptions {
  std::string weights;
  std::uint64_t init_seed = 0;
};

void add_model_options(CLI::App* cmd, ModelOptions& opts) {
  cmd->add_option("--weights", opts.weights, "NBW1 weight file (default: random init)");
  cmd->add_option("--init-seed", opts.init_seed, "Seed for random weights when --weights is absent");
}

std::shared_ptr<const Engine> make_engine(const ModelOptions& opts) {
  const GeneratorConfig config;
  WeightTable table;
  if (opts.weights.empty()) {
    table = random_init(config, opts.init_seed);
  } else {
    std::vector<std::string> warnings;
    table = load(opts.weights, &warnings);
    for (const auto& w : warnings) std::cerr << "warning: " << opts.weights << ": " << w << '\n';
  }
  return std::make_shared<const Engine>(build_toy_generator(config, std::move(table)));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoFailure("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoFailure("cannot write " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoFailure("write failed for " + path);
}

PatchSet read_patch(const std::string& path) {
  if (path.empty()) return {};
  const std::string text = read_file(path);
  try {
    return deserialize(text);
  } catch (const PatchFormatError& e) {
    throw InputFailure(path + ": " + e.what());
  }
}

ImageFormat resolve_format(const std::string& requested, const std::string& out) {
  if (!requested.empty()) {
    auto f = parse_format(requested);
    if (!f) throw InputFailure("unknown format '" + requested + "' (expected ppm or png)");
    return *f;
  }
  return fs::path(out).extension() == ".png" ? ImageFormat::kPng : ImageFormat::kPpm;
}

// "a=1,b=2" or separate "a=1" "b=2" tokens.
std::map<std::string, float> parse_assignments(const std::vector<std::string>& tokens) {
  std::map<std::string, float> out;
  for (const auto& token : tokens) {
    std::stringstream ss(token);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (item.empty()) continue;
      const auto eq = item.find('=');
      if (eq == std::string::npos || eq == 0) throw InputFailure("expected name=value, got '" + item + "'");
      const std::string name = item.substr(0, eq), text = item.substr(eq + 1);
      float value = 0.0f;
      auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
      if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw InputFailure("parameter " + name + ": '" + text + "' is not a number");
      }
      out[name] = value;
    }
  }
  return out;
}

// Schema defaults overlaid with explicit assignments.
ActivationSpec make_spec(const std::string& kind_text, int degree, const std::vector<std::string>& params) {
  const auto kind = parse_kind(kind_text);
  if (!kind) throw InputFailure("unknown activation '" + kind_text + "'");
  if (*kind == ActivationKind::kPoly && (degree < kMinPolyDegree || degree > kMaxPolyDegree)) {
    throw InputFailure("poly degree must be 1..3");
  }
  ActivationSpec spec = ActivationSpec::with_defaults(*kind, degree);
  for (const auto& [name, value] : parse_assignments(params)) spec.params[name] = value;
  if (SpecCheck check = validate(spec); !check.ok()) throw InvalidSpecError(std::move(check.errors));
  return spec;
}

void print_report(const ValidationReport& report) {
  for (const auto& e : report.errors) std::cerr << "error: " << e.code << ": " << e.message << '\n';
  for (const auto& w : report.warnings) std::cerr << "warning: " << w.code << ": " << w.message << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"netbend: parametric-activation network bending workbench"};
  app.require_subcommand(1);

  // render
  ModelOptions render_model;
  std::uint64_t render_seed = 0;
  std::string render_patch, render_out, render_format;
  auto* render = app.add_subcommand("render", "Render one image");
  add_model_options(render, render_model);
  render->add_option("--seed", render_seed, "Latent seed (overridden by a seed in the patch)");
  render->add_option("--patch", render_patch, "Patch config file");
  render->add_option("--out", render_out, "Output image path")->required();
  render->add_option("--format", render_format, "ppm or png (default: from --out extension)");

  // sweep
  ModelOptions sweep_model;
  SweepRequest sweep_req;
  std::string sweep_patch, sweep_out, sweep_format, sweep_kind;
  std::vector<std::string> sweep_params;
  int sweep_degree = kDefaultPolyDegree;
  auto* sweep = app.add_subcommand("sweep", "Sweep one activation parameter into a horizontal grid");
  add_model_options(sweep, sweep_model);
  sweep->add_option("--seed", sweep_req.seed, "Latent seed");
  sweep->add_option("--patch", sweep_patch, "Base patch config applied to every cell");
  sweep->add_option("--layer", sweep_req.layer_id, "Layer id to override")->required();
  sweep->add_option("--activation", sweep_kind, "Activation kind")->required();
  sweep->add_option("--degree", sweep_degree, "Poly degree (1..3)");
  sweep->add_option("--params", sweep_params, "Fixed parameters, name=value");
  sweep->add_option("--param", sweep_req.param, "Parameter to sweep")->required();
  sweep->add_option("--from", sweep_req.from, "First value")->required();
  sweep->add_option("--to", sweep_req.to, "Last value")->required();
  sweep->add_option("--steps", sweep_req.steps, "Number of swept cells (>= 2)")->required();
  sweep->add_option("--out", sweep_out, "Output grid image")->required();
  sweep->add_option("--format", sweep_format, "ppm or png (default: from --out extension)");

  // plot
  std::string plot_kind, plot_out;
  std::vector<std::string> plot_params;
  std::vector<float> plot_range;
  std::size_t plot_points = 101;
  int plot_degree = kDefaultPolyDegree;
  auto* plot = app.add_subcommand("plot", "Sample an activation curve to CSV");
  plot->add_option("--activation", plot_kind, "Activation kind")->required();
  plot->add_option("--degree", plot_degree, "Poly degree (1..3)");
  plot->add_option("--params", plot_params, "Parameters, name=value");
  plot->add_option("--range", plot_range, "x_min x_max")->expected(2)->required();
  plot->add_option("--points", plot_points, "Number of samples (>= 2)");
  plot->add_option("--out", plot_out, "Output CSV path")->required();

  // init-weights
  std::uint64_t init_seed = 0;
  std::string init_out;
  auto* init = app.add_subcommand("init-weights", "Write seeded random weights as NBW1");
  init->add_option("--seed", init_seed, "Weight seed")->required();
  init->add_option("--out", init_out, "Output path")->required();

  // serve
  ServiceOptions serve_opts;
  std::string serve_weights;
  std::uint64_t serve_seed = 0;
  auto* serve = app.add_subcommand("serve", "Run the HTTP + WebSocket render service");
  serve->add_option("--port", serve_opts.port, "Listen port")->default_val(kDefaultPort);
  serve->add_option("--address", serve_opts.address, "Listen address")->default_val("0.0.0.0");
  serve->add_option("--weights", serve_weights, "NBW1 weight file");
  serve->add_option("--seed", serve_seed, "Seed for random weights when --weights is absent");
  serve->add_option("--threads", serve_opts.render_threads, "Render workers (0: one per core)");

  // layers
  std::string layers_weights;
  auto* layers = app.add_subcommand("layers", "Print the model graph description as JSON");
  layers->add_option("--weights", layers_weights, "NBW1 weight file (default: random init)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // --help exits 0; bad arguments are invalid input.
    return app.exit(e) == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*render) {
      const auto engine = make_engine(render_model);
      const PatchSet patches = read_patch(render_patch);
      const RenderOutcome outcome = engine->render({patches, render_seed, resolve_format(render_format, render_out)});
      print_report(outcome.report);
      if (!outcome.ok()) return kExitInvalid;
      write_file(render_out, outcome.payload);
    } else if (*sweep) {
      const auto engine = make_engine(sweep_model);
      sweep_req.base = read_patch(sweep_patch);
      sweep_req.activation = make_spec(sweep_kind, sweep_degree, sweep_params);
      const ImageFormat fmt = resolve_format(sweep_format, sweep_out);
      if (sweep_req.steps < 2) throw InputFailure("--steps must be >= 2");
      if (!sweep_req.activation.params.contains(sweep_req.param)) {
        throw InputFailure("activation " + sweep_kind + " has no parameter '" + sweep_req.param + "'");
      }
      write_file(sweep_out, encode(render_sweep(*engine, sweep_req), fmt));
    } else if (*plot) {
      const ActivationSpec spec = make_spec(plot_kind, plot_degree, plot_params);
      if (!(plot_range[0] < plot_range[1])) throw InputFailure("--range needs x_min < x_max");
      if (plot_points < 2) throw InputFailure("--points must be >= 2");
      std::string csv = "x,y\n";
      for (const auto& p : sample_curve(spec, plot_range[0], plot_range[1], plot_points)) {
        csv += format_float(p.x) + "," + format_float(p.y) + "\n";
      }
      write_file(plot_out, csv);
    } else if (*init) {
      save(random_init(GeneratorConfig{}, init_seed), init_out);
    } else if (*serve) {
      const auto engine = make_engine({serve_weights, serve_seed});
      serve_opts.handle_signals = true;
      RenderService service(engine, serve_opts);
      service.start();
      std::cerr << "netbend: serving on " << serve_opts.address << ":" << service.port() << '\n';
      service.wait();
      service.stop();
    } else if (*layers) {
      const auto engine = make_engine({layers_weights, 0});
      std::cout << graph_to_json(engine->graph()).dump(2) << '\n';
    }
  } catch (const PatchValidationError& e) {
    print_report(e.report());
    return kExitInvalid;
  } catch (const InvalidSpecError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const InputFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInvalid;
  } catch (const IoFailure& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const WeightsIoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const WeightTableError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ServiceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitIo;
  }
  return kExitOk;
}
