#include "netbend/engine.hpp"

#include <chrono>

#include <nlohmann/json.hpp>

namespace netbend {

RenderRequest parse_render_request(const nlohmann::json& body) {
  if (!body.is_object()) throw PatchFormatError("bad_type", "render request must be a JSON object");
  RenderRequest req;
  for (const auto& [key, value] : body.items()) {
    if (key == "patches") {
      if (!value.is_null()) req.patches = patchset_from_json(value);
    } else if (key == "seed") {
      if (value.is_number_unsigned()) {
        req.seed = value.get<std::uint64_t>();
      } else if (value.is_number_integer() && value.get<std::int64_t>() >= 0) {
        req.seed = static_cast<std::uint64_t>(value.get<std::int64_t>());
      } else {
        throw PatchFormatError("bad_type", "seed must be a non-negative 64-bit integer");
      }
    } else if (key == "format") {
      const auto fmt = value.is_string() ? parse_format(value.get<std::string>()) : std::nullopt;
      if (!fmt) throw PatchFormatError("bad_type", "format must be \"ppm\" or \"png\"");
      req.format = *fmt;
    } else {
      throw PatchFormatError("unknown_key", "unknown render request key '" + key + "'");
    }
  }
  return req;
}

ImageBuffer Engine::render_image(const PatchSet& patches, std::uint64_t seed) const {
  if (ValidationReport report = validate(patches, graph_); !report.ok()) {
    throw PatchValidationError(std::move(report));
  }
  const Tensor latent = effective_latent(patches, seed, graph_.config().latent_dim);
  return to_image(forward(graph_, patches, latent));
}

RenderOutcome Engine::render(const RenderRequest& request) const {
  const auto start = std::chrono::steady_clock::now();
  RenderOutcome outcome;
  outcome.format = request.format;
  outcome.report = validate(request.patches, graph_);
  if (!outcome.report.ok()) return outcome;
  const Tensor latent = effective_latent(request.patches, request.seed, graph_.config().latent_dim);
  outcome.payload = encode(to_image(forward(graph_, request.patches, latent)), request.format);
  outcome.render_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return outcome;
}

float sweep_value(const SweepRequest& request, std::size_t i) noexcept {
  if (request.steps < 2) return request.from;
  const double from = request.from, to = request.to;
  return static_cast<float>(from + (to - from) * static_cast<double>(i) / static_cast<double>(request.steps - 1));
}

ImageBuffer render_sweep(const Engine& engine, const SweepRequest& request) {
  if (request.steps < 2) throw std::invalid_argument("sweep needs at least 2 steps");
  if (!request.activation.params.contains(request.param)) {
    throw std::invalid_argument("activation " + std::string(kind_name(request.activation.kind)) +
                                " has no parameter '" + request.param + "'");
  }
  std::vector<ImageBuffer> cells;
  cells.reserve(request.steps + 1);
  cells.push_back(engine.render_image(request.base, request.seed));
  for (std::size_t i = 0; i < request.steps; ++i) {
    PatchSet patches = request.base;
    ActivationSpec spec = request.activation;
    spec.params[request.param] = sweep_value(request, i);
    patches.activation_overrides[request.layer_id] = std::move(spec);
    cells.push_back(engine.render_image(patches, request.seed));
  }
  return hconcat(cells);
}

}  // namespace netbend
