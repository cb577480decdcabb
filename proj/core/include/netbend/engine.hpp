#pragma once

#include <cstdint>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "netbend/image.hpp"
#include "netbend/model.hpp"
#include "netbend/patch.hpp"

namespace netbend {

struct RenderRequest {
  PatchSet patches;
  /// Latent seed, used when the patches carry none.
  std::uint64_t seed = 0;
  ImageFormat format = ImageFormat::kPpm;
};

/// Parses {"patches": <patch document>, "seed": u64, "format": "ppm"|"png"}.
/// "patches" defaults to the empty set, "seed" to 0, "format" to ppm.
/// Throws PatchFormatError.
RenderRequest parse_render_request(const nlohmann::json& body);

struct RenderOutcome {
  ValidationReport report;
  /// Encoded image; empty when validation failed.
  std::string payload;
  ImageFormat format = ImageFormat::kPpm;
  double render_ms = 0.0;

  bool ok() const noexcept { return report.ok(); }
};

/// The single render path shared by the CLI and the service. Holds an
/// immutable graph; every method is safe to call concurrently.
class Engine {
 public:
  explicit Engine(ModelGraph graph) : graph_(std::move(graph)) {}

  const ModelGraph& graph() const noexcept { return graph_; }

  /// Throws PatchValidationError.
  ImageBuffer render_image(const PatchSet& patches, std::uint64_t seed) const;

  /// Validation failures come back in the outcome rather than as exceptions.
  RenderOutcome render(const RenderRequest& request) const;

 private:
  ModelGraph graph_;
};

/// A one-parameter sweep rendered as a horizontal strip whose leftmost cell
/// is the render of `base` alone.
struct SweepRequest {
  PatchSet base;
  std::string layer_id;
  /// Template for the override; `param` is overwritten per cell.
  ActivationSpec activation;
  std::string param;
  float from = 0.0f;
  float to = 0.0f;
  std::size_t steps = 2;
  std::uint64_t seed = 0;
};

/// Value of cell i: from + (to - from) * i / (steps - 1), evaluated in f64.
float sweep_value(const SweepRequest& request, std::size_t i) noexcept;

/// Grid of (steps + 1) cells. Throws std::invalid_argument for steps < 2 or a
/// parameter the activation does not have, PatchValidationError otherwise.
ImageBuffer render_sweep(const Engine& engine, const SweepRequest& request);

}  // namespace netbend
