#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "netbend/activation.hpp"
#include "netbend/tensor.hpp"
#include "netbend/weight_table.hpp"

namespace netbend {

struct PatchSet;

struct GeneratorConfig {
  std::size_t latent_dim = 64;
  std::size_t mapping_layers = 4;
  std::size_t mapping_width = 64;
  std::size_t synthesis_blocks = 4;
  /// Channels of block 0; halved per block, never below 1.
  std::size_t base_channels = 64;
  std::size_t base_resolution = 4;

  /// Throws std::invalid_argument on zero counts or a non-power-of-two
  /// resolution.
  void validate() const;

  std::size_t block_channels(std::size_t block) const noexcept;
  /// Channels entering block b: block 0 reads the constant input.
  std::size_t block_input_channels(std::size_t block) const noexcept;
  std::size_t block_resolution(std::size_t block) const noexcept;
  std::size_t final_resolution() const noexcept;

  friend bool operator==(const GeneratorConfig&, const GeneratorConfig&) = default;
};

enum class Stage { kMapping, kSynthesis };
enum class LayerKind { kDense, kConv, kToRgb };

std::string_view stage_name(Stage stage) noexcept;
std::string_view layer_kind_name(LayerKind kind) noexcept;

struct LayerDescriptor {
  std::string id;
  Stage stage;
  LayerKind kind;
  /// Absent for the per-block latent projections, which are linear.
  std::optional<ActivationSpec> base_activation;
  bool enabled = true;
  std::vector<std::string> weight_names;
  Shape output_shape;
};

/// How a tensor of the manifest is initialised by random_init.
enum class WeightInit { kHe, kZero, kUnitNormal };

struct WeightSlot {
  std::string name;
  Shape shape;
  WeightInit init;
  std::size_t fan_in = 0;
};

/// Every tensor the generator needs, in canonical layer order.
std::vector<WeightSlot> weight_manifest(const GeneratorConfig& config);

/// Layer ids, in execution order:
///   map.0 .. map.{M-1}            dense, LeakyReLU(0.2)
///   map.affine.0 .. {B-1}         dense, linear; per-block latent projection
///   syn.b.conv, syn.b.torgb       per block: 3x3 conv LeakyReLU(0.2), 1x1 to
///                                 RGB with Tanh
class ModelGraph {
 public:
  const GeneratorConfig& config() const noexcept { return config_; }
  const std::vector<LayerDescriptor>& layers() const noexcept { return layers_; }
  const WeightTable& weights() const noexcept { return weights_; }
  const LayerDescriptor* find_layer(std::string_view id) const noexcept;

 private:
  friend ModelGraph build_toy_generator(const GeneratorConfig& config, WeightTable weights);

  GeneratorConfig config_;
  std::vector<LayerDescriptor> layers_;
  WeightTable weights_;
};

class WeightTableError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws WeightTableError naming the first missing or mis-shaped tensor.
ModelGraph build_toy_generator(const GeneratorConfig& config, WeightTable weights);

std::vector<LayerDescriptor> list_layers(const ModelGraph& graph);

/// Post-activation bound applied to every layer output. NaN maps to 0.
inline constexpr float kActivationClamp = 1.0e6f;

/// Called after each layer with that layer's output (or pass-through value
/// when disabled).
using LayerObserver = std::function<void(const LayerDescriptor&, const Tensor&)>;

/// Runs the generator. Returns [1, 3, R, R]. Throws PatchValidationError when
/// the patches do not validate against the graph and ShapeError when the
/// latent length is wrong.
Tensor forward(const ModelGraph& graph, const PatchSet& patches, const Tensor& latent,
               const LayerObserver& observer = {});

/// [{id, stage, kind, base_activation, enabled, output_shape}, ...]
nlohmann::json graph_to_json(const ModelGraph& graph);

}  // namespace netbend
