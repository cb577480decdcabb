#include "netbend/model.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "netbend/kernels.hpp"
#include "netbend/patch.hpp"

namespace netbend {

void GeneratorConfig::validate() const {
  if (latent_dim == 0 || mapping_layers == 0 || mapping_width == 0 || synthesis_blocks == 0 ||
      base_channels == 0 || base_resolution == 0) {
    throw std::invalid_argument("generator config: all counts must be >= 1");
  }
  if ((base_resolution & (base_resolution - 1)) != 0) {
    throw std::invalid_argument("generator config: base_resolution must be a power of two");
  }
  if (synthesis_blocks > 16) throw std::invalid_argument("generator config: too many synthesis blocks");
}

std::size_t GeneratorConfig::block_channels(std::size_t block) const noexcept {
  return std::max<std::size_t>(1, base_channels >> block);
}

std::size_t GeneratorConfig::block_input_channels(std::size_t block) const noexcept {
  return block == 0 ? block_channels(0) : block_channels(block - 1);
}

std::size_t GeneratorConfig::block_resolution(std::size_t block) const noexcept {
  return base_resolution << block;
}

std::size_t GeneratorConfig::final_resolution() const noexcept {
  return block_resolution(synthesis_blocks - 1);
}

std::string_view stage_name(Stage stage) noexcept {
  return stage == Stage::kMapping ? "mapping" : "synthesis";
}

std::string_view layer_kind_name(LayerKind kind) noexcept {
  switch (kind) {
    case LayerKind::kDense:
      return "dense";
    case LayerKind::kConv:
      return "conv";
    case LayerKind::kToRgb:
      return "torgb";
  }
  return "unknown";
}

namespace {

std::string map_id(std::size_t k) { return "map." + std::to_string(k); }
std::string affine_id(std::size_t b) { return "map.affine." + std::to_string(b); }
std::string conv_id(std::size_t b) { return "syn." + std::to_string(b) + ".conv"; }
std::string torgb_id(std::size_t b) { return "syn." + std::to_string(b) + ".torgb"; }
constexpr const char* kConstName = "syn.const";

constexpr float kBaseLeakySlope = 0.2f;

std::vector<LayerDescriptor> describe_layers(const GeneratorConfig& cfg) {
  std::vector<LayerDescriptor> layers;
  const std::size_t w = cfg.mapping_width;
  for (std::size_t k = 0; k < cfg.mapping_layers; ++k) {
    const std::string id = map_id(k);
    layers.push_back({id, Stage::kMapping, LayerKind::kDense, leaky_relu(kBaseLeakySlope), true,
                      {id + ".weight", id + ".bias"}, {1, w}});
  }
  for (std::size_t b = 0; b < cfg.synthesis_blocks; ++b) {
    const std::string id = affine_id(b);
    layers.push_back({id, Stage::kMapping, LayerKind::kDense, std::nullopt, true,
                      {id + ".weight", id + ".bias"}, {1, cfg.block_input_channels(b)}});
  }
  for (std::size_t b = 0; b < cfg.synthesis_blocks; ++b) {
    const std::size_t r = cfg.block_resolution(b);
    const std::string conv = conv_id(b);
    std::vector<std::string> conv_weights;
    if (b == 0) conv_weights.push_back(kConstName);
    conv_weights.push_back(conv + ".weight");
    conv_weights.push_back(conv + ".bias");
    layers.push_back({conv, Stage::kSynthesis, LayerKind::kConv, leaky_relu(kBaseLeakySlope), true,
                      std::move(conv_weights), {1, cfg.block_channels(b), r, r}});
    const std::string rgb = torgb_id(b);
    layers.push_back({rgb, Stage::kSynthesis, LayerKind::kToRgb, tanh_activation(), true,
                      {rgb + ".weight", rgb + ".bias"}, {1, 3, r, r}});
  }
  return layers;
}

// Pass-through for disabled layers: keep the first `width` entries of the
// last axis group, zero-padding when the target is wider.
Tensor resize_features(const Tensor& x, std::size_t width) {
  if (x.rank() == 2) {
    Tensor out({x.extent(0), width});
    const std::size_t in_w = x.extent(1), copy = std::min(in_w, width);
    for (std::size_t i = 0; i < x.extent(0); ++i) {
      for (std::size_t j = 0; j < copy; ++j) out[i * width + j] = x[i * in_w + j];
    }
    return out;
  }
  const std::size_t N = x.extent(0), C = x.extent(1), P = x.extent(2) * x.extent(3);
  Tensor out({N, width, x.extent(2), x.extent(3)});
  const std::size_t copy = std::min(C, width);
  for (std::size_t n = 0; n < N; ++n) {
    for (std::size_t c = 0; c < copy; ++c) {
      for (std::size_t p = 0; p < P; ++p) out[(n * width + c) * P + p] = x[(n * C + c) * P + p];
    }
  }
  return out;
}

void clamp_in_place(Tensor& t) {
  for (float& v : t.data()) {
    if (std::isnan(v)) {
      v = 0.0f;
    } else {
      v = std::clamp(v, -kActivationClamp, kActivationClamp);
    }
  }
}

class LayerRunner {
 public:
  LayerRunner(const ModelGraph& graph, const PatchSet& patches, const LayerObserver& observer)
      : graph_(graph), patches_(patches), observer_(observer) {}

  bool enabled(const LayerDescriptor& layer) const {
    auto it = patches_.enable_overrides.find(layer.id);
    return it != patches_.enable_overrides.end() ? it->second : layer.enabled;
  }

  // Applies the effective activation and the clamp to a freshly computed
  // layer output.
  Tensor activate(const LayerDescriptor& layer, Tensor pre) const {
    const ActivationSpec* spec = nullptr;
    auto it = patches_.activation_overrides.find(layer.id);
    if (it != patches_.activation_overrides.end()) {
      spec = &it->second;
    } else if (layer.base_activation) {
      spec = &*layer.base_activation;
    }
    Tensor out = spec ? eval_tensor(*spec, pre) : std::move(pre);
    clamp_in_place(out);
    return out;
  }

  void observe(const LayerDescriptor& layer, const Tensor& out) const {
    if (observer_) observer_(layer, out);
  }

  const Tensor& weight(const std::string& name) const { return graph_.weights().at(name); }

 private:
  const ModelGraph& graph_;
  const PatchSet& patches_;
  const LayerObserver& observer_;
};

}  // namespace

std::vector<WeightSlot> weight_manifest(const GeneratorConfig& cfg) {
  cfg.validate();
  std::vector<WeightSlot> slots;
  const std::size_t w = cfg.mapping_width;
  for (std::size_t k = 0; k < cfg.mapping_layers; ++k) {
    const std::size_t fan_in = k == 0 ? cfg.latent_dim : w;
    slots.push_back({map_id(k) + ".weight", {fan_in, w}, WeightInit::kHe, fan_in});
    slots.push_back({map_id(k) + ".bias", {w}, WeightInit::kZero, 0});
  }
  for (std::size_t b = 0; b < cfg.synthesis_blocks; ++b) {
    const std::size_t cin = cfg.block_input_channels(b);
    slots.push_back({affine_id(b) + ".weight", {w, cin}, WeightInit::kHe, w});
    slots.push_back({affine_id(b) + ".bias", {cin}, WeightInit::kZero, 0});
  }
  for (std::size_t b = 0; b < cfg.synthesis_blocks; ++b) {
    const std::size_t cin = cfg.block_input_channels(b), cout = cfg.block_channels(b);
    if (b == 0) {
      const std::size_t r = cfg.base_resolution;
      slots.push_back({kConstName, {1, cin, r, r}, WeightInit::kUnitNormal, 0});
    }
    slots.push_back({conv_id(b) + ".weight", {cout, cin, 3, 3}, WeightInit::kHe, cin * 9});
    slots.push_back({conv_id(b) + ".bias", {cout}, WeightInit::kZero, 0});
    slots.push_back({torgb_id(b) + ".weight", {3, cout}, WeightInit::kHe, cout});
    slots.push_back({torgb_id(b) + ".bias", {3}, WeightInit::kZero, 0});
  }
  return slots;
}

const LayerDescriptor* ModelGraph::find_layer(std::string_view id) const noexcept {
  for (const auto& layer : layers_) {
    if (layer.id == id) return &layer;
  }
  return nullptr;
}

ModelGraph build_toy_generator(const GeneratorConfig& config, WeightTable weights) {
  for (const auto& slot : weight_manifest(config)) {
    const Tensor* t = weights.find(slot.name);
    if (!t) throw WeightTableError("missing weight tensor '" + slot.name + "'");
    if (t->shape() != slot.shape) {
      throw WeightTableError("weight tensor '" + slot.name + "' has shape " + shape_to_string(t->shape()) +
                             ", expected " + shape_to_string(slot.shape));
    }
  }
  ModelGraph graph;
  graph.config_ = config;
  graph.layers_ = describe_layers(config);
  graph.weights_ = std::move(weights);
  return graph;
}

std::vector<LayerDescriptor> list_layers(const ModelGraph& graph) { return graph.layers(); }

Tensor forward(const ModelGraph& graph, const PatchSet& patches, const Tensor& latent,
               const LayerObserver& observer) {
  const GeneratorConfig& cfg = graph.config();
  if (latent.rank() != 1 || latent.extent(0) != cfg.latent_dim) {
    throw ShapeError("latent must have shape [" + std::to_string(cfg.latent_dim) + "], got " +
                     shape_to_string(latent.shape()));
  }
  if (ValidationReport report = validate(patches, graph); !report.ok()) {
    throw PatchValidationError(std::move(report));
  }

  const LayerRunner run(graph, patches, observer);
  const auto& layers = graph.layers();
  std::size_t li = 0;

  // Mapping MLP.
  Tensor h = latent.reshaped({1, cfg.latent_dim});
  for (std::size_t k = 0; k < cfg.mapping_layers; ++k, ++li) {
    const LayerDescriptor& layer = layers[li];
    if (run.enabled(layer)) {
      h = run.activate(layer, dense(h, run.weight(layer.weight_names[0]), run.weight(layer.weight_names[1])));
    } else {
      h = resize_features(h, layer.output_shape[1]);
    }
    run.observe(layer, h);
  }

  // Per-block projections of the mapped latent.
  std::vector<Tensor> styles;
  for (std::size_t b = 0; b < cfg.synthesis_blocks; ++b, ++li) {
    const LayerDescriptor& layer = layers[li];
    Tensor s = run.enabled(layer)
                   ? run.activate(layer, dense(h, run.weight(layer.weight_names[0]), run.weight(layer.weight_names[1])))
                   : resize_features(h, layer.output_shape[1]);
    run.observe(layer, s);
    styles.push_back(s.reshaped({s.extent(1)}));
  }

  // Synthesis: features at doubling resolution, RGB skips upsampled and summed.
  const std::size_t final_res = cfg.final_resolution();
  Tensor image({1, 3, final_res, final_res});
  Tensor x = run.weight(kConstName);
  for (std::size_t b = 0; b < cfg.synthesis_blocks; ++b) {
    if (b > 0) x = upsample2x_nearest(x);
    x = add_channelwise(x, styles[b]);

    const LayerDescriptor& conv = layers[li++];
    if (run.enabled(conv)) {
      const auto& names = conv.weight_names;
      const std::size_t off = names.size() - 2;
      x = run.activate(conv, conv2d_same(x, run.weight(names[off]), run.weight(names[off + 1])));
    } else {
      x = resize_features(x, conv.output_shape[1]);
    }
    run.observe(conv, x);

    const LayerDescriptor& torgb = layers[li++];
    Tensor rgb = run.enabled(torgb)
                     ? run.activate(torgb, conv1x1(x, run.weight(torgb.weight_names[0]), run.weight(torgb.weight_names[1])))
                     : Tensor(torgb.output_shape);
    run.observe(torgb, rgb);
    for (std::size_t u = b + 1; u < cfg.synthesis_blocks; ++u) rgb = upsample2x_nearest(rgb);
    image = add(image, rgb);
  }
  return image;
}

nlohmann::json graph_to_json(const ModelGraph& graph) {
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& layer : graph.layers()) {
    layers.push_back({
        {"id", layer.id},
        {"stage", stage_name(layer.stage)},
        {"kind", layer_kind_name(layer.kind)},
        {"base_activation", layer.base_activation ? to_json(*layer.base_activation) : nlohmann::json(nullptr)},
        {"enabled", layer.enabled},
        {"output_shape", layer.output_shape},
    });
  }
  return layers;
}

}  // namespace netbend
