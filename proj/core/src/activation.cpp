#include "netbend/activation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "netbend/format.hpp"

namespace netbend {

namespace {

struct KindName {
  ActivationKind kind;
  std::string_view name;
};

constexpr std::array<KindName, 9> kKindNames = {{
    {ActivationKind::kReLU, "relu"},
    {ActivationKind::kLeakyReLU, "leaky_relu"},
    {ActivationKind::kSigmoid, "sigmoid"},
    {ActivationKind::kTanh, "tanh"},
    {ActivationKind::kSiLU, "silu"},
    {ActivationKind::kSinLU, "sinlu"},
    {ActivationKind::kReLUN, "relun"},
    {ActivationKind::kShiLU, "shilu"},
    {ActivationKind::kPoly, "poly"},
}};

// Denominators sqrt(2)^d for d = 0..3, exact where possible.
constexpr std::array<double, 4> kPolyNorm = {1.0, std::numbers::sqrt2, 2.0, 2.0 * std::numbers::sqrt2};

double sigmoid64(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

std::string weight_name(int i) { return "w" + std::to_string(i); }

std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream os;
  os << "invalid activation spec:";
  for (const auto& v : violations) os << ' ' << v.message << ';';
  return os.str();
}

}  // namespace

std::string_view kind_name(ActivationKind kind) noexcept {
  for (const auto& kn : kKindNames) {
    if (kn.kind == kind) return kn.name;
  }
  return "unknown";
}

std::optional<ActivationKind> parse_kind(std::string_view name) noexcept {
  for (const auto& kn : kKindNames) {
    if (kn.name == name) return kn.kind;
  }
  return std::nullopt;
}

ParamSchema param_schema(ActivationKind kind, int poly_degree) {
  ParamSchema schema{kind, 0, {}};
  switch (kind) {
    case ActivationKind::kReLU:
    case ActivationKind::kSigmoid:
    case ActivationKind::kTanh:
    case ActivationKind::kSiLU:
      break;
    case ActivationKind::kLeakyReLU:
      schema.params.push_back({"slope", 0.2f, {0.0f, 1.0f}, std::nullopt});
      break;
    case ActivationKind::kSinLU:
      schema.params.push_back({"a", 1.0f, {-5.0f, 5.0f}, std::nullopt});
      schema.params.push_back({"b", 1.0f, {-5.0f, 5.0f}, std::nullopt});
      break;
    case ActivationKind::kReLUN:
      // n = 6 is ReLU6.
      schema.params.push_back({"n", 6.0f, {0.0f, 20.0f, true}, std::nullopt});
      break;
    case ActivationKind::kShiLU:
      schema.params.push_back({"a", 1.0f, {-5.0f, 5.0f}, std::nullopt});
      schema.params.push_back({"b", 0.0f, {-5.0f, 5.0f}, std::nullopt});
      break;
    case ActivationKind::kPoly:
      if (poly_degree < kMinPolyDegree || poly_degree > kMaxPolyDegree) {
        throw std::invalid_argument("poly degree must be 1..3, got " + std::to_string(poly_degree));
      }
      schema.degree = poly_degree;
      for (int i = 0; i <= poly_degree; ++i) {
        schema.params.push_back({weight_name(i), 1.0f, {0.5f, 1.5f}, Range{0.8f, 1.2f}});
      }
      break;
  }
  return schema;
}

ParamSchema param_schema(std::string_view name, int poly_degree) {
  auto kind = parse_kind(name);
  if (!kind) throw std::invalid_argument("unknown activation kind '" + std::string(name) + "'");
  return param_schema(*kind, poly_degree);
}

ActivationSpec ActivationSpec::with_defaults(ActivationKind kind, int poly_degree) {
  ActivationSpec spec;
  spec.kind = kind;
  const ParamSchema schema = param_schema(kind, poly_degree);
  spec.degree = schema.degree;
  for (const auto& p : schema.params) spec.params[p.name] = p.default_value;
  return spec;
}

ActivationSpec relu() { return {ActivationKind::kReLU, 0, {}}; }
ActivationSpec leaky_relu(float slope) { return {ActivationKind::kLeakyReLU, 0, {{"slope", slope}}}; }
ActivationSpec sigmoid() { return {ActivationKind::kSigmoid, 0, {}}; }
ActivationSpec tanh_activation() { return {ActivationKind::kTanh, 0, {}}; }
ActivationSpec silu() { return {ActivationKind::kSiLU, 0, {}}; }
ActivationSpec sinlu(float a, float b) { return {ActivationKind::kSinLU, 0, {{"a", a}, {"b", b}}}; }
ActivationSpec relun(float n) { return {ActivationKind::kReLUN, 0, {{"n", n}}}; }
ActivationSpec shilu(float a, float b) { return {ActivationKind::kShiLU, 0, {{"a", a}, {"b", b}}}; }

ActivationSpec poly(std::vector<float> weights) {
  ActivationSpec spec{ActivationKind::kPoly, static_cast<int>(weights.size()) - 1, {}};
  for (std::size_t i = 0; i < weights.size(); ++i) spec.params[weight_name(static_cast<int>(i))] = weights[i];
  return spec;
}

SpecCheck validate(const ActivationSpec& spec) {
  SpecCheck check;
  std::optional<ParamSchema> schema;

  if (spec.kind == ActivationKind::kPoly) {
    if (spec.degree < kMinPolyDegree || spec.degree > kMaxPolyDegree) {
      check.errors.push_back({"bad_degree", "degree",
                              "poly degree must be 1..3, got " + std::to_string(spec.degree)});
      return check;
    }
    schema = param_schema(spec.kind, spec.degree);
    std::size_t weights = 0;
    for (const auto& [name, _] : spec.params) {
      if (name.size() > 1 && name[0] == 'w') ++weights;
    }
    const std::size_t expected = static_cast<std::size_t>(spec.degree) + 1;
    if (weights != expected || spec.params.size() != expected) {
      check.errors.push_back({"weight_count", "",
                              "expected " + std::to_string(expected) + " weights, got " +
                                  std::to_string(spec.params.size())});
    }
  } else {
    schema = param_schema(spec.kind);
  }

  for (const auto& info : schema->params) {
    auto it = spec.params.find(info.name);
    if (it == spec.params.end()) {
      check.errors.push_back({"missing_param", info.name, "missing parameter " + info.name});
      continue;
    }
    if (!std::isfinite(it->second)) {
      check.errors.push_back({"non_finite", info.name, "parameter " + info.name + " is not finite"});
      continue;
    }
    if (!info.soft.contains(it->second)) {
      std::ostringstream os;
      os << "parameter " << info.name << "=" << it->second << " outside soft range "
         << (info.soft.lo_open ? "(" : "[") << info.soft.lo << ", " << info.soft.hi << "]";
      check.warnings.push_back({"soft_range", info.name, os.str()});
    }
  }
  for (const auto& [name, _] : spec.params) {
    const bool known = std::any_of(schema->params.begin(), schema->params.end(),
                                   [&](const ParamInfo& p) { return p.name == name; });
    if (!known) check.errors.push_back({"unknown_param", name, "unknown parameter " + name});
  }
  return check;
}

InvalidSpecError::InvalidSpecError(std::vector<Violation> violations)
    : std::invalid_argument(describe(violations)), violations_(std::move(violations)) {}

Activation::Activation(const ActivationSpec& spec) : kind_(spec.kind) {
  SpecCheck check = validate(spec);
  if (!check.ok()) throw InvalidSpecError(std::move(check.errors));
  auto param = [&](const char* name) { return static_cast<double>(spec.params.at(name)); };
  switch (kind_) {
    case ActivationKind::kLeakyReLU:
      p0_ = param("slope");
      break;
    case ActivationKind::kSinLU:
    case ActivationKind::kShiLU:
      p0_ = param("a");
      p1_ = param("b");
      break;
    case ActivationKind::kReLUN:
      p0_ = param("n");
      break;
    case ActivationKind::kPoly:
      degree_ = spec.degree;
      for (int i = 0; i <= degree_; ++i) weights_[static_cast<std::size_t>(i)] = spec.params.at(weight_name(i));
      break;
    default:
      break;
  }
}

float Activation::operator()(float xf) const noexcept {
  const double x = xf;
  double y = 0.0;
  switch (kind_) {
    case ActivationKind::kReLU:
      y = x > 0.0 ? x : 0.0;
      break;
    case ActivationKind::kLeakyReLU:
      y = x >= 0.0 ? x : p0_ * x;
      break;
    case ActivationKind::kSigmoid:
      y = sigmoid64(x);
      break;
    case ActivationKind::kTanh:
      y = std::tanh(x);
      break;
    case ActivationKind::kSiLU:
      y = x * sigmoid64(x);
      break;
    case ActivationKind::kSinLU:
      y = (x + p0_ * std::sin(p1_ * x)) * sigmoid64(x);
      break;
    case ActivationKind::kReLUN:
      y = std::min(std::max(0.0, x), p0_);
      break;
    case ActivationKind::kShiLU:
      y = p0_ * (x > 0.0 ? x : 0.0) + p1_;
      break;
    case ActivationKind::kPoly: {
      const double s = sigmoid64(x);
      double power = 1.0;
      double sum = 0.0;
      for (int i = 0; i <= degree_; ++i) {
        sum += weights_[static_cast<std::size_t>(i)] * power;
        power *= s;
      }
      y = sum / kPolyNorm[static_cast<std::size_t>(degree_)];
      break;
    }
  }
  return static_cast<float>(y);
}

float eval_scalar(const ActivationSpec& spec, float x) { return Activation(spec)(x); }

Tensor eval_tensor(const ActivationSpec& spec, const Tensor& x) {
  const Activation act(spec);
  Tensor out(x.shape());
  auto in = x.data();
  auto o = out.data();
  for (std::size_t i = 0; i < o.size(); ++i) o[i] = act(in[i]);
  return out;
}

std::vector<CurvePoint> sample_curve(const ActivationSpec& spec, float x_min, float x_max, std::size_t n) {
  if (!(x_min < x_max)) throw std::invalid_argument("sample_curve: x_min must be < x_max");
  if (n < 2) throw std::invalid_argument("sample_curve: need at least 2 points");
  const Activation act(spec);
  std::vector<CurvePoint> points;
  points.reserve(n);
  const double lo = x_min, span = static_cast<double>(x_max) - lo;
  for (std::size_t i = 0; i < n; ++i) {
    const float x = i + 1 == n ? x_max : static_cast<float>(lo + span * static_cast<double>(i) / static_cast<double>(n - 1));
    points.push_back({x, act(x)});
  }
  return points;
}

nlohmann::json to_json(const ActivationSpec& spec) {
  nlohmann::json j;
  j["kind"] = kind_name(spec.kind);
  if (spec.kind == ActivationKind::kPoly) j["degree"] = spec.degree;
  nlohmann::json params = nlohmann::json::object();
  for (const auto& [name, value] : spec.params) params[name] = float_as_decimal(value);
  j["params"] = std::move(params);
  return j;
}

namespace {

nlohmann::json range_json(const Range& r) {
  return {{"lo", float_as_decimal(r.lo)}, {"hi", float_as_decimal(r.hi)}, {"lo_open", r.lo_open}};
}

}  // namespace

nlohmann::json schema_to_json(const ParamSchema& schema) {
  nlohmann::json j;
  j["kind"] = kind_name(schema.kind);
  if (schema.kind == ActivationKind::kPoly) {
    j["degree"] = schema.degree;
    j["degrees"] = {kMinPolyDegree, 2, kMaxPolyDegree};
  }
  nlohmann::json params = nlohmann::json::array();
  for (const auto& p : schema.params) {
    nlohmann::json pj{{"name", p.name}, {"default", float_as_decimal(p.default_value)}, {"soft_range", range_json(p.soft)}};
    if (p.suggested) pj["suggested_range"] = range_json(*p.suggested);
    params.push_back(std::move(pj));
  }
  j["params"] = std::move(params);
  return j;
}

nlohmann::json activation_catalog() {
  nlohmann::json kinds = nlohmann::json::array();
  for (auto kind : kAllActivationKinds) kinds.push_back(schema_to_json(param_schema(kind)));
  return {{"kinds", std::move(kinds)}};
}

}  // namespace netbend
