#pragma once

#include <array>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "netbend/tensor.hpp"

namespace netbend {

enum class ActivationKind {
  kReLU,
  kLeakyReLU,
  kSigmoid,
  kTanh,
  kSiLU,
  kSinLU,
  kReLUN,
  kShiLU,
  kPoly,
};

inline constexpr std::array<ActivationKind, 9> kAllActivationKinds = {
    ActivationKind::kReLU,  ActivationKind::kLeakyReLU, ActivationKind::kSigmoid,
    ActivationKind::kTanh,  ActivationKind::kSiLU,      ActivationKind::kSinLU,
    ActivationKind::kReLUN, ActivationKind::kShiLU,     ActivationKind::kPoly,
};

/// Lowercase wire name: relu, leaky_relu, sigmoid, tanh, silu, sinlu, relun,
/// shilu, poly.
std::string_view kind_name(ActivationKind kind) noexcept;
std::optional<ActivationKind> parse_kind(std::string_view name) noexcept;

inline constexpr int kMinPolyDegree = 1;
inline constexpr int kMaxPolyDegree = 3;
inline constexpr int kDefaultPolyDegree = 3;

struct Range {
  float lo;
  float hi;
  bool lo_open = false;

  bool contains(float v) const noexcept { return (lo_open ? v > lo : v >= lo) && v <= hi; }
};

struct ParamInfo {
  std::string name;
  float default_value;
  /// Slider range. Values outside are legal and reported as warnings.
  Range soft;
  /// Narrower range recommended for subtle edits, when one is known.
  std::optional<Range> suggested;
};

struct ParamSchema {
  ActivationKind kind;
  int degree = 0;  // poly only
  std::vector<ParamInfo> params;
};

/// Schema for a kind. `poly_degree` selects the weight count for poly.
ParamSchema param_schema(ActivationKind kind, int poly_degree = kDefaultPolyDegree);
/// Throws std::invalid_argument on an unknown kind name.
ParamSchema param_schema(std::string_view kind_name, int poly_degree = kDefaultPolyDegree);

/// An activation kind plus named parameters. Poly weights are named w0..wd.
struct ActivationSpec {
  ActivationKind kind = ActivationKind::kReLU;
  int degree = 0;  // poly only; ignored for other kinds
  std::map<std::string, float> params;

  /// Kind with schema defaults filled in.
  static ActivationSpec with_defaults(ActivationKind kind, int poly_degree = kDefaultPolyDegree);

  friend bool operator==(const ActivationSpec&, const ActivationSpec&) = default;
};

ActivationSpec relu();
ActivationSpec leaky_relu(float slope);
ActivationSpec sigmoid();
ActivationSpec tanh_activation();
ActivationSpec silu();
ActivationSpec sinlu(float a, float b);
ActivationSpec relun(float n);
ActivationSpec shilu(float a, float b);
ActivationSpec poly(std::vector<float> weights);

struct Violation {
  std::string code;
  std::string param;
  std::string message;

  friend bool operator==(const Violation&, const Violation&) = default;
};

struct SpecCheck {
  std::vector<Violation> errors;
  std::vector<Violation> warnings;

  bool ok() const noexcept { return errors.empty(); }
};

/// Structural check against the kind's schema. Never throws. Errors:
/// missing_param, unknown_param, non_finite, bad_degree, weight_count.
/// Warnings: soft_range.
SpecCheck validate(const ActivationSpec& spec);

class InvalidSpecError : public std::invalid_argument {
 public:
  explicit InvalidSpecError(std::vector<Violation> violations);
  const std::vector<Violation>& violations() const noexcept { return violations_; }

 private:
  std::vector<Violation> violations_;
};

/// Validated, lookup-free form of a spec for tight evaluation loops.
class Activation {
 public:
  /// Throws InvalidSpecError.
  explicit Activation(const ActivationSpec& spec);

  float operator()(float x) const noexcept;
  ActivationKind kind() const noexcept { return kind_; }

 private:
  ActivationKind kind_;
  double p0_ = 0.0;
  double p1_ = 0.0;
  int degree_ = 0;
  std::array<double, kMaxPolyDegree + 1> weights_{};
};

float eval_scalar(const ActivationSpec& spec, float x);
Tensor eval_tensor(const ActivationSpec& spec, const Tensor& x);

struct CurvePoint {
  float x;
  float y;
};

/// n >= 2 points, equally spaced, both endpoints included exactly.
std::vector<CurvePoint> sample_curve(const ActivationSpec& spec, float x_min, float x_max, std::size_t n);

// JSON form: {"kind":"sinlu","params":{"a":1,"b":2.5}}; poly adds "degree".
nlohmann::json to_json(const ActivationSpec& spec);
nlohmann::json schema_to_json(const ParamSchema& schema);
/// Catalog of every kind with its schema, for clients.
nlohmann::json activation_catalog();

}  // namespace netbend
