#include "netbend/patch.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "netbend/format.hpp"
#include "netbend/rng.hpp"

namespace netbend {

using nlohmann::json;

bool PatchSet::empty() const noexcept {
  const auto* sparse = std::get_if<SparseLatentEdits>(&latent_edits);
  return activation_overrides.empty() && enable_overrides.empty() && sparse && sparse->empty() && !seed;
}

bool ValidationReport::has_error(std::string_view code) const noexcept {
  return std::any_of(errors.begin(), errors.end(), [&](const Issue& i) { return i.code == code; });
}

bool ValidationReport::has_warning(std::string_view code) const noexcept {
  return std::any_of(warnings.begin(), warnings.end(), [&](const Issue& i) { return i.code == code; });
}

ValidationReport validate(const PatchSet& patches, const ModelGraph& graph) {
  ValidationReport report;
  for (const auto& [id, spec] : patches.activation_overrides) {
    if (!graph.find_layer(id)) {
      report.errors.push_back({"unknown_layer", id, "", "no layer with id '" + id + "'"});
      continue;
    }
    const SpecCheck check = validate(spec);
    for (const auto& v : check.errors) report.errors.push_back({v.code, id, v.param, id + ": " + v.message});
    for (const auto& v : check.warnings) report.warnings.push_back({v.code, id, v.param, id + ": " + v.message});
  }
  for (const auto& [id, _] : patches.enable_overrides) {
    if (!graph.find_layer(id)) report.errors.push_back({"unknown_layer", id, "", "no layer with id '" + id + "'"});
  }

  const std::size_t dim = graph.config().latent_dim;
  if (const auto* sparse = std::get_if<SparseLatentEdits>(&patches.latent_edits)) {
    for (const auto& [index, value] : *sparse) {
      const std::string param = "latent[" + std::to_string(index) + "]";
      if (index >= dim) {
        report.errors.push_back({"latent_index_out_of_range", "", param,
                                 "latent edit index " + std::to_string(index) + " >= latent_dim " +
                                     std::to_string(dim)});
      } else if (!std::isfinite(value)) {
        report.errors.push_back({"non_finite_latent", "", param, param + " is not finite"});
      }
    }
  } else {
    const auto& full = std::get<LatentReplacement>(patches.latent_edits);
    if (full.size() != dim) {
      report.errors.push_back({"latent_length_mismatch", "", "latent",
                               "latent replacement has " + std::to_string(full.size()) + " values, expected " +
                                   std::to_string(dim)});
    }
    for (std::size_t i = 0; i < full.size(); ++i) {
      if (!std::isfinite(full[i])) {
        report.errors.push_back({"non_finite_latent", "", "latent[" + std::to_string(i) + "]",
                                 "latent[" + std::to_string(i) + "] is not finite"});
      }
    }
  }
  return report;
}

json report_to_json(const ValidationReport& report) {
  auto issues = [](const std::vector<Issue>& list) {
    json arr = json::array();
    for (const auto& i : list) {
      json j{{"code", i.code}, {"message", i.message}};
      if (!i.layer_id.empty()) j["layer_id"] = i.layer_id;
      if (!i.param.empty()) j["param"] = i.param;
      arr.push_back(std::move(j));
    }
    return arr;
  };
  return {{"errors", issues(report.errors)}, {"warnings", issues(report.warnings)}};
}

namespace {

std::string first_error_message(const ValidationReport& report) {
  std::string msg = "patch validation failed";
  for (const auto& e : report.errors) msg += "; " + e.code + ": " + e.message;
  return msg;
}

}  // namespace

PatchValidationError::PatchValidationError(ValidationReport report)
    : std::invalid_argument(first_error_message(report)), report_(std::move(report)) {}

Tensor effective_latent(const PatchSet& patches, std::uint64_t rng_seed, std::size_t latent_dim) {
  if (const auto* full = std::get_if<LatentReplacement>(&patches.latent_edits)) {
    if (full->size() != latent_dim) {
      throw std::out_of_range("latent replacement length " + std::to_string(full->size()) + " != " +
                              std::to_string(latent_dim));
    }
    return Tensor({latent_dim}, *full);
  }
  Tensor z = normal_vector(patches.seed.value_or(rng_seed), latent_dim);
  for (const auto& [index, value] : std::get<SparseLatentEdits>(patches.latent_edits)) {
    if (index >= latent_dim) throw std::out_of_range("latent edit index " + std::to_string(index));
    z[index] = value;
  }
  return z;
}

PatchFormatError::PatchFormatError(std::string code, const std::string& message, std::size_t line,
                                   std::size_t column)
    : std::runtime_error(code + ": " + message), code_(std::move(code)), line_(line), column_(column) {}

// ---------------------------------------------------------------------------
// Canonical writer

namespace {

void write_string(std::string& out, const std::string& s) { out += json(s).dump(); }

void write_spec(std::string& out, const ActivationSpec& spec) {
  out += "{\"kind\":\"";
  out += kind_name(spec.kind);
  out += '"';
  if (spec.kind == ActivationKind::kPoly) {
    out += ",\"degree\":";
    out += std::to_string(spec.degree);
  }
  out += ",\"params\":{";
  bool first = true;
  for (const auto& [name, value] : spec.params) {
    if (!first) out += ',';
    first = false;
    write_string(out, name);
    out += ':';
    out += format_float(value);
  }
  out += "}}";
}

}  // namespace

std::string serialize(const PatchSet& patches) {
  std::string out = "{\"version\":1,\"activation_overrides\":{";
  bool first = true;
  for (const auto& [id, spec] : patches.activation_overrides) {
    if (!first) out += ',';
    first = false;
    write_string(out, id);
    out += ':';
    write_spec(out, spec);
  }
  out += "},\"enable_overrides\":{";
  first = true;
  for (const auto& [id, enabled] : patches.enable_overrides) {
    if (!first) out += ',';
    first = false;
    write_string(out, id);
    out += enabled ? ":true" : ":false";
  }
  out += "},\"latent_edits\":";
  if (const auto* sparse = std::get_if<SparseLatentEdits>(&patches.latent_edits)) {
    out += '{';
    first = true;
    for (const auto& [index, value] : *sparse) {
      if (!first) out += ',';
      first = false;
      out += '"' + std::to_string(index) + "\":" + format_float(value);
    }
    out += '}';
  } else {
    out += '[';
    first = true;
    for (float v : std::get<LatentReplacement>(patches.latent_edits)) {
      if (!first) out += ',';
      first = false;
      out += format_float(v);
    }
    out += ']';
  }
  out += ",\"seed\":";
  out += patches.seed ? std::to_string(*patches.seed) : "null";
  out += '}';
  return out;
}

// ---------------------------------------------------------------------------
// Reader

namespace {

[[noreturn]] void schema_error(const std::string& code, const std::string& message) {
  throw PatchFormatError(code, message);
}

const char* type_label(const json& j) { return j.type_name(); }

float read_float(const json& j, const std::string& where) {
  if (!j.is_number()) schema_error("bad_type", where + " must be a number, got " + type_label(j));
  const double d = j.get<double>();
  if (!std::isfinite(d) || std::fabs(d) > static_cast<double>(std::numeric_limits<float>::max())) {
    schema_error("non_finite", where + " is not representable as a finite f32");
  }
  // JSON numbers arrive as doubles. Rounding that to f32 can land one ulp
  // away from the float whose shortest form was written; prefer a neighbour
  // that reproduces the text exactly.
  const float f = static_cast<float>(d);
  for (float c : {f, std::nextafter(f, -INFINITY), std::nextafter(f, INFINITY)}) {
    if (std::isfinite(c) && float_as_decimal(c) == d) return c;
  }
  return f;
}

const json& require_object(const json& j, const std::string& where) {
  if (!j.is_object()) schema_error("bad_type", where + " must be an object, got " + type_label(j));
  return j;
}

std::size_t parse_index(const std::string& key) {
  const bool canonical = !key.empty() && key.size() <= 19 && std::all_of(key.begin(), key.end(), [](char c) { return c >= '0' && c <= '9'; }) &&
                         (key.size() == 1 || key[0] != '0');
  if (!canonical) schema_error("bad_latent_index", "latent edit key '" + key + "' is not a decimal index");
  std::size_t index = 0;
  std::from_chars(key.data(), key.data() + key.size(), index);
  return index;
}

void line_column(std::string_view text, std::size_t byte, std::size_t& line, std::size_t& column) {
  line = 1;
  column = 1;
  const std::size_t end = std::min(text.size(), byte > 0 ? byte - 1 : 0);
  for (std::size_t i = 0; i < end; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
}

}  // namespace

ActivationSpec activation_from_json(const json& doc) {
  require_object(doc, "activation spec");
  for (const auto& [key, _] : doc.items()) {
    if (key != "kind" && key != "params" && key != "degree") {
      schema_error("unknown_key", "unknown key '" + key + "' in activation spec");
    }
  }
  if (!doc.contains("kind")) schema_error("missing_key", "activation spec needs 'kind'");
  const json& kind_j = doc.at("kind");
  if (!kind_j.is_string()) schema_error("bad_type", "activation kind must be a string");
  const auto kind = parse_kind(kind_j.get<std::string>());
  if (!kind) schema_error("unknown_activation", "unknown activation kind '" + kind_j.get<std::string>() + "'");

  ActivationSpec spec;
  spec.kind = *kind;
  if (doc.contains("params")) {
    for (const auto& [name, value] : require_object(doc.at("params"), "params").items()) {
      spec.params[name] = read_float(value, "parameter " + name);
    }
  }
  if (spec.kind == ActivationKind::kPoly) {
    if (doc.contains("degree")) {
      const json& d = doc.at("degree");
      if (!d.is_number_integer()) schema_error("bad_type", "poly degree must be an integer");
      const auto deg = d.get<std::int64_t>();
      spec.degree = deg < -1000 || deg > 1000 ? -1 : static_cast<int>(deg);
    } else {
      spec.degree = static_cast<int>(spec.params.size()) - 1;
    }
  } else if (doc.contains("degree")) {
    schema_error("unknown_key", "'degree' only applies to poly");
  }
  return spec;
}

PatchSet patchset_from_json(const json& doc) {
  require_object(doc, "patch document");
  static constexpr std::array<std::string_view, 5> kKeys = {"version", "activation_overrides", "enable_overrides",
                                                             "latent_edits", "seed"};
  for (const auto& [key, _] : doc.items()) {
    if (std::find(kKeys.begin(), kKeys.end(), key) == kKeys.end()) {
      schema_error("unknown_key", "unknown top-level key '" + key + "'");
    }
  }
  for (auto key : kKeys) {
    if (!doc.contains(key)) schema_error("missing_key", "missing top-level key '" + std::string(key) + "'");
  }
  const json& version = doc.at("version");
  if (!version.is_number_integer() || version.get<std::int64_t>() != 1) {
    schema_error("bad_version", "unsupported patch version " + version.dump());
  }

  PatchSet patches;
  for (const auto& [id, spec] : require_object(doc.at("activation_overrides"), "activation_overrides").items()) {
    patches.activation_overrides[id] = activation_from_json(spec);
  }
  for (const auto& [id, flag] : require_object(doc.at("enable_overrides"), "enable_overrides").items()) {
    if (!flag.is_boolean()) schema_error("bad_type", "enable override for '" + id + "' must be a boolean");
    patches.enable_overrides[id] = flag.get<bool>();
  }

  const json& edits = doc.at("latent_edits");
  if (edits.is_object()) {
    SparseLatentEdits sparse;
    for (const auto& [key, value] : edits.items()) {
      sparse[parse_index(key)] = read_float(value, "latent edit " + key);
    }
    patches.latent_edits = std::move(sparse);
  } else if (edits.is_array()) {
    LatentReplacement full;
    full.reserve(edits.size());
    for (std::size_t i = 0; i < edits.size(); ++i) full.push_back(read_float(edits[i], "latent[" + std::to_string(i) + "]"));
    patches.latent_edits = std::move(full);
  } else {
    schema_error("bad_type", "latent_edits must be an object (sparse) or an array (full replacement)");
  }

  const json& seed = doc.at("seed");
  if (seed.is_number_unsigned()) {
    patches.seed = seed.get<std::uint64_t>();
  } else if (seed.is_number_integer() && seed.get<std::int64_t>() >= 0) {
    patches.seed = static_cast<std::uint64_t>(seed.get<std::int64_t>());
  } else if (!seed.is_null()) {
    schema_error("bad_type", "seed must be null or a non-negative 64-bit integer");
  }
  return patches;
}

PatchSet deserialize(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t line = 0, column = 0;
    line_column(text, e.byte, line, column);
    throw PatchFormatError("parse_error",
                           "invalid JSON at line " + std::to_string(line) + ", column " + std::to_string(column),
                           line, column);
  } catch (const json::out_of_range& e) {
    // Number literals beyond double range.
    throw PatchFormatError("non_finite", e.what());
  }
  return patchset_from_json(doc);
}

}  // namespace netbend
