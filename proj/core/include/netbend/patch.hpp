#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "netbend/activation.hpp"
#include "netbend/model.hpp"
#include "netbend/tensor.hpp"

namespace netbend {

/// Sparse latent edits: component index -> replacement value.
using SparseLatentEdits = std::map<std::size_t, float>;
/// Whole latent vector supplied by the user; sampling is skipped.
using LatentReplacement = std::vector<float>;

/// One unit of user intent against a model graph.
struct PatchSet {
  std::map<std::string, ActivationSpec> activation_overrides;
  std::map<std::string, bool> enable_overrides;
  std::variant<SparseLatentEdits, LatentReplacement> latent_edits;
  std::optional<std::uint64_t> seed;

  bool empty() const noexcept;

  friend bool operator==(const PatchSet&, const PatchSet&) = default;
};

struct Issue {
  std::string code;
  std::string layer_id;
  std::string param;
  std::string message;
};

struct ValidationReport {
  std::vector<Issue> errors;
  std::vector<Issue> warnings;

  bool ok() const noexcept { return errors.empty(); }
  bool has_error(std::string_view code) const noexcept;
  bool has_warning(std::string_view code) const noexcept;
};

/// Exhaustive and total. Error codes: unknown_layer, missing_param,
/// unknown_param, non_finite, bad_degree, weight_count,
/// latent_index_out_of_range, latent_length_mismatch, non_finite_latent.
/// Warning codes: soft_range.
ValidationReport validate(const PatchSet& patches, const ModelGraph& graph);

nlohmann::json report_to_json(const ValidationReport& report);

class PatchValidationError : public std::invalid_argument {
 public:
  explicit PatchValidationError(ValidationReport report);
  const ValidationReport& report() const noexcept { return report_; }

 private:
  ValidationReport report_;
};

/// Latent for a render: normal_vector(patch seed, else rng_seed), then sparse
/// edits overwrite components; a full replacement skips sampling entirely.
/// Throws std::out_of_range for an edit index >= latent_dim.
Tensor effective_latent(const PatchSet& patches, std::uint64_t rng_seed, std::size_t latent_dim);

/// Error in a patch document. `code` is one of parse_error, bad_type,
/// bad_version, missing_key, unknown_key, unknown_activation,
/// bad_latent_index, non_finite. line/column are 1-based and set for
/// parse_error only.
class PatchFormatError : public std::runtime_error {
 public:
  PatchFormatError(std::string code, const std::string& message, std::size_t line = 0, std::size_t column = 0);

  const std::string& code() const noexcept { return code_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::string code_;
  std::size_t line_;
  std::size_t column_;
};

/// Canonical text: fixed top-level key order, sorted map keys, shortest
/// round-trip floats, no whitespace. Equal PatchSets give byte-equal text.
std::string serialize(const PatchSet& patches);
/// Throws PatchFormatError.
PatchSet deserialize(std::string_view text);

/// Same schema as deserialize, from an already parsed document.
PatchSet patchset_from_json(const nlohmann::json& doc);
ActivationSpec activation_from_json(const nlohmann::json& doc);

}  // namespace netbend
