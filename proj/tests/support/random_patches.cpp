#include "random_patches.hpp"

#include <bit>
#include <cmath>

namespace oracle {

using namespace netbend;

namespace {

// Mix of slider-like values and awkward floats (subnormals, huge, long
// mantissas) to stress the float formatter.
float random_value(TestRng& rng) {
  switch (rng.below(4)) {
    case 0:
      return rng.uniform(-5.0f, 5.0f);
    case 1:
      return static_cast<float>(static_cast<int>(rng.below(21)) - 10) * 0.25f;
    case 2: {
      float v;
      do {
        v = std::bit_cast<float>(static_cast<std::uint32_t>(rng.next()));
      } while (!std::isfinite(v));
      return v;
    }
    default:
      return rng.uniform(0.5f, 1.5f);
  }
}

}  // namespace

ActivationSpec random_spec(TestRng& rng) {
  const ActivationKind kind = kAllActivationKinds[rng.below(kAllActivationKinds.size())];
  const int degree = kind == ActivationKind::kPoly ? 1 + static_cast<int>(rng.below(3)) : kDefaultPolyDegree;
  ActivationSpec spec = ActivationSpec::with_defaults(kind, degree);
  for (auto& [name, value] : spec.params) value = random_value(rng);
  return spec;
}

PatchSet random_patchset(TestRng& rng, const std::vector<std::string>& layer_ids, std::size_t latent_dim) {
  PatchSet p;
  for (const auto& id : layer_ids) {
    if (rng.below(3) == 0) p.activation_overrides[id] = random_spec(rng);
    if (rng.below(4) == 0) p.enable_overrides[id] = rng.below(2) == 0;
  }
  switch (rng.below(3)) {
    case 0:
      break;
    case 1: {
      SparseLatentEdits edits;
      const std::size_t n = rng.below(6);
      for (std::size_t i = 0; i < n; ++i) edits[rng.below(latent_dim)] = random_value(rng);
      p.latent_edits = edits;
      break;
    }
    default: {
      LatentReplacement full(latent_dim);
      for (auto& v : full) v = random_value(rng);
      p.latent_edits = full;
    }
  }
  if (rng.below(2) == 0) p.seed = rng.next();
  return p;
}

}  // namespace oracle
