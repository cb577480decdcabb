#pragma once

#include <string>
#include <vector>

#include "netbend/patch.hpp"
#include "oracles.hpp"

namespace oracle {

// Random spec of a random kind, every parameter finite.
netbend::ActivationSpec random_spec(TestRng& rng);

// Random PatchSet that validates against a graph with these layer ids and
// latent size.
netbend::PatchSet random_patchset(TestRng& rng, const std::vector<std::string>& layer_ids, std::size_t latent_dim);

}  // namespace oracle
