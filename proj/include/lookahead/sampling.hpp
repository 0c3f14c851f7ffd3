#pragma once

#include <vector>

#include "lookahead/rng.hpp"
#include "lookahead/types.hpp"

namespace lookahead {

// Applies temperature, then top-k, then top-p, and renormalizes. Greedy specs
// return the distribution unchanged. Throws Error(degenerate_distribution)
// if no mass survives.
Distribution apply_sampler(const Distribution& d, const SamplerSpec& spec);

// Inverse-CDF draw in token order; consumes exactly one uniform.
Token sample_categorical(std::span<const double> probs, Rng& rng);

// Greedy: argmax with lowest-id ties, no rng use. Temperature: transform and
// draw one categorical sample.
Token sample_token(const Distribution& d, const SamplerSpec& spec, Rng& rng);

}  // namespace lookahead
