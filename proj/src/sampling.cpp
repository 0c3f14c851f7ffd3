#include "lookahead/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "lookahead/error.hpp"

namespace lookahead {

namespace {

// Token ids ordered by descending probability, lowest id first among ties.
std::vector<std::size_t> rank_tokens(const std::vector<double>& probs) {
  std::vector<std::size_t> order(probs.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return probs[a] > probs[b]; });
  return order;
}

}  // namespace

Distribution apply_sampler(const Distribution& d, const SamplerSpec& spec) {
  if (spec.greedy()) return d;
  spec.validate();

  std::vector<double> w(d.probs().begin(), d.probs().end());
  if (spec.temperature != 1.0) {
    double max_log = -std::numeric_limits<double>::infinity();
    for (double p : w) {
      if (p > 0.0) max_log = std::max(max_log, std::log(p));
    }
    for (double& p : w) p = p > 0.0 ? std::exp((std::log(p) - max_log) / spec.temperature) : 0.0;
  }

  if (spec.top_k && *spec.top_k < w.size()) {
    const auto order = rank_tokens(w);
    for (std::size_t i = *spec.top_k; i < order.size(); ++i) w[order[i]] = 0.0;
  }

  if (spec.top_p && *spec.top_p < 1.0) {
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    const auto order = rank_tokens(w);
    double cumulative = 0.0;
    std::size_t keep = 0;
    while (keep < order.size()) {
      cumulative += w[order[keep]] / sum;
      ++keep;
      if (cumulative >= *spec.top_p) break;
    }
    for (std::size_t i = keep; i < order.size(); ++i) w[order[i]] = 0.0;
  }

  return Distribution::normalized(std::move(w));
}

Token sample_categorical(std::span<const double> probs, Rng& rng) {
  const double u = rng.uniform01();
  double cumulative = 0.0;
  std::size_t last_nonzero = probs.size();
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_nonzero = i;
    cumulative += probs[i];
    if (u < cumulative) return static_cast<Token>(i);
  }
  if (last_nonzero == probs.size()) {
    throw Error(Errc::degenerate_distribution, "cannot sample from zero mass");
  }
  // Rounding left the cumulative sum just under u.
  return static_cast<Token>(last_nonzero);
}

Token sample_token(const Distribution& d, const SamplerSpec& spec, Rng& rng) {
  if (spec.greedy()) return d.argmax();
  const Distribution t = apply_sampler(d, spec);
  return sample_categorical(t.probs(), rng);
}

}  // namespace lookahead
