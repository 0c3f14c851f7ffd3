#include "lookahead/types.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "lookahead/error.hpp"

namespace lookahead {

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw Error(Errc::degenerate_distribution, "empty distribution");
  double sum = 0.0;
  for (double p : probs_) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw Error(Errc::degenerate_distribution, "negative or non-finite probability");
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kSumTolerance) {
    throw Error(Errc::degenerate_distribution, "probabilities sum to " + std::to_string(sum));
  }
}

Distribution Distribution::uniform(std::size_t vocab) {
  return Distribution(std::vector<double>(vocab, 1.0 / static_cast<double>(vocab)));
}

Distribution Distribution::normalized(std::vector<double> weights) {
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(Errc::degenerate_distribution, "negative or non-finite weight");
    }
    sum += w;
  }
  if (!(sum > 0.0)) throw Error(Errc::degenerate_distribution, "no probability mass");
  for (double& w : weights) w /= sum;
  return Distribution(std::move(weights));
}

Token Distribution::argmax() const {
  std::size_t best = 0;
  for (std::size_t i = 1; i < probs_.size(); ++i) {
    if (probs_[i] > probs_[best]) best = i;
  }
  return static_cast<Token>(best);
}

double total_variation(std::span<const double> a, std::span<const double> b) {
  double tv = 0.0;
  for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) tv += std::abs(a[i] - b[i]);
  for (std::size_t i = b.size(); i < a.size(); ++i) tv += a[i];
  for (std::size_t i = a.size(); i < b.size(); ++i) tv += b[i];
  return 0.5 * tv;
}

void SamplerSpec::validate() const {
  if (mode == SamplingMode::greedy) return;
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw Error(Errc::invalid_config, "temperature must be positive");
  }
  if (top_k && *top_k == 0) throw Error(Errc::invalid_config, "top_k must be positive");
  if (top_p && !(*top_p > 0.0 && *top_p <= 1.0)) {
    throw Error(Errc::invalid_config, "top_p must lie in (0, 1]");
  }
}

void GenerationConfig::validate() const {
  if (window < 1) throw Error(Errc::invalid_config, "window size W must be >= 1");
  if (ngram < 2) throw Error(Errc::invalid_config, "n-gram size N must be >= 2");
  if (max_tokens < 1) throw Error(Errc::invalid_config, "max_tokens must be >= 1");
  if (pool_capacity && *pool_capacity == 0) {
    throw Error(Errc::invalid_config, "pool capacity must be positive");
  }
}

}  // namespace lookahead
