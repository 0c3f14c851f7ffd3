#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace lookahead {

using Token = std::uint32_t;
using TokenSeq = std::vector<Token>;

// Next-token probability vector over the whole vocabulary.
class Distribution {
 public:
  static constexpr double kSumTolerance = 1e-9;

  Distribution() = default;
  // Validates non-negativity and unit mass; throws Error(degenerate_distribution).
  explicit Distribution(std::vector<double> probs);

  // Uniform over `vocab` tokens.
  static Distribution uniform(std::size_t vocab);
  // Scales non-negative weights to unit mass.
  static Distribution normalized(std::vector<double> weights);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t token) const { return probs_[token]; }
  std::span<const double> probs() const { return probs_; }

  // Lowest token id attaining the maximum.
  Token argmax() const;

  friend bool operator==(const Distribution&, const Distribution&) = default;

 private:
  std::vector<double> probs_;
};

double total_variation(std::span<const double> a, std::span<const double> b);

enum class SamplingMode { greedy, temperature };

struct SamplerSpec {
  SamplingMode mode = SamplingMode::greedy;
  double temperature = 1.0;
  std::optional<std::size_t> top_k;
  std::optional<double> top_p;
  std::uint64_t seed = 0;

  bool greedy() const { return mode == SamplingMode::greedy; }
  void validate() const;
};

struct GenerationConfig {
  std::size_t window = 15;                // W
  std::size_t ngram = 5;                  // N
  std::optional<std::size_t> candidates;  // G; defaults to W
  std::size_t max_tokens = 64;
  std::optional<Token> eos;
  bool seed_pool_from_prompt = false;
  std::optional<std::size_t> pool_capacity;

  std::size_t max_candidates() const { return candidates.value_or(window); }
  void validate() const;
};

struct StepRecord {
  std::size_t accepted_count = 0;
  std::size_t candidate_count = 0;
  std::size_t query_count = 0;
  std::size_t pool_size = 0;
};

}  // namespace lookahead
