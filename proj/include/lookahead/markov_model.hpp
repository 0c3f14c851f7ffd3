#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <span>
#include <utility>
#include <vector>

#include "lookahead/model.hpp"

namespace lookahead {

// Order-k Markov model with additive (Laplace) smoothing:
//   P(t | c) = (count(c, t) + lambda) / (count(c) + lambda * V)
// Contexts shorter than k (start of a sequence) use their own count tables;
// an empty or unseen context falls back to the smoothed unigram marginal.
class MarkovModel final : public Model {
 public:
  struct ContextCounts {
    std::uint64_t total = 0;
    std::vector<std::pair<Token, std::uint64_t>> next;  // sorted by token
    friend bool operator==(const ContextCounts&, const ContextCounts&) = default;
  };

  // Throws Error(invalid_config) if order == 0, lambda <= 0 or vocab == 0,
  // and Error(parse_error) if a corpus token is outside the vocabulary.
  static MarkovModel train(std::span<const TokenSeq> corpus, std::size_t order, double lambda,
                           std::size_t vocab_size);

  std::size_t vocab_size() const override { return vocab_; }
  std::string name() const override { return "markov"; }
  std::size_t order() const { return order_; }
  double lambda() const { return lambda_; }
  std::size_t context_count() const;

  // Distribution after `context`; only the last min(order, size) tokens are used.
  Distribution conditional(std::span<const Token> context) const;

  // Each query conditions on prefix ++ query 0 ++ its visible chain.
  std::vector<Distribution> forward(std::span<const Token> prefix,
                                    const StepLayout& layout) const override;

  // Versioned textual count table. load throws Error(parse_error).
  void save(std::ostream& out) const;
  static MarkovModel load(std::istream& in);

  friend bool operator==(const MarkovModel& a, const MarkovModel& b) {
    return a.order_ == b.order_ && a.lambda_ == b.lambda_ && a.vocab_ == b.vocab_ &&
           a.marginal_ == b.marginal_ && a.tables_ == b.tables_;
  }

 private:
  MarkovModel(std::size_t order, double lambda, std::size_t vocab);
  Distribution smoothed(const ContextCounts& counts) const;

  std::size_t order_;
  double lambda_;
  std::size_t vocab_;
  // tables_[len - 1] maps contexts of length len to their successor counts.
  std::vector<std::map<TokenSeq, ContextCounts>> tables_;
  ContextCounts marginal_;
};

}  // namespace lookahead
