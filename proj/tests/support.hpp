#pragma once

#include <cstdint>
#include <vector>

#include "lookahead/markov_model.hpp"
#include "lookahead/model.hpp"
#include "lookahead/rng.hpp"
#include "lookahead/tiny_transformer.hpp"
#include "lookahead/types.hpp"

namespace testing {

using lookahead::Token;
using lookahead::TokenSeq;

// A corpus made of a few fixed phrases repeated in random order, so an
// order-k Markov model trained on it has long deterministic runs.
inline TokenSeq phrase_corpus(std::uint64_t seed, std::size_t vocab, std::size_t phrases,
                              std::size_t phrase_length, std::size_t repeats) {
  lookahead::Rng rng(seed, 99);
  std::vector<TokenSeq> bank(phrases);
  for (TokenSeq& p : bank) {
    for (std::size_t i = 0; i < phrase_length; ++i) p.push_back(static_cast<Token>(rng.below(vocab)));
  }
  TokenSeq corpus;
  for (std::size_t r = 0; r < repeats; ++r) {
    const TokenSeq& p = bank[rng.below(phrases)];
    corpus.insert(corpus.end(), p.begin(), p.end());
  }
  return corpus;
}

inline lookahead::MarkovModel reference_markov(std::size_t vocab = 32, std::size_t order = 2) {
  const std::vector<TokenSeq> corpus{phrase_corpus(11, vocab, 6, 10, 400)};
  return lookahead::MarkovModel::train(corpus, order, 0.05, vocab);
}

inline lookahead::TinyTransformer reference_transformer(std::uint64_t seed = 5) {
  return lookahead::TinyTransformer(seed, lookahead::TransformerDims{});
}

inline TokenSeq random_tokens(lookahead::Rng& rng, std::size_t vocab, std::size_t length) {
  TokenSeq out(length);
  for (Token& t : out) t = static_cast<Token>(rng.below(vocab));
  return out;
}

// Greedy continuation computed one model call per token.
inline TokenSeq greedy_oracle(const lookahead::Model& model, TokenSeq sequence, std::size_t count) {
  TokenSeq out;
  for (std::size_t i = 0; i < count; ++i) {
    const std::span<const Token> prefix(sequence.data(), sequence.size() - 1);
    const auto dists = model.forward(prefix, lookahead::single_query_layout(sequence.back()));
    const auto probs = dists.at(0).probs();
    Token best = 0;
    for (Token t = 1; t < probs.size(); ++t) {
      if (probs[t] > probs[best]) best = t;
    }
    out.push_back(best);
    sequence.push_back(best);
  }
  return out;
}

}  // namespace testing
