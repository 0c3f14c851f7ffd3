#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "lookahead/model.hpp"

namespace lookahead {

struct TransformerDims {
  std::size_t vocab = 32;
  std::size_t dim = 16;
  std::size_t layers = 2;
  std::size_t heads = 2;
  std::size_t hidden = 64;  // feed-forward width

  void validate() const;
};

// Small pre-norm decoder-only transformer with seeded random weights and
// sinusoidal absolute positions. Every node attends over its context in
// ascending key-position order, so a query's output depends only on its own
// context, never on how queries are batched into a layout.
class TinyTransformer final : public Model {
 public:
  TinyTransformer(std::uint64_t seed, TransformerDims dims);

  std::size_t vocab_size() const override { return dims_.vocab; }
  std::string name() const override { return "transformer"; }
  const TransformerDims& dims() const { return dims_; }
  std::uint64_t seed() const { return seed_; }

  std::vector<Distribution> forward(std::span<const Token> prefix,
                                    const StepLayout& layout) const override;

 private:
  struct Layer {
    std::vector<double> ln1_gain, ln2_gain;
    std::vector<double> wq, wk, wv, wo;  // dim x dim, row-major
    std::vector<double> w1, b1;          // hidden x dim
    std::vector<double> w2, b2;          // dim x hidden
  };

  struct Node {
    Token token;
    std::size_t position;
    std::vector<std::size_t> context;  // node indices, ascending position, self last
  };

  std::vector<double> run(const std::vector<Node>& nodes, std::size_t first_output) const;

  std::uint64_t seed_;
  TransformerDims dims_;
  std::vector<double> embedding_;  // vocab x dim
  std::vector<Layer> layers_;
  std::vector<double> final_gain_;
  std::vector<double> unembedding_;  // vocab x dim
};

}  // namespace lookahead
