#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "lookahead/layout.hpp"
#include "lookahead/model.hpp"
#include "lookahead/ngram_pool.hpp"
#include "lookahead/rng.hpp"
#include "lookahead/types.hpp"
#include "lookahead/window.hpp"

namespace lookahead {

// Evaluates a step layout; the plain route is Model::forward, the simulated
// multi-device route lives in lp_sim.
using LayoutForward =
    std::function<std::vector<Distribution>(std::span<const Token> prefix, const CombinedLayout&)>;

struct StepOutcome {
  TokenSeq accepted;  // 1..N tokens, before any eos / max_tokens truncation
  TokenSeq new_top;   // greedy outputs of the window's top level
  std::size_t candidate_count = 0;
  std::size_t query_count = 0;

  friend bool operator==(const StepOutcome&, const StepOutcome&) = default;
};

// Session state of one lookahead decode. `sequence` is prompt ++ output.
struct DecodeState {
  DecodeState(const Model& model, TokenSeq prompt, GenerationConfig config, SamplerSpec sampler);

  const Model* model;
  TokenSeq sequence;
  std::size_t prompt_length;
  GenerationConfig config;
  SamplerSpec sampler;
  Rng rng;
  Window window;
  NGramPool pool;
  std::vector<StepRecord> records;
  bool finished = false;

  std::span<const Token> output() const {
    return std::span<const Token>(sequence).subspan(prompt_length);
  }
};

struct JacobiResult {
  TokenSeq tokens;
  std::vector<TokenSeq> trajectory;  // y^0 .. y^T
  std::size_t iterations = 0;
};

// Plain one-token-per-step decoding. Stops after max_tokens or once eos is
// emitted (eos included). Throws Error(invalid_config) on an empty prompt.
TokenSeq decode_autoregressive(const Model& model, std::span<const Token> prompt,
                               const SamplerSpec& sampler, std::size_t max_tokens,
                               std::optional<Token> eos = std::nullopt);

// Greedy Jacobi fixed-point iteration over m positions from a seeded random
// guess; stops at a fixed point or after m iterations.
JacobiResult decode_jacobi(const Model& model, std::span<const Token> prompt, std::size_t m,
                           Rng& rng);

// One lookahead step: candidate lookup, one combined forward, verification,
// pool update and window update. Appends accepted tokens (truncated at eos
// or max_tokens) to the state and records metrics.
StepOutcome lookahead_step(DecodeState& state);
StepOutcome lookahead_step(DecodeState& state, const LayoutForward& forward);

struct LookaheadResult {
  TokenSeq tokens;
  std::vector<StepRecord> records;
};

LookaheadResult decode_lookahead(const Model& model, std::span<const Token> prompt,
                                 const GenerationConfig& config, const SamplerSpec& sampler);

}  // namespace lookahead
