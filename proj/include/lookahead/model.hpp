#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "lookahead/types.hpp"

namespace lookahead {

// One input token of a parallel step. `visible` holds indices of earlier
// queries in the same layout; every query additionally sees the whole
// prefix and query 0 without listing them.
struct QueryToken {
  Token token = 0;
  std::size_t rel_pos = 0;
  std::vector<std::size_t> visible;
};

// Query 0 is always the last confirmed token at relative position 0.
struct StepLayout {
  std::vector<QueryToken> queries;

  std::size_t size() const { return queries.size(); }
};

// Degenerate layout holding only the last confirmed token.
StepLayout single_query_layout(Token last);

// Throws Error(invalid_layout) on an empty layout, a query 0 off rel_pos 0,
// a visible index at or after its owner, a visible query whose rel_pos is not
// strictly smaller, or a token outside the vocabulary.
void validate_layout(const StepLayout& layout, std::size_t vocab_size);

// Tokens of the consecutive-position chain ending at `query`, oldest first,
// excluding the prefix. Stops early if a relative position is missing from
// the visible set; throws Error(invalid_layout) if a position is ambiguous.
TokenSeq query_chain(const StepLayout& layout, std::size_t query);

// Autoregressive language model evaluated over a masked multi-query step.
class Model {
 public:
  virtual ~Model() = default;

  virtual std::size_t vocab_size() const = 0;
  virtual std::string name() const = 0;

  // One distribution per query, in layout order. `prefix` is the confirmed
  // sequence without its last token (which is query 0). Must be a pure,
  // bit-reproducible function of its arguments.
  virtual std::vector<Distribution> forward(std::span<const Token> prefix,
                                            const StepLayout& layout) const = 0;

  // Next-token distribution of a confirmed sequence; `sequence` must be
  // non-empty.
  Distribution next_distribution(std::span<const Token> sequence) const;
};

}  // namespace lookahead
