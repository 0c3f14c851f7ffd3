#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "lookahead/model.hpp"
#include "lookahead/window.hpp"

namespace lookahead {

inline constexpr std::size_t kNoQuery = std::numeric_limits<std::size_t>::max();

// The combined lookahead + verification step, with the query index of every
// window cell and candidate token so outputs can be routed back.
struct CombinedLayout {
  StepLayout layout;
  std::size_t width = 0;
  std::size_t ngram = 0;
  // cell_query[level * width + column]; kNoQuery for level 0 column 0, whose
  // role is played by query 0.
  std::vector<std::size_t> cell_query;
  // branch_query[candidate][offset - 1] for offsets 1..N-1.
  std::vector<std::vector<std::size_t>> branch_query;

  std::size_t window_query(std::size_t level, std::size_t column) const {
    return level == 0 && column == 0 ? 0 : cell_query[level * width + column];
  }
  // Query whose output is the new token of `column` (top level).
  std::size_t top_query(std::size_t column) const { return window_query(ngram - 2, column); }
  std::size_t candidate_count() const { return branch_query.size(); }
};

// Query order: query 0, level-0 cells, levels 1..N-2 (each column ascending),
// then candidate branches. Window cell (0, c) sees level-0 columns 1..c-1;
// cell (l >= 1, c) sees level-0 columns 1..c and cells (1..l-1, c). Candidate
// offset k sees offsets < k of its own branch. The two branches never see
// each other. Throws Error(invalid_candidate) on a suffix length != N - 1.
CombinedLayout build_layout(const Window& window, Token last_token,
                            std::span<const TokenSeq> candidates);

// Triangular chain: query 0 = last_token, then chain[i] at rel_pos i + 1
// seeing all earlier chain tokens.
StepLayout chain_layout(Token last_token, std::span<const Token> chain);

// Text dump: one row per query, "index rel_pos token |" followed by one
// character per query: 'x' visible (query 0 always), '@' self, '.' hidden.
std::string render_visibility(const StepLayout& layout);

}  // namespace lookahead
