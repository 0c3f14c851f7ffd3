#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "lookahead/rng.hpp"
#include "lookahead/types.hpp"

namespace lookahead {

// The lookahead branch: N-1 staggered levels of W columns (0-based). The cell
// at (level, column) sits at relative position level + column. Level 0 has no
// column 0, since that slot is the last confirmed token itself.
class Window {
 public:
  // Every cell drawn uniformly from [0, vocab). Throws Error(invalid_config)
  // unless width >= 1, ngram >= 2 and vocab >= 1.
  static Window random(std::size_t width, std::size_t ngram, std::size_t vocab, Rng& rng);

  std::size_t width() const { return width_; }
  std::size_t ngram() const { return ngram_; }
  std::size_t levels() const { return ngram_ - 1; }
  std::size_t top_level() const { return ngram_ - 2; }
  std::size_t vocab() const { return vocab_; }

  bool has_cell(std::size_t level, std::size_t column) const {
    return level < levels() && column < width_ && (level > 0 || column > 0);
  }
  std::size_t rel_pos(std::size_t level, std::size_t column) const { return level + column; }
  std::size_t cell_count() const { return levels() * width_ - 1; }
  std::size_t level_size(std::size_t level) const { return level == 0 ? width_ - 1 : width_; }

  Token at(std::size_t level, std::size_t column) const;
  void set(std::size_t level, std::size_t column, Token token);

  friend bool operator==(const Window&, const Window&) = default;

 private:
  Window(std::size_t width, std::size_t ngram, std::size_t vocab);

  std::size_t width_;
  std::size_t ngram_;
  std::size_t vocab_;
  std::vector<Token> cells_;  // levels x width; slot (0, 0) unused
};

// The n-gram of each column: (level-0, level-1, ..., top, new token), with
// column 0 starting at `last_token`. new_top[c] is the output of the top
// level's column c. Returns W n-grams of length N, left to right.
std::vector<TokenSeq> collect_ngrams(const Window& window, Token last_token,
                                     std::span<const Token> new_top);

// Advances the window after a step that accepted `accepted` tokens: level 0
// is dropped, every level moves down one, new_top becomes the top level, all
// columns shift left by accepted - 1, and vacated cells are refilled from
// `rng` (level-major, column ascending). Throws Error(contract_violation)
// unless 1 <= accepted <= N and new_top has W tokens.
Window window_update(const Window& window, std::span<const Token> new_top, std::size_t accepted,
                     Rng& rng);

}  // namespace lookahead
