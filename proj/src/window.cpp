#include "lookahead/window.hpp"

#include <string>

#include "lookahead/error.hpp"

namespace lookahead {

Window::Window(std::size_t width, std::size_t ngram, std::size_t vocab)
    : width_(width), ngram_(ngram), vocab_(vocab) {
  if (width_ < 1) throw Error(Errc::invalid_config, "window width must be >= 1");
  if (ngram_ < 2) throw Error(Errc::invalid_config, "n-gram size must be >= 2");
  if (vocab_ < 1) throw Error(Errc::invalid_config, "vocabulary must be non-empty");
  cells_.assign(levels() * width_, 0);
}

Window Window::random(std::size_t width, std::size_t ngram, std::size_t vocab, Rng& rng) {
  Window w(width, ngram, vocab);
  for (std::size_t l = 0; l < w.levels(); ++l) {
    for (std::size_t c = 0; c < width; ++c) {
      if (w.has_cell(l, c)) w.set(l, c, static_cast<Token>(rng.below(vocab)));
    }
  }
  return w;
}

Token Window::at(std::size_t level, std::size_t column) const {
  if (!has_cell(level, column)) {
    throw Error(Errc::contract_violation, "no window cell at level " + std::to_string(level) +
                                              ", column " + std::to_string(column));
  }
  return cells_[level * width_ + column];
}

void Window::set(std::size_t level, std::size_t column, Token token) {
  if (!has_cell(level, column)) {
    throw Error(Errc::contract_violation, "no window cell at level " + std::to_string(level) +
                                              ", column " + std::to_string(column));
  }
  cells_[level * width_ + column] = token;
}

std::vector<TokenSeq> collect_ngrams(const Window& window, Token last_token,
                                     std::span<const Token> new_top) {
  if (new_top.size() != window.width()) {
    throw Error(Errc::contract_violation, "new_top must hold one token per column");
  }
  std::vector<TokenSeq> out;
  out.reserve(window.width());
  for (std::size_t c = 0; c < window.width(); ++c) {
    TokenSeq gram;
    gram.reserve(window.ngram());
    gram.push_back(c == 0 ? last_token : window.at(0, c));
    for (std::size_t l = 1; l < window.levels(); ++l) gram.push_back(window.at(l, c));
    gram.push_back(new_top[c]);
    out.push_back(std::move(gram));
  }
  return out;
}

Window window_update(const Window& window, std::span<const Token> new_top, std::size_t accepted,
                     Rng& rng) {
  if (accepted < 1 || accepted > window.ngram()) {
    throw Error(Errc::contract_violation, "accepted count " + std::to_string(accepted) +
                                              " outside [1, N]");
  }
  if (new_top.size() != window.width()) {
    throw Error(Errc::contract_violation, "new_top must hold one token per column");
  }

  // With k accepted tokens every relative position drops by k, so new cell
  // (l, c) is old cell (l + 1, c + k - 1).
  const std::size_t shift = accepted - 1;
  Window next = window;
  for (std::size_t l = 0; l < window.levels(); ++l) {
    for (std::size_t c = 0; c < window.width(); ++c) {
      if (!next.has_cell(l, c)) continue;
      const std::size_t src = c + shift;
      Token t;
      if (src >= window.width()) {
        t = static_cast<Token>(rng.below(window.vocab()));
      } else if (l == window.top_level()) {
        t = new_top[src];
      } else {
        t = window.at(l + 1, src);
      }
      next.set(l, c, t);
    }
  }
  return next;
}

}  // namespace lookahead
