#include <doctest.h>

#include <fstream>
#include <set>
#include <sstream>

#include "lookahead/error.hpp"
#include "lookahead/layout.hpp"
#include "lookahead/ngram_pool.hpp"
#include "lookahead/window.hpp"
#include "support.hpp"

using namespace lookahead;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc::io_error;
}

Window constant_window(std::size_t width, std::size_t ngram, Token t) {
  Rng rng(0);
  Window w = Window::random(width, ngram, 64, rng);
  for (std::size_t l = 0; l < w.levels(); ++l) {
    for (std::size_t c = 0; c < width; ++c) {
      if (w.has_cell(l, c)) w.set(l, c, t);
    }
  }
  return w;
}

// Window whose cell (l, c) holds token 10 * l + c, so tokens name their cells.
Window labelled_window(std::size_t width, std::size_t ngram) {
  Rng rng(0);
  Window w = Window::random(width, ngram, 100, rng);
  for (std::size_t l = 0; l < w.levels(); ++l) {
    for (std::size_t c = 0; c < width; ++c) {
      if (w.has_cell(l, c)) w.set(l, c, static_cast<Token>(10 * l + c));
    }
  }
  return w;
}

std::set<std::size_t> as_set(const std::vector<std::size_t>& v) { return {v.begin(), v.end()}; }

}  // namespace

TEST_CASE("window geometry") {
  Rng rng(1);
  const Window w = Window::random(5, 4, 50, rng);
  CHECK(w.levels() == 3);
  CHECK(w.level_size(0) == 4);
  CHECK(w.level_size(1) == 5);
  CHECK(w.level_size(2) == 5);
  CHECK(w.cell_count() == 14);
  CHECK_FALSE(w.has_cell(0, 0));
  CHECK(w.rel_pos(2, 4) == 6);
  CHECK(code_of([&] { w.at(0, 0); }) == Errc::contract_violation);
  CHECK(code_of([&] { w.at(3, 0); }) == Errc::contract_violation);

  Rng rng2(1);
  const Window n2 = Window::random(5, 2, 50, rng2);
  CHECK(n2.levels() == 1);
  CHECK(n2.cell_count() == 4);

  Rng a(7), b(7);
  CHECK(Window::random(6, 3, 20, a) == Window::random(6, 3, 20, b));
  CHECK(code_of([&] { Window::random(0, 3, 20, a); }) == Errc::invalid_config);
  CHECK(code_of([&] { Window::random(3, 1, 20, a); }) == Errc::invalid_config);
}

TEST_CASE("top cell sees its column and the whole first level") {
  Rng rng(2);
  const Window w = Window::random(5, 4, 50, rng);
  const CombinedLayout c = build_layout(w, 1, {});
  const std::size_t red = c.top_query(4);
  CHECK(c.layout.queries[red].rel_pos == 6);
  const std::size_t green = c.window_query(1, 4);
  CHECK(c.layout.queries[green].rel_pos == 5);
  std::set<std::size_t> want{green};
  for (std::size_t col = 1; col < 5; ++col) want.insert(c.window_query(0, col));
  CHECK(as_set(c.layout.queries[red].visible) == want);
}

TEST_CASE("width one with bigram windows is a single query") {
  Rng rng(3);
  const Window w = Window::random(1, 2, 10, rng);
  CHECK(w.cell_count() == 0);
  const CombinedLayout c = build_layout(w, 4, {});
  CHECK(c.layout.size() == 1);
  CHECK(c.top_query(0) == 0);
}

TEST_CASE("candidate branches are disjoint") {
  Rng rng(4);
  const Window w = Window::random(3, 3, 10, rng);
  const std::vector<TokenSeq> cands{{5, 6}, {5, 6}};
  const CombinedLayout c = build_layout(w, 4, cands);
  REQUIRE(c.candidate_count() == 2);
  const auto& b0 = c.branch_query[0];
  const auto& b1 = c.branch_query[1];
  CHECK(c.layout.queries[b0[0]].visible.empty());
  CHECK(c.layout.queries[b1[0]].visible.empty());
  CHECK(c.layout.queries[b0[1]].visible == std::vector<std::size_t>{b0[0]});
  CHECK(c.layout.queries[b1[1]].visible == std::vector<std::size_t>{b1[0]});
  CHECK(c.layout.queries[b1[1]].rel_pos == 2);

  const std::vector<TokenSeq> bad{{5}};
  CHECK(code_of([&] { build_layout(w, 4, bad); }) == Errc::invalid_candidate);
}

TEST_CASE("layout properties over random configurations") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t W = 1 + rng.below(8), N = 2 + rng.below(5), vocab = 40;
    const Window w = Window::random(W, N, vocab, rng);
    std::vector<TokenSeq> cands(rng.below(W + 1));
    for (TokenSeq& s : cands) s = testing::random_tokens(rng, vocab, N - 1);
    const Token last = static_cast<Token>(rng.below(vocab));
    const CombinedLayout c = build_layout(w, last, cands);
    const StepLayout& L = c.layout;

    CHECK(L.size() == 1 + ((N - 1) * W - 1) + cands.size() * (N - 1));
    CHECK(L.size() <= (W + cands.size()) * (N - 1) + 1);
    CHECK_NOTHROW(validate_layout(L, vocab));
    CHECK(L.queries[0].token == last);

    // Oracle visibility from the geometric rule.
    for (std::size_t l = 0; l < N - 1; ++l) {
      for (std::size_t col = 0; col < W; ++col) {
        if (!w.has_cell(l, col)) continue;
        const QueryToken& q = L.queries[c.window_query(l, col)];
        CHECK(q.token == w.at(l, col));
        CHECK(q.rel_pos == l + col);
        std::set<std::size_t> want;
        const std::size_t last_first_level = l == 0 ? col : col + 1;
        for (std::size_t j = 1; j < last_first_level; ++j) want.insert(c.window_query(0, j));
        for (std::size_t m = 1; m < l; ++m) want.insert(c.window_query(m, col));
        CHECK(as_set(q.visible) == want);
      }
    }
    for (std::size_t b = 0; b < cands.size(); ++b) {
      for (std::size_t k = 1; k < N; ++k) {
        const QueryToken& q = L.queries[c.branch_query[b][k - 1]];
        CHECK(q.token == cands[b][k - 1]);
        CHECK(q.rel_pos == k);
        const std::set<std::size_t> want(c.branch_query[b].begin(), c.branch_query[b].begin() + (k - 1));
        CHECK(as_set(q.visible) == want);
      }
    }

    // Every query has one token per earlier position back to query 0.
    for (std::size_t q = 0; q < L.size(); ++q) {
      const TokenSeq chain = query_chain(L, q);
      CHECK(chain.size() == L.queries[q].rel_pos + 1);
      CHECK(chain.front() == last);
    }
  }
}

TEST_CASE("visibility dump matches the golden file") {
  Rng rng(0);
  Window w = labelled_window(5, 4);
  const std::vector<TokenSeq> cands{{91, 92, 93}, {94, 95, 96}};
  const CombinedLayout c = build_layout(w, 99, cands);
  std::ifstream in(std::string(LOOKAHEAD_GOLDEN_DIR) + "/layout_w5_n4_g2.txt");
  REQUIRE(in);
  std::stringstream golden;
  golden << in.rdbuf();
  CHECK(render_visibility(c.layout) == golden.str());
}

TEST_CASE("n-gram collection") {
  const Window w = labelled_window(5, 4);
  const TokenSeq new_top{80, 81, 82, 83, 84};
  const auto grams = collect_ngrams(w, 99, new_top);
  REQUIRE(grams.size() == 5);
  CHECK(grams[0] == TokenSeq{99, 10, 20, 80});
  CHECK(grams[3] == TokenSeq{3, 13, 23, 83});
  // Tokens name their cells: position of (l, c) is l + c, so each gram walks
  // consecutive positions c, c+1, ..., c+N-1.
  for (std::size_t col = 1; col < 5; ++col) {
    for (std::size_t l = 0; l < 3; ++l) CHECK(grams[col][l] % 10 + grams[col][l] / 10 == col + l);
  }

  Rng rng(6);
  const Window n2 = Window::random(4, 2, 30, rng);
  const auto pairs = collect_ngrams(n2, 7, TokenSeq{1, 2, 3, 4});
  REQUIRE(pairs.size() == 4);
  CHECK(pairs[0] == TokenSeq{7, 1});
  for (std::size_t col = 1; col < 4; ++col) CHECK(pairs[col] == TokenSeq{n2.at(0, col), Token(col + 1)});

  const Window flat = constant_window(5, 4, 3);
  NGramPool pool(4);
  for (const TokenSeq& g : collect_ngrams(flat, 3, TokenSeq(5, 8))) {
    CHECK(g == TokenSeq{3, 3, 3, 8});
    pool.insert(g);
  }
  CHECK(pool.size() == 1);
}

TEST_CASE("window update with one accepted token") {
  const Window w = labelled_window(5, 4);
  Rng rng(1);
  const Rng untouched = rng;
  const TokenSeq new_top{80, 81, 82, 83, 84};
  const Window next = window_update(w, new_top, 1, rng);
  for (std::size_t col = 1; col < 5; ++col) CHECK(next.at(0, col) == w.at(1, col));
  for (std::size_t col = 0; col < 5; ++col) {
    CHECK(next.at(1, col) == w.at(2, col));
    CHECK(next.at(2, col) == new_top[col]);
  }
  CHECK(rng == untouched);
}

TEST_CASE("window update with full acceptance refills from the generator") {
  const std::size_t W = 5, N = 4;
  const Window w = labelled_window(W, N);
  const TokenSeq new_top{80, 81, 82, 83, 84};
  Rng rng(9), oracle(9);
  const Window next = window_update(w, new_top, N, rng);
  const std::size_t shift = N - 1;
  for (std::size_t l = 0; l < N - 1; ++l) {
    for (std::size_t col = l == 0 ? 1 : 0; col < W; ++col) {
      const std::size_t src = col + shift;
      Token want;
      if (src >= W) {
        want = static_cast<Token>(oracle.below(100));
      } else {
        want = l + 1 < N - 1 ? w.at(l + 1, src) : new_top[src];
      }
      CHECK(next.at(l, col) == want);
    }
  }
  CHECK(rng == oracle);

  Rng a(3), b(3);
  CHECK(window_update(w, new_top, 2, a) == window_update(w, new_top, 2, b));
  CHECK(code_of([&] { window_update(w, new_top, 0, a); }) == Errc::contract_violation);
  CHECK(code_of([&] { window_update(w, new_top, N + 1, a); }) == Errc::contract_violation);
  CHECK(code_of([&] { window_update(w, TokenSeq{1, 2}, 1, a); }) == Errc::contract_violation);
}

TEST_CASE("window geometry survives random updates") {
  Rng rng(10);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t W = 1 + rng.below(6), N = 2 + rng.below(4);
    Window w = Window::random(W, N, 20, rng);
    for (int step = 0; step < 10; ++step) {
      w = window_update(w, testing::random_tokens(rng, 20, W), 1 + rng.below(N), rng);
      CHECK(w.width() == W);
      CHECK(w.ngram() == N);
      for (std::size_t l = 0; l < N - 1; ++l) {
        for (std::size_t col = 0; col < W; ++col) {
          if (w.has_cell(l, col)) CHECK(w.at(l, col) < 20);
        }
      }
    }
  }
}
