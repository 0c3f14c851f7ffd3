#include "lookahead/layout.hpp"

#include <sstream>
#include <string>

#include "lookahead/error.hpp"

namespace lookahead {

CombinedLayout build_layout(const Window& window, Token last_token,
                            std::span<const TokenSeq> candidates) {
  const std::size_t width = window.width();
  const std::size_t n = window.ngram();

  CombinedLayout out;
  out.width = width;
  out.ngram = n;
  out.cell_query.assign(window.levels() * width, kNoQuery);
  auto& queries = out.layout.queries;
  queries.reserve(1 + window.cell_count() + candidates.size() * (n - 1));
  queries.push_back(QueryToken{last_token, 0, {}});

  for (std::size_t l = 0; l < window.levels(); ++l) {
    for (std::size_t c = 0; c < width; ++c) {
      if (!window.has_cell(l, c)) continue;
      QueryToken q{window.at(l, c), window.rel_pos(l, c), {}};
      // Level-0 cells of earlier columns (and of this column for l >= 1).
      const std::size_t last_col = l == 0 ? c : c + 1;
      for (std::size_t j = 1; j < last_col; ++j) q.visible.push_back(out.cell_query[j]);
      // Same column, levels below.
      for (std::size_t m = 1; m < l; ++m) q.visible.push_back(out.cell_query[m * width + c]);
      out.cell_query[l * width + c] = queries.size();
      queries.push_back(std::move(q));
    }
  }

  out.branch_query.reserve(candidates.size());
  for (std::size_t b = 0; b < candidates.size(); ++b) {
    const TokenSeq& suffix = candidates[b];
    if (suffix.size() != n - 1) {
      throw Error(Errc::invalid_candidate, "candidate " + std::to_string(b) + " has length " +
                                               std::to_string(suffix.size()) + ", expected " +
                                               std::to_string(n - 1));
    }
    std::vector<std::size_t> branch;
    for (std::size_t k = 0; k < suffix.size(); ++k) {
      QueryToken q{suffix[k], k + 1, branch};
      branch.push_back(queries.size());
      queries.push_back(std::move(q));
    }
    out.branch_query.push_back(std::move(branch));
  }
  return out;
}

StepLayout chain_layout(Token last_token, std::span<const Token> chain) {
  StepLayout layout;
  layout.queries.reserve(chain.size() + 1);
  layout.queries.push_back(QueryToken{last_token, 0, {}});
  std::vector<std::size_t> seen;
  for (std::size_t i = 0; i < chain.size(); ++i) {
    layout.queries.push_back(QueryToken{chain[i], i + 1, seen});
    seen.push_back(i + 1);
  }
  return layout;
}

std::string render_visibility(const StepLayout& layout) {
  std::ostringstream out;
  const std::size_t n = layout.size();
  for (std::size_t q = 0; q < n; ++q) {
    const QueryToken& query = layout.queries[q];
    std::string row(n, '.');
    row[0] = 'x';
    for (std::size_t v : query.visible) row[v] = 'x';
    row[q] = '@';
    out << q << ' ' << query.rel_pos << ' ' << query.token << " |" << row << '\n';
  }
  return out.str();
}

}  // namespace lookahead
