#include "lookahead/model.hpp"

#include <map>
#include <string>

#include "lookahead/error.hpp"

namespace lookahead {

StepLayout single_query_layout(Token last) {
  StepLayout layout;
  layout.queries.push_back(QueryToken{last, 0, {}});
  return layout;
}

void validate_layout(const StepLayout& layout, std::size_t vocab_size) {
  if (layout.queries.empty()) throw Error(Errc::invalid_layout, "layout has no queries");
  if (layout.queries[0].rel_pos != 0) {
    throw Error(Errc::invalid_layout, "query 0 must sit at relative position 0");
  }
  for (std::size_t q = 0; q < layout.queries.size(); ++q) {
    const QueryToken& query = layout.queries[q];
    if (query.token >= vocab_size) {
      throw Error(Errc::invalid_layout, "query " + std::to_string(q) + " token " +
                                            std::to_string(query.token) + " outside vocabulary");
    }
    if (q > 0 && query.rel_pos == 0) {
      throw Error(Errc::invalid_layout, "only query 0 may sit at relative position 0");
    }
    for (std::size_t v : query.visible) {
      if (v >= q) {
        throw Error(Errc::invalid_layout, "query " + std::to_string(q) +
                                              " references non-preceding query " + std::to_string(v));
      }
      if (layout.queries[v].rel_pos >= query.rel_pos) {
        throw Error(Errc::invalid_layout, "query " + std::to_string(q) +
                                              " sees query " + std::to_string(v) +
                                              " at a non-smaller relative position");
      }
    }
  }
}

TokenSeq query_chain(const StepLayout& layout, std::size_t query) {
  const QueryToken& q = layout.queries.at(query);
  if (query == 0) return {q.token};

  std::map<std::size_t, Token> by_pos;
  for (std::size_t v : q.visible) {
    const QueryToken& seen = layout.queries.at(v);
    if (seen.rel_pos == 0) continue;  // query 0 is implicit
    auto [it, inserted] = by_pos.emplace(seen.rel_pos, seen.token);
    if (!inserted && it->second != seen.token) {
      throw Error(Errc::invalid_layout, "query " + std::to_string(query) +
                                            " sees two tokens at relative position " +
                                            std::to_string(seen.rel_pos));
    }
  }

  TokenSeq reversed{q.token};
  std::size_t pos = q.rel_pos;
  while (pos > 1) {
    const auto it = by_pos.find(pos - 1);
    if (it == by_pos.end()) break;
    reversed.push_back(it->second);
    --pos;
  }
  if (pos == 1) reversed.push_back(layout.queries[0].token);
  return TokenSeq(reversed.rbegin(), reversed.rend());
}

Distribution Model::next_distribution(std::span<const Token> sequence) const {
  if (sequence.empty()) throw Error(Errc::invalid_config, "empty sequence");
  return forward(sequence.first(sequence.size() - 1), single_query_layout(sequence.back()))[0];
}

}  // namespace lookahead
