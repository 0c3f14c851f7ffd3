#pragma once

#include <cstddef>
#include <cstdint>
#include <list>
#include <map>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "lookahead/types.hpp"

namespace lookahead {

// Cache of n-grams harvested from the lookahead trajectory, keyed by leading
// token. Each bucket is kept most-recent-first; re-inserting an existing
// n-gram refreshes its recency. With a capacity, the globally least recently
// inserted entry is evicted.
class NGramPool {
 public:
  explicit NGramPool(std::size_t ngram_size, std::optional<std::size_t> capacity = std::nullopt);

  std::size_t ngram_size() const { return n_; }
  std::optional<std::size_t> capacity() const { return capacity_; }
  std::size_t size() const { return size_; }
  bool empty() const { return size_ == 0; }

  // Throws Error(invalid_ngram) unless ngram.size() == ngram_size().
  void insert(std::span<const Token> ngram);

  // Up to `max_count` suffixes led by `lead`, most recently inserted first.
  std::vector<TokenSeq> lookup(Token lead, std::size_t max_count) const;

  // Inserts every contiguous n-token window, left to right. Prompts shorter
  // than the n-gram size leave the pool untouched.
  void seed_from_prompt(std::span<const Token> prompt);

 private:
  struct Entry {
    TokenSeq suffix;
    std::uint64_t stamp;
  };

  void evict_oldest();

  std::size_t n_;
  std::optional<std::size_t> capacity_;
  std::size_t size_ = 0;
  std::uint64_t counter_ = 0;
  std::unordered_map<Token, std::list<Entry>> buckets_;
  std::map<std::uint64_t, Token> by_stamp_;
};

}  // namespace lookahead
