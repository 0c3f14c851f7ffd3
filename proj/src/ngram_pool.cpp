#include "lookahead/ngram_pool.hpp"

#include <algorithm>
#include <string>

#include "lookahead/error.hpp"

namespace lookahead {

NGramPool::NGramPool(std::size_t ngram_size, std::optional<std::size_t> capacity)
    : n_(ngram_size), capacity_(capacity) {
  if (n_ < 2) throw Error(Errc::invalid_config, "n-gram size must be >= 2");
  if (capacity_ && *capacity_ == 0) throw Error(Errc::invalid_config, "pool capacity must be positive");
}

void NGramPool::insert(std::span<const Token> ngram) {
  if (ngram.size() != n_) {
    throw Error(Errc::invalid_ngram, "expected length " + std::to_string(n_) + ", got " +
                                         std::to_string(ngram.size()));
  }
  const Token lead = ngram.front();
  const auto suffix = ngram.subspan(1);
  auto& bucket = buckets_[lead];
  const std::uint64_t stamp = ++counter_;

  auto it = std::find_if(bucket.begin(), bucket.end(), [&](const Entry& e) {
    return std::equal(e.suffix.begin(), e.suffix.end(), suffix.begin(), suffix.end());
  });
  if (it != bucket.end()) {
    by_stamp_.erase(it->stamp);
    it->stamp = stamp;
    bucket.splice(bucket.begin(), bucket, it);
    by_stamp_.emplace(stamp, lead);
    return;
  }

  bucket.push_front(Entry{TokenSeq(suffix.begin(), suffix.end()), stamp});
  by_stamp_.emplace(stamp, lead);
  ++size_;
  if (capacity_ && size_ > *capacity_) evict_oldest();
}

void NGramPool::evict_oldest() {
  const auto oldest = by_stamp_.begin();
  auto bucket_it = buckets_.find(oldest->second);
  auto& bucket = bucket_it->second;
  // Buckets are ordered by recency, so the bucket's oldest entry is at the back.
  bucket.pop_back();
  if (bucket.empty()) buckets_.erase(bucket_it);
  by_stamp_.erase(oldest);
  --size_;
}

std::vector<TokenSeq> NGramPool::lookup(Token lead, std::size_t max_count) const {
  std::vector<TokenSeq> out;
  const auto it = buckets_.find(lead);
  if (it == buckets_.end()) return out;
  for (const Entry& e : it->second) {
    if (out.size() >= max_count) break;
    out.push_back(e.suffix);
  }
  return out;
}

void NGramPool::seed_from_prompt(std::span<const Token> prompt) {
  if (prompt.size() < n_) return;
  for (std::size_t i = 0; i + n_ <= prompt.size(); ++i) insert(prompt.subspan(i, n_));
}

}  // namespace lookahead
