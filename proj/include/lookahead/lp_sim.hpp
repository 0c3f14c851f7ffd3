#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "lookahead/decode.hpp"
#include "lookahead/layout.hpp"

namespace lookahead {

// Work assigned to one simulated device. Columns are a contiguous 0-based
// range [first_column, last_column]; owned queries are computed here and
// reported back, redundant ones are recomputed only to close visibility.
struct DevicePlan {
  std::size_t device = 0;
  std::size_t first_column = 0;
  std::size_t last_column = 0;
  std::vector<std::size_t> candidates;
  std::vector<std::size_t> owned;      // sorted query indices
  std::vector<std::size_t> redundant;  // sorted query indices

  // Sorted union of owned and redundant.
  std::vector<std::size_t> queries() const;
};

struct CommStats {
  std::size_t tokens_synchronized = 0;
  std::size_t sync_events = 0;

  friend bool operator==(const CommStats&, const CommStats&) = default;
};

// Splits columns into `devices` contiguous ranges (earlier ranges take the
// remainder), round-robins candidates, and adds query 0 plus the level-0
// cells each range needs. Throws Error(invalid_partition) unless
// 1 <= devices <= W.
std::vector<DevicePlan> partition_layout(const CombinedLayout& layout, std::size_t devices);

// True when every visible reference of every query in the plan, including
// the implicit query 0, stays inside the plan.
bool is_visibility_closed(const StepLayout& layout, const DevicePlan& plan);

// The plan's queries as a standalone layout with remapped visibility.
StepLayout extract_shard(const StepLayout& layout, const DevicePlan& plan);

// Tokens exchanged in the single post-forward all-gather: each device sends
// its top-level outputs plus N values per owned candidate to D - 1 peers.
CommStats communication(const CombinedLayout& layout, std::span<const DevicePlan> plans);

// A lookahead step whose forward runs as independent device shards (on
// threads when devices > 1) followed by one merge. The outcome and all rng
// use match lookahead_step exactly.
std::pair<StepOutcome, CommStats> lp_step(DecodeState& state, std::size_t devices);

struct LpResult {
  TokenSeq tokens;
  std::vector<StepRecord> records;
  std::vector<StepOutcome> outcomes;
  std::vector<CommStats> comm;
};

LpResult decode_lookahead_parallel(const Model& model, std::span<const Token> prompt,
                                   const GenerationConfig& config, const SamplerSpec& sampler,
                                   std::size_t devices);

}  // namespace lookahead
