#include "lookahead/lp_sim.hpp"

#include <algorithm>
#include <string>
#include <thread>

#include "lookahead/error.hpp"

namespace lookahead {

std::vector<std::size_t> DevicePlan::queries() const {
  std::vector<std::size_t> all;
  all.reserve(owned.size() + redundant.size());
  std::merge(owned.begin(), owned.end(), redundant.begin(), redundant.end(), std::back_inserter(all));
  return all;
}

std::vector<DevicePlan> partition_layout(const CombinedLayout& layout, std::size_t devices) {
  const std::size_t width = layout.width;
  if (devices < 1 || devices > width) {
    throw Error(Errc::invalid_partition, "device count " + std::to_string(devices) +
                                             " outside [1, W=" + std::to_string(width) + "]");
  }
  const auto& queries = layout.layout.queries;
  const std::size_t levels = layout.ngram - 1;

  std::vector<DevicePlan> plans(devices);
  std::size_t column = 0;
  for (std::size_t d = 0; d < devices; ++d) {
    DevicePlan& plan = plans[d];
    plan.device = d;
    const std::size_t span = width / devices + (d < width % devices ? 1 : 0);
    plan.first_column = column;
    plan.last_column = column + span - 1;
    column += span;

    std::vector<bool> member(queries.size(), false);
    if (d == 0) member[0] = true;
    for (std::size_t c = plan.first_column; c <= plan.last_column; ++c) {
      for (std::size_t l = 0; l < levels; ++l) {
        const std::size_t q = layout.window_query(l, c);
        if (q != 0) member[q] = true;
      }
    }
    for (std::size_t b = d; b < layout.candidate_count(); b += devices) {
      plan.candidates.push_back(b);
      for (std::size_t q : layout.branch_query[b]) member[q] = true;
    }
    for (std::size_t q = 0; q < queries.size(); ++q) {
      if (member[q]) plan.owned.push_back(q);
    }

    // Close over visibility; query 0 is seen by everything.
    std::vector<bool> needed = member;
    needed[0] = true;
    for (std::size_t q = queries.size(); q-- > 0;) {
      if (!needed[q]) continue;
      for (std::size_t v : queries[q].visible) needed[v] = true;
    }
    for (std::size_t q = 0; q < queries.size(); ++q) {
      if (needed[q] && !member[q]) plan.redundant.push_back(q);
    }
  }
  return plans;
}

bool is_visibility_closed(const StepLayout& layout, const DevicePlan& plan) {
  const std::vector<std::size_t> members = plan.queries();
  const auto contains = [&](std::size_t q) {
    return std::binary_search(members.begin(), members.end(), q);
  };
  if (!contains(0)) return false;
  for (std::size_t q : members) {
    if (q >= layout.size()) return false;
    for (std::size_t v : layout.queries[q].visible) {
      if (!contains(v)) return false;
    }
  }
  return true;
}

StepLayout extract_shard(const StepLayout& layout, const DevicePlan& plan) {
  if (!is_visibility_closed(layout, plan)) {
    throw Error(Errc::invalid_partition, "device " + std::to_string(plan.device) +
                                             " shard is not closed under visibility");
  }
  const std::vector<std::size_t> members = plan.queries();
  std::vector<std::size_t> local(layout.size(), kNoQuery);
  for (std::size_t i = 0; i < members.size(); ++i) local[members[i]] = i;

  StepLayout shard;
  shard.queries.reserve(members.size());
  for (std::size_t q : members) {
    QueryToken copy = layout.queries[q];
    for (std::size_t& v : copy.visible) v = local[v];
    shard.queries.push_back(std::move(copy));
  }
  return shard;
}

CommStats communication(const CombinedLayout& layout, std::span<const DevicePlan> plans) {
  CommStats stats;
  stats.sync_events = 1;
  const std::size_t peers = plans.size() - 1;
  for (const DevicePlan& plan : plans) {
    const std::size_t tops = plan.last_column - plan.first_column + 1;
    stats.tokens_synchronized += (tops + layout.ngram * plan.candidates.size()) * peers;
  }
  return stats;
}

std::pair<StepOutcome, CommStats> lp_step(DecodeState& state, std::size_t devices) {
  const Model& model = *state.model;
  CommStats comm;
  const LayoutForward sharded = [&](std::span<const Token> prefix, const CombinedLayout& combined) {
    const std::vector<DevicePlan> plans = partition_layout(combined, devices);
    std::vector<StepLayout> shards;
    shards.reserve(plans.size());
    for (const DevicePlan& plan : plans) shards.push_back(extract_shard(combined.layout, plan));

    std::vector<std::vector<Distribution>> results(plans.size());
    if (plans.size() == 1) {
      results[0] = model.forward(prefix, shards[0]);
    } else {
      std::vector<std::exception_ptr> errors(plans.size());
      std::vector<std::thread> workers;
      workers.reserve(plans.size());
      for (std::size_t d = 0; d < plans.size(); ++d) {
        workers.emplace_back([&, d] {
          try {
            results[d] = model.forward(prefix, shards[d]);
          } catch (...) {
            errors[d] = std::current_exception();
          }
        });
      }
      for (auto& w : workers) w.join();
      for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
      }
    }

    // Barrier: gather owned outputs back into layout order.
    std::vector<std::optional<Distribution>> merged(combined.layout.size());
    for (std::size_t d = 0; d < plans.size(); ++d) {
      const std::vector<std::size_t> members = plans[d].queries();
      for (std::size_t i = 0; i < members.size(); ++i) {
        if (std::binary_search(plans[d].owned.begin(), plans[d].owned.end(), members[i])) {
          merged[members[i]] = std::move(results[d][i]);
        }
      }
    }
    std::vector<Distribution> out;
    out.reserve(merged.size());
    for (std::size_t q = 0; q < merged.size(); ++q) {
      if (!merged[q]) {
        throw Error(Errc::invalid_partition, "query " + std::to_string(q) + " has no owning device");
      }
      out.push_back(std::move(*merged[q]));
    }
    comm = communication(combined, plans);
    return out;
  };
  StepOutcome outcome = lookahead_step(state, sharded);
  return {std::move(outcome), comm};
}

LpResult decode_lookahead_parallel(const Model& model, std::span<const Token> prompt,
                                   const GenerationConfig& config, const SamplerSpec& sampler,
                                   std::size_t devices) {
  DecodeState state(model, TokenSeq(prompt.begin(), prompt.end()), config, sampler);
  LpResult result;
  while (!state.finished) {
    auto [outcome, comm] = lp_step(state, devices);
    result.outcomes.push_back(std::move(outcome));
    result.comm.push_back(comm);
  }
  result.tokens.assign(state.output().begin(), state.output().end());
  result.records = state.records;
  return result;
}

}  // namespace lookahead
