#include "lookahead/verify.hpp"

#include <numeric>
#include <string>

#include "lookahead/error.hpp"
#include "lookahead/sampling.hpp"

namespace lookahead {

namespace {

void check_evidence(std::span<const CandidateEvidence> candidates) {
  if (candidates.empty()) return;
  const std::size_t len = candidates.front().suffix.size();
  for (std::size_t j = 0; j < candidates.size(); ++j) {
    const CandidateEvidence& c = candidates[j];
    if (c.suffix.empty() || c.suffix.size() != len || c.dists.size() != len + 1) {
      throw Error(Errc::invalid_candidate,
                  "candidate " + std::to_string(j) + " has inconsistent suffix/distribution lengths");
    }
  }
}

// Survivors of position i that match the accepted token, keeping order.
// Candidates ahead of `from` were rejected at this position.
std::vector<std::size_t> keep_matching(std::span<const CandidateEvidence> candidates,
                                       const std::vector<std::size_t>& alive, std::size_t from,
                                       std::size_t position, Token accepted) {
  std::vector<std::size_t> next;
  for (std::size_t k = from; k < alive.size(); ++k) {
    if (candidates[alive[k]].suffix[position] == accepted) next.push_back(alive[k]);
  }
  return next;
}

}  // namespace

TokenSeq verify_greedy(const Distribution& base, std::span<const CandidateEvidence> candidates) {
  if (candidates.empty()) return {base.argmax()};
  check_evidence(candidates);

  const std::size_t len = candidates.front().suffix.size();
  std::vector<std::size_t> alive(candidates.size());
  std::iota(alive.begin(), alive.end(), std::size_t{0});

  TokenSeq out;
  for (std::size_t i = 0; i < len; ++i) {
    // Survivors share the verified prefix, so their i-th outputs coincide.
    const Distribution& p = candidates[alive.front()].dists[i];
    const Token want = p.argmax();
    bool accepted = false;
    for (std::size_t j = 0; j < alive.size(); ++j) {
      if (candidates[alive[j]].suffix[i] == want) {
        out.push_back(want);
        alive = keep_matching(candidates, alive, j, i, want);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      out.push_back(want);
      return out;
    }
  }
  out.push_back(candidates[alive.front()].dists[len].argmax());
  return out;
}

TokenSeq verify_sample(const Distribution& base, std::span<const CandidateEvidence> candidates,
                       Rng& rng) {
  if (candidates.empty()) return {sample_categorical(base.probs(), rng)};
  check_evidence(candidates);

  const std::size_t len = candidates.front().suffix.size();
  std::vector<std::size_t> alive(candidates.size());
  std::iota(alive.begin(), alive.end(), std::size_t{0});

  TokenSeq out;
  std::vector<double> p;
  for (std::size_t i = 0; i < len; ++i) {
    const auto probs = candidates[alive.front()].dists[i].probs();
    p.assign(probs.begin(), probs.end());
    bool accepted = false;
    for (std::size_t j = 0; j < alive.size(); ++j) {
      const Token s = candidates[alive[j]].suffix[i];
      const double r = rng.uniform01();
      if (p[s] > 0.0 && r <= p[s]) {
        out.push_back(s);
        alive = keep_matching(candidates, alive, j, i, s);
        accepted = true;
        break;
      }
      p[s] = 0.0;
      const double rest = std::accumulate(p.begin(), p.end(), 0.0);
      if (!(rest > 0.0)) {
        throw Error(Errc::contract_violation, "all probability mass rejected");
      }
      for (double& x : p) x /= rest;
    }
    if (!accepted) {
      out.push_back(sample_categorical(p, rng));
      return out;
    }
  }
  out.push_back(sample_categorical(candidates[alive.front()].dists[len].probs(), rng));
  return out;
}

std::vector<double> exact_accept_distribution(const Distribution& p,
                                              std::span<const Token> speculation) {
  std::vector<double> current(p.probs().begin(), p.probs().end());
  std::vector<double> q(current.size(), 0.0);
  double reach = 1.0;  // probability that every earlier speculation was rejected
  for (Token s : speculation) {
    const double accept = current.at(s);
    q[s] += reach * accept;
    reach *= 1.0 - accept;
    if (reach == 0.0) return q;
    current[s] = 0.0;
    double rest = 0.0;
    for (double x : current) rest += x;
    for (double& x : current) x /= rest;
  }
  for (std::size_t v = 0; v < q.size(); ++v) q[v] += reach * current[v];
  return q;
}

}  // namespace lookahead
