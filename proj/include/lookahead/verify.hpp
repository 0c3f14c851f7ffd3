#pragma once

#include <span>
#include <vector>

#include "lookahead/rng.hpp"
#include "lookahead/types.hpp"

namespace lookahead {

// A speculated n-gram suffix together with the model's outputs along it:
// dists[0] is the base distribution (output of the last confirmed token),
// dists[i] the output after suffix[0..i-1]. So dists.size() == suffix.size() + 1.
struct CandidateEvidence {
  TokenSeq suffix;
  std::vector<Distribution> dists;
};

// Progressive left-to-right greedy check of disjoint candidates. Returns
// between 1 and N tokens, each equal to the greedy continuation. Throws
// Error(invalid_candidate) on inconsistent suffix or distribution lengths.
TokenSeq verify_greedy(const Distribution& base, std::span<const CandidateEvidence> candidates);

// Sampling variant for greedily drafted candidates: a candidate token s is
// accepted when r <= P(s) for a fresh r ~ U[0, 1); on rejection P(s) is
// zeroed and P renormalized before the next candidate. Exhausting the
// candidates samples from the residual distribution. Distributions are used
// as given; callers apply sampler transforms beforehand.
TokenSeq verify_sample(const Distribution& base, std::span<const CandidateEvidence> candidates,
                       Rng& rng);

// Exact output law of one verify_sample position: for speculation tokens
// s_1..s_G tried in order against P, returns
//   Q(v) = a_1 + r_1 a_2 + ... + a'_{G+1} * prod r_k
// by walking the accept / reject / renormalize chain without sampling.
std::vector<double> exact_accept_distribution(const Distribution& p,
                                              std::span<const Token> speculation);

}  // namespace lookahead
