#include "lookahead/decode.hpp"

#include <algorithm>

#include "lookahead/error.hpp"
#include "lookahead/sampling.hpp"
#include "lookahead/verify.hpp"

namespace lookahead {

namespace {

constexpr std::uint64_t kWindowStream = 0x77696e646f77ULL;

Rng session_rng(std::uint64_t seed) { return Rng(seed, kWindowStream); }

}  // namespace

DecodeState::DecodeState(const Model& m, TokenSeq prompt, GenerationConfig cfg, SamplerSpec s)
    : model(&m),
      sequence(std::move(prompt)),
      prompt_length(sequence.size()),
      config(std::move(cfg)),
      sampler(s),
      rng(session_rng(s.seed)),
      window(Window::random(config.window, config.ngram, m.vocab_size(), rng)),
      pool(config.ngram, config.pool_capacity) {
  config.validate();
  sampler.validate();
  if (sequence.empty()) throw Error(Errc::invalid_config, "prompt must be non-empty");
  for (Token t : sequence) {
    if (t >= m.vocab_size()) throw Error(Errc::invalid_config, "prompt token outside vocabulary");
  }
  if (config.seed_pool_from_prompt) pool.seed_from_prompt(sequence);
}

TokenSeq decode_autoregressive(const Model& model, std::span<const Token> prompt,
                               const SamplerSpec& sampler, std::size_t max_tokens,
                               std::optional<Token> eos) {
  if (prompt.empty()) throw Error(Errc::invalid_config, "prompt must be non-empty");
  sampler.validate();
  Rng rng = session_rng(sampler.seed);
  TokenSeq sequence(prompt.begin(), prompt.end());
  TokenSeq out;
  while (out.size() < max_tokens) {
    const Token t = sample_token(model.next_distribution(sequence), sampler, rng);
    out.push_back(t);
    sequence.push_back(t);
    if (eos && t == *eos) break;
  }
  return out;
}

JacobiResult decode_jacobi(const Model& model, std::span<const Token> prompt, std::size_t m,
                           Rng& rng) {
  if (prompt.empty()) throw Error(Errc::invalid_config, "prompt must be non-empty");
  if (m == 0) throw Error(Errc::invalid_config, "Jacobi length must be >= 1");

  const auto prefix = prompt.first(prompt.size() - 1);
  const Token last = prompt.back();

  JacobiResult result;
  TokenSeq guess(m);
  for (Token& t : guess) t = static_cast<Token>(rng.below(model.vocab_size()));
  result.trajectory.push_back(guess);

  for (std::size_t it = 1; it <= m; ++it) {
    // Position j is conditioned on the previous iterate's first j tokens.
    const StepLayout layout = chain_layout(last, std::span<const Token>(guess).first(m - 1));
    const std::vector<Distribution> dists = model.forward(prefix, layout);
    TokenSeq next(m);
    for (std::size_t j = 0; j < m; ++j) next[j] = dists[j].argmax();
    result.iterations = it;
    result.trajectory.push_back(next);
    const bool fixed_point = next == guess;
    guess = std::move(next);
    if (fixed_point) break;
  }
  result.tokens = guess;
  return result;
}

StepOutcome lookahead_step(DecodeState& state) {
  const Model& model = *state.model;
  return lookahead_step(state, [&model](std::span<const Token> prefix, const CombinedLayout& c) {
    return model.forward(prefix, c.layout);
  });
}

StepOutcome lookahead_step(DecodeState& state, const LayoutForward& forward) {
  if (state.finished) throw Error(Errc::contract_violation, "decode session already finished");
  const GenerationConfig& cfg = state.config;
  const std::size_t n = cfg.ngram;
  const Token last = state.sequence.back();
  const auto prefix = std::span<const Token>(state.sequence).first(state.sequence.size() - 1);

  const std::vector<TokenSeq> candidates = state.pool.lookup(last, cfg.max_candidates());
  const CombinedLayout combined = build_layout(state.window, last, candidates);
  const std::vector<Distribution> dists = forward(prefix, combined);
  if (dists.size() != combined.layout.size()) {
    throw Error(Errc::contract_violation, "forward returned the wrong number of distributions");
  }

  StepOutcome outcome;
  outcome.candidate_count = candidates.size();
  outcome.query_count = combined.layout.size();

  // The lookahead branch always decodes greedily, so pool n-grams carry no
  // proposal distribution.
  outcome.new_top.resize(cfg.window);
  for (std::size_t c = 0; c < cfg.window; ++c) {
    outcome.new_top[c] = dists[combined.top_query(c)].argmax();
  }

  const bool greedy = state.sampler.greedy();
  const auto transform = [&](const Distribution& d) {
    return greedy ? d : apply_sampler(d, state.sampler);
  };
  const Distribution base = transform(dists[0]);
  std::vector<CandidateEvidence> evidence;
  evidence.reserve(candidates.size());
  for (std::size_t b = 0; b < candidates.size(); ++b) {
    CandidateEvidence e{candidates[b], {base}};
    for (std::size_t k = 0; k + 1 < n; ++k) {
      e.dists.push_back(transform(dists[combined.branch_query[b][k]]));
    }
    evidence.push_back(std::move(e));
  }
  outcome.accepted =
      greedy ? verify_greedy(base, evidence) : verify_sample(base, evidence, state.rng);

  for (const TokenSeq& gram : collect_ngrams(state.window, last, outcome.new_top)) {
    state.pool.insert(gram);
  }
  state.window = window_update(state.window, outcome.new_top, outcome.accepted.size(), state.rng);

  std::size_t appended = 0;
  for (Token t : outcome.accepted) {
    if (state.output().size() >= cfg.max_tokens) break;
    state.sequence.push_back(t);
    ++appended;
    if (cfg.eos && t == *cfg.eos) {
      state.finished = true;
      break;
    }
  }
  if (state.output().size() >= cfg.max_tokens) state.finished = true;

  state.records.push_back(
      StepRecord{appended, outcome.candidate_count, outcome.query_count, state.pool.size()});
  return outcome;
}

LookaheadResult decode_lookahead(const Model& model, std::span<const Token> prompt,
                                 const GenerationConfig& config, const SamplerSpec& sampler) {
  DecodeState state(model, TokenSeq(prompt.begin(), prompt.end()), config, sampler);
  while (!state.finished) lookahead_step(state);
  return LookaheadResult{TokenSeq(state.output().begin(), state.output().end()), state.records};
}

}  // namespace lookahead
