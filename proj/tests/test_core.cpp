#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "lookahead/error.hpp"
#include "lookahead/ngram_pool.hpp"
#include "lookahead/rng.hpp"
#include "lookahead/sampling.hpp"
#include "lookahead/types.hpp"

using namespace lookahead;

namespace {

Errc code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return Errc::io_error;
}

std::vector<double> empirical(const Distribution& d, const SamplerSpec& spec, std::size_t draws) {
  Rng rng(spec.seed, 1);
  std::vector<double> freq(d.size(), 0.0);
  for (std::size_t i = 0; i < draws; ++i) freq[sample_token(d, spec, rng)] += 1.0;
  for (double& f : freq) f /= static_cast<double>(draws);
  return freq;
}

}  // namespace

TEST_CASE("distribution validation") {
  CHECK_NOTHROW(Distribution({0.25, 0.75}));
  CHECK(code_of([] { Distribution({0.5, 0.6}); }) == Errc::degenerate_distribution);
  CHECK(code_of([] { Distribution({-0.1, 1.1}); }) == Errc::degenerate_distribution);
  CHECK(code_of([] { Distribution({NAN, 1.0}); }) == Errc::degenerate_distribution);
  CHECK(code_of([] { Distribution::normalized({0.0, 0.0}); }) == Errc::degenerate_distribution);
  const Distribution d = Distribution::normalized({1.0, 3.0});
  CHECK(d[1] == doctest::Approx(0.75));
  CHECK(total_variation(d.probs(), Distribution::uniform(2).probs()) == doctest::Approx(0.25));
}

TEST_CASE("rng is reproducible and streams differ") {
  Rng a(42, 0), b(42, 0), c(42, 1);
  for (int i = 0; i < 10; ++i) {
    const auto x = a.next();
    CHECK(x == b.next());
  }
  CHECK(Rng(42, 0).next() != c.next());
  Rng r(3);
  for (int i = 0; i < 1000; ++i) {
    const double u = r.uniform01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(r.below(7) < 7);
  }
}

TEST_CASE("pool dedups repeated inserts") {
  NGramPool pool(4);
  const TokenSeq g{5, 7, 7, 9};
  pool.insert(g);
  pool.insert(g);
  CHECK(pool.size() == 1);
  CHECK(pool.lookup(5, 10) == std::vector<TokenSeq>{{7, 7, 9}});
}

TEST_CASE("pool rejects wrong-length n-grams") {
  NGramPool pool(3);
  CHECK(code_of([&] { pool.insert(TokenSeq{1, 2}); }) == Errc::invalid_ngram);
  CHECK(code_of([&] { pool.insert(TokenSeq{1, 2, 3, 4}); }) == Errc::invalid_ngram);
  CHECK(pool.empty());
}

TEST_CASE("pool capacity evicts the oldest entry") {
  NGramPool pool(3, 2);
  pool.insert(TokenSeq{1, 2, 3});
  pool.insert(TokenSeq{4, 5, 6});
  pool.insert(TokenSeq{7, 8, 9});
  CHECK(pool.size() == 2);
  CHECK(pool.lookup(1, 5).empty());
  CHECK(pool.lookup(4, 5).size() == 1);
  CHECK(pool.lookup(7, 5).size() == 1);

  // A refreshed entry survives over a later but untouched one.
  NGramPool refreshed(3, 2);
  refreshed.insert(TokenSeq{1, 2, 3});
  refreshed.insert(TokenSeq{4, 5, 6});
  refreshed.insert(TokenSeq{1, 2, 3});
  refreshed.insert(TokenSeq{7, 8, 9});
  CHECK(refreshed.lookup(1, 5).size() == 1);
  CHECK(refreshed.lookup(4, 5).empty());
}

TEST_CASE("pool lookup is most recent first and truncated") {
  NGramPool pool(3);
  pool.insert(TokenSeq{3, 4, 5});
  pool.insert(TokenSeq{3, 4, 6});
  CHECK(pool.lookup(3, 1) == std::vector<TokenSeq>{{4, 6}});
  CHECK(pool.lookup(3, 0).empty());
  CHECK(pool.lookup(9, 4).empty());
  CHECK(NGramPool(3).lookup(0, 4).empty());
}

TEST_CASE("pool recency order property") {
  Rng rng(8);
  for (int round = 0; round < 50; ++round) {
    NGramPool pool(3);
    // Oracle: last insertion time of each distinct n-gram.
    std::map<TokenSeq, int> last;
    for (int t = 0; t < 60; ++t) {
      const TokenSeq g{static_cast<Token>(rng.below(3)), static_cast<Token>(rng.below(3)),
                       static_cast<Token>(rng.below(3))};
      pool.insert(g);
      last[g] = t;
    }
    CHECK(pool.size() == last.size());
    for (Token lead = 0; lead < 3; ++lead) {
      std::vector<std::pair<int, TokenSeq>> expected;
      for (const auto& [g, t] : last) {
        if (g[0] == lead) expected.push_back({t, TokenSeq(g.begin() + 1, g.end())});
      }
      std::sort(expected.begin(), expected.end(), [](auto& a, auto& b) { return a.first > b.first; });
      std::vector<TokenSeq> want;
      for (auto& e : expected) want.push_back(e.second);
      CHECK(pool.lookup(lead, 100) == want);
    }
  }
}

TEST_CASE("seeding the pool from a prompt") {
  NGramPool pool(3);
  pool.seed_from_prompt(TokenSeq{1, 2, 3, 4});
  CHECK(pool.size() == 2);
  CHECK(pool.lookup(1, 4) == std::vector<TokenSeq>{{2, 3}});
  CHECK(pool.lookup(2, 4) == std::vector<TokenSeq>{{3, 4}});

  NGramPool short_prompt(3);
  short_prompt.seed_from_prompt(TokenSeq{1, 2});
  CHECK(short_prompt.empty());

  NGramPool repetitive(3);
  repetitive.seed_from_prompt(TokenSeq{7, 7, 7, 7, 7});
  CHECK(repetitive.size() == 1);
}

TEST_CASE("greedy sampling takes the lowest argmax") {
  Rng rng(1);
  const Rng before = rng;
  CHECK(sample_token(Distribution::uniform(4), SamplerSpec{}, rng) == 0);
  CHECK(sample_token(Distribution({0.1, 0.7, 0.2}), SamplerSpec{}, rng) == 1);
  CHECK(rng == before);
}

TEST_CASE("temperature one reproduces the distribution") {
  const Distribution d({0.05, 0.4, 0.25, 0.3});
  SamplerSpec spec;
  spec.mode = SamplingMode::temperature;
  spec.top_p = 1.0;
  spec.seed = 17;
  CHECK(total_variation(empirical(d, spec, 100000), d.probs()) < 0.01);
}

TEST_CASE("top-k one forces the argmax") {
  const Distribution d({0.2, 0.1, 0.4, 0.3});
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    SamplerSpec spec;
    spec.mode = SamplingMode::temperature;
    spec.temperature = 3.0;
    spec.top_k = 1;
    spec.seed = seed;
    Rng rng(seed);
    CHECK(sample_token(d, spec, rng) == 2);
  }
}

TEST_CASE("sampler transforms compose in order") {
  const Distribution d({0.1, 0.2, 0.3, 0.4});
  SamplerSpec spec;
  spec.mode = SamplingMode::temperature;

  spec.temperature = 0.5;
  // Oracle: p^(1/T) renormalized.
  double z = 0.0;
  for (double p : d.probs()) z += p * p;
  const Distribution sharp = apply_sampler(d, spec);
  for (Token t = 0; t < 4; ++t) CHECK(sharp[t] == doctest::Approx(d[t] * d[t] / z).epsilon(1e-12));

  spec.temperature = 1.0;
  spec.top_k = 2;
  const Distribution k2 = apply_sampler(d, spec);
  CHECK(k2[0] == 0.0);
  CHECK(k2[1] == 0.0);
  CHECK(k2[2] == doctest::Approx(3.0 / 7.0));

  spec.top_k.reset();
  spec.top_p = 0.65;
  const Distribution nucleus = apply_sampler(d, spec);
  CHECK(nucleus[0] == 0.0);
  CHECK(nucleus[1] == 0.0);
  CHECK(nucleus[3] == doctest::Approx(4.0 / 7.0));

  CHECK(apply_sampler(d, SamplerSpec{}) == d);
}

TEST_CASE("config validation") {
  GenerationConfig c;
  CHECK_NOTHROW(c.validate());
  CHECK(c.max_candidates() == c.window);
  c.ngram = 1;
  CHECK(code_of([&] { c.validate(); }) == Errc::invalid_config);
  c.ngram = 2;
  c.window = 0;
  CHECK(code_of([&] { c.validate(); }) == Errc::invalid_config);

  SamplerSpec s;
  s.top_p = 0.0;
  CHECK_NOTHROW(s.validate());
  s.mode = SamplingMode::temperature;
  CHECK(code_of([&] { s.validate(); }) == Errc::invalid_config);
  s.top_p = 1.0;
  s.temperature = -1.0;
  CHECK(code_of([&] { s.validate(); }) == Errc::invalid_config);
}
