#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "lookahead/types.hpp"

namespace lookahead {

// alpha: expected per-token acceptance rate; gamma: speculation length;
// b: parallel speculations; f: one good speculation every f steps.
struct AcceptanceParams {
  double alpha = 0.0;
  std::size_t gamma = 1;
  std::size_t b = 1;
  double f = 1.0;

  void validate() const;
};

// Formula parameters implied by an engine config: b = G, gamma = N - 1.
AcceptanceParams params_from_config(const GenerationConfig& config, double alpha = 0.0,
                                    double f = 1.0);

// Single speculation: (1 - alpha^(gamma+1)) / (1 - alpha).
double expected_accepted_single(double alpha, std::size_t gamma);

// b independent speculations: (gamma + 1) - sum_{i=1..gamma} (1 - alpha^i)^b.
double expected_accepted_batched(double alpha, std::size_t gamma, std::size_t b);

// (f - 1 + E) / f with E from expected_accepted_batched.
double predicted_compression(double alpha, double f, std::size_t gamma, std::size_t b);

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Simulates b length-gamma speculations with i.i.d. Bernoulli(alpha) token
// acceptance; each trial accepts 1 + the longest leading run. Trials are
// split over fixed seeded shards and reduced in shard order, so the result
// depends only on (arguments, seed).
MonteCarloEstimate mc_expected_accepted(double alpha, std::size_t gamma, std::size_t b,
                                        std::uint64_t trials, std::uint64_t seed);

// Steps over tokens; Error(domain_error) when steps == 0.
double compression_ratio(std::size_t tokens, std::size_t steps);

// Per-step input-token count of the combined branches: (W + G) * (N - 1).
std::size_t flops_proxy(std::size_t window, std::size_t ngram, std::size_t candidates);

struct RunMetrics {
  std::size_t tokens_generated = 0;
  std::size_t steps = 0;
  double compression = 0.0;
  std::vector<std::size_t> acceptance_histogram;  // index = accepted length, 0 unused
  std::size_t total_queries = 0;
  std::size_t max_queries = 0;
  double mean_queries_per_step = 0.0;
};

RunMetrics summarize(std::span<const StepRecord> records, std::size_t ngram);

struct CurvePoint {
  AcceptanceParams params;
  double predicted_s = 0.0;
  MonteCarloEstimate mc;  // of S, i.e. (f - 1 + mc mean) / f
};

// Evaluates the grid and, when trials > 0, the Monte Carlo estimate per point.
std::vector<CurvePoint> compression_curve(std::span<const double> alphas, std::span<const double> fs,
                                          std::span<const std::size_t> gammas,
                                          std::span<const std::size_t> bs, std::uint64_t trials,
                                          std::uint64_t seed);

// CSV header alpha,f,gamma,b,predicted_S,mc_mean,mc_stderr then one row per point.
void write_curve_csv(std::ostream& out, std::span<const CurvePoint> points);

}  // namespace lookahead
