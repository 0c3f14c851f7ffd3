#include "lookahead/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <thread>

#include "lookahead/error.hpp"
#include "lookahead/rng.hpp"

namespace lookahead {

namespace {

constexpr std::size_t kMonteCarloShards = 16;

void check_alpha(double alpha) {
  if (!(alpha >= 0.0 && alpha < 1.0)) {
    throw Error(Errc::domain_error, "alpha must lie in [0, 1), got " + std::to_string(alpha));
  }
}

void check_count(std::size_t value, const char* name) {
  if (value < 1) throw Error(Errc::domain_error, std::string(name) + " must be >= 1");
}

struct ShardSums {
  double sum = 0.0;
  double sum_sq = 0.0;
};

ShardSums run_shard(double alpha, std::size_t gamma, std::size_t b, std::uint64_t trials,
                    std::uint64_t seed, std::uint64_t shard) {
  Rng rng(seed, shard);
  ShardSums s;
  for (std::uint64_t t = 0; t < trials; ++t) {
    std::size_t best = 0;
    for (std::size_t seq = 0; seq < b && best < gamma; ++seq) {
      std::size_t run = 0;
      while (run < gamma && rng.uniform01() < alpha) ++run;
      best = std::max(best, run);
    }
    const double accepted = 1.0 + static_cast<double>(best);
    s.sum += accepted;
    s.sum_sq += accepted * accepted;
  }
  return s;
}

}  // namespace

void AcceptanceParams::validate() const {
  check_alpha(alpha);
  check_count(gamma, "gamma");
  check_count(b, "b");
  if (!(f >= 1.0)) throw Error(Errc::domain_error, "f must be >= 1");
}

AcceptanceParams params_from_config(const GenerationConfig& config, double alpha, double f) {
  AcceptanceParams p{alpha, config.ngram - 1, config.max_candidates(), f};
  p.validate();
  return p;
}

double expected_accepted_single(double alpha, std::size_t gamma) {
  check_alpha(alpha);
  check_count(gamma, "gamma");
  return (1.0 - std::pow(alpha, static_cast<double>(gamma + 1))) / (1.0 - alpha);
}

double expected_accepted_batched(double alpha, std::size_t gamma, std::size_t b) {
  check_alpha(alpha);
  check_count(gamma, "gamma");
  check_count(b, "b");
  double sum = 0.0;
  for (std::size_t i = 1; i <= gamma; ++i) {
    sum += std::pow(1.0 - std::pow(alpha, static_cast<double>(i)), static_cast<double>(b));
  }
  return static_cast<double>(gamma + 1) - sum;
}

double predicted_compression(double alpha, double f, std::size_t gamma, std::size_t b) {
  if (!(f >= 1.0)) throw Error(Errc::domain_error, "f must be >= 1");
  return (f - 1.0 + expected_accepted_batched(alpha, gamma, b)) / f;
}

MonteCarloEstimate mc_expected_accepted(double alpha, std::size_t gamma, std::size_t b,
                                        std::uint64_t trials, std::uint64_t seed) {
  check_alpha(alpha);
  check_count(gamma, "gamma");
  check_count(b, "b");
  if (trials < 1) throw Error(Errc::domain_error, "trials must be >= 1");

  const std::size_t shards = static_cast<std::size_t>(std::min<std::uint64_t>(kMonteCarloShards, trials));
  std::vector<ShardSums> sums(shards);
  const auto shard_trials = [&](std::size_t s) {
    return trials / shards + (s < trials % shards ? 1 : 0);
  };

  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  if (hw == 1 || trials < 10000) {
    for (std::size_t s = 0; s < shards; ++s) sums[s] = run_shard(alpha, gamma, b, shard_trials(s), seed, s);
  } else {
    std::vector<std::thread> workers;
    for (std::size_t s = 0; s < shards; ++s) {
      workers.emplace_back([&, s] { sums[s] = run_shard(alpha, gamma, b, shard_trials(s), seed, s); });
    }
    for (auto& w : workers) w.join();
  }

  double sum = 0.0, sum_sq = 0.0;
  for (const ShardSums& s : sums) {
    sum += s.sum;
    sum_sq += s.sum_sq;
  }
  const double n = static_cast<double>(trials);
  const double mean = sum / n;
  const double var = n > 1 ? std::max(0.0, (sum_sq - n * mean * mean) / (n - 1)) : 0.0;
  return MonteCarloEstimate{mean, std::sqrt(var / n)};
}

double compression_ratio(std::size_t tokens, std::size_t steps) {
  if (steps == 0) throw Error(Errc::domain_error, "compression ratio needs at least one step");
  return static_cast<double>(tokens) / static_cast<double>(steps);
}

std::size_t flops_proxy(std::size_t window, std::size_t ngram, std::size_t candidates) {
  if (ngram < 2) throw Error(Errc::invalid_config, "n-gram size must be >= 2");
  return (window + candidates) * (ngram - 1);
}

RunMetrics summarize(std::span<const StepRecord> records, std::size_t ngram) {
  RunMetrics m;
  m.acceptance_histogram.assign(ngram + 1, 0);
  for (const StepRecord& r : records) {
    m.tokens_generated += r.accepted_count;
    m.total_queries += r.query_count;
    m.max_queries = std::max(m.max_queries, r.query_count);
    if (r.accepted_count < m.acceptance_histogram.size()) ++m.acceptance_histogram[r.accepted_count];
  }
  m.steps = records.size();
  if (m.steps > 0) {
    m.compression = compression_ratio(m.tokens_generated, m.steps);
    m.mean_queries_per_step = static_cast<double>(m.total_queries) / static_cast<double>(m.steps);
  }
  return m;
}

std::vector<CurvePoint> compression_curve(std::span<const double> alphas, std::span<const double> fs,
                                          std::span<const std::size_t> gammas,
                                          std::span<const std::size_t> bs, std::uint64_t trials,
                                          std::uint64_t seed) {
  std::vector<CurvePoint> points;
  for (double alpha : alphas) {
    for (double f : fs) {
      for (std::size_t gamma : gammas) {
        for (std::size_t b : bs) {
          CurvePoint pt;
          pt.params = AcceptanceParams{alpha, gamma, b, f};
          pt.params.validate();
          pt.predicted_s = predicted_compression(alpha, f, gamma, b);
          if (trials > 0) {
            const MonteCarloEstimate e = mc_expected_accepted(alpha, gamma, b, trials, seed);
            pt.mc = MonteCarloEstimate{(f - 1.0 + e.mean) / f, e.std_error / f};
          }
          points.push_back(pt);
        }
      }
    }
  }
  return points;
}

void write_curve_csv(std::ostream& out, std::span<const CurvePoint> points) {
  out << "alpha,f,gamma,b,predicted_S,mc_mean,mc_stderr\n";
  const auto old_precision = out.precision(12);
  for (const CurvePoint& p : points) {
    out << p.params.alpha << ',' << p.params.f << ',' << p.params.gamma << ',' << p.params.b << ','
        << p.predicted_s << ',' << p.mc.mean << ',' << p.mc.std_error << '\n';
  }
  out.precision(old_precision);
}

}  // namespace lookahead
