#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include "lookahead/analytics.hpp"
#include "lookahead/decode.hpp"
#include "lookahead/error.hpp"
#include "lookahead/lp_sim.hpp"
#include "lookahead/markov_model.hpp"
#include "lookahead/tiny_transformer.hpp"
#include "lookahead/tokenizer.hpp"

namespace lookahead::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

struct RunOptions {
  std::string mode = "lookahead";
  std::string model = "markov";
  std::string corpus;
  std::string model_file;
  std::string save_model;
  std::string prompts;
  std::string tokenizer = "bytes";
  std::size_t vocab = 256;
  std::size_t order = 3;
  double lambda = 0.01;
  std::uint64_t model_seed = 1;
  TransformerDims dims;
  std::size_t window = 15;
  std::size_t ngram = 5;
  std::optional<std::size_t> candidates;
  std::size_t max_tokens = 64;
  std::optional<Token> eos;
  std::uint64_t seed = 0;
  std::optional<double> temperature;
  std::optional<std::size_t> top_k;
  std::optional<double> top_p;
  std::size_t devices = 1;
  bool pool_from_prompt = false;
  std::optional<std::size_t> pool_capacity;
  std::string out = "report.json";
  std::string format = "json";
};

struct AnalyzeOptions {
  std::vector<double> alpha{0.425};
  std::vector<double> f{1.0};
  std::vector<std::size_t> gamma{4};
  std::vector<std::size_t> b{1};
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::string out;
  std::string format = "csv";
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Error(Errc::io_error, "cannot write '" + path.string() + "'");
}

void add_run_options(CLI::App& app, RunOptions& o, bool with_mode) {
  if (with_mode) {
    app.add_option("--mode", o.mode, "Decoding mode")
        ->check(CLI::IsMember({"autoregressive", "jacobi", "lookahead"}));
  }
  app.add_option("--model", o.model, "Reference model")->check(CLI::IsMember({"markov", "transformer"}));
  app.add_option("--corpus", o.corpus, "Training corpus for the Markov model");
  app.add_option("--model-file", o.model_file, "Load a saved Markov count table instead of training");
  app.add_option("--save-model", o.save_model, "Write the Markov count table after training");
  app.add_option("--prompts", o.prompts, "Prompt file, one prompt per line")->required();
  app.add_option("--tokenizer", o.tokenizer, "Token scheme")->check(CLI::IsMember({"bytes", "ints"}));
  app.add_option("--vocab", o.vocab, "Vocabulary size for the ints scheme")->check(CLI::PositiveNumber);
  app.add_option("--order", o.order, "Markov order")->check(CLI::PositiveNumber);
  app.add_option("--lambda", o.lambda, "Markov additive smoothing")->check(CLI::PositiveNumber);
  app.add_option("--model-seed", o.model_seed, "Transformer weight seed");
  app.add_option("--dim", o.dims.dim, "Transformer width")->check(CLI::PositiveNumber);
  app.add_option("--layers", o.dims.layers, "Transformer layers")->check(CLI::PositiveNumber);
  app.add_option("--heads", o.dims.heads, "Transformer heads")->check(CLI::PositiveNumber);
  app.add_option("--hidden", o.dims.hidden, "Transformer feed-forward width")->check(CLI::PositiveNumber);
  app.add_option("-W,--window", o.window, "Lookahead window size W")->check(CLI::PositiveNumber);
  app.add_option("-N,--ngram", o.ngram, "N-gram size N")->check(CLI::Range(2, 1 << 16));
  app.add_option("-G,--candidates", o.candidates, "Max verification candidates G (default W)");
  app.add_option("--max-tokens", o.max_tokens, "Tokens to generate per prompt")->check(CLI::PositiveNumber);
  app.add_option("--eos", o.eos, "End-of-sequence token id");
  app.add_option("--seed", o.seed, "Sampler / window seed");
  app.add_option("--temperature", o.temperature, "Sample with this temperature instead of greedy")
      ->check(CLI::PositiveNumber);
  app.add_option("--top-k", o.top_k, "Top-k truncation (implies sampling)")->check(CLI::PositiveNumber);
  app.add_option("--top-p", o.top_p, "Nucleus truncation (implies sampling)")
      ->check(CLI::Range(0.0, 1.0));
  app.add_option("--devices", o.devices, "Simulated lookahead-parallel devices")->check(CLI::PositiveNumber);
  app.add_option("--pool-from-prompt", o.pool_from_prompt, "Seed the n-gram pool from the prompt");
  app.add_option("--pool-capacity", o.pool_capacity, "Bound the n-gram pool")->check(CLI::PositiveNumber);
  app.add_option("--out", o.out, "Report path; outputs are written next to it");
  app.add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
}

std::unique_ptr<Model> make_model(RunOptions& o, TokenScheme scheme) {
  if (scheme == TokenScheme::bytes) o.vocab = 256;
  if (o.model == "transformer") {
    o.dims.vocab = o.vocab;
    return std::make_unique<TinyTransformer>(o.model_seed, o.dims);
  }
  if (!o.model_file.empty()) {
    std::ifstream in(o.model_file);
    if (!in) throw Error(Errc::io_error, "cannot read '" + o.model_file + "'");
    auto model = std::make_unique<MarkovModel>(MarkovModel::load(in));
    o.vocab = model->vocab_size();
    o.order = model->order();
    o.lambda = model->lambda();
    return model;
  }
  if (o.corpus.empty()) throw Error(Errc::invalid_config, "--model markov needs --corpus or --model-file");
  const std::vector<TokenSeq> corpus{tokenize(read_file(o.corpus), scheme, o.vocab)};
  auto model = std::make_unique<MarkovModel>(MarkovModel::train(corpus, o.order, o.lambda, o.vocab));
  if (!o.save_model.empty()) {
    std::ofstream out(o.save_model);
    if (!out) throw Error(Errc::io_error, "cannot write '" + o.save_model + "'");
    model->save(out);
  }
  return model;
}

std::vector<TokenSeq> read_prompts(const std::string& path, TokenScheme scheme, std::size_t vocab) {
  std::vector<TokenSeq> prompts;
  std::istringstream lines(read_file(path));
  std::string line;
  std::size_t number = 0;
  while (std::getline(lines, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    try {
      prompts.push_back(tokenize(line, scheme, vocab));
    } catch (const Error& e) {
      throw Error(Errc::parse_error, path + ":" + std::to_string(number) + ": " + e.what());
    }
    if (prompts.back().empty()) prompts.pop_back();
  }
  if (prompts.empty()) throw Error(Errc::parse_error, "no prompts in '" + path + "'");
  return prompts;
}

SamplerSpec sampler_for(const RunOptions& o, std::size_t prompt_index) {
  SamplerSpec s;
  if (o.temperature || o.top_k || o.top_p) {
    s.mode = SamplingMode::temperature;
    s.temperature = o.temperature.value_or(1.0);
    s.top_k = o.top_k;
    s.top_p = o.top_p;
  }
  s.seed = o.seed + 0x9E3779B97F4A7C15ULL * prompt_index;
  return s;
}

GenerationConfig generation_config(const RunOptions& o) {
  GenerationConfig c;
  c.window = o.window;
  c.ngram = o.ngram;
  c.candidates = o.candidates;
  c.max_tokens = o.max_tokens;
  c.eos = o.eos;
  c.seed_pool_from_prompt = o.pool_from_prompt;
  c.pool_capacity = o.pool_capacity;
  c.validate();
  return c;
}

struct PromptRun {
  TokenSeq tokens;
  std::size_t steps = 0;
  RunMetrics metrics;
  bool has_metrics = false;
  std::optional<CommStats> comm;
};

PromptRun run_prompt(const Model& model, const RunOptions& o, const std::string& mode,
                     const TokenSeq& prompt, std::size_t index) {
  const SamplerSpec sampler = sampler_for(o, index);
  const GenerationConfig cfg = generation_config(o);
  PromptRun run;
  if (mode == "autoregressive") {
    run.tokens = decode_autoregressive(model, prompt, sampler, o.max_tokens, o.eos);
    run.steps = run.tokens.size();
  } else if (mode == "jacobi") {
    Rng rng(sampler.seed, 0x6a61636f6269ULL);
    JacobiResult r = decode_jacobi(model, prompt, o.max_tokens, rng);
    run.tokens = std::move(r.tokens);
    if (o.eos) {
      const auto it = std::find(run.tokens.begin(), run.tokens.end(), *o.eos);
      if (it != run.tokens.end()) run.tokens.erase(it + 1, run.tokens.end());
    }
    run.steps = r.iterations;
  } else if (o.devices > 1) {
    LpResult r = decode_lookahead_parallel(model, prompt, cfg, sampler, o.devices);
    run.tokens = std::move(r.tokens);
    run.metrics = summarize(r.records, cfg.ngram);
    run.has_metrics = true;
    run.steps = r.records.size();
    CommStats total;
    for (const CommStats& c : r.comm) {
      total.tokens_synchronized += c.tokens_synchronized;
      total.sync_events += c.sync_events;
    }
    run.comm = total;
  } else {
    LookaheadResult r = decode_lookahead(model, prompt, cfg, sampler);
    run.tokens = std::move(r.tokens);
    run.metrics = summarize(r.records, cfg.ngram);
    run.has_metrics = true;
    run.steps = r.records.size();
  }
  return run;
}

json config_echo(const RunOptions& o, const std::string& subcommand) {
  json c;
  c["subcommand"] = subcommand;
  c["mode"] = o.mode;
  c["model"] = o.model;
  c["tokenizer"] = o.tokenizer;
  c["vocab"] = o.vocab;
  if (o.model == "markov") {
    c["markov"] = {{"corpus", o.corpus}, {"model_file", o.model_file}, {"order", o.order},
                   {"lambda", o.lambda}};
  } else {
    c["transformer"] = {{"seed", o.model_seed}, {"dim", o.dims.dim}, {"layers", o.dims.layers},
                        {"heads", o.dims.heads}, {"hidden", o.dims.hidden}};
  }
  c["prompts"] = o.prompts;
  c["W"] = o.window;
  c["N"] = o.ngram;
  c["G"] = o.candidates.value_or(o.window);
  c["max_tokens"] = o.max_tokens;
  c["eos"] = o.eos ? json(*o.eos) : json(nullptr);
  c["temperature"] = o.temperature ? json(*o.temperature) : json(nullptr);
  c["top_k"] = o.top_k ? json(*o.top_k) : json(nullptr);
  c["top_p"] = o.top_p ? json(*o.top_p) : json(nullptr);
  c["devices"] = o.devices;
  c["pool_from_prompt"] = o.pool_from_prompt;
  c["pool_capacity"] = o.pool_capacity ? json(*o.pool_capacity) : json(nullptr);
  c["format"] = o.format;
  return c;
}

struct ModeReport {
  json json_report;
  std::vector<std::string> csv_rows;
  std::string text;
};

ModeReport run_mode(const Model& model, const RunOptions& o, const std::string& mode,
                    const std::vector<TokenSeq>& prompts, TokenScheme scheme) {
  ModeReport report;
  json rows = json::array();
  std::size_t total_tokens = 0, total_steps = 0;
  double sum_s = 0.0;
  std::optional<CommStats> comm_total;

  for (std::size_t i = 0; i < prompts.size(); ++i) {
    const PromptRun run = run_prompt(model, o, mode, prompts[i], i);
    const double s = compression_ratio(run.tokens.size(), run.steps);
    json row;
    row["prompt_id"] = i;
    row["prompt_tokens"] = prompts[i].size();
    row["tokens"] = run.tokens.size();
    row["steps"] = run.steps;
    row["compression_ratio"] = s;
    if (run.has_metrics) {
      row["acceptance_histogram"] = run.metrics.acceptance_histogram;
      row["total_queries"] = run.metrics.total_queries;
      row["max_queries"] = run.metrics.max_queries;
      row["mean_queries_per_step"] = run.metrics.mean_queries_per_step;
    }
    if (run.comm) {
      row["comm"] = {{"tokens_synchronized", run.comm->tokens_synchronized},
                     {"sync_events", run.comm->sync_events}};
      if (!comm_total) comm_total = CommStats{};
      comm_total->tokens_synchronized += run.comm->tokens_synchronized;
      comm_total->sync_events += run.comm->sync_events;
    }
    rows.push_back(row);

    std::ostringstream csv;
    csv << mode << ',' << i << ',' << run.tokens.size() << ',' << run.steps << ',' << s << ','
        << (run.has_metrics ? run.metrics.total_queries : run.steps);
    report.csv_rows.push_back(csv.str());
    report.text += detokenize(run.tokens, scheme) + '\n';

    total_tokens += run.tokens.size();
    total_steps += run.steps;
    sum_s += s;
  }

  json aggregate;
  aggregate["total_tokens"] = total_tokens;
  aggregate["total_steps"] = total_steps;
  aggregate["compression_ratio"] = compression_ratio(total_tokens, total_steps);
  aggregate["mean_prompt_compression_ratio"] = sum_s / static_cast<double>(prompts.size());
  if (mode == "lookahead") {
    const std::size_t g = o.candidates.value_or(o.window);
    aggregate["flops_proxy"] = flops_proxy(o.window, o.ngram, g);
  }
  if (comm_total) {
    aggregate["comm"] = {{"tokens_synchronized", comm_total->tokens_synchronized},
                         {"sync_events", comm_total->sync_events}};
  }
  report.json_report = {{"mode", mode}, {"prompts", rows}, {"aggregate", aggregate}};
  return report;
}

void run_decoding(RunOptions o, const std::string& subcommand, const std::vector<std::string>& modes) {
  const TokenScheme scheme = parse_scheme(o.tokenizer);
  std::unique_ptr<Model> model = make_model(o, scheme);
  const std::vector<TokenSeq> prompts = read_prompts(o.prompts, scheme, model->vocab_size());
  generation_config(o);
  if (o.devices > o.window) {
    throw Error(Errc::invalid_config, "--devices must not exceed W");
  }

  json report;
  report["engine"] = {{"name", "lookahead"}, {"version", kEngineVersion}};
  report["config"] = config_echo(o, subcommand);
  report["seeds"] = {{"sampler", o.seed}, {"model", o.model == "transformer" ? json(o.model_seed) : json(nullptr)}};
  report["runs"] = json::array();

  const fs::path out_path(o.out);
  std::string csv = "mode,prompt_id,tokens,steps,S,queries\n";
  for (const std::string& mode : modes) {
    ModeReport r = run_mode(*model, o, mode, prompts, scheme);
    report["runs"].push_back(std::move(r.json_report));
    for (const std::string& row : r.csv_rows) csv += row + '\n';
    fs::path text_path = out_path;
    text_path.replace_extension(mode + ".txt");
    write_file(text_path, r.text);
  }
  write_file(out_path, o.format == "json" ? report.dump(2) + '\n' : csv);
}

void run_analyze(const AnalyzeOptions& o, std::ostream& out) {
  const std::vector<CurvePoint> points = compression_curve(o.alpha, o.f, o.gamma, o.b, o.trials, o.seed);
  std::ostringstream text;
  if (o.format == "csv") {
    write_curve_csv(text, points);
  } else {
    json rows = json::array();
    for (const CurvePoint& p : points) {
      rows.push_back({{"alpha", p.params.alpha}, {"f", p.params.f}, {"gamma", p.params.gamma},
                      {"b", p.params.b},
                      {"expected_single", expected_accepted_single(p.params.alpha, p.params.gamma)},
                      {"expected_batched", expected_accepted_batched(p.params.alpha, p.params.gamma, p.params.b)},
                      {"predicted_S", p.predicted_s}, {"mc_mean", p.mc.mean},
                      {"mc_stderr", p.mc.std_error}});
    }
    json report{{"engine", {{"name", "lookahead"}, {"version", kEngineVersion}}},
                {"trials", o.trials}, {"seed", o.seed}, {"points", rows}};
    text << report.dump(2) << '\n';
  }
  if (o.out.empty()) {
    out << text.str();
  } else {
    write_file(o.out, text.str());
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Lookahead decoding engine"};
  app.name(args.empty() ? "lookahead-cli" : args.front());
  app.require_subcommand(1);

  RunOptions decode_opts, bench_opts, simulate_opts;
  AnalyzeOptions analyze_opts;

  CLI::App* decode = app.add_subcommand("decode", "Decode prompts with one mode");
  add_run_options(*decode, decode_opts, true);
  CLI::App* bench = app.add_subcommand("bench", "Compare autoregressive, Jacobi and lookahead decoding");
  add_run_options(*bench, bench_opts, false);
  CLI::App* simulate = app.add_subcommand("simulate", "Lookahead decoding on simulated devices");
  add_run_options(*simulate, simulate_opts, false);
  simulate_opts.devices = 2;

  CLI::App* analyze = app.add_subcommand("analyze", "Accepted-token expectations and compression curves");
  analyze->add_option("--alpha", analyze_opts.alpha, "Acceptance rate(s) in [0, 1)")
      ->check(CLI::Range(0.0, 1.0));
  analyze->add_option("--f", analyze_opts.f, "Good-speculation period(s) >= 1");
  analyze->add_option("--gamma", analyze_opts.gamma, "Speculation length(s)")->check(CLI::PositiveNumber);
  analyze->add_option("--b", analyze_opts.b, "Parallel speculation count(s)")->check(CLI::PositiveNumber);
  analyze->add_option("--trials", analyze_opts.trials, "Monte Carlo trials per point (0 = skip)");
  analyze->add_option("--seed", analyze_opts.seed, "Monte Carlo seed");
  analyze->add_option("--out", analyze_opts.out, "Output path (default stdout)");
  analyze->add_option("--format", analyze_opts.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  if (argv.empty()) argv.push_back("lookahead-cli");

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n' << app.help();
    return kUsageError;
  }

  try {
    if (*decode) {
      run_decoding(decode_opts, "decode", {decode_opts.mode});
    } else if (*bench) {
      run_decoding(bench_opts, "bench", {"autoregressive", "jacobi", "lookahead"});
    } else if (*simulate) {
      simulate_opts.mode = "lookahead";
      run_decoding(simulate_opts, "simulate", {"lookahead"});
    } else if (*analyze) {
      run_analyze(analyze_opts, out);
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == Errc::invalid_config ? kUsageError : kRuntimeError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return kOk;
}

}  // namespace lookahead::cli
