#include "lookahead/markov_model.hpp"

#include <algorithm>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "lookahead/error.hpp"

namespace lookahead {

namespace {

constexpr const char* kMagic = "lookahead-markov";
constexpr int kFormatVersion = 1;

}  // namespace

MarkovModel::MarkovModel(std::size_t order, double lambda, std::size_t vocab)
    : order_(order), lambda_(lambda), vocab_(vocab), tables_(order) {
  if (order_ == 0) throw Error(Errc::invalid_config, "markov order must be >= 1");
  if (!(lambda_ > 0.0)) throw Error(Errc::invalid_config, "smoothing lambda must be positive");
  if (vocab_ == 0) throw Error(Errc::invalid_config, "vocabulary must be non-empty");
}

MarkovModel MarkovModel::train(std::span<const TokenSeq> corpus, std::size_t order, double lambda,
                               std::size_t vocab_size) {
  MarkovModel model(order, lambda, vocab_size);
  std::vector<std::map<TokenSeq, std::map<Token, std::uint64_t>>> counts(order);
  std::map<Token, std::uint64_t> marginal;

  for (const TokenSeq& seq : corpus) {
    for (std::size_t t = 0; t < seq.size(); ++t) {
      if (seq[t] >= vocab_size) {
        throw Error(Errc::parse_error, "corpus token " + std::to_string(seq[t]) +
                                           " outside vocabulary of " + std::to_string(vocab_size));
      }
      ++marginal[seq[t]];
      for (std::size_t len = 1; len <= std::min(order, t); ++len) {
        TokenSeq ctx(seq.begin() + static_cast<std::ptrdiff_t>(t - len),
                     seq.begin() + static_cast<std::ptrdiff_t>(t));
        ++counts[len - 1][std::move(ctx)][seq[t]];
      }
    }
  }

  for (const auto& [tok, n] : marginal) {
    model.marginal_.total += n;
    model.marginal_.next.emplace_back(tok, n);
  }
  for (std::size_t len = 0; len < order; ++len) {
    for (auto& [ctx, next] : counts[len]) {
      ContextCounts cc;
      for (const auto& [tok, n] : next) {
        cc.total += n;
        cc.next.emplace_back(tok, n);
      }
      model.tables_[len].emplace(ctx, std::move(cc));
    }
  }
  return model;
}

std::size_t MarkovModel::context_count() const {
  std::size_t n = marginal_.total > 0 ? 1 : 0;
  for (const auto& table : tables_) n += table.size();
  return n;
}

Distribution MarkovModel::conditional(std::span<const Token> context) const {
  const std::size_t len = std::min(order_, context.size());
  if (len == 0) return smoothed(marginal_);

  const TokenSeq key(context.end() - static_cast<std::ptrdiff_t>(len), context.end());
  const auto& table = tables_[len - 1];
  const auto it = table.find(key);
  return smoothed(it == table.end() ? marginal_ : it->second);
}

Distribution MarkovModel::smoothed(const ContextCounts& cc) const {
  const double v = static_cast<double>(vocab_);
  const double denom = static_cast<double>(cc.total) + lambda_ * v;
  std::vector<double> probs(vocab_, lambda_ / denom);
  for (const auto& [tok, n] : cc.next) probs[tok] = (static_cast<double>(n) + lambda_) / denom;
  return Distribution(std::move(probs));
}

std::vector<Distribution> MarkovModel::forward(std::span<const Token> prefix,
                                               const StepLayout& layout) const {
  validate_layout(layout, vocab_);
  for (Token t : prefix) {
    if (t >= vocab_) throw Error(Errc::invalid_layout, "prefix token outside vocabulary");
  }

  std::vector<Distribution> out;
  out.reserve(layout.size());
  TokenSeq context;
  for (std::size_t q = 0; q < layout.size(); ++q) {
    const TokenSeq chain = query_chain(layout, q);
    context.clear();
    // A chain that reaches query 0 continues into the prefix.
    if (chain.size() == layout.queries[q].rel_pos + 1 && chain.size() < order_) {
      const std::size_t take = std::min(prefix.size(), order_ - chain.size());
      context.assign(prefix.end() - static_cast<std::ptrdiff_t>(take), prefix.end());
    }
    context.insert(context.end(), chain.begin(), chain.end());
    out.push_back(conditional(context));
  }
  return out;
}

void MarkovModel::save(std::ostream& out) const {
  std::ostringstream lambda_text;
  lambda_text << std::hexfloat << lambda_;
  out << kMagic << ' ' << kFormatVersion << '\n'
      << "vocab " << vocab_ << '\n'
      << "order " << order_ << '\n'
      << "lambda " << lambda_text.str() << '\n'
      << "contexts " << context_count() << '\n';
  if (marginal_.total > 0) {
    out << "0 : " << marginal_.next.size();
    for (const auto& [tok, n] : marginal_.next) out << ' ' << tok << ' ' << n;
    out << '\n';
  }
  for (std::size_t len = 1; len <= order_; ++len) {
    for (const auto& [ctx, cc] : tables_[len - 1]) {
      out << len;
      for (Token t : ctx) out << ' ' << t;
      out << " : " << cc.next.size();
      for (const auto& [tok, n] : cc.next) out << ' ' << tok << ' ' << n;
      out << '\n';
    }
  }
  if (!out) throw Error(Errc::io_error, "failed to write markov model");
}

MarkovModel MarkovModel::load(std::istream& in) {
  const auto fail = [](const std::string& what) -> MarkovModel {
    throw Error(Errc::parse_error, "markov model file: " + what);
  };

  std::string magic, key;
  int version = 0;
  if (!(in >> magic >> version) || magic != kMagic) return fail("missing header");
  if (version != kFormatVersion) return fail("unsupported version " + std::to_string(version));

  std::size_t vocab = 0, order = 0, contexts = 0;
  std::string lambda_text;
  if (!(in >> key >> vocab) || key != "vocab") return fail("expected vocab");
  if (!(in >> key >> order) || key != "order") return fail("expected order");
  if (!(in >> key >> lambda_text) || key != "lambda") return fail("expected lambda");
  if (!(in >> key >> contexts) || key != "contexts") return fail("expected contexts");
  const double lambda = std::strtod(lambda_text.c_str(), nullptr);

  MarkovModel model(order, lambda, vocab);
  for (std::size_t i = 0; i < contexts; ++i) {
    std::size_t len = 0, pairs = 0;
    std::string colon;
    if (!(in >> len) || len > order) return fail("bad context length");
    TokenSeq ctx(len);
    for (Token& t : ctx) {
      if (!(in >> t) || t >= vocab) return fail("bad context token");
    }
    if (!(in >> colon >> pairs) || colon != ":") return fail("expected ':'");
    ContextCounts cc;
    for (std::size_t p = 0; p < pairs; ++p) {
      Token tok = 0;
      std::uint64_t n = 0;
      if (!(in >> tok >> n) || tok >= vocab) return fail("bad successor count");
      if (!cc.next.empty() && cc.next.back().first >= tok) return fail("successors not sorted");
      cc.total += n;
      cc.next.emplace_back(tok, n);
    }
    if (len == 0) {
      if (model.marginal_.total > 0) return fail("duplicate marginal");
      model.marginal_ = std::move(cc);
    } else if (!model.tables_[len - 1].emplace(std::move(ctx), std::move(cc)).second) {
      return fail("duplicate context");
    }
  }
  return model;
}

}  // namespace lookahead
