#include "lookahead/tiny_transformer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "lookahead/error.hpp"
#include "lookahead/rng.hpp"

namespace lookahead {

namespace {

constexpr std::uint64_t kWeightStream = 0x7466'6d72'7765'6967ULL;
constexpr double kLogitScale = 3.0;
constexpr double kNormEps = 1e-5;

std::vector<double> uniform_weights(Rng& rng, std::size_t count, double scale) {
  std::vector<double> w(count);
  for (double& x : w) x = (2.0 * rng.uniform01() - 1.0) * scale;
  return w;
}

// y = W x for a rows x cols row-major matrix.
void matvec(const std::vector<double>& w, std::size_t rows, std::size_t cols, const double* x,
            double* y) {
  for (std::size_t r = 0; r < rows; ++r) {
    const double* row = w.data() + r * cols;
    double acc = 0.0;
    for (std::size_t c = 0; c < cols; ++c) acc += row[c] * x[c];
    y[r] = acc;
  }
}

void layer_norm(const double* x, const std::vector<double>& gain, std::size_t dim, double* y) {
  double mean = 0.0;
  for (std::size_t i = 0; i < dim; ++i) mean += x[i];
  mean /= static_cast<double>(dim);
  double var = 0.0;
  for (std::size_t i = 0; i < dim; ++i) var += (x[i] - mean) * (x[i] - mean);
  var /= static_cast<double>(dim);
  const double inv = 1.0 / std::sqrt(var + kNormEps);
  for (std::size_t i = 0; i < dim; ++i) y[i] = (x[i] - mean) * inv * gain[i];
}

double gelu(double x) {
  constexpr double k = 0.7978845608028654;  // sqrt(2 / pi)
  return 0.5 * x * (1.0 + std::tanh(k * (x + 0.044715 * x * x * x)));
}

void add_position(std::size_t position, std::size_t dim, double* x) {
  for (std::size_t i = 0; i < dim; i += 2) {
    const double freq = std::pow(10000.0, -static_cast<double>(i) / static_cast<double>(dim));
    const double angle = static_cast<double>(position) * freq;
    x[i] += std::sin(angle);
    if (i + 1 < dim) x[i + 1] += std::cos(angle);
  }
}

}  // namespace

void TransformerDims::validate() const {
  if (vocab == 0 || dim == 0 || layers == 0 || heads == 0 || hidden == 0) {
    throw Error(Errc::invalid_config, "transformer dimensions must be positive");
  }
  if (dim % heads != 0) throw Error(Errc::invalid_config, "dim must be divisible by heads");
}

TinyTransformer::TinyTransformer(std::uint64_t seed, TransformerDims dims) : seed_(seed), dims_(dims) {
  dims_.validate();
  Rng rng(seed, kWeightStream);
  const std::size_t d = dims_.dim;
  const std::size_t h = dims_.hidden;
  const double unit = std::sqrt(3.0);  // unit variance for U(-a, a)

  embedding_ = uniform_weights(rng, dims_.vocab * d, unit);
  layers_.resize(dims_.layers);
  for (Layer& layer : layers_) {
    layer.ln1_gain.assign(d, 1.0);
    layer.ln2_gain.assign(d, 1.0);
    layer.wq = uniform_weights(rng, d * d, unit / std::sqrt(static_cast<double>(d)));
    layer.wk = uniform_weights(rng, d * d, unit / std::sqrt(static_cast<double>(d)));
    layer.wv = uniform_weights(rng, d * d, unit / std::sqrt(static_cast<double>(d)));
    layer.wo = uniform_weights(rng, d * d, unit / std::sqrt(static_cast<double>(d)));
    layer.w1 = uniform_weights(rng, h * d, unit / std::sqrt(static_cast<double>(d)));
    layer.b1 = uniform_weights(rng, h, 0.1);
    layer.w2 = uniform_weights(rng, d * h, unit / std::sqrt(static_cast<double>(h)));
    layer.b2 = uniform_weights(rng, d, 0.1);
  }
  final_gain_.assign(d, 1.0);
  unembedding_ = uniform_weights(rng, dims_.vocab * d, unit / std::sqrt(static_cast<double>(d)));
}

std::vector<Distribution> TinyTransformer::forward(std::span<const Token> prefix,
                                                   const StepLayout& layout) const {
  validate_layout(layout, dims_.vocab);
  const std::size_t p = prefix.size();

  std::vector<Node> nodes;
  nodes.reserve(p + layout.size());
  for (std::size_t i = 0; i < p; ++i) {
    if (prefix[i] >= dims_.vocab) throw Error(Errc::invalid_layout, "prefix token outside vocabulary");
    std::vector<std::size_t> ctx(i + 1);
    std::iota(ctx.begin(), ctx.end(), std::size_t{0});
    nodes.push_back(Node{prefix[i], i, std::move(ctx)});
  }
  for (std::size_t q = 0; q < layout.size(); ++q) {
    const QueryToken& query = layout.queries[q];
    std::vector<std::size_t> ctx(p + 1);
    std::iota(ctx.begin(), ctx.end(), std::size_t{0});  // prefix and query 0
    for (std::size_t v : query.visible) {
      if (v != 0) ctx.push_back(p + v);
    }
    if (q != 0) ctx.push_back(p + q);
    // Ascending key position; layout order never affects the sum.
    std::sort(ctx.begin(), ctx.end(), [&](std::size_t a, std::size_t b) {
      const std::size_t pa = a < p ? a : p + layout.queries[a - p].rel_pos;
      const std::size_t pb = b < p ? b : p + layout.queries[b - p].rel_pos;
      return pa != pb ? pa < pb : a < b;
    });
    ctx.erase(std::unique(ctx.begin(), ctx.end()), ctx.end());
    nodes.push_back(Node{query.token, p + query.rel_pos, std::move(ctx)});
  }

  const std::vector<double> probs = run(nodes, p);
  std::vector<Distribution> out;
  out.reserve(layout.size());
  for (std::size_t q = 0; q < layout.size(); ++q) {
    const auto first = probs.begin() + static_cast<std::ptrdiff_t>(q * dims_.vocab);
    out.emplace_back(std::vector<double>(first, first + static_cast<std::ptrdiff_t>(dims_.vocab)));
  }
  return out;
}

std::vector<double> TinyTransformer::run(const std::vector<Node>& nodes,
                                         std::size_t first_output) const {
  const std::size_t d = dims_.dim;
  const std::size_t heads = dims_.heads;
  const std::size_t dh = d / heads;
  const std::size_t count = nodes.size();
  const double score_scale = 1.0 / std::sqrt(static_cast<double>(dh));

  std::vector<double> x(count * d);
  for (std::size_t n = 0; n < count; ++n) {
    std::copy_n(embedding_.begin() + static_cast<std::ptrdiff_t>(nodes[n].token * d), d,
                x.begin() + static_cast<std::ptrdiff_t>(n * d));
    add_position(nodes[n].position, d, x.data() + n * d);
  }

  std::vector<double> normed(d), q(count * d), k(count * d), v(count * d);
  std::vector<double> mixed(d), attn(d), hidden(dims_.hidden), ffn(d), scores;
  std::vector<double> next(count * d);
  for (const Layer& layer : layers_) {
    for (std::size_t n = 0; n < count; ++n) {
      layer_norm(x.data() + n * d, layer.ln1_gain, d, normed.data());
      matvec(layer.wq, d, d, normed.data(), q.data() + n * d);
      matvec(layer.wk, d, d, normed.data(), k.data() + n * d);
      matvec(layer.wv, d, d, normed.data(), v.data() + n * d);
    }
    for (std::size_t n = 0; n < count; ++n) {
      const std::vector<std::size_t>& ctx = nodes[n].context;
      scores.resize(ctx.size());
      for (std::size_t hd = 0; hd < heads; ++hd) {
        const double* qn = q.data() + n * d + hd * dh;
        double max_score = -INFINITY;
        for (std::size_t c = 0; c < ctx.size(); ++c) {
          const double* kc = k.data() + ctx[c] * d + hd * dh;
          double s = 0.0;
          for (std::size_t i = 0; i < dh; ++i) s += qn[i] * kc[i];
          scores[c] = s * score_scale;
          max_score = std::max(max_score, scores[c]);
        }
        double total = 0.0;
        for (double& s : scores) {
          s = std::exp(s - max_score);
          total += s;
        }
        double* out = mixed.data() + hd * dh;
        std::fill(out, out + dh, 0.0);
        for (std::size_t c = 0; c < ctx.size(); ++c) {
          const double* vc = v.data() + ctx[c] * d + hd * dh;
          const double w = scores[c] / total;
          for (std::size_t i = 0; i < dh; ++i) out[i] += w * vc[i];
        }
      }
      matvec(layer.wo, d, d, mixed.data(), attn.data());
      double* xn = next.data() + n * d;
      for (std::size_t i = 0; i < d; ++i) xn[i] = x[n * d + i] + attn[i];

      layer_norm(xn, layer.ln2_gain, d, normed.data());
      matvec(layer.w1, dims_.hidden, d, normed.data(), hidden.data());
      for (std::size_t i = 0; i < dims_.hidden; ++i) hidden[i] = gelu(hidden[i] + layer.b1[i]);
      matvec(layer.w2, d, dims_.hidden, hidden.data(), ffn.data());
      for (std::size_t i = 0; i < d; ++i) xn[i] += ffn[i] + layer.b2[i];
    }
    x.swap(next);
  }

  const std::size_t outputs = count - first_output;
  std::vector<double> probs(outputs * dims_.vocab);
  std::vector<double> logits(dims_.vocab);
  for (std::size_t o = 0; o < outputs; ++o) {
    layer_norm(x.data() + (first_output + o) * d, final_gain_, d, normed.data());
    matvec(unembedding_, dims_.vocab, d, normed.data(), logits.data());
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double total = 0.0;
    for (double& l : logits) {
      l = std::exp((l - max_logit) * kLogitScale);
      total += l;
    }
    for (std::size_t t = 0; t < dims_.vocab; ++t) probs[o * dims_.vocab + t] = logits[t] / total;
  }
  return probs;
}

}  // namespace lookahead
