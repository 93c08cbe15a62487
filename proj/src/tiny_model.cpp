#include "nextcrop/tiny_model.hpp"

#include <cmath>
#include <string>
#include <type_traits>

#include "nextcrop/error.hpp"

namespace nextcrop {
namespace {

struct Offsets {
  std::size_t tok, pos, wq, wk, wv, wo, w1, b1, w2, b2, wout, bout, total;
};

Offsets offsets_for(const TinyModelShape& s) {
  const std::size_t k = s.vocab, l = s.window, m = s.dim, h = s.hidden();
  Offsets o{};
  std::size_t at = 0;
  auto take = [&at](std::size_t n) {
    const std::size_t start = at;
    at += n;
    return start;
  };
  o.tok = take(k * m);
  o.pos = take(l * m);
  o.wq = take(m * m);
  o.wk = take(m * m);
  o.wv = take(m * m);
  o.wo = take(m * m);
  o.w1 = take(m * h);
  o.b1 = take(h);
  o.w2 = take(h * m);
  o.b2 = take(m);
  o.wout = take(m * k);
  o.bout = take(k);
  o.total = at;
  return o;
}

// Eigen views over a flat parameter (or gradient) buffer.
template <typename T>
struct ParamView {
  static constexpr bool kConst = std::is_const_v<T>;
  using Mat = Eigen::Map<std::conditional_t<kConst, const RowMatrix, RowMatrix>>;
  using Vec = Eigen::Map<std::conditional_t<kConst, const Eigen::VectorXd, Eigen::VectorXd>>;

  ParamView(T* base, const TinyModelShape& s)
      : ParamView(base, s, offsets_for(s)) {}

  ParamView(T* base, const TinyModelShape& s, const Offsets& o)
      : tok(base + o.tok, s.vocab, s.dim),
        pos(base + o.pos, s.window, s.dim),
        wq(base + o.wq, s.dim, s.dim),
        wk(base + o.wk, s.dim, s.dim),
        wv(base + o.wv, s.dim, s.dim),
        wo(base + o.wo, s.dim, s.dim),
        w1(base + o.w1, s.dim, s.hidden()),
        b1(base + o.b1, s.hidden()),
        w2(base + o.w2, s.hidden(), s.dim),
        b2(base + o.b2, s.dim),
        wout(base + o.wout, s.dim, s.vocab),
        bout(base + o.bout, s.vocab) {}

  Mat tok, pos, wq, wk, wv, wo, w1;
  Vec b1;
  Mat w2;
  Vec b2;
  Mat wout;
  Vec bout;
};

struct ForwardCache {
  RowMatrix x, q, k, v, attn, z, h1, g, h2, logits;
};

ForwardCache forward(const ParamView<const double>& p,
                     std::span<const TokenId> seq, std::size_t dim) {
  const auto t_len = static_cast<Eigen::Index>(seq.size());
  ForwardCache f;
  f.x.resize(t_len, static_cast<Eigen::Index>(dim));
  for (Eigen::Index t = 0; t < t_len; ++t) {
    f.x.row(t) = p.tok.row(seq[t]) + p.pos.row(t);
  }
  f.q = f.x * p.wq;
  f.k = f.x * p.wk;
  f.v = f.x * p.wv;
  const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
  RowMatrix scores = (f.q * f.k.transpose()) * scale;
  f.attn = RowMatrix::Zero(t_len, t_len);
  for (Eigen::Index t = 0; t < t_len; ++t) {
    const double mx = scores.row(t).head(t + 1).maxCoeff();
    double total = 0.0;
    for (Eigen::Index s = 0; s <= t; ++s) {
      f.attn(t, s) = std::exp(scores(t, s) - mx);
      total += f.attn(t, s);
    }
    f.attn.row(t).head(t + 1) /= total;
  }
  f.z = f.attn * f.v;
  f.h1 = f.x + f.z * p.wo;
  f.g = ((f.h1 * p.w1).rowwise() + p.b1.transpose()).array().tanh().matrix();
  f.h2 = f.h1 + ((f.g * p.w2).rowwise() + p.b2.transpose());
  f.logits = (f.h2 * p.wout).rowwise() + p.bout.transpose();
  return f;
}

double log_sum_exp(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  const double mx = row.maxCoeff();
  return mx + std::log((row.array() - mx).exp().sum());
}

}  // namespace

TinyCausalModel::TinyCausalModel(TinyModelShape shape,
                                 std::vector<double> parameters)
    : shape_(shape), theta_(std::move(parameters)) {
  require(shape_.vocab >= 2, Errc::config, "tiny model vocabulary must be >= 2");
  require(shape_.window >= 2, Errc::config, "tiny model window must be >= 2");
  require(shape_.dim >= 1, Errc::config, "tiny model width must be >= 1");
  require(theta_.size() == parameter_count(shape_), Errc::config,
          "parameter vector has " + std::to_string(theta_.size()) +
              " entries, expected " + std::to_string(parameter_count(shape_)));
}

std::size_t TinyCausalModel::parameter_count(const TinyModelShape& shape) {
  return offsets_for(shape).total;
}

TinyCausalModel TinyCausalModel::zeros(TinyModelShape shape) {
  return TinyCausalModel(shape, std::vector<double>(parameter_count(shape), 0.0));
}

TinyCausalModel TinyCausalModel::random(TinyModelShape shape,
                                        std::uint64_t seed, double scale) {
  SeededRng rng(seed);
  std::vector<double> theta(parameter_count(shape));
  for (double& v : theta) v = rng.uniform(-scale, scale);
  return TinyCausalModel(shape, std::move(theta));
}

void TinyCausalModel::check_sequence(std::span<const TokenId> sequence,
                                     std::size_t min_len) const {
  require(sequence.size() >= min_len, Errc::input,
          "sequence needs at least " + std::to_string(min_len) + " tokens");
  require(sequence.size() <= shape_.window, Errc::capacity,
          "sequence of " + std::to_string(sequence.size()) +
              " tokens exceeds model window " + std::to_string(shape_.window));
  for (TokenId t : sequence) {
    require(t < shape_.vocab, Errc::codebook,
            "token id " + std::to_string(t) + " outside vocabulary");
  }
}

RowMatrix TinyCausalModel::logits(std::span<const TokenId> sequence) const {
  check_sequence(sequence, 1);
  ParamView<const double> p(theta_.data(), shape_);
  return forward(p, sequence, shape_.dim).logits;
}

Eigen::VectorXd TinyCausalModel::start_logits(const PromptEmbedding* prompt) const {
  ParamView<const double> p(theta_.data(), shape_);
  Eigen::VectorXd out = p.bout;
  if (prompt != nullptr && !prompt->values.empty()) {
    for (std::size_t k = 0; k < shape_.vocab; ++k) {
      out[static_cast<Eigen::Index>(k)] += 4.0 * prompt->values[k % prompt->values.size()];
    }
  }
  return out;
}

double TinyCausalModel::nll(std::span<const TokenId> sequence) const {
  check_sequence(sequence, 2);
  ParamView<const double> p(theta_.data(), shape_);
  const RowMatrix lg = forward(p, sequence, shape_.dim).logits;
  double loss = 0.0;
  for (std::size_t t = 0; t + 1 < sequence.size(); ++t) {
    const auto row = lg.row(static_cast<Eigen::Index>(t));
    loss += log_sum_exp(row) - row[sequence[t + 1]];
  }
  return loss;
}

double TinyCausalModel::nll_with_gradient(std::span<const TokenId> sequence,
                                          std::span<double> grad) const {
  check_sequence(sequence, 2);
  require(grad.size() == theta_.size(), Errc::shape, "gradient buffer size");
  ParamView<const double> p(theta_.data(), shape_);
  ParamView<double> g(grad.data(), shape_);
  const ForwardCache f = forward(p, sequence, shape_.dim);
  const auto t_len = static_cast<Eigen::Index>(sequence.size());

  double loss = 0.0;
  RowMatrix dlogits = RowMatrix::Zero(t_len, static_cast<Eigen::Index>(shape_.vocab));
  for (Eigen::Index t = 0; t + 1 < t_len; ++t) {
    const auto row = f.logits.row(t);
    const double lse = log_sum_exp(row);
    const TokenId next = sequence[static_cast<std::size_t>(t) + 1];
    loss += lse - row[next];
    dlogits.row(t) = (row.array() - lse).exp().matrix();
    dlogits(t, next) -= 1.0;
  }

  g.wout += f.h2.transpose() * dlogits;
  g.bout += dlogits.colwise().sum().transpose();
  const RowMatrix dh2 = dlogits * p.wout.transpose();

  g.w2 += f.g.transpose() * dh2;
  g.b2 += dh2.colwise().sum().transpose();
  const RowMatrix dpre =
      ((dh2 * p.w2.transpose()).array() * (1.0 - f.g.array().square())).matrix();
  g.w1 += f.h1.transpose() * dpre;
  g.b1 += dpre.colwise().sum().transpose();
  const RowMatrix dh1 = dh2 + dpre * p.w1.transpose();

  g.wo += f.z.transpose() * dh1;
  const RowMatrix dz = dh1 * p.wo.transpose();
  const RowMatrix dattn = dz * f.v.transpose();
  const RowMatrix dv = f.attn.transpose() * dz;

  const double scale = 1.0 / std::sqrt(static_cast<double>(shape_.dim));
  RowMatrix dscores = RowMatrix::Zero(t_len, t_len);
  for (Eigen::Index t = 0; t < t_len; ++t) {
    double dot = 0.0;
    for (Eigen::Index s = 0; s <= t; ++s) dot += f.attn(t, s) * dattn(t, s);
    for (Eigen::Index s = 0; s <= t; ++s) {
      dscores(t, s) = f.attn(t, s) * (dattn(t, s) - dot) * scale;
    }
  }
  const RowMatrix dq = dscores * f.k;
  const RowMatrix dk = dscores.transpose() * f.q;

  g.wq += f.x.transpose() * dq;
  g.wk += f.x.transpose() * dk;
  g.wv += f.x.transpose() * dv;
  const RowMatrix dx = dh1 + dq * p.wq.transpose() + dk * p.wk.transpose() +
                       dv * p.wv.transpose();
  for (Eigen::Index t = 0; t < t_len; ++t) {
    g.tok.row(sequence[static_cast<std::size_t>(t)]) += dx.row(t);
    g.pos.row(t) += dx.row(t);
  }
  return loss;
}

TinySession::TinySession(const TinyCausalModel& model)
    : model_(model),
      keys_(static_cast<Eigen::Index>(model.shape().window),
            static_cast<Eigen::Index>(model.shape().dim)),
      values_(static_cast<Eigen::Index>(model.shape().window),
              static_cast<Eigen::Index>(model.shape().dim)) {}

Eigen::VectorXd TinySession::append(TokenId token) {
  const auto& shape = model_.shape();
  require(length_ < shape.window, Errc::capacity, "session exceeds model window");
  require(token < shape.vocab, Errc::codebook, "token outside vocabulary");
  ParamView<const double> p(model_.parameters().data(), shape);
  const auto t = static_cast<Eigen::Index>(length_);

  const Eigen::RowVectorXd x = p.tok.row(token) + p.pos.row(t);
  const Eigen::RowVectorXd q = x * p.wq;
  keys_.row(t) = x * p.wk;
  values_.row(t) = x * p.wv;

  const double scale = 1.0 / std::sqrt(static_cast<double>(shape.dim));
  Eigen::VectorXd w = (keys_.topRows(t + 1) * q.transpose()) * scale;
  w = (w.array() - w.maxCoeff()).exp().matrix();
  w /= w.sum();
  const Eigen::RowVectorXd z = w.transpose() * values_.topRows(t + 1);

  const Eigen::RowVectorXd h1 = x + z * p.wo;
  const Eigen::RowVectorXd g = (h1 * p.w1 + p.b1.transpose()).array().tanh().matrix();
  const Eigen::RowVectorXd h2 = h1 + g * p.w2 + p.b2.transpose();
  ++length_;
  return (h2 * p.wout + p.bout.transpose()).transpose();
}

double mean_corpus_loss(const TinyCausalModel& model,
                        const std::vector<TokenSeq>& corpus) {
  require(!corpus.empty(), Errc::input, "training corpus is empty");
  double total = 0.0;
  for (const auto& seq : corpus) total += model.nll(seq);
  return total / static_cast<double>(corpus.size());
}

TrainingResult train_tiny(TinyCausalModel model,
                          const std::vector<TokenSeq>& corpus,
                          std::size_t epochs, double learning_rate) {
  require(!corpus.empty(), Errc::input, "training corpus is empty");
  require(learning_rate >= 0.0 && std::isfinite(learning_rate), Errc::config,
          "learning rate must be finite and non-negative");
  TrainingResult result{std::move(model), {}};
  auto& m = result.model;
  std::vector<double> grad(m.parameters().size());
  const double inv_n = 1.0 / static_cast<double>(corpus.size());

  for (std::size_t epoch = 0; epoch < epochs; ++epoch) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double loss = 0.0;
    for (const auto& seq : corpus) loss += m.nll_with_gradient(seq, grad);
    loss *= inv_n;
    if (!std::isfinite(loss)) {
      fail(Errc::training, "loss became non-finite at epoch " +
                               std::to_string(epoch) + " (lr=" +
                               std::to_string(learning_rate) + ")");
    }
    result.loss_curve.push_back(loss);
    auto theta = m.mutable_parameters();
    for (std::size_t i = 0; i < theta.size(); ++i) {
      theta[i] -= learning_rate * grad[i] * inv_n;
    }
  }
  const double final_loss = mean_corpus_loss(m, corpus);
  if (!std::isfinite(final_loss)) {
    fail(Errc::training, "loss became non-finite after epoch " +
                             std::to_string(epochs) + " (lr=" +
                             std::to_string(learning_rate) + ")");
  }
  result.loss_curve.push_back(final_loss);
  return result;
}

TinyModelGenerator::TinyModelGenerator(std::shared_ptr<const TinyCausalModel> model)
    : model_(std::move(model)) {
  require(model_ != nullptr, Errc::config, "tiny generator needs a model");
}

TokenSeq TinyModelGenerator::generate(const ConditioningContext& ctx,
                                      std::size_t count,
                                      const SamplingParams& params) const {
  check_request(ctx, count, params);
  TinySession session(*model_);
  Eigen::VectorXd next;
  for (TokenId t : ctx.prefix) next = session.append(t);
  if (ctx.prefix.empty()) {
    next = model_->start_logits(ctx.prompt ? &*ctx.prompt : nullptr);
  }
  TokenSeq out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double u = uniform_at(ctx.stream, ctx.prefix.size() + i);
    const TokenId tok = sample_logits(
        std::span<const double>(next.data(), static_cast<std::size_t>(next.size())),
        params, u);
    out.push_back(tok);
    if (i + 1 < count) next = session.append(tok);
  }
  return out;
}

}  // namespace nextcrop
