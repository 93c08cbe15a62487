#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "nextcrop/generator.hpp"

namespace nextcrop {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

struct TinyModelShape {
  std::size_t window = 64;  // L: longest sequence the model attends over
  std::size_t vocab = 256;  // K
  std::size_t dim = 16;     // m; the feed-forward hidden width is 2m

  std::size_t hidden() const noexcept { return 2 * dim; }
  friend bool operator==(const TinyModelShape&, const TinyModelShape&) = default;
};

// Single-block causal transformer over token ids:
//
//   x_t  = E[tok_t] + P[t]
//   z    = softmax_causal(x Wq (x Wk)^T / sqrt(m)) (x Wv)
//   h1   = x + z Wo
//   h2   = h1 + tanh(h1 W1 + b1) W2 + b2
//   out  = h2 Wout + bout
//
// Parameters live in one flat vector in this order (all row-major):
// E[K,m] P[L,m] Wq[m,m] Wk[m,m] Wv[m,m] Wo[m,m] W1[m,2m] b1[2m] W2[2m,m]
// b2[m] Wout[m,K] bout[K].
class TinyCausalModel {
 public:
  TinyCausalModel(TinyModelShape shape, std::vector<double> parameters);

  static TinyCausalModel zeros(TinyModelShape shape);
  // Components drawn uniformly from [-scale, scale].
  static TinyCausalModel random(TinyModelShape shape, std::uint64_t seed,
                                double scale = 0.1);
  static std::size_t parameter_count(const TinyModelShape& shape);

  const TinyModelShape& shape() const noexcept { return shape_; }
  std::span<const double> parameters() const noexcept { return theta_; }
  std::span<double> mutable_parameters() noexcept { return theta_; }

  // Logits for every position of `sequence` (T x K).
  RowMatrix logits(std::span<const TokenId> sequence) const;

  // Logits for the first token of an empty context: bout shifted by a fixed
  // projection of the prompt.
  Eigen::VectorXd start_logits(const PromptEmbedding* prompt) const;

  // -sum_{t>=1} log softmax(logits[t-1])[seq[t]]
  double nll(std::span<const TokenId> sequence) const;

  // Same loss; accumulates d loss / d theta into `grad` (same layout).
  double nll_with_gradient(std::span<const TokenId> sequence,
                           std::span<double> grad) const;

  friend bool operator==(const TinyCausalModel&, const TinyCausalModel&) = default;

 private:
  void check_sequence(std::span<const TokenId> sequence, std::size_t min_len) const;

  TinyModelShape shape_;
  std::vector<double> theta_;
};

// Incremental inference with a key/value cache; one token per step.
class TinySession {
 public:
  explicit TinySession(const TinyCausalModel& model);

  // Feeds the next token; returns logits predicting the token after it.
  Eigen::VectorXd append(TokenId token);
  std::size_t length() const noexcept { return length_; }

 private:
  const TinyCausalModel& model_;
  RowMatrix keys_;
  RowMatrix values_;
  std::size_t length_ = 0;
};

struct TrainingResult {
  TinyCausalModel model;
  // loss_curve[e] is the mean corpus loss at the start of epoch e;
  // the final entry is the loss after the last update.
  std::vector<double> loss_curve;
};

// Full-batch gradient descent on the mean per-sequence nll.
TrainingResult train_tiny(TinyCausalModel model,
                          const std::vector<TokenSeq>& corpus,
                          std::size_t epochs, double learning_rate);

double mean_corpus_loss(const TinyCausalModel& model,
                        const std::vector<TokenSeq>& corpus);

class TinyModelGenerator final : public TokenGenerator {
 public:
  explicit TinyModelGenerator(std::shared_ptr<const TinyCausalModel> model);

  std::size_t vocab_size() const override { return model_->shape().vocab; }
  std::size_t capacity() const override { return model_->shape().window; }

  TokenSeq generate(const ConditioningContext& ctx, std::size_t count,
                    const SamplingParams& params) const override;

 private:
  std::shared_ptr<const TinyCausalModel> model_;
};

}  // namespace nextcrop
