#include "nextcrop/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nextcrop/error.hpp"

namespace nextcrop {

void SamplingParams::validate(std::size_t vocab) const {
  require(temperature > 0.0 && std::isfinite(temperature), Errc::config,
          "temperature must be positive");
  require(top_k <= vocab, Errc::config,
          "top_k " + std::to_string(top_k) + " exceeds vocabulary " +
              std::to_string(vocab));
}

void TokenGenerator::check_request(const ConditioningContext& ctx,
                                   std::size_t count,
                                   const SamplingParams& params) const {
  require(count >= 1, Errc::input, "generate requires count >= 1");
  require(ctx.prompt.has_value() || !ctx.prefix.empty(), Errc::input,
          "conditioning context needs a prompt or a token prefix");
  params.validate(vocab_size());
  if (ctx.prefix.size() + count > capacity()) {
    fail(Errc::capacity, "request spans " +
                             std::to_string(ctx.prefix.size() + count) +
                             " tokens, generator capacity is " +
                             std::to_string(capacity()));
  }
  for (TokenId t : ctx.prefix) {
    require(t < vocab_size(), Errc::codebook, "prefix token outside vocabulary");
  }
}

namespace {

std::vector<double> shape_distribution(std::vector<double> w,
                                       const SamplingParams& params) {
  if (params.top_k > 0 && params.top_k < w.size()) {
    std::vector<std::size_t> order(w.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return w[a] > w[b]; });
    for (std::size_t i = params.top_k; i < order.size(); ++i) w[order[i]] = 0.0;
  }
  return w;
}

TokenId draw(std::span<const double> w, double u) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  const double target = u * total;
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w[i] <= 0.0) continue;
    last_positive = i;
    acc += w[i];
    if (target < acc) return static_cast<TokenId>(i);
  }
  return static_cast<TokenId>(last_positive);
}

}  // namespace

TokenId sample_probabilities(std::span<const double> probs,
                             const SamplingParams& params, double u) {
  std::vector<double> w(probs.begin(), probs.end());
  if (params.temperature != 1.0) {
    const double inv_t = 1.0 / params.temperature;
    // Renormalize against the max in log space to avoid underflow.
    double max_log = -INFINITY;
    for (double p : w) {
      if (p > 0.0) max_log = std::max(max_log, std::log(p));
    }
    for (double& p : w) p = p > 0.0 ? std::exp((std::log(p) - max_log) * inv_t) : 0.0;
  }
  return draw(shape_distribution(std::move(w), params), u);
}

TokenId sample_logits(std::span<const double> logits,
                      const SamplingParams& params, double u) {
  const double inv_t = 1.0 / params.temperature;
  const double max_logit = *std::max_element(logits.begin(), logits.end());
  std::vector<double> w(logits.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp((logits[i] - max_logit) * inv_t);
  }
  return draw(shape_distribution(std::move(w), params), u);
}

}  // namespace nextcrop
