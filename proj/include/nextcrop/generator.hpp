#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nextcrop/grid.hpp"
#include "nextcrop/prompt.hpp"
#include "nextcrop/rng.hpp"

namespace nextcrop {

struct SamplingParams {
  double temperature = 1.0;
  std::uint32_t top_k = 0;  // 0 disables the filter
  std::uint64_t seed = 0;

  // Throws Errc::config when temperature <= 0 or top_k > vocab.
  void validate(std::size_t vocab) const;
};

struct ConditioningContext {
  std::optional<PromptEmbedding> prompt;
  TokenSeq prefix;
  StreamKey stream;
};

// Autoregressive token generator. Implementations are immutable after
// construction; generate() is const and safe to call concurrently.
class TokenGenerator {
 public:
  virtual ~TokenGenerator() = default;

  virtual std::size_t vocab_size() const = 0;

  // Maximum number of tokens (prefix + emitted) one call may span.
  virtual std::size_t capacity() const = 0;

  // Emits exactly `count` tokens. Token t depends only on the prompt, the
  // prefix, the tokens emitted before it, and uniform_at(ctx.stream, pos)
  // where pos is its absolute position (prefix.size() + t).
  virtual TokenSeq generate(const ConditioningContext& ctx, std::size_t count,
                            const SamplingParams& params) const = 0;

 protected:
  // Shared precondition checks: count >= 1, context present, capacity.
  void check_request(const ConditioningContext& ctx, std::size_t count,
                     const SamplingParams& params) const;
};

// Draws from `probs` after temperature and top-k shaping, using the single
// uniform variate `u` (inverse CDF). Ties in top-k keep the lower index.
TokenId sample_probabilities(std::span<const double> probs,
                             const SamplingParams& params, double u);

// Same, starting from unnormalized logits.
TokenId sample_logits(std::span<const double> logits,
                      const SamplingParams& params, double u);

}  // namespace nextcrop
