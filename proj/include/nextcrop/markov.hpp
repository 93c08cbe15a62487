#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "nextcrop/generator.hpp"

namespace nextcrop {

// Order-k transition table over K token ids. Row index of a context
// (t[-k], ..., t[-1]) is sum_i t[-k+i] * K^(k-1-i).
class MarkovTable {
 public:
  MarkovTable(std::size_t vocab, std::size_t order, std::vector<double> initial,
              std::vector<double> transitions);

  std::size_t vocab() const noexcept { return vocab_; }
  std::size_t order() const noexcept { return order_; }
  std::size_t context_count() const noexcept { return transitions_.size() / vocab_; }

  std::span<const double> initial() const noexcept { return initial_; }
  std::span<const double> transitions() const noexcept { return transitions_; }
  std::span<const double> row(std::size_t context) const;

  // Distribution of the next token after `history`. Empty history uses the
  // initial distribution. Histories shorter than the order are left-padded
  // by repeating their earliest token.
  std::span<const double> next_distribution(std::span<const TokenId> history) const;

  friend bool operator==(const MarkovTable&, const MarkovTable&) = default;

 private:
  std::size_t vocab_;
  std::size_t order_;
  std::vector<double> initial_;
  std::vector<double> transitions_;
};

// Largest table (contexts x K entries) build_markov_table will materialize.
inline constexpr std::size_t kMaxMarkovEntries = std::size_t{1} << 22;

// Prompt-seeded table. Transition mass decays with |next - target| where the
// target pulls the last token gently toward a prompt-specific centre, so
// neighbouring ids are strongly preferred and the chain is stationary.
MarkovTable build_markov_table(std::size_t vocab, std::size_t order,
                               const PromptEmbedding& prompt);

class MarkovGenerator final : public TokenGenerator {
 public:
  MarkovGenerator(std::size_t vocab, std::size_t order, std::size_t capacity,
                  PromptEmbedding default_prompt);
  // Serves one fixed table (e.g. loaded from a checkpoint) for every prompt.
  MarkovGenerator(MarkovTable table, std::size_t capacity);

  std::size_t vocab_size() const override { return vocab_; }
  std::size_t capacity() const override { return capacity_; }
  std::size_t order() const noexcept { return order_; }

  // The table used when a context carries `prompt`; built once and cached.
  std::shared_ptr<const MarkovTable> table_for(const PromptEmbedding& prompt) const;
  std::shared_ptr<const MarkovTable> default_table() const { return default_table_; }

  TokenSeq generate(const ConditioningContext& ctx, std::size_t count,
                    const SamplingParams& params) const override;

 private:
  std::size_t vocab_;
  std::size_t order_;
  std::size_t capacity_;
  std::shared_ptr<const MarkovTable> default_table_;
  bool frozen_ = false;
  mutable std::mutex cache_mutex_;
  mutable std::map<std::uint64_t, std::shared_ptr<const MarkovTable>> cache_;
};

std::unique_ptr<MarkovGenerator> make_markov_generator(
    std::size_t vocab, std::size_t order, const PromptEmbedding& prompt,
    std::size_t capacity);

}  // namespace nextcrop
