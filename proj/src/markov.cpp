#include "nextcrop/markov.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "nextcrop/error.hpp"

namespace nextcrop {
namespace {

constexpr double kReversion = 0.05;
constexpr double kMomentum = 0.5;
constexpr double kFloorMass = 1e-9;

void normalize(std::span<double> w) {
  const double total = std::accumulate(w.begin(), w.end(), 0.0);
  for (double& v : w) v /= total;
}

std::size_t checked_contexts(std::size_t vocab, std::size_t order) {
  std::size_t contexts = 1;
  for (std::size_t i = 0; i < order; ++i) {
    if (contexts > kMaxMarkovEntries / vocab) {
      fail(Errc::config, "Markov table of order " + std::to_string(order) +
                             " over " + std::to_string(vocab) +
                             " tokens is too large");
    }
    contexts *= vocab;
  }
  if (contexts > kMaxMarkovEntries / vocab) {
    fail(Errc::config, "Markov table of order " + std::to_string(order) +
                           " over " + std::to_string(vocab) +
                           " tokens is too large");
  }
  return contexts;
}

}  // namespace

MarkovTable::MarkovTable(std::size_t vocab, std::size_t order,
                         std::vector<double> initial,
                         std::vector<double> transitions)
    : vocab_(vocab),
      order_(order),
      initial_(std::move(initial)),
      transitions_(std::move(transitions)) {
  require(vocab_ >= 2, Errc::config, "Markov vocabulary must be >= 2");
  require(order_ >= 1, Errc::config, "Markov order must be >= 1");
  require(initial_.size() == vocab_, Errc::config, "initial distribution size");
  require(transitions_.size() == checked_contexts(vocab_, order_) * vocab_,
          Errc::config, "transition table size");
}

std::span<const double> MarkovTable::row(std::size_t context) const {
  require(context < context_count(), Errc::range, "Markov context out of range");
  return std::span<const double>(transitions_).subspan(context * vocab_, vocab_);
}

std::span<const double> MarkovTable::next_distribution(
    std::span<const TokenId> history) const {
  if (history.empty()) return initial_;
  std::size_t context = 0;
  const std::size_t have = history.size();
  for (std::size_t i = 0; i < order_; ++i) {
    // Slot i holds t[-order + i]; missing history repeats the earliest token.
    const std::size_t back = order_ - i;
    const TokenId t = back <= have ? history[have - back] : history.front();
    context = context * vocab_ + t;
  }
  return row(context);
}

MarkovTable build_markov_table(std::size_t vocab, std::size_t order,
                               const PromptEmbedding& prompt) {
  require(vocab >= 2, Errc::config, "Markov vocabulary must be >= 2");
  require(order >= 1, Errc::config, "Markov order must be >= 1");
  const std::size_t contexts = checked_contexts(vocab, order);

  SeededRng rng(prompt.digest() ^ (order * 0x9E3779B97F4A7C15ull) ^ vocab);
  const double top = static_cast<double>(vocab - 1);
  const double center = rng.uniform(0.25, 0.75) * top;
  const double bandwidth = std::max(1.0, static_cast<double>(vocab) / 32.0);

  std::vector<double> initial(vocab);
  for (std::size_t b = 0; b < vocab; ++b) {
    const double dist = std::abs(static_cast<double>(b) - center);
    initial[b] = std::exp(-dist / (3.0 * bandwidth)) * rng.uniform(0.75, 1.25) + kFloorMass;
  }
  normalize(initial);

  std::vector<double> transitions(contexts * vocab);
  std::vector<TokenId> ctx(order);
  for (std::size_t c = 0; c < contexts; ++c) {
    std::size_t rest = c;
    for (std::size_t i = order; i-- > 0;) {
      ctx[i] = static_cast<TokenId>(rest % vocab);
      rest /= vocab;
    }
    const double last = ctx[order - 1];
    double target = last + kReversion * (center - last);
    if (order >= 2) target += kMomentum * (last - static_cast<double>(ctx[order - 2]));
    target = std::clamp(target, 0.0, top);
    auto row = std::span<double>(transitions).subspan(c * vocab, vocab);
    for (std::size_t b = 0; b < vocab; ++b) {
      const double dist = std::abs(static_cast<double>(b) - target);
      row[b] = std::exp(-dist / bandwidth) * rng.uniform(0.75, 1.25) + kFloorMass;
    }
    normalize(row);
  }
  return MarkovTable(vocab, order, std::move(initial), std::move(transitions));
}

MarkovGenerator::MarkovGenerator(std::size_t vocab, std::size_t order,
                                 std::size_t capacity,
                                 PromptEmbedding default_prompt)
    : vocab_(vocab), order_(order), capacity_(capacity) {
  require(capacity_ >= 1, Errc::config, "generator capacity must be positive");
  default_table_ = std::make_shared<const MarkovTable>(
      build_markov_table(vocab_, order_, default_prompt));
  cache_.emplace(default_prompt.digest(), default_table_);
}

MarkovGenerator::MarkovGenerator(MarkovTable table, std::size_t capacity)
    : vocab_(table.vocab()), order_(table.order()), capacity_(capacity), frozen_(true) {
  require(capacity_ >= 1, Errc::config, "generator capacity must be positive");
  default_table_ = std::make_shared<const MarkovTable>(std::move(table));
}

std::shared_ptr<const MarkovTable> MarkovGenerator::table_for(
    const PromptEmbedding& prompt) const {
  if (frozen_) return default_table_;
  const auto key = prompt.digest();
  std::lock_guard lock(cache_mutex_);
  auto it = cache_.find(key);
  if (it != cache_.end()) return it->second;
  auto table = std::make_shared<const MarkovTable>(
      build_markov_table(vocab_, order_, prompt));
  cache_.emplace(key, table);
  return table;
}

TokenSeq MarkovGenerator::generate(const ConditioningContext& ctx,
                                   std::size_t count,
                                   const SamplingParams& params) const {
  check_request(ctx, count, params);
  const auto table = ctx.prompt ? table_for(*ctx.prompt) : default_table_;
  TokenSeq history = ctx.prefix;
  history.reserve(ctx.prefix.size() + count);
  for (std::size_t t = 0; t < count; ++t) {
    const double u = uniform_at(ctx.stream, history.size());
    history.push_back(
        sample_probabilities(table->next_distribution(history), params, u));
  }
  return TokenSeq(history.begin() + static_cast<std::ptrdiff_t>(ctx.prefix.size()),
                  history.end());
}

std::unique_ptr<MarkovGenerator> make_markov_generator(
    std::size_t vocab, std::size_t order, const PromptEmbedding& prompt,
    std::size_t capacity) {
  return std::make_unique<MarkovGenerator>(vocab, order, capacity, prompt);
}

}  // namespace nextcrop
