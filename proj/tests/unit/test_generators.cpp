#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "nextcrop/generator.hpp"
#include "nextcrop/markov.hpp"
#include "nextcrop/prompt.hpp"
#include "nextcrop/tiny_model.hpp"
#include "support.hpp"

using namespace nextcrop;
using testing::error_code_of;

TEST_CASE("prompt embeddings are deterministic unit vectors") {
  const auto a = encode_prompt("a beach");
  CHECK(a.values == encode_prompt("a beach").values);
  CHECK(a.values.size() == kPromptDim);
  CHECK(a.source_text == "a beach");
  for (const char* text : {"a beach", "a forest", "x", "seascape", "crowd"}) {
    const auto e = encode_prompt(text);
    const double norm = std::sqrt(std::inner_product(e.values.begin(), e.values.end(),
                                                     e.values.begin(), 0.0));
    CHECK(norm == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto b = encode_prompt("a forest");
  for (std::size_t i = 0; i < kPromptDim; ++i) CHECK(a.values[i] != b.values[i]);
  CHECK(error_code_of([] { encode_prompt(""); }) == "input");
}

TEST_CASE("sampling params validation") {
  CHECK(error_code_of([] { SamplingParams{0.0, 0, 0}.validate(8); }) == "config");
  CHECK(error_code_of([] { SamplingParams{1.0, 9, 0}.validate(8); }) == "config");
  CHECK(error_code_of([] { SamplingParams{0.5, 8, 0}.validate(8); }) == "none");
}

TEST_CASE("inverse-CDF sampling") {
  const std::vector<double> probs = {0.1, 0.2, 0.3, 0.4};
  const SamplingParams plain;
  CHECK(sample_probabilities(probs, plain, 0.0) == 0);
  CHECK(sample_probabilities(probs, plain, 0.05) == 0);
  CHECK(sample_probabilities(probs, plain, 0.25) == 1);
  CHECK(sample_probabilities(probs, plain, 0.55) == 2);
  CHECK(sample_probabilities(probs, plain, 0.999999) == 3);
  // top-1 is greedy regardless of u.
  const SamplingParams greedy{1.0, 1, 0};
  for (double u : {0.0, 0.3, 0.99}) CHECK(sample_probabilities(probs, greedy, u) == 3);
  // top-2 keeps {2, 3} renormalised to 3/7, 4/7.
  const SamplingParams top2{1.0, 2, 0};
  CHECK(sample_probabilities(probs, top2, 0.42) == 2);
  CHECK(sample_probabilities(probs, top2, 0.43) == 3);
  // Very low temperature approaches argmax; logits path agrees.
  const std::vector<double> logits = {0.0, 1.0, 3.0, 2.0};
  CHECK(sample_logits(logits, SamplingParams{1e-3, 0, 0}, 0.01) == 2);
  CHECK(sample_logits(logits, SamplingParams{1e-3, 0, 0}, 0.99) == 2);
}

TEST_CASE("Markov table rows are normalised and prompt-determined") {
  const auto prompt = encode_prompt("grassland");
  const auto t1 = build_markov_table(32, 2, prompt);
  CHECK(t1 == build_markov_table(32, 2, prompt));
  CHECK_FALSE(t1 == build_markov_table(32, 2, encode_prompt("weather")));
  CHECK(t1.context_count() == 32 * 32);
  for (std::size_t c = 0; c < t1.context_count(); ++c) {
    const auto row = t1.row(c);
    CHECK(std::accumulate(row.begin(), row.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  }
  const auto init = t1.initial();
  CHECK(std::accumulate(init.begin(), init.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(error_code_of([&] { build_markov_table(1, 1, prompt); }) == "config");
  CHECK(error_code_of([&] { build_markov_table(16384, 2, prompt); }) == "config");
}

TEST_CASE("Markov transitions prefer nearby ids") {
  // Expected |delta| under the table, averaged over the stationary-ish chain,
  // against the analytic uniform value (K^2 - 1) / (3K).
  const std::size_t k = 64;
  auto gen = make_markov_generator(k, 1, encode_prompt("landscape"), 100001);
  ConditioningContext ctx{encode_prompt("landscape"), {}, StreamKey{4, 0, 0}};
  const auto seq = gen->generate(ctx, 100000, SamplingParams{});
  double total = 0.0;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    total += std::abs(static_cast<double>(seq[i]) - static_cast<double>(seq[i - 1]));
  }
  const double uniform = (static_cast<double>(k * k) - 1.0) / (3.0 * k);
  CHECK(total / static_cast<double>(seq.size() - 1) < 0.5 * uniform);
}

TEST_CASE("order-1 Markov frequencies match the table") {
  const std::size_t k = 8;
  const auto prompt = encode_prompt("pattern");
  MarkovGenerator gen(k, 1, 100001, prompt);
  ConditioningContext ctx{prompt, {}, StreamKey{17, 0, 0}};
  const auto seq = gen.generate(ctx, 100000, SamplingParams{});
  std::vector<double> counts(k * k, 0.0), totals(k, 0.0);
  for (std::size_t i = 1; i < seq.size(); ++i) {
    counts[seq[i - 1] * k + seq[i]] += 1.0;
    totals[seq[i - 1]] += 1.0;
  }
  const auto& table = *gen.default_table();
  for (std::size_t a = 0; a < k; ++a) {
    REQUIRE(totals[a] > 1000.0);
    for (std::size_t b = 0; b < k; ++b) {
      CHECK(std::abs(counts[a * k + b] / totals[a] - table.row(a)[b]) < 0.02);
    }
  }
}

TEST_CASE("Markov generation contract") {
  const auto prompt = encode_prompt("seascape");
  auto gen = make_markov_generator(256, 1, prompt, 1024);
  ConditioningContext ctx{prompt, {}, StreamKey{9, 0, 0}};
  const auto block = gen->generate(ctx, 1024, SamplingParams{});
  CHECK(block.size() == 1024);
  CHECK(block == gen->generate(ctx, 1024, SamplingParams{}));
  CHECK(error_code_of([&] { gen->generate(ctx, 1025, SamplingParams{}); }) == "capacity");
  CHECK(error_code_of([&] { gen->generate(ctx, 0, SamplingParams{}); }) != "none");
  ConditioningContext empty{std::nullopt, {}, StreamKey{}};
  CHECK(error_code_of([&] { gen->generate(empty, 4, SamplingParams{}); }) == "input");

  ConditioningContext other = ctx;
  other.stream.row = 1;
  CHECK(gen->generate(other, 64, SamplingParams{}) != gen->generate(ctx, 64, SamplingParams{}));
  // Prefix-only conditioning is allowed.
  ConditioningContext prefix_only{std::nullopt, {3, 4, 5}, StreamKey{1, 2, 3}};
  CHECK(gen->generate(prefix_only, 10, SamplingParams{}).size() == 10);
}

TEST_CASE("Markov prefix-extension consistency") {
  const auto prompt = encode_prompt("architecture");
  for (std::size_t order : {1u, 2u, 3u}) {
    auto gen = make_markov_generator(24, order, prompt, 200);
    std::mt19937 rng(order);
    for (int trial = 0; trial < 20; ++trial) {
      TokenSeq prefix(rng() % 6);
      for (auto& t : prefix) t = rng() % 24;
      ConditioningContext ctx{prompt, prefix, StreamKey{rng(), rng() % 5, rng() % 5}};
      const std::size_t a = 1 + rng() % 20, b = 1 + rng() % 20;
      const auto whole = gen->generate(ctx, a + b, SamplingParams{0.8, 5, 3});
      const auto first = gen->generate(ctx, a, SamplingParams{0.8, 5, 3});
      ConditioningContext extended = ctx;
      extended.prefix.insert(extended.prefix.end(), first.begin(), first.end());
      const auto second = gen->generate(extended, b, SamplingParams{0.8, 5, 3});
      TokenSeq joined = first;
      joined.insert(joined.end(), second.begin(), second.end());
      CHECK(joined == whole);
    }
  }
}

TEST_CASE("frozen Markov generator ignores the prompt") {
  const auto table = build_markov_table(16, 1, encode_prompt("crowd"));
  MarkovGenerator gen(table, 64);
  ConditioningContext a{encode_prompt("crowd"), {}, StreamKey{1, 0, 0}};
  ConditioningContext b{encode_prompt("weather"), {}, StreamKey{1, 0, 0}};
  CHECK(gen.generate(a, 40, SamplingParams{}) == gen.generate(b, 40, SamplingParams{}));
}

TEST_CASE("tiny model softmax normalises at every position") {
  const auto model = TinyCausalModel::random({12, 20, 6}, 5, 0.5);
  const TokenSeq seq = {1, 4, 19, 0, 7, 7, 3, 12, 11, 2, 8, 5};
  const auto logits = model.logits(seq);
  REQUIRE(logits.rows() == 12);
  REQUIRE(logits.cols() == 20);
  for (Eigen::Index t = 0; t < logits.rows(); ++t) {
    const double mx = logits.row(t).maxCoeff();
    const double z = (logits.row(t).array() - mx).exp().sum();
    const double sum = ((logits.row(t).array() - mx).exp() / z).sum();
    CHECK(std::abs(sum - 1.0) < 1e-9);
  }
}

TEST_CASE("tiny model loss basics") {
  const TinyModelShape shape{8, 16, 4};
  const auto zeros = TinyCausalModel::zeros(shape);
  CHECK(zeros.nll(TokenSeq{3, 9}) == doctest::Approx(std::log(16.0)).epsilon(1e-12));
  const auto model = TinyCausalModel::random(shape, 2, 1.0);
  std::mt19937 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    TokenSeq seq(2 + rng() % 7);
    for (auto& t : seq) t = rng() % 16;
    CHECK(model.nll(seq) >= 0.0);
  }
  CHECK(error_code_of([&] { model.nll(TokenSeq{1}); }) != "none");
  CHECK(error_code_of([&] { model.nll(TokenSeq(9, 1)); }) != "none");
  CHECK(error_code_of([&] { model.nll(TokenSeq{1, 16}); }) == "codebook");
}

TEST_CASE("tiny model gradient matches central differences") {
  const TinyModelShape shape{6, 7, 4};
  auto model = TinyCausalModel::random(shape, 13, 0.5);
  const TokenSeq seq = {3, 0, 6, 6, 2, 5};
  std::vector<double> grad(TinyCausalModel::parameter_count(shape), 0.0);
  model.nll_with_gradient(seq, grad);
  const double h = 1e-5;
  double worst = 0.0;
  for (std::size_t i = 0; i < grad.size(); ++i) {
    auto theta = model.mutable_parameters();
    const double saved = theta[i];
    theta[i] = saved + h;
    const double up = model.nll(seq);
    theta[i] = saved - h;
    const double down = model.nll(seq);
    theta[i] = saved;
    const double numeric = (up - down) / (2 * h);
    const double denom = std::max({1e-6, std::abs(grad[i]), std::abs(numeric)});
    worst = std::max(worst, std::abs(grad[i] - numeric) / denom);
  }
  CHECK(worst < 1e-4);
}

TEST_CASE("KV-cache session matches the full forward pass") {
  const auto model = TinyCausalModel::random({10, 12, 5}, 3, 0.4);
  const TokenSeq seq = {1, 11, 4, 4, 0, 9, 2, 7, 3, 10};
  const auto full = model.logits(seq);
  TinySession session(model);
  for (std::size_t t = 0; t < seq.size(); ++t) {
    const auto step = session.append(seq[t]);
    for (Eigen::Index k = 0; k < full.cols(); ++k) {
      CHECK(step[k] == doctest::Approx(full(static_cast<Eigen::Index>(t), k)).epsilon(1e-12));
    }
  }
}

TEST_CASE("tiny training") {
  const TinyModelShape shape{16, 32, 8};
  const auto init = TinyCausalModel::random(shape, 1);

  SUBCASE("zero learning rate changes nothing") {
    const std::vector<TokenSeq> corpus = {TokenSeq(16, 4), TokenSeq(16, 9)};
    const auto r = train_tiny(init, corpus, 5, 0.0);
    CHECK(r.model == init);
    for (double l : r.loss_curve) CHECK(l == r.loss_curve.front());
  }
  SUBCASE("zero epochs returns the initialisation") {
    const auto r = train_tiny(init, {TokenSeq(16, 4)}, 0, 0.05);
    CHECK(r.model == init);
    CHECK(r.loss_curve.size() == 1);
  }
  SUBCASE("degenerate corpus is learned to near-zero loss") {
    const std::vector<TokenSeq> corpus(4, TokenSeq(16, 7));
    const auto r = train_tiny(init, corpus, 200, 0.05);
    CHECK(r.loss_curve.size() == 201);
    CHECK(r.loss_curve.back() < 0.05 * std::log(32.0));
  }
  SUBCASE("small learning rate gives a mostly monotone curve") {
    auto gen = make_markov_generator(32, 1, encode_prompt("seascape"), 16);
    std::vector<TokenSeq> corpus;
    for (std::uint64_t i = 0; i < 8; ++i) {
      corpus.push_back(gen->generate({encode_prompt("seascape"), {}, StreamKey{0, i, 0}}, 16,
                                     SamplingParams{}));
    }
    const auto r = train_tiny(init, corpus, 60, 0.01);
    std::size_t down = 0;
    for (std::size_t e = 1; e < r.loss_curve.size(); ++e) {
      if (r.loss_curve[e] <= r.loss_curve[e - 1]) ++down;
    }
    CHECK(down >= static_cast<std::size_t>(0.9 * (r.loss_curve.size() - 1)));
    CHECK(r.loss_curve.back() <= r.loss_curve.front());
    CHECK(mean_corpus_loss(r.model, corpus) == doctest::Approx(r.loss_curve.back()));
  }
  SUBCASE("divergence is reported") {
    const std::vector<TokenSeq> corpus(2, TokenSeq(16, 3));
    CHECK(error_code_of([&] { train_tiny(init, corpus, 50, 1e6); }) == "training");
  }
}

TEST_CASE("tiny generator respects its window") {
  auto model = std::make_shared<const TinyCausalModel>(TinyCausalModel::random({16, 8, 4}, 0));
  TinyModelGenerator gen(model);
  CHECK(gen.capacity() == 16);
  ConditioningContext ctx{encode_prompt("pattern"), {1, 2, 3}, StreamKey{5, 1, 0}};
  const auto out = gen.generate(ctx, 13, SamplingParams{});
  CHECK(out.size() == 13);
  CHECK(out == gen.generate(ctx, 13, SamplingParams{}));
  CHECK(error_code_of([&] { gen.generate(ctx, 14, SamplingParams{}); }) == "capacity");
  for (auto t : out) CHECK(t < 8);
}
