#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "nextcrop/ablation.hpp"
#include "nextcrop/markov.hpp"
#include "nextcrop/prompt.hpp"
#include "support.hpp"

using namespace nextcrop;
using testing::error_code_of;

namespace {

struct Bench {
  Codebook codebook;
  std::unique_ptr<MarkovGenerator> gen;
  AblationSetup setup;

  explicit Bench(std::size_t side, std::size_t patch = 4)
      : codebook(build_codebook(32, 4, 0, patch)),
        gen(make_markov_generator(32, 1, encode_prompt("seascape"), side * side)) {
    setup.side = side;
    setup.generator = gen.get();
    setup.codebook = &codebook;
    setup.prompt = "seascape";
  }
};

std::size_t lines(const std::string& text) {
  return static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
}

}  // namespace

TEST_CASE("stride ablation row layout") {
  Bench b(8);
  b.setup.width = 32 * 4;  // 32 token columns: 8 + k*c for every c in {8, 6, 4, 2, 1}
  const std::vector<Rational> strides = {{1, 1}, {3, 4}, {1, 2}, {1, 4}, {1, 8}};
  const auto rows = ablate_stride(strides, 3, b.setup);
  CHECK(rows.size() == 5 * 3 + 5);
  for (std::size_t i = 0; i < 15; ++i) CHECK(rows[i].seed.has_value());
  for (std::size_t i = 15; i < 20; ++i) CHECK_FALSE(rows[i].seed.has_value());
  CHECK(rows[0].u == "1");
  CHECK(rows[3].u == "3/4");
  CHECK(rows[0].seed == 0);
  CHECK(rows[2].seed == 2);
  for (const auto& r : rows) {
    CHECK(r.w_prime == 128);
    CHECK(r.coh >= 0.0);
    CHECK(r.coh <= 1.0);
  }

  const auto csv = ablation_csv(rows);
  CHECK(csv.rfind("method,u,w_prime,seed,tv_mean,ssim_mean,coh,wall_ms\n", 0) == 0);
  CHECK(lines(csv) == 21);
  CHECK(csv.find("next-crop,1/8,128,mean,") != std::string::npos);

  b.setup.include_baseline = true;
  CHECK(ablate_stride(strides, 2, b.setup).size() == 5 * 2 * 2 + 5 * 2);
}

TEST_CASE("stride ablation rejects non-integral column steps up front") {
  Bench b(4);
  b.setup.width = 64;
  const std::vector<Rational> strides = {{1, 2}, {1, 8}};
  CHECK(error_code_of([&] { ablate_stride(strides, 1, b.setup); }) == "plan");
  CHECK(Rational{3, 4}.scale(32) == 24);
  CHECK(Rational{1, 8}.scale(32) == 4);
}

TEST_CASE("size ablation") {
  Bench b(32, 16);
  const std::vector<std::size_t> unreachable = {1024};
  b.setup.stride = {3, 4};
  CHECK(error_code_of([&] { ablate_size(unreachable, 1, b.setup); }) == "plan");
  CHECK(iterations_for(1024, 32, 16, 16) == 3);

  Bench small(8);
  small.setup.stride = {1, 2};
  const std::vector<std::size_t> widths = {64, 320};
  const auto rows = ablate_size(widths, 2, small.setup);
  CHECK(rows.size() == 2 * 2 + 2);
  CHECK(rows[0].w_prime == 64);
  CHECK(rows[0].u == "1/2");
  // Five times the columns take longer on average.
  CHECK(rows[5].wall_ms > rows[4].wall_ms);
}

TEST_CASE("theme prompts rotate with the seed when none is given") {
  Bench b(8);
  b.setup.prompt.clear();
  b.setup.width = 64;
  const std::vector<Rational> strides = {{1, 2}};
  const auto a = ablate_stride(strides, 2, b.setup);
  CHECK(a.size() == 3);
  CHECK(std::isnan(a[2].coh));  // a single aggregate row cannot be normalised
}
