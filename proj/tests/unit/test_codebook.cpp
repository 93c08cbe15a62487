#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "nextcrop/codebook.hpp"
#include "support.hpp"

using namespace nextcrop;
using testing::error_code_of;

namespace {

// Three-dimensional codebook from explicit RGB-ish rows.
Codebook small_codebook(std::vector<double> rows, std::size_t patch = 2) {
  const std::size_t k = rows.size() / 3;
  return Codebook(k, 3, patch, std::move(rows));
}

}  // namespace

TEST_CASE("codebook validation") {
  CHECK(error_code_of([] { Codebook(1, 3, 16, {0, 0, 0}); }) == "config");
  CHECK(error_code_of([] { Codebook(2, 2, 16, {0, 0, 1, 1}); }) == "config");
  CHECK(error_code_of([] { Codebook(2, 3, 16, {0, 0, 0, 1, NAN, 1}); }) == "config");
  const auto cb = small_codebook({0, 0, 0, 1, 1, 1});
  CHECK(error_code_of([&] { cb.embedding(2); }) == "codebook");
}

TEST_CASE("built codebooks are deterministic with distinct colours") {
  const auto a = build_codebook(256, 8, 4);
  const auto b = build_codebook(256, 8, 4);
  CHECK(a == b);
  CHECK_FALSE(a == build_codebook(256, 8, 5));
  std::set<Rgb> colours;
  for (TokenId t = 0; t < a.size(); ++t) {
    colours.insert(a.color(t));
    for (double v : a.embedding(t)) {
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
  CHECK(colours.size() == 256);
}

TEST_CASE("decode renders flat patches") {
  const auto cb = small_codebook({0, 0, 0, 1, 0.5, 0.2}, 3);
  const TokenGrid g(1, 2, {0, 1});
  const auto img = decode_tokens(g, cb);
  CHECK(img.height() == 3);
  CHECK(img.width() == 6);
  CHECK(img.pixel(2, 1) == Rgb{0, 0, 0});
  // 0.5 * 255 = 127.5 rounds half up; 0.2 * 255 = 51.
  CHECK(img.pixel(0, 4) == Rgb{255, 128, 51});
}

TEST_CASE("encode inverts decode for distinct colours") {
  std::mt19937 rng(8);
  const auto cb = build_codebook(256, 8, 2);
  for (int trial = 0; trial < 10; ++trial) {
    const auto g = testing::random_grid(1 + rng() % 5, 1 + rng() % 5, 256, rng);
    CHECK(encode_image(decode_tokens(g, cb), cb) == g);
  }
}

TEST_CASE("black image snaps to the black entry") {
  std::vector<double> rows;
  for (int k = 0; k < 8; ++k) {
    const double v = k == 5 ? 0.0 : 0.1 + 0.1 * k;
    rows.insert(rows.end(), {v, v, v});
  }
  const auto cb = small_codebook(rows, 4);
  const auto g = encode_image(PixelImage(8, 12), cb);
  CHECK(g.rows() == 2);
  CHECK(g.cols() == 3);
  for (auto t : g.tokens()) CHECK(t == 5);
  CHECK(error_code_of([&] { encode_image(PixelImage(8, 17), cb); }) == "shape");
}

TEST_CASE("blend endpoints return the boundary tokens") {
  const auto cb = build_codebook(64, 6, 1);
  for (TokenId a = 0; a < 64; a += 7) {
    for (TokenId b = 0; b < 64; b += 5) {
      CHECK(blend_boundary(cb.embedding(a), cb.embedding(b), 1.0, cb) == b);
      CHECK(blend_boundary(cb.embedding(a), cb.embedding(b), 0.0, cb) == a);
    }
  }
}

TEST_CASE("blend ties go to the lowest index") {
  // Entries 0 and 1 sit symmetrically about the midpoint of 2 and 3.
  const auto cb = small_codebook({0.5, 0.4, 0.5,  //
                                  0.5, 0.6, 0.5,  //
                                  0.0, 0.5, 0.5,  //
                                  1.0, 0.5, 0.5});
  CHECK(blend_boundary(cb.embedding(2), cb.embedding(3), 0.5, cb) == 0);
  CHECK(cb.nearest(std::vector<double>{0.5, 0.5, 0.5}) == 0);
}

TEST_CASE("blend is symmetric under swapping sides") {
  std::mt19937 rng(1234);
  const auto cb = build_codebook(128, 5, 3);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const TokenId a = rng() % 128, b = rng() % 128;
    const double lambda = unit(rng);
    CHECK(blend_boundary(cb.embedding(a), cb.embedding(b), lambda, cb) ==
          blend_boundary(cb.embedding(b), cb.embedding(a), 1.0 - lambda, cb));
  }
}
