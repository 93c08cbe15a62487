#include <doctest.h>

#include <random>

#include "nextcrop/grid.hpp"
#include "nextcrop/ptok.hpp"
#include "support.hpp"

using namespace nextcrop;
using testing::error_code_of;
using testing::labelled;

TEST_CASE("raster_index examples") {
  CHECK(raster_index(0, 0, 32) == 0);
  CHECK(raster_index(1, 0, 32) == 32);
  // Brute force: walk an 8-column grid cell by cell and count.
  std::size_t counter = 0, found = 0;
  for (std::size_t r = 0; r < 4; ++r) {
    for (std::size_t c = 0; c < 8; ++c, ++counter) {
      if (r == 3 && c == 5) found = counter;
    }
  }
  CHECK(raster_index(3, 5, 8) == found);
  CHECK(found == 29);
  CHECK(error_code_of([] { raster_index(0, 8, 8); }) == "index");
}

TEST_CASE("raster_index is a bijection on small grids") {
  for (std::size_t rows = 1; rows <= 6; ++rows) {
    for (std::size_t cols = 1; cols <= 6; ++cols) {
      std::vector<int> hits(rows * cols, 0);
      for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
          const auto i = raster_index(r, c, cols);
          REQUIRE(i < rows * cols);
          ++hits[i];
        }
      }
      for (int h : hits) CHECK(h == 1);
    }
  }
}

TEST_CASE("grid construction checks length") {
  CHECK(error_code_of([] { TokenGrid(2, 3, TokenSeq(5)); }) == "dimension");
  const auto g = labelled(2, 3);
  CHECK(g.at(1, 2) == 1002);
  CHECK(g.row(1).size() == 3);
  CHECK(g.max_token() == 1002);
  CHECK(g.with_token(0, 0, 7).at(0, 0) == 7);
  CHECK(g.at(0, 0) == 0);  // original untouched
}

TEST_CASE("vconcat stacks rows") {
  const auto top = labelled(2, 4);
  const auto bottom = labelled(1, 4, 5000);
  const auto g = vconcat(top, bottom);
  CHECK(g.rows() == 3);
  CHECK(g.cols() == 4);
  CHECK(g.at(2, 3) == 5003);
  CHECK(g.at(1, 1) == 1001);
  CHECK(vconcat(top, TokenGrid(0, 4, {})) == top);
  CHECK(vconcat(TokenGrid{}, top) == top);
  CHECK(error_code_of([&] { vconcat(top, labelled(1, 3)); }) == "dimension");
}

TEST_CASE("vconcat of a 10x vertical run accumulates 320 rows") {
  // s = 32, r = 24, n = 13.
  TokenGrid g = labelled(32, 32);
  std::size_t expected = 32;
  for (int i = 1; i < 13; ++i) {
    g = vconcat(g, labelled(24, 32));
    expected += 24;
  }
  CHECK(g.rows() == expected);
  CHECK(g.rows() == 320);
}

TEST_CASE("hconcat joins rows side by side") {
  const auto left = labelled(4, 2);
  const auto right = labelled(4, 3, 100);
  const auto g = hconcat(left, right);
  CHECK(g.rows() == 4);
  CHECK(g.cols() == 5);
  for (std::size_t r = 0; r < 4; ++r) {
    TokenSeq expect(left.row(r).begin(), left.row(r).end());
    expect.insert(expect.end(), right.row(r).begin(), right.row(r).end());
    CHECK(TokenSeq(g.row(r).begin(), g.row(r).end()) == expect);
  }
  CHECK(hconcat(left, TokenGrid(4, 0, {})) == left);
  CHECK(error_code_of([&] { hconcat(left, labelled(3, 2)); }) == "dimension");
}

TEST_CASE("512x5120 panorama at patch 16 is a 32x320 grid") {
  TokenGrid g = labelled(32, 32);
  for (int i = 1; i < 13; ++i) g = hconcat(g, labelled(32, 24));
  CHECK(g.rows() == 512 / 16);
  CHECK(g.cols() == 5120 / 16);
}

TEST_CASE("concatenation is associative") {
  std::mt19937 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t cols = 1 + rng() % 5;
    const auto a = testing::random_grid(1 + rng() % 4, cols, 50, rng);
    const auto b = testing::random_grid(1 + rng() % 4, cols, 50, rng);
    const auto c = testing::random_grid(1 + rng() % 4, cols, 50, rng);
    CHECK(vconcat(vconcat(a, b), c) == vconcat(a, vconcat(b, c)));
    const std::size_t rows = 1 + rng() % 5;
    const auto x = testing::random_grid(rows, 1 + rng() % 4, 50, rng);
    const auto y = testing::random_grid(rows, 1 + rng() % 4, 50, rng);
    const auto z = testing::random_grid(rows, 1 + rng() % 4, 50, rng);
    CHECK(hconcat(hconcat(x, y), z) == hconcat(x, hconcat(y, z)));
    CHECK(encode_ptok({hconcat(hconcat(x, y), z), 50}) ==
          encode_ptok({hconcat(x, hconcat(y, z)), 50}));
  }
}

TEST_CASE("tail_tokens returns the raster suffix") {
  const auto g = labelled(4, 4);
  const auto tail = tail_tokens(g, 12);  // p - r*sqrt(p) = 16 - 4
  REQUIRE(tail.size() == 12);
  for (std::size_t i = 0; i < 12; ++i) CHECK(tail[i] == g.tokens()[4 + i]);
  CHECK(tail_tokens(g, 0).empty());
  CHECK(error_code_of([&] { tail_tokens(g, 17); }) == "range");

  const auto big = labelled(32, 32);
  const auto last = tail_tokens(big, 1024 - 24 * 32);
  REQUIRE(last.size() == 256);
  CHECK(last.front() == big.at(24, 0));  // exactly the last 8 rows
  CHECK(last.back() == big.at(31, 31));
}

TEST_CASE("row_tail returns the end of one row") {
  const auto g = labelled(4, 4);
  const auto t = row_tail(g, 2, 3);
  CHECK(t == TokenSeq{g.tokens()[9], g.tokens()[10], g.tokens()[11]});
  CHECK(row_tail(g, 1, 0).empty());
  CHECK(error_code_of([&] { row_tail(g, 4, 1); }) == "range");
  CHECK(error_code_of([&] { row_tail(g, 0, 5); }) == "range");
  CHECK(row_tail(labelled(32, 32), 7, 32 - 24).size() == 8);
}

TEST_CASE("hconcat then row extraction equals per-row concatenation") {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 30; ++trial) {
    const std::size_t rows = 1 + rng() % 6;
    const auto a = testing::random_grid(rows, 1 + rng() % 6, 99, rng);
    const auto b = testing::random_grid(rows, 1 + rng() % 6, 99, rng);
    const auto joined = hconcat(a, b);
    for (std::size_t r = 0; r < rows; ++r) {
      TokenSeq expect(a.row(r).begin(), a.row(r).end());
      expect.insert(expect.end(), b.row(r).begin(), b.row(r).end());
      CHECK(row_tail(joined, r, joined.cols()) == expect);
    }
  }
}
