#include "nextcrop/grid.hpp"

#include <algorithm>
#include <string>

#include "nextcrop/error.hpp"

namespace nextcrop {

std::size_t raster_index(std::size_t row, std::size_t col, std::size_t cols) {
  if (col >= cols) {
    fail(Errc::index, "column " + std::to_string(col) +
                          " out of range for grid with " +
                          std::to_string(cols) + " columns");
  }
  return row * cols + col;
}

TokenGrid::TokenGrid(std::size_t rows, std::size_t cols, TokenSeq tokens)
    : rows_(rows), cols_(cols), tokens_(std::move(tokens)) {
  if (tokens_.size() != rows_ * cols_) {
    fail(Errc::dimension, "token count " + std::to_string(tokens_.size()) +
                              " does not match " + std::to_string(rows_) +
                              "x" + std::to_string(cols_));
  }
}

TokenGrid TokenGrid::filled(std::size_t rows, std::size_t cols,
                            TokenId value) {
  return TokenGrid(rows, cols, TokenSeq(rows * cols, value));
}

TokenId TokenGrid::at(std::size_t row, std::size_t col) const {
  if (row >= rows_) fail(Errc::index, "row out of range");
  return tokens_[raster_index(row, col, cols_)];
}

std::span<const TokenId> TokenGrid::row(std::size_t r) const {
  if (r >= rows_) fail(Errc::range, "row " + std::to_string(r) + " out of range");
  return std::span<const TokenId>(tokens_).subspan(r * cols_, cols_);
}

TokenId TokenGrid::max_token() const noexcept {
  if (tokens_.empty()) return 0;
  return *std::max_element(tokens_.begin(), tokens_.end());
}

TokenGrid TokenGrid::with_token(std::size_t row, std::size_t col,
                                TokenId value) const {
  if (row >= rows_) fail(Errc::index, "row out of range");
  TokenSeq copy = tokens_;
  copy[raster_index(row, col, cols_)] = value;
  return TokenGrid(rows_, cols_, std::move(copy));
}

TokenGrid TokenGrid::slice(std::size_t row0, std::size_t nrows,
                           std::size_t col0, std::size_t ncols) const {
  if (row0 + nrows > rows_ || col0 + ncols > cols_) {
    fail(Errc::range, "slice exceeds grid bounds");
  }
  TokenSeq out;
  out.reserve(nrows * ncols);
  for (std::size_t r = row0; r < row0 + nrows; ++r) {
    auto src = row(r).subspan(col0, ncols);
    out.insert(out.end(), src.begin(), src.end());
  }
  return TokenGrid(nrows, ncols, std::move(out));
}

TokenGrid vconcat(const TokenGrid& top, const TokenGrid& bottom) {
  if (top.rows() == 0) return bottom;
  if (bottom.rows() == 0) return top;
  if (top.cols() != bottom.cols()) {
    fail(Errc::dimension, "vconcat: column mismatch " +
                              std::to_string(top.cols()) + " vs " +
                              std::to_string(bottom.cols()));
  }
  TokenSeq out(top.tokens().begin(), top.tokens().end());
  out.insert(out.end(), bottom.tokens().begin(), bottom.tokens().end());
  return TokenGrid(top.rows() + bottom.rows(), top.cols(), std::move(out));
}

TokenGrid hconcat(const TokenGrid& left, const TokenGrid& right) {
  if (left.cols() == 0) return right;
  if (right.cols() == 0) return left;
  if (left.rows() != right.rows()) {
    fail(Errc::dimension, "hconcat: row mismatch " +
                              std::to_string(left.rows()) + " vs " +
                              std::to_string(right.rows()));
  }
  TokenSeq out;
  out.reserve(left.size() + right.size());
  for (std::size_t r = 0; r < left.rows(); ++r) {
    auto a = left.row(r);
    auto b = right.row(r);
    out.insert(out.end(), a.begin(), a.end());
    out.insert(out.end(), b.begin(), b.end());
  }
  return TokenGrid(left.rows(), left.cols() + right.cols(), std::move(out));
}

TokenSeq tail_tokens(const TokenGrid& grid, std::size_t count) {
  if (count > grid.size()) {
    fail(Errc::range, "tail of " + std::to_string(count) +
                          " tokens requested from grid of " +
                          std::to_string(grid.size()));
  }
  auto all = grid.tokens();
  return TokenSeq(all.end() - static_cast<std::ptrdiff_t>(count), all.end());
}

TokenSeq row_tail(const TokenGrid& grid, std::size_t row, std::size_t count) {
  if (row >= grid.rows() || count > grid.cols()) {
    fail(Errc::range, "row tail out of range");
  }
  auto r = grid.row(row);
  return TokenSeq(r.end() - static_cast<std::ptrdiff_t>(count), r.end());
}

}  // namespace nextcrop
