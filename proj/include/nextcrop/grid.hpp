#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace nextcrop {

using TokenId = std::uint32_t;
using TokenSeq = std::vector<TokenId>;

// Flat position of (row, col) in a row-major grid with `cols` columns.
std::size_t raster_index(std::size_t row, std::size_t col, std::size_t cols);

// Immutable 2D grid of token ids stored in raster-scan order. Grids with zero
// rows or zero columns are legal and act as identities for concatenation.
class TokenGrid {
 public:
  TokenGrid() = default;
  TokenGrid(std::size_t rows, std::size_t cols, TokenSeq tokens);

  static TokenGrid filled(std::size_t rows, std::size_t cols, TokenId value);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return tokens_.size(); }
  bool empty() const noexcept { return tokens_.empty(); }

  TokenId at(std::size_t row, std::size_t col) const;
  std::span<const TokenId> tokens() const noexcept { return tokens_; }
  std::span<const TokenId> row(std::size_t r) const;

  // Largest id in the grid, or 0 for an empty grid.
  TokenId max_token() const noexcept;

  // Copy with a single position replaced.
  TokenGrid with_token(std::size_t row, std::size_t col, TokenId value) const;

  // Sub-grid [row0, row0 + nrows) x [col0, col0 + ncols).
  TokenGrid slice(std::size_t row0, std::size_t nrows, std::size_t col0,
                  std::size_t ncols) const;

  friend bool operator==(const TokenGrid&, const TokenGrid&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  TokenSeq tokens_;
};

// Stacks `bottom` under `top`.
TokenGrid vconcat(const TokenGrid& top, const TokenGrid& bottom);

// Places `right` beside `left`, row by row.
TokenGrid hconcat(const TokenGrid& left, const TokenGrid& right);

// Final `count` tokens of the grid in raster order.
TokenSeq tail_tokens(const TokenGrid& grid, std::size_t count);

// Final `count` tokens of one row.
TokenSeq row_tail(const TokenGrid& grid, std::size_t row, std::size_t count);

}  // namespace nextcrop
