#pragma once

// Brute-force reference for the conditioning windows of a next-crop run.
// Deliberately self-contained: it knows nothing about the library's grids,
// plans or traces, only about cells of a rows x cols raster. Every query
// walks all cells and keeps the ones that satisfy the window predicate.

#include <cstddef>
#include <vector>

namespace oracle {

struct Shape {
  std::size_t rows = 0;
  std::size_t cols = 0;
  bool operator==(const Shape&) const = default;
};

// One expected generator call.
struct Window {
  std::size_t row = 0;             // row tag: grid row of the first window cell
  std::vector<std::size_t> cells;  // flat raster indices, ascending
  std::size_t emitted = 0;
};

struct Step {
  bool vertical = false;
  std::size_t band = 0;
  std::size_t iteration = 0;
  Shape grid;  // shape of the grid the windows index into
  std::vector<Window> windows;
};

inline std::size_t flat(std::size_t row, std::size_t col, std::size_t cols) {
  std::size_t index = 0;
  for (std::size_t r = 0; r < row; ++r) index += cols;
  return index + col;
}

// Vertical step on a grid of `shape`: every cell whose row lies in the last
// (s - r) rows; r*s tokens are emitted.
inline Window vertical_window(Shape shape, std::size_t s, std::size_t r) {
  Window w;
  w.row = shape.rows - (s - r);
  for (std::size_t row = 0; row < shape.rows; ++row) {
    for (std::size_t col = 0; col < shape.cols; ++col) {
      if (row + (s - r) >= shape.rows) w.cells.push_back(flat(row, col, shape.cols));
    }
  }
  w.emitted = r * s;
  return w;
}

// Horizontal step: one window per row, the last (s - c) cells of that row.
inline std::vector<Window> horizontal_windows(Shape shape, std::size_t s, std::size_t c) {
  std::vector<Window> out;
  for (std::size_t row = 0; row < shape.rows; ++row) {
    Window w;
    w.row = row;
    for (std::size_t col = 0; col < shape.cols; ++col) {
      if (col + (s - c) >= shape.cols) w.cells.push_back(flat(row, col, shape.cols));
    }
    w.emitted = c;
    out.push_back(w);
  }
  return out;
}

// Every expansion step of a run, in execution order. `vertical_iters` /
// `horizontal_iters` count the first block (1 = no expansion that way).
inline std::vector<Step> expected_steps(std::size_t s, std::size_t vertical_iters,
                                        std::size_t r, std::size_t horizontal_iters,
                                        std::size_t c) {
  std::vector<Step> steps;
  Shape shape{s, s};
  for (std::size_t i = 1; i < vertical_iters; ++i) {
    steps.push_back(Step{true, 0, i, shape, {vertical_window(shape, s, r)}});
    shape.rows += r;
  }
  const std::size_t bands = shape.rows / s;
  for (std::size_t b = 0; b < bands; ++b) {
    Shape band{s, s};
    for (std::size_t i = 1; i < horizontal_iters; ++i) {
      steps.push_back(Step{false, b, i, band, horizontal_windows(band, s, c)});
      band.cols += c;
    }
  }
  return steps;
}

}  // namespace oracle
