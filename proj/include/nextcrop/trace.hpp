#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "nextcrop/grid.hpp"
#include "nextcrop/rng.hpp"

namespace nextcrop {

enum class Phase { first_block, vertical, horizontal };
std::string_view to_string(Phase phase);

// One generator call: the conditioning window [begin, end) as flat indices
// into the grid being extended, the tokens found there, and how many new
// tokens were emitted.
struct WindowRecord {
  std::size_t row = 0;
  std::size_t begin = 0;
  std::size_t end = 0;
  StreamKey stream;
  std::size_t emitted = 0;
  TokenSeq tokens;
};

// A seam token re-quantized by blend_boundary at a layout segment boundary.
struct BlendRecord {
  std::size_t row = 0;
  std::size_t col = 0;
  TokenId previous = 0;
  TokenId generated = 0;
  TokenId blended = 0;
  double lambda = 1.0;
};

struct IterationRecord {
  std::size_t iteration = 0;  // 0 is the first block
  Phase phase = Phase::first_block;
  std::size_t band = 0;       // s-row band in "both" mode
  std::size_t grid_rows = 0;  // shape of the grid the windows index into
  std::size_t grid_cols = 0;
  std::vector<WindowRecord> windows;
  std::vector<BlendRecord> blends;
  double millis = 0.0;

  std::size_t emitted() const noexcept;
};

struct GenerationTrace {
  IterationRecord first_block;
  std::vector<IterationRecord> expansions;

  // One JSON object per line: the first block, then every expansion.
  std::string to_jsonl() const;
};

}  // namespace nextcrop
