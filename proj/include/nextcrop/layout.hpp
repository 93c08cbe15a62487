#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace nextcrop {

// Iterations are numbered 0 (first block) .. n-1 here. The JSON file form
// numbers them 1..n:
//
//   {"segments": [{"iterations": [1, 6], "prompt": "seascape"},
//                 {"iterations": [7, 13], "prompt": "grassland", "lambda": 0.65}]}
//
// A segment's lambda is applied at the seam where that segment begins.
struct LayoutSegment {
  std::size_t first = 0;
  std::size_t last = 0;
  std::string prompt;
  std::optional<double> lambda;
};

struct LayoutSpec {
  std::vector<LayoutSegment> segments;

  static LayoutSpec single(std::size_t iterations, std::string prompt);

  // Throws Errc::layout unless segments are contiguous and cover 0..n-1.
  void validate(std::size_t iterations) const;
  const LayoutSegment& segment_for(std::size_t iteration) const;

  static LayoutSpec parse_json(const std::string& text);
  static LayoutSpec load(const std::filesystem::path& path);
  std::string to_json() const;
};

}  // namespace nextcrop
