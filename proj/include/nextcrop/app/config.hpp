#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>

#include "nextcrop/generator.hpp"
#include "nextcrop/metrics.hpp"
#include "nextcrop/plan.hpp"

namespace nextcrop::app {

// Everything a CLI run depends on. Serialized as INI (key = value under
// [sections]); an archived run.ini re-creates the run exactly.
struct RunConfig {
  // [run]
  std::string mode = "horizontal";
  std::uint64_t seed = 0;
  std::string prompt = "seascape";
  std::string layout;
  std::string guide;
  std::string out = "out";
  bool parallel = false;

  // [plan]
  std::size_t side = 32;
  std::string stride = "3/4";
  std::size_t width = 5120;
  std::size_t height = 512;
  std::size_t n = 0;     // 0: derive from width/height
  std::size_t rows = 0;  // 0: stride * side
  std::size_t cols = 0;  // 0: stride * side

  // [generator]
  std::string generator = "markov";
  std::size_t order = 1;
  std::string checkpoint;

  // [sampling]
  double temperature = 1.0;
  std::uint32_t top_k = 0;

  // [codebook]
  std::size_t codebook_size = 256;
  std::size_t codebook_dim = 8;
  std::size_t patch = 16;
  std::uint64_t codebook_seed = 0;

  // [eval]
  std::size_t crop = 0;  // 0: side * patch
  std::size_t half_width = 8;

  // [ablate]
  std::string strides = "1,3/4,1/2,1/4,1/8";
  std::string widths;
  std::size_t seeds = 5;
  bool baseline = false;

  // [train]
  std::string corpus;
  std::size_t epochs = 200;
  double lr = 0.05;
  std::size_t window = 64;
  std::size_t dim = 16;
  std::size_t synthetic = 32;

  std::string to_ini() const;
  // Applies every key found in `text` on top of *this.
  void merge_ini(const std::string& text);
  void merge_ini_file(const std::filesystem::path& path);

  ExpansionPlan plan() const;
  SamplingParams sampling() const;
  EvalOptions eval() const;
};

}  // namespace nextcrop::app
