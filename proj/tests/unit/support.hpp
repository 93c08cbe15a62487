#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "nextcrop/error.hpp"
#include "nextcrop/grid.hpp"

namespace testing {

// Grid whose token at (r, c) is r * 1000 + c; easy to read in failures.
inline nextcrop::TokenGrid labelled(std::size_t rows, std::size_t cols,
                                    nextcrop::TokenId offset = 0) {
  nextcrop::TokenSeq tokens;
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      tokens.push_back(offset + static_cast<nextcrop::TokenId>(r * 1000 + c));
    }
  }
  return nextcrop::TokenGrid(rows, cols, std::move(tokens));
}

inline nextcrop::TokenGrid random_grid(std::size_t rows, std::size_t cols,
                                       std::uint32_t vocab, std::mt19937& rng) {
  std::uniform_int_distribution<std::uint32_t> pick(0, vocab - 1);
  nextcrop::TokenSeq tokens(rows * cols);
  for (auto& t : tokens) t = pick(rng);
  return nextcrop::TokenGrid(rows, cols, std::move(tokens));
}

// The Errc a callable throws, or nullopt-like sentinel if it does not throw.
template <typename F>
std::string error_code_of(F&& f) {
  try {
    f();
  } catch (const nextcrop::Error& e) {
    return std::string(nextcrop::to_string(e.code()));
  }
  return "none";
}

// Fresh scratch directory under the system temp dir, removed on scope exit.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("nextcrop_" + tag + "_" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace testing
