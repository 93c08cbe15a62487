#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace nextcrop {

inline constexpr std::size_t kPromptDim = 64;

// Deterministic unit-norm stand-in for a text encoder output.
struct PromptEmbedding {
  std::vector<double> values;
  std::string source_text;

  // Stable 64-bit digest of the embedding values; seeds prompt-dependent
  // generator state.
  std::uint64_t digest() const noexcept;

  friend bool operator==(const PromptEmbedding&, const PromptEmbedding&) = default;
};

PromptEmbedding encode_prompt(const std::string& text);

}  // namespace nextcrop
