#include "nextcrop/prompt.hpp"

#include <bit>
#include <cmath>

#include "nextcrop/error.hpp"
#include "nextcrop/rng.hpp"

namespace nextcrop {

std::uint64_t PromptEmbedding::digest() const noexcept {
  std::uint64_t h = 0x243F6A8885A308D3ull;
  for (double v : values) h = splitmix64(h ^ std::bit_cast<std::uint64_t>(v));
  return h;
}

PromptEmbedding encode_prompt(const std::string& text) {
  require(!text.empty(), Errc::input, "prompt text must not be empty");
  SeededRng rng(fnv1a64(text));
  std::vector<double> values(kPromptDim);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (auto& v : values) {
      v = rng.uniform(-1.0, 1.0);
      norm2 += v * v;
    }
  } while (norm2 == 0.0);
  const double inv = 1.0 / std::sqrt(norm2);
  for (auto& v : values) v *= inv;
  return PromptEmbedding{std::move(values), text};
}

}  // namespace nextcrop
