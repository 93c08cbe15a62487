#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "nextcrop/bytes.hpp"
#include "nextcrop/grid.hpp"
#include "nextcrop/image.hpp"

namespace nextcrop {

inline constexpr std::size_t kDefaultPatchSize = 16;

// K embeddings of dimension d. The first three components of each embedding
// are its RGB colour in [0, 1]; every token renders as a flat q x q patch.
class Codebook {
 public:
  Codebook(std::size_t size, std::size_t dim, std::size_t patch_size,
           std::vector<double> embeddings);

  std::size_t size() const noexcept { return size_; }
  std::size_t dim() const noexcept { return dim_; }
  std::size_t patch_size() const noexcept { return patch_; }

  std::span<const double> embedding(TokenId token) const;
  std::span<const double> embeddings() const noexcept { return data_; }

  // Colour used when rendering `token` (components clamped to [0, 1],
  // scaled to 0..255, rounded half-up).
  Rgb color(TokenId token) const;

  // Lowest index minimizing squared distance to `target` over the first
  // target.size() components.
  TokenId nearest(std::span<const double> target) const;

  friend bool operator==(const Codebook&, const Codebook&) = default;

 private:
  std::size_t size_;
  std::size_t dim_;
  std::size_t patch_;
  std::vector<double> data_;
};

// Deterministic stand-in for a trained VQ codebook. Each component is a
// seeded random walk over the token index, min-max mapped into [0, 1], so
// neighbouring ids carry similar embeddings. The RGB components are snapped
// to the 8-bit grid and kept pairwise distinct, which makes decode/encode an
// exact inverse pair.
Codebook build_codebook(std::size_t size, std::size_t dim, std::uint64_t seed,
                        std::size_t patch_size = kDefaultPatchSize);

PixelImage decode_tokens(const TokenGrid& grid, const Codebook& codebook);
TokenGrid encode_image(const PixelImage& image, const Codebook& codebook);

// Re-quantizes the blend lambda * e_cur + (1 - lambda) * e_prev onto the
// codebook (nearest entry, lowest index on ties).
TokenId blend_boundary(std::span<const double> e_prev,
                       std::span<const double> e_cur, double lambda,
                       const Codebook& codebook);

// "PCBK v1": magic 'PCBK', u8 version = 1, u32 K, u32 d, u32 q, then K*d
// f64 embeddings. All little-endian.
Bytes encode_pcbk(const Codebook& codebook);
Codebook decode_pcbk(std::span<const std::uint8_t> data);
void write_pcbk(const std::filesystem::path& path, const Codebook& codebook);
Codebook read_pcbk(const std::filesystem::path& path);

}  // namespace nextcrop
