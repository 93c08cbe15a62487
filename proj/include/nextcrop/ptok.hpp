#pragma once

#include <cstdint>
#include <filesystem>

#include "nextcrop/bytes.hpp"
#include "nextcrop/grid.hpp"

namespace nextcrop {

// "PTOK v1": magic 'PTOK', u8 version = 1, u32 rows, u32 cols,
// u32 codebook size, then rows*cols u32 token ids. All little-endian.
struct PtokFile {
  TokenGrid grid;
  std::uint32_t codebook_size = 0;

  friend bool operator==(const PtokFile&, const PtokFile&) = default;
};

Bytes encode_ptok(const PtokFile& file);
PtokFile decode_ptok(std::span<const std::uint8_t> data);

void write_ptok(const std::filesystem::path& path, const PtokFile& file);
PtokFile read_ptok(const std::filesystem::path& path);

}  // namespace nextcrop
