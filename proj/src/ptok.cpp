#include "nextcrop/ptok.hpp"

#include <array>

#include "nextcrop/error.hpp"

namespace nextcrop {
namespace {
constexpr std::array<std::uint8_t, 4> kMagic = {0x50, 0x54, 0x4F, 0x4B};
constexpr std::uint8_t kVersion = 1;
}  // namespace

Bytes encode_ptok(const PtokFile& file) {
  const auto& g = file.grid;
  require(g.empty() || g.max_token() < file.codebook_size, Errc::codebook,
          "token id exceeds codebook size");
  ByteWriter w;
  w.raw(kMagic);
  w.u8(kVersion);
  w.u32(static_cast<std::uint32_t>(g.rows()));
  w.u32(static_cast<std::uint32_t>(g.cols()));
  w.u32(file.codebook_size);
  for (TokenId t : g.tokens()) w.u32(t);
  return std::move(w).bytes();
}

PtokFile decode_ptok(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  r.expect_magic(kMagic, "PTOK");
  const auto version = r.u8();
  require(version == kVersion, Errc::input,
          "unsupported PTOK version " + std::to_string(version));
  const std::size_t rows = r.u32();
  const std::size_t cols = r.u32();
  const std::uint32_t k = r.u32();
  require(r.remaining() == rows * cols * 4, Errc::input,
          "PTOK payload size does not match header");
  TokenSeq tokens(rows * cols);
  for (auto& t : tokens) {
    t = r.u32();
    require(t < k, Errc::codebook, "PTOK token id exceeds codebook size");
  }
  return PtokFile{TokenGrid(rows, cols, std::move(tokens)), k};
}

void write_ptok(const std::filesystem::path& path, const PtokFile& file) {
  write_file_atomic(path, encode_ptok(file));
}

PtokFile read_ptok(const std::filesystem::path& path) {
  return decode_ptok(read_file(path));
}

}  // namespace nextcrop
