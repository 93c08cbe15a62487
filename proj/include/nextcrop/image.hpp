#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <vector>

#include "nextcrop/bytes.hpp"

namespace nextcrop {

using Rgb = std::array<std::uint8_t, 3>;

// 8-bit RGB image, interleaved, row-major.
class PixelImage {
 public:
  PixelImage() = default;
  PixelImage(std::size_t height, std::size_t width, Rgb fill = {0, 0, 0});
  PixelImage(std::size_t height, std::size_t width,
             std::vector<std::uint8_t> samples);

  std::size_t height() const noexcept { return height_; }
  std::size_t width() const noexcept { return width_; }
  bool empty() const noexcept { return samples_.empty(); }

  std::uint8_t at(std::size_t y, std::size_t x, std::size_t ch) const {
    return samples_[(y * width_ + x) * 3 + ch];
  }
  Rgb pixel(std::size_t y, std::size_t x) const;
  void set_pixel(std::size_t y, std::size_t x, Rgb value);

  // Sub-image [y0, y0 + h) x [x0, x0 + w).
  PixelImage crop(std::size_t y0, std::size_t x0, std::size_t h,
                  std::size_t w) const;

  const std::vector<std::uint8_t>& samples() const noexcept { return samples_; }

  friend bool operator==(const PixelImage&, const PixelImage&) = default;

 private:
  std::size_t height_ = 0;
  std::size_t width_ = 0;
  std::vector<std::uint8_t> samples_;
};

// PNG codec (8-bit RGB, no alpha on output). Input PNGs of any colour type
// are converted to 8-bit RGB; alpha is dropped.
Bytes encode_png(const PixelImage& image);
PixelImage decode_png(std::span<const std::uint8_t> data);

void write_png(const std::filesystem::path& path, const PixelImage& image);
PixelImage read_png(const std::filesystem::path& path);

}  // namespace nextcrop
