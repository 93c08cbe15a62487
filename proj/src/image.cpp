#include "nextcrop/image.hpp"

#include "nextcrop/error.hpp"

namespace nextcrop {

PixelImage::PixelImage(std::size_t height, std::size_t width, Rgb fill)
    : height_(height), width_(width), samples_(height * width * 3) {
  for (std::size_t i = 0; i < height * width; ++i) {
    samples_[i * 3 + 0] = fill[0];
    samples_[i * 3 + 1] = fill[1];
    samples_[i * 3 + 2] = fill[2];
  }
}

PixelImage::PixelImage(std::size_t height, std::size_t width,
                       std::vector<std::uint8_t> samples)
    : height_(height), width_(width), samples_(std::move(samples)) {
  require(samples_.size() == height_ * width_ * 3, Errc::shape,
          "sample count does not match image dimensions");
}

Rgb PixelImage::pixel(std::size_t y, std::size_t x) const {
  const auto* p = &samples_[(y * width_ + x) * 3];
  return {p[0], p[1], p[2]};
}

void PixelImage::set_pixel(std::size_t y, std::size_t x, Rgb value) {
  auto* p = &samples_[(y * width_ + x) * 3];
  p[0] = value[0];
  p[1] = value[1];
  p[2] = value[2];
}

PixelImage PixelImage::crop(std::size_t y0, std::size_t x0, std::size_t h,
                            std::size_t w) const {
  require(y0 + h <= height_ && x0 + w <= width_, Errc::shape,
          "crop exceeds image bounds");
  std::vector<std::uint8_t> out;
  out.reserve(h * w * 3);
  for (std::size_t y = y0; y < y0 + h; ++y) {
    const auto* row = &samples_[(y * width_ + x0) * 3];
    out.insert(out.end(), row, row + w * 3);
  }
  return PixelImage(h, w, std::move(out));
}

}  // namespace nextcrop
