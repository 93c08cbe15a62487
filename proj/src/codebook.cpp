#include "nextcrop/codebook.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <string>
#include <unordered_set>

#include "nextcrop/error.hpp"
#include "nextcrop/rng.hpp"

namespace nextcrop {
namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {0x50, 0x43, 0x42, 0x4B};
constexpr std::uint8_t kVersion = 1;

std::uint8_t to_sample(double v) {
  const double c = std::clamp(v, 0.0, 1.0);
  return static_cast<std::uint8_t>(std::floor(c * 255.0 + 0.5));
}

std::uint32_t pack(Rgb c) {
  return (std::uint32_t{c[0]} << 16) | (std::uint32_t{c[1]} << 8) | c[2];
}

}  // namespace

Codebook::Codebook(std::size_t size, std::size_t dim, std::size_t patch_size,
                   std::vector<double> embeddings)
    : size_(size), dim_(dim), patch_(patch_size), data_(std::move(embeddings)) {
  require(size_ >= 2, Errc::config, "codebook needs at least 2 entries");
  require(dim_ >= 3, Errc::config, "codebook dimension must be at least 3");
  require(patch_ >= 1, Errc::config, "patch size must be positive");
  require(data_.size() == size_ * dim_, Errc::config,
          "embedding count does not match K*d");
  require(std::all_of(data_.begin(), data_.end(),
                      [](double v) { return std::isfinite(v); }),
          Errc::config, "codebook embeddings must be finite");
}

std::span<const double> Codebook::embedding(TokenId token) const {
  if (token >= size_) {
    fail(Errc::codebook, "token id " + std::to_string(token) +
                             " outside codebook of size " +
                             std::to_string(size_));
  }
  return std::span<const double>(data_).subspan(token * dim_, dim_);
}

Rgb Codebook::color(TokenId token) const {
  auto e = embedding(token);
  return {to_sample(e[0]), to_sample(e[1]), to_sample(e[2])};
}

TokenId Codebook::nearest(std::span<const double> target) const {
  require(target.size() <= dim_, Errc::shape, "target wider than embeddings");
  TokenId best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < size_; ++k) {
    const double* e = &data_[k * dim_];
    double d = 0.0;
    for (std::size_t i = 0; i < target.size(); ++i) {
      const double diff = target[i] - e[i];
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = static_cast<TokenId>(k);
    }
  }
  return best;
}

Codebook build_codebook(std::size_t size, std::size_t dim, std::uint64_t seed,
                        std::size_t patch_size) {
  require(size >= 2, Errc::config, "codebook needs at least 2 entries");
  require(dim >= 3, Errc::config, "codebook dimension must be at least 3");
  SeededRng rng(seed);
  std::vector<double> data(size * dim);
  for (std::size_t j = 0; j < dim; ++j) {
    double x = rng.uniform(-1.0, 1.0);
    double lo = x;
    double hi = x;
    for (std::size_t k = 0; k < size; ++k) {
      data[k * dim + j] = x;
      lo = std::min(lo, x);
      hi = std::max(hi, x);
      x += rng.uniform(-1.0, 1.0);
    }
    const double span = hi > lo ? hi - lo : 1.0;
    for (std::size_t k = 0; k < size; ++k) {
      data[k * dim + j] = (data[k * dim + j] - lo) / span;
    }
  }

  // Snap RGB to the 8-bit grid; resolve collisions by probing a growing
  // neighbourhood in a fixed order.
  std::unordered_set<std::uint32_t> used;
  const bool can_be_distinct = size <= (1u << 24);
  for (std::size_t k = 0; k < size; ++k) {
    double* e = &data[k * dim];
    Rgb base = {to_sample(e[0]), to_sample(e[1]), to_sample(e[2])};
    Rgb chosen = base;
    if (can_be_distinct && used.contains(pack(base))) {
      bool found = false;
      for (int radius = 1; radius < 256 && !found; ++radius) {
        for (int dr = -radius; dr <= radius && !found; ++dr) {
          for (int dg = -radius; dg <= radius && !found; ++dg) {
            for (int db = -radius; db <= radius && !found; ++db) {
              if (std::max({std::abs(dr), std::abs(dg), std::abs(db)}) != radius) continue;
              const int r = base[0] + dr, g = base[1] + dg, b = base[2] + db;
              if (r < 0 || r > 255 || g < 0 || g > 255 || b < 0 || b > 255) continue;
              Rgb cand = {static_cast<std::uint8_t>(r), static_cast<std::uint8_t>(g),
                          static_cast<std::uint8_t>(b)};
              if (!used.contains(pack(cand))) {
                chosen = cand;
                found = true;
              }
            }
          }
        }
      }
    }
    used.insert(pack(chosen));
    for (int c = 0; c < 3; ++c) e[c] = chosen[c] / 255.0;
  }
  return Codebook(size, dim, patch_size, std::move(data));
}

PixelImage decode_tokens(const TokenGrid& grid, const Codebook& codebook) {
  const std::size_t q = codebook.patch_size();
  PixelImage image(grid.rows() * q, grid.cols() * q);
  for (std::size_t r = 0; r < grid.rows(); ++r) {
    for (std::size_t c = 0; c < grid.cols(); ++c) {
      const Rgb color = codebook.color(grid.at(r, c));
      for (std::size_t y = r * q; y < (r + 1) * q; ++y) {
        for (std::size_t x = c * q; x < (c + 1) * q; ++x) {
          image.set_pixel(y, x, color);
        }
      }
    }
  }
  return image;
}

TokenGrid encode_image(const PixelImage& image, const Codebook& codebook) {
  const std::size_t q = codebook.patch_size();
  if (image.height() % q != 0 || image.width() % q != 0) {
    fail(Errc::shape, "image " + std::to_string(image.height()) + "x" +
                          std::to_string(image.width()) +
                          " is not divisible by patch size " + std::to_string(q));
  }
  const std::size_t rows = image.height() / q;
  const std::size_t cols = image.width() / q;
  TokenSeq tokens;
  tokens.reserve(rows * cols);
  const double norm = 1.0 / (static_cast<double>(q * q) * 255.0);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      std::array<std::uint64_t, 3> sum{};
      for (std::size_t y = r * q; y < (r + 1) * q; ++y) {
        for (std::size_t x = c * q; x < (c + 1) * q; ++x) {
          for (std::size_t ch = 0; ch < 3; ++ch) sum[ch] += image.at(y, x, ch);
        }
      }
      const std::array<double, 3> mean = {sum[0] * norm, sum[1] * norm, sum[2] * norm};
      tokens.push_back(codebook.nearest(mean));
    }
  }
  return TokenGrid(rows, cols, std::move(tokens));
}

TokenId blend_boundary(std::span<const double> e_prev,
                       std::span<const double> e_cur, double lambda,
                       const Codebook& codebook) {
  require(e_prev.size() == codebook.dim() && e_cur.size() == codebook.dim(),
          Errc::shape, "blend embeddings must match codebook dimension");
  require(lambda >= 0.0 && lambda <= 1.0, Errc::config,
          "blend lambda must lie in [0, 1]");
  std::vector<double> mixed(codebook.dim());
  for (std::size_t i = 0; i < mixed.size(); ++i) {
    mixed[i] = lambda * e_cur[i] + (1.0 - lambda) * e_prev[i];
  }
  return codebook.nearest(mixed);
}

Bytes encode_pcbk(const Codebook& codebook) {
  ByteWriter w;
  w.raw(kMagic);
  w.u8(kVersion);
  w.u32(static_cast<std::uint32_t>(codebook.size()));
  w.u32(static_cast<std::uint32_t>(codebook.dim()));
  w.u32(static_cast<std::uint32_t>(codebook.patch_size()));
  for (double v : codebook.embeddings()) w.f64(v);
  return std::move(w).bytes();
}

Codebook decode_pcbk(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  r.expect_magic(kMagic, "PCBK");
  require(r.u8() == kVersion, Errc::input, "unsupported PCBK version");
  const std::size_t k = r.u32();
  const std::size_t d = r.u32();
  const std::size_t q = r.u32();
  require(r.remaining() == k * d * 8, Errc::input,
          "PCBK payload size does not match header");
  std::vector<double> values(k * d);
  for (auto& v : values) v = r.f64();
  return Codebook(k, d, q, std::move(values));
}

void write_pcbk(const std::filesystem::path& path, const Codebook& codebook) {
  write_file_atomic(path, encode_pcbk(codebook));
}

Codebook read_pcbk(const std::filesystem::path& path) {
  return decode_pcbk(read_file(path));
}

}  // namespace nextcrop
