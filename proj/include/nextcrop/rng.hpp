#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace nextcrop {

// Identifies an independent random stream: (global seed, block/iteration
// ordinal, row). Every generator call draws from exactly one stream.
struct StreamKey {
  std::uint64_t seed = 0;
  std::uint64_t block = 0;
  std::uint64_t row = 0;

  friend bool operator==(const StreamKey&, const StreamKey&) = default;
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// 64-bit FNV-1a.
constexpr std::uint64_t fnv1a64(std::string_view text) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char ch : text) {
    h ^= static_cast<std::uint8_t>(ch);
    h *= 0x100000001B3ull;
  }
  return h;
}

// Uniform double in [0, 1) built from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Counter-based draw: the uniform variate for `position` in `stream`. Being a
// pure function of (stream, position) is what makes generation
// prefix-extension consistent and independent of scheduling order.
constexpr double uniform_at(const StreamKey& key,
                            std::uint64_t position) noexcept {
  std::uint64_t h = splitmix64(key.seed ^ 0x5851F42D4C957F2Dull);
  h = splitmix64(h ^ key.block);
  h = splitmix64(h ^ (key.row * 0xD1B54A32D192ED03ull));
  h = splitmix64(h ^ position);
  return to_unit(h);
}

// Sequential engine for construction-time randomness (codebooks, tables,
// weight init). Distributions are derived by hand so outputs are identical
// across standard library implementations.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  double uniform() { return to_unit(engine_()); }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t bits() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace nextcrop
