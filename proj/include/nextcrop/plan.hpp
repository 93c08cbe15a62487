#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>

namespace nextcrop {

enum class ExpansionMode { vertical, horizontal, both };

std::string_view to_string(ExpansionMode mode);
ExpansionMode parse_mode(std::string_view text);

// Positive rational such as an expansion stride "3/4".
struct Rational {
  std::int64_t num = 1;
  std::int64_t den = 1;

  static Rational parse(std::string_view text);
  std::string to_string() const;
  double value() const noexcept { return static_cast<double>(num) / den; }

  // num/den * side; throws Errc::plan unless the product is integral.
  std::size_t scale(std::size_t side) const;

  friend bool operator==(const Rational& a, const Rational& b) {
    return a.num * b.den == b.num * a.den;
  }
};

// Geometry of one run. The block side s equals sqrt(p). Vertical runs add
// `rows_per_iter` rows per expansion, horizontal runs `cols_per_iter`
// columns. "both" grows vertically first, then widens every s-row band.
struct ExpansionPlan {
  ExpansionMode mode = ExpansionMode::horizontal;
  std::size_t side = 32;
  std::size_t vertical_iters = 1;    // n_v, counting the first block
  std::size_t rows_per_iter = 0;     // r
  std::size_t horizontal_iters = 1;  // n_h, counting the first block
  std::size_t cols_per_iter = 0;     // c

  static ExpansionPlan vertical(std::size_t side, std::size_t n, std::size_t r);
  static ExpansionPlan horizontal(std::size_t side, std::size_t n, std::size_t c);
  static ExpansionPlan both(std::size_t side, std::size_t n_v, std::size_t r,
                            std::size_t n_h, std::size_t c);

  bool grows_vertically() const noexcept { return mode != ExpansionMode::horizontal; }
  bool grows_horizontally() const noexcept { return mode != ExpansionMode::vertical; }

  std::size_t block_tokens() const noexcept { return side * side; }
  std::size_t final_rows() const noexcept;
  std::size_t final_cols() const noexcept;

  // Iteration count n of a single-direction plan.
  std::size_t iterations() const noexcept;
  // Number of expansion steps (trace records after the first block).
  std::size_t expansion_steps() const noexcept;

  Rational horizontal_stride() const { return {static_cast<std::int64_t>(cols_per_iter), static_cast<std::int64_t>(side)}; }
  Rational vertical_stride() const { return {static_cast<std::int64_t>(rows_per_iter), static_cast<std::int64_t>(side)}; }

  // Throws Errc::plan on an inconsistent plan.
  void validate() const;

  friend bool operator==(const ExpansionPlan&, const ExpansionPlan&) = default;
};

// Iterations needed so that s + (n - 1) * step == target; throws Errc::plan
// listing the nearest reachable sizes when no integral n exists.
std::size_t iterations_for(std::size_t target, std::size_t side, std::size_t step,
                           std::size_t patch_size);

}  // namespace nextcrop
