#include "nextcrop/plan.hpp"

#include <charconv>
#include <numeric>

#include "nextcrop/error.hpp"

namespace nextcrop {

std::string_view to_string(ExpansionMode mode) {
  switch (mode) {
    case ExpansionMode::vertical: return "vertical";
    case ExpansionMode::horizontal: return "horizontal";
    case ExpansionMode::both: return "both";
  }
  return "?";
}

ExpansionMode parse_mode(std::string_view text) {
  if (text == "vertical") return ExpansionMode::vertical;
  if (text == "horizontal") return ExpansionMode::horizontal;
  if (text == "both") return ExpansionMode::both;
  fail(Errc::config, "unknown expansion mode '" + std::string(text) + "'");
}

Rational Rational::parse(std::string_view text) {
  auto parse_int = [&text](std::string_view part) {
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), v);
    if (ec != std::errc{} || ptr != part.data() + part.size()) {
      fail(Errc::config, "malformed rational '" + std::string(text) + "'");
    }
    return v;
  };
  Rational out;
  const auto slash = text.find('/');
  if (slash == std::string_view::npos) {
    out = {parse_int(text), 1};
  } else {
    out = {parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1))};
  }
  require(out.num > 0 && out.den > 0, Errc::config,
          "rational must be positive: '" + std::string(text) + "'");
  const auto g = std::gcd(out.num, out.den);
  return {out.num / g, out.den / g};
}

std::string Rational::to_string() const {
  const auto g = std::gcd(num, den);
  if (den / g == 1) return std::to_string(num / g);
  return std::to_string(num / g) + "/" + std::to_string(den / g);
}

std::size_t Rational::scale(std::size_t side) const {
  const auto product = num * static_cast<std::int64_t>(side);
  if (product % den != 0) {
    fail(Errc::plan, "stride " + to_string() + " times block side " +
                         std::to_string(side) + " is not an integer");
  }
  return static_cast<std::size_t>(product / den);
}

ExpansionPlan ExpansionPlan::vertical(std::size_t side, std::size_t n, std::size_t r) {
  ExpansionPlan p{ExpansionMode::vertical, side, n, r, 1, 0};
  p.validate();
  return p;
}

ExpansionPlan ExpansionPlan::horizontal(std::size_t side, std::size_t n, std::size_t c) {
  ExpansionPlan p{ExpansionMode::horizontal, side, 1, 0, n, c};
  p.validate();
  return p;
}

ExpansionPlan ExpansionPlan::both(std::size_t side, std::size_t n_v, std::size_t r,
                                  std::size_t n_h, std::size_t c) {
  ExpansionPlan p{ExpansionMode::both, side, n_v, r, n_h, c};
  p.validate();
  return p;
}

std::size_t ExpansionPlan::final_rows() const noexcept {
  return grows_vertically() ? side + (vertical_iters - 1) * rows_per_iter : side;
}

std::size_t ExpansionPlan::final_cols() const noexcept {
  return grows_horizontally() ? side + (horizontal_iters - 1) * cols_per_iter : side;
}

std::size_t ExpansionPlan::iterations() const noexcept {
  return mode == ExpansionMode::vertical ? vertical_iters : horizontal_iters;
}

std::size_t ExpansionPlan::expansion_steps() const noexcept {
  switch (mode) {
    case ExpansionMode::vertical: return vertical_iters - 1;
    case ExpansionMode::horizontal: return horizontal_iters - 1;
    case ExpansionMode::both:
      return (vertical_iters - 1) + (final_rows() / side) * (horizontal_iters - 1);
  }
  return 0;
}

void ExpansionPlan::validate() const {
  require(side >= 1, Errc::plan, "block side must be positive");
  if (grows_vertically()) {
    require(vertical_iters >= 1, Errc::plan, "vertical iteration count must be >= 1");
    require(rows_per_iter >= 1 && rows_per_iter < side, Errc::plan,
            "rows per iteration r=" + std::to_string(rows_per_iter) +
                " must satisfy 1 <= r < s=" + std::to_string(side));
  }
  if (grows_horizontally()) {
    require(horizontal_iters >= 1, Errc::plan, "horizontal iteration count must be >= 1");
    require(cols_per_iter >= 1 && cols_per_iter <= side, Errc::plan,
            "columns per iteration c=" + std::to_string(cols_per_iter) +
                " must satisfy 1 <= c <= s=" + std::to_string(side));
  }
  if (mode == ExpansionMode::both) {
    require(final_rows() % side == 0, Errc::plan,
            "both-direction plans need a height of whole s-row bands; got " +
                std::to_string(final_rows()) + " rows for s=" + std::to_string(side));
  }
}

std::size_t iterations_for(std::size_t target, std::size_t side, std::size_t step,
                           std::size_t patch_size) {
  require(step >= 1, Errc::plan, "expansion step must be positive");
  const std::size_t px_side = side * patch_size;
  auto reachable = [&](std::size_t n) { return (side + (n - 1) * step) * patch_size; };
  if (target % patch_size != 0) {
    fail(Errc::plan, "size " + std::to_string(target) +
                         " px is not divisible by patch size " +
                         std::to_string(patch_size));
  }
  const std::size_t tokens = target / patch_size;
  if (tokens >= side && (tokens - side) % step == 0) {
    return 1 + (tokens - side) / step;
  }
  std::string message = "size " + std::to_string(target) + " px is unreachable with s=" +
                        std::to_string(side) + " and step " + std::to_string(step);
  if (tokens < side) {
    message += "; smallest reachable size is " + std::to_string(px_side) + " px";
  } else {
    const std::size_t below = 1 + (tokens - side) / step;
    message += "; nearest reachable sizes are " + std::to_string(reachable(below)) +
               " px and " + std::to_string(reachable(below + 1)) + " px";
  }
  fail(Errc::plan, message);
}

}  // namespace nextcrop
