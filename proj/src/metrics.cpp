#include "nextcrop/metrics.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <numeric>
#include <string>

#include "nextcrop/error.hpp"

namespace nextcrop {

Orientation orientation_of(const PixelImage& panorama) {
  return panorama.width() >= panorama.height() ? Orientation::horizontal
                                               : Orientation::vertical;
}

std::vector<CropPair> extract_adjacent_crops(const PixelImage& panorama,
                                             std::size_t crop_side,
                                             Orientation orientation) {
  require(crop_side >= 1, Errc::shape, "crop side must be positive");
  const bool horiz = orientation == Orientation::horizontal;
  const std::size_t length = horiz ? panorama.width() : panorama.height();
  const std::size_t breadth = horiz ? panorama.height() : panorama.width();
  if (length < 2 * crop_side || breadth < crop_side) {
    fail(Errc::shape, "panorama " + std::to_string(panorama.height()) + "x" +
                          std::to_string(panorama.width()) +
                          " is too small for two adjacent crops of side " +
                          std::to_string(crop_side));
  }
  const std::size_t tiles = length / crop_side;
  std::vector<PixelImage> crops;
  crops.reserve(tiles);
  for (std::size_t i = 0; i < tiles; ++i) {
    crops.push_back(horiz ? panorama.crop(0, i * crop_side, crop_side, crop_side)
                          : panorama.crop(i * crop_side, 0, crop_side, crop_side));
  }
  std::vector<CropPair> pairs;
  pairs.reserve(tiles - 1);
  for (std::size_t i = 0; i + 1 < tiles; ++i) {
    pairs.push_back(CropPair{crops[i], crops[i + 1], (i + 1) * crop_side});
  }
  return pairs;
}

namespace {

double pixel_tv(const PixelImage& img, std::size_t y, std::size_t x) {
  double total = 0.0;
  for (std::size_t ch = 0; ch < 3; ++ch) {
    const int v = img.at(y, x, ch);
    if (x + 1 < img.width()) total += std::abs(img.at(y, x + 1, ch) - v);
    if (y + 1 < img.height()) total += std::abs(img.at(y + 1, x, ch) - v);
  }
  return total / (3.0 * 255.0);
}

}  // namespace

double tv_seam(const PixelImage& panorama, std::size_t seam_x, std::size_t half_width) {
  require(half_width >= 1, Errc::shape, "TV band half-width must be >= 1");
  if (seam_x < half_width || seam_x + half_width > panorama.width() ||
      panorama.height() == 0) {
    fail(Errc::shape, "TV band around x=" + std::to_string(seam_x) +
                          " falls outside the image");
  }
  double sum = 0.0;
  for (std::size_t y = 0; y < panorama.height(); ++y) {
    for (std::size_t x = seam_x - half_width; x < seam_x + half_width; ++x) {
      sum += pixel_tv(panorama, y, x);
    }
  }
  return sum / static_cast<double>(panorama.height() * 2 * half_width);
}

double tv_seam_rows(const PixelImage& panorama, std::size_t seam_y,
                    std::size_t half_width) {
  require(half_width >= 1, Errc::shape, "TV band half-width must be >= 1");
  if (seam_y < half_width || seam_y + half_width > panorama.height() ||
      panorama.width() == 0) {
    fail(Errc::shape, "TV band around y=" + std::to_string(seam_y) +
                          " falls outside the image");
  }
  double sum = 0.0;
  for (std::size_t y = seam_y - half_width; y < seam_y + half_width; ++y) {
    for (std::size_t x = 0; x < panorama.width(); ++x) sum += pixel_tv(panorama, y, x);
  }
  return sum / static_cast<double>(panorama.width() * 2 * half_width);
}

namespace {

std::array<double, kSsimWindow> gaussian_taps() {
  std::array<double, kSsimWindow> taps{};
  const double center = (kSsimWindow - 1) / 2.0;
  double total = 0.0;
  for (std::size_t i = 0; i < kSsimWindow; ++i) {
    const double d = static_cast<double>(i) - center;
    taps[i] = std::exp(-(d * d) / (2.0 * kSsimSigma * kSsimSigma));
    total += taps[i];
  }
  for (double& t : taps) t /= total;
  return taps;
}

// Valid-mode separable filtering of an h x w plane.
std::vector<double> filter_valid(const std::vector<double>& plane, std::size_t h,
                                 std::size_t w, const std::array<double, kSsimWindow>& taps) {
  const std::size_t ow = w - kSsimWindow + 1;
  const std::size_t oh = h - kSsimWindow + 1;
  std::vector<double> horiz(h * ow);
  for (std::size_t y = 0; y < h; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kSsimWindow; ++k) acc += taps[k] * plane[y * w + x + k];
      horiz[y * ow + x] = acc;
    }
  }
  std::vector<double> out(oh * ow);
  for (std::size_t y = 0; y < oh; ++y) {
    for (std::size_t x = 0; x < ow; ++x) {
      double acc = 0.0;
      for (std::size_t k = 0; k < kSsimWindow; ++k) acc += taps[k] * horiz[(y + k) * ow + x];
      out[y * ow + x] = acc;
    }
  }
  return out;
}

}  // namespace

double ssim(const PixelImage& a, const PixelImage& b) {
  require(a.height() == b.height() && a.width() == b.width(), Errc::shape,
          "SSIM needs images of equal dimensions");
  require(a.height() >= kSsimWindow && a.width() >= kSsimWindow, Errc::shape,
          "SSIM needs images of at least 11x11 pixels");
  static const auto taps = gaussian_taps();
  const std::size_t h = a.height(), w = a.width(), n = h * w;
  double channel_total = 0.0;
  std::vector<double> pa(n), pb(n), paa(n), pbb(n), pab(n);
  for (std::size_t ch = 0; ch < 3; ++ch) {
    for (std::size_t i = 0; i < n; ++i) {
      const double x = a.samples()[i * 3 + ch];
      const double y = b.samples()[i * 3 + ch];
      pa[i] = x;
      pb[i] = y;
      paa[i] = x * x;
      pbb[i] = y * y;
      pab[i] = x * y;
    }
    const auto mu_a = filter_valid(pa, h, w, taps);
    const auto mu_b = filter_valid(pb, h, w, taps);
    const auto e_aa = filter_valid(paa, h, w, taps);
    const auto e_bb = filter_valid(pbb, h, w, taps);
    const auto e_ab = filter_valid(pab, h, w, taps);
    double sum = 0.0;
    for (std::size_t i = 0; i < mu_a.size(); ++i) {
      const double ma = mu_a[i], mb = mu_b[i];
      const double var_a = e_aa[i] - ma * ma;
      const double var_b = e_bb[i] - mb * mb;
      const double cov = e_ab[i] - ma * mb;
      sum += ((2.0 * ma * mb + kSsimC1) * (2.0 * cov + kSsimC2)) /
             ((ma * ma + mb * mb + kSsimC1) * (var_a + var_b + kSsimC2));
    }
    channel_total += sum / static_cast<double>(mu_a.size());
  }
  return channel_total / 3.0;
}

CohResult coh(std::span<const MetricTuple> methods, const CohWeights& weights) {
  require(methods.size() >= 2, Errc::normalization,
          "COH needs at least two methods to normalize across");
  CohResult out;
  out.scores.assign(methods.size(), 0.0);
  double weight_total = 0.0;

  auto add_metric = [&](const char* name, double weight, auto&& value_of) {
    std::vector<double> values;
    values.reserve(methods.size());
    for (const auto& m : methods) values.push_back(value_of(m));
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double lo_v = *lo, hi_v = *hi;
    weight_total += weight;
    if (hi_v == lo_v) {
      out.warnings.push_back(std::string(name) +
                             ": all methods equal, normalized to 0");
      return;
    }
    for (std::size_t i = 0; i < values.size(); ++i) {
      out.scores[i] += weight * (values[i] - lo_v) / (hi_v - lo_v);
    }
  };

  auto all_have = [&](auto member) {
    return std::all_of(methods.begin(), methods.end(),
                       [&](const MetricTuple& m) { return (m.*member).has_value(); });
  };
  if (all_have(&MetricTuple::lpips)) {
    add_metric("lpips", weights.lpips, [](const MetricTuple& m) { return *m.lpips; });
  }
  if (all_have(&MetricTuple::dists)) {
    add_metric("dists", weights.dists, [](const MetricTuple& m) { return *m.dists; });
  }
  add_metric("tv", weights.tv, [](const MetricTuple& m) { return m.tv; });
  add_metric("ssim", weights.ssim, [](const MetricTuple& m) { return 1.0 - m.ssim; });

  require(weight_total > 0.0, Errc::normalization, "COH weights sum to zero");
  for (double& s : out.scores) s /= weight_total;
  return out;
}

double mean_of(std::span<const double> values) {
  if (values.empty()) return 0.0;
  return std::accumulate(values.begin(), values.end(), 0.0) /
         static_cast<double>(values.size());
}

double stddev_of(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double mu = mean_of(values);
  double acc = 0.0;
  for (double v : values) acc += (v - mu) * (v - mu);
  return std::sqrt(acc / static_cast<double>(values.size() - 1));
}

MetricReport evaluate_panorama(const PixelImage& panorama, const EvalOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const auto orientation = orientation_of(panorama);
  const auto pairs = extract_adjacent_crops(panorama, options.crop_side, orientation);
  MetricReport report;
  std::vector<double> tvs, ssims;
  for (const auto& pair : pairs) {
    SeamMetrics m;
    m.seam = pair.seam;
    m.tv = orientation == Orientation::horizontal
               ? tv_seam(panorama, pair.seam, options.half_width)
               : tv_seam_rows(panorama, pair.seam, options.half_width);
    m.ssim = ssim(pair.first, pair.second);
    tvs.push_back(m.tv);
    ssims.push_back(m.ssim);
    report.seams.push_back(m);
  }
  report.tv_mean = mean_of(tvs);
  report.tv_std = stddev_of(tvs);
  report.ssim_mean = mean_of(ssims);
  report.ssim_std = stddev_of(ssims);
  report.wall_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start).count();
  return report;
}

}  // namespace nextcrop
