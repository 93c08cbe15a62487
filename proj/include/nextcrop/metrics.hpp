#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nextcrop/image.hpp"

namespace nextcrop {

// Horizontal panoramas are tiled left to right, vertical ones top to bottom.
enum class Orientation { horizontal, vertical };

Orientation orientation_of(const PixelImage& panorama);

struct CropPair {
  PixelImage first;   // left (or upper) crop
  PixelImage second;  // right (or lower) crop
  std::size_t seam = 0;  // seam coordinate in panorama pixels
};

// Non-overlapping crop_side x crop_side tiles from the leading edge; each
// consecutive pair of tiles is one CropPair. A trailing margin narrower than
// crop_side is discarded.
std::vector<CropPair> extract_adjacent_crops(const PixelImage& panorama,
                                             std::size_t crop_side,
                                             Orientation orientation = Orientation::horizontal);

// Mean anisotropic total variation over the band [seam - w, seam + w) that
// straddles a vertical seam line at x = seam. Per pixel:
// |I(y,x+1) - I(y,x)| + |I(y+1,x) - I(y,x)| with samples in [0, 1], channels
// averaged, forward differences past the image edge taken as 0.
double tv_seam(const PixelImage& panorama, std::size_t seam_x, std::size_t half_width);

// Same for a horizontal seam line at y = seam (vertical panoramas).
double tv_seam_rows(const PixelImage& panorama, std::size_t seam_y, std::size_t half_width);

inline constexpr std::size_t kSsimWindow = 11;
inline constexpr double kSsimSigma = 1.5;
inline constexpr double kSsimC1 = (0.01 * 255) * (0.01 * 255);
inline constexpr double kSsimC2 = (0.03 * 255) * (0.03 * 255);

// Single-scale SSIM with an 11x11 Gaussian window (sigma 1.5) over every
// fully contained window position, averaged over positions and channels.
double ssim(const PixelImage& a, const PixelImage& b);

// One method's coherence metrics. LPIPS/DISTS slots are carried but only
// enter COH when every compared method has them.
struct MetricTuple {
  std::optional<double> lpips;
  std::optional<double> dists;
  double tv = 0.0;
  double ssim = 0.0;
};

struct CohWeights {
  double lpips = 1.0;
  double dists = 1.0;
  double tv = 1.0;
  double ssim = 1.0;
};

struct CohResult {
  std::vector<double> scores;  // lower is better, each in [0, 1]
  std::vector<std::string> warnings;
};

// Maps SSIM to 1 - SSIM, min-max normalizes each metric across the compared
// methods, and takes the weighted mean. A metric with min == max normalizes
// to all zeros and records a warning. Needs at least two methods.
CohResult coh(std::span<const MetricTuple> methods, const CohWeights& weights = {});

struct SeamMetrics {
  std::size_t seam = 0;
  double tv = 0.0;
  double ssim = 0.0;
};

struct MetricReport {
  std::vector<SeamMetrics> seams;
  double tv_mean = 0.0;
  double tv_std = 0.0;
  double ssim_mean = 0.0;
  double ssim_std = 0.0;
  std::optional<double> coh;
  double wall_ms = 0.0;
};

struct EvalOptions {
  std::size_t crop_side = 512;
  std::size_t half_width = 8;
};

MetricReport evaluate_panorama(const PixelImage& panorama, const EvalOptions& options);

double mean_of(std::span<const double> values);
// Sample standard deviation; 0 for fewer than two values.
double stddev_of(std::span<const double> values);

}  // namespace nextcrop
