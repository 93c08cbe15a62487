#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "nextcrop/codebook.hpp"
#include "nextcrop/generator.hpp"
#include "nextcrop/metrics.hpp"
#include "nextcrop/plan.hpp"
#include "nextcrop/scheduler.hpp"

namespace nextcrop {

// One CSV row. Aggregate rows leave `seed` empty and average over seeds.
struct AblationRecord {
  std::string method;
  std::string u;
  std::size_t w_prime = 0;
  std::optional<std::uint64_t> seed;
  double tv_mean = 0.0;
  double ssim_mean = 0.0;
  double coh = 0.0;
  double wall_ms = 0.0;
};

inline constexpr std::string_view kNextCropMethod = "next-crop";
inline constexpr std::string_view kBaselineMethod = "independent";

struct AblationSetup {
  // Horizontal template: block side s, and the stride for size ablations.
  std::size_t side = 32;
  Rational stride{3, 4};
  // Target panorama width in pixels for stride ablations.
  std::size_t width = 5120;
  const TokenGenerator* generator = nullptr;
  const Codebook* codebook = nullptr;
  SamplingParams sampling;  // seed field is the first seed of the sweep
  // Empty: seed i uses kBuiltinThemes[i % 25].
  std::string prompt;
  bool include_baseline = false;
  EvalOptions eval{0, 8};  // crop_side 0 means s * q
  SchedulerOptions scheduler;
};

// Runs every (stride, seed) pair at the template width. All strides are
// checked for an integral column step before anything runs.
std::vector<AblationRecord> ablate_stride(std::span<const Rational> strides,
                                          std::size_t seeds, const AblationSetup& setup);

// Runs every (width, seed) pair at the template stride.
std::vector<AblationRecord> ablate_size(std::span<const std::size_t> widths,
                                        std::size_t seeds, const AblationSetup& setup);

// Header: method,u,w_prime,seed,tv_mean,ssim_mean,coh,wall_ms
std::string ablation_csv(std::span<const AblationRecord> records);

}  // namespace nextcrop
