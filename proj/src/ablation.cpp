#include "nextcrop/ablation.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>

#include "nextcrop/error.hpp"
#include "nextcrop/themes.hpp"

namespace nextcrop {
namespace {

struct Condition {
  std::string u;
  std::size_t width;
  ExpansionPlan plan;
};

std::string prompt_for(const AblationSetup& setup, std::uint64_t seed) {
  if (!setup.prompt.empty()) return setup.prompt;
  return std::string(kBuiltinThemes[seed % kBuiltinThemes.size()]);
}

void fill_coh(std::vector<AblationRecord*>& rows) {
  if (rows.size() < 2) {
    for (auto* r : rows) r->coh = NAN;
    return;
  }
  std::vector<MetricTuple> tuples;
  for (const auto* r : rows) tuples.push_back(MetricTuple{{}, {}, r->tv_mean, r->ssim_mean});
  const auto result = coh(tuples);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i]->coh = result.scores[i];
}

std::vector<AblationRecord> run_conditions(const std::vector<Condition>& conditions,
                                           std::size_t seeds, const AblationSetup& setup) {
  require(setup.generator != nullptr && setup.codebook != nullptr, Errc::config,
          "ablation needs a generator and a codebook");
  require(seeds >= 1, Errc::config, "ablation needs at least one seed");
  EvalOptions eval = setup.eval;
  if (eval.crop_side == 0) eval.crop_side = setup.side * setup.codebook->patch_size();

  std::vector<std::string> methods = {std::string(kNextCropMethod)};
  if (setup.include_baseline) methods.emplace_back(kBaselineMethod);

  std::vector<AblationRecord> data;
  for (const auto& cond : conditions) {
    for (const auto& method : methods) {
      for (std::size_t i = 0; i < seeds; ++i) {
        SamplingParams params = setup.sampling;
        params.seed = setup.sampling.seed + i;
        const auto prompt = encode_prompt(prompt_for(setup, params.seed));
        const auto start = std::chrono::steady_clock::now();
        const auto result =
            method == kNextCropMethod
                ? generate_panorama(cond.plan, prompt, *setup.generator, params, setup.scheduler)
                : baseline_independent(cond.plan, prompt, *setup.generator, params);
        const double wall = std::chrono::duration<double, std::milli>(
                                std::chrono::steady_clock::now() - start)
                                .count();
        const auto report =
            evaluate_panorama(decode_tokens(result.grid, *setup.codebook), eval);
        data.push_back(AblationRecord{method, cond.u, cond.width, params.seed,
                                      report.tv_mean, report.ssim_mean, 0.0, wall});
      }
    }
  }

  std::vector<AblationRecord> aggregates;
  for (const auto& cond : conditions) {
    for (const auto& method : methods) {
      AblationRecord agg{method, cond.u, cond.width, std::nullopt, 0.0, 0.0, 0.0, 0.0};
      std::size_t n = 0;
      for (const auto& r : data) {
        if (r.method == method && r.u == cond.u && r.w_prime == cond.width) {
          agg.tv_mean += r.tv_mean;
          agg.ssim_mean += r.ssim_mean;
          agg.wall_ms += r.wall_ms;
          ++n;
        }
      }
      agg.tv_mean /= static_cast<double>(n);
      agg.ssim_mean /= static_cast<double>(n);
      agg.wall_ms /= static_cast<double>(n);
      aggregates.push_back(agg);
    }
  }

  std::vector<AblationRecord*> data_rows, agg_rows;
  for (auto& r : data) data_rows.push_back(&r);
  for (auto& r : aggregates) agg_rows.push_back(&r);
  fill_coh(data_rows);
  fill_coh(agg_rows);
  data.insert(data.end(), aggregates.begin(), aggregates.end());
  return data;
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

}  // namespace

std::vector<AblationRecord> ablate_stride(std::span<const Rational> strides,
                                          std::size_t seeds, const AblationSetup& setup) {
  require(!strides.empty(), Errc::config, "no strides given");
  require(setup.codebook != nullptr, Errc::config, "ablation needs a codebook");
  std::vector<Condition> conditions;
  for (const auto& u : strides) {
    const std::size_t c = u.scale(setup.side);
    const std::size_t n =
        iterations_for(setup.width, setup.side, c, setup.codebook->patch_size());
    conditions.push_back(
        Condition{u.to_string(), setup.width, ExpansionPlan::horizontal(setup.side, n, c)});
  }
  return run_conditions(conditions, seeds, setup);
}

std::vector<AblationRecord> ablate_size(std::span<const std::size_t> widths,
                                        std::size_t seeds, const AblationSetup& setup) {
  require(!widths.empty(), Errc::config, "no widths given");
  require(setup.codebook != nullptr, Errc::config, "ablation needs a codebook");
  const std::size_t c = setup.stride.scale(setup.side);
  std::vector<Condition> conditions;
  for (std::size_t w : widths) {
    const std::size_t n = iterations_for(w, setup.side, c, setup.codebook->patch_size());
    conditions.push_back(
        Condition{setup.stride.to_string(), w, ExpansionPlan::horizontal(setup.side, n, c)});
  }
  return run_conditions(conditions, seeds, setup);
}

std::string ablation_csv(std::span<const AblationRecord> records) {
  std::string out = "method,u,w_prime,seed,tv_mean,ssim_mean,coh,wall_ms\n";
  for (const auto& r : records) {
    out += r.method + "," + r.u + "," + std::to_string(r.w_prime) + "," +
           (r.seed ? std::to_string(*r.seed) : std::string("mean")) + "," +
           number(r.tv_mean) + "," + number(r.ssim_mean) + "," + number(r.coh) + "," +
           number(r.wall_ms) + "\n";
  }
  return out;
}

}  // namespace nextcrop
