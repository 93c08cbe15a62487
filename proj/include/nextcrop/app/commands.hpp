#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "nextcrop/app/config.hpp"
#include "nextcrop/codebook.hpp"
#include "nextcrop/generator.hpp"
#include "nextcrop/metrics.hpp"
#include "nextcrop/scheduler.hpp"

namespace nextcrop::app {

// What a command wrote and a one-paragraph human summary for stdout.
struct CommandResult {
  std::vector<std::filesystem::path> files;
  std::string summary;
};

Codebook make_codebook(const RunConfig& config);

// Markov tables are built for K = codebook size and capacity s^2; a tiny
// checkpoint fixes its own capacity, which must equal s^2.
std::unique_ptr<TokenGenerator> make_generator(const RunConfig& config);

// Output set shared by generate / layout / guide:
//   panorama.png  panorama.ptok  trace.log  codebook.pcbk  run.ini
CommandResult cmd_generate(const RunConfig& config);
CommandResult cmd_layout(const RunConfig& config);
CommandResult cmd_guide(const RunConfig& config);

// Evaluates one panorama given as .png, or as .ptok rendered with
// `codebook` (the run's codebook.pcbk; if empty, the config's codebook).
// Writes metrics.csv and seams.csv into config.out.
CommandResult cmd_evaluate(const RunConfig& config, const std::filesystem::path& input,
                           const std::filesystem::path& codebook = {});

// Stride sweep over config.strides at config.width, or a size sweep over
// config.widths at config.stride when widths is non-empty. Writes ablation.csv.
CommandResult cmd_ablate(const RunConfig& config);

// Trains a TinyCausalModel (window = config.window) on windows cut from the
// PTOK files in config.corpus (a file or directory), or on config.synthetic
// Markov sequences when no corpus is given. Writes model.pmdl and loss.csv.
CommandResult cmd_train_tiny(const RunConfig& config);

std::string metrics_csv(const MetricReport& report);
std::string seams_csv(const MetricReport& report);

}  // namespace nextcrop::app
