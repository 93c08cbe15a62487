// nextcrop: panorama generation, evaluation, ablation and tiny-model
// training from the command line.
//
//   nextcrop generate --seed 7 --stride 3/4 --width 5120 --out runs/a
//   nextcrop evaluate runs/a/panorama.png --out runs/a
//   nextcrop config --dump-defaults > my.ini
//
// Every failure prints one line "error[<code>]: <message>" to stderr and
// exits with 2 (config), 3 (plan/layout/capacity), 4 (engine) or 5 (I/O).

#include <CLI11.hpp>
#include <cstdio>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nextcrop/app/commands.hpp"
#include "nextcrop/app/config.hpp"
#include "nextcrop/error.hpp"

namespace {

using nextcrop::app::RunConfig;

// Command-line values are applied after the --config file, so they win.
class Overrides {
 public:
  template <typename T>
  void add(CLI::App& app, const std::string& flag, T RunConfig::*member,
           const std::string& help) {
    auto slot = std::make_shared<std::optional<T>>();
    app.add_option(flag, *slot, help);
    apply_.push_back([slot, member](RunConfig& c) {
      if (*slot) c.*member = **slot;
    });
  }

  void add_flag(CLI::App& app, const std::string& flag, bool RunConfig::*member,
                const std::string& help) {
    auto slot = std::make_shared<bool>(false);
    app.add_flag(flag, *slot, help);
    apply_.push_back([slot, member](RunConfig& c) {
      if (*slot) c.*member = true;
    });
  }

  void apply(RunConfig& config) const {
    for (const auto& f : apply_) f(config);
  }

 private:
  std::vector<std::function<void(RunConfig&)>> apply_;
};

void add_run_options(CLI::App& app, Overrides& o) {
  o.add(app, "--seed", &RunConfig::seed, "Global seed");
  o.add(app, "--mode", &RunConfig::mode, "vertical, horizontal or both");
  o.add(app, "--stride", &RunConfig::stride, "Expansion stride u as a fraction, e.g. 3/4");
  o.add(app, "--width", &RunConfig::width, "Target panorama width in pixels");
  o.add(app, "--height", &RunConfig::height, "Target panorama height in pixels");
  o.add(app, "--prompt", &RunConfig::prompt, "Prompt text");
  o.add(app, "--layout", &RunConfig::layout, "Layout JSON file");
  o.add(app, "--guide", &RunConfig::guide, "Guide PNG pinned to the top-left");
  o.add(app, "--generator", &RunConfig::generator, "markov or tiny");
  o.add(app, "--checkpoint", &RunConfig::checkpoint, "PMDL checkpoint for the generator");
  o.add(app, "--order", &RunConfig::order, "Markov order");
  o.add(app, "--out", &RunConfig::out, "Output directory");
  o.add(app, "--n", &RunConfig::n, "Iteration count (overrides width/height)");
  o.add(app, "--side", &RunConfig::side, "Block side s in tokens");
  o.add(app, "--rows", &RunConfig::rows, "Rows per vertical iteration");
  o.add(app, "--cols", &RunConfig::cols, "Columns per horizontal iteration");
  o.add(app, "--temperature", &RunConfig::temperature, "Sampling temperature");
  o.add(app, "--top-k", &RunConfig::top_k, "Top-k filter (0 = off)");
  o.add(app, "--codebook-size", &RunConfig::codebook_size, "Codebook size K");
  o.add(app, "--codebook-dim", &RunConfig::codebook_dim, "Embedding dimension d");
  o.add(app, "--codebook-seed", &RunConfig::codebook_seed, "Codebook seed");
  o.add(app, "--patch", &RunConfig::patch, "Pixels per token side");
  o.add(app, "--crop", &RunConfig::crop, "Evaluation crop side in pixels (0 = s*patch)");
  o.add(app, "--half-width", &RunConfig::half_width, "TV band half-width in pixels");
  o.add_flag(app, "--parallel", &RunConfig::parallel, "Generate rows on worker threads");
}

int report(const nextcrop::Error& e) {
  std::fprintf(stderr, "error[%s]: %s\n", std::string(nextcrop::to_string(e.code())).c_str(),
               e.what());
  return nextcrop::exit_code(e.code());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Next-crop panorama token generator"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  app.add_option("--config", config_path, "INI run configuration");
  Overrides overrides;
  add_run_options(app, overrides);

  auto* generate = app.add_subcommand("generate", "Generate a panorama");
  auto* layout = app.add_subcommand("layout", "Generate with per-iteration prompts");
  auto* guide = app.add_subcommand("guide", "Generate around a guide image");

  auto* evaluate = app.add_subcommand("evaluate", "Seam coherence metrics for a panorama");
  std::string eval_input;
  std::string eval_codebook;
  evaluate->add_option("input", eval_input, "panorama.png or panorama.ptok")->required();
  evaluate->add_option("--codebook", eval_codebook, "PCBK codebook for .ptok input");

  auto* ablate = app.add_subcommand("ablate", "Stride or panorama-size sweep");
  overrides.add(*ablate, "--strides", &RunConfig::strides, "Comma-separated strides");
  overrides.add(*ablate, "--widths", &RunConfig::widths, "Comma-separated widths (size sweep)");
  overrides.add(*ablate, "--seeds", &RunConfig::seeds, "Seeds per group");
  overrides.add_flag(*ablate, "--baseline", &RunConfig::baseline,
                     "Add the independent-crop baseline arm");

  auto* train = app.add_subcommand("train-tiny", "Train the tiny causal model");
  overrides.add(*train, "--corpus", &RunConfig::corpus, "PTOK file or directory");
  overrides.add(*train, "--epochs", &RunConfig::epochs, "Training epochs");
  overrides.add(*train, "--lr", &RunConfig::lr, "Learning rate");
  overrides.add(*train, "--window", &RunConfig::window, "Model window L");
  overrides.add(*train, "--dim", &RunConfig::dim, "Model width m");
  overrides.add(*train, "--synthetic", &RunConfig::synthetic,
                "Synthetic sequences when no corpus is given");

  auto* config_cmd = app.add_subcommand("config", "Print the effective configuration");
  bool dump_defaults = false;
  config_cmd->add_flag("--dump-defaults", dump_defaults, "Print built-in defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Error& e) {
    std::string message = e.what();
    for (auto& ch : message) {
      if (ch == '\n') ch = ' ';
    }
    return report(nextcrop::Error(nextcrop::Errc::config, message));
  }

  try {
    RunConfig config;
    if (dump_defaults) {
      std::cout << config.to_ini();
      return 0;
    }
    if (!config_path.empty()) config.merge_ini_file(config_path);
    overrides.apply(config);

    nextcrop::app::CommandResult result;
    if (config_cmd->parsed()) {
      std::cout << config.to_ini();
      return 0;
    } else if (generate->parsed()) {
      result = nextcrop::app::cmd_generate(config);
    } else if (layout->parsed()) {
      result = nextcrop::app::cmd_layout(config);
    } else if (guide->parsed()) {
      result = nextcrop::app::cmd_guide(config);
    } else if (evaluate->parsed()) {
      result = nextcrop::app::cmd_evaluate(config, eval_input, eval_codebook);
    } else if (ablate->parsed()) {
      result = nextcrop::app::cmd_ablate(config);
    } else if (train->parsed()) {
      result = nextcrop::app::cmd_train_tiny(config);
    }
    std::cout << result.summary << "\n";
    return 0;
  } catch (const nextcrop::Error& e) {
    return report(e);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error[internal]: %s\n", e.what());
    return 4;
  }
}
