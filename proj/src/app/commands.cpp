#include "nextcrop/app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "nextcrop/ablation.hpp"
#include "nextcrop/bytes.hpp"
#include "nextcrop/checkpoint.hpp"
#include "nextcrop/error.hpp"
#include "nextcrop/image.hpp"
#include "nextcrop/layout.hpp"
#include "nextcrop/markov.hpp"
#include "nextcrop/prompt.hpp"
#include "nextcrop/ptok.hpp"
#include "nextcrop/tiny_model.hpp"

namespace nextcrop::app {
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double millis_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::string number(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> items;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

void ensure_out_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(Errc::io, "cannot create output directory " + dir.string() + ": " + ec.message());
}

SchedulerOptions scheduler_options(const RunConfig& config) {
  return SchedulerOptions{config.parallel, 0};
}

CommandResult write_run(const RunConfig& config, const PanoramaResult& result,
                        const Codebook& codebook, double elapsed_ms) {
  const fs::path out = config.out;
  ensure_out_dir(out);
  const PixelImage image = decode_tokens(result.grid, codebook);

  CommandResult written;
  written.files = {out / "panorama.png", out / "panorama.ptok", out / "trace.log",
                   out / "codebook.pcbk", out / "run.ini"};
  write_png(written.files[0], image);
  write_ptok(written.files[1],
             PtokFile{result.grid, static_cast<std::uint32_t>(codebook.size())});
  write_text_atomic(written.files[2], result.trace.to_jsonl());
  write_pcbk(written.files[3], codebook);
  write_text_atomic(written.files[4], config.to_ini());

  std::ostringstream summary;
  summary << "grid " << result.grid.rows() << "x" << result.grid.cols() << " tokens, image "
          << image.height() << "x" << image.width() << " px, "
          << 1 + result.trace.expansions.size() << " iterations, " << number(elapsed_ms)
          << " ms -> " << out.string();
  written.summary = summary.str();
  return written;
}

std::vector<TokenSeq> corpus_from_ptok(const fs::path& root, std::size_t window,
                                       std::size_t vocab) {
  std::vector<fs::path> files;
  if (fs::is_directory(root)) {
    for (const auto& entry : fs::directory_iterator(root)) {
      if (entry.is_regular_file() && entry.path().extension() == ".ptok") {
        files.push_back(entry.path());
      }
    }
    std::sort(files.begin(), files.end());
  } else {
    files.push_back(root);
  }
  std::vector<TokenSeq> corpus;
  for (const auto& path : files) {
    const auto file = read_ptok(path);
    const auto tokens = file.grid.tokens();
    require(file.grid.empty() || file.grid.max_token() < vocab, Errc::input,
            path.string() + " holds tokens outside the model vocabulary");
    for (std::size_t begin = 0; begin + window <= tokens.size(); begin += window) {
      corpus.emplace_back(tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                          tokens.begin() + static_cast<std::ptrdiff_t>(begin + window));
    }
  }
  require(!corpus.empty(), Errc::input,
          "corpus " + root.string() + " yields no sequence of length " + std::to_string(window));
  return corpus;
}

}  // namespace

Codebook make_codebook(const RunConfig& config) {
  return build_codebook(config.codebook_size, config.codebook_dim, config.codebook_seed,
                        config.patch);
}

std::unique_ptr<TokenGenerator> make_generator(const RunConfig& config) {
  const std::size_t block = config.side * config.side;
  if (config.generator == "markov") {
    if (!config.checkpoint.empty()) {
      auto checkpoint = read_pmdl(config.checkpoint);
      auto* markov = std::get_if<MarkovCheckpoint>(&checkpoint);
      require(markov != nullptr, Errc::config,
              config.checkpoint + " is not a Markov checkpoint");
      require(markov->table.vocab() == config.codebook_size, Errc::config,
              "checkpoint vocabulary does not match the codebook size");
      return std::make_unique<MarkovGenerator>(std::move(markov->table), block);
    }
    return make_markov_generator(config.codebook_size, config.order,
                                 encode_prompt(config.prompt), block);
  }
  if (config.generator == "tiny") {
    require(!config.checkpoint.empty(), Errc::config,
            "the tiny generator needs a checkpoint (train one with train-tiny)");
    auto checkpoint = read_pmdl(config.checkpoint);
    auto* model = std::get_if<TinyCausalModel>(&checkpoint);
    require(model != nullptr, Errc::config, config.checkpoint + " is not a tiny-model checkpoint");
    require(model->shape().vocab == config.codebook_size, Errc::config,
            "checkpoint vocabulary does not match the codebook size");
    return std::make_unique<TinyModelGenerator>(
        std::make_shared<const TinyCausalModel>(std::move(*model)));
  }
  fail(Errc::config, "unknown generator '" + config.generator + "' (expected markov or tiny)");
}

CommandResult cmd_generate(const RunConfig& config) {
  const auto plan = config.plan();
  const auto codebook = make_codebook(config);
  const auto generator = make_generator(config);
  const auto start = Clock::now();
  const auto result = generate_panorama(plan, encode_prompt(config.prompt), *generator,
                                        config.sampling(), scheduler_options(config));
  return write_run(config, result, codebook, millis_since(start));
}

CommandResult cmd_layout(const RunConfig& config) {
  require(!config.layout.empty(), Errc::config, "layout requires --layout PATH");
  const auto plan = config.plan();
  const auto layout = LayoutSpec::load(config.layout);
  const auto codebook = make_codebook(config);
  const auto generator = make_generator(config);
  const auto start = Clock::now();
  const auto result = layout_generate(plan, layout, *generator, codebook, config.sampling(),
                                      scheduler_options(config));
  return write_run(config, result, codebook, millis_since(start));
}

CommandResult cmd_guide(const RunConfig& config) {
  if (config.guide.empty()) return cmd_generate(config);
  const auto plan = config.plan();
  const auto guide = read_png(config.guide);
  const auto codebook = make_codebook(config);
  const auto generator = make_generator(config);
  const auto start = Clock::now();
  const auto result =
      image_guided_generate(plan, guide, encode_prompt(config.prompt), *generator, codebook,
                            config.sampling(), scheduler_options(config));
  return write_run(config, result, codebook, millis_since(start));
}

std::string metrics_csv(const MetricReport& report) {
  return "seams,tv_mean,tv_std,ssim_mean,ssim_std\n" + std::to_string(report.seams.size()) +
         "," + number(report.tv_mean) + "," + number(report.tv_std) + "," +
         number(report.ssim_mean) + "," + number(report.ssim_std) + "\n";
}

std::string seams_csv(const MetricReport& report) {
  std::string out = "index,seam_px,tv,ssim\n";
  for (std::size_t i = 0; i < report.seams.size(); ++i) {
    const auto& s = report.seams[i];
    out += std::to_string(i) + "," + std::to_string(s.seam) + "," + number(s.tv) + "," +
           number(s.ssim) + "\n";
  }
  return out;
}

CommandResult cmd_evaluate(const RunConfig& config, const fs::path& input,
                           const fs::path& codebook_path) {
  PixelImage image;
  if (input.extension() == ".ptok") {
    const auto file = read_ptok(input);
    const auto codebook = codebook_path.empty() ? make_codebook(config) : read_pcbk(codebook_path);
    require(file.codebook_size == codebook.size(), Errc::input,
            "token file codebook size " + std::to_string(file.codebook_size) +
                " does not match codebook size " + std::to_string(codebook.size()));
    image = decode_tokens(file.grid, codebook);
  } else {
    image = read_png(input);
  }
  const auto report = evaluate_panorama(image, config.eval());

  const fs::path out = config.out;
  ensure_out_dir(out);
  CommandResult written;
  written.files = {out / "metrics.csv", out / "seams.csv"};
  write_text_atomic(written.files[0], metrics_csv(report));
  write_text_atomic(written.files[1], seams_csv(report));
  std::ostringstream summary;
  summary << report.seams.size() << " seams, tv_mean " << number(report.tv_mean)
          << ", ssim_mean " << number(report.ssim_mean) << ", " << number(report.wall_ms)
          << " ms -> " << out.string();
  written.summary = summary.str();
  return written;
}

CommandResult cmd_ablate(const RunConfig& config) {
  const auto codebook = make_codebook(config);
  const auto generator = make_generator(config);

  AblationSetup setup;
  setup.side = config.side;
  setup.stride = Rational::parse(config.stride);
  setup.width = config.width;
  setup.generator = generator.get();
  setup.codebook = &codebook;
  setup.sampling = config.sampling();
  setup.prompt = config.prompt;
  setup.include_baseline = config.baseline;
  setup.eval = config.eval();
  setup.scheduler = scheduler_options(config);

  std::vector<AblationRecord> records;
  std::string kind;
  if (!config.widths.empty()) {
    std::vector<std::size_t> widths;
    for (const auto& item : split_list(config.widths)) {
      std::size_t w = 0;
      try {
        std::size_t used = 0;
        w = std::stoul(item, &used);
        if (used != item.size()) throw std::invalid_argument(item);
      } catch (const std::logic_error&) {
        fail(Errc::config, "invalid width '" + item + "'");
      }
      widths.push_back(w);
    }
    require(!widths.empty(), Errc::config, "no widths given");
    records = ablate_size(widths, config.seeds, setup);
    kind = "size";
  } else {
    std::vector<Rational> strides;
    for (const auto& item : split_list(config.strides)) strides.push_back(Rational::parse(item));
    require(!strides.empty(), Errc::config, "no strides given");
    records = ablate_stride(strides, config.seeds, setup);
    kind = "stride";
  }

  const fs::path out = config.out;
  ensure_out_dir(out);
  CommandResult written;
  written.files = {out / "ablation.csv", out / "run.ini"};
  write_text_atomic(written.files[0], ablation_csv(records));
  write_text_atomic(written.files[1], config.to_ini());
  written.summary = kind + " ablation: " + std::to_string(records.size()) + " rows -> " +
                    written.files[0].string();
  return written;
}

CommandResult cmd_train_tiny(const RunConfig& config) {
  const TinyModelShape shape{config.window, config.codebook_size, config.dim};
  std::vector<TokenSeq> corpus;
  if (!config.corpus.empty()) {
    corpus = corpus_from_ptok(config.corpus, shape.window, shape.vocab);
  } else {
    require(config.synthetic >= 1, Errc::config, "synthetic corpus size must be positive");
    const auto prompt = encode_prompt(config.prompt);
    const auto source = make_markov_generator(shape.vocab, config.order, prompt, shape.window);
    for (std::size_t i = 0; i < config.synthetic; ++i) {
      ConditioningContext ctx{prompt, {}, StreamKey{config.seed, i, 0}};
      corpus.push_back(source->generate(ctx, shape.window, config.sampling()));
    }
  }

  const auto start = Clock::now();
  auto result = train_tiny(TinyCausalModel::random(shape, config.seed), corpus, config.epochs,
                           config.lr);
  const double elapsed = millis_since(start);

  const fs::path out = config.out;
  ensure_out_dir(out);
  std::string loss = "epoch,loss\n";
  for (std::size_t e = 0; e < result.loss_curve.size(); ++e) {
    loss += std::to_string(e) + "," + number(result.loss_curve[e]) + "\n";
  }
  CommandResult written;
  written.files = {out / "model.pmdl", out / "loss.csv", out / "run.ini"};
  write_pmdl(written.files[0], result.model);
  write_text_atomic(written.files[1], loss);
  write_text_atomic(written.files[2], config.to_ini());
  std::ostringstream summary;
  summary << corpus.size() << " sequences, " << config.epochs << " epochs, loss "
          << number(result.loss_curve.front()) << " -> " << number(result.loss_curve.back())
          << ", " << number(elapsed) << " ms -> " << out.string();
  written.summary = summary.str();
  return written;
}

}  // namespace nextcrop::app
