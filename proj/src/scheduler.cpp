#include "nextcrop/scheduler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <memory>
#include <thread>
#include <vector>

#include "nextcrop/error.hpp"

namespace nextcrop {
namespace {

using Clock = std::chrono::steady_clock;

double millis_since(Clock::time_point start) {
  return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

std::size_t block_side(std::size_t block_tokens) {
  const auto side = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(block_tokens))));
  require(side * side == block_tokens && side >= 1, Errc::capacity,
          "block token count " + std::to_string(block_tokens) + " is not a perfect square");
  return side;
}

void check_block_capacity(const TokenGenerator& gen, std::size_t block_tokens) {
  if (gen.capacity() != block_tokens) {
    fail(Errc::capacity, "block of " + std::to_string(block_tokens) +
                             " tokens does not match generator capacity " +
                             std::to_string(gen.capacity()));
  }
}

ConditioningContext make_context(const PromptEmbedding* prompt, TokenSeq prefix,
                                 StreamKey key) {
  ConditioningContext ctx;
  if (prompt != nullptr) ctx.prompt = *prompt;
  ctx.prefix = std::move(prefix);
  ctx.stream = key;
  return ctx;
}

// First block with an optional pinned top-left region. Each generator call
// conditions on every token laid down before it in raster order.
TokenGrid first_block_with_guide(const TokenGenerator& gen,
                                 const PromptEmbedding& prompt,
                                 std::size_t block_tokens, const TokenGrid& guide,
                                 const SamplingParams& params,
                                 IterationRecord* record) {
  const auto start = Clock::now();
  const std::size_t side = block_side(block_tokens);
  check_block_capacity(gen, block_tokens);
  if (guide.rows() > side || guide.cols() > side) {
    fail(Errc::capacity, "guide of " + std::to_string(guide.rows()) + "x" +
                             std::to_string(guide.cols()) +
                             " tokens does not fit in a " + std::to_string(side) +
                             "x" + std::to_string(side) + " block");
  }
  const StreamKey key{params.seed, 0, 0};
  TokenSeq tokens;
  tokens.reserve(block_tokens);
  std::vector<WindowRecord> windows;

  auto emit = [&](std::size_t count) {
    auto ctx = make_context(&prompt, tokens, key);
    auto fresh = gen.generate(ctx, count, params);
    windows.push_back(WindowRecord{tokens.empty() ? 0 : tokens.size() / side, 0,
                                   tokens.size(), key, count, tokens});
    tokens.insert(tokens.end(), fresh.begin(), fresh.end());
  };

  const bool full_rows = guide.empty() || guide.cols() == side;
  if (full_rows) {
    const auto pinned = guide.tokens();
    tokens.assign(pinned.begin(), pinned.end());
    if (tokens.size() < block_tokens) emit(block_tokens - tokens.size());
  } else {
    for (std::size_t r = 0; r < side; ++r) {
      if (r >= guide.rows()) {
        emit(block_tokens - tokens.size());
        break;
      }
      auto pinned = guide.row(r);
      tokens.insert(tokens.end(), pinned.begin(), pinned.end());
      emit(side - guide.cols());
    }
  }

  if (record != nullptr) {
    *record = IterationRecord{0, Phase::first_block, 0, side, side, std::move(windows), {},
                              millis_since(start)};
  }
  return TokenGrid(side, side, std::move(tokens));
}

void blend_seam(TokenGrid& fresh, const TokenGrid& panorama, Phase phase,
                double lambda, const Codebook& codebook, IterationRecord* record) {
  if (phase == Phase::vertical) {
    const std::size_t last = panorama.rows() - 1;
    for (std::size_t x = 0; x < fresh.cols(); ++x) {
      const TokenId prev = panorama.at(last, x);
      const TokenId cur = fresh.at(0, x);
      const TokenId out = blend_boundary(codebook.embedding(prev), codebook.embedding(cur),
                                         lambda, codebook);
      fresh = fresh.with_token(0, x, out);
      if (record) record->blends.push_back({panorama.rows(), x, prev, cur, out, lambda});
    }
  } else {
    const std::size_t last = panorama.cols() - 1;
    for (std::size_t y = 0; y < fresh.rows(); ++y) {
      const TokenId prev = panorama.at(y, last);
      const TokenId cur = fresh.at(y, 0);
      const TokenId out = blend_boundary(codebook.embedding(prev), codebook.embedding(cur),
                                         lambda, codebook);
      fresh = fresh.with_token(y, 0, out);
      if (record) record->blends.push_back({y, panorama.cols(), prev, cur, out, lambda});
    }
  }
}

// New rows for a vertical step (not yet concatenated).
TokenGrid vertical_rows(const TokenGenerator& gen, const TokenGrid& panorama,
                        std::size_t rows, const SamplingParams& params,
                        const ExpansionStep& step, IterationRecord* record) {
  const std::size_t side = panorama.cols();
  if (rows >= side) {
    fail(Errc::plan, "vertical step of r=" + std::to_string(rows) +
                         " rows needs r < s=" + std::to_string(side));
  }
  require(rows >= 1, Errc::plan, "vertical step needs r >= 1");
  require(panorama.rows() >= side, Errc::shape, "panorama shorter than one block");
  const std::size_t window = side * side - rows * side;
  const StreamKey key{params.seed, step.ordinal, 0};
  TokenSeq prefix = tail_tokens(panorama, window);
  auto fresh = gen.generate(make_context(step.prompt, prefix, key), rows * side, params);
  if (record != nullptr) {
    record->phase = Phase::vertical;
    record->grid_rows = panorama.rows();
    record->grid_cols = panorama.cols();
    record->windows.push_back(WindowRecord{panorama.rows() - (side - rows),
                                           panorama.size() - window, panorama.size(),
                                           key, rows * side, std::move(prefix)});
  }
  return TokenGrid(rows, side, std::move(fresh));
}

// New columns for a horizontal step (not yet concatenated).
TokenGrid horizontal_cols(const TokenGenerator& gen, const TokenGrid& panorama,
                          std::size_t cols, const SamplingParams& params,
                          const ExpansionStep& step, IterationRecord* record) {
  const std::size_t side = panorama.rows();
  if (cols > side) {
    fail(Errc::plan, "horizontal step of c=" + std::to_string(cols) +
                         " columns needs c <= s=" + std::to_string(side));
  }
  require(cols >= 1, Errc::plan, "horizontal step needs c >= 1");
  require(panorama.cols() >= side, Errc::shape, "panorama narrower than one block");
  const std::size_t window = side - cols;

  std::vector<TokenSeq> fresh(side);
  std::vector<WindowRecord> windows(side);
  auto run_row = [&](std::size_t j) {
    const StreamKey key{params.seed, step.ordinal, j};
    TokenSeq prefix = row_tail(panorama, j, window);
    fresh[j] = gen.generate(make_context(step.prompt, prefix, key), cols, params);
    const std::size_t end = (j + 1) * panorama.cols();
    windows[j] = WindowRecord{j, end - window, end, key, cols, std::move(prefix)};
  };

  std::size_t workers = step.options.threads;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, side);
  if (step.options.parallel_rows && workers > 1) {
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            for (std::size_t j = w; j < side; j += workers) run_row(j);
          } catch (...) {
            errors[w] = std::current_exception();
          }
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (std::size_t j = 0; j < side; ++j) run_row(j);
  }

  TokenSeq tokens;
  tokens.reserve(side * cols);
  for (const auto& row : fresh) tokens.insert(tokens.end(), row.begin(), row.end());
  if (record != nullptr) {
    record->phase = Phase::horizontal;
    record->grid_rows = panorama.rows();
    record->grid_cols = panorama.cols();
    record->windows = std::move(windows);
  }
  return TokenGrid(side, cols, std::move(tokens));
}

// Drives a full run. `prompt_at(i)` gives the prompt of iteration i of a
// single-direction plan; "both" plans use prompt_at(0) throughout.
struct Runner {
  const ExpansionPlan& plan;
  const TokenGenerator& gen;
  const SamplingParams& params;
  const SchedulerOptions& options;
  std::function<const PromptEmbedding&(std::size_t)> prompt_at;
  std::function<std::optional<double>(std::size_t)> seam_lambda = [](std::size_t) {
    return std::optional<double>{};
  };
  const Codebook* codebook = nullptr;
  TokenGrid guide;

  PanoramaResult run() const {
    plan.validate();
    PanoramaResult out;
    out.grid = first_block_with_guide(gen, prompt_at(0), plan.block_tokens(), guide,
                                      params, &out.trace.first_block);
    std::uint64_t ordinal = 1;
    if (plan.grows_vertically()) {
      for (std::size_t i = 1; i < plan.vertical_iters; ++i) {
        out.grid = step(out.grid, Phase::vertical, i, ordinal++, 0, out.trace);
      }
    }
    if (plan.mode == ExpansionMode::horizontal) {
      for (std::size_t i = 1; i < plan.horizontal_iters; ++i) {
        out.grid = step(out.grid, Phase::horizontal, i, ordinal++, 0, out.trace);
      }
    } else if (plan.mode == ExpansionMode::both) {
      TokenGrid assembled;
      const std::size_t bands = out.grid.rows() / plan.side;
      for (std::size_t b = 0; b < bands; ++b) {
        TokenGrid band = out.grid.slice(b * plan.side, plan.side, 0, plan.side);
        for (std::size_t i = 1; i < plan.horizontal_iters; ++i) {
          band = step(band, Phase::horizontal, i, ordinal++, b, out.trace);
        }
        assembled = vconcat(assembled, band);
      }
      out.grid = std::move(assembled);
    }
    return out;
  }

  TokenGrid step(const TokenGrid& grid, Phase phase, std::size_t iteration,
                 std::uint64_t ordinal, std::size_t band, GenerationTrace& trace) const {
    const auto start = Clock::now();
    const bool single = plan.mode != ExpansionMode::both;
    ExpansionStep st{&prompt_at(single ? iteration : 0), ordinal, options};
    IterationRecord rec;
    rec.iteration = iteration;
    rec.band = band;
    TokenGrid fresh = phase == Phase::vertical
                          ? vertical_rows(gen, grid, plan.rows_per_iter, params, st, &rec)
                          : horizontal_cols(gen, grid, plan.cols_per_iter, params, st, &rec);
    if (single) {
      if (auto lambda = seam_lambda(iteration); lambda && codebook != nullptr) {
        blend_seam(fresh, grid, phase, *lambda, *codebook, &rec);
      }
    }
    rec.millis = millis_since(start);
    trace.expansions.push_back(std::move(rec));
    return phase == Phase::vertical ? vconcat(grid, fresh) : hconcat(grid, fresh);
  }
};

}  // namespace

TokenGrid generate_first_block(const TokenGenerator& gen, const PromptEmbedding& prompt,
                               std::size_t block_tokens, const SamplingParams& params,
                               IterationRecord* record) {
  return first_block_with_guide(gen, prompt, block_tokens, TokenGrid{}, params, record);
}

TokenGrid expand_vertical(const TokenGenerator& gen, const TokenGrid& panorama,
                          std::size_t rows, const SamplingParams& params,
                          const ExpansionStep& step, IterationRecord* record) {
  const auto start = Clock::now();
  auto fresh = vertical_rows(gen, panorama, rows, params, step, record);
  if (record != nullptr) record->millis = millis_since(start);
  return vconcat(panorama, fresh);
}

TokenGrid expand_horizontal(const TokenGenerator& gen, const TokenGrid& panorama,
                            std::size_t cols, const SamplingParams& params,
                            const ExpansionStep& step, IterationRecord* record) {
  const auto start = Clock::now();
  auto fresh = horizontal_cols(gen, panorama, cols, params, step, record);
  if (record != nullptr) record->millis = millis_since(start);
  return hconcat(panorama, fresh);
}

PanoramaResult generate_panorama(const ExpansionPlan& plan, const PromptEmbedding& prompt,
                                 const TokenGenerator& gen, const SamplingParams& params,
                                 const SchedulerOptions& options) {
  Runner runner{plan, gen, params, options,
                [&prompt](std::size_t) -> const PromptEmbedding& { return prompt; }};
  return runner.run();
}

PanoramaResult layout_generate(const ExpansionPlan& plan, const LayoutSpec& layout,
                               const TokenGenerator& gen, const Codebook& codebook,
                               const SamplingParams& params,
                               const SchedulerOptions& options) {
  require(plan.mode != ExpansionMode::both, Errc::plan,
          "layout control needs a single-direction plan");
  plan.validate();
  layout.validate(plan.iterations());
  std::vector<PromptEmbedding> prompts;
  prompts.reserve(layout.segments.size());
  for (const auto& seg : layout.segments) prompts.push_back(encode_prompt(seg.prompt));

  auto index_of = [&layout](std::size_t iteration) {
    for (std::size_t k = 0; k < layout.segments.size(); ++k) {
      if (iteration <= layout.segments[k].last) return k;
    }
    fail(Errc::layout, "iteration " + std::to_string(iteration + 1) + " is not covered");
  };
  Runner runner{plan, gen, params, options,
                [&](std::size_t i) -> const PromptEmbedding& { return prompts[index_of(i)]; }};
  runner.seam_lambda = [&](std::size_t i) -> std::optional<double> {
    const auto& seg = layout.segments[index_of(i)];
    if (i == seg.first && i > 0) return seg.lambda;
    return std::nullopt;
  };
  runner.codebook = &codebook;
  return runner.run();
}

PanoramaResult image_guided_generate(const ExpansionPlan& plan, const PixelImage& guide,
                                     const PromptEmbedding& prompt,
                                     const TokenGenerator& gen, const Codebook& codebook,
                                     const SamplingParams& params,
                                     const SchedulerOptions& options) {
  Runner runner{plan, gen, params, options,
                [&prompt](std::size_t) -> const PromptEmbedding& { return prompt; }};
  if (!guide.empty()) runner.guide = encode_image(guide, codebook);
  return runner.run();
}

PanoramaResult baseline_independent(const ExpansionPlan& plan,
                                    const PromptEmbedding& prompt,
                                    const TokenGenerator& gen,
                                    const SamplingParams& params) {
  plan.validate();
  const std::size_t side = plan.side;
  PanoramaResult out;
  out.grid = generate_first_block(gen, prompt, plan.block_tokens(), params,
                                  &out.trace.first_block);
  std::uint64_t ordinal = 1;
  auto fresh_block = [&](std::uint64_t ord, IterationRecord& rec) {
    const StreamKey key{params.seed, ord, 0};
    auto tokens = gen.generate(make_context(&prompt, {}, key), plan.block_tokens(), params);
    rec.windows.push_back(WindowRecord{0, 0, 0, key, plan.block_tokens(), {}});
    return TokenGrid(side, side, std::move(tokens));
  };

  if (plan.grows_vertically()) {
    for (std::size_t i = 1; i < plan.vertical_iters; ++i) {
      const auto start = Clock::now();
      IterationRecord rec{i, Phase::vertical, 0, out.grid.rows(), out.grid.cols()};
      const auto block = fresh_block(ordinal++, rec);
      out.grid = vconcat(out.grid, block.slice(side - plan.rows_per_iter,
                                               plan.rows_per_iter, 0, side));
      rec.millis = millis_since(start);
      out.trace.expansions.push_back(std::move(rec));
    }
  }
  auto widen = [&](TokenGrid band, std::size_t band_index) {
    for (std::size_t i = 1; i < plan.horizontal_iters; ++i) {
      const auto start = Clock::now();
      IterationRecord rec{i, Phase::horizontal, band_index, band.rows(), band.cols()};
      const auto block = fresh_block(ordinal++, rec);
      band = hconcat(band, block.slice(0, side, side - plan.cols_per_iter,
                                       plan.cols_per_iter));
      rec.millis = millis_since(start);
      out.trace.expansions.push_back(std::move(rec));
    }
    return band;
  };
  if (plan.mode == ExpansionMode::horizontal) {
    out.grid = widen(out.grid, 0);
  } else if (plan.mode == ExpansionMode::both) {
    TokenGrid assembled;
    for (std::size_t b = 0; b < out.grid.rows() / side; ++b) {
      assembled = vconcat(assembled, widen(out.grid.slice(b * side, side, 0, side), b));
    }
    out.grid = std::move(assembled);
  }
  return out;
}

}  // namespace nextcrop
