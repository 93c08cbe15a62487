#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "nextcrop/codebook.hpp"
#include "nextcrop/generator.hpp"
#include "nextcrop/grid.hpp"
#include "nextcrop/image.hpp"
#include "nextcrop/layout.hpp"
#include "nextcrop/plan.hpp"
#include "nextcrop/prompt.hpp"
#include "nextcrop/trace.hpp"

namespace nextcrop {

struct SchedulerOptions {
  // Generate the rows of a horizontal iteration on worker threads. Output is
  // byte-identical either way.
  bool parallel_rows = false;
  std::size_t threads = 0;  // 0 = hardware concurrency
};

// Identity of one expansion step: the prompt conditioning it and the ordinal
// that keys its random streams (seed, ordinal, row).
struct ExpansionStep {
  const PromptEmbedding* prompt = nullptr;
  std::uint64_t ordinal = 1;
  SchedulerOptions options;
};

struct PanoramaResult {
  TokenGrid grid;
  GenerationTrace trace;
};

// s x s block generated from prompt conditioning alone (stream (seed, 0, 0)).
// `block_tokens` must be a perfect square equal to the generator capacity.
TokenGrid generate_first_block(const TokenGenerator& gen,
                               const PromptEmbedding& prompt,
                               std::size_t block_tokens,
                               const SamplingParams& params,
                               IterationRecord* record = nullptr);

// Appends r rows to a panorama of width s. The generator is conditioned on the
// last (s - r) rows, i.e. the final p - r*s tokens in raster order.
TokenGrid expand_vertical(const TokenGenerator& gen, const TokenGrid& panorama,
                          std::size_t rows, const SamplingParams& params,
                          const ExpansionStep& step = {},
                          IterationRecord* record = nullptr);

// Appends c columns to a panorama of height s. Row j continues from its own
// last (s - c) tokens on stream (seed, ordinal, j); rows are independent.
TokenGrid expand_horizontal(const TokenGenerator& gen, const TokenGrid& panorama,
                            std::size_t cols, const SamplingParams& params,
                            const ExpansionStep& step = {},
                            IterationRecord* record = nullptr);

PanoramaResult generate_panorama(const ExpansionPlan& plan,
                                 const PromptEmbedding& prompt,
                                 const TokenGenerator& gen,
                                 const SamplingParams& params,
                                 const SchedulerOptions& options = {});

// Per-iteration prompts from `layout` (single-direction plans only). Where a
// segment with a lambda begins, every token pair straddling the seam is
// re-quantized with blend_boundary before the new tokens are committed.
PanoramaResult layout_generate(const ExpansionPlan& plan, const LayoutSpec& layout,
                               const TokenGenerator& gen, const Codebook& codebook,
                               const SamplingParams& params,
                               const SchedulerOptions& options = {});

// Encodes `guide` and pins its tokens to the top-left of the first block;
// the rest of the block and every expansion are generated as usual. An empty
// guide reduces to generate_panorama.
PanoramaResult image_guided_generate(const ExpansionPlan& plan,
                                     const PixelImage& guide,
                                     const PromptEmbedding& prompt,
                                     const TokenGenerator& gen,
                                     const Codebook& codebook,
                                     const SamplingParams& params,
                                     const SchedulerOptions& options = {});

// Control arm: every crop is an independent prompt-only block; only its new
// rows/columns are kept, so the output shape matches generate_panorama.
PanoramaResult baseline_independent(const ExpansionPlan& plan,
                                    const PromptEmbedding& prompt,
                                    const TokenGenerator& gen,
                                    const SamplingParams& params);

}  // namespace nextcrop
