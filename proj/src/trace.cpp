#include "nextcrop/trace.hpp"

#include <json.hpp>

namespace nextcrop {

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::first_block: return "first";
    case Phase::vertical: return "vertical";
    case Phase::horizontal: return "horizontal";
  }
  return "?";
}

std::size_t IterationRecord::emitted() const noexcept {
  std::size_t n = 0;
  for (const auto& w : windows) n += w.emitted;
  return n;
}

namespace {

nlohmann::json to_json(const IterationRecord& rec) {
  nlohmann::json windows = nlohmann::json::array();
  for (const auto& w : rec.windows) {
    windows.push_back({{"row", w.row},
                       {"start", w.begin},
                       {"end", w.end},
                       {"stream", {w.stream.seed, w.stream.block, w.stream.row}},
                       {"emitted", w.emitted}});
  }
  nlohmann::json out = {{"iteration", rec.iteration},
                        {"mode", to_string(rec.phase)},
                        {"band", rec.band},
                        {"grid", {rec.grid_rows, rec.grid_cols}},
                        {"windows", std::move(windows)},
                        {"tokens_emitted", rec.emitted()},
                        {"millis", rec.millis}};
  if (!rec.blends.empty()) {
    nlohmann::json blends = nlohmann::json::array();
    for (const auto& b : rec.blends) {
      blends.push_back({{"row", b.row},
                        {"col", b.col},
                        {"previous", b.previous},
                        {"generated", b.generated},
                        {"blended", b.blended},
                        {"lambda", b.lambda}});
    }
    out["blends"] = std::move(blends);
  }
  return out;
}

}  // namespace

std::string GenerationTrace::to_jsonl() const {
  std::string out = to_json(first_block).dump() + "\n";
  for (const auto& rec : expansions) out += to_json(rec).dump() + "\n";
  return out;
}

}  // namespace nextcrop
