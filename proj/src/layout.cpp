#include "nextcrop/layout.hpp"

#include <json.hpp>

#include "nextcrop/bytes.hpp"
#include "nextcrop/error.hpp"

namespace nextcrop {

LayoutSpec LayoutSpec::single(std::size_t iterations, std::string prompt) {
  require(iterations >= 1, Errc::layout, "layout needs at least one iteration");
  return LayoutSpec{{LayoutSegment{0, iterations - 1, std::move(prompt), std::nullopt}}};
}

void LayoutSpec::validate(std::size_t iterations) const {
  require(!segments.empty(), Errc::layout, "layout has no segments");
  std::size_t next = 0;
  for (const auto& seg : segments) {
    require(seg.first == next, Errc::layout,
            "layout segment starting at iteration " + std::to_string(seg.first + 1) +
                " leaves a gap or overlap (expected " + std::to_string(next + 1) + ")");
    require(seg.last >= seg.first, Errc::layout, "layout segment range is reversed");
    require(!seg.prompt.empty(), Errc::layout, "layout segment has an empty prompt");
    if (seg.lambda) {
      require(*seg.lambda >= 0.0 && *seg.lambda <= 1.0, Errc::layout,
              "layout lambda must lie in [0, 1]");
    }
    next = seg.last + 1;
  }
  require(next == iterations, Errc::layout,
          "layout covers iterations 1.." + std::to_string(next) + " but the plan has " +
              std::to_string(iterations));
}

const LayoutSegment& LayoutSpec::segment_for(std::size_t iteration) const {
  for (const auto& seg : segments) {
    if (iteration >= seg.first && iteration <= seg.last) return seg;
  }
  fail(Errc::layout, "iteration " + std::to_string(iteration + 1) + " is not covered");
}

LayoutSpec LayoutSpec::parse_json(const std::string& text) {
  LayoutSpec spec;
  try {
    const auto doc = nlohmann::json::parse(text);
    for (const auto& item : doc.at("segments")) {
      const auto range = item.at("iterations");
      const auto a = range.at(0).get<std::size_t>();
      const auto b = range.at(1).get<std::size_t>();
      require(a >= 1 && b >= 1, Errc::layout, "layout iterations are numbered from 1");
      LayoutSegment seg{a - 1, b - 1, item.at("prompt").get<std::string>(), std::nullopt};
      if (item.contains("lambda")) seg.lambda = item.at("lambda").get<double>();
      spec.segments.push_back(std::move(seg));
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::layout, std::string("malformed layout file: ") + e.what());
  }
  return spec;
}

LayoutSpec LayoutSpec::load(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  return parse_json(std::string(bytes.begin(), bytes.end()));
}

std::string LayoutSpec::to_json() const {
  nlohmann::json segs = nlohmann::json::array();
  for (const auto& seg : segments) {
    nlohmann::json item = {{"iterations", {seg.first + 1, seg.last + 1}},
                           {"prompt", seg.prompt}};
    if (seg.lambda) item["lambda"] = *seg.lambda;
    segs.push_back(std::move(item));
  }
  return nlohmann::json{{"segments", std::move(segs)}}.dump(2) + "\n";
}

}  // namespace nextcrop
