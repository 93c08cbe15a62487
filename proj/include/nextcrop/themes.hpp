#pragma once

#include <array>
#include <string_view>

namespace nextcrop {

// Built-in prompt fixtures: 25 scene themes, from expansive scenes to dense
// small-object scenes.
inline constexpr std::array<std::string_view, 25> kBuiltinThemes = {
    "landscape", "seascape",  "grassland",  "weather",    "mountain",
    "desert",    "forest",    "sky",        "lake",       "snowfield",
    "canyon",    "river",     "coastline",  "architecture", "cityscape",
    "village",   "garden",    "interior",   "street",     "harbor",
    "market",    "bookshelf", "crowd",      "pattern",    "festival"};

}  // namespace nextcrop
