#include "nextcrop/error.hpp"

namespace nextcrop {

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::index: return "index";
    case Errc::dimension: return "dimension";
    case Errc::range: return "range";
    case Errc::config: return "config";
    case Errc::codebook: return "codebook";
    case Errc::shape: return "shape";
    case Errc::input: return "input";
    case Errc::capacity: return "capacity";
    case Errc::plan: return "plan";
    case Errc::layout: return "layout";
    case Errc::training: return "training";
    case Errc::normalization: return "normalization";
    case Errc::io: return "io";
  }
  return "unknown";
}

int exit_code(Errc code) {
  switch (code) {
    case Errc::config:
    case Errc::input:
      return 2;
    case Errc::plan:
    case Errc::layout:
    case Errc::capacity:
      return 3;
    case Errc::io:
      return 5;
    default:
      return 4;
  }
}

}  // namespace nextcrop
