#include "nextcrop/app/config.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <functional>
#include <sstream>
#include <vector>

#include "nextcrop/bytes.hpp"
#include "nextcrop/error.hpp"

namespace nextcrop::app {
namespace {

struct Field {
  const char* section;
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

template <typename T>
T parse_number(const std::string& key, const std::string& text) {
  T value{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) {
    fail(Errc::config, "invalid value '" + text + "' for " + key);
  }
  return value;
}

std::string quote(const std::string& s) { return "\"" + s + "\""; }

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

template <typename T>
Field number_field(const char* section, const char* key, T RunConfig::*member) {
  return Field{section, key,
               [member](const RunConfig& c) {
                 if constexpr (std::is_floating_point_v<T>) {
                   return format_double(c.*member);
                 } else {
                   return std::to_string(c.*member);
                 }
               },
               [member, key](RunConfig& c, const std::string& v) {
                 c.*member = parse_number<T>(key, v);
               }};
}

Field string_field(const char* section, const char* key, std::string RunConfig::*member) {
  return Field{section, key, [member](const RunConfig& c) { return quote(c.*member); },
               [member](RunConfig& c, const std::string& v) { c.*member = v; }};
}

Field bool_field(const char* section, const char* key, bool RunConfig::*member) {
  return Field{section, key,
               [member](const RunConfig& c) { return std::string(c.*member ? "true" : "false"); },
               [member, key](RunConfig& c, const std::string& v) {
                 if (v == "true" || v == "1") {
                   c.*member = true;
                 } else if (v == "false" || v == "0") {
                   c.*member = false;
                 } else {
                   fail(Errc::config, "invalid boolean '" + v + "' for " + key);
                 }
               }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      string_field("run", "mode", &RunConfig::mode),
      number_field("run", "seed", &RunConfig::seed),
      string_field("run", "prompt", &RunConfig::prompt),
      string_field("run", "layout", &RunConfig::layout),
      string_field("run", "guide", &RunConfig::guide),
      string_field("run", "out", &RunConfig::out),
      bool_field("run", "parallel", &RunConfig::parallel),
      number_field("plan", "side", &RunConfig::side),
      string_field("plan", "stride", &RunConfig::stride),
      number_field("plan", "width", &RunConfig::width),
      number_field("plan", "height", &RunConfig::height),
      number_field("plan", "n", &RunConfig::n),
      number_field("plan", "rows", &RunConfig::rows),
      number_field("plan", "cols", &RunConfig::cols),
      string_field("generator", "kind", &RunConfig::generator),
      number_field("generator", "order", &RunConfig::order),
      string_field("generator", "checkpoint", &RunConfig::checkpoint),
      number_field("sampling", "temperature", &RunConfig::temperature),
      number_field("sampling", "top_k", &RunConfig::top_k),
      number_field("codebook", "size", &RunConfig::codebook_size),
      number_field("codebook", "dim", &RunConfig::codebook_dim),
      number_field("codebook", "patch", &RunConfig::patch),
      number_field("codebook", "seed", &RunConfig::codebook_seed),
      number_field("eval", "crop", &RunConfig::crop),
      number_field("eval", "half_width", &RunConfig::half_width),
      string_field("ablate", "strides", &RunConfig::strides),
      string_field("ablate", "widths", &RunConfig::widths),
      number_field("ablate", "seeds", &RunConfig::seeds),
      bool_field("ablate", "baseline", &RunConfig::baseline),
      string_field("train", "corpus", &RunConfig::corpus),
      number_field("train", "epochs", &RunConfig::epochs),
      number_field("train", "lr", &RunConfig::lr),
      number_field("train", "window", &RunConfig::window),
      number_field("train", "dim", &RunConfig::dim),
      number_field("train", "synthetic", &RunConfig::synthetic),
  };
  return table;
}

}  // namespace

std::string RunConfig::to_ini() const {
  std::string out;
  std::string section;
  for (const auto& f : fields()) {
    if (section != f.section) {
      if (!section.empty()) out += "\n";
      section = f.section;
      out += "[" + section + "]\n";
    }
    out += std::string(f.key) + " = " + f.get(*this) + "\n";
  }
  return out;
}

void RunConfig::merge_ini(const std::string& text) {
  std::istringstream in(text);
  std::vector<CLI::ConfigItem> items;
  try {
    items = CLI::ConfigINI().from_config(in);
  } catch (const CLI::Error& e) {
    fail(Errc::config, std::string("malformed config: ") + e.what());
  }
  for (const auto& item : items) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    const std::string section = item.parents.empty() ? "" : item.parents.back();
    const Field* match = nullptr;
    for (const auto& f : fields()) {
      if (section == f.section && item.name == f.key) match = &f;
    }
    if (match == nullptr) {
      fail(Errc::config, "unknown config key '" +
                             (section.empty() ? item.name : section + "." + item.name) + "'");
    }
    std::string value;
    for (std::size_t i = 0; i < item.inputs.size(); ++i) {
      if (i) value += ",";
      value += item.inputs[i];
    }
    match->set(*this, value);
  }
}

void RunConfig::merge_ini_file(const std::filesystem::path& path) {
  const auto bytes = read_file(path);
  merge_ini(std::string(bytes.begin(), bytes.end()));
}

ExpansionPlan RunConfig::plan() const {
  const auto m = parse_mode(mode);
  const auto u = Rational::parse(stride);
  const std::size_t c = cols ? cols : u.scale(side);
  const std::size_t r = rows ? rows : u.scale(side);
  switch (m) {
    case ExpansionMode::horizontal:
      return ExpansionPlan::horizontal(side, n ? n : iterations_for(width, side, c, patch), c);
    case ExpansionMode::vertical:
      return ExpansionPlan::vertical(side, n ? n : iterations_for(height, side, r, patch), r);
    case ExpansionMode::both:
      return ExpansionPlan::both(side, n ? n : iterations_for(height, side, r, patch), r,
                                 n ? n : iterations_for(width, side, c, patch), c);
  }
  fail(Errc::config, "unknown mode");
}

SamplingParams RunConfig::sampling() const {
  return SamplingParams{temperature, top_k, seed};
}

EvalOptions RunConfig::eval() const {
  return EvalOptions{crop ? crop : side * patch, half_width};
}

}  // namespace nextcrop::app
