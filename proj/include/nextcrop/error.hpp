#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nextcrop {

// Every failure the engine reports carries one of these codes. The CLI maps
// them onto process exit codes (see exit_code()).
enum class Errc {
  index,
  dimension,
  range,
  config,
  codebook,
  shape,
  input,
  capacity,
  plan,
  layout,
  training,
  normalization,
  io,
};

std::string_view to_string(Errc code);

// 2 config, 3 plan, 4 engine, 5 I/O.
int exit_code(Errc code);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, Errc code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace nextcrop
