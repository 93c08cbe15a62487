#include "nextcrop/checkpoint.hpp"

#include <array>

#include "nextcrop/error.hpp"

namespace nextcrop {
namespace {
constexpr std::array<std::uint8_t, 4> kMagic = {0x50, 0x4D, 0x44, 0x4C};
constexpr std::uint8_t kVersion = 1;

void header(ByteWriter& w, ModelKind kind, std::size_t l, std::size_t k,
            std::size_t m) {
  w.raw(kMagic);
  w.u8(kVersion);
  w.u8(static_cast<std::uint8_t>(kind));
  w.u32(static_cast<std::uint32_t>(l));
  w.u32(static_cast<std::uint32_t>(k));
  w.u32(static_cast<std::uint32_t>(m));
}
}  // namespace

Bytes encode_pmdl(const TinyCausalModel& model) {
  const auto& s = model.shape();
  ByteWriter w;
  header(w, ModelKind::tiny, s.window, s.vocab, s.dim);
  for (double v : model.parameters()) w.f64(v);
  return std::move(w).bytes();
}

Bytes encode_pmdl(const MarkovCheckpoint& markov) {
  const auto& t = markov.table;
  ByteWriter w;
  header(w, ModelKind::markov, markov.capacity, t.vocab(), t.order());
  for (double v : t.initial()) w.f64(v);
  for (double v : t.transitions()) w.f64(v);
  return std::move(w).bytes();
}

Checkpoint decode_pmdl(std::span<const std::uint8_t> data) {
  ByteReader r(data);
  r.expect_magic(kMagic, "PMDL");
  require(r.u8() == kVersion, Errc::input, "unsupported PMDL version");
  const auto kind = r.u8();
  const std::size_t l = r.u32();
  const std::size_t k = r.u32();
  const std::size_t m = r.u32();
  auto read_doubles = [&r](std::size_t n) {
    require(r.remaining() >= n * 8, Errc::input, "truncated PMDL payload");
    std::vector<double> out(n);
    for (auto& v : out) v = r.f64();
    return out;
  };
  if (kind == static_cast<std::uint8_t>(ModelKind::tiny)) {
    const TinyModelShape shape{l, k, m};
    auto theta = read_doubles(TinyCausalModel::parameter_count(shape));
    require(r.remaining() == 0, Errc::input, "trailing bytes in PMDL file");
    return TinyCausalModel(shape, std::move(theta));
  }
  if (kind == static_cast<std::uint8_t>(ModelKind::markov)) {
    require(k >= 2 && m >= 1, Errc::input, "malformed Markov header");
    std::size_t entries = k;
    for (std::size_t i = 0; i < m; ++i) {
      require(entries <= r.remaining() / 8, Errc::input, "truncated PMDL payload");
      entries *= k;
    }
    auto initial = read_doubles(k);
    auto transitions = read_doubles(entries);
    require(r.remaining() == 0, Errc::input, "trailing bytes in PMDL file");
    return MarkovCheckpoint{MarkovTable(k, m, std::move(initial), std::move(transitions)),
                            static_cast<std::uint32_t>(l)};
  }
  fail(Errc::input, "unknown PMDL model kind " + std::to_string(kind));
}

void write_pmdl(const std::filesystem::path& path, const Checkpoint& checkpoint) {
  write_file_atomic(path, std::visit([](const auto& c) { return encode_pmdl(c); },
                                     checkpoint));
}

Checkpoint read_pmdl(const std::filesystem::path& path) {
  return decode_pmdl(read_file(path));
}

}  // namespace nextcrop
