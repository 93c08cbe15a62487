#pragma once

#include <cstdint>
#include <filesystem>
#include <variant>

#include "nextcrop/bytes.hpp"
#include "nextcrop/markov.hpp"
#include "nextcrop/tiny_model.hpp"

namespace nextcrop {

// "PMDL v1" container, little-endian:
//   magic 'PMDL', u8 version = 1, u8 kind, u32 L, u32 K, u32 m
//   kind 0 (tiny model):   m = width; then the flat parameter vector as f64
//                          in TinyCausalModel order.
//   kind 1 (Markov table): L = generator capacity, m = order; then K initial
//                          probabilities and K^order * K transition
//                          probabilities as f64.
enum class ModelKind : std::uint8_t { tiny = 0, markov = 1 };

struct MarkovCheckpoint {
  MarkovTable table;
  std::uint32_t capacity = 0;

  friend bool operator==(const MarkovCheckpoint&, const MarkovCheckpoint&) = default;
};

using Checkpoint = std::variant<TinyCausalModel, MarkovCheckpoint>;

Bytes encode_pmdl(const TinyCausalModel& model);
Bytes encode_pmdl(const MarkovCheckpoint& markov);
Checkpoint decode_pmdl(std::span<const std::uint8_t> data);

void write_pmdl(const std::filesystem::path& path, const Checkpoint& checkpoint);
Checkpoint read_pmdl(const std::filesystem::path& path);

}  // namespace nextcrop
