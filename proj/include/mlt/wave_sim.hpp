#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "mlt/strip_codec.hpp"

namespace mlt {

struct WaveConfig {
  int wave_size = 32;  // 32 or 64 lanes
  static constexpr int kWordBits = 32;
  void validate() const;
};

struct DecodeTrace {
  // Per triangle: how many triangles back the propagated vertex was found
  // (t itself when it comes from the implicit first triangle).
  std::vector<std::uint32_t> lookback;
  std::uint64_t fallback_iterations = 0;
  std::uint32_t max_lookback = 0;
  // Most flag words any lane fed to countbits for one index.
  std::uint32_t max_countbits_words = 0;
};

// Most significant set bit (31 = MSB), or nullopt for zero.
std::optional<int> firstbithigh(std::uint32_t word);
int countbits(std::uint32_t word);

struct Lookback {
  // Largest triangle j < t whose flag differs from triangle t's flag.
  std::optional<std::uint32_t> source;
  // Extra 32-bit windows scanned after the first one came up empty.
  std::uint32_t fallback_iterations = 0;
};

// Bit-scan search over packed L/R flags (bit t-1 holds triangle t). The
// first window holds triangle t at its MSB followed by the 31 flags before it.
Lookback parallel_index_lookback(std::span<const std::uint32_t> flag_words, std::uint32_t t);

struct ParallelDecode {
  DecodedTriangleList triangles;
  DecodeTrace trace;
};

ParallelDecode decode_parallel_gts(const GtsStream& stream, std::size_t vertex_count,
                                   const WaveConfig& config = {});
ParallelDecode decode_parallel_reuse(const GtsReuseStream& stream, std::size_t vertex_count,
                                     const WaveConfig& config = {});

}  // namespace mlt
