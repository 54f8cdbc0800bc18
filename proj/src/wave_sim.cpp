#include "mlt/wave_sim.hpp"

#include <algorithm>
#include <bit>
#include <stdexcept>
#include <string>

namespace mlt {

void WaveConfig::validate() const {
  if (wave_size != 32 && wave_size != 64) throw std::invalid_argument("wave size must be 32 or 64");
}

std::optional<int> firstbithigh(std::uint32_t word) {
  if (word == 0) return std::nullopt;
  return 31 - std::countl_zero(word);
}

int countbits(std::uint32_t word) { return std::popcount(word); }

namespace {

// 32 flag bits with bit `top` of the packed stream at the MSB, followed by
// lower bit positions; positions below zero read as zero.
std::uint32_t window_at(std::span<const std::uint32_t> words, std::uint32_t top) {
  std::uint32_t hi = top / 32;
  std::uint32_t off = top % 32;
  std::uint32_t w = words[hi] << (31 - off);
  if (off < 31 && hi > 0) w |= words[hi - 1] >> (off + 1);
  return w;
}

}  // namespace

Lookback parallel_index_lookback(std::span<const std::uint32_t> flag_words, std::uint32_t t) {
  if (t == 0) throw std::invalid_argument("triangle 0 has no flag");
  Lookback result;
  const bool current = test_flag(flag_words, t);
  std::int64_t top = static_cast<std::int64_t>(t) - 1;
  while (true) {
    std::uint32_t window = window_at(flag_words, static_cast<std::uint32_t>(top));
    // Search for the first bit that differs from the current flag.
    if (current) window = ~window;
    if (top < 31) window &= ~((1u << (31 - top)) - 1u);
    if (auto bit = firstbithigh(window)) {
      std::int64_t position = top - (31 - *bit);
      result.source = static_cast<std::uint32_t>(position + 1);
      return result;
    }
    if (top < 32) return result;
    top -= 32;
    ++result.fallback_iterations;
  }
}

namespace {

// One simulated lane per triangle. `index_at(k)` yields the k-th strip index
// (0, 1, 2 for the implicit first triangle, then one per triangle).
template <typename IndexAt>
ParallelDecode decode_lanes(std::uint32_t triangle_count, std::span<const std::uint32_t> flag_words,
                            std::size_t vertex_count, const WaveConfig& config,
                            IndexAt&& index_at) {
  config.validate();
  if (triangle_count == 0) return {};
  if (vertex_count < 3) throw DecodeError("stream needs at least three vertices");
  if (flag_words.size() < flag_word_count(triangle_count)) throw DecodeError("flag words truncated");

  ParallelDecode out;
  out.triangles.resize(triangle_count);
  out.trace.lookback.assign(triangle_count, 0);
  const std::uint32_t waves = (triangle_count + config.wave_size - 1) / config.wave_size;
  for (std::uint32_t wave = 0; wave < waves; ++wave) {
    for (int lane = 0; lane < config.wave_size; ++lane) {
      const std::uint32_t t = wave * config.wave_size + static_cast<std::uint32_t>(lane);
      if (t >= triangle_count) break;
      if (t == 0) {
        out.triangles[0] = {{0, 1, 2}, false};
        continue;
      }
      auto fetch = [&](std::uint32_t k) {
        std::size_t v = index_at(k);
        if (v >= vertex_count) {
          throw DecodeError("triangle " + std::to_string(t) + " references vertex " +
                            std::to_string(v));
        }
        return static_cast<std::uint8_t>(v);
      };
      const bool right = test_flag(flag_words, t);
      const Lookback look = parallel_index_lookback(flag_words, t);
      std::uint8_t carried = look.source ? fetch(*look.source + 1) : (right ? 1 : 0);
      std::uint8_t previous = fetch(t + 1);
      std::uint8_t fresh = fetch(t + 2);
      LocalTriangle tri = right ? LocalTriangle{previous, carried, fresh}
                                : LocalTriangle{carried, previous, fresh};
      bool degenerate = tri[0] == tri[1] || tri[1] == tri[2] || tri[2] == tri[0];
      out.triangles[t] = {tri, degenerate};

      std::uint32_t distance = look.source ? t - *look.source : t;
      out.trace.lookback[t] = distance;
      out.trace.max_lookback = std::max(out.trace.max_lookback, distance);
      out.trace.fallback_iterations += look.fallback_iterations;
    }
  }
  return out;
}

}  // namespace

ParallelDecode decode_parallel_gts(const GtsStream& stream, std::size_t vertex_count,
                                   const WaveConfig& config) {
  if (stream.triangle_count > 0 && stream.indices.size() != stream.triangle_count - 1) {
    throw DecodeError("index count does not match triangle count");
  }
  return decode_lanes(stream.triangle_count, stream.flag_words, vertex_count, config,
                      [&](std::uint32_t k) -> std::size_t {
                        return k < 3 ? k : stream.indices[k - 3];
                      });
}

ParallelDecode decode_parallel_reuse(const GtsReuseStream& stream, std::size_t vertex_count,
                                     const WaveConfig& config) {
  if (stream.increment_words.size() < flag_word_count(stream.triangle_count)) {
    throw DecodeError("increment words truncated");
  }
  std::uint32_t max_words = 0;
  auto index_at = [&](std::uint32_t k) -> std::size_t {
    if (k < 3) return k;
    const std::uint32_t t = k - 2;
    // Inclusive count of increment flags over triangles 1..t, one countbits
    // per word with the last word masked.
    const std::uint32_t bits = t;
    std::uint32_t ones = 0;
    std::uint32_t words = 0;
    for (std::uint32_t w = 0; w * 32 < bits; ++w, ++words) {
      std::uint32_t word = stream.increment_words[w];
      std::uint32_t remaining = bits - w * 32;
      if (remaining < 32) word &= (1u << remaining) - 1u;
      ones += static_cast<std::uint32_t>(countbits(word));
    }
    max_words = std::max(max_words, words);
    if (test_flag(stream.increment_words, t)) return 2 + ones;
    std::size_t position = (t - ones) - 1;
    if (position >= stream.reuse.size()) {
      throw DecodeError("reuse position " + std::to_string(position) + " out of range");
    }
    return stream.reuse[position];
  };
  auto out = decode_lanes(stream.triangle_count, stream.flag_words, vertex_count, config, index_at);
  out.trace.max_countbits_words = max_words;
  return out;
}

}  // namespace mlt
