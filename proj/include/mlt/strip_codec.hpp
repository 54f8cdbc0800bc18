#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "mlt/meshlet.hpp"
#include "mlt/stripify.hpp"

namespace mlt {

// Which edge of the previous triangle (a,b,c) the next triangle crosses.
// Right continues across (b,c) and decodes as (c,b,w); left continues across
// (c,a) and decodes as (a,c,w).
enum class StripFlag : std::uint8_t { kLeft = 0, kRight = 1 };

inline constexpr std::size_t kMaxStripTriangles = 256;

struct StripStep {
  StripFlag flag;
  std::uint8_t index;
};

// The triangle stream before bit packing: the first triangle's three indices
// followed by one step per further triangle (restarts included).
struct StripProgram {
  LocalTriangle first{};
  std::vector<StripStep> steps;
  std::size_t triangle_count() const { return steps.size() + 1; }
};

struct GtsStream {
  std::uint32_t triangle_count = 0;         // T', degenerates included
  std::vector<std::uint32_t> flag_words;    // bit k of word w: triangle 1 + 32w + k
  std::vector<std::uint8_t> indices;        // one per triangle >= 1
};

struct GtsReuseStream {
  std::uint32_t triangle_count = 0;
  std::vector<std::uint32_t> flag_words;
  std::vector<std::uint32_t> increment_words;  // 1 = next ascending index
  std::vector<std::uint8_t> reuse;
};

struct DecodedTriangle {
  LocalTriangle v{};
  bool degenerate = false;
  bool operator==(const DecodedTriangle&) const = default;
};
using DecodedTriangleList = std::vector<DecodedTriangle>;

class StripOverflowError : public std::runtime_error {
 public:
  StripOverflowError(std::size_t needed, std::size_t limit);
  std::size_t needed() const { return needed_; }

 private:
  std::size_t needed_;
};

class DecodeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Lays out the strips of `paths` as one stream. Throws std::logic_error if a
// path step does not cross a shared edge with matching orientation.
StripProgram plan_strip(const Meshlet& meshlet, const std::vector<StripPath>& paths);

// The five steps that move from decoded triangle `current` to the first
// triangle `next` = (p,q,r) of the following strip through four degenerates.
std::array<StripStep, 5> emit_restart(const LocalTriangle& current, const LocalTriangle& next);

struct ReorderResult {
  Meshlet meshlet;
  std::vector<std::uint8_t> old_to_new;
  // New local ids introduced while emitting each path, in stream order.
  std::vector<std::vector<std::uint8_t>> introduced;
};

// Relabels local vertices so the stream introduces them as 0,1,2,...,V-1.
ReorderResult reorder_ascending(const Meshlet& meshlet, const std::vector<StripPath>& paths);

std::size_t flag_word_count(std::uint32_t triangle_count);
bool test_flag(std::span<const std::uint32_t> words, std::uint32_t t);

// Both encoders expect a meshlet already in ascending order (see
// reorder_ascending) and throw StripOverflowError past `max_triangles`.
GtsStream encode_gts(const Meshlet& meshlet, const std::vector<StripPath>& paths,
                     std::size_t max_triangles = kMaxStripTriangles);
GtsReuseStream encode_gts_reuse(const Meshlet& meshlet, const std::vector<StripPath>& paths,
                                std::size_t max_triangles = kMaxStripTriangles);

DecodedTriangleList decode_sequential(const GtsStream& stream, std::size_t vertex_count);
DecodedTriangleList decode_sequential(const GtsReuseStream& stream, std::size_t vertex_count);

std::uint64_t stream_size_bits(const GtsStream& stream);
std::uint64_t stream_size_bits(const GtsReuseStream& stream);
// Bits per original triangle; restarts are charged to the real triangles.
double bits_per_triangle(std::uint64_t bits, std::size_t original_triangles);

// Rotation that starts at the smallest index; equal for cyclically equal triples.
LocalTriangle canonical_rotation(const LocalTriangle& t);
// True when the non-degenerate decoded triangles equal `triangles` as a
// multiset of oriented triples up to rotation.
bool same_triangles(const DecodedTriangleList& decoded, const std::vector<LocalTriangle>& triangles);

}  // namespace mlt
