#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <vector>

#include "mlt/quantize.hpp"
#include "mlt/strip_codec.hpp"

namespace mlt {

enum class Codec : std::uint32_t { kBasic = 0, kGts = 1, kGtsReuse = 2 };
const char* to_string(Codec c);

inline constexpr std::uint32_t kContainerVersion = 1;
inline constexpr std::size_t kMetaRecordBytes = 28;  // 3 x u32 offsets + 4 x f32 cull cone

struct ContainerMeshlet {
  std::array<float, 3> cone_axis{0.0f, 0.0f, 1.0f};
  float cone_half_angle = 0.0f;
  std::uint32_t triangle_count = 0;  // T for basic, T' for the strip codecs
  std::vector<std::uint32_t> flag_words;
  std::vector<std::uint32_t> increment_words;  // reuse codec only
  // basic: 3 per triangle; gts: one per triangle >= 1; reuse: the reuse buffer
  std::vector<std::uint8_t> indices;
  QuantizedMeshlet attributes;

  std::size_t vertex_count() const { return attributes.vertex_count(); }
  bool operator==(const ContainerMeshlet&) const = default;
};

struct MeshletContainer {
  Codec codec = Codec::kGtsReuse;
  int bits = 16;
  std::uint32_t source_vertex_count = 0;
  std::uint32_t source_triangle_count = 0;
  std::vector<double> channel_minimum;
  std::vector<double> channel_spacing;
  std::vector<ContainerMeshlet> meshlets;

  std::size_t channel_count() const { return channel_minimum.size(); }
  // Grid with only minimum and spacing populated.
  QuantizationGrid grid() const;
  bool operator==(const MeshletContainer&) const = default;
};

GtsStream gts_stream(const ContainerMeshlet& m);
GtsReuseStream reuse_stream(const ContainerMeshlet& m);
// Local triangles of a basic-codec meshlet.
std::vector<LocalTriangle> basic_triangles(const ContainerMeshlet& m);

class ContainerError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Bytes per stored attribute code: 1, 2 or 4.
std::size_t code_bytes(int bits);

std::vector<std::uint8_t> serialize(const MeshletContainer& c);
// Throws ContainerError on bad magic, unknown version, truncation, or
// offsets that do not describe a consistent meshlet.
MeshletContainer deserialize(std::span<const std::uint8_t> bytes);
void write_container(const MeshletContainer& c, const std::filesystem::path& path);
MeshletContainer read_container(const std::filesystem::path& path);

struct SizeReport {
  std::uint64_t header_bytes = 0;
  std::uint64_t meta_bytes = 0;
  std::uint64_t flag_bytes = 0;
  std::uint64_t index_bytes = 0;
  std::uint64_t attribute_bytes = 0;
  std::uint64_t total_bytes = 0;
  std::uint64_t stored_vertices = 0;

  double index_bpt = 0.0;         // flag and index sections per source triangle
  double meta_bytes_per_meshlet = 0.0;
  double vertex_bpv = 0.0;        // attribute section per stored vertex
  double vertex_pipeline_bpt = 96.0;
  double basic_meshlet_bpt = 24.0;
  // Uncompressed float vertex buffers for comparison.
  std::uint64_t vertex_pipeline_vertex_bytes = 0;
  std::uint64_t float_meshlet_vertex_bytes = 0;
};

SizeReport size_report(const MeshletContainer& c, std::size_t source_triangles,
                       std::size_t source_vertices);
SizeReport size_report(const MeshletContainer& c);

}  // namespace mlt
