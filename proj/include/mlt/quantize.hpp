#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mlt/core_mesh.hpp"
#include "mlt/meshlet.hpp"

namespace mlt {

struct ChannelGrid {
  double minimum = 0.0;       // g: global minimum of the channel
  double spacing = 1.0;       // delta: grid step
  double meshlet_extent = 0.0;  // w: widest extent inside one meshlet
  double global_extent = 0.0;   // W: extent over the whole mesh
  int guard_steps = 0;          // times the spacing was widened to fit b bits
};

// Global anisotropic grid shared by all meshlets so that duplicated boundary
// vertices land on the same grid point in every meshlet.
struct QuantizationGrid {
  int bits = 16;
  std::vector<ChannelGrid> channels;

  std::uint64_t max_code() const { return (std::uint64_t{1} << bits) - 1; }
};

struct QuantizedMeshlet {
  std::vector<std::int64_t> lowest;   // L_i per channel, in grid units
  std::vector<std::uint32_t> codes;   // vertex-major, one per vertex and channel
  std::size_t channel_count = 0;

  std::size_t vertex_count() const { return channel_count == 0 ? 0 : codes.size() / channel_count; }
  bool operator==(const QuantizedMeshlet&) const = default;
};

// Round half away from zero, applied to (value - g) / delta.
std::int64_t grid_code(const ChannelGrid& c, double value);
double grid_value(const ChannelGrid& c, std::int64_t code);

// Throws std::invalid_argument for an empty meshlet set or bits outside [1, 32].
QuantizationGrid build_grid(const TriangleMesh& mesh, const std::vector<Meshlet>& meshlets,
                            int bits = 16);

// Throws std::logic_error if a local code does not fit in the grid's bits.
QuantizedMeshlet quantize_meshlet(const QuantizationGrid& grid, const TriangleMesh& mesh,
                                  const Meshlet& meshlet);

// Vertex-major reconstructed attributes: g + (L + code) * delta.
std::vector<double> dequantize(const QuantizationGrid& grid, const QuantizedMeshlet& q);

// log2(W / delta) per channel; zero for constant channels.
std::vector<double> info_content(const QuantizationGrid& grid);

}  // namespace mlt
