#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mlt/core_mesh.hpp"

namespace mlt {

struct MeshletLimits {
  int max_vertices = 128;
  int max_triangles = 256;

  // Throws std::invalid_argument unless both limits are in [1, 256].
  void validate() const;
};

using LocalTriangle = std::array<std::uint8_t, 3>;

struct Meshlet {
  std::vector<std::uint32_t> vertices;      // local -> global vertex id
  std::vector<LocalTriangle> triangles;     // 8-bit local indices
  std::vector<std::uint32_t> source_triangles;  // global triangle ids, parallel to `triangles`

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t triangle_count() const { return triangles.size(); }
};

struct CullCone {
  Vec3 axis{0.0, 0.0, 1.0};
  double half_angle = 0.0;  // radians; pi means the meshlet is never culled
};

// Greedy adjacency-grown partition. Every returned meshlet is localized.
std::vector<Meshlet> partition(const TriangleMesh& mesh, const AdjacencyMap& adjacency,
                               const MeshletLimits& limits);
std::vector<Meshlet> partition(const TriangleMesh& mesh, const MeshletLimits& limits);

// Builds the local vertex table from `source_triangles`, first use first.
// Throws std::logic_error if the table would exceed `max_vertices`.
Meshlet localize(const TriangleMesh& mesh, std::vector<std::uint32_t> source_triangles,
                 int max_vertices = 256);

CullCone compute_cull_cone(const TriangleMesh& mesh, const Meshlet& meshlet);

// True only when every triangle inside the cone faces away from `view_dir`
// (camera-to-meshlet direction), i.e. dot(normal, view_dir) > 0.
bool cull_test(const CullCone& cone, const Vec3& view_dir);

// (sum of local vertex counts) / mesh vertex count.
double duplication_ratio(const std::vector<Meshlet>& meshlets, std::size_t mesh_vertex_count);

}  // namespace mlt
