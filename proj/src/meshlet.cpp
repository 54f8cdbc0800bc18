#include "mlt/meshlet.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace mlt {

void MeshletLimits::validate() const {
  if (max_vertices < 1 || max_vertices > 256 || max_triangles < 1 || max_triangles > 256) {
    throw std::invalid_argument("meshlet limits must lie in [1, 256]");
  }
}

Meshlet localize(const TriangleMesh& mesh, std::vector<std::uint32_t> source_triangles,
                 int max_vertices) {
  Meshlet m;
  m.source_triangles = std::move(source_triangles);
  m.triangles.reserve(m.source_triangles.size());
  std::unordered_map<std::uint32_t, std::uint8_t> local;
  for (std::uint32_t t : m.source_triangles) {
    LocalTriangle lt{};
    for (int k = 0; k < 3; ++k) {
      std::uint32_t g = mesh.triangles().at(t).v[k];
      auto it = local.find(g);
      if (it == local.end()) {
        if (static_cast<int>(m.vertices.size()) >= max_vertices) {
          throw std::logic_error("meshlet references more than " + std::to_string(max_vertices) +
                                 " vertices");
        }
        it = local.emplace(g, static_cast<std::uint8_t>(m.vertices.size())).first;
        m.vertices.push_back(g);
      }
      lt[k] = it->second;
    }
    m.triangles.push_back(lt);
  }
  return m;
}

std::vector<Meshlet> partition(const TriangleMesh& mesh, const AdjacencyMap& adjacency,
                               const MeshletLimits& limits) {
  limits.validate();
  const auto& tris = mesh.triangles();
  const std::uint32_t T = static_cast<std::uint32_t>(tris.size());
  std::vector<bool> assigned(T, false);
  std::vector<std::int64_t> vertex_stamp(mesh.vertex_count(), -1);
  std::vector<std::int64_t> frontier_stamp(T, -1);
  std::vector<Meshlet> meshlets;
  std::uint32_t next_seed = 0;

  while (true) {
    while (next_seed < T && assigned[next_seed]) ++next_seed;
    if (next_seed == T) break;

    const auto id = static_cast<std::int64_t>(meshlets.size());
    std::vector<std::uint32_t> members;
    std::vector<std::uint32_t> frontier;
    int vertex_count = 0;

    auto new_vertices = [&](std::uint32_t t) {
      int n = 0;
      for (auto v : tris[t].v) n += vertex_stamp[v] != id;
      return n;
    };
    auto add = [&](std::uint32_t t) {
      assigned[t] = true;
      members.push_back(t);
      for (auto v : tris[t].v) {
        if (vertex_stamp[v] != id) {
          vertex_stamp[v] = id;
          ++vertex_count;
        }
      }
      for (int s = 0; s < 3; ++s) {
        const auto& n = adjacency.across(t, static_cast<EdgeSlot>(s));
        if (n && !assigned[n->triangle] && frontier_stamp[n->triangle] != id) {
          frontier_stamp[n->triangle] = id;
          frontier.push_back(n->triangle);
        }
      }
    };

    add(next_seed);
    while (static_cast<int>(members.size()) < limits.max_triangles) {
      std::erase_if(frontier, [&](std::uint32_t t) { return assigned[t]; });
      std::optional<std::uint32_t> best;
      int best_new = 4;
      for (std::uint32_t c : frontier) {
        int n = new_vertices(c);
        if (n < best_new || (n == best_new && c < *best)) {
          best = c;
          best_new = n;
        }
      }
      if (!best) {
        // Component exhausted: continue with the lowest unassigned triangle.
        while (next_seed < T && assigned[next_seed]) ++next_seed;
        if (next_seed == T) break;
        best = next_seed;
        best_new = new_vertices(next_seed);
      }
      if (vertex_count + best_new > limits.max_vertices) break;
      add(*best);
    }
    meshlets.push_back(localize(mesh, std::move(members), limits.max_vertices));
  }
  return meshlets;
}

std::vector<Meshlet> partition(const TriangleMesh& mesh, const MeshletLimits& limits) {
  return partition(mesh, build_adjacency(mesh), limits);
}

CullCone compute_cull_cone(const TriangleMesh& mesh, const Meshlet& meshlet) {
  std::vector<Vec3> normals;
  normals.reserve(meshlet.triangle_count());
  for (std::uint32_t t : meshlet.source_triangles) {
    try {
      normals.push_back(triangle_normal(mesh, t));
    } catch (const DegenerateTriangleError&) {
    }
  }
  CullCone cone;
  cone.half_angle = std::numbers::pi;
  if (normals.empty()) return cone;

  Vec3 sum{0.0, 0.0, 0.0};
  for (const auto& n : normals) {
    for (int k = 0; k < 3; ++k) sum[k] += n[k];
  }
  double len = length(sum);
  if (len <= 1e-9 * static_cast<double>(normals.size())) return cone;
  cone.axis = {sum[0] / len, sum[1] / len, sum[2] / len};
  double min_cos = 1.0;
  for (const auto& n : normals) min_cos = std::min(min_cos, dot(cone.axis, n));
  cone.half_angle = std::acos(std::clamp(min_cos, -1.0, 1.0));
  return cone;
}

bool cull_test(const CullCone& cone, const Vec3& view_dir) {
  constexpr double kMargin = 1e-6;
  if (cone.half_angle >= std::numbers::pi / 2) return false;
  double len = length(view_dir);
  if (!(len > 0.0)) return false;
  double c = dot(cone.axis, view_dir) / len;
  return c > std::sin(cone.half_angle) + kMargin;
}

double duplication_ratio(const std::vector<Meshlet>& meshlets, std::size_t mesh_vertex_count) {
  if (mesh_vertex_count == 0) return 0.0;
  std::size_t sum = 0;
  for (const auto& m : meshlets) sum += m.vertex_count();
  return static_cast<double>(sum) / static_cast<double>(mesh_vertex_count);
}

}  // namespace mlt
