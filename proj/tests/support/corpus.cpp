#include "corpus.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace mlt::corpus {

namespace {

Triangle tri(std::uint32_t a, std::uint32_t b, std::uint32_t c) { return Triangle{{a, b, c}}; }

std::vector<Triangle> grid_triangles(int nx, int ny) {
  std::vector<Triangle> t;
  const auto id = [nx](int i, int j) { return static_cast<std::uint32_t>(j * (nx + 1) + i); };
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      // Alternate the diagonal so vertex valences vary.
      if ((i + j) % 2 == 0) {
        t.push_back(tri(id(i, j), id(i + 1, j), id(i + 1, j + 1)));
        t.push_back(tri(id(i, j), id(i + 1, j + 1), id(i, j + 1)));
      } else {
        t.push_back(tri(id(i, j), id(i + 1, j), id(i, j + 1)));
        t.push_back(tri(id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)));
      }
    }
  }
  return t;
}

std::vector<Vec3> grid_positions(int nx, int ny) {
  std::vector<Vec3> p;
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      double x = i * 0.1, y = j * 0.1;
      p.push_back({x, y, 0.05 * std::sin(3 * x) * std::cos(2 * y)});
    }
  }
  return p;
}

// Drops unused vertices and renumbers the rest in first-use order.
TriangleMesh compact(const std::vector<Vec3>& positions, const std::vector<Triangle>& triangles) {
  std::vector<std::int64_t> remap(positions.size(), -1);
  std::vector<Vec3> kept;
  std::vector<Triangle> out;
  for (const auto& t : triangles) {
    Triangle r;
    for (int k = 0; k < 3; ++k) {
      auto& m = remap[t.v[k]];
      if (m < 0) {
        m = static_cast<std::int64_t>(kept.size());
        kept.push_back(positions[t.v[k]]);
      }
      r.v[k] = static_cast<std::uint32_t>(m);
    }
    out.push_back(r);
  }
  return TriangleMesh::from_positions(kept, std::move(out));
}

}  // namespace

TriangleMesh grid(int nx, int ny, bool texcoords) {
  auto positions = grid_positions(nx, ny);
  auto triangles = grid_triangles(nx, ny);
  if (!texcoords) return TriangleMesh::from_positions(positions, std::move(triangles));
  auto normals = with_normals(TriangleMesh::from_positions(positions, triangles));
  std::vector<double> attrs;
  for (std::size_t v = 0; v < positions.size(); ++v) {
    auto a = normals.vertex(v);
    attrs.insert(attrs.end(), a.begin(), a.end());
    attrs.push_back(static_cast<double>(v % (nx + 1)) / nx);
    attrs.push_back(static_cast<double>(v / (nx + 1)) / ny);
  }
  return TriangleMesh(AttributeLayout::position_normal_texcoord(), std::move(attrs), std::move(triangles));
}

TriangleMesh uv_sphere(int rings, int segments) {
  std::vector<Vec3> p;
  std::vector<Triangle> t;
  const double pi = std::numbers::pi;
  p.push_back({0, 0, 1});
  for (int i = 1; i < rings; ++i) {
    double th = pi * i / rings;
    for (int j = 0; j < segments; ++j) {
      double ph = 2 * pi * j / segments;
      p.push_back({std::sin(th) * std::cos(ph), std::sin(th) * std::sin(ph), std::cos(th)});
    }
  }
  p.push_back({0, 0, -1});
  const auto ring = [segments](int i, int j) {
    return static_cast<std::uint32_t>(1 + (i - 1) * segments + (j % segments));
  };
  const auto south = static_cast<std::uint32_t>(p.size() - 1);
  for (int j = 0; j < segments; ++j) t.push_back(tri(0, ring(1, j), ring(1, j + 1)));
  for (int i = 1; i + 1 < rings; ++i) {
    for (int j = 0; j < segments; ++j) {
      t.push_back(tri(ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)));
      t.push_back(tri(ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)));
    }
  }
  for (int j = 0; j < segments; ++j) t.push_back(tri(south, ring(rings - 1, j + 1), ring(rings - 1, j)));
  return TriangleMesh::from_positions(p, std::move(t));
}

TriangleMesh torus(int major_segments, int minor_segments) {
  std::vector<Vec3> p;
  std::vector<Triangle> t;
  const double pi = std::numbers::pi;
  for (int i = 0; i < major_segments; ++i) {
    double u = 2 * pi * i / major_segments;
    for (int j = 0; j < minor_segments; ++j) {
      double v = 2 * pi * j / minor_segments;
      double r = 1.0 + 0.35 * std::cos(v);
      p.push_back({r * std::cos(u), r * std::sin(u), 0.35 * std::sin(v)});
    }
  }
  const auto id = [&](int i, int j) {
    return static_cast<std::uint32_t>((i % major_segments) * minor_segments + (j % minor_segments));
  };
  for (int i = 0; i < major_segments; ++i) {
    for (int j = 0; j < minor_segments; ++j) {
      t.push_back(tri(id(i, j), id(i + 1, j), id(i + 1, j + 1)));
      t.push_back(tri(id(i, j), id(i + 1, j + 1), id(i, j + 1)));
    }
  }
  return TriangleMesh::from_positions(p, std::move(t));
}

TriangleMesh band(int segments) {
  std::vector<Vec3> p;
  std::vector<Triangle> t;
  for (int j = 0; j < segments; ++j) {
    double a = 2 * std::numbers::pi * j / segments;
    p.push_back({std::cos(a), std::sin(a), 0.0});
    p.push_back({std::cos(a), std::sin(a), 1.0});
  }
  const auto n = static_cast<std::uint32_t>(2 * segments);
  for (std::uint32_t j = 0; j < n; j += 2) {
    t.push_back(tri(j, (j + 2) % n, j + 1));
    t.push_back(tri(j + 1, (j + 2) % n, (j + 3) % n));
  }
  return TriangleMesh::from_positions(p, std::move(t));
}

TriangleMesh fan(int segments) {
  std::vector<Vec3> p{{0, 0, 0.2}};
  std::vector<Triangle> t;
  for (int j = 0; j < segments; ++j) {
    double a = 2 * std::numbers::pi * j / segments;
    p.push_back({std::cos(a), std::sin(a), 0.0});
  }
  for (int j = 0; j < segments; ++j) {
    t.push_back(tri(0, static_cast<std::uint32_t>(1 + j), static_cast<std::uint32_t>(1 + (j + 1) % segments)));
  }
  return TriangleMesh::from_positions(p, std::move(t));
}

TriangleMesh random_patch(Rng& rng, int triangles) {
  const int side = std::max(2, static_cast<int>(std::ceil(std::sqrt(triangles))) + 1);
  auto positions = grid_positions(side, side);
  std::uniform_real_distribution<double> jitter(-0.03, 0.03);
  for (auto& p : positions) {
    for (auto& c : p) c += jitter(rng);
  }
  auto all = grid_triangles(side, side);
  auto full = TriangleMesh::from_positions(positions, all);
  auto adjacency = build_adjacency(full);

  std::uniform_int_distribution<std::size_t> pick(0, all.size() - 1);
  std::vector<bool> taken(all.size(), false);
  std::vector<std::uint32_t> frontier{static_cast<std::uint32_t>(pick(rng))};
  std::vector<Triangle> chosen;
  while (!frontier.empty() && static_cast<int>(chosen.size()) < triangles) {
    std::uniform_int_distribution<std::size_t> at(0, frontier.size() - 1);
    std::size_t k = at(rng);
    std::uint32_t t = frontier[k];
    frontier.erase(frontier.begin() + static_cast<std::ptrdiff_t>(k));
    if (taken[t]) continue;
    taken[t] = true;
    chosen.push_back(all[t]);
    for (int s = 0; s < 3; ++s) {
      if (const auto& n = adjacency.across(t, static_cast<EdgeSlot>(s)); n && !taken[n->triangle]) {
        frontier.push_back(n->triangle);
      }
    }
  }
  return compact(positions, chosen);
}

TriangleMesh nonmanifold_fuzz(Rng& rng, int size) {
  auto positions = grid_positions(size, size);
  auto triangles = grid_triangles(size, size);
  std::uniform_int_distribution<std::size_t> pick(0, triangles.size() - 1);
  std::uniform_real_distribution<double> coord(-0.2, 1.2);
  const std::size_t base = triangles.size();
  for (int k = 0; k < size; ++k) {
    const Triangle t = triangles[pick(rng) % base];
    // Fin: a third triangle on an existing edge.
    positions.push_back({coord(rng), coord(rng), 0.3 + coord(rng)});
    triangles.push_back(tri(t.v[0], t.v[1], static_cast<std::uint32_t>(positions.size() - 1)));
    // Flipped copy of a triangle, and an exact duplicate of another.
    const Triangle f = triangles[pick(rng) % base];
    triangles.push_back(tri(f.v[0], f.v[2], f.v[1]));
    triangles.push_back(triangles[pick(rng) % base]);
    // Stray triangle.
    for (int c = 0; c < 3; ++c) positions.push_back({coord(rng), coord(rng), coord(rng)});
    auto n = static_cast<std::uint32_t>(positions.size());
    triangles.push_back(tri(n - 3, n - 2, n - 1));
  }
  std::shuffle(triangles.begin(), triangles.end(), rng);
  return compact(positions, triangles);
}

TriangleMesh with_normals(const TriangleMesh& mesh) {
  if (mesh.layout().offset_of(Semantic::kNormal)) return mesh;
  return parse_obj(format_obj(mesh));
}

std::vector<Named> standard_set(Rng& rng, int scale) {
  std::vector<Named> set;
  set.push_back({"grid", with_normals(grid(12 * scale, 9 * scale))});
  set.push_back({"grid_uv", grid(10 * scale, 10 * scale, true)});
  set.push_back({"sphere", with_normals(uv_sphere(10 * scale, 16 * scale))});
  set.push_back({"torus", with_normals(torus(24 * scale, 10 * scale))});
  set.push_back({"fan", with_normals(fan(70))});
  set.push_back({"patch", with_normals(random_patch(rng, 150 * scale))});
  set.push_back({"fuzz", with_normals(nonmanifold_fuzz(rng, 8 * scale))});
  return set;
}

}  // namespace mlt::corpus
