#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mlt {

using Vec3 = std::array<double, 3>;

enum class Semantic { kPosition, kNormal, kTexcoord, kOther };

struct ChannelDesc {
  std::string name;
  int components = 0;
  Semantic semantic = Semantic::kOther;
  bool operator==(const ChannelDesc&) const = default;
};

// Describes how a vertex's attribute vector is laid out. Channels are stored
// back to back; position always comes first.
class AttributeLayout {
 public:
  AttributeLayout() = default;
  explicit AttributeLayout(std::vector<ChannelDesc> channels);

  static AttributeLayout positions_only();
  static AttributeLayout position_normal();
  static AttributeLayout position_normal_texcoord();

  const std::vector<ChannelDesc>& channels() const { return channels_; }
  // Total scalar channel count n.
  int width() const { return width_; }
  // Offset of the first scalar of the named semantic, if present.
  std::optional<int> offset_of(Semantic semantic) const;

  bool operator==(const AttributeLayout&) const = default;

 private:
  std::vector<ChannelDesc> channels_;
  int width_ = 0;
};

struct Triangle {
  std::array<std::uint32_t, 3> v{};
  bool operator==(const Triangle&) const = default;
};

// Indexed triangle mesh with vertex-major attribute storage.
class TriangleMesh {
 public:
  TriangleMesh() = default;
  // Throws std::invalid_argument if an index is out of range, a triangle
  // repeats a vertex, or the attribute buffer size does not match.
  TriangleMesh(AttributeLayout layout, std::vector<double> attributes,
               std::vector<Triangle> triangles);

  // Positions-only convenience constructor.
  static TriangleMesh from_positions(std::span<const Vec3> positions,
                                     std::vector<Triangle> triangles);

  const AttributeLayout& layout() const { return layout_; }
  std::size_t vertex_count() const { return vertex_count_; }
  std::size_t triangle_count() const { return triangles_.size(); }
  const std::vector<Triangle>& triangles() const { return triangles_; }
  const std::vector<double>& attributes() const { return attributes_; }

  std::span<const double> vertex(std::size_t v) const {
    return {attributes_.data() + v * layout_.width(),
            static_cast<std::size_t>(layout_.width())};
  }
  Vec3 position(std::size_t v) const {
    auto a = vertex(v);
    return {a[0], a[1], a[2]};
  }

 private:
  AttributeLayout layout_;
  std::size_t vertex_count_ = 0;
  std::vector<double> attributes_;
  std::vector<Triangle> triangles_;
};

class ObjParseError : public std::runtime_error {
 public:
  ObjParseError(std::size_t line, const std::string& what);
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

struct ObjOptions {
  // When the file carries no complete set of normals, compute area-weighted
  // vertex normals and add a normal channel.
  bool compute_missing_normals = true;
};

TriangleMesh load_obj(const std::filesystem::path& path, ObjOptions options = {});
TriangleMesh parse_obj(std::string_view text, ObjOptions options = {});
// Writes v/vn/vt records with round-trip precision and one face per triangle.
void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path);
std::string format_obj(const TriangleMesh& mesh);

// Edge slot k of a triangle is the edge from corner k to corner (k+1)%3.
enum class EdgeSlot : std::uint8_t { kEdge01 = 0, kEdge12 = 1, kEdge20 = 2 };

struct Neighbor {
  std::uint32_t triangle = 0;
  EdgeSlot slot = EdgeSlot::kEdge01;  // slot on the neighbor's side
};

class AdjacencyMap {
 public:
  explicit AdjacencyMap(std::size_t triangle_count) : entries_(triangle_count) {}

  // Neighbor across edge `slot` of triangle `t`.
  const std::optional<Neighbor>& across(std::uint32_t t, EdgeSlot slot) const {
    return entries_[t][static_cast<int>(slot)];
  }
  void set(std::uint32_t t, EdgeSlot slot, Neighbor n) {
    entries_[t][static_cast<int>(slot)] = n;
  }
  std::size_t triangle_count() const { return entries_.size(); }
  int neighbor_count(std::uint32_t t) const;
  std::size_t record_count() const;

 private:
  std::vector<std::array<std::optional<Neighbor>, 3>> entries_;
};

// Two triangles are adjacent across an edge iff exactly two triangles use the
// edge and they traverse it in opposite directions.
AdjacencyMap build_adjacency(const TriangleMesh& mesh);

class DegenerateTriangleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

Vec3 triangle_normal(const TriangleMesh& mesh, std::uint32_t t);
Vec3 triangle_normal(const Vec3& a, const Vec3& b, const Vec3& c);

inline Vec3 sub(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
inline double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double length(const Vec3& a);

}  // namespace mlt
