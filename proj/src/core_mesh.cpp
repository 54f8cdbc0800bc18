#include "mlt/core_mesh.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>

namespace mlt {

AttributeLayout::AttributeLayout(std::vector<ChannelDesc> channels)
    : channels_(std::move(channels)) {
  if (channels_.empty() || channels_[0].semantic != Semantic::kPosition ||
      channels_[0].components != 3) {
    throw std::invalid_argument("layout must start with a 3-component position channel");
  }
  for (std::size_t i = 0; i < channels_.size(); ++i) {
    if (channels_[i].components <= 0) {
      throw std::invalid_argument("channel '" + channels_[i].name + "' has no components");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (channels_[i].name == channels_[j].name) {
        throw std::invalid_argument("duplicate channel name '" + channels_[i].name + "'");
      }
    }
    width_ += channels_[i].components;
  }
}

AttributeLayout AttributeLayout::positions_only() {
  return AttributeLayout({{"position", 3, Semantic::kPosition}});
}

AttributeLayout AttributeLayout::position_normal() {
  return AttributeLayout({{"position", 3, Semantic::kPosition}, {"normal", 3, Semantic::kNormal}});
}

AttributeLayout AttributeLayout::position_normal_texcoord() {
  return AttributeLayout({{"position", 3, Semantic::kPosition},
                          {"normal", 3, Semantic::kNormal},
                          {"texcoord", 2, Semantic::kTexcoord}});
}

std::optional<int> AttributeLayout::offset_of(Semantic semantic) const {
  int offset = 0;
  for (const auto& c : channels_) {
    if (c.semantic == semantic) return offset;
    offset += c.components;
  }
  return std::nullopt;
}

TriangleMesh::TriangleMesh(AttributeLayout layout, std::vector<double> attributes,
                           std::vector<Triangle> triangles)
    : layout_(std::move(layout)),
      attributes_(std::move(attributes)),
      triangles_(std::move(triangles)) {
  if (layout_.width() < 3) throw std::invalid_argument("layout has no position channel");
  if (attributes_.size() % layout_.width() != 0) {
    throw std::invalid_argument("attribute buffer is not a whole number of vertices");
  }
  vertex_count_ = attributes_.size() / layout_.width();
  for (std::size_t t = 0; t < triangles_.size(); ++t) {
    const auto& v = triangles_[t].v;
    for (auto i : v) {
      if (i >= vertex_count_) {
        throw std::invalid_argument("triangle " + std::to_string(t) + " index out of range");
      }
    }
    if (v[0] == v[1] || v[1] == v[2] || v[2] == v[0]) {
      throw std::invalid_argument("triangle " + std::to_string(t) + " repeats a vertex");
    }
  }
}

TriangleMesh TriangleMesh::from_positions(std::span<const Vec3> positions,
                                          std::vector<Triangle> triangles) {
  std::vector<double> attributes;
  attributes.reserve(positions.size() * 3);
  for (const auto& p : positions) attributes.insert(attributes.end(), p.begin(), p.end());
  return TriangleMesh(AttributeLayout::positions_only(), std::move(attributes),
                      std::move(triangles));
}

ObjParseError::ObjParseError(std::size_t line, const std::string& what)
    : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}

namespace {

struct Corner {
  std::uint32_t position = 0;
  std::optional<std::uint32_t> texcoord;
  std::optional<std::uint32_t> normal;
};

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

double parse_real(std::string_view s, std::size_t line) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ObjParseError(line, "malformed number '" + std::string(s) + "'");
  }
  return value;
}

std::uint32_t parse_index(std::string_view s, std::size_t count, std::size_t line) {
  long long value = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ObjParseError(line, "malformed index '" + std::string(s) + "'");
  }
  if (value < 0) throw ObjParseError(line, "negative indices are not supported");
  if (value == 0) throw ObjParseError(line, "index 0 is invalid (indices are 1-based)");
  if (static_cast<std::size_t>(value) > count) {
    throw ObjParseError(line, "index " + std::to_string(value) + " out of range");
  }
  return static_cast<std::uint32_t>(value - 1);
}

Corner parse_corner(std::string_view token, std::size_t nv, std::size_t nvt, std::size_t nvn,
                    std::size_t line) {
  Corner c;
  std::array<std::string_view, 3> parts;
  int count = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= token.size(); ++i) {
    if (i == token.size() || token[i] == '/') {
      if (count == 3) throw ObjParseError(line, "malformed face corner '" + std::string(token) + "'");
      parts[count++] = token.substr(start, i - start);
      start = i + 1;
    }
  }
  if (parts[0].empty()) throw ObjParseError(line, "face corner without position index");
  c.position = parse_index(parts[0], nv, line);
  if (count > 1 && !parts[1].empty()) c.texcoord = parse_index(parts[1], nvt, line);
  if (count > 2 && !parts[2].empty()) c.normal = parse_index(parts[2], nvn, line);
  return c;
}

std::uint64_t bits_of(double d) { return std::bit_cast<std::uint64_t>(d); }

struct KeyHash {
  std::size_t operator()(const std::vector<std::uint64_t>& key) const {
    std::uint64_t h = 1469598103934665603ull;
    for (auto k : key) {
      h ^= k + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace

TriangleMesh parse_obj(std::string_view text, ObjOptions options) {
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
  std::vector<std::array<double, 2>> texcoords;
  std::vector<std::array<Corner, 3>> faces;

  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    auto tok = split_ws(line);
    if (tok.empty()) continue;

    if (tok[0] == "v") {
      if (tok.size() < 4 || tok.size() > 5) throw ObjParseError(line_no, "v expects 3 coordinates");
      positions.push_back({parse_real(tok[1], line_no), parse_real(tok[2], line_no),
                           parse_real(tok[3], line_no)});
    } else if (tok[0] == "vn") {
      if (tok.size() != 4) throw ObjParseError(line_no, "vn expects 3 components");
      normals.push_back({parse_real(tok[1], line_no), parse_real(tok[2], line_no),
                         parse_real(tok[3], line_no)});
    } else if (tok[0] == "vt") {
      if (tok.size() < 3 || tok.size() > 4) throw ObjParseError(line_no, "vt expects 2 components");
      texcoords.push_back({parse_real(tok[1], line_no), parse_real(tok[2], line_no)});
    } else if (tok[0] == "f") {
      if (tok.size() < 4) throw ObjParseError(line_no, "face needs at least 3 corners");
      std::vector<Corner> corners;
      for (std::size_t i = 1; i < tok.size(); ++i) {
        corners.push_back(
            parse_corner(tok[i], positions.size(), texcoords.size(), normals.size(), line_no));
      }
      for (std::size_t i = 1; i + 1 < corners.size(); ++i) {
        faces.push_back({corners[0], corners[i], corners[i + 1]});
      }
    }
    // Other records (o, g, s, usemtl, mtllib, l, p, ...) carry nothing we need.
    if (end == text.size()) break;
  }

  bool all_normals = !faces.empty();
  bool all_texcoords = !faces.empty();
  for (const auto& f : faces) {
    for (const auto& c : f) {
      all_normals = all_normals && c.normal.has_value();
      all_texcoords = all_texcoords && c.texcoord.has_value();
    }
  }
  const bool computed_normals = !all_normals && options.compute_missing_normals;
  const bool has_normals = all_normals || computed_normals;

  std::vector<ChannelDesc> channels{{"position", 3, Semantic::kPosition}};
  if (has_normals) channels.push_back({"normal", 3, Semantic::kNormal});
  if (all_texcoords) channels.push_back({"texcoord", 2, Semantic::kTexcoord});
  AttributeLayout layout(std::move(channels));

  // Computed normals are accumulated per distinct position value so that
  // texcoord seams do not split the shading normal.
  std::unordered_map<std::vector<std::uint64_t>, Vec3, KeyHash> position_normals;
  auto position_key = [&](std::uint32_t p) {
    return std::vector<std::uint64_t>{bits_of(positions[p][0]), bits_of(positions[p][1]),
                                      bits_of(positions[p][2])};
  };
  if (computed_normals) {
    for (const auto& f : faces) {
      Vec3 n = cross(sub(positions[f[1].position], positions[f[0].position]),
                     sub(positions[f[2].position], positions[f[0].position]));
      for (const auto& c : f) {
        auto& acc = position_normals[position_key(c.position)];
        for (int k = 0; k < 3; ++k) acc[k] += n[k];
      }
    }
    for (auto& [key, n] : position_normals) {
      double len = length(n);
      n = len > 0.0 ? Vec3{n[0] / len, n[1] / len, n[2] / len} : Vec3{0.0, 0.0, 0.0};
    }
  }

  std::unordered_map<std::vector<std::uint64_t>, std::uint32_t, KeyHash> vertex_ids;
  std::vector<double> attributes;
  std::vector<Triangle> triangles;
  triangles.reserve(faces.size());
  std::vector<double> scratch(layout.width());
  std::vector<std::uint64_t> key(layout.width());

  for (const auto& f : faces) {
    Triangle tri;
    for (int k = 0; k < 3; ++k) {
      const Corner& c = f[k];
      int o = 0;
      for (double x : positions[c.position]) scratch[o++] = x;
      if (has_normals) {
        const Vec3& n =
            all_normals ? normals[*c.normal] : position_normals.at(position_key(c.position));
        for (double x : n) scratch[o++] = x;
      }
      if (all_texcoords) {
        for (double x : texcoords[*c.texcoord]) scratch[o++] = x;
      }
      for (int i = 0; i < layout.width(); ++i) key[i] = bits_of(scratch[i]);
      auto [it, inserted] =
          vertex_ids.try_emplace(key, static_cast<std::uint32_t>(vertex_ids.size()));
      if (inserted) attributes.insert(attributes.end(), scratch.begin(), scratch.end());
      tri.v[k] = it->second;
    }
    // Faces that collapse onto a repeated vertex carry no area and cannot be
    // stripped; they are dropped.
    if (tri.v[0] == tri.v[1] || tri.v[1] == tri.v[2] || tri.v[2] == tri.v[0]) continue;
    triangles.push_back(tri);
  }

  return TriangleMesh(std::move(layout), std::move(attributes), std::move(triangles));
}

TriangleMesh load_obj(const std::filesystem::path& path, ObjOptions options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_obj(ss.str(), options);
}

namespace {

void append_real(std::string& out, double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  out.append(buf, ptr);
}

}  // namespace

std::string format_obj(const TriangleMesh& mesh) {
  const auto& layout = mesh.layout();
  auto normal_offset = layout.offset_of(Semantic::kNormal);
  auto texcoord_offset = layout.offset_of(Semantic::kTexcoord);
  std::string out;
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    auto a = mesh.vertex(v);
    out += "v";
    for (int k = 0; k < 3; ++k) {
      out += ' ';
      append_real(out, a[k]);
    }
    out += '\n';
    if (normal_offset) {
      out += "vn";
      for (int k = 0; k < 3; ++k) {
        out += ' ';
        append_real(out, a[*normal_offset + k]);
      }
      out += '\n';
    }
    if (texcoord_offset) {
      out += "vt";
      for (int k = 0; k < 2; ++k) {
        out += ' ';
        append_real(out, a[*texcoord_offset + k]);
      }
      out += '\n';
    }
  }
  for (const auto& t : mesh.triangles()) {
    out += 'f';
    for (auto i : t.v) {
      std::string idx = std::to_string(i + 1);
      out += ' ';
      out += idx;
      if (texcoord_offset || normal_offset) {
        out += '/';
        if (texcoord_offset) out += idx;
        if (normal_offset) {
          out += '/';
          out += idx;
        }
      }
    }
    out += '\n';
  }
  return out;
}

void write_obj(const TriangleMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << format_obj(mesh);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

int AdjacencyMap::neighbor_count(std::uint32_t t) const {
  int n = 0;
  for (const auto& e : entries_[t]) n += e.has_value();
  return n;
}

std::size_t AdjacencyMap::record_count() const {
  std::size_t n = 0;
  for (std::uint32_t t = 0; t < entries_.size(); ++t) n += neighbor_count(t);
  return n;
}

AdjacencyMap build_adjacency(const TriangleMesh& mesh) {
  struct Use {
    std::uint32_t triangle;
    EdgeSlot slot;
    bool forward;  // traverses the edge from the smaller to the larger index
  };
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<Use>> edges;
  const auto& tris = mesh.triangles();
  for (std::uint32_t t = 0; t < tris.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      std::uint32_t a = tris[t].v[k];
      std::uint32_t b = tris[t].v[(k + 1) % 3];
      edges[{std::min(a, b), std::max(a, b)}].push_back({t, static_cast<EdgeSlot>(k), a < b});
    }
  }
  AdjacencyMap adjacency(tris.size());
  for (const auto& [edge, uses] : edges) {
    if (uses.size() != 2) continue;
    const Use& p = uses[0];
    const Use& q = uses[1];
    if (p.forward == q.forward || p.triangle == q.triangle) continue;
    adjacency.set(p.triangle, p.slot, {q.triangle, q.slot});
    adjacency.set(q.triangle, q.slot, {p.triangle, p.slot});
  }
  return adjacency;
}

double length(const Vec3& a) { return std::sqrt(dot(a, a)); }

Vec3 triangle_normal(const Vec3& a, const Vec3& b, const Vec3& c) {
  Vec3 n = cross(sub(b, a), sub(c, a));
  double len = length(n);
  double scale = std::max({length(sub(b, a)), length(sub(c, a)), length(sub(c, b))});
  if (!(len > 1e-14 * scale * scale) || len == 0.0) {
    throw DegenerateTriangleError("triangle has zero area");
  }
  return {n[0] / len, n[1] / len, n[2] / len};
}

Vec3 triangle_normal(const TriangleMesh& mesh, std::uint32_t t) {
  const auto& v = mesh.triangles().at(t).v;
  return triangle_normal(mesh.position(v[0]), mesh.position(v[1]), mesh.position(v[2]));
}

}  // namespace mlt
