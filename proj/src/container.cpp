#include "mlt/container.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

namespace mlt {

const char* to_string(Codec c) {
  switch (c) {
    case Codec::kBasic:
      return "basic";
    case Codec::kGts:
      return "gts";
    case Codec::kGtsReuse:
      return "gts-reuse";
  }
  return "?";
}

QuantizationGrid MeshletContainer::grid() const {
  QuantizationGrid g;
  g.bits = bits;
  for (std::size_t i = 0; i < channel_minimum.size(); ++i) {
    ChannelGrid c;
    c.minimum = channel_minimum[i];
    c.spacing = channel_spacing[i];
    g.channels.push_back(c);
  }
  return g;
}

GtsStream gts_stream(const ContainerMeshlet& m) {
  return {m.triangle_count, m.flag_words, m.indices};
}

GtsReuseStream reuse_stream(const ContainerMeshlet& m) {
  return {m.triangle_count, m.flag_words, m.increment_words, m.indices};
}

std::vector<LocalTriangle> basic_triangles(const ContainerMeshlet& m) {
  std::vector<LocalTriangle> out;
  for (std::size_t i = 0; i + 2 < m.indices.size(); i += 3) {
    out.push_back({m.indices[i], m.indices[i + 1], m.indices[i + 2]});
  }
  return out;
}

std::size_t code_bytes(int bits) { return bits <= 8 ? 1 : bits <= 16 ? 2 : 4; }

namespace {

constexpr std::array<std::uint8_t, 4> kMagic{'M', 'L', 'T', '1'};
constexpr std::size_t kHeaderBytes = 32;

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void uint(std::uint64_t v, int bytes) {
    for (int i = 0; i < bytes; ++i) out_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u32(std::uint32_t v) { uint(v, 4); }
  void u64(std::uint64_t v) { uint(v, 8); }
  void f32(float v) { u32(std::bit_cast<std::uint32_t>(v)); }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  std::vector<std::uint8_t>& bytes() { return out_; }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> in) : in_(in) {}
  std::uint64_t uint(int bytes) {
    need(bytes);
    std::uint64_t v = 0;
    for (int i = 0; i < bytes; ++i) v |= std::uint64_t{in_[pos_ + i]} << (8 * i);
    pos_ += bytes;
    return v;
  }
  std::uint32_t u32() { return static_cast<std::uint32_t>(uint(4)); }
  std::uint64_t u64() { return uint(8); }
  float f32() { return std::bit_cast<float>(u32()); }
  double f64() { return std::bit_cast<double>(u64()); }
  std::uint8_t u8() { return static_cast<std::uint8_t>(uint(1)); }
  std::size_t position() const { return pos_; }
  void seek(std::size_t pos) { pos_ = pos; }
  void need(std::size_t bytes) const {
    if (pos_ + bytes > in_.size()) throw ContainerError("truncated container");
  }

 private:
  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
};

std::size_t attribute_blob_bytes(const ContainerMeshlet& m, std::size_t channels, int bits) {
  return 8 * channels + m.attributes.codes.size() * code_bytes(bits);
}

}  // namespace

std::vector<std::uint8_t> serialize(const MeshletContainer& c) {
  const std::size_t n = c.channel_count();
  if (c.channel_spacing.size() != n) throw ContainerError("channel tables differ in length");
  const std::size_t cb = code_bytes(c.bits);

  std::uint64_t flag_bytes = 0, index_bytes = 0, attribute_bytes = 0;
  for (const auto& m : c.meshlets) {
    flag_bytes += 4 * (m.flag_words.size() + m.increment_words.size());
    index_bytes += m.indices.size();
    attribute_bytes += attribute_blob_bytes(m, n, c.bits);
  }
  if (flag_bytes > UINT32_MAX || index_bytes > UINT32_MAX || attribute_bytes > UINT32_MAX) {
    throw ContainerError("section exceeds 32-bit offsets");
  }

  Writer w;
  for (auto b : kMagic) w.u8(b);
  w.u32(kContainerVersion);
  w.u32(static_cast<std::uint32_t>(c.codec));
  w.u32(static_cast<std::uint32_t>(c.bits));
  w.u32(static_cast<std::uint32_t>(c.meshlets.size()));
  w.u32(static_cast<std::uint32_t>(n));
  w.u32(c.source_vertex_count);
  w.u32(c.source_triangle_count);
  for (std::size_t i = 0; i < n; ++i) {
    w.f64(c.channel_minimum[i]);
    w.f64(c.channel_spacing[i]);
  }
  w.u64(kMetaRecordBytes * c.meshlets.size());
  w.u64(flag_bytes);
  w.u64(index_bytes);
  w.u64(attribute_bytes);

  std::uint32_t flag_offset = 0, index_offset = 0, attribute_offset = 0;
  for (const auto& m : c.meshlets) {
    w.u32(flag_offset);
    w.u32(index_offset);
    w.u32(attribute_offset);
    for (float a : m.cone_axis) w.f32(a);
    w.f32(m.cone_half_angle);
    flag_offset += static_cast<std::uint32_t>(4 * (m.flag_words.size() + m.increment_words.size()));
    index_offset += static_cast<std::uint32_t>(m.indices.size());
    attribute_offset += static_cast<std::uint32_t>(attribute_blob_bytes(m, n, c.bits));
  }
  for (const auto& m : c.meshlets) {
    for (auto word : m.flag_words) w.u32(word);
    for (auto word : m.increment_words) w.u32(word);
  }
  for (const auto& m : c.meshlets) {
    for (auto b : m.indices) w.u8(b);
  }
  for (const auto& m : c.meshlets) {
    if (m.attributes.lowest.size() != n || m.attributes.channel_count != n) {
      throw ContainerError("meshlet attribute channels do not match the header");
    }
    for (auto l : m.attributes.lowest) w.u64(static_cast<std::uint64_t>(l));
    for (auto code : m.attributes.codes) w.uint(code, static_cast<int>(cb));
  }
  return std::move(w.bytes());
}

MeshletContainer deserialize(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  r.need(kHeaderBytes);
  for (auto b : kMagic) {
    if (r.u8() != b) throw ContainerError("bad magic (expected MLT1)");
  }
  if (auto version = r.u32(); version != kContainerVersion) {
    throw ContainerError("unsupported container version " + std::to_string(version));
  }
  MeshletContainer c;
  auto codec = r.u32();
  if (codec > 2) throw ContainerError("unknown codec id " + std::to_string(codec));
  c.codec = static_cast<Codec>(codec);
  c.bits = static_cast<int>(r.u32());
  if (c.bits < 1 || c.bits > 32) throw ContainerError("bit depth out of range");
  const std::uint32_t meshlet_count = r.u32();
  const std::uint32_t n = r.u32();
  c.source_vertex_count = r.u32();
  c.source_triangle_count = r.u32();
  if (n == 0) throw ContainerError("container without attribute channels");
  r.need(16ull * n);
  for (std::uint32_t i = 0; i < n; ++i) {
    c.channel_minimum.push_back(r.f64());
    c.channel_spacing.push_back(r.f64());
  }
  const std::uint64_t meta_bytes = r.u64();
  const std::uint64_t flag_bytes = r.u64();
  const std::uint64_t index_bytes = r.u64();
  const std::uint64_t attribute_bytes = r.u64();
  if (meta_bytes != kMetaRecordBytes * std::uint64_t{meshlet_count}) {
    throw ContainerError("meta section size does not match meshlet count");
  }
  const std::size_t meta_start = r.position();
  const std::size_t flag_start = meta_start + meta_bytes;
  const std::size_t index_start = flag_start + flag_bytes;
  const std::size_t attribute_start = index_start + index_bytes;
  const std::size_t end = attribute_start + attribute_bytes;
  if (end != bytes.size()) {
    throw ContainerError(end > bytes.size() ? "truncated container" : "trailing bytes after container");
  }

  struct Offsets {
    std::uint32_t flags, index, attributes;
  };
  std::vector<Offsets> offsets(meshlet_count);
  c.meshlets.resize(meshlet_count);
  for (std::uint32_t i = 0; i < meshlet_count; ++i) {
    offsets[i] = {r.u32(), r.u32(), r.u32()};
    auto& m = c.meshlets[i];
    for (auto& a : m.cone_axis) a = r.f32();
    m.cone_half_angle = r.f32();
  }

  const std::size_t cb = code_bytes(c.bits);
  auto extent = [&](std::uint32_t i, auto member, std::uint64_t section) -> std::uint64_t {
    std::uint64_t begin = offsets[i].*member;
    std::uint64_t finish = i + 1 < meshlet_count ? offsets[i + 1].*member : section;
    if (begin > finish || finish > section) {
      throw ContainerError("meshlet " + std::to_string(i) + " has inconsistent offsets");
    }
    return finish - begin;
  };

  for (std::uint32_t i = 0; i < meshlet_count; ++i) {
    auto& m = c.meshlets[i];
    const std::string where = "meshlet " + std::to_string(i) + ": ";
    const std::uint64_t fb = extent(i, &Offsets::flags, flag_bytes);
    const std::uint64_t ib = extent(i, &Offsets::index, index_bytes);
    const std::uint64_t ab = extent(i, &Offsets::attributes, attribute_bytes);

    if (ab < 8ull * n || (ab - 8ull * n) % (n * cb) != 0) {
      throw ContainerError(where + "attribute blob size is not a whole number of vertices");
    }
    const std::uint64_t V = (ab - 8ull * n) / (n * cb);
    if (V > 256) throw ContainerError(where + "more than 256 vertices");

    std::size_t words = 0;
    bool reuse = false;
    switch (c.codec) {
      case Codec::kBasic:
        if (ib % 3 != 0 || fb != 0) throw ContainerError(where + "malformed basic index data");
        m.triangle_count = static_cast<std::uint32_t>(ib / 3);
        break;
      case Codec::kGts:
        m.triangle_count = static_cast<std::uint32_t>(ib + 1);
        words = flag_word_count(m.triangle_count);
        if (fb != 4 * words) throw ContainerError(where + "flag words do not match triangle count");
        break;
      case Codec::kGtsReuse:
        // T' - 1 = reuse entries + (V - 3) new vertices.
        if (V < 3) throw ContainerError(where + "fewer than three vertices");
        m.triangle_count = static_cast<std::uint32_t>(ib + V - 2);
        words = flag_word_count(m.triangle_count);
        reuse = true;
        if (fb != 8 * words) throw ContainerError(where + "flag words do not match triangle count");
        break;
    }

    r.seek(flag_start + offsets[i].flags);
    m.flag_words.resize(words);
    for (auto& word : m.flag_words) word = r.u32();
    if (reuse) {
      m.increment_words.resize(words);
      for (auto& word : m.increment_words) word = r.u32();
    }
    r.seek(index_start + offsets[i].index);
    m.indices.resize(ib);
    for (auto& b : m.indices) b = r.u8();
    r.seek(attribute_start + offsets[i].attributes);
    m.attributes.channel_count = n;
    m.attributes.lowest.resize(n);
    for (auto& l : m.attributes.lowest) l = static_cast<std::int64_t>(r.u64());
    m.attributes.codes.resize(V * n);
    for (auto& code : m.attributes.codes) code = static_cast<std::uint32_t>(r.uint(static_cast<int>(cb)));
  }
  return c;
}

void write_container(const MeshletContainer& c, const std::filesystem::path& path) {
  auto bytes = serialize(c);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

MeshletContainer read_container(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return deserialize(bytes);
}

SizeReport size_report(const MeshletContainer& c, std::size_t source_triangles,
                       std::size_t source_vertices) {
  SizeReport s;
  const std::size_t n = c.channel_count();
  s.header_bytes = kHeaderBytes + 16 * n + 32;
  s.meta_bytes = kMetaRecordBytes * c.meshlets.size();
  for (const auto& m : c.meshlets) {
    s.flag_bytes += 4 * (m.flag_words.size() + m.increment_words.size());
    s.index_bytes += m.indices.size();
    s.attribute_bytes += attribute_blob_bytes(m, n, c.bits);
    s.stored_vertices += m.vertex_count();
  }
  s.total_bytes = s.header_bytes + s.meta_bytes + s.flag_bytes + s.index_bytes + s.attribute_bytes;
  s.index_bpt = bits_per_triangle(8 * (s.flag_bytes + s.index_bytes), source_triangles);
  s.meta_bytes_per_meshlet = c.meshlets.empty() ? 0.0 : static_cast<double>(kMetaRecordBytes);
  s.vertex_bpv = s.stored_vertices == 0 ? 0.0
                                        : 8.0 * static_cast<double>(s.attribute_bytes) /
                                              static_cast<double>(s.stored_vertices);
  s.vertex_pipeline_vertex_bytes = 4ull * n * source_vertices;
  s.float_meshlet_vertex_bytes = 4ull * n * s.stored_vertices;
  return s;
}

SizeReport size_report(const MeshletContainer& c) {
  return size_report(c, c.source_triangle_count, c.source_vertex_count);
}

}  // namespace mlt
