#include "mlt/strip_codec.hpp"

#include <algorithm>
#include <optional>
#include <string>

namespace mlt {

StripOverflowError::StripOverflowError(std::size_t needed, std::size_t limit)
    : std::runtime_error("strip needs " + std::to_string(needed) + " triangles, limit is " +
                         std::to_string(limit)),
      needed_(needed) {}

namespace {

// Third vertex of `tri` if it traverses the directed edge from -> to.
std::optional<std::uint8_t> across(const LocalTriangle& tri, std::uint8_t from, std::uint8_t to) {
  for (int k = 0; k < 3; ++k) {
    if (tri[k] == from && tri[(k + 1) % 3] == to) return tri[(k + 2) % 3];
  }
  return std::nullopt;
}

std::optional<StripStep> step_into(const LocalTriangle& prev, const LocalTriangle& next) {
  const auto [a, b, c] = prev;
  if (auto w = across(next, c, b)) return StripStep{StripFlag::kRight, *w};
  if (auto w = across(next, a, c)) return StripStep{StripFlag::kLeft, *w};
  return std::nullopt;
}

LocalTriangle take_step(const LocalTriangle& prev, StripStep step) {
  const auto [a, b, c] = prev;
  return step.flag == StripFlag::kRight ? LocalTriangle{c, b, step.index}
                                        : LocalTriangle{a, c, step.index};
}

// First rotation of `tri` from which `next` is reachable by one step.
LocalTriangle entry_rotation(const LocalTriangle& tri, const LocalTriangle* next) {
  for (int r = 0; r < 3; ++r) {
    LocalTriangle rot{tri[r], tri[(r + 1) % 3], tri[(r + 2) % 3]};
    if (!next || step_into(rot, *next)) return rot;
  }
  throw std::logic_error("strip path crosses an edge that is not shared with opposite winding");
}

bool is_degenerate(const LocalTriangle& t) { return t[0] == t[1] || t[1] == t[2] || t[2] == t[0]; }

}  // namespace

std::array<StripStep, 5> emit_restart(const LocalTriangle& current, const LocalTriangle& next) {
  const std::uint8_t c = current[2];
  const auto [p, q, r] = next;
  return {StripStep{StripFlag::kRight, c}, StripStep{StripFlag::kLeft, q},
          StripStep{StripFlag::kLeft, q}, StripStep{StripFlag::kRight, p},
          StripStep{StripFlag::kRight, r}};
}

StripProgram plan_strip(const Meshlet& meshlet, const std::vector<StripPath>& paths) {
  StripProgram program;
  LocalTriangle prev{};
  for (std::size_t pi = 0; pi < paths.size(); ++pi) {
    const auto& path = paths[pi];
    if (path.empty()) throw std::logic_error("empty strip path");
    const LocalTriangle* following = path.size() > 1 ? &meshlet.triangles.at(path[1]) : nullptr;
    LocalTriangle head = entry_rotation(meshlet.triangles.at(path[0]), following);
    if (pi == 0) {
      program.first = head;
    } else {
      for (const auto& s : emit_restart(prev, head)) program.steps.push_back(s);
    }
    prev = head;
    for (std::size_t k = 1; k < path.size(); ++k) {
      auto step = step_into(prev, meshlet.triangles.at(path[k]));
      if (!step) throw std::logic_error("strip path step without a shared edge");
      program.steps.push_back(*step);
      prev = take_step(prev, *step);
    }
  }
  return program;
}

ReorderResult reorder_ascending(const Meshlet& meshlet, const std::vector<StripPath>& paths) {
  const StripProgram program = plan_strip(meshlet, paths);
  const std::size_t V = meshlet.vertex_count();
  constexpr int kUnset = -1;
  std::vector<int> old_to_new(V, kUnset);
  int next_id = 0;
  ReorderResult result;
  result.introduced.resize(paths.size());

  auto visit = [&](std::uint8_t old, std::size_t path_index) {
    if (old_to_new[old] == kUnset) {
      old_to_new[old] = next_id++;
      result.introduced[path_index].push_back(static_cast<std::uint8_t>(old_to_new[old]));
    }
  };
  for (auto v : program.first) visit(v, 0);
  // Steps of path i (i > 0) begin with its five restart steps.
  std::size_t step = 0;
  for (std::size_t pi = 0; pi < paths.size(); ++pi) {
    std::size_t count = paths[pi].size() - 1 + (pi > 0 ? 5 : 0);
    for (std::size_t k = 0; k < count; ++k, ++step) visit(program.steps[step].index, pi);
  }
  for (std::size_t v = 0; v < V; ++v) {
    if (old_to_new[v] == kUnset) old_to_new[v] = next_id++;  // unreferenced, keep at the end
  }

  Meshlet& out = result.meshlet;
  out.source_triangles = meshlet.source_triangles;
  out.vertices.resize(V);
  for (std::size_t v = 0; v < V; ++v) out.vertices[old_to_new[v]] = meshlet.vertices[v];
  out.triangles.reserve(meshlet.triangle_count());
  for (const auto& t : meshlet.triangles) {
    out.triangles.push_back({static_cast<std::uint8_t>(old_to_new[t[0]]),
                             static_cast<std::uint8_t>(old_to_new[t[1]]),
                             static_cast<std::uint8_t>(old_to_new[t[2]])});
  }
  result.old_to_new.assign(old_to_new.begin(), old_to_new.end());
  return result;
}

std::size_t flag_word_count(std::uint32_t triangle_count) {
  return triangle_count <= 1 ? 0 : (triangle_count - 1 + 31) / 32;
}

bool test_flag(std::span<const std::uint32_t> words, std::uint32_t t) {
  std::uint32_t bit = t - 1;
  return (words[bit / 32] >> (bit % 32)) & 1u;
}

namespace {

void set_bit(std::vector<std::uint32_t>& words, std::uint32_t bit) {
  words[bit / 32] |= 1u << (bit % 32);
}

StripProgram checked_program(const Meshlet& meshlet, const std::vector<StripPath>& paths,
                             std::size_t max_triangles) {
  if (meshlet.vertex_count() > 256) throw std::invalid_argument("meshlet has more than 256 vertices");
  StripProgram program = plan_strip(meshlet, paths);
  if (program.triangle_count() > max_triangles) {
    throw StripOverflowError(program.triangle_count(), max_triangles);
  }
  if (program.first != LocalTriangle{0, 1, 2}) {
    throw std::invalid_argument("meshlet is not in ascending strip order");
  }
  return program;
}

}  // namespace

GtsStream encode_gts(const Meshlet& meshlet, const std::vector<StripPath>& paths,
                     std::size_t max_triangles) {
  const StripProgram program = checked_program(meshlet, paths, max_triangles);
  GtsStream s;
  s.triangle_count = static_cast<std::uint32_t>(program.triangle_count());
  s.flag_words.assign(flag_word_count(s.triangle_count), 0u);
  for (std::uint32_t i = 0; i < program.steps.size(); ++i) {
    if (program.steps[i].flag == StripFlag::kRight) set_bit(s.flag_words, i);
    s.indices.push_back(program.steps[i].index);
  }
  return s;
}

GtsReuseStream encode_gts_reuse(const Meshlet& meshlet, const std::vector<StripPath>& paths,
                                std::size_t max_triangles) {
  const StripProgram program = checked_program(meshlet, paths, max_triangles);
  GtsReuseStream s;
  s.triangle_count = static_cast<std::uint32_t>(program.triangle_count());
  s.flag_words.assign(flag_word_count(s.triangle_count), 0u);
  s.increment_words.assign(flag_word_count(s.triangle_count), 0u);
  int highest = 2;
  for (std::uint32_t i = 0; i < program.steps.size(); ++i) {
    const auto& step = program.steps[i];
    if (step.flag == StripFlag::kRight) set_bit(s.flag_words, i);
    if (step.index == highest + 1) {
      ++highest;
      set_bit(s.increment_words, i);
    } else if (step.index <= highest) {
      s.reuse.push_back(step.index);
    } else {
      throw std::invalid_argument("meshlet is not in ascending strip order");
    }
  }
  return s;
}

namespace {

DecodedTriangleList decode_steps(std::uint32_t triangle_count,
                                 std::span<const std::uint32_t> flag_words,
                                 std::size_t vertex_count, auto&& index_of) {
  if (triangle_count == 0) return {};
  if (vertex_count < 3) throw DecodeError("stream needs at least three vertices");
  if (flag_words.size() < flag_word_count(triangle_count)) throw DecodeError("flag words truncated");
  DecodedTriangleList out;
  out.reserve(triangle_count);
  LocalTriangle prev{0, 1, 2};
  out.push_back({prev, false});
  for (std::uint32_t t = 1; t < triangle_count; ++t) {
    std::size_t w = index_of(t);
    if (w >= vertex_count) {
      throw DecodeError("triangle " + std::to_string(t) + " references vertex " +
                        std::to_string(w) + " of " + std::to_string(vertex_count));
    }
    StripFlag flag = test_flag(flag_words, t) ? StripFlag::kRight : StripFlag::kLeft;
    prev = take_step(prev, {flag, static_cast<std::uint8_t>(w)});
    out.push_back({prev, is_degenerate(prev)});
  }
  return out;
}

}  // namespace

DecodedTriangleList decode_sequential(const GtsStream& stream, std::size_t vertex_count) {
  if (stream.triangle_count > 0 && stream.indices.size() != stream.triangle_count - 1) {
    throw DecodeError("index count does not match triangle count");
  }
  return decode_steps(stream.triangle_count, stream.flag_words, vertex_count,
                      [&](std::uint32_t t) { return std::size_t{stream.indices[t - 1]}; });
}

DecodedTriangleList decode_sequential(const GtsReuseStream& stream, std::size_t vertex_count) {
  if (stream.increment_words.size() < flag_word_count(stream.triangle_count)) {
    throw DecodeError("increment words truncated");
  }
  std::size_t ones = 0;  // inclusive count of 1-flags over triangles 1..t
  return decode_steps(stream.triangle_count, stream.flag_words, vertex_count,
                      [&](std::uint32_t t) -> std::size_t {
                        if (test_flag(stream.increment_words, t)) return 2 + ++ones;
                        std::size_t position = (t - ones) - 1;
                        if (position >= stream.reuse.size()) {
                          throw DecodeError("reuse position " + std::to_string(position) +
                                            " out of range");
                        }
                        return stream.reuse[position];
                      });
}

std::uint64_t stream_size_bits(const GtsStream& stream) {
  return 32ull * stream.flag_words.size() + 8ull * stream.indices.size();
}

std::uint64_t stream_size_bits(const GtsReuseStream& stream) {
  return 32ull * (stream.flag_words.size() + stream.increment_words.size()) +
         8ull * stream.reuse.size();
}

double bits_per_triangle(std::uint64_t bits, std::size_t original_triangles) {
  return original_triangles == 0 ? 0.0
                                 : static_cast<double>(bits) / static_cast<double>(original_triangles);
}

LocalTriangle canonical_rotation(const LocalTriangle& t) {
  int r = 0;
  if (t[1] < t[r]) r = 1;
  if (t[2] < t[r]) r = 2;
  return {t[r], t[(r + 1) % 3], t[(r + 2) % 3]};
}

bool same_triangles(const DecodedTriangleList& decoded,
                    const std::vector<LocalTriangle>& triangles) {
  std::vector<LocalTriangle> a;
  for (const auto& d : decoded) {
    if (!d.degenerate) a.push_back(canonical_rotation(d.v));
  }
  std::vector<LocalTriangle> b;
  for (const auto& t : triangles) b.push_back(canonical_rotation(t));
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return a == b;
}

}  // namespace mlt
