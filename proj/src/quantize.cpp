#include "mlt/quantize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mlt {

std::int64_t grid_code(const ChannelGrid& c, double value) {
  return static_cast<std::int64_t>(std::round((value - c.minimum) / c.spacing));
}

double grid_value(const ChannelGrid& c, std::int64_t code) {
  return c.minimum + static_cast<double>(code) * c.spacing;
}

namespace {

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
};

// Widest integer extent of any meshlet on the channel's grid.
std::int64_t widest_code_extent(const ChannelGrid& c, const TriangleMesh& mesh,
                                const std::vector<Meshlet>& meshlets, int channel) {
  std::int64_t widest = 0;
  for (const auto& m : meshlets) {
    std::int64_t lo = std::numeric_limits<std::int64_t>::max();
    std::int64_t hi = std::numeric_limits<std::int64_t>::min();
    for (auto v : m.vertices) {
      std::int64_t q = grid_code(c, mesh.vertex(v)[channel]);
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    if (!m.vertices.empty()) widest = std::max(widest, hi - lo);
  }
  return widest;
}

}  // namespace

QuantizationGrid build_grid(const TriangleMesh& mesh, const std::vector<Meshlet>& meshlets,
                            int bits) {
  if (meshlets.empty()) throw std::invalid_argument("cannot build a grid without meshlets");
  if (bits < 1 || bits > 32) throw std::invalid_argument("bit depth must lie in [1, 32]");
  QuantizationGrid grid;
  grid.bits = bits;
  const int n = mesh.layout().width();
  const double steps = static_cast<double>(grid.max_code());
  // Widening factor (2^b - 1) / (2^b - 2); a single bit has no such ratio.
  const double widen = bits == 1 ? 2.0 : steps / (steps - 1.0);

  for (int i = 0; i < n; ++i) {
    Range global;
    double widest = 0.0;
    for (const auto& m : meshlets) {
      Range local;
      for (auto v : m.vertices) {
        double x = mesh.vertex(v)[i];
        local.lo = std::min(local.lo, x);
        local.hi = std::max(local.hi, x);
      }
      if (m.vertices.empty()) continue;
      widest = std::max(widest, local.hi - local.lo);
      global.lo = std::min(global.lo, local.lo);
      global.hi = std::max(global.hi, local.hi);
    }
    ChannelGrid c;
    c.minimum = global.lo;
    c.global_extent = global.hi - global.lo;
    c.meshlet_extent = widest;
    if (!(c.global_extent > 0.0)) {
      c.spacing = 1.0;
    } else {
      // Meshlets that are each flat on this channel still need a finite step.
      double span = widest > 0.0 ? widest : c.global_extent;
      c.spacing = span / steps;
      while (widest_code_extent(c, mesh, meshlets, i) > static_cast<std::int64_t>(grid.max_code())) {
        c.spacing *= widen;
        ++c.guard_steps;
      }
    }
    grid.channels.push_back(c);
  }
  return grid;
}

QuantizedMeshlet quantize_meshlet(const QuantizationGrid& grid, const TriangleMesh& mesh,
                                  const Meshlet& meshlet) {
  const std::size_t n = grid.channels.size();
  if (n != static_cast<std::size_t>(mesh.layout().width())) {
    throw std::invalid_argument("grid and mesh layout disagree");
  }
  QuantizedMeshlet q;
  q.channel_count = n;
  q.lowest.assign(n, std::numeric_limits<std::int64_t>::max());
  std::vector<std::int64_t> global(meshlet.vertex_count() * n);
  for (std::size_t v = 0; v < meshlet.vertex_count(); ++v) {
    auto attrs = mesh.vertex(meshlet.vertices[v]);
    for (std::size_t i = 0; i < n; ++i) {
      std::int64_t code = grid_code(grid.channels[i], attrs[i]);
      global[v * n + i] = code;
      q.lowest[i] = std::min(q.lowest[i], code);
    }
  }
  if (meshlet.vertex_count() == 0) q.lowest.assign(n, 0);
  q.codes.resize(global.size());
  for (std::size_t k = 0; k < global.size(); ++k) {
    std::int64_t local = global[k] - q.lowest[k % n];
    if (local < 0 || static_cast<std::uint64_t>(local) > grid.max_code()) {
      throw std::logic_error("channel " + std::to_string(k % n) + " code " + std::to_string(local) +
                             " does not fit in " + std::to_string(grid.bits) + " bits");
    }
    q.codes[k] = static_cast<std::uint32_t>(local);
  }
  return q;
}

std::vector<double> dequantize(const QuantizationGrid& grid, const QuantizedMeshlet& q) {
  std::vector<double> out(q.codes.size());
  const std::size_t n = q.channel_count;
  for (std::size_t k = 0; k < q.codes.size(); ++k) {
    const std::size_t i = k % n;
    out[k] = grid_value(grid.channels[i], q.lowest[i] + static_cast<std::int64_t>(q.codes[k]));
  }
  return out;
}

std::vector<double> info_content(const QuantizationGrid& grid) {
  std::vector<double> bits;
  for (const auto& c : grid.channels) {
    bits.push_back(c.global_extent > 0.0 ? std::log2(c.global_extent / c.spacing) : 0.0);
  }
  return bits;
}

}  // namespace mlt
