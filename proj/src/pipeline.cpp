#include "mlt/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "mlt/strip_codec.hpp"
#include "mlt/wave_sim.hpp"

namespace mlt {

const char* to_string(SolverMode s) {
  switch (s) {
    case SolverMode::kEta:
      return "eta";
    case SolverMode::kExact:
      return "exact";
    case SolverMode::kLpExport:
      return "lp-export";
  }
  return "?";
}

std::vector<std::string> scalar_channel_names(const AttributeLayout& layout) {
  static constexpr const char* kXyz[] = {"x", "y", "z", "w"};
  static constexpr const char* kUv[] = {"u", "v", "w"};
  std::vector<std::string> names;
  for (const auto& c : layout.channels()) {
    for (int k = 0; k < c.components; ++k) {
      std::string suffix;
      if (c.semantic == Semantic::kTexcoord && k < 3) {
        suffix = kUv[k];
      } else if (c.semantic != Semantic::kTexcoord && k < 4) {
        suffix = kXyz[k];
      } else {
        suffix = std::to_string(k);
      }
      names.push_back(c.name + "." + suffix);
    }
  }
  return names;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Runs fn(i) for i in [0, count) on up to `threads` workers. Results must be
// written to per-index slots so ordering stays deterministic.
template <typename Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::jthread> workers;
  for (unsigned w = 0; w < threads; ++w) {
    workers.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  workers.clear();
  if (error) std::rethrow_exception(error);
}

std::string meshlet_file(std::size_t i, const char* extension) {
  std::ostringstream name;
  name << "meshlet_" << std::setw(5) << std::setfill('0') << i << extension;
  return name.str();
}

}  // namespace

StripSolution solve_strips(const DualGraph& g, SolverMode mode, double time_budget_seconds) {
  switch (mode) {
    case SolverMode::kEta:
      return solve_eta(g);
    case SolverMode::kExact: {
      ExactOptions options;
      options.time_budget = std::chrono::duration<double>(time_budget_seconds);
      return solve_exact(g, options);
    }
    case SolverMode::kLpExport:
      break;
  }
  throw std::invalid_argument("lp-export does not solve in process");
}

std::vector<StripMeshlet> split_overflow(const TriangleMesh& mesh, const StripMeshlet& s,
                                         std::size_t max_triangles) {
  std::size_t needed = s.meshlet.triangle_count() + 4 * (s.paths.empty() ? 0 : s.paths.size() - 1);
  if (needed <= max_triangles) return {s};

  std::vector<StripMeshlet> parts;
  std::vector<std::uint32_t> sources;
  std::vector<StripPath> paths;
  auto flush = [&] {
    StripMeshlet part;
    part.meshlet = localize(mesh, std::move(sources));
    part.paths = std::move(paths);
    part.optimality = s.optimality;
    parts.push_back(std::move(part));
    sources.clear();
    paths.clear();
  };
  for (const auto& path : s.paths) {
    std::size_t with_path = sources.size() + path.size() + 4 * paths.size();
    if (!paths.empty() && with_path > max_triangles) flush();
    StripPath local;
    for (auto node : path) {
      local.push_back(static_cast<std::uint32_t>(sources.size()));
      sources.push_back(s.meshlet.source_triangles[node]);
    }
    paths.push_back(std::move(local));
  }
  if (!paths.empty()) flush();
  return parts;
}

CompressResult encode(const TriangleMesh& mesh, std::vector<StripMeshlet> strips,
                      const CompressOptions& options, std::size_t base_meshlets) {
  const auto start = Clock::now();
  options.limits.validate();
  CompressResult result;
  RunReport& report = result.report;
  report.vertex_count = mesh.vertex_count();
  report.triangle_count = mesh.triangle_count();
  report.channel_names = scalar_channel_names(mesh.layout());
  report.codec = options.codec;
  report.solver = options.solver;
  report.limits = options.limits;
  report.bits = options.bits;
  report.base_meshlets = base_meshlets;

  const bool stripped = options.codec != Codec::kBasic;
  std::vector<StripMeshlet> final_meshlets;
  for (auto& s : strips) {
    if (!stripped) {
      final_meshlets.push_back(std::move(s));
      continue;
    }
    for (auto& part : split_overflow(mesh, s, static_cast<std::size_t>(options.limits.max_triangles))) {
      part.meshlet = reorder_ascending(part.meshlet, part.paths).meshlet;
      final_meshlets.push_back(std::move(part));
    }
  }

  std::vector<Meshlet> meshlets;
  meshlets.reserve(final_meshlets.size());
  for (const auto& s : final_meshlets) meshlets.push_back(s.meshlet);
  const QuantizationGrid grid = build_grid(mesh, meshlets, options.bits);

  MeshletContainer& c = result.container;
  c.codec = options.codec;
  c.bits = options.bits;
  c.source_vertex_count = static_cast<std::uint32_t>(mesh.vertex_count());
  c.source_triangle_count = static_cast<std::uint32_t>(mesh.triangle_count());
  for (const auto& ch : grid.channels) {
    c.channel_minimum.push_back(ch.minimum);
    c.channel_spacing.push_back(ch.spacing);
  }
  c.meshlets.resize(final_meshlets.size());
  const std::size_t cap = static_cast<std::size_t>(options.limits.max_triangles);
  parallel_for(final_meshlets.size(), options.threads, [&](std::size_t i) {
    const StripMeshlet& s = final_meshlets[i];
    ContainerMeshlet& out = c.meshlets[i];
    CullCone cone = compute_cull_cone(mesh, s.meshlet);
    out.cone_axis = {static_cast<float>(cone.axis[0]), static_cast<float>(cone.axis[1]),
                     static_cast<float>(cone.axis[2])};
    out.cone_half_angle = static_cast<float>(cone.half_angle);
    out.attributes = quantize_meshlet(grid, mesh, s.meshlet);
    switch (options.codec) {
      case Codec::kBasic:
        out.triangle_count = static_cast<std::uint32_t>(s.meshlet.triangle_count());
        for (const auto& t : s.meshlet.triangles) out.indices.insert(out.indices.end(), t.begin(), t.end());
        break;
      case Codec::kGts: {
        GtsStream g = encode_gts(s.meshlet, s.paths, cap);
        out.triangle_count = g.triangle_count;
        out.flag_words = std::move(g.flag_words);
        out.indices = std::move(g.indices);
        break;
      }
      case Codec::kGtsReuse: {
        GtsReuseStream g = encode_gts_reuse(s.meshlet, s.paths, cap);
        out.triangle_count = g.triangle_count;
        out.flag_words = std::move(g.flag_words);
        out.increment_words = std::move(g.increment_words);
        out.indices = std::move(g.reuse);
        break;
      }
    }
  });

  report.meshlet_count = final_meshlets.size();
  report.extra_meshlets = final_meshlets.size() - std::min(final_meshlets.size(), base_meshlets);
  for (std::size_t i = 0; i < final_meshlets.size(); ++i) {
    const auto& s = final_meshlets[i];
    if (stripped) {
      report.restart_count += s.paths.empty() ? 0 : s.paths.size() - 1;
      report.degenerate_count += c.meshlets[i].triangle_count - s.meshlet.triangle_count();
    }
  }
  for (const auto& s : strips) {
    if (!stripped) continue;
    switch (s.optimality) {
      case Optimality::kProvenOptimal:
        ++report.proven_optimal;
        break;
      case Optimality::kHeuristic:
        ++report.heuristic;
        break;
      case Optimality::kTimeoutBest:
        ++report.timeout_best;
        break;
    }
  }
  report.duplication_ratio = duplication_ratio(meshlets, mesh.vertex_count());
  report.sizes = size_report(c, mesh.triangle_count(), mesh.vertex_count());
  report.info_content = info_content(grid);
  for (const auto& ch : grid.channels) report.guard_steps.push_back(ch.guard_steps);
  report.total_seconds = seconds_since(start);
  result.strips = std::move(final_meshlets);
  return result;
}

CompressResult compress(const TriangleMesh& mesh, const CompressOptions& options) {
  const auto start = Clock::now();
  if (options.solver == SolverMode::kLpExport) {
    throw std::invalid_argument("use export_lp_models for lp-export");
  }
  const AdjacencyMap adjacency = build_adjacency(mesh);
  std::vector<Meshlet> meshlets = partition(mesh, adjacency, options.limits);
  std::vector<StripMeshlet> strips(meshlets.size());

  const auto solve_start = Clock::now();
  parallel_for(meshlets.size(), options.threads, [&](std::size_t i) {
    strips[i].meshlet = std::move(meshlets[i]);
    if (options.codec == Codec::kBasic) return;
    DualGraph g = build_dual(strips[i].meshlet, adjacency);
    StripSolution solution = solve_strips(g, options.solver, options.time_budget_seconds);
    strips[i].paths = std::move(solution.paths);
    strips[i].optimality = solution.optimality;
  });
  const double solver_seconds = seconds_since(solve_start);

  const std::size_t base = strips.size();
  CompressResult result = encode(mesh, std::move(strips), options, base);
  result.report.solver_seconds = options.codec == Codec::kBasic ? 0.0 : solver_seconds;
  result.report.total_seconds = seconds_since(start);
  return result;
}

LpExport export_lp_models(const TriangleMesh& mesh, const std::filesystem::path& input,
                          const CompressOptions& options, const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  const AdjacencyMap adjacency = build_adjacency(mesh);
  const std::vector<Meshlet> meshlets = partition(mesh, adjacency, options.limits);
  LpExport out;
  nlohmann::json models = nlohmann::json::array();
  for (std::size_t i = 0; i < meshlets.size(); ++i) {
    MilpModel model = build_milp(build_dual(meshlets[i], adjacency));
    auto path = directory / meshlet_file(i, ".lp");
    export_lp(model, path);
    out.models.push_back(path);
    models.push_back(path.filename().string());
  }
  nlohmann::json manifest = {
      {"input", std::filesystem::absolute(input).string()},
      {"codec", to_string(options.codec)},
      {"bits", options.bits},
      {"vmax", options.limits.max_vertices},
      {"tmax", options.limits.max_triangles},
      {"meshlet_count", meshlets.size()},
      {"flow_total", 1.0},
      {"epsilon", 1.0 / 1024},
      {"models", models},
  };
  out.manifest = directory / "manifest.json";
  std::ofstream(out.manifest) << manifest.dump(2) << "\n";
  return out;
}

namespace {

Codec parse_codec(const std::string& s) {
  if (s == "basic") return Codec::kBasic;
  if (s == "gts") return Codec::kGts;
  if (s == "gts-reuse") return Codec::kGtsReuse;
  throw std::invalid_argument("unknown codec '" + s + "'");
}

}  // namespace

ImportOutcome import_solutions(const std::filesystem::path& manifest_path,
                               const std::filesystem::path& solutions_dir) {
  const auto start = Clock::now();
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open '" + manifest_path.string() + "'");
  nlohmann::json manifest = nlohmann::json::parse(in);

  CompressOptions options;
  options.codec = parse_codec(manifest.at("codec").get<std::string>());
  options.bits = manifest.at("bits").get<int>();
  options.limits.max_vertices = manifest.at("vmax").get<int>();
  options.limits.max_triangles = manifest.at("tmax").get<int>();
  options.solver = SolverMode::kLpExport;

  const TriangleMesh mesh = load_obj(manifest.at("input").get<std::string>());
  const AdjacencyMap adjacency = build_adjacency(mesh);
  std::vector<Meshlet> meshlets = partition(mesh, adjacency, options.limits);
  if (meshlets.size() != manifest.at("meshlet_count").get<std::size_t>()) {
    throw std::runtime_error("manifest meshlet count does not match the input mesh");
  }

  ImportOutcome outcome;
  std::vector<StripMeshlet> strips(meshlets.size());
  for (std::size_t i = 0; i < meshlets.size(); ++i) {
    strips[i].meshlet = std::move(meshlets[i]);
    DualGraph g = build_dual(strips[i].meshlet, adjacency);
    MilpModel model = build_milp(g);
    auto path = solutions_dir / meshlet_file(i, ".sol");
    StripSolution solution;
    try {
      if (!std::filesystem::exists(path)) throw std::runtime_error("missing " + path.filename().string());
      solution = import_solution(model, path);
    } catch (const std::exception& e) {
      outcome.warnings.push_back("meshlet " + std::to_string(i) + ": " + e.what() +
                                 "; using tunneling heuristic");
      solution = solve_eta(g);
    }
    strips[i].paths = std::move(solution.paths);
    strips[i].optimality = solution.optimality;
  }
  const std::size_t base = strips.size();
  outcome.result = encode(mesh, std::move(strips), options, base);
  outcome.result.report.input = manifest.at("input").get<std::string>();
  outcome.result.report.total_seconds = seconds_since(start);
  return outcome;
}

// --- verification ---

namespace {

struct CodeVectorHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const {
    std::uint64_t h = 1469598103934665603ull;
    for (auto x : v) {
      h ^= static_cast<std::uint64_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return static_cast<std::size_t>(h);
  }
};

std::array<std::uint32_t, 3> canonical(std::array<std::uint32_t, 3> t) {
  int r = 0;
  if (t[1] < t[r]) r = 1;
  if (t[2] < t[r]) r = 2;
  return {t[r], t[(r + 1) % 3], t[(r + 2) % 3]};
}

}  // namespace

VerifyReport verify(const MeshletContainer& container, const TriangleMesh& mesh) {
  VerifyReport report;
  constexpr std::size_t kMaxMessages = 20;
  auto fail = [&](std::string message) {
    report.ok = false;
    if (report.failures.size() < kMaxMessages) report.failures.push_back(std::move(message));
  };

  const std::size_t n = container.channel_count();
  if (n != static_cast<std::size_t>(mesh.layout().width())) {
    fail("container has " + std::to_string(n) + " channels, mesh has " +
         std::to_string(mesh.layout().width()));
    return report;
  }
  const QuantizationGrid grid = container.grid();

  // Every source vertex as a point of the global grid; equal points share an id.
  std::unordered_map<std::vector<std::int64_t>, std::uint32_t, CodeVectorHash> point_id;
  std::vector<std::vector<std::uint32_t>> point_sources;
  std::vector<std::uint32_t> source_point(mesh.vertex_count());
  std::vector<std::int64_t> key(n);
  for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
    auto attrs = mesh.vertex(v);
    for (std::size_t i = 0; i < n; ++i) key[i] = grid_code(grid.channels[i], attrs[i]);
    auto [it, inserted] = point_id.try_emplace(key, static_cast<std::uint32_t>(point_sources.size()));
    if (inserted) point_sources.emplace_back();
    point_sources[it->second].push_back(static_cast<std::uint32_t>(v));
    source_point[v] = it->second;
  }
  std::map<std::array<std::uint32_t, 3>, std::int64_t> remaining;
  for (const auto& t : mesh.triangles()) {
    ++remaining[canonical({source_point[t.v[0]], source_point[t.v[1]], source_point[t.v[2]]})];
  }

  std::vector<std::vector<double>> reconstructed(point_sources.size());
  std::vector<std::int64_t> first_meshlet(point_sources.size(), -1);

  for (std::size_t mi = 0; mi < container.meshlets.size(); ++mi) {
    const ContainerMeshlet& m = container.meshlets[mi];
    const std::string where = "meshlet " + std::to_string(mi);
    ++report.meshlets_checked;
    const std::size_t V = m.vertex_count();

    // Attributes: fit, crack-freeness and error bound.
    std::vector<std::uint32_t> local_point(V, 0);
    std::vector<double> values = dequantize(grid, m.attributes);
    bool vertices_ok = true;
    for (std::size_t v = 0; v < V && vertices_ok; ++v) {
      for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t code = m.attributes.codes[v * n + i];
        if (code > grid.max_code()) {
          fail(where + " vertex " + std::to_string(v) + ": code exceeds " + std::to_string(grid.bits) + " bits");
          vertices_ok = false;
        }
        key[i] = m.attributes.lowest[i] + static_cast<std::int64_t>(code);
      }
      auto it = point_id.find(key);
      if (it == point_id.end()) {
        fail(where + " vertex " + std::to_string(v) + ": no source vertex on this grid point");
        vertices_ok = false;
        break;
      }
      local_point[v] = it->second;
      std::span<const double> value(values.data() + v * n, n);
      for (std::size_t i = 0; i < n; ++i) {
        const double half = grid.channels[i].spacing / 2;
        for (auto src : point_sources[it->second]) {
          double original = mesh.vertex(src)[i];
          double slack = 4 * std::numeric_limits<double>::epsilon() *
                         std::max({std::abs(original), std::abs(value[i]), std::abs(grid.channels[i].minimum)});
          double error = std::abs(value[i] - original);
          report.max_error_ratio = std::max(report.max_error_ratio, error / half);
          if (error > half + slack) {
            fail(where + " vertex " + std::to_string(v) + " channel " + std::to_string(i) +
                 ": error exceeds half a grid step");
            vertices_ok = false;
          }
        }
      }
      auto& seen = reconstructed[it->second];
      if (seen.empty()) {
        seen.assign(value.begin(), value.end());
        first_meshlet[it->second] = static_cast<std::int64_t>(mi);
      } else {
        if (first_meshlet[it->second] != static_cast<std::int64_t>(mi)) ++report.shared_vertices;
        if (std::memcmp(seen.data(), value.data(), n * sizeof(double)) != 0) {
          fail(where + " vertex " + std::to_string(v) + ": duplicate reconstructs differently (crack)");
          vertices_ok = false;
        }
      }
    }
    if (!vertices_ok) continue;

    // Connectivity.
    DecodedTriangleList decoded;
    try {
      switch (container.codec) {
        case Codec::kBasic:
          for (const auto& t : basic_triangles(m)) {
            for (auto idx : t) {
              if (idx >= V) throw DecodeError("index out of range");
            }
            decoded.push_back({t, false});
          }
          break;
        case Codec::kGts: {
          GtsStream s = gts_stream(m);
          decoded = decode_sequential(s, V);
          for (int wave : {32, 64}) {
            auto p = decode_parallel_gts(s, V, {wave});
            if (p.triangles != decoded) {
              throw DecodeError("wave" + std::to_string(wave) + " decode differs from sequential decode");
            }
            report.max_lookback = std::max(report.max_lookback, p.trace.max_lookback);
            if (wave == 32) report.fallback_iterations += p.trace.fallback_iterations;
          }
          break;
        }
        case Codec::kGtsReuse: {
          GtsReuseStream s = reuse_stream(m);
          decoded = decode_sequential(s, V);
          for (int wave : {32, 64}) {
            auto p = decode_parallel_reuse(s, V, {wave});
            if (p.triangles != decoded) {
              throw DecodeError("wave" + std::to_string(wave) + " decode differs from sequential decode");
            }
            report.max_lookback = std::max(report.max_lookback, p.trace.max_lookback);
            if (wave == 32) report.fallback_iterations += p.trace.fallback_iterations;
          }
          break;
        }
      }
    } catch (const std::exception& e) {
      fail(where + ": " + e.what());
      continue;
    }
    for (std::size_t t = 0; t < decoded.size(); ++t) {
      if (decoded[t].degenerate) {
        ++report.degenerate_triangles;
        continue;
      }
      const auto& lt = decoded[t].v;
      auto key3 = canonical({local_point[lt[0]], local_point[lt[1]], local_point[lt[2]]});
      auto it = remaining.find(key3);
      if (it == remaining.end() || it->second == 0) {
        fail(where + " triangle " + std::to_string(t) + ": not a source triangle");
        continue;
      }
      --it->second;
      ++report.triangles_checked;
    }
  }
  std::int64_t missing = 0;
  for (const auto& [k, count] : remaining) missing += count;
  if (missing != 0) fail(std::to_string(missing) + " source triangles are not covered");
  return report;
}

nlohmann::json to_json(const RunReport& r) {
  nlohmann::json info = nlohmann::json::array();
  for (std::size_t i = 0; i < r.info_content.size(); ++i) {
    info.push_back({{"channel", i < r.channel_names.size() ? r.channel_names[i] : std::to_string(i)},
                    {"bits", r.info_content[i]},
                    {"guard_steps", i < r.guard_steps.size() ? r.guard_steps[i] : 0}});
  }
  const SizeReport& s = r.sizes;
  return {
      {"input", r.input},
      {"vertices", r.vertex_count},
      {"triangles", r.triangle_count},
      {"codec", to_string(r.codec)},
      {"solver", to_string(r.solver)},
      {"vmax", r.limits.max_vertices},
      {"tmax", r.limits.max_triangles},
      {"bits", r.bits},
      {"meshlets", r.meshlet_count},
      {"base_meshlets", r.base_meshlets},
      {"extra_meshlets", r.extra_meshlets},
      {"restarts", r.restart_count},
      {"degenerate_triangles", r.degenerate_count},
      {"optimality",
       {{"proven_optimal", r.proven_optimal}, {"heuristic", r.heuristic}, {"timeout_best", r.timeout_best}}},
      {"solver_seconds", r.solver_seconds},
      {"total_seconds", r.total_seconds},
      {"duplication_ratio", r.duplication_ratio},
      {"sizes",
       {{"header_bytes", s.header_bytes},
        {"meta_bytes", s.meta_bytes},
        {"flag_bytes", s.flag_bytes},
        {"index_bytes", s.index_bytes},
        {"attribute_bytes", s.attribute_bytes},
        {"total_bytes", s.total_bytes},
        {"stored_vertices", s.stored_vertices},
        {"index_bpt", s.index_bpt},
        {"meta_bytes_per_meshlet", s.meta_bytes_per_meshlet},
        {"vertex_bpv", s.vertex_bpv},
        {"vertex_pipeline_bpt", s.vertex_pipeline_bpt},
        {"basic_meshlet_bpt", s.basic_meshlet_bpt},
        {"vertex_pipeline_vertex_bytes", s.vertex_pipeline_vertex_bytes},
        {"float_meshlet_vertex_bytes", s.float_meshlet_vertex_bytes}}},
      {"info_content", info},
  };
}

nlohmann::json to_json(const VerifyReport& r) {
  return {
      {"ok", r.ok},
      {"failures", r.failures},
      {"meshlets_checked", r.meshlets_checked},
      {"triangles_checked", r.triangles_checked},
      {"degenerate_triangles", r.degenerate_triangles},
      {"shared_vertices", r.shared_vertices},
      {"max_lookback", r.max_lookback},
      {"fallback_iterations", r.fallback_iterations},
      {"max_error_ratio", r.max_error_ratio},
  };
}

std::string format_table(const RunReport& r) {
  std::ostringstream out;
  auto row = [&](const std::string& label, const std::string& value) {
    out << "  " << std::left << std::setw(28) << label << value << "\n";
  };
  auto fixed = [](double v, int digits) {
    std::ostringstream s;
    s << std::fixed << std::setprecision(digits) << v;
    return s.str();
  };
  const SizeReport& s = r.sizes;
  const double mib = 1024.0 * 1024.0;
  out << "Strips (" << to_string(r.solver) << ")\n";
  row("computation time", fixed(r.solver_seconds, 2) + " s");
  row("GTS restarts", std::to_string(r.restart_count));
  row("degenerate triangles", std::to_string(r.degenerate_count));
  row("additional meshlets", std::to_string(r.extra_meshlets) + " / " + std::to_string(r.meshlet_count));
  out << "Index buffer, MiB (bpt)\n";
  row("vertex pipeline", fixed(r.triangle_count * 12 / mib, 3) + " (" + fixed(s.vertex_pipeline_bpt, 1) + ")");
  row("basic mesh shading", fixed(r.triangle_count * 3 / mib, 3) + " (" + fixed(s.basic_meshlet_bpt, 1) + ")");
  row(std::string(to_string(r.codec)), fixed((s.flag_bytes + s.index_bytes) / mib, 3) + " (" +
                                           fixed(s.index_bpt, 2) + ")");
  out << "Meshlet buffer, MiB\n";
  row("meta (28 B per meshlet)", fixed(s.meta_bytes / mib, 3));
  out << "Vertex buffer, MiB\n";
  row("vertex pipeline (float)", fixed(s.vertex_pipeline_vertex_bytes / mib, 3));
  row("meshlets (float)", fixed(s.float_meshlet_vertex_bytes / mib, 3));
  row("meshlets (fixed " + std::to_string(r.bits) + " bit)", fixed(s.attribute_bytes / mib, 3));
  row("duplication ratio", fixed(r.duplication_ratio, 3));
  out << "Information content, bits\n";
  for (std::size_t i = 0; i < r.info_content.size(); ++i) {
    row(i < r.channel_names.size() ? r.channel_names[i] : std::to_string(i), fixed(r.info_content[i], 2));
  }
  return out.str();
}

}  // namespace mlt
