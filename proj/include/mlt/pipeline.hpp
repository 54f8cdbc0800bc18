#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"
#include "mlt/container.hpp"
#include "mlt/core_mesh.hpp"
#include "mlt/meshlet.hpp"
#include "mlt/quantize.hpp"
#include "mlt/stripify.hpp"

namespace mlt {

enum class SolverMode { kEta, kExact, kLpExport };
const char* to_string(SolverMode s);

struct CompressOptions {
  Codec codec = Codec::kGtsReuse;
  SolverMode solver = SolverMode::kEta;
  MeshletLimits limits;
  int bits = 16;
  double time_budget_seconds = 10.0;
  unsigned threads = 1;
};

// A meshlet together with the strips that cover it.
struct StripMeshlet {
  Meshlet meshlet;
  std::vector<StripPath> paths;
  Optimality optimality = Optimality::kHeuristic;
};

struct RunReport {
  std::string input;
  std::size_t vertex_count = 0;
  std::size_t triangle_count = 0;
  std::vector<std::string> channel_names;
  Codec codec = Codec::kGtsReuse;
  SolverMode solver = SolverMode::kEta;
  MeshletLimits limits;
  int bits = 16;

  std::size_t base_meshlets = 0;   // from the partitioner
  std::size_t meshlet_count = 0;   // after splitting strips that overflow
  std::size_t extra_meshlets = 0;
  std::size_t restart_count = 0;
  std::size_t degenerate_count = 0;
  std::size_t proven_optimal = 0;
  std::size_t heuristic = 0;
  std::size_t timeout_best = 0;
  double solver_seconds = 0.0;
  double total_seconds = 0.0;
  double duplication_ratio = 0.0;

  SizeReport sizes;
  std::vector<double> info_content;
  std::vector<int> guard_steps;
};

struct CompressResult {
  MeshletContainer container;
  RunReport report;
  std::vector<StripMeshlet> strips;
};

// Dotted names of every scalar channel, e.g. "position.x".
std::vector<std::string> scalar_channel_names(const AttributeLayout& layout);

StripSolution solve_strips(const DualGraph& g, SolverMode mode, double time_budget_seconds);

// Splits a meshlet whose strip stream would exceed `max_triangles` into
// meshlets that each hold a run of whole strips.
std::vector<StripMeshlet> split_overflow(const TriangleMesh& mesh, const StripMeshlet& s,
                                         std::size_t max_triangles);

// Solves every meshlet, splits overflowing ones, quantizes and encodes.
CompressResult compress(const TriangleMesh& mesh, const CompressOptions& options);

// Encodes meshlets whose strips are already known. `base_meshlets` is the
// partitioner's count used for the extra-meshlet figure.
CompressResult encode(const TriangleMesh& mesh, std::vector<StripMeshlet> strips,
                      const CompressOptions& options, std::size_t base_meshlets);

struct LpExport {
  std::vector<std::filesystem::path> models;
  std::filesystem::path manifest;
};

// Writes meshlet_NNNNN.lp per meshlet plus manifest.json into `directory`.
LpExport export_lp_models(const TriangleMesh& mesh, const std::filesystem::path& input,
                          const CompressOptions& options, const std::filesystem::path& directory);

struct ImportOutcome {
  CompressResult result;
  std::vector<std::string> warnings;  // one per meshlet that fell back to ETA
};

// Reads meshlet_NNNNN.sol for each meshlet listed in the manifest; missing or
// invalid files fall back to the tunneling heuristic.
ImportOutcome import_solutions(const std::filesystem::path& manifest,
                               const std::filesystem::path& solutions_dir);

struct VerifyReport {
  bool ok = true;
  std::vector<std::string> failures;
  std::size_t meshlets_checked = 0;
  std::size_t triangles_checked = 0;
  std::size_t degenerate_triangles = 0;
  std::size_t shared_vertices = 0;  // stored vertices whose grid point appears in several meshlets
  std::uint32_t max_lookback = 0;
  std::uint64_t fallback_iterations = 0;
  double max_error_ratio = 0.0;     // worst |error| / (delta / 2)
};

VerifyReport verify(const MeshletContainer& container, const TriangleMesh& mesh);

nlohmann::json to_json(const RunReport& r);
nlohmann::json to_json(const VerifyReport& r);
std::string format_table(const RunReport& r);

}  // namespace mlt
