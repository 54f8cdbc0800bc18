#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mlt/core_mesh.hpp"
#include "mlt/meshlet.hpp"

namespace mlt {

struct DualEdge {
  std::uint32_t a = 0;  // a < b
  std::uint32_t b = 0;
  EdgeSlot slot_a = EdgeSlot::kEdge01;
  EdgeSlot slot_b = EdgeSlot::kEdge01;
};

class DualGraph {
 public:
  DualGraph() = default;
  DualGraph(std::size_t node_count, std::vector<DualEdge> edges);

  std::size_t node_count() const { return incident_.size(); }
  std::size_t edge_count() const { return edges_.size(); }
  const std::vector<DualEdge>& edges() const { return edges_; }
  // Edge ids incident to `node`, ascending.
  const std::vector<std::uint32_t>& incident(std::uint32_t node) const { return incident_[node]; }
  std::uint32_t other(std::uint32_t edge, std::uint32_t node) const {
    return edges_[edge].a == node ? edges_[edge].b : edges_[edge].a;
  }

 private:
  std::vector<DualEdge> edges_;
  std::vector<std::vector<std::uint32_t>> incident_;
};

// One node per meshlet triangle; one edge per manifold edge shared by two
// triangles of the same meshlet.
DualGraph build_dual(const Meshlet& meshlet, const AdjacencyMap& adjacency);
// Same, with adjacency derived from the meshlet's local triangles alone.
DualGraph build_dual(const std::vector<LocalTriangle>& triangles);

enum class Optimality { kProvenOptimal, kHeuristic, kTimeoutBest };
const char* to_string(Optimality o);

using StripPath = std::vector<std::uint32_t>;

struct StripSolution {
  std::vector<bool> selected;  // one bit per dual edge
  Optimality optimality = Optimality::kHeuristic;
  std::vector<StripPath> paths;

  std::size_t selected_count() const;
  // Number of strips minus one.
  std::size_t restart_count() const { return paths.empty() ? 0 : paths.size() - 1; }
};

struct ForkViolation {
  std::uint32_t node;
};
struct CycleViolation {
  std::vector<std::uint32_t> edges;
};
struct SizeViolation {
  std::size_t expected;
  std::size_t actual;
};
// A strip too long for the flow values to decrease by epsilon along it.
struct FlowViolation {
  std::size_t path_edges;
};
using Violation = std::variant<ForkViolation, CycleViolation, SizeViolation, FlowViolation>;
std::string describe(const Violation& v);

struct FlowCertificate {
  double flow_total = 1.0;    // F
  double epsilon = 1.0 / 1024;
  std::vector<double> x;      // per edge
  std::vector<double> y_ab;   // flow on the `a` side of each edge
  std::vector<double> y_ba;   // flow on the `b` side of each edge
};

struct ValidationResult {
  std::optional<Violation> violation;
  std::optional<FlowCertificate> certificate;  // present when no violation
  bool ok() const { return !violation.has_value(); }
};

// Checks the no-fork and acyclicity rules, then builds the flow values that
// satisfy the coupling and node-flow constraints of the MILP.
ValidationResult validate_solution(const DualGraph& g, const std::vector<bool>& selected,
                                   double flow_total = 1.0, double epsilon = 1.0 / 1024);

// Decomposes a valid selection into ordered node paths. Each path starts at
// its lowest-id endpoint; paths are ordered by their first node.
std::vector<StripPath> extract_paths(const DualGraph& g, const std::vector<bool>& selected);

struct ExactOptions {
  std::chrono::duration<double> time_budget = std::chrono::seconds(10);
  // Zero disables the node limit. A node limit gives reproducible timeouts.
  std::uint64_t node_limit = 0;
};

struct ExactStats {
  std::uint64_t nodes = 0;
  bool timed_out = false;
};

StripSolution solve_exact(const DualGraph& g, const ExactOptions& options = {},
                          ExactStats* stats = nullptr);
StripSolution solve_eta(const DualGraph& g);

// Minimum restart count over all fork-free acyclic edge subsets.
// Throws std::invalid_argument for graphs with more than 20 edges.
std::size_t brute_force_min_restarts(const DualGraph& g);

// Finalizes a selection: validates and extracts paths. Throws
// std::invalid_argument with the violation description on failure.
StripSolution make_solution(const DualGraph& g, std::vector<bool> selected, Optimality optimality);

// --- MILP model ---

enum class Sense { kLessEqual, kEqual };

struct LinearTerm {
  double coefficient;
  std::uint32_t variable;
};

struct Constraint {
  std::string name;
  std::vector<LinearTerm> terms;
  Sense sense;
  double rhs;
};

struct MilpModel {
  std::size_t node_count = 0;
  std::vector<DualEdge> edges;
  double flow_total = 1.0;
  double epsilon = 1.0 / 1024;
  // Variable 3e is x_e, 3e+1 is y_e on the a side, 3e+2 is y_e on the b side.
  std::vector<std::string> variable_names;
  std::vector<bool> is_binary;
  std::vector<double> objective;
  std::vector<Constraint> constraints;

  std::size_t binary_count() const;
  std::size_t continuous_count() const;
  DualGraph graph() const { return DualGraph(node_count, edges); }
  static std::uint32_t x_var(std::uint32_t e) { return 3 * e; }
  static std::uint32_t y_ab_var(std::uint32_t e) { return 3 * e + 1; }
  static std::uint32_t y_ba_var(std::uint32_t e) { return 3 * e + 2; }
};

// Throws std::invalid_argument unless 0 < epsilon <= flow_total / (T + 1).
MilpModel build_milp(const DualGraph& g, double flow_total = 1.0, double epsilon = 1.0 / 1024);

// Evaluates every constraint of the model at the given variable values.
// Returns the name of the first violated constraint, if any.
std::optional<std::string> check_assignment(const MilpModel& m, const std::vector<double>& values,
                                            double tolerance = 0.0);
std::vector<double> certificate_values(const FlowCertificate& c);

std::string format_lp(const MilpModel& m);
void export_lp(const MilpModel& m, const std::filesystem::path& path);

class SolutionFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Solution files hold an optional "# optimal" header line followed by one
// "name value" pair per line.
StripSolution parse_solution(const MilpModel& m, std::string_view text);
StripSolution import_solution(const MilpModel& m, const std::filesystem::path& path);
std::string format_solution(const MilpModel& m, const StripSolution& s);

}  // namespace mlt
