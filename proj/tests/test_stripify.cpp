#include <algorithm>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "corpus.hpp"
#include "doctest.h"
#include "mlt/stripify.hpp"

using namespace mlt;

namespace {

DualGraph graph(std::size_t nodes, std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs) {
  std::vector<DualEdge> edges;
  for (auto [a, b] : pairs) edges.push_back({std::min(a, b), std::max(a, b), EdgeSlot::kEdge01, EdgeSlot::kEdge01});
  return DualGraph(nodes, std::move(edges));
}

DualGraph tetra_dual() {
  std::vector<Vec3> p{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  auto mesh = TriangleMesh::from_positions(p, {{{0, 2, 1}}, {{0, 1, 3}}, {{1, 2, 3}}, {{0, 3, 2}}});
  return build_dual(localize(mesh, {0, 1, 2, 3}), build_adjacency(mesh));
}

DualGraph cycle(std::size_t n) {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t i = 0; i < n; ++i) pairs.emplace_back(i, static_cast<std::uint32_t>((i + 1) % n));
  return graph(n, pairs);
}

// Independent oracle: try every subset, keep those where every node has degree
// <= 2 and the selection is a forest (edges = nodes - components).
std::size_t oracle_min_restarts(const DualGraph& g) {
  const std::size_t n = g.node_count(), e = g.edge_count();
  std::size_t best = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << e); ++mask) {
    std::size_t count = static_cast<std::size_t>(__builtin_popcountll(mask));
    if (count <= best) continue;
    std::vector<int> degree(n, 0);
    std::vector<std::vector<std::uint32_t>> adj(n);
    bool ok = true;
    for (std::size_t i = 0; i < e && ok; ++i) {
      if (!(mask >> i & 1)) continue;
      const auto& d = g.edges()[i];
      ok = ++degree[d.a] <= 2 && ++degree[d.b] <= 2;
      adj[d.a].push_back(d.b);
      adj[d.b].push_back(d.a);
    }
    if (!ok) continue;
    std::vector<bool> seen(n, false);
    std::size_t components = 0;
    for (std::uint32_t s = 0; s < n; ++s) {
      if (seen[s]) continue;
      ++components;
      std::vector<std::uint32_t> stack{s};
      seen[s] = true;
      while (!stack.empty()) {
        auto v = stack.back();
        stack.pop_back();
        for (auto w : adj[v]) {
          if (!seen[w]) {
            seen[w] = true;
            stack.push_back(w);
          }
        }
      }
    }
    if (count == n - components) best = count;
  }
  return n == 0 ? 0 : n - best - 1;
}

void check_structure(const DualGraph& g, const StripSolution& s) {
  REQUIRE(s.selected.size() == g.edge_count());
  CHECK(validate_solution(g, s.selected).ok());
  CHECK(s.restart_count() == g.node_count() - s.selected_count() - 1);
  std::vector<int> covered(g.node_count(), 0);
  for (const auto& p : s.paths) {
    for (auto v : p) ++covered[v];
  }
  CHECK(std::all_of(covered.begin(), covered.end(), [](int c) { return c == 1; }));
}

std::vector<DualGraph> small_patch_duals(corpus::Rng& rng, int count) {
  std::vector<DualGraph> out;
  std::uniform_int_distribution<int> size(1, 14);
  while (static_cast<int>(out.size()) < count) {
    auto mesh = corpus::random_patch(rng, size(rng));
    auto m = localize(mesh, [&] {
      std::vector<std::uint32_t> all(mesh.triangle_count());
      std::iota(all.begin(), all.end(), 0u);
      return all;
    }());
    auto g = build_dual(m, build_adjacency(mesh));
    if (g.edge_count() <= 20) out.push_back(std::move(g));
  }
  return out;
}

}  // namespace

TEST_CASE("dual graphs of small meshlets") {
  auto tetra = tetra_dual();
  CHECK(tetra.node_count() == 4);
  CHECK(tetra.edge_count() == 6);

  std::vector<LocalTriangle> fan{{0, 1, 2}, {0, 2, 3}, {0, 3, 4}};
  auto g = build_dual(fan);
  CHECK(g.node_count() == 3);
  REQUIRE(g.edge_count() == 2);
  CHECK(g.edges()[0].a == 0);
  CHECK(g.edges()[0].b == 1);
  CHECK(g.edges()[0].slot_a == EdgeSlot::kEdge20);
  CHECK(g.edges()[0].slot_b == EdgeSlot::kEdge01);

  auto single = build_dual(std::vector<LocalTriangle>{{0, 1, 2}});
  CHECK(single.node_count() == 1);
  CHECK(single.edge_count() == 0);
}

TEST_CASE("dual graph ignores adjacency leaving the meshlet") {
  auto mesh = corpus::grid(4, 4);
  auto adjacency = build_adjacency(mesh);
  auto m = localize(mesh, {0, 1, 2, 3});
  auto g = build_dual(m, adjacency);
  CHECK(g.node_count() == 4);
  for (const auto& e : g.edges()) CHECK(e.b < 4);
  CHECK(g.edge_count() == build_dual(m.triangles).edge_count());
}

TEST_CASE("milp model sizes") {
  auto m = build_milp(tetra_dual());
  CHECK(m.binary_count() == 6);
  CHECK(m.continuous_count() == 12);
  CHECK(m.constraints.size() == 14);
  CHECK(m.flow_total == 1.0);
  CHECK(m.epsilon == 1.0 / 1024);

  auto empty = build_milp(graph(1, {}));
  CHECK(empty.binary_count() == 0);
  CHECK(std::all_of(empty.objective.begin(), empty.objective.end(), [](double c) { return c == 0.0; }));
  CHECK_THROWS_AS(build_milp(graph(4, {}), 1.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(build_milp(graph(4, {}), 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("LP file contents") {
  auto m = build_milp(tetra_dual());
  std::string lp = format_lp(m);
  CHECK(lp.find("Maximize\n obj: x0 + x1 + x2 + x3 + x4 + x5\n") != std::string::npos);
  CHECK(lp.find(" flow_0: y0_ab + y0_ba - x0 = 0\n") != std::string::npos);
  CHECK(lp.find(" nofork_0: ") != std::string::npos);
  CHECK(lp.find(" node_3: ") != std::string::npos);
  CHECK(lp.find("<= 0.9990234375") != std::string::npos);
  CHECK(lp.find(" y5_ba >= 0\n") != std::string::npos);

  auto binary = lp.substr(lp.find("Binary\n") + 7);
  binary = binary.substr(0, binary.find("End"));
  std::istringstream names(binary);
  std::vector<std::string> listed{std::istream_iterator<std::string>(names), {}};
  CHECK(listed == std::vector<std::string>{"x0", "x1", "x2", "x3", "x4", "x5"});
  CHECK(lp.size() > 0);
  CHECK(lp.substr(lp.size() - 4) == "End\n");

  // Long objectives wrap.
  auto big = build_milp(build_dual(localize(corpus::grid(8, 8), [] {
    std::vector<std::uint32_t> all(128);
    std::iota(all.begin(), all.end(), 0u);
    return all;
  }()).triangles));
  std::istringstream lines(format_lp(big));
  for (std::string line; std::getline(lines, line);) CHECK(line.size() < 255);
}

TEST_CASE("solution files") {
  auto m = build_milp(tetra_dual());
  auto g = m.graph();
  auto exact = solve_exact(g);
  REQUIRE(exact.selected_count() == 3);

  std::string text = format_solution(m, exact);
  CHECK(text.rfind("# optimal\n", 0) == 0);
  auto parsed = parse_solution(m, text);
  CHECK(parsed.restart_count() == 0);
  CHECK(parsed.optimality == Optimality::kProvenOptimal);
  CHECK(parsed.selected == exact.selected);

  std::string all = "x0 1\nx1 1\nx2 1\nx3 1\nx4 1\nx5 1\n";
  CHECK_THROWS_AS(parse_solution(m, all), SolutionFormatError);

  auto none = parse_solution(m, "x0 0\n");
  CHECK(none.restart_count() == 3);
  CHECK(none.optimality == Optimality::kHeuristic);
  CHECK(parse_solution(m, "").restart_count() == 3);

  CHECK_THROWS_AS(parse_solution(m, "x9 1\n"), SolutionFormatError);
  CHECK_THROWS_AS(parse_solution(m, "x0 0.5\n"), SolutionFormatError);
  CHECK_THROWS_AS(parse_solution(m, "x0\n"), SolutionFormatError);
  CHECK_THROWS_AS(parse_solution(m, "x0 one\n"), SolutionFormatError);
  // Near-integral values and continuous variables are accepted.
  CHECK(parse_solution(m, "x0 0.9999999\ny0_ab 0.5\n").selected_count() == 1);

  auto dir = std::filesystem::temp_directory_path() / "mlt_stripify_test";
  std::filesystem::create_directories(dir);
  std::ofstream(dir / "t.sol") << text;
  CHECK(import_solution(m, dir / "t.sol").selected == exact.selected);
  export_lp(m, dir / "t.lp");
  CHECK(std::filesystem::file_size(dir / "t.lp") == format_lp(m).size());
  std::filesystem::remove_all(dir);
}

TEST_CASE("exact solver examples") {
  auto tetra = solve_exact(tetra_dual());
  CHECK(tetra.selected_count() == 3);
  CHECK(tetra.restart_count() == 0);
  CHECK(tetra.optimality == Optimality::kProvenOptimal);
  REQUIRE(tetra.paths.size() == 1);
  CHECK(tetra.paths[0].size() == 4);

  auto ring = solve_exact(cycle(6));
  CHECK(ring.selected_count() == 5);
  CHECK(ring.restart_count() == 0);

  auto pair = solve_exact(graph(2, {{0, 1}}));
  CHECK(pair.selected_count() == 1);

  auto single = solve_exact(graph(1, {}));
  CHECK(single.restart_count() == 0);
  CHECK(single.paths.size() == 1);
}

TEST_CASE("tunneling heuristic examples") {
  auto tetra = solve_eta(tetra_dual());
  CHECK(tetra.selected_count() == 3);
  CHECK(tetra.optimality == Optimality::kHeuristic);

  for (int k : {1, 2, 5, 40, 200}) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::uint32_t i = 0; i + 1 < static_cast<std::uint32_t>(k); ++i) pairs.emplace_back(i, i + 1);
    auto s = solve_eta(graph(k, pairs));
    CHECK(s.selected_count() == static_cast<std::size_t>(k - 1));
    CHECK(s.restart_count() == 0);
  }
  auto ring = solve_eta(cycle(30));
  CHECK(ring.selected_count() == 29);
}

TEST_CASE("brute force examples") {
  CHECK(brute_force_min_restarts(tetra_dual()) == 0);
  CHECK(brute_force_min_restarts(graph(4, {{0, 1}, {2, 3}})) == 1);
  CHECK(brute_force_min_restarts(graph(1, {})) == 0);
  // Star: a node of degree 3 forces one leaf off the strip.
  CHECK(brute_force_min_restarts(graph(4, {{0, 1}, {0, 2}, {0, 3}})) == 1);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> many;
  for (std::uint32_t i = 0; i < 21; ++i) many.emplace_back(i, i + 1);
  CHECK_THROWS_AS(brute_force_min_restarts(graph(22, many)), std::invalid_argument);
}

TEST_CASE("solvers agree with the enumeration oracles") {
  corpus::Rng rng(2024);
  for (const auto& g : small_patch_duals(rng, 150)) {
    auto expected = oracle_min_restarts(g);
    CHECK(brute_force_min_restarts(g) == expected);
    auto exact = solve_exact(g);
    check_structure(g, exact);
    CHECK(exact.optimality == Optimality::kProvenOptimal);
    CHECK(exact.restart_count() == expected);
    auto eta = solve_eta(g);
    check_structure(g, eta);
    CHECK(eta.restart_count() >= exact.restart_count());
  }
}

TEST_CASE("exact solver on full-size meshlets") {
  corpus::Rng rng(77);
  for (const auto& [name, mesh] : corpus::standard_set(rng)) {
    auto adjacency = build_adjacency(mesh);
    for (const auto& m : partition(mesh, adjacency, MeshletLimits{})) {
      auto g = build_dual(m, adjacency);
      ExactOptions options;
      options.time_budget = std::chrono::seconds(2);
      auto exact = solve_exact(g, options);
      auto eta = solve_eta(g);
      CAPTURE(name);
      check_structure(g, exact);
      check_structure(g, eta);
      CHECK(eta.restart_count() >= exact.restart_count());
    }
  }
}

TEST_CASE("node limit gives a timeout-best incumbent") {
  corpus::Rng rng(4);
  auto mesh = corpus::nonmanifold_fuzz(rng, 10);
  auto adjacency = build_adjacency(mesh);
  auto meshlets = partition(mesh, adjacency, MeshletLimits{});
  auto g = build_dual(meshlets[0], adjacency);
  ExactOptions options;
  options.node_limit = 1;
  ExactStats stats;
  auto s = solve_exact(g, options, &stats);
  check_structure(g, s);
  if (stats.timed_out) {
    CHECK(s.optimality == Optimality::kTimeoutBest);
    CHECK(s.restart_count() <= solve_eta(g).restart_count());
  } else {
    CHECK(s.optimality == Optimality::kProvenOptimal);
  }
}

TEST_CASE("validation reports violations") {
  auto triangle_cycle = cycle(3);
  auto cyc = validate_solution(triangle_cycle, {true, true, true});
  REQUIRE_FALSE(cyc.ok());
  REQUIRE(std::holds_alternative<CycleViolation>(*cyc.violation));
  auto edges = std::get<CycleViolation>(*cyc.violation).edges;
  CHECK(std::set<std::uint32_t>(edges.begin(), edges.end()) == std::set<std::uint32_t>{0, 1, 2});

  auto star = graph(4, {{0, 1}, {0, 2}, {0, 3}});
  auto fork = validate_solution(star, {true, true, true});
  REQUIRE_FALSE(fork.ok());
  REQUIRE(std::holds_alternative<ForkViolation>(*fork.violation));
  CHECK(std::get<ForkViolation>(*fork.violation).node == 0);
  CHECK(describe(*fork.violation).find("0") != std::string::npos);

  auto wrong_size = validate_solution(star, {true});
  REQUIRE_FALSE(wrong_size.ok());
  CHECK(std::holds_alternative<SizeViolation>(*wrong_size.violation));

  CHECK_THROWS_AS(make_solution(star, {true, true, true}, Optimality::kHeuristic), std::invalid_argument);
}

TEST_CASE("flow certificates satisfy the model exactly") {
  for (std::size_t n : {2u, 10u, 256u, 1023u}) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::uint32_t i = 0; i + 1 < n; ++i) pairs.emplace_back(i, i + 1);
    auto g = graph(n, pairs);
    std::vector<bool> all(g.edge_count(), true);
    auto r = validate_solution(g, all);
    REQUIRE(r.ok());
    REQUIRE(r.certificate.has_value());
    if (n + 1 <= 1024) {
      auto m = build_milp(g);
      CHECK_FALSE(check_assignment(m, certificate_values(*r.certificate)).has_value());
    }
  }
  // A strip with more edges than F / epsilon cannot carry decreasing flow.
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
  for (std::uint32_t i = 0; i < 1024; ++i) pairs.emplace_back(i, i + 1);
  auto g = graph(1025, pairs);
  auto r = validate_solution(g, std::vector<bool>(g.edge_count(), true));
  REQUIRE_FALSE(r.ok());
  CHECK(std::holds_alternative<FlowViolation>(*r.violation));

  corpus::Rng rng(8);
  for (const auto& d : small_patch_duals(rng, 40)) {
    auto s = solve_exact(d);
    auto v = validate_solution(d, s.selected);
    REQUIRE(v.certificate.has_value());
    CHECK_FALSE(check_assignment(build_milp(d), certificate_values(*v.certificate)).has_value());
  }
}

TEST_CASE("check_assignment catches a broken flow") {
  auto g = graph(3, {{0, 1}, {1, 2}});
  auto m = build_milp(g);
  auto v = validate_solution(g, {true, true});
  auto values = certificate_values(*v.certificate);
  values[MilpModel::y_ab_var(0)] += 0.25;
  CHECK(check_assignment(m, values) == std::optional<std::string>("flow_0"));
}

TEST_CASE("path extraction") {
  auto tetra = tetra_dual();
  auto s = solve_exact(tetra);
  auto paths = extract_paths(tetra, s.selected);
  REQUIRE(paths.size() == 1);
  CHECK(paths[0].size() == 4);

  auto none = extract_paths(cycle(3), {false, false, false});
  CHECK(none == std::vector<StripPath>{{0}, {1}, {2}});

  auto two = extract_paths(graph(5, {{3, 1}, {1, 4}, {0, 2}}), {true, true, true});
  CHECK(two == std::vector<StripPath>{{0, 2}, {3, 1, 4}});
}
