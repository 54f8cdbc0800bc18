#include "mlt/stripify.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace mlt {

DualGraph::DualGraph(std::size_t node_count, std::vector<DualEdge> edges)
    : edges_(std::move(edges)), incident_(node_count) {
  for (std::uint32_t e = 0; e < edges_.size(); ++e) {
    auto& edge = edges_[e];
    if (edge.a >= node_count || edge.b >= node_count || edge.a == edge.b) {
      throw std::invalid_argument("dual edge " + std::to_string(e) + " has invalid endpoints");
    }
    if (edge.a > edge.b) {
      std::swap(edge.a, edge.b);
      std::swap(edge.slot_a, edge.slot_b);
    }
    incident_[edge.a].push_back(e);
    incident_[edge.b].push_back(e);
  }
  for (const auto& inc : incident_) {
    if (inc.size() > 3) throw std::invalid_argument("dual node with more than 3 edges");
  }
}

DualGraph build_dual(const Meshlet& meshlet, const AdjacencyMap& adjacency) {
  std::unordered_map<std::uint32_t, std::uint32_t> local;
  for (std::uint32_t i = 0; i < meshlet.source_triangles.size(); ++i) {
    local.emplace(meshlet.source_triangles[i], i);
  }
  std::vector<DualEdge> edges;
  for (std::uint32_t t = 0; t < meshlet.source_triangles.size(); ++t) {
    for (int s = 0; s < 3; ++s) {
      const auto& n = adjacency.across(meshlet.source_triangles[t], static_cast<EdgeSlot>(s));
      if (!n) continue;
      auto it = local.find(n->triangle);
      if (it == local.end() || it->second <= t) continue;
      edges.push_back({t, it->second, static_cast<EdgeSlot>(s), n->slot});
    }
  }
  return DualGraph(meshlet.triangle_count(), std::move(edges));
}

DualGraph build_dual(const std::vector<LocalTriangle>& triangles) {
  struct Use {
    std::uint32_t triangle;
    int slot;
    bool forward;
  };
  std::map<std::pair<int, int>, std::vector<Use>> uses;
  for (std::uint32_t t = 0; t < triangles.size(); ++t) {
    for (int k = 0; k < 3; ++k) {
      int a = triangles[t][k];
      int b = triangles[t][(k + 1) % 3];
      uses[{std::min(a, b), std::max(a, b)}].push_back({t, k, a < b});
    }
  }
  std::vector<DualEdge> edges;
  for (const auto& [key, u] : uses) {
    if (u.size() != 2 || u[0].forward == u[1].forward || u[0].triangle == u[1].triangle) continue;
    edges.push_back({u[0].triangle, u[1].triangle, static_cast<EdgeSlot>(u[0].slot),
                     static_cast<EdgeSlot>(u[1].slot)});
  }
  std::sort(edges.begin(), edges.end(), [](const DualEdge& x, const DualEdge& y) {
    auto kx = std::pair(std::min(x.a, x.b), x.a < x.b ? x.slot_a : x.slot_b);
    auto ky = std::pair(std::min(y.a, y.b), y.a < y.b ? y.slot_a : y.slot_b);
    return kx < ky;
  });
  return DualGraph(triangles.size(), std::move(edges));
}

const char* to_string(Optimality o) {
  switch (o) {
    case Optimality::kProvenOptimal:
      return "proven-optimal";
    case Optimality::kHeuristic:
      return "heuristic";
    case Optimality::kTimeoutBest:
      return "timeout-best";
  }
  return "?";
}

std::size_t StripSolution::selected_count() const {
  return static_cast<std::size_t>(std::count(selected.begin(), selected.end(), true));
}

std::string describe(const Violation& v) {
  struct {
    std::string operator()(const ForkViolation& f) const {
      return "fork at node " + std::to_string(f.node);
    }
    std::string operator()(const CycleViolation& c) const {
      std::string s = "cycle through edges";
      for (auto e : c.edges) s += " " + std::to_string(e);
      return s;
    }
    std::string operator()(const SizeViolation& s) const {
      return "expected " + std::to_string(s.expected) + " edge bits, got " +
             std::to_string(s.actual);
    }
    std::string operator()(const FlowViolation& f) const {
      return "strip of " + std::to_string(f.path_edges) + " edges exceeds the flow budget";
    }
  } visitor;
  return std::visit(visitor, v);
}

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  }
  bool unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    parent[b] = a;
    return true;
  }
};

// Edges on the selected-forest path from `from` to `to`.
std::vector<std::uint32_t> forest_path(const DualGraph& g, const std::vector<bool>& selected,
                                       std::uint32_t limit_edge, std::uint32_t from,
                                       std::uint32_t to) {
  std::vector<std::int64_t> via(g.node_count(), -1);
  std::vector<bool> seen(g.node_count(), false);
  std::deque<std::uint32_t> queue{from};
  seen[from] = true;
  while (!queue.empty()) {
    auto n = queue.front();
    queue.pop_front();
    if (n == to) break;
    for (auto e : g.incident(n)) {
      if (e >= limit_edge || !selected[e]) continue;
      auto m = g.other(e, n);
      if (seen[m]) continue;
      seen[m] = true;
      via[m] = e;
      queue.push_back(m);
    }
  }
  std::vector<std::uint32_t> path;
  for (auto n = to; n != from && via[n] >= 0;) {
    auto e = static_cast<std::uint32_t>(via[n]);
    path.push_back(e);
    n = g.other(e, n);
  }
  return path;
}

}  // namespace

std::vector<StripPath> extract_paths(const DualGraph& g, const std::vector<bool>& selected) {
  const auto n = static_cast<std::uint32_t>(g.node_count());
  std::vector<int> degree(n, 0);
  for (std::uint32_t e = 0; e < g.edge_count(); ++e) {
    if (selected[e]) {
      ++degree[g.edges()[e].a];
      ++degree[g.edges()[e].b];
    }
  }
  std::vector<bool> visited(n, false);
  std::vector<StripPath> paths;
  for (std::uint32_t start = 0; start < n; ++start) {
    if (visited[start] || degree[start] > 1) continue;
    StripPath path{start};
    visited[start] = true;
    std::uint32_t cur = start;
    bool advanced = true;
    while (advanced) {
      advanced = false;
      for (auto e : g.incident(cur)) {
        if (!selected[e]) continue;
        auto next = g.other(e, cur);
        if (visited[next]) continue;
        visited[next] = true;
        path.push_back(next);
        cur = next;
        advanced = true;
        break;
      }
    }
    paths.push_back(std::move(path));
  }
  return paths;
}

ValidationResult validate_solution(const DualGraph& g, const std::vector<bool>& selected,
                                   double flow_total, double epsilon) {
  ValidationResult result;
  if (selected.size() != g.edge_count()) {
    result.violation = SizeViolation{g.edge_count(), selected.size()};
    return result;
  }
  const auto n = static_cast<std::uint32_t>(g.node_count());
  for (std::uint32_t v = 0; v < n; ++v) {
    int d = 0;
    for (auto e : g.incident(v)) d += selected[e];
    if (d > 2) {
      result.violation = ForkViolation{v};
      return result;
    }
  }
  UnionFind uf(n);
  for (std::uint32_t e = 0; e < g.edge_count(); ++e) {
    if (!selected[e]) continue;
    const auto& edge = g.edges()[e];
    if (!uf.unite(edge.a, edge.b)) {
      auto cycle = forest_path(g, selected, e, edge.a, edge.b);
      cycle.push_back(e);
      std::sort(cycle.begin(), cycle.end());
      result.violation = CycleViolation{std::move(cycle)};
      return result;
    }
  }

  // Along each strip v0..vm the flow kept on the near side of edge k is
  // F - (k+1)eps, so every interior node sums to F - eps and the far end to m*eps.
  FlowCertificate cert;
  cert.flow_total = flow_total;
  cert.epsilon = epsilon;
  cert.x.assign(g.edge_count(), 0.0);
  cert.y_ab.assign(g.edge_count(), 0.0);
  cert.y_ba.assign(g.edge_count(), 0.0);
  for (const auto& path : extract_paths(g, selected)) {
    const std::size_t m = path.size() - 1;
    if (m > 0 && static_cast<double>(m + 1) * epsilon > flow_total) {
      result.violation = FlowViolation{m};
      return result;
    }
    for (std::size_t k = 0; k + 1 < path.size(); ++k) {
      std::uint32_t from = path[k];
      std::uint32_t to = path[k + 1];
      std::uint32_t edge_id = 0;
      for (auto e : g.incident(from)) {
        if (selected[e] && g.other(e, from) == to) edge_id = e;
      }
      double near = flow_total - static_cast<double>(k + 1) * epsilon;
      double far = flow_total - near;
      cert.x[edge_id] = 1.0;
      if (g.edges()[edge_id].a == from) {
        cert.y_ab[edge_id] = near;
        cert.y_ba[edge_id] = far;
      } else {
        cert.y_ba[edge_id] = near;
        cert.y_ab[edge_id] = far;
      }
    }
  }
  result.certificate = std::move(cert);
  return result;
}

StripSolution make_solution(const DualGraph& g, std::vector<bool> selected,
                            Optimality optimality) {
  auto check = validate_solution(g, selected);
  if (!check.ok()) throw std::invalid_argument(describe(*check.violation));
  StripSolution s;
  s.paths = extract_paths(g, selected);
  s.selected = std::move(selected);
  s.optimality = optimality;
  return s;
}

// --- exhaustive oracle ---

namespace {

struct BruteForce {
  const DualGraph& g;
  std::vector<int> degree;
  std::vector<std::uint32_t> parent;
  std::size_t best = 0;
  std::size_t count = 0;

  std::uint32_t find(std::uint32_t x) const {
    while (parent[x] != x) x = parent[x];
    return x;
  }

  void run(std::uint32_t e) {
    best = std::max(best, count);
    if (e == g.edge_count()) return;
    const auto& edge = g.edges()[e];
    auto ra = find(edge.a);
    auto rb = find(edge.b);
    if (degree[edge.a] < 2 && degree[edge.b] < 2 && ra != rb) {
      ++degree[edge.a];
      ++degree[edge.b];
      parent[rb] = ra;
      ++count;
      run(e + 1);
      --count;
      parent[rb] = rb;
      --degree[edge.a];
      --degree[edge.b];
    }
    run(e + 1);
  }
};

}  // namespace

std::size_t brute_force_min_restarts(const DualGraph& g) {
  if (g.edge_count() > 20) throw std::invalid_argument("brute force is limited to 20 edges");
  if (g.node_count() == 0) return 0;
  BruteForce bf{g, std::vector<int>(g.node_count(), 0), std::vector<std::uint32_t>(g.node_count())};
  std::iota(bf.parent.begin(), bf.parent.end(), 0u);
  bf.run(0);
  return g.node_count() - bf.best - 1;
}

// --- branch and bound ---

namespace {

class BranchAndBound {
 public:
  BranchAndBound(const DualGraph& g, const ExactOptions& options)
      : g_(g),
        options_(options),
        n_(static_cast<std::uint32_t>(g.node_count())),
        state_(g.edge_count(), kUndecided),
        deg_sel_(n_, 0),
        deg_avail_(n_, 0),
        other_end_(n_) {
    std::iota(other_end_.begin(), other_end_.end(), 0u);
    for (std::uint32_t v = 0; v < n_; ++v) {
      deg_avail_[v] = static_cast<int>(g.incident(v).size());
    }
    start_ = std::chrono::steady_clock::now();
  }

  void set_incumbent(const std::vector<bool>& selected) {
    best_ = selected;
    best_count_ = static_cast<std::size_t>(std::count(selected.begin(), selected.end(), true));
  }

  // Returns true when the search completed.
  bool run() {
    if (bound() <= best_count_) return true;
    search();
    return !aborted_;
  }

  const std::vector<bool>& best() const { return best_; }
  std::uint64_t nodes() const { return nodes_; }

 private:
  enum EdgeState : std::uint8_t { kUndecided, kSelected, kExcluded };
  enum class Op : std::uint8_t { kSelect, kExclude, kEnds };
  struct TrailEntry {
    Op op;
    std::uint32_t a;
    std::uint32_t b;
    std::uint32_t c;
  };

  void exclude(std::uint32_t e) {
    state_[e] = kExcluded;
    --deg_avail_[g_.edges()[e].a];
    --deg_avail_[g_.edges()[e].b];
    trail_.push_back({Op::kExclude, e, 0, 0});
  }

  void select(std::uint32_t e) {
    const auto& edge = g_.edges()[e];
    state_[e] = kSelected;
    ++deg_sel_[edge.a];
    ++deg_sel_[edge.b];
    ++count_;
    trail_.push_back({Op::kSelect, e, 0, 0});

    std::uint32_t pa = other_end_[edge.a];
    std::uint32_t pb = other_end_[edge.b];
    trail_.push_back({Op::kEnds, pa, other_end_[pa], 0});
    trail_.push_back({Op::kEnds, pb, other_end_[pb], 0});
    other_end_[pa] = pb;
    other_end_[pb] = pa;

    for (auto v : {edge.a, edge.b}) {
      if (deg_sel_[v] == 2) {
        for (auto f : g_.incident(v)) {
          if (state_[f] == kUndecided) exclude(f);
        }
      }
    }
    // An edge joining the two ends of the merged strip would close a cycle.
    for (auto f : g_.incident(pa)) {
      if (state_[f] == kUndecided && g_.other(f, pa) == pb) exclude(f);
    }
  }

  void undo_to(std::size_t mark) {
    while (trail_.size() > mark) {
      TrailEntry t = trail_.back();
      trail_.pop_back();
      switch (t.op) {
        case Op::kExclude:
          state_[t.a] = kUndecided;
          ++deg_avail_[g_.edges()[t.a].a];
          ++deg_avail_[g_.edges()[t.a].b];
          break;
        case Op::kSelect:
          state_[t.a] = kUndecided;
          --deg_sel_[g_.edges()[t.a].a];
          --deg_sel_[g_.edges()[t.a].b];
          --count_;
          break;
        case Op::kEnds:
          other_end_[t.a] = t.b;
          break;
      }
    }
  }

  // Per connected component of selected+undecided edges, a linear forest has
  // at most (size - 1) edges and at most half the capped available degree.
  std::size_t bound() {
    comp_.assign(n_, -1);
    std::size_t total = 0;
    for (std::uint32_t s = 0; s < n_; ++s) {
      if (comp_[s] >= 0) continue;
      comp_[s] = static_cast<int>(s);
      stack_.assign(1, s);
      std::size_t size = 0;
      std::size_t degree_sum = 0;
      while (!stack_.empty()) {
        auto v = stack_.back();
        stack_.pop_back();
        ++size;
        degree_sum += static_cast<std::size_t>(std::min(2, deg_avail_[v]));
        for (auto e : g_.incident(v)) {
          if (state_[e] == kExcluded) continue;
          auto w = g_.other(e, v);
          if (comp_[w] < 0) {
            comp_[w] = static_cast<int>(s);
            stack_.push_back(w);
          }
        }
      }
      total += std::min(size - 1, degree_sum / 2);
    }
    return total;
  }

  std::optional<std::uint32_t> pick_edge() const {
    // Extend an open strip end first, preferring the most constrained node.
    std::optional<std::uint32_t> node;
    auto better = [&](std::uint32_t v) {
      if (!node) return true;
      bool end_v = deg_sel_[v] == 1;
      bool end_n = deg_sel_[*node] == 1;
      if (end_v != end_n) return end_v;
      return deg_avail_[v] < deg_avail_[*node];
    };
    for (std::uint32_t v = 0; v < n_; ++v) {
      if (deg_sel_[v] >= 2 || deg_avail_[v] <= deg_sel_[v]) continue;
      if (better(v)) node = v;
    }
    if (!node) return std::nullopt;
    std::optional<std::uint32_t> edge;
    int edge_score = 0;
    for (auto e : g_.incident(*node)) {
      if (state_[e] != kUndecided) continue;
      int score = deg_avail_[g_.other(e, *node)];
      if (!edge || score < edge_score) {
        edge = e;
        edge_score = score;
      }
    }
    return edge;
  }

  bool out_of_budget() {
    if (options_.node_limit != 0 && nodes_ >= options_.node_limit) return true;
    if ((nodes_ & 1023) == 0) {
      auto elapsed = std::chrono::steady_clock::now() - start_;
      if (elapsed > options_.time_budget) return true;
    }
    return false;
  }

  void search() {
    ++nodes_;
    if (out_of_budget()) {
      aborted_ = true;
      return;
    }
    if (count_ > best_count_) {
      best_count_ = count_;
      for (std::uint32_t e = 0; e < state_.size(); ++e) best_[e] = state_[e] == kSelected;
    }
    if (bound() <= best_count_) return;
    auto e = pick_edge();
    if (!e) return;

    std::size_t mark = trail_.size();
    select(*e);
    search();
    undo_to(mark);
    if (aborted_) return;

    exclude(*e);
    search();
    undo_to(mark);
  }

  const DualGraph& g_;
  ExactOptions options_;
  std::uint32_t n_;
  std::vector<EdgeState> state_;
  std::vector<int> deg_sel_;
  std::vector<int> deg_avail_;
  std::vector<std::uint32_t> other_end_;
  std::vector<TrailEntry> trail_;
  std::vector<int> comp_;
  std::vector<std::uint32_t> stack_;
  std::size_t count_ = 0;
  std::vector<bool> best_;
  std::size_t best_count_ = 0;
  std::uint64_t nodes_ = 0;
  bool aborted_ = false;
  std::chrono::steady_clock::time_point start_;
};

}  // namespace

StripSolution solve_exact(const DualGraph& g, const ExactOptions& options, ExactStats* stats) {
  StripSolution heuristic = solve_eta(g);
  BranchAndBound bnb(g, options);
  bnb.set_incumbent(heuristic.selected);
  bool complete = bnb.run();
  if (stats) {
    stats->nodes = bnb.nodes();
    stats->timed_out = !complete;
  }
  return make_solution(g, bnb.best(),
                       complete ? Optimality::kProvenOptimal : Optimality::kTimeoutBest);
}

// --- tunneling heuristic ---

namespace {

class Tunneler {
 public:
  explicit Tunneler(const DualGraph& g)
      : g_(g), n_(static_cast<std::uint32_t>(g.node_count())), sel_(g.edge_count(), false),
        degree_(n_, 0) {}

  std::vector<bool> run() {
    greedy_seed();
    bool improved = true;
    while (improved) {
      improved = false;
      for (std::uint32_t s = 0; s < n_; ++s) {
        if (degree_[s] < 2 && tunnel_from(s)) improved = true;
      }
    }
    return sel_;
  }

 private:
  bool acyclic() const {
    UnionFind uf(n_);
    for (std::uint32_t e = 0; e < g_.edge_count(); ++e) {
      if (sel_[e] && !uf.unite(g_.edges()[e].a, g_.edges()[e].b)) return false;
    }
    return true;
  }

  // Grows strips from the lowest-degree free node, always stepping to the
  // free neighbor with the fewest free neighbors of its own.
  void greedy_seed() {
    std::vector<bool> used(n_, false);
    auto free_degree = [&](std::uint32_t v) {
      int d = 0;
      for (auto e : g_.incident(v)) d += !used[g_.other(e, v)];
      return d;
    };
    while (true) {
      std::optional<std::uint32_t> start;
      int start_deg = 4;
      for (std::uint32_t v = 0; v < n_; ++v) {
        if (used[v]) continue;
        int d = free_degree(v);
        if (d < start_deg) {
          start = v;
          start_deg = d;
        }
      }
      if (!start) break;
      std::uint32_t cur = *start;
      used[cur] = true;
      while (true) {
        std::optional<std::uint32_t> step;
        int step_deg = 4;
        for (auto e : g_.incident(cur)) {
          auto w = g_.other(e, cur);
          if (used[w]) continue;
          int d = free_degree(w);
          if (d < step_deg) {
            step = e;
            step_deg = d;
          }
        }
        if (!step) break;
        sel_[*step] = true;
        cur = g_.other(*step, cur);
        ++degree_[g_.edges()[*step].a];
        ++degree_[g_.edges()[*step].b];
        used[cur] = true;
      }
    }
  }

  void flip(const std::vector<std::uint32_t>& edges) {
    for (auto e : edges) {
      int delta = sel_[e] ? -1 : 1;
      sel_[e] = !sel_[e];
      degree_[g_.edges()[e].a] += delta;
      degree_[g_.edges()[e].b] += delta;
    }
  }

  // Breadth-first search for an alternating path that starts and ends with
  // unselected edges at strip ends. Flipping it joins two strips.
  bool tunnel_from(std::uint32_t s) {
    // State index: 2*node + (next edge must be selected ? 1 : 0).
    std::vector<std::int64_t> via(2 * n_, -1);
    std::vector<bool> seen(2 * n_, false);
    std::deque<std::uint32_t> queue;
    seen[2 * s] = true;
    queue.push_back(2 * s);
    while (!queue.empty()) {
      auto state = queue.front();
      queue.pop_front();
      std::uint32_t v = state / 2;
      bool want_selected = state & 1;
      for (auto e : g_.incident(v)) {
        if (sel_[e] != want_selected) continue;
        auto w = g_.other(e, v);
        std::uint32_t next = 2 * w + (want_selected ? 0 : 1);
        if (seen[next]) continue;
        seen[next] = true;
        via[next] = e;
        queue.push_back(next);
        if (!want_selected && w != s && degree_[w] < 2) {
          auto path = trace(via, next);
          if (path && try_flip(*path)) return true;
        }
      }
    }
    return false;
  }

  std::optional<std::vector<std::uint32_t>> trace(const std::vector<std::int64_t>& via,
                                                  std::uint32_t state) const {
    std::vector<std::uint32_t> edges;
    std::vector<bool> on_path(n_, false);
    on_path[state / 2] = true;
    while (via[state] >= 0) {
      auto e = static_cast<std::uint32_t>(via[state]);
      edges.push_back(e);
      std::uint32_t v = state / 2;
      std::uint32_t u = g_.other(e, v);
      if (on_path[u]) return std::nullopt;
      on_path[u] = true;
      // The predecessor state wanted the kind of edge we just took.
      state = 2 * u + (sel_[e] ? 1 : 0);
    }
    return edges;
  }

  bool try_flip(const std::vector<std::uint32_t>& edges) {
    flip(edges);
    bool ok = acyclic();
    for (std::uint32_t v = 0; ok && v < n_; ++v) ok = degree_[v] <= 2;
    if (!ok) flip(edges);
    return ok;
  }

  const DualGraph& g_;
  std::uint32_t n_;
  std::vector<bool> sel_;
  std::vector<int> degree_;
};

}  // namespace

StripSolution solve_eta(const DualGraph& g) {
  Tunneler t(g);
  return make_solution(g, t.run(), Optimality::kHeuristic);
}

}  // namespace mlt
