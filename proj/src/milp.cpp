#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_map>

#include "mlt/stripify.hpp"

namespace mlt {

std::size_t MilpModel::binary_count() const {
  return static_cast<std::size_t>(std::count(is_binary.begin(), is_binary.end(), true));
}

std::size_t MilpModel::continuous_count() const { return is_binary.size() - binary_count(); }

MilpModel build_milp(const DualGraph& g, double flow_total, double epsilon) {
  if (!(flow_total > 0.0) || !(epsilon > 0.0) ||
      epsilon > flow_total / static_cast<double>(g.node_count() + 1)) {
    throw std::invalid_argument("flow constants require F > 0 and 0 < eps <= F / (T + 1)");
  }
  MilpModel m;
  m.node_count = g.node_count();
  m.edges = g.edges();
  m.flow_total = flow_total;
  m.epsilon = epsilon;
  for (std::uint32_t e = 0; e < g.edge_count(); ++e) {
    std::string id = std::to_string(e);
    m.variable_names.push_back("x" + id);
    m.variable_names.push_back("y" + id + "_ab");
    m.variable_names.push_back("y" + id + "_ba");
    m.is_binary.insert(m.is_binary.end(), {true, false, false});
    m.objective.insert(m.objective.end(), {1.0, 0.0, 0.0});
  }
  // No strip may fork at a triangle.
  for (std::uint32_t v = 0; v < g.node_count(); ++v) {
    Constraint c{"nofork_" + std::to_string(v), {}, Sense::kLessEqual, 2.0};
    for (auto e : g.incident(v)) c.terms.push_back({1.0, MilpModel::x_var(e)});
    m.constraints.push_back(std::move(c));
  }
  // Both sides of a selected edge share the flow F; unselected edges carry none.
  for (std::uint32_t e = 0; e < g.edge_count(); ++e) {
    m.constraints.push_back({"flow_" + std::to_string(e),
                             {{1.0, MilpModel::y_ab_var(e)},
                              {1.0, MilpModel::y_ba_var(e)},
                              {-flow_total, MilpModel::x_var(e)}},
                             Sense::kEqual,
                             0.0});
  }
  // The flow a node keeps over its incident edges stays strictly below F.
  for (std::uint32_t v = 0; v < g.node_count(); ++v) {
    Constraint c{"node_" + std::to_string(v), {}, Sense::kLessEqual, flow_total - epsilon};
    for (auto e : g.incident(v)) {
      c.terms.push_back(
          {1.0, g.edges()[e].a == v ? MilpModel::y_ab_var(e) : MilpModel::y_ba_var(e)});
    }
    m.constraints.push_back(std::move(c));
  }
  return m;
}

std::vector<double> certificate_values(const FlowCertificate& c) {
  std::vector<double> values;
  values.reserve(3 * c.x.size());
  for (std::size_t e = 0; e < c.x.size(); ++e) {
    values.insert(values.end(), {c.x[e], c.y_ab[e], c.y_ba[e]});
  }
  return values;
}

std::optional<std::string> check_assignment(const MilpModel& m, const std::vector<double>& values,
                                            double tolerance) {
  if (values.size() != m.variable_names.size()) return std::string("variable count");
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] < -tolerance) return "bound " + m.variable_names[i];
    if (m.is_binary[i] && values[i] != 0.0 && values[i] != 1.0) {
      return "integrality " + m.variable_names[i];
    }
  }
  for (const auto& c : m.constraints) {
    double lhs = 0.0;
    for (const auto& t : c.terms) lhs += t.coefficient * values[t.variable];
    bool ok = c.sense == Sense::kEqual ? std::abs(lhs - c.rhs) <= tolerance
                                       : lhs <= c.rhs + tolerance;
    if (!ok) return c.name;
  }
  return std::nullopt;
}

namespace {

std::string format_number(double x) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string format_terms(const MilpModel& m, const std::vector<LinearTerm>& terms) {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    double c = terms[i].coefficient;
    if (i == 0) {
      if (c < 0) out += "- ";
    } else {
      out += c < 0 ? " - " : " + ";
    }
    if (std::abs(c) != 1.0) out += format_number(std::abs(c)) + " ";
    out += m.variable_names[terms[i].variable];
  }
  return out;
}

}  // namespace

std::string format_lp(const MilpModel& m) {
  std::ostringstream out;
  out << "\\ generalized triangle strip model: " << m.node_count << " triangles, "
      << m.edges.size() << " dual edges\n";
  out << "Maximize\n obj:";
  bool first = true;
  std::size_t written = 0;
  for (std::size_t i = 0; i < m.objective.size(); ++i) {
    if (m.objective[i] == 0.0) continue;
    // Keep lines short for readers with a line-length limit.
    if (!first && ++written % 12 == 0) out << "\n   ";
    out << (first ? " " : " + ") << m.variable_names[i];
    first = false;
  }
  out << "\nSubject To\n";
  for (const auto& c : m.constraints) {
    if (c.terms.empty()) {
      // An isolated triangle has nothing to constrain.
      out << "\\ " << c.name << ": empty\n";
      continue;
    }
    out << " " << c.name << ": " << format_terms(m, c.terms)
        << (c.sense == Sense::kEqual ? " = " : " <= ") << format_number(c.rhs) << "\n";
  }
  out << "Bounds\n";
  for (std::size_t i = 0; i < m.variable_names.size(); ++i) {
    if (!m.is_binary[i]) out << " " << m.variable_names[i] << " >= 0\n";
  }
  out << "Binary\n";
  for (std::size_t i = 0; i < m.variable_names.size(); ++i) {
    if (m.is_binary[i]) out << " " << m.variable_names[i] << "\n";
  }
  out << "End\n";
  return out.str();
}

void export_lp(const MilpModel& m, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write '" + path.string() + "'");
  out << format_lp(m);
  if (!out) throw std::runtime_error("write failed for '" + path.string() + "'");
}

StripSolution parse_solution(const MilpModel& m, std::string_view text) {
  std::unordered_map<std::string_view, std::uint32_t> index;
  for (std::uint32_t i = 0; i < m.variable_names.size(); ++i) index.emplace(m.variable_names[i], i);

  std::vector<bool> selected(m.edges.size(), false);
  bool optimal = false;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (line_no == 1 && line == "# optimal") optimal = true;
      continue;
    }
    auto space = line.find_first_of(" \t");
    auto value_start = line.find_first_not_of(" \t", space);
    if (space == std::string_view::npos || value_start == std::string_view::npos) {
      throw SolutionFormatError("line " + std::to_string(line_no) + ": expected 'name value'");
    }
    std::string_view name = line.substr(0, space);
    std::string_view value_text = line.substr(value_start);
    value_text = value_text.substr(0, value_text.find_last_not_of(" \t") + 1);
    auto it = index.find(name);
    if (it == index.end()) {
      throw SolutionFormatError("line " + std::to_string(line_no) + ": unknown variable '" +
                                std::string(name) + "'");
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(value_text.data(), value_text.data() + value_text.size(), value);
    if (ec != std::errc() || ptr != value_text.data() + value_text.size()) {
      throw SolutionFormatError("line " + std::to_string(line_no) + ": malformed value");
    }
    if (!m.is_binary[it->second]) continue;
    double rounded = std::round(value);
    if (std::abs(value - rounded) > 1e-6 || (rounded != 0.0 && rounded != 1.0)) {
      throw SolutionFormatError("line " + std::to_string(line_no) + ": " + std::string(name) +
                                " is not binary");
    }
    selected[it->second / 3] = rounded == 1.0;
  }
  auto g = m.graph();
  auto check = validate_solution(g, selected, m.flow_total, m.epsilon);
  if (!check.ok()) throw SolutionFormatError("invalid solution: " + describe(*check.violation));
  return make_solution(g, std::move(selected),
                       optimal ? Optimality::kProvenOptimal : Optimality::kHeuristic);
}

StripSolution import_solution(const MilpModel& m, const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_solution(m, ss.str());
}

std::string format_solution(const MilpModel& m, const StripSolution& s) {
  std::string out;
  if (s.optimality == Optimality::kProvenOptimal) out += "# optimal\n";
  for (std::uint32_t e = 0; e < s.selected.size(); ++e) {
    out += m.variable_names[MilpModel::x_var(e)];
    out += s.selected[e] ? " 1\n" : " 0\n";
  }
  return out;
}

}  // namespace mlt
