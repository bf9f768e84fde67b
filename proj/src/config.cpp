#include "vfe/config.hpp"

#include <fstream>
#include <sstream>

#include "vfe/errors.hpp"
#include "vfe/parser.hpp"

namespace vfe {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

// Strip a trailing comment that is not inside quotes.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

std::string unquote(const std::string& s, int line) {
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
  if (!s.empty() && (s.front() == '"' || s.back() == '"'))
    throw ConfigError("unbalanced quotes on line " + std::to_string(line));
  return s;
}

double to_double(const std::string& s, const std::string& key, int line) {
  try {
    size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("value of '" + key + "' is not a number on line " + std::to_string(line));
  }
}

int to_int(const std::string& s, const std::string& key, int line) {
  const double v = to_double(s, key, line);
  const int i = static_cast<int>(v);
  if (v != i) throw ConfigError("value of '" + key + "' is not an integer on line " +
                                std::to_string(line));
  return i;
}

}  // namespace

ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  ProblemConfig cfg;
  std::string section, line;
  int lineno = 0;
  std::vector<std::pair<int, std::string>> boundary_entries;
  while (std::getline(in, line)) {
    ++lineno;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError("malformed section header on line " + std::to_string(lineno));
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("expected 'key = value' on line " + std::to_string(lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = unquote(trim(line.substr(eq + 1)), lineno);
    if (key.empty() || value.empty())
      throw ConfigError("empty key or value on line " + std::to_string(lineno));

    if (section == "problem") {
      if (key == "m") cfg.m = to_int(value, key, lineno);
      else if (key == "N") cfg.N = to_int(value, key, lineno);
      else if (key == "lagrangian") cfg.lagrangian = value;
      else if (key == "hamiltonian") cfg.hamiltonian = value;
      else throw ConfigError("unknown key '" + key + "' in [problem] on line " +
                             std::to_string(lineno));
    } else if (section == "domain") {
      if (key == "x1_min") cfg.x1_min = to_double(value, key, lineno);
      else if (key == "x1_max") cfg.x1_max = to_double(value, key, lineno);
      else if (key == "x2_min") cfg.x2_min = to_double(value, key, lineno);
      else if (key == "x2_max") cfg.x2_max = to_double(value, key, lineno);
      else if (key == "n1") cfg.n1 = to_int(value, key, lineno);
      else if (key == "n2") cfg.n2 = to_int(value, key, lineno);
      else throw ConfigError("unknown key '" + key + "' in [domain] on line " +
                             std::to_string(lineno));
    } else if (section == "boundary") {
      if (key.size() < 2 || key[0] != 'y')
        throw ConfigError("boundary keys are y1..yN, got '" + key + "' on line " +
                          std::to_string(lineno));
      const int A = to_int(key.substr(1), key, lineno);
      boundary_entries.emplace_back(A, value);
    } else if (section == "solver") {
      if (key == "tol") cfg.tol = to_double(value, key, lineno);
      else if (key == "max_iter") cfg.max_iter = to_int(value, key, lineno);
      else throw ConfigError("unknown key '" + key + "' in [solver] on line " +
                             std::to_string(lineno));
    } else if (section == "check") {
      if (key == "seed") cfg.seed = static_cast<std::uint64_t>(to_double(value, key, lineno));
      else if (key == "points") cfg.points = to_int(value, key, lineno);
      else if (key == "v_box") cfg.v_box = to_double(value, key, lineno);
      else if (key == "p_box") cfg.p_box = to_double(value, key, lineno);
      else if (key == "x_box") cfg.x_box = to_double(value, key, lineno);
      else if (key == "y_box") cfg.y_box = to_double(value, key, lineno);
      else throw ConfigError("unknown key '" + key + "' in [check] on line " +
                             std::to_string(lineno));
    } else if (section == "output") {
      if (key == "section") cfg.section_path = value;
      else if (key == "report") cfg.report_path = value;
      else throw ConfigError("unknown key '" + key + "' in [output] on line " +
                             std::to_string(lineno));
    } else {
      throw ConfigError("key outside a known section on line " + std::to_string(lineno));
    }
  }

  if (cfg.m < 1 || cfg.N < 1) throw ConfigError("m and N must be at least 1");
  if (cfg.lagrangian.empty()) throw ConfigError("config is missing [problem] lagrangian");
  if (!boundary_entries.empty()) {
    cfg.boundary.assign(cfg.N, "");
    for (const auto& [A, text] : boundary_entries) {
      if (A < 1 || A > cfg.N) throw ConfigError("boundary key y" + std::to_string(A) +
                                                " is outside 1..N");
      cfg.boundary[A - 1] = text;
    }
    for (int A = 0; A < cfg.N; ++A)
      if (cfg.boundary[A].empty())
        throw ConfigError("missing boundary expression for y" + std::to_string(A + 1));
  }
  return cfg;
}

CompiledProblem compile(const ProblemConfig& cfg) {
  const Chart chart(cfg.m, cfg.N);
  Expr lagrangian = parse_expr(chart, cfg.lagrangian);
  std::optional<Expr> hamiltonian;
  if (cfg.hamiltonian) hamiltonian = parse_expr(chart, *cfg.hamiltonian);
  std::vector<Expr> boundary;
  for (const std::string& text : cfg.boundary) {
    Expr b = parse_expr(chart, text);
    for (int idx : referenced_coords(b))
      if (chart.kind(idx) != Chart::Kind::Base)
        throw ConfigError("boundary expression must reference base coordinates only, found '" +
                          chart.name(idx) + "'");
    boundary.push_back(std::move(b));
  }
  return CompiledProblem{LagrangianProblem(chart, std::move(lagrangian), std::move(hamiltonian)),
                         std::move(boundary)};
}

Grid grid_of(const ProblemConfig& cfg) {
  if (cfg.n1 < 3 || cfg.n2 < 3)
    throw ConfigError("solving requires grid sizes n1, n2 >= 3 in [domain]");
  return Grid{cfg.x1_min, cfg.x1_max, cfg.x2_min, cfg.x2_max, cfg.n1, cfg.n2};
}

}  // namespace vfe
