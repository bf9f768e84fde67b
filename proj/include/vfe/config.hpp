#ifndef VFE_CONFIG_HPP
#define VFE_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vfe/bundles.hpp"
#include "vfe/solver.hpp"

namespace vfe {

/// A problem description as read from a config file: sectioned key = value
/// text with expressions as quoted strings in the parser syntax.
///
///   [problem]             m, N, lagrangian, hamiltonian (optional)
///   [domain]              x1_min, x1_max, x2_min, x2_max, n1, n2
///   [boundary]            y1 = "expr in x1, x2" (one per field)
///   [solver]              tol, max_iter
///   [check]               seed, points, v_box, p_box, x_box, y_box
///   [output]              section, report
struct ProblemConfig {
  int m = 2;
  int N = 1;
  std::string lagrangian;
  std::optional<std::string> hamiltonian;

  double x1_min = 0.0, x1_max = 1.0, x2_min = 0.0, x2_max = 1.0;
  int n1 = 0, n2 = 0;
  std::vector<std::string> boundary;  // expression per field, may be empty

  double tol = 1e-10;
  int max_iter = 50;

  std::uint64_t seed = 42;
  int points = 100;
  double v_box = 2.0, p_box = 0.7, x_box = 1.0, y_box = 1.0;

  std::string section_path = "section.csv";
  std::string report_path = "report.csv";
};

ProblemConfig load_config(const std::string& path);

/// Parsed expressions against the chart implied by (m, N).
struct CompiledProblem {
  LagrangianProblem problem;
  std::vector<Expr> boundary;  // empty when no boundary section was given
};

CompiledProblem compile(const ProblemConfig& cfg);

Grid grid_of(const ProblemConfig& cfg);

}  // namespace vfe

#endif
