#ifndef VFE_SOLVER_HPP
#define VFE_SOLVER_HPP

#include <functional>
#include <string>
#include <vector>

#include "vfe/bundles.hpp"

namespace vfe {

/// A rectangular node grid on [a1,b1] x [a2,b2] with n1 x n2 nodes (node
/// counts include the boundary; both must be >= 3). Nodes are stored
/// row-major with x1 outermost: index(i, j) = i*n2 + j.
struct Grid {
  double a1, b1, a2, b2;
  int n1, n2;

  double h1() const { return (b1 - a1) / (n1 - 1); }
  double h2() const { return (b2 - a2) / (n2 - 1); }
  double x1(int i) const { return a1 + i * h1(); }
  double x2(int j) const { return a2 + j * h2(); }
  int index(int i, int j) const { return i * n2 + j; }
  int nodes() const { return n1 * n2; }
  bool interior(int i, int j) const { return i > 0 && i < n1 - 1 && j > 0 && j < n2 - 1; }
  void validate() const;
};

/// Nodal values of a section of W_0 over a grid (m = 2). The velocity,
/// momentum and scalar-momentum tables are always derived from the y values
/// (central differences inside, one-sided second order on the boundary,
/// then the Legendre map and the Hamiltonian section) and never stored stale.
struct DiscreteSection {
  Grid grid;
  int num_fields = 1;
  std::vector<std::vector<double>> y;    // per field A
  std::vector<std::vector<double>> v;    // per (A, alpha) A-major
  std::vector<std::vector<double>> mom;  // per (A, alpha) A-major
  std::vector<double> p;
};

/// Derive v, momenta and p from nodal y values.
DiscreteSection make_discrete_section(const LagrangianProblem& prob, const Grid& grid,
                                      std::vector<std::vector<double>> y);

struct SolveOptions {
  double tol = 1e-10;
  int max_iter = 50;
};

struct SolveInfo {
  int iterations = 0;
  double final_residual = 0.0;
  bool converged = false;
};

/// Damped Newton solve of the central-difference discretization of the
/// Euler-Lagrange equation with Dirichlet data (m = 2, N = 1). Boundary nodes
/// take the boundary values exactly; interior nodes satisfy the discrete
/// residual to opts.tol in max norm. The Jacobian is analytic, assembled from
/// symbolic derivatives of L; the linear solves are direct and
/// single-threaded.
DiscreteSection solve_dirichlet(const LagrangianProblem& prob, const Grid& grid,
                                const std::function<double(double, double)>& boundary,
                                const SolveOptions& opts = {}, SolveInfo* info = nullptr);

/// Every residual family the unified field equation encodes, evaluated along
/// a discrete section: Euler-Lagrange, the two HDW families, the coupling
/// constraint and the first-constraint/holonomy residuals. Stencil-based
/// families are evaluated at interior nodes (zero on the boundary rows).
struct ResidualReport {
  Grid grid;
  int num_fields = 1;
  std::vector<std::vector<double>> el;     // per field, signed, interior
  std::vector<std::vector<double>> hdw_y;  // per field, max over alpha, interior
  std::vector<std::vector<double>> hdw_p;  // per field, signed, interior
  std::vector<double> w0;                  // signed, all nodes
  std::vector<double> w1_max;              // all nodes
  std::vector<double> hol_max;             // all nodes
  struct Summary {
    double max_abs = 0.0;
    double rms = 0.0;
  };
  Summary el_summary, hdw_y_summary, hdw_p_summary, w0_summary, w1_summary, hol_summary;
  SolveInfo solve_info;
};

ResidualReport residual_report(const LagrangianProblem& prob, const DiscreteSection& ds,
                               const SolveInfo& info = {});

/// CSV schemas (UTF-8, comma, '.' decimal, one header row, 17 significant
/// digits, rows row-major by grid index):
///   section: x1,x2,y1,v1_1,v1_2,p1_1,p1_2,p        (fields A-major for N > 1)
///   report:  x1,x2,res_el_1,res_hdw_y_1,res_hdw_p_1,res_w0,res_w1_max,res_hol_max
void export_section_csv(const DiscreteSection& ds, const std::string& path);
void export_report_csv(const ResidualReport& report, const std::string& path);

/// Read nodal y values back from a section CSV; the grid must match the rows.
std::vector<std::vector<double>> import_section_csv(const std::string& path, const Grid& grid,
                                                    int num_fields);

}  // namespace vfe

#endif
