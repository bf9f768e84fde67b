#ifndef VFE_BUNDLES_HPP
#define VFE_BUNDLES_HPP

#include <optional>
#include <vector>

#include "vfe/chart.hpp"
#include "vfe/expr.hpp"

namespace vfe {

/// A first-order Lagrangian on the trivial bundle R^m x R^N -> R^m with the
/// standard volume form. The Lagrangian may depend on base, field and
/// velocity coordinates only. Derivative tables are precomputed once;
/// everything here is immutable after construction.
class LagrangianProblem {
 public:
  LagrangianProblem(Chart chart, Expr lagrangian,
                    std::optional<Expr> closed_form_hamiltonian = std::nullopt);

  const Chart& chart() const { return chart_; }
  const Expr& lagrangian() const { return lagrangian_; }
  /// Closed-form H(x, y, p) when the user supplied one.
  const std::optional<Expr>& closed_form_h() const { return closed_form_h_; }

  /// dL/dv^A_alpha.
  const Expr& dl_dv(int A, int alpha) const { return dl_dv_[A * chart_.m() + alpha]; }
  /// dL/dy^A.
  const Expr& dl_dy(int A) const { return dl_dy_[A]; }
  /// Hessian entry d2L/dv^A_alpha dv^B_nu; rows and columns flattened (A,
  /// alpha) A-major, the layout every linear system here reuses.
  const Expr& hessian(int row, int col) const { return hessian_[row * vdim() + col]; }
  int vdim() const { return chart_.N() * chart_.m(); }

 private:
  Chart chart_;
  Expr lagrangian_;
  std::optional<Expr> closed_form_h_;
  std::vector<Expr> dl_dv_;
  std::vector<Expr> dl_dy_;
  std::vector<Expr> hessian_;
};

/// A numeric point of the jet bundle: x^alpha, y^A, v^A_alpha (v A-major).
struct JetPoint {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> v;
};

/// A numeric point of W = J1E x_E Mpi (p present) or of W_r (p absent);
/// momenta flattened (A, alpha) A-major.
struct UnifiedPoint {
  std::vector<double> x;
  std::vector<double> y;
  std::vector<double> v;
  std::vector<double> mom;
  std::optional<double> p;
};

Point to_point(const Chart& chart, const JetPoint& jp);
Point to_point(const Chart& chart, const UnifiedPoint& up);
JetPoint jet_of(const Chart& chart, const UnifiedPoint& up);

/// Restricted Legendre map: p^alpha_A = dL/dv^A_alpha at the jet point.
/// Result flattened (A, alpha) A-major.
std::vector<double> legendre_restricted(const LagrangianProblem& prob, const JetPoint& jp);

/// Extended Legendre map: momenta as above plus p = L - v^A_alpha p^alpha_A.
UnifiedPoint legendre_extended(const LagrangianProblem& prob, const JetPoint& jp);

/// Invert the restricted Legendre map by Newton iteration on
/// p - dL/dv with the velocity Hessian, from `seed` (x, y copied from it; an
/// empty seed.v defaults to the momenta, which is exact for quadratic L).
/// Requires regularity along the iterates; max-norm residual 1e-12.
JetPoint legendre_invert(const LagrangianProblem& prob, const std::vector<double>& momenta,
                         const JetPoint& seed, double tol = 1e-12, int max_iter = 100);

/// Coupling function C(w) = p + p^alpha_A v^A_alpha; requires the p component.
double coupling(const UnifiedPoint& up);

/// Constraint function of the Hamiltonian submanifold: coupling - L.
double w0_residual(const LagrangianProblem& prob, const UnifiedPoint& up);

/// First-constraint residuals p^alpha_A - dL/dv^A_alpha, flattened (A, alpha).
std::vector<double> w1_residual(const LagrangianProblem& prob, const UnifiedPoint& up);

/// The Hamiltonian section of mu_W: attach p = -(p^alpha_A v^A_alpha - L), the
/// unique completion with zero w0_residual.
UnifiedPoint hamiltonian_section_hat(const LagrangianProblem& prob, const UnifiedPoint& restricted);

/// H = p^alpha_A v*^A_alpha - L(v*) with v* from legendre_invert.
double hamiltonian_function(const LagrangianProblem& prob, const std::vector<double>& momenta,
                            const JetPoint& seed);

struct Regularity {
  bool regular;
  double det;
};

/// Determinant of the velocity Hessian at the jet point; |det| <= 1e-12 is
/// classified singular.
Regularity regularity(const LagrangianProblem& prob, const JetPoint& jp);

/// Message used whenever a singular Lagrangian reaches a code path that only
/// supports the regular case.
inline const char* singular_refusal_message() {
  return "singular Lagrangian: unified constraint analysis beyond the first "
         "constraint submanifold (W1) is not implemented";
}

}  // namespace vfe

#endif
