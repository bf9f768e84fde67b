#ifndef VFE_FIELD_EQS_HPP
#define VFE_FIELD_EQS_HPP

#include <optional>
#include <vector>

#include "vfe/bundles.hpp"
#include "vfe/exterior.hpp"

namespace vfe {

/// A symbolic section of one of the bundles over the base: the field
/// components y^A(x) plus, optionally, explicit velocity, momentum and scalar
/// momentum components. Components must reference base coordinates only.
/// When v is absent it is derived as the prolongation dy/dx.
class SectionExprs {
 public:
  SectionExprs(Chart chart, std::vector<Expr> y);

  const Chart& chart() const { return chart_; }
  const Expr& y(int A) const { return y_[A]; }

  SectionExprs& with_v(std::vector<Expr> v);
  SectionExprs& with_momenta(std::vector<Expr> mom);
  SectionExprs& with_p(Expr p);

  bool has_v() const { return !v_.empty(); }
  bool has_momenta() const { return !mom_.empty(); }

  /// Explicit v^A_alpha, or the prolongation dy^A/dx^alpha when absent.
  Expr v(int A, int alpha) const;
  Expr momentum(int A, int alpha) const;
  const std::optional<Expr>& p() const { return p_; }

  /// Substitution map fiber-coordinate -> Expr(x) covering every component
  /// the section supplies (v always, via prolongation if needed).
  std::map<int, Expr> substitution() const;

  /// The full section of W_0 induced by a solution candidate phi = (y^A):
  /// v = dy/dx, momenta = dL/dv along the jet, p through the Hamiltonian
  /// section.
  static SectionExprs prolong(const LagrangianProblem& prob, std::vector<Expr> y);

  Point base_point(const std::vector<double>& x) const;

 private:
  Chart chart_;
  std::vector<Expr> y_;
  std::vector<Expr> v_;
  std::vector<Expr> mom_;
  std::optional<Expr> p_;
};

/// Coefficient tables of a decomposable m-vector field / connection / jet
/// field in the unified chart:
///   leg alpha = d/dx^alpha + F^A_alpha d/dy^A + G^A_{alpha nu} d/dv^A_nu
///               + H^nu_{alpha A} d/dp^nu_A,
/// all tables flattened field-major: entry (A, leg alpha, direction nu) at
/// index (A*m + alpha)*m + nu.
struct FieldCoeffs {
  int m = 0;
  int N = 0;
  std::vector<Expr> F;  // size N*m, index A*m + alpha
  std::vector<Expr> G;  // size N*m*m
  std::vector<Expr> H;  // size N*m*m (empty when the domain has no momenta)
  Expr factor = Expr::constant(1.0);

  int f_index(int A, int alpha) const { return A * m + alpha; }
  int g_index(int A, int alpha, int nu) const { return (A * m + alpha) * m + nu; }
};

/// F^A_alpha := v^A_alpha (the semi-holonomy condition), G and H zero-sized
/// until filled.
FieldCoeffs semi_holonomic_coeffs(const Chart& chart);

/// Euler-Lagrange residuals R^A = dL/dy^A - d/dx^alpha(dL/dv^A_alpha) along
/// the prolongation of the section's y components, evaluated at x. The total
/// derivative is exact: the jet substitution is symbolic and the result is
/// differentiated in the base coordinates.
std::vector<double> el_residual(const LagrangianProblem& prob, const SectionExprs& s,
                                const std::vector<double>& x);

struct GSystemSolution {
  /// Least-norm particular solution, N*m*m entries laid out as FieldCoeffs::G.
  std::vector<double> particular;
  /// Orthonormal nullspace basis vectors (same layout).
  std::vector<std::vector<double>> nullspace;
  int rank = 0;
  /// Max-norm residual of the particular solution; nonzero beyond tolerance
  /// means the system is inconsistent (possible for singular Lagrangians).
  double residual = 0.0;
  bool consistent = true;
};

/// Solve the linear system that the velocity coefficients of an
/// Euler-Lagrange m-vector field satisfy:
///   d2L/dv^A_alpha dv^B_nu G^A_{alpha nu}
///     = dL/dy^B - d2L/dx^nu dv^B_nu - d2L/dy^A dv^B_nu v^A_nu.
/// N equations in N*m*m unknowns; underdetermined in general, so the full
/// affine solution set (least-norm particular + nullspace) is returned.
GSystemSolution solve_g_system(const LagrangianProblem& prob, const JetPoint& jp);

struct HamiltonianDerivs {
  std::vector<double> d_mom;  // dH/dp^alpha_A, (A, alpha) A-major
  std::vector<double> d_y;    // dH/dy^A
};

/// Partials of the Hamiltonian at a point of the restricted momentum bundle:
/// symbolic when the problem carries a closed-form H, otherwise central
/// differences (h = 1e-6) of the Legendre-inversion Hamiltonian.
HamiltonianDerivs hamiltonian_partials(const LagrangianProblem& prob,
                                       const std::vector<double>& x, const std::vector<double>& y,
                                       const std::vector<double>& mom);

/// Hamilton-De Donder-Weyl residuals for a section with momenta: the N*m
/// entries dH/dp^alpha_A - dy^A/dx^alpha (A-major), then the N entries
/// -dH/dy^A - sum_alpha dp^alpha_A/dx^alpha.
std::vector<double> hdw_residual(const LagrangianProblem& prob, const SectionExprs& s,
                                 const std::vector<double>& x);

/// v^A_alpha(x) - dy^A/dx^alpha(x); requires explicit v.
std::vector<double> holonomy_residual(const SectionExprs& s, const std::vector<double>& x);

/// The d^m x coefficient of the pullback of i(Y0)Omega_0 along the section,
/// evaluated at x. The section must supply y, v and momenta.
double unified_residual(const LagrangianProblem& prob, const SectionExprs& s,
                        const VectorField& y0, const std::vector<double>& x);

/// The same quantity through the closed-form expansion
///   f^A (dp^alpha_A/dx^alpha - dL/dy^A) + g^A_alpha (p^alpha_A - dL/dv^A_alpha)
///   + h^alpha_A (v^A_alpha - dy^A/dx^alpha)
/// with (f, g, h) read off Y0. Kept as an independent route for cross-checks.
double unified_residual_direct(const LagrangianProblem& prob, const SectionExprs& s,
                               const VectorField& y0, const std::vector<double>& x);

/// True iff F^A_alpha(jp) = v^A_alpha entrywise within tol.
bool semi_holonomy_check(const FieldCoeffs& coeffs, const Chart& chart, const JetPoint& jp,
                         double tol = 1e-12);

/// The d/dv^A_nu components of the vertical (1,m)-tensor applied to the
/// multivector built from `coeffs`, evaluated at jp. All zero iff the field
/// is semi-holonomic; cross-checks semi_holonomy_check through the exterior
/// algebra.
std::vector<double> semi_holonomy_vertical_components(const FieldCoeffs& coeffs,
                                                      const Chart& chart, const JetPoint& jp);

/// Push a semi-holonomic Lagrangian-side solution through the Legendre map:
///   H^nu_{alpha A} = d2L/dx^alpha dv^A_nu + d2L/dy^B dv^A_nu F^B_alpha
///                    + d2L/dv^B_mu dv^A_nu G^B_{alpha mu}
/// evaluated at jp. Verifies the resulting coefficients satisfy the HDW
/// relations F^A_alpha = dH/dp^alpha_A and sum_nu H^nu_{nu A} = -dH/dy^A at
/// the Legendre image within 1e-8, and throws otherwise.
FieldCoeffs fl_relate(const LagrangianProblem& prob, const FieldCoeffs& lag_coeffs,
                      const JetPoint& jp);

enum class MultiVectorDomain {
  JetBundle,           // legs carry F and G
  Unified,             // legs carry F, G and H
  RestrictedMomentum,  // legs carry F and H
};

/// The decomposable m-vector field with the given coefficient tables and
/// factor 1 (the transversality normalization i(X)(volume) = 1).
MultiVector build_multivector(const Chart& chart, const FieldCoeffs& coeffs,
                              MultiVectorDomain domain);

}  // namespace vfe

#endif
