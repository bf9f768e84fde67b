#ifndef VFE_EXTERIOR_HPP
#define VFE_EXTERIOR_HPP

#include <map>
#include <vector>

#include "vfe/chart.hpp"
#include "vfe/expr.hpp"

namespace vfe {

/// A differential k-form over a single global chart, stored as a map from
/// strictly ascending index tuples (basis covectors in chart order) to Expr
/// coefficients. Absent keys are zero.
class Form {
 public:
  using Key = std::vector<int>;

  Form(Chart chart, int degree);

  const Chart& chart() const { return chart_; }
  int degree() const { return degree_; }
  bool empty() const { return terms_.empty(); }
  const std::map<Key, Expr>& terms() const { return terms_; }

  /// Add `coeff * d(idx[0]) ^ ... ^ d(idx[k-1])`. The tuple is sorted with the
  /// antisymmetry sign; tuples with repeated indices contribute nothing.
  Form& add_term(Key idx, Expr coeff);

  /// Coefficient of a strictly ascending tuple (zero Expr if absent).
  Expr coeff(const Key& idx) const;

  Form& operator+=(const Form& other);
  Form& operator-=(const Form& other);

  /// dx^1 ^ ... ^ dx^m (the volume form pulled back from the base).
  static Form volume(const Chart& chart);
  /// d^{m-1}x_alpha  =  i(d/dx^alpha) d^m x   (alpha 0-based).
  static Form volume_contracted(const Chart& chart, int alpha);
  /// The basis 1-form d(coord).
  static Form differential(const Chart& chart, int coord);

 private:
  Chart chart_;
  int degree_;
  std::map<Key, Expr> terms_;
};

Form operator+(Form a, const Form& b);
Form operator-(Form a, const Form& b);
Form operator*(const Expr& scale, Form f);
inline Form operator*(double scale, Form f) { return Expr::constant(scale) * std::move(f); }

/// A vector field with Expr coefficients on the chart's coordinate basis.
/// Absent entries are zero.
class VectorField {
 public:
  explicit VectorField(Chart chart) : chart_(std::move(chart)) {}

  const Chart& chart() const { return chart_; }
  const std::map<int, Expr>& components() const { return comps_; }
  VectorField& set(int coord, Expr coeff);
  Expr component(int coord) const;

  static VectorField basis(const Chart& chart, int coord) {
    VectorField v(chart);
    v.set(coord, Expr::constant(1.0));
    return v;
  }

 private:
  Chart chart_;
  std::map<int, Expr> comps_;
};

/// A locally decomposable m-vector field  f * V_1 ^ ... ^ V_m  with a
/// non-vanishing scalar factor. Transversality (unit d/dx^alpha coefficient
/// in leg alpha) is checkable, not assumed.
struct MultiVector {
  Expr factor = Expr::constant(1.0);
  std::vector<VectorField> legs;
};

/// Graded-antisymmetric product; throws on degree overflow past the chart
/// dimension instead of silently truncating to zero.
Form wedge(const Form& a, const Form& b);

/// Exterior derivative d(c dxi_I) = sum_j (dc/dxi_j) dxi_j ^ dxi_I.
Form ext_d(const Form& a);

/// Interior product i(v)a with the convention
/// i(d/dxi_j)(dxi_{i1} ^ ... ^ dxi_{ik}) = (-1)^{r-1} (tuple minus xi_{i_r})
/// when j = i_r. Throws on degree-0 input.
Form contract(const VectorField& v, const Form& a);

/// Iterated interior product i(V_1 ^ ... ^ V_m)a = i(V_m)...i(V_1)a scaled by
/// the factor. Throws on degree underflow.
Form contract_multi(const MultiVector& x, const Form& a);

/// Pull a form of degree <= m back along a section of the bundle: fiber
/// coordinates are substituted by `section` (Exprs in the base coordinates)
/// and each fiber differential d(xi) by sum_alpha (d section_xi / dx^alpha)
/// dx^alpha. Every fiber coordinate the form references must be supplied.
Form pullback_section(const Form& a, const std::map<int, Expr>& section);

// Canonical forms, by their local expressions.

/// Liouville multimomentum m-form  p^alpha_A dy^A ^ d^{m-1}x_alpha + p d^m x.
Form liouville_theta(const Chart& chart);

/// Theta_0 = (L - p^alpha_A v^A_alpha) d^m x + p^alpha_A dy^A ^ d^{m-1}x_alpha.
Form unified_theta(const Chart& chart, const Expr& lagrangian);

/// Poincare-Cartan m-form built from the vertical endomorphism's local
/// expression: dL/dv^A_mu dy^A ^ d^{m-1}x_mu - (dL/dv^A_mu v^A_mu - L) d^m x.
Form lagrangian_theta(const Chart& chart, const Expr& lagrangian);

/// Hamilton-Cartan m-form p^alpha_A dy^A ^ d^{m-1}x_alpha - H d^m x.
Form hamiltonian_theta(const Chart& chart, const Expr& hamiltonian);

/// Component m-forms of the (1,m)-tensor i(V)(pullback volume): entry (A,nu)
/// is (dy^A - v^A_alpha dx^alpha) ^ d^{m-1}x_nu; contracting them with an
/// m-vector field gives the d/dv^A_nu components of its image, which vanish
/// exactly on semi-holonomic fields.
std::vector<Form> vertical_tensor_components(const Chart& chart);

}  // namespace vfe

#endif
