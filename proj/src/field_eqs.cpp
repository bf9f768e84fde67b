#include "vfe/field_eqs.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "vfe/errors.hpp"

namespace vfe {

namespace {

void require_base_only(const Chart& chart, const Expr& e, const char* what) {
  for (int idx : referenced_coords(e))
    if (chart.kind(idx) != Chart::Kind::Base)
      throw Error(std::string(what) + " must reference base coordinates only, found '" +
                  chart.name(idx) + "'");
}

}  // namespace

SectionExprs::SectionExprs(Chart chart, std::vector<Expr> y)
    : chart_(std::move(chart)), y_(std::move(y)) {
  if (static_cast<int>(y_.size()) != chart_.N())
    throw Error("section needs one component per field coordinate");
  for (const Expr& e : y_) require_base_only(chart_, e, "section component");
}

SectionExprs& SectionExprs::with_v(std::vector<Expr> v) {
  if (static_cast<int>(v.size()) != chart_.N() * chart_.m())
    throw Error("velocity table size mismatch");
  for (const Expr& e : v) require_base_only(chart_, e, "section component");
  v_ = std::move(v);
  return *this;
}

SectionExprs& SectionExprs::with_momenta(std::vector<Expr> mom) {
  if (static_cast<int>(mom.size()) != chart_.N() * chart_.m())
    throw Error("momentum table size mismatch");
  for (const Expr& e : mom) require_base_only(chart_, e, "section component");
  mom_ = std::move(mom);
  return *this;
}

SectionExprs& SectionExprs::with_p(Expr p) {
  require_base_only(chart_, p, "section component");
  p_ = std::move(p);
  return *this;
}

Expr SectionExprs::v(int A, int alpha) const {
  if (has_v()) return v_[A * chart_.m() + alpha];
  return diff(y_[A], chart_.x(alpha));
}

Expr SectionExprs::momentum(int A, int alpha) const {
  if (!has_momenta()) throw Error("section supplies no momentum components");
  return mom_[A * chart_.m() + alpha];
}

std::map<int, Expr> SectionExprs::substitution() const {
  std::map<int, Expr> sub;
  for (int A = 0; A < chart_.N(); ++A) sub.emplace(chart_.y(A), y_[A]);
  for (int A = 0; A < chart_.N(); ++A)
    for (int a = 0; a < chart_.m(); ++a) sub.emplace(chart_.v(A, a), v(A, a));
  if (has_momenta())
    for (int A = 0; A < chart_.N(); ++A)
      for (int a = 0; a < chart_.m(); ++a) sub.emplace(chart_.mom(A, a), momentum(A, a));
  if (p_) sub.emplace(chart_.p(), *p_);
  return sub;
}

SectionExprs SectionExprs::prolong(const LagrangianProblem& prob, std::vector<Expr> y) {
  const Chart& chart = prob.chart();
  SectionExprs s(chart, std::move(y));
  std::map<int, Expr> jet;
  for (int A = 0; A < chart.N(); ++A) jet.emplace(chart.y(A), s.y(A));
  std::vector<Expr> v(chart.N() * chart.m());
  for (int A = 0; A < chart.N(); ++A)
    for (int a = 0; a < chart.m(); ++a) {
      v[A * chart.m() + a] = diff(s.y(A), chart.x(a));
      jet.emplace(chart.v(A, a), v[A * chart.m() + a]);
    }
  std::vector<Expr> mom(chart.N() * chart.m());
  Expr pv = Expr::constant(0.0);
  for (int A = 0; A < chart.N(); ++A)
    for (int a = 0; a < chart.m(); ++a) {
      mom[A * chart.m() + a] = substitute(prob.dl_dv(A, a), jet);
      pv = pv + mom[A * chart.m() + a] * v[A * chart.m() + a];
    }
  s.with_v(std::move(v));
  s.with_momenta(std::move(mom));
  s.with_p(substitute(prob.lagrangian(), jet) - pv);
  return s;
}

Point SectionExprs::base_point(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != chart_.m()) throw Error("base point dimension mismatch");
  Point pt(chart_);
  for (int a = 0; a < chart_.m(); ++a) pt.set(chart_.x(a), x[a]);
  return pt;
}

FieldCoeffs semi_holonomic_coeffs(const Chart& chart) {
  FieldCoeffs c;
  c.m = chart.m();
  c.N = chart.N();
  c.F.resize(c.N * c.m, Expr::constant(0.0));
  for (int A = 0; A < c.N; ++A)
    for (int a = 0; a < c.m; ++a) c.F[c.f_index(A, a)] = Expr::coordinate(chart, chart.v(A, a));
  return c;
}

std::vector<double> el_residual(const LagrangianProblem& prob, const SectionExprs& s,
                                const std::vector<double>& x) {
  const Chart& chart = prob.chart();
  // Substitute the prolongation, then differentiate in the base: d/dx^alpha of
  // the substituted expression is exactly the total derivative along j1(phi).
  std::map<int, Expr> jet;
  for (int A = 0; A < chart.N(); ++A) jet.emplace(chart.y(A), s.y(A));
  for (int A = 0; A < chart.N(); ++A)
    for (int a = 0; a < chart.m(); ++a)
      jet.emplace(chart.v(A, a), diff(s.y(A), chart.x(a)));
  const Point pt = s.base_point(x);
  std::vector<double> res(chart.N());
  for (int A = 0; A < chart.N(); ++A) {
    double r = eval(substitute(prob.dl_dy(A), jet), pt);
    for (int a = 0; a < chart.m(); ++a)
      r -= eval(diff(substitute(prob.dl_dv(A, a), jet), chart.x(a)), pt);
    res[A] = r;
  }
  return res;
}

GSystemSolution solve_g_system(const LagrangianProblem& prob, const JetPoint& jp) {
  const Chart& chart = prob.chart();
  const int m = chart.m(), N = chart.N();
  const int unknowns = N * m * m;
  const Point pt = to_point(chart, jp);

  Eigen::MatrixXd mat(N, unknowns);
  Eigen::VectorXd rhs(N);
  for (int B = 0; B < N; ++B) {
    for (int A = 0; A < N; ++A)
      for (int a = 0; a < m; ++a)
        for (int nu = 0; nu < m; ++nu)
          mat(B, (A * m + a) * m + nu) = eval(prob.hessian(A * m + a, B * m + nu), pt);
    double r = eval(prob.dl_dy(B), pt);
    for (int nu = 0; nu < m; ++nu) r -= eval(diff(prob.dl_dv(B, nu), chart.x(nu)), pt);
    for (int A = 0; A < N; ++A)
      for (int nu = 0; nu < m; ++nu)
        r -= eval(diff(prob.dl_dv(B, nu), chart.y(A)), pt) * jp.v[A * m + nu];
    rhs(B) = r;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(mat, Eigen::ComputeThinU | Eigen::ComputeFullV);
  const double smax = svd.singularValues().size() ? svd.singularValues()(0) : 0.0;
  const double cutoff = std::max(1e-12, smax * 1e-12);

  GSystemSolution out;
  out.rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > cutoff) ++out.rank;

  Eigen::VectorXd coeff = svd.matrixU().transpose() * rhs;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(unknowns);
  for (int i = 0; i < out.rank; ++i)
    x += (coeff(i) / svd.singularValues()(i)) * svd.matrixV().col(i);
  out.particular.assign(x.data(), x.data() + unknowns);

  for (int i = out.rank; i < unknowns; ++i) {
    const auto col = svd.matrixV().col(i);
    out.nullspace.emplace_back(col.data(), col.data() + unknowns);
  }

  out.residual = (mat * x - rhs).lpNorm<Eigen::Infinity>();
  out.consistent = out.residual <= 1e-9 * (1.0 + rhs.lpNorm<Eigen::Infinity>());
  return out;
}

HamiltonianDerivs hamiltonian_partials(const LagrangianProblem& prob,
                                       const std::vector<double>& x, const std::vector<double>& y,
                                       const std::vector<double>& mom) {
  const Chart& chart = prob.chart();
  const int m = chart.m(), N = chart.N();
  HamiltonianDerivs out;
  out.d_mom.resize(N * m);
  out.d_y.resize(N);
  if (prob.closed_form_h()) {
    Point pt(chart);
    for (int a = 0; a < m; ++a) pt.set(chart.x(a), x[a]);
    for (int A = 0; A < N; ++A) pt.set(chart.y(A), y[A]);
    for (int A = 0; A < N; ++A)
      for (int a = 0; a < m; ++a) pt.set(chart.mom(A, a), mom[A * m + a]);
    for (int A = 0; A < N; ++A) {
      out.d_y[A] = eval(diff(*prob.closed_form_h(), chart.y(A)), pt);
      for (int a = 0; a < m; ++a)
        out.d_mom[A * m + a] = eval(diff(*prob.closed_form_h(), chart.mom(A, a)), pt);
    }
    return out;
  }
  // No closed form: central differences through the Legendre-inversion route.
  const double h = 1e-6;
  JetPoint seed{x, y, {}};
  for (int i = 0; i < N * m; ++i) {
    std::vector<double> hi = mom, lo = mom;
    hi[i] += h;
    lo[i] -= h;
    out.d_mom[i] =
        (hamiltonian_function(prob, hi, seed) - hamiltonian_function(prob, lo, seed)) / (2 * h);
  }
  for (int A = 0; A < N; ++A) {
    JetPoint hi = seed, lo = seed;
    hi.y[A] += h;
    lo.y[A] -= h;
    out.d_y[A] =
        (hamiltonian_function(prob, mom, hi) - hamiltonian_function(prob, mom, lo)) / (2 * h);
  }
  return out;
}

std::vector<double> hdw_residual(const LagrangianProblem& prob, const SectionExprs& s,
                                 const std::vector<double>& x) {
  const Chart& chart = prob.chart();
  const int m = chart.m(), N = chart.N();
  if (!s.has_momenta()) throw Error("HDW residual needs a section with momenta");
  const Point pt = s.base_point(x);

  std::vector<double> yv(N), momv(N * m);
  for (int A = 0; A < N; ++A) yv[A] = eval(s.y(A), pt);
  for (int i = 0; i < N * m; ++i) momv[i] = eval(s.momentum(i / m, i % m), pt);
  const HamiltonianDerivs dh = hamiltonian_partials(prob, x, yv, momv);

  std::vector<double> res(N * m + N);
  for (int A = 0; A < N; ++A)
    for (int a = 0; a < m; ++a)
      res[A * m + a] = dh.d_mom[A * m + a] - eval(diff(s.y(A), chart.x(a)), pt);
  for (int A = 0; A < N; ++A) {
    double div = 0.0;
    for (int a = 0; a < m; ++a) div += eval(diff(s.momentum(A, a), chart.x(a)), pt);
    res[N * m + A] = -dh.d_y[A] - div;
  }
  return res;
}

std::vector<double> holonomy_residual(const SectionExprs& s, const std::vector<double>& x) {
  if (!s.has_v()) throw Error("holonomy residual needs explicit velocity components");
  const Chart& chart = s.chart();
  const Point pt = s.base_point(x);
  std::vector<double> res(chart.N() * chart.m());
  for (int A = 0; A < chart.N(); ++A)
    for (int a = 0; a < chart.m(); ++a)
      res[A * chart.m() + a] =
          eval(s.v(A, a), pt) - eval(diff(s.y(A), chart.x(a)), pt);
  return res;
}

double unified_residual(const LagrangianProblem& prob, const SectionExprs& s,
                        const VectorField& y0, const std::vector<double>& x) {
  const Chart& chart = prob.chart();
  if (!s.has_momenta()) throw Error("unified residual needs a section with momenta");
  const Form omega0 = -1.0 * ext_d(unified_theta(chart, prob.lagrangian()));
  const Form pulled = pullback_section(contract(y0, omega0), s.substitution());
  Form::Key volume_key(chart.m());
  for (int a = 0; a < chart.m(); ++a) volume_key[a] = chart.x(a);
  return eval(pulled.coeff(volume_key), s.base_point(x));
}

double unified_residual_direct(const LagrangianProblem& prob, const SectionExprs& s,
                               const VectorField& y0, const std::vector<double>& x) {
  const Chart& chart = prob.chart();
  const int m = chart.m(), N = chart.N();
  const Point base = s.base_point(x);

  // Full point of W_0 along the section, for evaluating Y0's components and
  // the Lagrangian derivatives.
  Point pt(chart);
  for (int a = 0; a < m; ++a) pt.set(chart.x(a), x[a]);
  for (int A = 0; A < N; ++A) pt.set(chart.y(A), eval(s.y(A), base));
  for (int A = 0; A < N; ++A)
    for (int a = 0; a < m; ++a) pt.set(chart.v(A, a), eval(s.v(A, a), base));
  for (int A = 0; A < N; ++A)
    for (int a = 0; a < m; ++a) pt.set(chart.mom(A, a), eval(s.momentum(A, a), base));

  double total = 0.0;
  for (int A = 0; A < N; ++A) {
    const Expr f = y0.component(chart.y(A));
    if (!f.is_zero()) {
      double divergence = 0.0;
      for (int a = 0; a < m; ++a) divergence += eval(diff(s.momentum(A, a), chart.x(a)), base);
      total += eval(f, pt) * (divergence - eval(prob.dl_dy(A), pt));
    }
    for (int a = 0; a < m; ++a) {
      const Expr g = y0.component(chart.v(A, a));
      if (!g.is_zero())
        total += eval(g, pt) * (pt.get(chart.mom(A, a)) - eval(prob.dl_dv(A, a), pt));
      const Expr h = y0.component(chart.mom(A, a));
      if (!h.is_zero())
        total += eval(h, pt) * (pt.get(chart.v(A, a)) - eval(diff(s.y(A), chart.x(a)), base));
    }
  }
  return total;
}

bool semi_holonomy_check(const FieldCoeffs& coeffs, const Chart& chart, const JetPoint& jp,
                         double tol) {
  const Point pt = to_point(chart, jp);
  for (int A = 0; A < chart.N(); ++A)
    for (int a = 0; a < chart.m(); ++a) {
      const double f = eval(coeffs.F.at(coeffs.f_index(A, a)), pt);
      if (std::abs(f - jp.v[A * chart.m() + a]) > tol) return false;
    }
  return true;
}

std::vector<double> semi_holonomy_vertical_components(const FieldCoeffs& coeffs,
                                                      const Chart& chart, const JetPoint& jp) {
  const MultiVector x0 = build_multivector(
      chart, coeffs, coeffs.H.empty() ? MultiVectorDomain::JetBundle : MultiVectorDomain::Unified);
  const Point pt = to_point(chart, jp);
  std::vector<double> out;
  for (const Form& comp : vertical_tensor_components(chart)) {
    const Form scalar = contract_multi(x0, comp);
    out.push_back(eval(scalar.coeff({}), pt));
  }
  return out;
}

FieldCoeffs fl_relate(const LagrangianProblem& prob, const FieldCoeffs& lag_coeffs,
                      const JetPoint& jp) {
  const Chart& chart = prob.chart();
  const int m = chart.m(), N = chart.N();
  if (!regularity(prob, jp).regular) throw SingularError(singular_refusal_message());
  if (!semi_holonomy_check(lag_coeffs, chart, jp, 1e-9))
    throw Error("fl_relate requires semi-holonomic coefficients (F = v)");

  const Point pt = to_point(chart, jp);
  FieldCoeffs ham;
  ham.m = m;
  ham.N = N;
  ham.F = lag_coeffs.F;
  ham.H.resize(N * m * m, Expr::constant(0.0));

  // Pushforward of the momenta along each leg: the chain rule on
  // p^nu_A = dL/dv^A_nu.
  for (int A = 0; A < N; ++A)
    for (int a = 0; a < m; ++a)
      for (int nu = 0; nu < m; ++nu) {
        double value = eval(diff(prob.dl_dv(A, nu), chart.x(a)), pt);
        for (int B = 0; B < N; ++B) {
          value += eval(diff(prob.dl_dv(A, nu), chart.y(B)), pt) *
                   eval(lag_coeffs.F.at(lag_coeffs.f_index(B, a)), pt);
          for (int mu = 0; mu < m; ++mu)
            value += eval(prob.hessian(B * m + mu, A * m + nu), pt) *
                     eval(lag_coeffs.G.at(lag_coeffs.g_index(B, a, mu)), pt);
        }
        ham.H[ham.g_index(A, a, nu)] = Expr::constant(value);
      }

  // The image must satisfy the HDW coefficient relations.
  const std::vector<double> mom = legendre_restricted(prob, jp);
  const HamiltonianDerivs dh = hamiltonian_partials(prob, jp.x, jp.y, mom);
  for (int A = 0; A < N; ++A) {
    for (int a = 0; a < m; ++a) {
      const double f = eval(ham.F[ham.f_index(A, a)], pt);
      if (std::abs(f - dh.d_mom[A * m + a]) > 1e-8)
        throw Error("pushforward violates the HDW relation F = dH/dp (broken velocity "
                    "coefficients)");
    }
    double trace = 0.0;
    for (int nu = 0; nu < m; ++nu) trace += eval(ham.H[ham.g_index(A, nu, nu)], pt);
    if (std::abs(trace + dh.d_y[A]) > 1e-8)
      throw Error("pushforward violates the HDW trace relation (broken velocity coefficients)");
  }
  return ham;
}

MultiVector build_multivector(const Chart& chart, const FieldCoeffs& coeffs,
                              MultiVectorDomain domain) {
  const int m = chart.m(), N = chart.N();
  if (coeffs.m != m || coeffs.N != N) throw Error("coefficient tables do not match the chart");
  MultiVector x;
  x.factor = coeffs.factor;
  for (int a = 0; a < m; ++a) {
    VectorField leg(chart);
    leg.set(chart.x(a), Expr::constant(1.0));
    if (!coeffs.F.empty())
      for (int A = 0; A < N; ++A) leg.set(chart.y(A), coeffs.F[coeffs.f_index(A, a)]);
    if (domain != MultiVectorDomain::RestrictedMomentum && !coeffs.G.empty())
      for (int A = 0; A < N; ++A)
        for (int nu = 0; nu < m; ++nu) leg.set(chart.v(A, nu), coeffs.G[coeffs.g_index(A, a, nu)]);
    if (domain != MultiVectorDomain::JetBundle && !coeffs.H.empty())
      for (int A = 0; A < N; ++A)
        for (int nu = 0; nu < m; ++nu)
          leg.set(chart.mom(A, nu), coeffs.H[coeffs.g_index(A, a, nu)]);
    x.legs.push_back(std::move(leg));
  }
  return x;
}

}  // namespace vfe
