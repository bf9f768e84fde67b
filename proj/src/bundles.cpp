#include "vfe/bundles.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "vfe/errors.hpp"

namespace vfe {

LagrangianProblem::LagrangianProblem(Chart chart, Expr lagrangian,
                                     std::optional<Expr> closed_form_hamiltonian)
    : chart_(std::move(chart)),
      lagrangian_(std::move(lagrangian)),
      closed_form_h_(std::move(closed_form_hamiltonian)) {
  for (int idx : referenced_coords(lagrangian_)) {
    const auto kind = chart_.kind(idx);
    if (kind == Chart::Kind::Momentum || kind == Chart::Kind::ScalarMomentum)
      throw Error("Lagrangian must not reference momentum coordinate '" + chart_.name(idx) + "'");
  }
  if (closed_form_h_) {
    for (int idx : referenced_coords(*closed_form_h_)) {
      const auto kind = chart_.kind(idx);
      if (kind == Chart::Kind::Velocity || kind == Chart::Kind::ScalarMomentum)
        throw Error("Hamiltonian must not reference coordinate '" + chart_.name(idx) + "'");
    }
  }
  const int nv = vdim();
  dl_dv_.reserve(nv);
  for (int A = 0; A < chart_.N(); ++A)
    for (int a = 0; a < chart_.m(); ++a) dl_dv_.push_back(diff(lagrangian_, chart_.v(A, a)));
  dl_dy_.reserve(chart_.N());
  for (int A = 0; A < chart_.N(); ++A) dl_dy_.push_back(diff(lagrangian_, chart_.y(A)));
  hessian_.reserve(nv * nv);
  for (int row = 0; row < nv; ++row)
    for (int B = 0; B < chart_.N(); ++B)
      for (int b = 0; b < chart_.m(); ++b) hessian_.push_back(diff(dl_dv_[row], chart_.v(B, b)));
}

Point to_point(const Chart& chart, const JetPoint& jp) {
  if (static_cast<int>(jp.x.size()) != chart.m() || static_cast<int>(jp.y.size()) != chart.N() ||
      static_cast<int>(jp.v.size()) != chart.N() * chart.m())
    throw Error("jet point dimensions do not match the chart");
  Point pt(chart);
  for (int a = 0; a < chart.m(); ++a) pt.set(chart.x(a), jp.x[a]);
  for (int A = 0; A < chart.N(); ++A) pt.set(chart.y(A), jp.y[A]);
  for (int A = 0; A < chart.N(); ++A)
    for (int a = 0; a < chart.m(); ++a) pt.set(chart.v(A, a), jp.v[A * chart.m() + a]);
  return pt;
}

Point to_point(const Chart& chart, const UnifiedPoint& up) {
  Point pt = to_point(chart, JetPoint{up.x, up.y, up.v});
  if (static_cast<int>(up.mom.size()) != chart.N() * chart.m())
    throw Error("unified point momenta do not match the chart");
  for (int A = 0; A < chart.N(); ++A)
    for (int a = 0; a < chart.m(); ++a) pt.set(chart.mom(A, a), up.mom[A * chart.m() + a]);
  if (up.p) pt.set(chart.p(), *up.p);
  return pt;
}

JetPoint jet_of(const Chart&, const UnifiedPoint& up) { return JetPoint{up.x, up.y, up.v}; }

std::vector<double> legendre_restricted(const LagrangianProblem& prob, const JetPoint& jp) {
  const Point pt = to_point(prob.chart(), jp);
  std::vector<double> mom(prob.vdim());
  for (int A = 0; A < prob.chart().N(); ++A)
    for (int a = 0; a < prob.chart().m(); ++a)
      mom[A * prob.chart().m() + a] = eval(prob.dl_dv(A, a), pt);
  return mom;
}

UnifiedPoint legendre_extended(const LagrangianProblem& prob, const JetPoint& jp) {
  UnifiedPoint up;
  up.x = jp.x;
  up.y = jp.y;
  up.v = jp.v;
  up.mom = legendre_restricted(prob, jp);
  double pv = 0.0;
  for (int i = 0; i < prob.vdim(); ++i) pv += jp.v[i] * up.mom[i];
  up.p = eval(prob.lagrangian(), to_point(prob.chart(), jp)) - pv;
  return up;
}

JetPoint legendre_invert(const LagrangianProblem& prob, const std::vector<double>& momenta,
                         const JetPoint& seed, double tol, int max_iter) {
  const int nv = prob.vdim();
  if (static_cast<int>(momenta.size()) != nv) throw Error("momenta size does not match the chart");
  JetPoint jp = seed;
  if (jp.v.empty()) jp.v = momenta;  // default seed, exact for quadratic L
  for (int iter = 0; iter < max_iter; ++iter) {
    const std::vector<double> current = legendre_restricted(prob, jp);
    Eigen::VectorXd residual(nv);
    for (int i = 0; i < nv; ++i) residual[i] = momenta[i] - current[i];
    if (residual.lpNorm<Eigen::Infinity>() <= tol) return jp;
    const Point pt = to_point(prob.chart(), jp);
    Eigen::MatrixXd hess(nv, nv);
    for (int r = 0; r < nv; ++r)
      for (int c = 0; c < nv; ++c) hess(r, c) = eval(prob.hessian(r, c), pt);
    Eigen::PartialPivLU<Eigen::MatrixXd> lu(hess);
    if (std::abs(lu.determinant()) <= 1e-12)
      throw SingularError("singular velocity Hessian in Legendre inversion");
    const Eigen::VectorXd step = lu.solve(residual);
    for (int i = 0; i < nv; ++i) jp.v[i] += step[i];
  }
  throw ConvergenceError("Legendre inversion did not converge within " +
                         std::to_string(max_iter) + " iterations");
}

double coupling(const UnifiedPoint& up) {
  if (!up.p) throw Error("coupling requires the scalar momentum component p");
  double pv = *up.p;
  for (size_t i = 0; i < up.mom.size(); ++i) pv += up.mom[i] * up.v[i];
  return pv;
}

double w0_residual(const LagrangianProblem& prob, const UnifiedPoint& up) {
  if (!up.p) throw Error("constraint residual requires the scalar momentum component p");
  // Same accumulation order as the p attached by the Legendre map and the
  // Hamiltonian section, so their images zero this residual bitwise.
  double pv = 0.0;
  for (size_t i = 0; i < up.mom.size(); ++i) pv += up.mom[i] * up.v[i];
  const double l = eval(prob.lagrangian(), to_point(prob.chart(), jet_of(prob.chart(), up)));
  return *up.p - (l - pv);
}

std::vector<double> w1_residual(const LagrangianProblem& prob, const UnifiedPoint& up) {
  const std::vector<double> fl = legendre_restricted(prob, jet_of(prob.chart(), up));
  std::vector<double> res(fl.size());
  for (size_t i = 0; i < fl.size(); ++i) res[i] = up.mom[i] - fl[i];
  return res;
}

UnifiedPoint hamiltonian_section_hat(const LagrangianProblem& prob,
                                     const UnifiedPoint& restricted) {
  if (restricted.p) throw Error("input already has a scalar momentum component");
  UnifiedPoint up = restricted;
  double pv = 0.0;
  for (size_t i = 0; i < up.mom.size(); ++i) pv += up.mom[i] * up.v[i];
  const double l = eval(prob.lagrangian(), to_point(prob.chart(), jet_of(prob.chart(), up)));
  up.p = l - pv;  // -(p v - L)
  return up;
}

double hamiltonian_function(const LagrangianProblem& prob, const std::vector<double>& momenta,
                            const JetPoint& seed) {
  const JetPoint inverted = legendre_invert(prob, momenta, seed);
  double pv = 0.0;
  for (int i = 0; i < prob.vdim(); ++i) pv += momenta[i] * inverted.v[i];
  return pv - eval(prob.lagrangian(), to_point(prob.chart(), inverted));
}

Regularity regularity(const LagrangianProblem& prob, const JetPoint& jp) {
  const int nv = prob.vdim();
  const Point pt = to_point(prob.chart(), jp);
  Eigen::MatrixXd hess(nv, nv);
  for (int r = 0; r < nv; ++r)
    for (int c = 0; c < nv; ++c) hess(r, c) = eval(prob.hessian(r, c), pt);
  const double det = hess.determinant();
  return Regularity{std::abs(det) > 1e-12, det};
}

}  // namespace vfe
