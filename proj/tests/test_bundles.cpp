#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vfe/bundles.hpp"
#include "vfe/errors.hpp"
#include "vfe/exterior.hpp"
#include "vfe/parser.hpp"
#include "vfe/rng.hpp"

using namespace vfe;

namespace {

const Chart chart(2, 1);

LagrangianProblem minsurf() {
  return LagrangianProblem(chart, parse_expr(chart, "sqrt(1 + v1_1^2 + v1_2^2)"),
                           parse_expr(chart, "-sqrt(1 - p1_1^2 - p1_2^2)"));
}

LagrangianProblem quadratic() {
  return LagrangianProblem(chart, parse_expr(chart, "(v1_1^2 + v1_2^2)/2"));
}

JetPoint jet(double v1, double v2, double x1 = 0.1, double x2 = -0.2, double y = 0.3) {
  return JetPoint{{x1, x2}, {y}, {v1, v2}};
}

JetPoint random_jet(Rng& rng, double box) {
  return jet(rng.uniform(-box, box), rng.uniform(-box, box), rng.uniform(-1, 1),
             rng.uniform(-1, 1), rng.uniform(-1, 1));
}

constexpr double kInvSqrt2 = 0.70710678118654752;

}  // namespace

TEST_CASE("problem construction rejects momentum dependence") {
  CHECK_THROWS_AS(LagrangianProblem(chart, parse_expr(chart, "p1_1 * v1_1")), Error);
  CHECK_THROWS_AS(
      LagrangianProblem(chart, parse_expr(chart, "v1_1"), parse_expr(chart, "v1_1 + p1_1")),
      Error);
}

TEST_CASE("restricted Legendre map of the surface-area Lagrangian") {
  const LagrangianProblem prob = minsurf();
  const auto mom = legendre_restricted(prob, jet(1.0, 0.0));
  CHECK(mom[0] == doctest::Approx(kInvSqrt2).epsilon(1e-15));
  CHECK(mom[1] == 0.0);

  const auto zero = legendre_restricted(prob, jet(0.0, 0.0));
  CHECK(zero[0] == 0.0);
  CHECK(zero[1] == 0.0);
}

TEST_CASE("quadratic Lagrangian has the identity Legendre map") {
  const LagrangianProblem prob = quadratic();
  Rng rng(3);
  for (int k = 0; k < 50; ++k) {
    const JetPoint jp = random_jet(rng, 3.0);
    const auto mom = legendre_restricted(prob, jp);
    CHECK(mom[0] == doctest::Approx(jp.v[0]).epsilon(1e-15));
    CHECK(mom[1] == doctest::Approx(jp.v[1]).epsilon(1e-15));
  }
}

TEST_CASE("extended Legendre map attaches p = L - v dL/dv") {
  const LagrangianProblem prob = minsurf();
  const UnifiedPoint at_slope = legendre_extended(prob, jet(1.0, 0.0));
  CHECK(*at_slope.p == doctest::Approx(std::sqrt(2.0) - kInvSqrt2).epsilon(1e-14));
  const UnifiedPoint at_rest = legendre_extended(prob, jet(0.0, 0.0));
  CHECK(*at_rest.p == 1.0);

  Rng rng(5);
  for (int k = 0; k < 100; ++k)
    CHECK(std::abs(w0_residual(prob, legendre_extended(prob, random_jet(rng, 2.0)))) <= 1e-14);
}

TEST_CASE("Legendre inversion: closed form and round trip") {
  const LagrangianProblem prob = minsurf();
  JetPoint seed = jet(0.0, 0.0);
  const JetPoint inv = legendre_invert(prob, {kInvSqrt2, 0.0}, seed);
  CHECK(inv.v[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(inv.v[1] == doctest::Approx(0.0).epsilon(1e-12));

  const JetPoint at_zero = legendre_invert(prob, {0.0, 0.0}, seed);
  CHECK(at_zero.v[0] == 0.0);
  CHECK(at_zero.v[1] == 0.0);

  Rng rng(7);
  for (int k = 0; k < 100; ++k) {
    JetPoint jp = random_jet(rng, 5.0);
    const JetPoint back = legendre_invert(prob, legendre_restricted(prob, jp), jp);
    CHECK(std::abs(back.v[0] - jp.v[0]) <= 1e-10);
    CHECK(std::abs(back.v[1] - jp.v[1]) <= 1e-10);
  }

  // default seed (v = momenta) also converges well inside the unit disc
  JetPoint bare;
  bare.x = {0.0, 0.0};
  bare.y = {0.0};
  const JetPoint from_default = legendre_invert(prob, {0.6, -0.3}, bare);
  const double norm = std::sqrt(1.0 - 0.36 - 0.09);
  CHECK(from_default.v[0] == doctest::Approx(0.6 / norm).epsilon(1e-12));
  CHECK(from_default.v[1] == doctest::Approx(-0.3 / norm).epsilon(1e-12));
}

TEST_CASE("coupling function") {
  UnifiedPoint up{{0, 0}, {0}, {0, 0}, {0, 0}, 1.0};
  CHECK(coupling(up) == 1.0);

  UnifiedPoint image = legendre_extended(minsurf(), jet(1.0, 0.0));
  CHECK(coupling(image) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));  // = L there

  UnifiedPoint arith{{0, 0}, {0}, {3.0, 0.0}, {2.0, 0.0}, 0.0};
  CHECK(coupling(arith) == 6.0);

  UnifiedPoint no_p{{0, 0}, {0}, {0, 0}, {0, 0}, std::nullopt};
  CHECK_THROWS_AS(coupling(no_p), Error);
}

TEST_CASE("coupling constraint residual") {
  const LagrangianProblem prob = minsurf();
  UnifiedPoint rest{{0, 0}, {0}, {0, 0}, {0, 0}, 0.0};
  CHECK(w0_residual(prob, rest) == -1.0);
  rest.p = 1.0;
  CHECK(w0_residual(prob, rest) == 0.0);
}

TEST_CASE("first-constraint residual") {
  const LagrangianProblem prob = minsurf();
  UnifiedPoint off{{0, 0}, {0}, {1.0, 0.0}, {0.0, 0.0}, std::nullopt};
  const auto res = w1_residual(prob, off);
  CHECK(res[0] == doctest::Approx(-kInvSqrt2).epsilon(1e-15));
  CHECK(res[1] == 0.0);

  Rng rng(9);
  for (int k = 0; k < 50; ++k) {
    const UnifiedPoint image = legendre_extended(prob, random_jet(rng, 2.0));
    for (double r : w1_residual(prob, image)) CHECK(r == 0.0);
  }

  const LagrangianProblem quad = quadratic();
  UnifiedPoint self{{0, 0}, {0}, {0.7, -1.3}, {0.7, -1.3}, std::nullopt};
  for (double r : w1_residual(quad, self)) CHECK(r == 0.0);
}

TEST_CASE("Hamiltonian section attaches the unique constraint-compatible p") {
  const LagrangianProblem prob = minsurf();
  UnifiedPoint rest{{0, 0}, {0}, {0, 0}, {0, 0}, std::nullopt};
  const UnifiedPoint lifted = hamiltonian_section_hat(prob, rest);
  CHECK(*lifted.p == 1.0);
  CHECK(w0_residual(prob, lifted) == 0.0);

  UnifiedPoint slope{{0, 0}, {0}, {1.0, 0.0}, {kInvSqrt2, 0.0}, std::nullopt};
  const UnifiedPoint lifted2 = hamiltonian_section_hat(prob, slope);
  CHECK(*lifted2.p == doctest::Approx(std::sqrt(2.0) - kInvSqrt2).epsilon(1e-14));

  Rng rng(11);
  for (int k = 0; k < 200; ++k) {
    UnifiedPoint r{{rng.uniform(-1, 1), rng.uniform(-1, 1)},
                   {rng.uniform(-1, 1)},
                   {rng.uniform(-2, 2), rng.uniform(-2, 2)},
                   {rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)},
                   std::nullopt};
    const UnifiedPoint lift = hamiltonian_section_hat(prob, r);
    CHECK(w0_residual(prob, lift) == 0.0);  // exact by construction
    // round trip back to the restricted bundle is the identity
    CHECK(lift.x == r.x);
    CHECK(lift.y == r.y);
    CHECK(lift.v == r.v);
    CHECK(lift.mom == r.mom);
    // and no other p closes the constraint
    UnifiedPoint other = lift;
    *other.p += 0.25;
    CHECK(w0_residual(prob, other) == doctest::Approx(0.25).epsilon(1e-12));
  }

  CHECK_THROWS_AS(hamiltonian_section_hat(prob, lifted), Error);  // p already present
}

TEST_CASE("Hamiltonian function via Legendre inversion") {
  const LagrangianProblem prob = minsurf();
  const JetPoint seed = jet(0.0, 0.0);
  CHECK(hamiltonian_function(prob, {0.0, 0.0}, seed) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(hamiltonian_function(prob, {kInvSqrt2, 0.0}, seed) ==
        doctest::Approx(-kInvSqrt2).epsilon(1e-12));

  const LagrangianProblem quad = quadratic();
  Rng rng(13);
  for (int k = 0; k < 50; ++k) {
    const double p1 = rng.uniform(-2, 2), p2 = rng.uniform(-2, 2);
    CHECK(hamiltonian_function(quad, {p1, p2}, seed) ==
          doctest::Approx((p1 * p1 + p2 * p2) / 2).epsilon(1e-12));
  }
}

TEST_CASE("H equals minus the extended momentum on the Legendre graph") {
  const LagrangianProblem prob = minsurf();
  Rng rng(15);
  for (int k = 0; k < 100; ++k) {
    const JetPoint jp = random_jet(rng, 2.0);
    const UnifiedPoint image = legendre_extended(prob, jp);
    CHECK(std::abs(hamiltonian_function(prob, image.mom, jp) + *image.p) <= 1e-10);
  }
}

TEST_CASE("regularity classification") {
  const LagrangianProblem prob = minsurf();
  const Regularity at_zero = regularity(prob, jet(0.0, 0.0));
  CHECK(at_zero.regular);
  CHECK(at_zero.det == doctest::Approx(1.0).epsilon(1e-14));

  // det of the velocity Hessian is 1/L^4 everywhere (hyperregular)
  Rng rng(17);
  for (int k = 0; k < 50; ++k) {
    const JetPoint jp = random_jet(rng, 2.0);
    const double l2 = 1.0 + jp.v[0] * jp.v[0] + jp.v[1] * jp.v[1];
    const Regularity reg = regularity(prob, jp);
    CHECK(reg.regular);
    CHECK(reg.det == doctest::Approx(1.0 / (l2 * l2)).epsilon(1e-12));
  }

  const LagrangianProblem affine(chart, parse_expr(chart, "v1_1"));
  const Regularity sing = regularity(affine, jet(0.0, 0.0));
  CHECK_FALSE(sing.regular);
  CHECK(sing.det == 0.0);
  // momenta outside the image of the degenerate map force a Hessian solve
  CHECK_THROWS_AS(legendre_invert(affine, {0.5, 0.0}, jet(0.0, 0.0)), SingularError);
  CHECK_THROWS_AS(hamiltonian_function(affine, {0.5, 0.0}, jet(0.0, 0.0)), SingularError);
}

TEST_CASE("the Legendre maps pull the canonical forms back to the Poincare-Cartan form") {
  // coefficient-wise on the shared global chart: Theta_L at the jet equals
  // the Liouville form at the extended image and the Hamilton-Cartan form at
  // the restricted image
  const LagrangianProblem prob = minsurf();
  const Form theta_l = lagrangian_theta(chart, prob.lagrangian());
  const Form theta = liouville_theta(chart);
  const Form theta_h = hamiltonian_theta(chart, *prob.closed_form_h());
  Rng rng(21);
  for (int k = 0; k < 50; ++k) {
    const JetPoint jp = random_jet(rng, 2.0);
    const UnifiedPoint image = legendre_extended(prob, jp);
    const Point at_jet = to_point(chart, image);  // jet coords plus image momenta
    for (const Form* f : {&theta, &theta_h})
      for (const auto& [key, coeff] : f->terms())
        CHECK(std::abs(eval(coeff, at_jet) - eval(theta_l.coeff(key), at_jet)) <= 1e-13);
  }
}

TEST_CASE("Hhat is fiberwise projectable exactly on the first constraint set") {
  // dHhat/dv^A_a = p^a_A - dL/dv^A_a as expressions, so it vanishes exactly
  // where the first-constraint residual does.
  const LagrangianProblem prob = minsurf();
  Expr hhat = -prob.lagrangian();
  for (int a = 0; a < 2; ++a)
    hhat = hhat +
           Expr::coordinate(chart, chart.mom(0, a)) * Expr::coordinate(chart, chart.v(0, a));
  Rng rng(19);
  for (int k = 0; k < 100; ++k) {
    UnifiedPoint up{{rng.uniform(-1, 1), rng.uniform(-1, 1)},
                    {rng.uniform(-1, 1)},
                    {rng.uniform(-2, 2), rng.uniform(-2, 2)},
                    {rng.uniform(-0.7, 0.7), rng.uniform(-0.7, 0.7)},
                    0.0};
    const Point pt = to_point(chart, up);
    const auto w1 = w1_residual(prob, up);
    for (int a = 0; a < 2; ++a)
      CHECK(eval(diff(hhat, chart.v(0, a)), pt) == doctest::Approx(w1[a]).epsilon(1e-13));
  }
}
