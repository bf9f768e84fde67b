#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <thread>

#include "vfe/errors.hpp"
#include "vfe/parser.hpp"
#include "vfe/rng.hpp"

using namespace vfe;

namespace {

const Chart chart(2, 1);  // x1 x2 y1 v1_1 v1_2 p1_1 p1_2 p

Expr minsurf_lagrangian() { return parse_expr(chart, "sqrt(1 + v1_1^2 + v1_2^2)"); }

Point origin_point() {
  Point pt(chart);
  for (int i = 0; i < chart.dim(); ++i) pt.set(i, 0.0);
  return pt;
}

Point random_point(Rng& rng, double box = 1.5) {
  Point pt(chart);
  for (int i = 0; i < chart.dim(); ++i) pt.set(i, rng.uniform(-box, box));
  return pt;
}

}  // namespace

TEST_CASE("chart layout and naming") {
  CHECK(chart.dim() == 8);
  CHECK(chart.name(chart.x(0)) == "x1");
  CHECK(chart.name(chart.y(0)) == "y1");
  CHECK(chart.name(chart.v(0, 1)) == "v1_2");
  CHECK(chart.name(chart.mom(0, 0)) == "p1_1");
  CHECK(chart.name(chart.p()) == "p");
  CHECK(chart.index_of("v1_2") == chart.v(0, 1));
  CHECK(chart.index_of("nope") == -1);
  CHECK_THROWS_AS(Chart(0, 1), Error);
  CHECK_THROWS_AS(Chart(1, 0), Error);

  const Chart big(3, 2);
  CHECK(big.dim() == 3 + 2 + 6 + 6 + 1);
  CHECK(big.name(big.v(1, 2)) == "v2_3");
  CHECK(big.kind(big.mom(1, 0)) == Chart::Kind::Momentum);
}

TEST_CASE("diff: Legendre component of the minimal-surface Lagrangian") {
  const Expr l = minsurf_lagrangian();
  const Expr dv1 = diff(l, chart.v(0, 0));
  const Expr closed = parse_expr(chart, "v1_1 / sqrt(1 + v1_1^2 + v1_2^2)");
  Rng rng(7);
  for (int k = 0; k < 50; ++k) {
    const Point pt = random_point(rng);
    CHECK(eval(dv1, pt) == doctest::Approx(eval(closed, pt)).epsilon(1e-14));
  }
}

TEST_CASE("diff: constants and unknown coordinates") {
  CHECK(diff(Expr::constant(7.0), chart.x(0)).is_zero());
  const Expr e = parse_expr(chart, "x1 + y1*v1_1");
  CHECK(eval(diff(e, chart.x(0)), origin_point()) == 1.0);
}

TEST_CASE("diff twice at the origin against the finite-difference oracle") {
  const Expr l = minsurf_lagrangian();
  const Expr first = diff(l, chart.v(0, 0));
  const Expr second = diff(first, chart.v(0, 0));
  CHECK(eval(second, origin_point()) == doctest::Approx(1.0).epsilon(1e-14));
  // the oracle itself: central differences of the first derivative
  const FdCheck fd = fd_check(first, chart.v(0, 0), origin_point(), 1e-5);
  CHECK(fd.analytic == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(fd.numeric == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("eval: minimal-surface values and the closed-form Hamiltonian") {
  const Expr l = minsurf_lagrangian();
  Point pt = origin_point();
  CHECK(eval(l, pt) == 1.0);
  pt.set(chart.v(0, 0), 1.0);
  CHECK(eval(l, pt) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));

  const Expr h = parse_expr(chart, "-sqrt(1 - p1_1^2 - p1_2^2)");
  CHECK(eval(h, origin_point()) == -1.0);
}

TEST_CASE("eval errors: missing coordinates and singularities") {
  Point partial(chart);
  partial.set(chart.x(0), 1.0);
  const Expr e = parse_expr(chart, "x1 + v1_1");
  CHECK_THROWS_WITH_AS(eval(e, partial), doctest::Contains("v1_1"), EvalError);

  Point pt = origin_point();
  CHECK_THROWS_WITH_AS(eval(parse_expr(chart, "1/(x1 - x1)"), pt),
                       doctest::Contains("division by zero"), EvalError);
  CHECK_THROWS_WITH_AS(eval(parse_expr(chart, "ln(x1)"), pt),
                       doctest::Contains("log of non-positive"), EvalError);
  pt.set(chart.x(0), -1.0);
  CHECK_THROWS_WITH_AS(eval(parse_expr(chart, "sqrt(x1)"), pt),
                       doctest::Contains("sqrt of negative"), EvalError);
  CHECK_THROWS_AS(eval(parse_expr(chart, "x1^(-1)"), origin_point()), EvalError);
  // the offending subexpression is named
  try {
    eval(parse_expr(chart, "1 + ln(x1 - 2)"), origin_point());
    CHECK(false);
  } catch (const EvalError& err) {
    CHECK(std::string(err.what()).find("ln(x1 - 2)") != std::string::npos);
  }
}

TEST_CASE("fd_check examples") {
  Point pt = origin_point();
  pt.set(chart.v(0, 0), 3.0);
  const FdCheck square = fd_check(parse_expr(chart, "v1_1^2"), chart.v(0, 0), pt, 1e-5);
  CHECK(square.analytic == 6.0);
  CHECK(square.abs_err < 1e-8);

  Point unit = origin_point();
  unit.set(chart.v(0, 0), 1.0);
  const FdCheck slope = fd_check(minsurf_lagrangian(), chart.v(0, 0), unit, 1e-5);
  CHECK(slope.analytic == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
  CHECK(slope.abs_err < 1e-7);

  const FdCheck even =
      fd_check(parse_expr(chart, "ln(cos(x1))"), chart.x(0), origin_point(), 1e-5);
  CHECK(even.analytic == 0.0);
  CHECK(even.abs_err < 1e-9);

  Point near_edge = origin_point();
  near_edge.set(chart.x(0), 1.0 - 1e-7);
  CHECK_THROWS_AS(fd_check(parse_expr(chart, "sqrt(1 - x1)"), chart.x(0), near_edge, 1e-5),
                  EvalError);
}

TEST_CASE("property: finite differences track every analytic derivative") {
  const char* zoo[] = {
      "sqrt(1 + v1_1^2 + v1_2^2)",
      "sin(x1)*cos(x2) + atan(y1)",
      "ln(2 + sin(v1_1))",
      "(x1 + 2*y1)^3 / (4 + v1_2^2)",
      "x1*x2*y1*v1_1 - p1_1^2",
      "1/(3 + cos(x1))",
  };
  Rng rng(11);
  for (const char* text : zoo) {
    const Expr e = parse_expr(chart, text);
    for (int k = 0; k < 30; ++k) {
      const Point pt = random_point(rng, 0.9);
      for (int c : referenced_coords(e)) {
        const FdCheck fd = fd_check(e, c, pt, 1e-5);
        CHECK(fd.abs_err <= 1e-6 * (1.0 + std::abs(fd.analytic)));
      }
    }
  }
}

TEST_CASE("property: diff is linear") {
  Rng rng(13);
  const Expr e1 = parse_expr(chart, "sin(x1*v1_1) + y1^2");
  const Expr e2 = parse_expr(chart, "sqrt(4 + x1^2 + v1_1^2)");
  const double a = 2.75;
  const Expr combined = diff(Expr::constant(a) * e1 + e2, chart.v(0, 0));
  const Expr split = Expr::constant(a) * diff(e1, chart.v(0, 0)) + diff(e2, chart.v(0, 0));
  for (int k = 0; k < 100; ++k) {
    const Point pt = random_point(rng);
    CHECK(eval(combined, pt) == doctest::Approx(eval(split, pt)).epsilon(1e-12));
  }
}

TEST_CASE("property: mixed partials commute") {
  Rng rng(17);
  const Expr e = parse_expr(chart, "sin(x1*v1_1)*sqrt(2 + y1^2) + atan(x2*v1_2)");
  const int coords[] = {chart.x(0), chart.x(1), chart.y(0), chart.v(0, 0), chart.v(0, 1)};
  for (int k = 0; k < 40; ++k) {
    const Point pt = random_point(rng);
    for (int c1 : coords)
      for (int c2 : coords) {
        const double ab = eval(diff(diff(e, c1), c2), pt);
        const double ba = eval(diff(diff(e, c2), c1), pt);
        CHECK(std::abs(ab - ba) <= 1e-10 * (1.0 + std::abs(ab)));
      }
  }
}

TEST_CASE("parser: syntax, precedence, errors") {
  Point pt = origin_point();
  pt.set(chart.x(0), 2.0);
  CHECK(eval(parse_expr(chart, "2*x1^2"), pt) == 8.0);  // ^ binds tighter than *
  CHECK(eval(parse_expr(chart, "-x1^2"), pt) == -4.0);  // unary minus applies last
  CHECK(eval(parse_expr(chart, "x1^-2"), pt) == 0.25);
  CHECK(eval(parse_expr(chart, "x1^(-2)"), pt) == 0.25);
  CHECK(eval(parse_expr(chart, "1 - 2 - 3"), pt) == -4.0);  // left assoc
  CHECK(eval(parse_expr(chart, "12/4/3"), pt) == 1.0);
  CHECK(eval(parse_expr(chart, "2e-1 + .5"), pt) == doctest::Approx(0.7));

  CHECK_THROWS_AS(parse_expr(chart, "x1^2.5"), ParseError);
  CHECK_THROWS_AS(parse_expr(chart, "exp(x1)"), ParseError);
  CHECK_THROWS_AS(parse_expr(chart, "(x1 + "), ParseError);
  CHECK_THROWS_AS(parse_expr(chart, "x1 + * 2"), ParseError);
  CHECK_THROWS_AS(parse_expr(chart, "x1 x2"), ParseError);

  try {
    parse_expr(chart, "sqrt(1 + bogus^2)");
    CHECK(false);
  } catch (const ParseError& err) {
    CHECK(std::string(err.what()).find("bogus") != std::string::npos);
    CHECK(err.line == 1);
    CHECK(err.column == 10);
  }
}

TEST_CASE("parser round trip through to_string") {
  Rng rng(23);
  const char* samples[] = {
      "sqrt(1 + v1_1^2 + v1_2^2)",
      "-(x1 - x2)/(1 + y1^2) + atan(v1_1)*sin(x2)",
      "p1_1*v1_1 + p1_2*v1_2 + p",
      "x1^3 - 2*x2^(-2) + ln(2 + cos(y1))",
  };
  for (const char* text : samples) {
    const Expr e = parse_expr(chart, text);
    const Expr back = parse_expr(chart, to_string(e));
    for (int k = 0; k < 20; ++k) {
      Point pt(chart);
      for (int i = 0; i < chart.dim(); ++i) pt.set(i, rng.uniform(0.1, 0.9));
      CHECK(eval(back, pt) == doctest::Approx(eval(e, pt)).epsilon(1e-14));
    }
  }
}

TEST_CASE("substitute replaces coordinates by expressions") {
  const Expr e = parse_expr(chart, "v1_1^2 + y1");
  std::map<int, Expr> repl;
  repl.emplace(chart.v(0, 0), parse_expr(chart, "2*x1"));
  repl.emplace(chart.y(0), parse_expr(chart, "x1*x2"));
  const Expr subbed = substitute(e, repl);
  Point pt(chart);
  pt.set(chart.x(0), 3.0).set(chart.x(1), 2.0);
  CHECK(eval(subbed, pt) == 42.0);  // (2*3)^2 + 3*2
  const auto refs = referenced_coords(subbed);
  CHECK(refs.count(chart.v(0, 0)) == 0);
  CHECK(refs.count(chart.y(0)) == 0);
}

TEST_CASE("concurrent evaluation of a shared expression") {
  const Expr e = diff(diff(minsurf_lagrangian(), chart.v(0, 0)), chart.v(0, 1));
  std::vector<double> results(4, 0.0);
  std::vector<std::thread> workers;
  for (int t = 0; t < 4; ++t)
    workers.emplace_back([&, t] {
      Rng rng(99);  // identical streams, so the sums must agree bitwise
      double sum = 0.0;
      for (int k = 0; k < 2000; ++k) {
        Point pt(chart);
        for (int i = 0; i < chart.dim(); ++i) pt.set(i, rng.uniform(-1.0, 1.0));
        sum += eval(e, pt);
      }
      results[t] = sum;
    });
  for (auto& w : workers) w.join();
  for (int t = 1; t < 4; ++t) CHECK(results[t] == results[0]);
}
