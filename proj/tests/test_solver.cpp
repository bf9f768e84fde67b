#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "vfe/errors.hpp"
#include "vfe/parser.hpp"
#include "vfe/solver.hpp"

using namespace vfe;

namespace {

const Chart chart(2, 1);

LagrangianProblem minsurf(double scale = 1.0) {
  Expr l = parse_expr(chart, "sqrt(1 + v1_1^2 + v1_2^2)");
  if (scale != 1.0) l = Expr::constant(scale) * l;
  return LagrangianProblem(chart, l, parse_expr(chart, "-sqrt(1 - p1_1^2 - p1_2^2)"));
}

double scherk(double x1, double x2) { return std::log(std::cos(x1)) - std::log(std::cos(x2)); }

Grid square(int n) { return Grid{-0.5, 0.5, -0.5, 0.5, n, n}; }

std::string temp_path(const char* name) {
  return (std::filesystem::temp_directory_path() / name).string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  return std::string(std::istreambuf_iterator<char>(in), {});
}

}  // namespace

TEST_CASE("grid validation") {
  const Grid too_few{0, 1, 0, 1, 2, 2};
  const Grid degenerate{0, 0, 0, 1, 5, 5};
  CHECK_THROWS_AS(too_few.validate(), Error);
  CHECK_THROWS_AS(degenerate.validate(), Error);
  const Grid g = square(5);
  CHECK(g.h1() == doctest::Approx(0.25));
  CHECK(g.index(1, 2) == 7);
  CHECK(g.interior(1, 1));
  CHECK_FALSE(g.interior(0, 1));
}

TEST_CASE("affine boundary data is reproduced exactly") {
  const LagrangianProblem prob = minsurf();
  const auto plane = [](double x1, double x2) { return 0.25 + 2.0 * x1 - 0.5 * x2; };
  SolveInfo info;
  const DiscreteSection ds = solve_dirichlet(prob, square(9), plane, {}, &info);
  CHECK(info.converged);
  CHECK(info.iterations == 0);  // the transfinite start is already the solution
  const Grid& g = ds.grid;
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j)
      CHECK(std::abs(ds.y[0][g.index(i, j)] - plane(g.x1(i), g.x2(j))) <= 1e-13);

  const ResidualReport rep = residual_report(prob, ds, info);
  CHECK(rep.el_summary.max_abs <= 1e-13);
  CHECK(rep.hdw_y_summary.max_abs <= 1e-13);
  CHECK(rep.hdw_p_summary.max_abs <= 1e-13);
  CHECK(rep.w0_summary.max_abs <= 1e-13);
  CHECK(rep.w1_summary.max_abs <= 1e-13);
  CHECK(rep.hol_summary.max_abs <= 1e-13);
}

TEST_CASE("zero boundary data gives the zero graph") {
  const DiscreteSection ds =
      solve_dirichlet(minsurf(), square(9), [](double, double) { return 0.0; });
  for (double v : ds.y[0]) CHECK(v == 0.0);
}

TEST_CASE("Scherk problem: convergence order two under grid refinement") {
  const LagrangianProblem prob = minsurf();
  std::vector<double> errors;
  for (int n : {9, 17, 33}) {
    const DiscreteSection ds = solve_dirichlet(prob, square(n), scherk);
    double err = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        err = std::max(err,
                       std::abs(ds.y[0][ds.grid.index(i, j)] - scherk(ds.grid.x1(i), ds.grid.x2(j))));
    errors.push_back(err);
  }
  CHECK(errors[0] / errors[1] == doctest::Approx(4.0).epsilon(0.11));
  CHECK(errors[1] / errors[2] == doctest::Approx(4.0).epsilon(0.11));
  // slope fit over the two refinements
  const double slope = std::log2(errors[0] / errors[2]) / 2.0;
  CHECK(slope == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("sampled exact solutions pass the residual report at discretization accuracy") {
  const LagrangianProblem prob = minsurf();
  const Grid g = square(17);
  std::vector<double> nodes(g.nodes());
  for (int i = 0; i < g.n1; ++i)
    for (int j = 0; j < g.n2; ++j) nodes[g.index(i, j)] = scherk(g.x1(i), g.x2(j));
  const DiscreteSection ds = make_discrete_section(prob, g, {nodes});
  const ResidualReport rep = residual_report(prob, ds);
  const double h2 = g.h1() * g.h1();
  CHECK(rep.el_summary.max_abs <= 10.0 * h2);
  CHECK(rep.hdw_p_summary.max_abs <= 10.0 * h2);
  CHECK(rep.w0_summary.max_abs <= 1e-13);
  CHECK(rep.w1_summary.max_abs <= 1e-13);
  CHECK(rep.hol_summary.max_abs <= 1e-13);
}

TEST_CASE("converged solves satisfy the discrete equation to solver tolerance") {
  const LagrangianProblem prob = minsurf();
  SolveInfo info;
  const DiscreteSection ds = solve_dirichlet(prob, square(17), scherk, {}, &info);
  const ResidualReport rep = residual_report(prob, ds, info);
  const double h2 = ds.grid.h1() * ds.grid.h1();
  CHECK(info.converged);
  CHECK(rep.el_summary.max_abs <= 1e-9);
  CHECK(rep.hdw_p_summary.max_abs <= 5.0 * h2);  // discretization-limited
  CHECK(rep.w1_summary.max_abs <= 1e-13);
  CHECK(rep.hol_summary.max_abs <= 1e-13);
  CHECK(rep.solve_info.iterations == info.iterations);
}

TEST_CASE("HDW residuals of converged solves decay at second order") {
  const LagrangianProblem prob = minsurf();
  std::vector<double> hdw;
  for (int n : {9, 17, 33}) {
    const DiscreteSection ds = solve_dirichlet(prob, square(n), scherk);
    hdw.push_back(residual_report(prob, ds).hdw_p_summary.max_abs);
  }
  CHECK(hdw[0] / hdw[1] == doctest::Approx(4.0).epsilon(0.2));
  CHECK(hdw[1] / hdw[2] == doctest::Approx(4.0).epsilon(0.2));
  CHECK(hdw[2] <= 5e-3);  // the h^2 scale at the 33-node grid
}

TEST_CASE("scaling the density by a constant leaves the solution unchanged") {
  const auto boundary = scherk;
  const DiscreteSection base = solve_dirichlet(minsurf(), square(13), boundary);
  const DiscreteSection scaled = solve_dirichlet(minsurf(3.7), square(13), boundary);
  for (int k = 0; k < base.grid.nodes(); ++k)
    CHECK(std::abs(base.y[0][k] - scaled.y[0][k]) <= 1e-10);
}

TEST_CASE("section CSV: schema, row count, round trip") {
  const LagrangianProblem prob = minsurf();
  const Grid g{0.0, 1.0, 0.0, 1.0, 3, 3};
  std::vector<double> nodes(9);
  for (int i = 0; i < 9; ++i) nodes[i] = 0.1 * i - 0.3;
  const DiscreteSection ds = make_discrete_section(prob, g, {nodes});
  const std::string path = temp_path("vfe_section_test.csv");
  export_section_csv(ds, path);

  const std::string text = slurp(path);
  CHECK(text.substr(0, text.find('\n')) == "x1,x2,y1,v1_1,v1_2,p1_1,p1_2,p");
  CHECK(std::count(text.begin(), text.end(), '\n') == 10);  // header + 9 rows

  const auto back = import_section_csv(path, g, 1);
  for (int i = 0; i < 9; ++i) CHECK(back[0][i] == nodes[i]);  // bit-exact

  const Grid wrong{0.0, 2.0, 0.0, 1.0, 3, 3};
  CHECK_THROWS_AS(import_section_csv(path, wrong, 1), IoError);

  const std::string mangled = temp_path("vfe_section_mangled.csv");
  std::ofstream(mangled) << "x1,x2,y1\n0,0,oops\n";
  CHECK_THROWS_AS(import_section_csv(mangled, g, 1), IoError);
  std::remove(mangled.c_str());
  std::remove(path.c_str());
}

TEST_CASE("report CSV schema") {
  const LagrangianProblem prob = minsurf();
  const Grid g{0.0, 1.0, 0.0, 1.0, 3, 3};
  const DiscreteSection ds = make_discrete_section(prob, g, {std::vector<double>(9, 0.0)});
  const std::string path = temp_path("vfe_report_test.csv");
  export_report_csv(residual_report(prob, ds), path);
  const std::string text = slurp(path);
  CHECK(text.substr(0, text.find('\n')) ==
        "x1,x2,res_el_1,res_hdw_y_1,res_hdw_p_1,res_w0,res_w1_max,res_hol_max");
  std::remove(path.c_str());
}

TEST_CASE("identical inputs produce byte-identical CSV output") {
  const LagrangianProblem prob = minsurf();
  const std::string a = temp_path("vfe_det_a.csv"), b = temp_path("vfe_det_b.csv");
  export_section_csv(solve_dirichlet(prob, square(9), scherk), a);
  export_section_csv(solve_dirichlet(prob, square(9), scherk), b);
  CHECK(slurp(a) == slurp(b));
  CHECK(!slurp(a).empty());
  std::remove(a.c_str());
  std::remove(b.c_str());
}

TEST_CASE("solver rejects problems outside its scope") {
  const Chart wide(2, 2);
  const LagrangianProblem two_fields(wide,
                                     parse_expr(wide, "(v1_1^2 + v1_2^2 + v2_1^2 + v2_2^2)/2"));
  const auto flat = [](double, double) { return 0.0; };
  CHECK_THROWS_AS(solve_dirichlet(two_fields, square(5), flat), Error);
  const Grid tiny{0, 1, 0, 1, 2, 2};
  CHECK_THROWS_AS(solve_dirichlet(minsurf(), tiny, flat), Error);
}

TEST_CASE("Newton reports non-convergence instead of looping") {
  SolveOptions opts;
  opts.max_iter = 0;
  opts.tol = 1e-10;
  CHECK_THROWS_AS(solve_dirichlet(minsurf(), square(9), scherk, opts), ConvergenceError);
}
