#include "vfe/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>

#include "vfe/checks.hpp"
#include "vfe/config.hpp"
#include "vfe/errors.hpp"
#include "vfe/exterior.hpp"
#include "vfe/field_eqs.hpp"
#include "vfe/solver.hpp"

namespace vfe {

int log_level() {
  const char* env = std::getenv("VFE_LOG");
  if (!env) return 1;
  if (std::strcmp(env, "quiet") == 0) return 0;
  if (std::strcmp(env, "debug") == 0) return 2;
  return 1;
}

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

std::string key_name(const Chart& chart, const Form::Key& key) {
  if (key.empty()) return "1";
  std::string s;
  for (size_t i = 0; i < key.size(); ++i) {
    if (i) s += " ^ ";
    s += "d" + chart.name(key[i]);
  }
  return s;
}

void print_form(std::ostream& out, const Chart& chart, const Form& f) {
  if (f.empty()) {
    out << "  (zero form)\n";
    return;
  }
  for (const auto& [key, coeff] : f.terms())
    out << "  " << key_name(chart, key) << ":  " << to_string(coeff) << "\n";
}

int fail(std::ostream& err, const std::string& what) {
  err << "error: " << what << "\n";
  return 2;
}

}  // namespace

int cmd_derive(const std::string& config_path, std::ostream& out, std::ostream& err) {
  try {
    const ProblemConfig cfg = load_config(config_path);
    const CompiledProblem compiled = compile(cfg);
    const LagrangianProblem& prob = compiled.problem;
    const Chart& chart = prob.chart();
    const int m = chart.m(), N = chart.N();

    out << "problem: m = " << m << ", N = " << N << "\n";
    out << "L = " << to_string(prob.lagrangian()) << "\n\n";

    out << "restricted Legendre map:\n";
    for (int A = 0; A < N; ++A)
      for (int a = 0; a < m; ++a)
        out << "  " << chart.name(chart.mom(A, a)) << " = " << to_string(prob.dl_dv(A, a))
            << "\n";
    Expr extended = prob.lagrangian();
    for (int A = 0; A < N; ++A)
      for (int a = 0; a < m; ++a)
        extended = extended - Expr::coordinate(chart, chart.v(A, a)) * prob.dl_dv(A, a);
    out << "extended component:\n  p = " << to_string(extended) << "\n\n";

    out << "velocity Hessian ((A,alpha)-major):\n";
    for (int r = 0; r < prob.vdim(); ++r) {
      out << "  [";
      for (int c = 0; c < prob.vdim(); ++c)
        out << (c ? ", " : " ") << to_string(prob.hessian(r, c));
      out << " ]\n";
    }
    JetPoint origin;
    origin.x.assign(m, 0.0);
    origin.y.assign(N, 0.0);
    origin.v.assign(N * m, 0.0);
    try {
      const Regularity reg = regularity(prob, origin);
      out << "det at the origin jet = " << fmt(reg.det) << "  ("
          << (reg.regular ? "regular" : "singular") << " there)\n\n";
    } catch (const EvalError& e) {
      out << "det at the origin jet: not evaluable (" << e.what() << ")\n\n";
    }

    Expr hhat = -prob.lagrangian();
    for (int A = 0; A < N; ++A)
      for (int a = 0; a < m; ++a)
        hhat = hhat + Expr::coordinate(chart, chart.mom(A, a)) *
                          Expr::coordinate(chart, chart.v(A, a));
    out << "unified Hamiltonian:\n  Hhat = " << to_string(hhat) << "\n";
    if (prob.closed_form_h())
      out << "closed-form H:\n  H = " << to_string(*prob.closed_form_h()) << "\n";
    out << "\n";

    out << "Theta_0 coefficients:\n";
    print_form(out, chart, unified_theta(chart, prob.lagrangian()));
    out << "Omega_0 coefficients:\n";
    print_form(out, chart, Expr::constant(-1.0) * ext_d(unified_theta(chart, prob.lagrangian())));
    out << "\n";

    out << "Euler-Lagrange equations (D2[yB;xa,xb] = d2 yB / dxa dxb):\n";
    for (int A = 0; A < N; ++A) {
      Expr lower = prob.dl_dy(A);
      for (int a = 0; a < m; ++a) {
        lower = lower - diff(prob.dl_dv(A, a), chart.x(a));
        for (int B = 0; B < N; ++B)
          lower = lower - diff(prob.dl_dv(A, a), chart.y(B)) *
                              Expr::coordinate(chart, chart.v(B, a));
      }
      out << "  0 = " << to_string(lower);
      for (int B = 0; B < N; ++B)
        for (int a = 0; a < m; ++a)
          for (int b = 0; b < m; ++b) {
            const Expr& h = prob.hessian(A * m + a, B * m + b);
            if (h.is_zero()) continue;
            out << "\n      - (" << to_string(h) << ")*D2[y" << B + 1 << ";x" << a + 1 << ",x"
                << b + 1 << "]";
          }
      out << "\n";
    }

    if (prob.closed_form_h()) {
      out << "\nHDW right-hand sides (closed-form H):\n";
      for (int A = 0; A < N; ++A) {
        for (int a = 0; a < m; ++a)
          out << "  d y" << A + 1 << " / d x" << a + 1 << " = "
              << to_string(diff(*prob.closed_form_h(), chart.mom(A, a))) << "\n";
        out << "  sum_a d " << "p" << A + 1 << "_a / d xa = "
            << to_string(-diff(*prob.closed_form_h(), chart.y(A))) << "\n";
      }
    }
    return 0;
  } catch (const Error& e) {
    return fail(err, e.what());
  } catch (const std::exception& e) {
    return fail(err, std::string("unexpected: ") + e.what());
  }
}

int cmd_check(const std::string& config_path, const CheckCliOptions& cli, std::ostream& out,
              std::ostream& err) {
  try {
    const ProblemConfig cfg = load_config(config_path);
    const CompiledProblem compiled = compile(cfg);
    CheckOptions opts;
    opts.seed = cli.seed.value_or(cfg.seed);
    opts.points = cli.points.value_or(cfg.points);
    opts.v_box = cfg.v_box;
    opts.p_box = cfg.p_box;
    opts.x_box = cfg.x_box;
    opts.y_box = cfg.y_box;
    opts.corrupt_lemma1_sign = cli.corrupt_lemma1_sign;

    const std::vector<CheckResult> results = run_check_suite(compiled.problem, opts);
    bool all_passed = true;
    std::string first_failure;
    for (const CheckResult& r : results) {
      if (log_level() >= 1 || !r.passed)
        out << (r.passed ? "[PASS] " : "[FAIL] ") << r.name << ": points=" << r.points
            << ", worst=" << fmt(r.worst) << ", tol=" << fmt(r.tol) << "\n";
      if (!r.passed && all_passed) {
        all_passed = false;
        first_failure = r.name;
      }
    }
    out << results.size() << " checks, seed " << opts.seed << "\n";
    if (!all_passed) {
      err << "check failed: " << first_failure << "\n";
      return 1;
    }
    return 0;
  } catch (const Error& e) {
    return fail(err, e.what());
  } catch (const std::exception& e) {
    return fail(err, std::string("unexpected: ") + e.what());
  }
}

int cmd_solve(const std::string& config_path, std::ostream& out, std::ostream& err) {
  try {
    const ProblemConfig cfg = load_config(config_path);
    const CompiledProblem compiled = compile(cfg);
    const LagrangianProblem& prob = compiled.problem;
    if (prob.chart().m() != 2 || prob.chart().N() != 1)
      return fail(err, "solve supports m = 2, N = 1 problems");
    if (compiled.boundary.empty())
      return fail(err, "config is missing a [boundary] section");
    const Grid grid = grid_of(cfg);

    const Chart& chart = prob.chart();
    const Expr boundary_expr = compiled.boundary[0];
    const auto boundary = [&](double x1, double x2) {
      Point pt(chart);
      pt.set(chart.x(0), x1).set(chart.x(1), x2);
      return eval(boundary_expr, pt);
    };

    if (log_level() >= 2)
      out << "grid: [" << grid.a1 << "," << grid.b1 << "]x[" << grid.a2 << "," << grid.b2
          << "], h = (" << fmt(grid.h1()) << ", " << fmt(grid.h2()) << "), "
          << (grid.n1 - 2) * (grid.n2 - 2) << " unknowns, tol " << fmt(cfg.tol) << "\n";

    SolveInfo info;
    SolveOptions opts{cfg.tol, cfg.max_iter};
    const DiscreteSection ds = solve_dirichlet(prob, grid, boundary, opts, &info);
    const ResidualReport rep = residual_report(prob, ds, info);
    export_section_csv(ds, cfg.section_path);
    export_report_csv(rep, cfg.report_path);

    out << "solve: " << grid.n1 << "x" << grid.n2 << " grid, " << info.iterations
        << " Newton iterations, final residual " << fmt(info.final_residual) << "\n";
    if (log_level() >= 1) {
      out << "residual summaries (max | rms):\n";
      const auto line = [&](const char* name, const ResidualReport::Summary& s) {
        out << "  " << name << ": " << fmt(s.max_abs) << " | " << fmt(s.rms) << "\n";
      };
      line("el      ", rep.el_summary);
      line("hdw_y   ", rep.hdw_y_summary);
      line("hdw_p   ", rep.hdw_p_summary);
      line("w0      ", rep.w0_summary);
      line("w1      ", rep.w1_summary);
      line("holonomy", rep.hol_summary);
    }
    out << "section: " << cfg.section_path << "\nreport: " << cfg.report_path << "\n";
    return 0;
  } catch (const Error& e) {
    return fail(err, e.what());
  } catch (const std::exception& e) {
    return fail(err, std::string("unexpected: ") + e.what());
  }
}

int cmd_report(const std::string& section_csv, const std::string& config_path, std::ostream& out,
               std::ostream& err) {
  try {
    const ProblemConfig cfg = load_config(config_path);
    const CompiledProblem compiled = compile(cfg);
    const LagrangianProblem& prob = compiled.problem;
    if (prob.chart().m() != 2) return fail(err, "report supports m = 2 problems");
    const Grid grid = grid_of(cfg);
    auto y = import_section_csv(section_csv, grid, prob.chart().N());
    const DiscreteSection ds = make_discrete_section(prob, grid, std::move(y));
    const ResidualReport rep = residual_report(prob, ds);
    export_report_csv(rep, cfg.report_path);
    out << "report over " << section_csv << " (" << grid.n1 << "x" << grid.n2 << ")\n";
    out << "  el max " << fmt(rep.el_summary.max_abs) << ", hdw_y max "
        << fmt(rep.hdw_y_summary.max_abs) << ", hdw_p max " << fmt(rep.hdw_p_summary.max_abs)
        << "\n";
    out << "  w0 max " << fmt(rep.w0_summary.max_abs) << ", w1 max "
        << fmt(rep.w1_summary.max_abs) << ", holonomy max " << fmt(rep.hol_summary.max_abs)
        << "\n";
    out << "report: " << cfg.report_path << "\n";
    return 0;
  } catch (const Error& e) {
    return fail(err, e.what());
  } catch (const std::exception& e) {
    return fail(err, std::string("unexpected: ") + e.what());
  }
}

}  // namespace vfe
