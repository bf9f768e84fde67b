#include "vfe/checks.hpp"

#include <cmath>

#include "vfe/errors.hpp"
#include "vfe/exterior.hpp"
#include "vfe/field_eqs.hpp"
#include "vfe/rng.hpp"

namespace vfe {

namespace {

struct Sampler {
  const Chart& chart;
  const CheckOptions& opts;
  Rng rng;

  Sampler(const Chart& c, const CheckOptions& o) : chart(c), opts(o), rng(o.seed) {}

  std::vector<double> momenta_row() {
    // Per-field momentum vector with Euclidean norm <= p_box.
    while (true) {
      std::vector<double> row(chart.m());
      double norm2 = 0.0;
      for (double& v : row) {
        v = rng.uniform(-opts.p_box, opts.p_box);
        norm2 += v * v;
      }
      if (norm2 <= opts.p_box * opts.p_box) return row;
    }
  }

  JetPoint jet() {
    JetPoint jp;
    for (int a = 0; a < chart.m(); ++a) jp.x.push_back(rng.uniform(-opts.x_box, opts.x_box));
    for (int A = 0; A < chart.N(); ++A) jp.y.push_back(rng.uniform(-opts.y_box, opts.y_box));
    for (int k = 0; k < chart.N() * chart.m(); ++k)
      jp.v.push_back(rng.uniform(-opts.v_box, opts.v_box));
    return jp;
  }

  std::vector<double> momenta() {
    std::vector<double> mom;
    for (int A = 0; A < chart.N(); ++A) {
      const std::vector<double> row = momenta_row();
      mom.insert(mom.end(), row.begin(), row.end());
    }
    return mom;
  }

  UnifiedPoint unified(bool with_p) {
    const JetPoint jp = jet();
    UnifiedPoint up{jp.x, jp.y, jp.v, momenta(), std::nullopt};
    if (with_p) up.p = rng.uniform(-1.0, 1.0);
    return up;
  }

  Point full_point() { return to_point(chart, unified(true)); }

  /// Random polynomial of total degree <= 2 over the given coordinates.
  Expr poly(const std::vector<int>& coords, int terms = 4) {
    Expr e = Expr::constant(rng.uniform(-1.0, 1.0));
    for (int t = 0; t < terms; ++t) {
      const int i = coords[rng.next() % coords.size()];
      const int j = coords[rng.next() % coords.size()];
      Expr term = Expr::constant(rng.uniform(-1.0, 1.0)) * Expr::coordinate(chart, i);
      if (t % 2 == 0) term = term * Expr::coordinate(chart, j);
      e = e + term;
    }
    return e;
  }

  std::vector<int> base_coords() {
    std::vector<int> out;
    for (int a = 0; a < chart.m(); ++a) out.push_back(chart.x(a));
    return out;
  }

  std::vector<int> all_coords() {
    std::vector<int> out;
    for (int i = 0; i < chart.dim(); ++i) out.push_back(i);
    return out;
  }
};

double eval_form_diff(const Form& a, const Form& b, const Point& pt) {
  double worst = 0.0;
  auto keys_of = [](const Form& f) {
    std::vector<Form::Key> keys;
    for (const auto& [k, c] : f.terms()) keys.push_back(k);
    return keys;
  };
  for (const auto& keys : {keys_of(a), keys_of(b)})
    for (const auto& k : keys)
      worst = std::max(worst, std::abs(eval(a.coeff(k), pt) - eval(b.coeff(k), pt)));
  return worst;
}

double eval_form_max(const Form& f, const Point& pt) {
  double worst = 0.0;
  for (const auto& [k, c] : f.terms()) worst = std::max(worst, std::abs(eval(c, pt)));
  return worst;
}

/// Hand expansion of the unified (m+1)-form from its printed coefficient
/// table; independent of ext_d.
Form expanded_unified_omega(const Chart& chart, const Expr& lagrangian) {
  const int m = chart.m(), N = chart.N();
  Form omega(chart, m + 1);
  Form::Key base(m);
  for (int a = 0; a < m; ++a) base[a] = chart.x(a);
  const auto with_front = [&](int idx) {
    Form::Key k;
    k.push_back(idx);
    k.insert(k.end(), base.begin(), base.end());
    return k;
  };
  for (int A = 0; A < N; ++A) {
    omega.add_term(with_front(chart.y(A)), -diff(lagrangian, chart.y(A)));
    for (int a = 0; a < m; ++a) {
      omega.add_term(with_front(chart.v(A, a)),
                     Expr::coordinate(chart, chart.mom(A, a)) -
                         diff(lagrangian, chart.v(A, a)));
      omega.add_term(with_front(chart.mom(A, a)), Expr::coordinate(chart, chart.v(A, a)));
      // -dp^a_A ^ dy^A ^ d^{m-1}x_a with d^{m-1}x_a = (-1)^a (x-tuple minus a)
      Form::Key k;
      k.push_back(chart.mom(A, a));
      k.push_back(chart.y(A));
      for (int b = 0; b < m; ++b)
        if (b != a) k.push_back(chart.x(b));
      omega.add_term(std::move(k), Expr::constant(a % 2 == 0 ? -1.0 : 1.0));
    }
  }
  return omega;
}

/// Hand expansion of the multimomentum Liouville (m+1)-form.
Form expanded_liouville_omega(const Chart& chart) {
  const int m = chart.m(), N = chart.N();
  Form omega(chart, m + 1);
  for (int A = 0; A < N; ++A)
    for (int a = 0; a < m; ++a) {
      Form::Key k;
      k.push_back(chart.mom(A, a));
      k.push_back(chart.y(A));
      for (int b = 0; b < m; ++b)
        if (b != a) k.push_back(chart.x(b));
      omega.add_term(std::move(k), Expr::constant(a % 2 == 0 ? -1.0 : 1.0));
    }
  Form::Key k;
  k.push_back(chart.p());
  for (int a = 0; a < m; ++a) k.push_back(chart.x(a));
  omega.add_term(std::move(k), Expr::constant(-1.0));
  return omega;
}

}  // namespace

std::vector<CheckResult> run_check_suite(const LagrangianProblem& prob,
                                         const CheckOptions& opts) {
  const Chart& chart = prob.chart();
  const int m = chart.m(), N = chart.N();

  {
    // The suites below assume the regular case throughout.
    Sampler probe(chart, opts);
    for (int k = 0; k < 5; ++k)
      if (!regularity(prob, probe.jet()).regular) throw SingularError(singular_refusal_message());
  }

  std::vector<CheckResult> results;
  const auto run = [&](const std::string& name, double tol, auto&& body) {
    CheckResult r;
    r.name = name;
    r.tol = tol;
    Sampler sampler(chart, opts);
    body(sampler, r);
    r.passed = r.worst <= tol;
    results.push_back(std::move(r));
  };
  const auto track = [](CheckResult& r, double dev) {
    r.worst = std::max(r.worst, std::abs(dev));
    ++r.points;
  };

  const Form omega0 = -1.0 * ext_d(unified_theta(chart, prob.lagrangian()));
  const Form omega_liouville = -1.0 * ext_d(liouville_theta(chart));
  const Form omega_lagr = -1.0 * ext_d(lagrangian_theta(chart, prob.lagrangian()));
  const Form volume = Form::volume(chart);

  run("wedge-antisymmetry", 1e-12, [&](Sampler& s, CheckResult& r) {
    for (int k = 0; k < opts.points; ++k) {
      const auto coords = s.all_coords();
      Form a(chart, 1), b(chart, k % 2 == 0 ? 1 : 2);
      a.add_term({coords[s.rng.next() % coords.size()]}, s.poly(coords));
      if (b.degree() == 1) {
        b.add_term({coords[s.rng.next() % coords.size()]}, s.poly(coords));
      } else {
        b.add_term({coords[s.rng.next() % coords.size()], coords[s.rng.next() % coords.size()]},
                   s.poly(coords));
      }
      const int sign = (a.degree() * b.degree()) % 2 == 0 ? 1 : -1;
      const Form lhs = wedge(a, b);
      const Form rhs = Expr::constant(sign) * wedge(b, a);
      track(r, eval_form_diff(lhs, rhs, s.full_point()));
    }
  });

  run("exterior-derivative-nilpotent", 1e-12, [&](Sampler& s, CheckResult& r) {
    for (int k = 0; k < opts.points; ++k) {
      const auto coords = s.all_coords();
      Form a(chart, k % 2);
      if (a.degree() == 0)
        a.add_term({}, s.poly(coords));
      else
        a.add_term({coords[s.rng.next() % coords.size()]}, s.poly(coords));
      track(r, eval_form_max(ext_d(ext_d(a)), s.full_point()));
    }
  });

  run("leibniz-rule", 1e-12, [&](Sampler& s, CheckResult& r) {
    for (int k = 0; k < opts.points; ++k) {
      const auto coords = s.all_coords();
      Form a(chart, 1), b(chart, 1);
      a.add_term({coords[s.rng.next() % coords.size()]}, s.poly(coords));
      b.add_term({coords[s.rng.next() % coords.size()]}, s.poly(coords));
      const Form lhs = ext_d(wedge(a, b));
      const Form rhs = wedge(ext_d(a), b) - wedge(a, ext_d(b));
      track(r, eval_form_diff(lhs, rhs, s.full_point()));
    }
  });

  run("interior-product-nilpotent", 1e-12, [&](Sampler& s, CheckResult& r) {
    for (int k = 0; k < opts.points; ++k) {
      const auto coords = s.all_coords();
      VectorField v(chart);
      for (int t = 0; t < 3; ++t)
        v.set(coords[s.rng.next() % coords.size()], s.poly(coords, 2));
      Form a(chart, 2);
      a.add_term({coords[s.rng.next() % coords.size()], coords[s.rng.next() % coords.size()]},
                 s.poly(coords));
      a.add_term({coords[s.rng.next() % coords.size()], coords[s.rng.next() % coords.size()]},
                 s.poly(coords));
      track(r, eval_form_max(contract(v, contract(v, a)), s.full_point()));
    }
  });

  run("cartan-sign-convention", 1e-15, [&](Sampler& s, CheckResult& r) {
    for (int a = 0; a < m; ++a) {
      const Form lhs = contract(VectorField::basis(chart, chart.x(a)), volume);
      const Form rhs = Form::volume_contracted(chart, a);
      track(r, eval_form_diff(lhs, rhs, s.full_point()));
      // dx^a ^ d^{m-1}x_a recovers the volume form
      track(r, eval_form_diff(wedge(Form::differential(chart, chart.x(a)), rhs), volume,
                              s.full_point()));
    }
  });

  run("lemma1-semibasic-contraction", 1e-12, [&](Sampler& s, CheckResult& r) {
    Form::Key volume_key(m);
    for (int a = 0; a < m; ++a) volume_key[a] = chart.x(a);
    const double sign = opts.corrupt_lemma1_sign ? -1.0 : 1.0;
    for (int k = 0; k < opts.points; ++k) {
      const Point pt = s.full_point();
      for (int A = 0; A < N; ++A)
        for (int a = 0; a < m; ++a) {
          const Form c = contract(VectorField::basis(chart, chart.v(A, a)), omega0);
          for (const auto& [key, coeff] : c.terms())
            if (key != volume_key) track(r, eval(coeff, pt));  // semibasic: nothing else
          const double expected =
              sign * (pt.get(chart.mom(A, a)) - eval(prob.dl_dv(A, a), pt));
          track(r, eval(c.coeff(volume_key), pt) - expected);
        }
    }
  });

  run("holonomy-contraction", 1e-12, [&](Sampler& s, CheckResult& r) {
    for (int k = 0; k < opts.points; ++k) {
      const Point pt = s.full_point();
      for (int A = 0; A < N; ++A)
        for (int a = 0; a < m; ++a) {
          const Form lhs = contract(VectorField::basis(chart, chart.mom(A, a)), omega0);
          Form rhs = Expr::coordinate(chart, chart.v(A, a)) * volume;
          rhs -= wedge(Form::differential(chart, chart.y(A)), Form::volume_contracted(chart, a));
          track(r, eval_form_diff(lhs, rhs, pt));
        }
    }
  });

  run("unified-omega-expansion", 1e-12, [&](Sampler& s, CheckResult& r) {
    const Form expanded = expanded_unified_omega(chart, prob.lagrangian());
    for (int k = 0; k < opts.points; ++k)
      track(r, eval_form_diff(omega0, expanded, s.full_point()));
  });

  run("liouville-omega-expansion", 1e-12, [&](Sampler& s, CheckResult& r) {
    const Form expanded = expanded_liouville_omega(chart);
    for (int k = 0; k < opts.points; ++k)
      track(r, eval_form_diff(omega_liouville, expanded, s.full_point()));
  });

  run("proposition1-roundtrip", 1e-14, [&](Sampler& s, CheckResult& r) {
    for (int k = 0; k < opts.points; ++k) {
      const UnifiedPoint restricted = s.unified(false);
      const UnifiedPoint lifted = hamiltonian_section_hat(prob, restricted);
      track(r, w0_residual(prob, lifted));
      // dropping p is the identity on the restricted data
      for (size_t i = 0; i < restricted.mom.size(); ++i)
        track(r, lifted.mom[i] - restricted.mom[i]);
      // any other p value breaks the constraint by exactly its offset
      const double delta = s.rng.uniform(0.5, 1.5);
      UnifiedPoint other = lifted;
      *other.p += delta;
      track(r, w0_residual(prob, other) - delta);
    }
  });

  run("proposition2-graph", 1e-12, [&](Sampler& s, CheckResult& r) {
    for (int k = 0; k < opts.points; ++k) {
      // forward: Legendre images satisfy both constraints
      const UnifiedPoint image = legendre_extended(prob, s.jet());
      track(r, w0_residual(prob, image));
      for (double w1 : w1_residual(prob, image)) track(r, w1);
      // backward: both constraints force the Legendre image
      UnifiedPoint candidate = s.unified(false);
      candidate.mom = legendre_restricted(prob, jet_of(chart, candidate));
      candidate.p = 0.0;
      candidate.p = -w0_residual(prob, candidate);  // zero the coupling constraint
      const UnifiedPoint expected = legendre_extended(prob, jet_of(chart, candidate));
      track(r, *candidate.p - *expected.p);
      for (size_t i = 0; i < candidate.mom.size(); ++i)
        track(r, candidate.mom[i] - expected.mom[i]);
    }
  });

  run("hhat-projectability", 1e-12, [&](Sampler& s, CheckResult& r) {
    // dHhat/dv^A_a == p^a_A - dL/dv^A_a symbolically; evaluated pointwise.
    Expr hhat = -prob.lagrangian();
    for (int A = 0; A < N; ++A)
      for (int a = 0; a < m; ++a)
        hhat = hhat + Expr::coordinate(chart, chart.mom(A, a)) *
                          Expr::coordinate(chart, chart.v(A, a));
    for (int k = 0; k < opts.points; ++k) {
      const Point pt = s.full_point();
      for (int A = 0; A < N; ++A)
        for (int a = 0; a < m; ++a) {
          const double lhs = eval(diff(hhat, chart.v(A, a)), pt);
          const double rhs = pt.get(chart.mom(A, a)) - eval(prob.dl_dv(A, a), pt);
          track(r, lhs - rhs);
        }
    }
  });

  run("hamiltonian-on-graph", 1e-10, [&](Sampler& s, CheckResult& r) {
    for (int k = 0; k < opts.points; ++k) {
      const JetPoint jp = s.jet();
      const UnifiedPoint image = legendre_extended(prob, jp);
      track(r, hamiltonian_function(prob, image.mom, jp) + *image.p);
    }
  });

  run("legendre-inversion-roundtrip", 1e-10, [&](Sampler& s, CheckResult& r) {
    for (int k = 0; k < opts.points; ++k) {
      const JetPoint jp = s.jet();
      const JetPoint back = legendre_invert(prob, legendre_restricted(prob, jp), jp);
      for (int i = 0; i < prob.vdim(); ++i) track(r, back.v[i] - jp.v[i]);
    }
  });

  run("g-system-euler-lagrange", 1e-10, [&](Sampler& s, CheckResult& r) {
    // Along any twice-differentiable section with G = d2y/dx2, the velocity
    // coefficient system deviates from balance by exactly minus the
    // Euler-Lagrange residual.
    for (int k = 0; k < opts.points; ++k) {
      std::vector<Expr> y;
      for (int A = 0; A < N; ++A) y.push_back(s.poly(s.base_coords(), 5));
      const SectionExprs section(chart, y);
      std::vector<double> x;
      for (int a = 0; a < m; ++a) x.push_back(s.rng.uniform(-opts.x_box, opts.x_box));
      const Point base = section.base_point(x);

      JetPoint jp;
      jp.x = x;
      for (int A = 0; A < N; ++A) jp.y.push_back(eval(y[A], base));
      for (int A = 0; A < N; ++A)
        for (int a = 0; a < m; ++a) jp.v.push_back(eval(diff(y[A], chart.x(a)), base));
      const Point pt = to_point(chart, jp);

      const std::vector<double> el = el_residual(prob, section, x);
      for (int B = 0; B < N; ++B) {
        double lhs = 0.0;
        for (int A = 0; A < N; ++A)
          for (int a = 0; a < m; ++a)
            for (int nu = 0; nu < m; ++nu)
              lhs += eval(prob.hessian(A * m + a, B * m + nu), pt) *
                     eval(diff(diff(y[A], chart.x(a)), chart.x(nu)), base);
        double rhs = eval(prob.dl_dy(B), pt);
        for (int nu = 0; nu < m; ++nu) rhs -= eval(diff(prob.dl_dv(B, nu), chart.x(nu)), pt);
        for (int A = 0; A < N; ++A)
          for (int nu = 0; nu < m; ++nu)
            rhs -= eval(diff(prob.dl_dv(B, nu), chart.y(A)), pt) * jp.v[A * m + nu];
        track(r, (lhs - rhs) + el[B]);
      }
    }
  });

  run("theorem2-lagrangian-multivector", 1e-9, [&](Sampler& s, CheckResult& r) {
    for (int k = 0; k < opts.points; ++k) {
      const JetPoint jp = s.jet();
      const GSystemSolution g = solve_g_system(prob, jp);
      if (!g.consistent) continue;
      FieldCoeffs coeffs = semi_holonomic_coeffs(chart);
      coeffs.G.resize(N * m * m, Expr::constant(0.0));
      std::vector<double> weights(g.nullspace.size());
      for (double& w : weights) w = s.rng.uniform(-1.0, 1.0);
      for (int i = 0; i < N * m * m; ++i) {
        double value = g.particular[i];
        for (size_t nv = 0; nv < g.nullspace.size(); ++nv)
          value += weights[nv] * g.nullspace[nv][i];
        coeffs.G[i] = Expr::constant(value);
      }
      const MultiVector xl = build_multivector(chart, coeffs, MultiVectorDomain::JetBundle);
      track(r, eval_form_max(contract_multi(xl, omega_lagr), to_point(chart, jp)));
    }
  });

  run("equation10-unified-multivector", 1e-9, [&](Sampler& s, CheckResult& r) {
    for (int k = 0; k < opts.points; ++k) {
      const JetPoint jp = s.jet();
      const GSystemSolution g = solve_g_system(prob, jp);
      if (!g.consistent) continue;
      FieldCoeffs coeffs = semi_holonomic_coeffs(chart);
      coeffs.G.resize(N * m * m, Expr::constant(0.0));
      std::vector<double> weights(g.nullspace.size());
      for (double& w : weights) w = s.rng.uniform(-1.0, 1.0);
      for (int i = 0; i < N * m * m; ++i) {
        double value = g.particular[i];
        for (size_t nv = 0; nv < g.nullspace.size(); ++nv)
          value += weights[nv] * g.nullspace[nv][i];
        coeffs.G[i] = Expr::constant(value);
      }
      const FieldCoeffs ham = fl_relate(prob, coeffs, jp);
      coeffs.H = ham.H;
      const MultiVector x0 = build_multivector(chart, coeffs, MultiVectorDomain::Unified);
      const UnifiedPoint w1pt = legendre_extended(prob, jp);
      track(r, eval_form_max(contract_multi(x0, omega0), to_point(chart, w1pt)));
    }
  });

  run("theorem3-fl-relations", 1e-8, [&](Sampler& s, CheckResult& r) {
    for (int k = 0; k < opts.points; ++k) {
      const JetPoint jp = s.jet();
      const GSystemSolution g = solve_g_system(prob, jp);
      if (!g.consistent) continue;
      FieldCoeffs coeffs = semi_holonomic_coeffs(chart);
      coeffs.G.resize(N * m * m, Expr::constant(0.0));
      for (int i = 0; i < N * m * m; ++i) coeffs.G[i] = Expr::constant(g.particular[i]);
      const FieldCoeffs ham = fl_relate(prob, coeffs, jp);
      const std::vector<double> mom = legendre_restricted(prob, jp);
      const HamiltonianDerivs dh = hamiltonian_partials(prob, jp.x, jp.y, mom);
      const Point pt = to_point(chart, jp);
      for (int A = 0; A < N; ++A) {
        for (int a = 0; a < m; ++a)
          track(r, eval(ham.F[ham.f_index(A, a)], pt) - dh.d_mom[A * m + a]);
        double trace = 0.0;
        for (int nu = 0; nu < m; ++nu) trace += eval(ham.H[ham.g_index(A, nu, nu)], pt);
        track(r, trace + dh.d_y[A]);
      }
    }
  });

  run("semiholonomy-crosscheck", 1e-12, [&](Sampler& s, CheckResult& r) {
    for (int k = 0; k < opts.points; ++k) {
      const JetPoint jp = s.jet();
      FieldCoeffs coeffs = semi_holonomic_coeffs(chart);
      coeffs.G.resize(N * m * m, Expr::constant(0.0));
      for (int i = 0; i < N * m * m; ++i) coeffs.G[i] = Expr::constant(s.rng.uniform(-1, 1));
      if (!semi_holonomy_check(coeffs, chart, jp)) {
        track(r, 1.0);
        continue;
      }
      for (double c : semi_holonomy_vertical_components(coeffs, chart, jp)) track(r, c);
      // a corrupted F must be flagged by both routes
      FieldCoeffs bad = coeffs;
      bad.F[0] = bad.F[0] + 1.0;
      if (semi_holonomy_check(bad, chart, jp)) track(r, 1.0);
      double max_component = 0.0;
      for (double c : semi_holonomy_vertical_components(bad, chart, jp))
        max_component = std::max(max_component, std::abs(c));
      if (max_component < 0.5) track(r, 1.0);
    }
  });

  run("unified-residual-agreement", 1e-10, [&](Sampler& s, CheckResult& r) {
    for (int k = 0; k < opts.points; ++k) {
      std::vector<Expr> y, v, mom;
      for (int A = 0; A < N; ++A) y.push_back(s.poly(s.base_coords()));
      for (int i = 0; i < N * m; ++i) v.push_back(s.poly(s.base_coords()));
      for (int i = 0; i < N * m; ++i) mom.push_back(s.poly(s.base_coords()));
      SectionExprs section(chart, y);
      section.with_v(v).with_momenta(mom);

      VectorField y0(chart);
      for (int A = 0; A < N; ++A)
        y0.set(chart.y(A), Expr::constant(s.rng.uniform(-1.0, 1.0)));
      for (int A = 0; A < N; ++A)
        for (int a = 0; a < m; ++a) {
          y0.set(chart.v(A, a), Expr::constant(s.rng.uniform(-1.0, 1.0)));
          y0.set(chart.mom(A, a), Expr::constant(s.rng.uniform(-1.0, 1.0)));
        }
      std::vector<double> x;
      for (int a = 0; a < m; ++a) x.push_back(s.rng.uniform(-opts.x_box, opts.x_box));
      track(r, unified_residual(prob, section, y0, x) -
                   unified_residual_direct(prob, section, y0, x));
    }
  });

  return results;
}

}  // namespace vfe
