#include "vfe/exterior.hpp"

#include <algorithm>

#include "vfe/errors.hpp"

namespace vfe {

namespace {

// Sort ascending in place; returns the permutation sign, or 0 on a repeated
// index.
int sort_key(Form::Key& idx) {
  int sign = 1;
  for (size_t i = 1; i < idx.size(); ++i) {
    for (size_t j = i; j > 0 && idx[j - 1] >= idx[j]; --j) {
      if (idx[j - 1] == idx[j]) return 0;
      std::swap(idx[j - 1], idx[j]);
      sign = -sign;
    }
  }
  return sign;
}

}  // namespace

Form::Form(Chart chart, int degree) : chart_(std::move(chart)), degree_(degree) {
  if (chart_.null()) throw Error("form requires a chart");
  if (degree_ < 0 || degree_ > chart_.dim()) throw Error("form degree outside [0, dim]");
}

Form& Form::add_term(Key idx, Expr coeff) {
  if (static_cast<int>(idx.size()) != degree_) throw Error("index tuple does not match form degree");
  if (coeff.is_zero()) return *this;
  const int sign = sort_key(idx);
  if (sign == 0) return *this;
  for (int i : idx)
    if (i < 0 || i >= chart_.dim()) throw Error("form index outside the chart");
  if (sign < 0) coeff = -std::move(coeff);
  auto it = terms_.find(idx);
  if (it == terms_.end()) {
    terms_.emplace(std::move(idx), std::move(coeff));
  } else {
    it->second = it->second + coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }
  return *this;
}

Expr Form::coeff(const Key& idx) const {
  auto it = terms_.find(idx);
  return it == terms_.end() ? Expr::constant(0.0) : it->second;
}

Form& Form::operator+=(const Form& other) {
  if (other.degree_ != degree_) throw Error("form degrees differ");
  for (const auto& [k, c] : other.terms_) add_term(k, c);
  return *this;
}

Form& Form::operator-=(const Form& other) {
  if (other.degree_ != degree_) throw Error("form degrees differ");
  for (const auto& [k, c] : other.terms_) add_term(k, -c);
  return *this;
}

Form operator+(Form a, const Form& b) { return a += b; }
Form operator-(Form a, const Form& b) { return a -= b; }

Form operator*(const Expr& scale, Form f) {
  Form out(f.chart(), f.degree());
  for (const auto& [k, c] : f.terms()) out.add_term(k, scale * c);
  return out;
}

Form Form::volume(const Chart& chart) {
  Form f(chart, chart.m());
  Key idx(chart.m());
  for (int a = 0; a < chart.m(); ++a) idx[a] = chart.x(a);
  f.add_term(std::move(idx), Expr::constant(1.0));
  return f;
}

Form Form::volume_contracted(const Chart& chart, int alpha) {
  return contract(VectorField::basis(chart, chart.x(alpha)), volume(chart));
}

Form Form::differential(const Chart& chart, int coord) {
  Form f(chart, 1);
  f.add_term({coord}, Expr::constant(1.0));
  return f;
}

VectorField& VectorField::set(int coord, Expr coeff) {
  if (coord < 0 || coord >= chart_.dim()) throw Error("vector field index outside the chart");
  if (coeff.is_zero())
    comps_.erase(coord);
  else
    comps_[coord] = std::move(coeff);
  return *this;
}

Expr VectorField::component(int coord) const {
  auto it = comps_.find(coord);
  return it == comps_.end() ? Expr::constant(0.0) : it->second;
}

Form wedge(const Form& a, const Form& b) {
  if (!a.chart().compatible(b.chart())) throw Error("wedge of forms on incompatible charts");
  if (a.degree() + b.degree() > a.chart().dim())
    throw Error("wedge degree exceeds the chart dimension");
  Form out(a.chart(), a.degree() + b.degree());
  for (const auto& [ka, ca] : a.terms()) {
    for (const auto& [kb, cb] : b.terms()) {
      Form::Key idx = ka;
      idx.insert(idx.end(), kb.begin(), kb.end());
      out.add_term(std::move(idx), ca * cb);
    }
  }
  return out;
}

Form ext_d(const Form& a) {
  const Chart& chart = a.chart();
  // d of a top-degree form is identically zero; keep the degree label valid.
  const int out_deg = std::min(a.degree() + 1, chart.dim());
  Form out(chart, out_deg);
  if (a.degree() == chart.dim()) return out;
  for (const auto& [key, c] : a.terms()) {
    for (int j : referenced_coords(c)) {
      Expr dc = diff(c, j);
      if (dc.is_zero()) continue;
      Form::Key idx;
      idx.reserve(key.size() + 1);
      idx.push_back(j);
      idx.insert(idx.end(), key.begin(), key.end());
      out.add_term(std::move(idx), std::move(dc));
    }
  }
  return out;
}

Form contract(const VectorField& v, const Form& a) {
  if (a.degree() < 1) throw Error("interior product of a degree-0 form");
  if (!v.chart().compatible(a.chart())) throw Error("contract on incompatible charts");
  Form out(a.chart(), a.degree() - 1);
  for (const auto& [key, c] : a.terms()) {
    for (size_t r = 0; r < key.size(); ++r) {
      auto it = v.components().find(key[r]);
      if (it == v.components().end()) continue;
      Form::Key rest;
      rest.reserve(key.size() - 1);
      for (size_t q = 0; q < key.size(); ++q)
        if (q != r) rest.push_back(key[q]);
      Expr term = it->second * c;
      if (r % 2 == 1) term = -std::move(term);
      out.add_term(std::move(rest), std::move(term));
    }
  }
  return out;
}

Form contract_multi(const MultiVector& x, const Form& a) {
  if (a.degree() < static_cast<int>(x.legs.size()))
    throw Error("interior product degree underflow");
  Form out = a;
  for (const VectorField& leg : x.legs) out = contract(leg, out);
  return x.factor * out;
}

Form pullback_section(const Form& a, const std::map<int, Expr>& section) {
  const Chart& chart = a.chart();
  if (a.degree() > chart.m()) throw Error("pullback of a form of degree above the base dimension");
  const auto is_base = [&](int idx) { return chart.kind(idx) == Chart::Kind::Base; };
  const auto lookup = [&](int idx) -> const Expr& {
    auto it = section.find(idx);
    if (it == section.end())
      throw Error("pullback is missing the section component for '" + chart.name(idx) + "'");
    return it->second;
  };

  // Substitution map for coefficients: every referenced fiber coordinate must
  // be supplied as an expression in the base coordinates.
  Form out(chart, a.degree());
  for (const auto& [key, c] : a.terms()) {
    std::map<int, Expr> repl;
    for (int idx : referenced_coords(c))
      if (!is_base(idx)) repl.emplace(idx, lookup(idx));
    Form term(chart, 0);
    term.add_term({}, substitute(c, repl));
    for (int idx : key) {
      Form d1(chart, 1);
      if (is_base(idx)) {
        d1.add_term({idx}, Expr::constant(1.0));
      } else {
        const Expr& comp = lookup(idx);
        for (int alpha = 0; alpha < chart.m(); ++alpha) {
          Expr slope = diff(comp, chart.x(alpha));
          if (!slope.is_zero()) d1.add_term({chart.x(alpha)}, std::move(slope));
        }
      }
      term = wedge(term, d1);
    }
    out += term;
  }
  return out;
}

Form liouville_theta(const Chart& chart) {
  Form theta(chart, chart.m());
  for (int A = 0; A < chart.N(); ++A)
    for (int alpha = 0; alpha < chart.m(); ++alpha) {
      Expr pAa = Expr::coordinate(chart, chart.mom(A, alpha));
      theta += pAa * wedge(Form::differential(chart, chart.y(A)),
                           Form::volume_contracted(chart, alpha));
    }
  theta += Expr::coordinate(chart, chart.p()) * Form::volume(chart);
  return theta;
}

Form unified_theta(const Chart& chart, const Expr& lagrangian) {
  Expr pv = Expr::constant(0.0);
  Form theta(chart, chart.m());
  for (int A = 0; A < chart.N(); ++A)
    for (int alpha = 0; alpha < chart.m(); ++alpha) {
      Expr pAa = Expr::coordinate(chart, chart.mom(A, alpha));
      Expr vAa = Expr::coordinate(chart, chart.v(A, alpha));
      pv = pv + pAa * vAa;
      theta += pAa * wedge(Form::differential(chart, chart.y(A)),
                           Form::volume_contracted(chart, alpha));
    }
  theta += (lagrangian - pv) * Form::volume(chart);
  return theta;
}

Form lagrangian_theta(const Chart& chart, const Expr& lagrangian) {
  Form theta(chart, chart.m());
  Expr energy = -lagrangian;  // dL/dv * v - L
  for (int A = 0; A < chart.N(); ++A)
    for (int mu = 0; mu < chart.m(); ++mu) {
      Expr dv = diff(lagrangian, chart.v(A, mu));
      energy = energy + dv * Expr::coordinate(chart, chart.v(A, mu));
      theta += dv * wedge(Form::differential(chart, chart.y(A)),
                          Form::volume_contracted(chart, mu));
    }
  theta += -energy * Form::volume(chart);
  return theta;
}

Form hamiltonian_theta(const Chart& chart, const Expr& hamiltonian) {
  Form theta(chart, chart.m());
  for (int A = 0; A < chart.N(); ++A)
    for (int alpha = 0; alpha < chart.m(); ++alpha)
      theta += Expr::coordinate(chart, chart.mom(A, alpha)) *
               wedge(Form::differential(chart, chart.y(A)),
                     Form::volume_contracted(chart, alpha));
  theta += -hamiltonian * Form::volume(chart);
  return theta;
}

std::vector<Form> vertical_tensor_components(const Chart& chart) {
  std::vector<Form> comps;
  comps.reserve(chart.N() * chart.m());
  for (int A = 0; A < chart.N(); ++A)
    for (int nu = 0; nu < chart.m(); ++nu) {
      Form contact(chart, 1);
      contact.add_term({chart.y(A)}, Expr::constant(1.0));
      for (int alpha = 0; alpha < chart.m(); ++alpha)
        contact.add_term({chart.x(alpha)},
                         -Expr::coordinate(chart, chart.v(A, alpha)));
      comps.push_back(wedge(contact, Form::volume_contracted(chart, nu)));
    }
  return comps;
}

}  // namespace vfe
