#include "vfe/expr.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

#include "vfe/errors.hpp"

namespace vfe {

namespace {

std::shared_ptr<const Expr::Node> make_node(Expr::Node n) {
  return std::make_shared<const Expr::Node>(std::move(n));
}

bool is_const(const Expr& e, double v) {
  return e.kind() == ExprKind::Constant && e.constant_value() == v;
}

std::string render_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  if (res.ec == std::errc()) return std::string(buf, res.ptr);
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

double Point::get(int coord) const {
  if (!has(coord))
    throw EvalError("missing coordinate '" + chart_.name(coord) + "' in evaluation point");
  return vals_[coord];
}

const Expr::Node& Expr::node() const {
  static const Node zero{ExprKind::Constant, 0.0, -1, Chart(), 0, Expr(), Expr()};
  return node_ ? *node_ : zero;
}

ExprKind Expr::kind() const { return node().kind; }
bool Expr::is_zero() const { return is_const(*this, 0.0); }
bool Expr::is_one() const { return is_const(*this, 1.0); }

double Expr::constant_value() const {
  if (kind() != ExprKind::Constant) throw Error("not a constant expression");
  return node().value;
}

int Expr::coord_index() const {
  if (kind() != ExprKind::Coordinate) throw Error("not a coordinate expression");
  return node().coord;
}

Expr Expr::constant(double value) {
  return Expr(make_node({.kind = ExprKind::Constant, .value = value}));
}

Expr Expr::coordinate(const Chart& chart, int index) {
  if (chart.null() || index < 0 || index >= chart.dim())
    throw Error("coordinate reference outside the chart");
  return Expr(make_node({.kind = ExprKind::Coordinate, .coord = index, .chart = chart}));
}

Expr Expr::add(Expr a, Expr b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_constant() && b.is_constant())
    return constant(a.constant_value() + b.constant_value());
  return Expr(make_node({.kind = ExprKind::Add, .a = std::move(a), .b = std::move(b)}));
}

Expr Expr::sub(Expr a, Expr b) {
  if (b.is_zero()) return a;
  if (a.is_constant() && b.is_constant())
    return constant(a.constant_value() - b.constant_value());
  if (a.is_zero()) return neg(std::move(b));
  return Expr(make_node({.kind = ExprKind::Sub, .a = std::move(a), .b = std::move(b)}));
}

Expr Expr::mul(Expr a, Expr b) {
  if (a.is_zero() || b.is_zero()) return constant(0.0);
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (a.is_constant() && b.is_constant())
    return constant(a.constant_value() * b.constant_value());
  // fold nested constant factors: c1 * (c2 * e) -> (c1*c2) * e
  if (a.is_constant() && b.kind() == ExprKind::Mul && b.node().a.is_constant())
    return mul(constant(a.constant_value() * b.node().a.constant_value()), b.node().b);
  if (b.is_constant()) return mul(std::move(b), std::move(a));
  if (is_const(a, -1.0)) return neg(std::move(b));
  return Expr(make_node({.kind = ExprKind::Mul, .a = std::move(a), .b = std::move(b)}));
}

Expr Expr::div(Expr a, Expr b) {
  if (a.is_zero()) return constant(0.0);
  if (b.is_one()) return a;
  if (a.is_constant() && b.is_constant() && b.constant_value() != 0.0)
    return constant(a.constant_value() / b.constant_value());
  // cancel literal constant factors: (c1*e1) / (c2*e2) -> (c1/c2) * (e1/e2)
  const bool an = a.kind() == ExprKind::Mul && a.node().a.is_constant();
  const bool bn = b.kind() == ExprKind::Mul && b.node().a.is_constant();
  if ((an || bn) && !(a.is_constant() || b.is_constant())) {
    const double ca = an ? a.node().a.constant_value() : 1.0;
    const double cb = bn ? b.node().a.constant_value() : 1.0;
    if (cb != 0.0 && (ca != 1.0 || cb != 1.0)) {
      Expr na = an ? a.node().b : a;
      Expr nb = bn ? b.node().b : b;
      return mul(constant(ca / cb), div(std::move(na), std::move(nb)));
    }
  }
  return Expr(make_node({.kind = ExprKind::Div, .a = std::move(a), .b = std::move(b)}));
}

Expr Expr::pow(Expr base, int exponent) {
  if (exponent == 0) return constant(1.0);
  if (exponent == 1) return base;
  if (base.is_constant() && (base.constant_value() != 0.0 || exponent > 0))
    return constant(std::pow(base.constant_value(), exponent));
  return Expr(make_node({.kind = ExprKind::Pow, .exponent = exponent, .a = std::move(base)}));
}

#define VFE_UNARY_FACTORY(Name, Kind, fold)                                        \
  Expr Expr::Name(Expr e) {                                                        \
    if (e.is_constant()) {                                                         \
      const double x = e.constant_value();                                         \
      (void)x;                                                                     \
      fold;                                                                        \
    }                                                                              \
    return Expr(make_node({.kind = ExprKind::Kind, .a = std::move(e)}));           \
  }

VFE_UNARY_FACTORY(sqrt, Sqrt, if (x >= 0.0) return constant(std::sqrt(x)))
VFE_UNARY_FACTORY(ln, Ln, if (x > 0.0) return constant(std::log(x)))
VFE_UNARY_FACTORY(sin, Sin, return constant(std::sin(x)))
VFE_UNARY_FACTORY(cos, Cos, return constant(std::cos(x)))
VFE_UNARY_FACTORY(atan, Atan, return constant(std::atan(x)))

#undef VFE_UNARY_FACTORY

Expr Expr::neg(Expr e) {
  if (e.is_constant()) return constant(-e.constant_value());
  if (e.kind() == ExprKind::Neg) return e.node().a;
  if (e.kind() == ExprKind::Mul && e.node().a.is_constant())
    return mul(constant(-e.node().a.constant_value()), e.node().b);
  return Expr(make_node({.kind = ExprKind::Neg, .a = std::move(e)}));
}

Expr diff(const Expr& e, int coord) {
  const auto& n = e.node();
  switch (n.kind) {
    case ExprKind::Constant:
      return Expr::constant(0.0);
    case ExprKind::Coordinate:
      if (coord < 0 || coord >= n.chart.dim())
        throw Error("unknown coordinate in diff");
      return Expr::constant(n.coord == coord ? 1.0 : 0.0);
    case ExprKind::Add:
      return diff(n.a, coord) + diff(n.b, coord);
    case ExprKind::Sub:
      return diff(n.a, coord) - diff(n.b, coord);
    case ExprKind::Mul:
      return diff(n.a, coord) * n.b + n.a * diff(n.b, coord);
    case ExprKind::Div:
      return (diff(n.a, coord) * n.b - n.a * diff(n.b, coord)) / Expr::pow(n.b, 2);
    case ExprKind::Pow:
      return Expr::constant(n.exponent) * Expr::pow(n.a, n.exponent - 1) * diff(n.a, coord);
    case ExprKind::Sqrt:
      return diff(n.a, coord) / (2.0 * Expr::sqrt(n.a));
    case ExprKind::Ln:
      return diff(n.a, coord) / n.a;
    case ExprKind::Sin:
      return Expr::cos(n.a) * diff(n.a, coord);
    case ExprKind::Cos:
      return -(Expr::sin(n.a) * diff(n.a, coord));
    case ExprKind::Atan:
      return diff(n.a, coord) / (1.0 + Expr::pow(n.a, 2));
    case ExprKind::Neg:
      return -diff(n.a, coord);
  }
  throw Error("unreachable expression kind");
}

namespace {

[[noreturn]] void singular(const char* what, const Expr& e) {
  std::string s = to_string(e);
  if (s.size() > 120) s = s.substr(0, 117) + "...";
  throw EvalError(std::string(what) + " in '" + s + "'");
}

}  // namespace

namespace {

double eval_node(const Expr& e, const Point& pt);

}  // namespace

double eval(const Expr& e, const Point& pt) {
  const double value = eval_node(e, pt);
  if (!std::isfinite(value)) singular("non-finite result (overflow)", e);
  return value;
}

namespace {

double eval_node(const Expr& e, const Point& pt) {
  const auto& n = e.node();
  switch (n.kind) {
    case ExprKind::Constant:
      return n.value;
    case ExprKind::Coordinate:
      if (!n.chart.compatible(pt.chart()))
        throw EvalError("evaluation point belongs to an incompatible chart");
      return pt.get(n.coord);
    case ExprKind::Add:
      return eval(n.a, pt) + eval(n.b, pt);
    case ExprKind::Sub:
      return eval(n.a, pt) - eval(n.b, pt);
    case ExprKind::Mul:
      return eval(n.a, pt) * eval(n.b, pt);
    case ExprKind::Div: {
      const double num = eval(n.a, pt), den = eval(n.b, pt);
      if (den == 0.0) singular("division by zero", e);
      return num / den;
    }
    case ExprKind::Pow: {
      const double base = eval(n.a, pt);
      if (base == 0.0 && n.exponent < 0) singular("division by zero", e);
      return std::pow(base, n.exponent);
    }
    case ExprKind::Sqrt: {
      const double x = eval(n.a, pt);
      if (x < 0.0) singular("sqrt of negative value", e);
      return std::sqrt(x);
    }
    case ExprKind::Ln: {
      const double x = eval(n.a, pt);
      if (x <= 0.0) singular("log of non-positive value", e);
      return std::log(x);
    }
    case ExprKind::Sin:
      return std::sin(eval(n.a, pt));
    case ExprKind::Cos:
      return std::cos(eval(n.a, pt));
    case ExprKind::Atan:
      return std::atan(eval(n.a, pt));
    case ExprKind::Neg:
      return -eval(n.a, pt);
  }
  throw Error("unreachable expression kind");
}

}  // namespace

FdCheck fd_check(const Expr& e, int coord, const Point& pt, double h) {
  Point hi = pt, lo = pt;
  hi.set(coord, pt.get(coord) + h);
  lo.set(coord, pt.get(coord) - h);
  FdCheck r{};
  r.numeric = (eval(e, hi) - eval(e, lo)) / (2.0 * h);
  r.analytic = eval(diff(e, coord), pt);
  r.abs_err = std::abs(r.analytic - r.numeric);
  return r;
}

Expr substitute(const Expr& e, const std::map<int, Expr>& repl) {
  const auto& n = e.node();
  switch (n.kind) {
    case ExprKind::Constant:
      return e;
    case ExprKind::Coordinate: {
      auto it = repl.find(n.coord);
      return it == repl.end() ? e : it->second;
    }
    case ExprKind::Add:
      return substitute(n.a, repl) + substitute(n.b, repl);
    case ExprKind::Sub:
      return substitute(n.a, repl) - substitute(n.b, repl);
    case ExprKind::Mul:
      return substitute(n.a, repl) * substitute(n.b, repl);
    case ExprKind::Div:
      return substitute(n.a, repl) / substitute(n.b, repl);
    case ExprKind::Pow:
      return Expr::pow(substitute(n.a, repl), n.exponent);
    case ExprKind::Sqrt:
      return Expr::sqrt(substitute(n.a, repl));
    case ExprKind::Ln:
      return Expr::ln(substitute(n.a, repl));
    case ExprKind::Sin:
      return Expr::sin(substitute(n.a, repl));
    case ExprKind::Cos:
      return Expr::cos(substitute(n.a, repl));
    case ExprKind::Atan:
      return Expr::atan(substitute(n.a, repl));
    case ExprKind::Neg:
      return -substitute(n.a, repl);
  }
  throw Error("unreachable expression kind");
}

std::set<int> referenced_coords(const Expr& e) {
  std::set<int> out;
  const auto walk = [&out](const Expr& node, auto&& self) -> void {
    const auto& n = node.node();
    if (n.kind == ExprKind::Coordinate) {
      out.insert(n.coord);
      return;
    }
    if (n.kind == ExprKind::Constant) return;
    self(n.a, self);
    switch (n.kind) {
      case ExprKind::Add:
      case ExprKind::Sub:
      case ExprKind::Mul:
      case ExprKind::Div:
        self(n.b, self);
        break;
      default:
        break;
    }
  };
  walk(e, walk);
  return out;
}

namespace {

// Precedence: additive 1, multiplicative 2, unary minus 3, power 4, atom 5.
void render(const Expr& e, int parent_prec, std::string& out) {
  const auto& n = e.node();
  const auto paren = [&](int prec, auto&& body) {
    const bool need = prec < parent_prec;
    if (need) out += '(';
    body();
    if (need) out += ')';
  };
  switch (n.kind) {
    case ExprKind::Constant: {
      const double v = n.value;
      if (v < 0.0) {
        paren(3, [&] { out += render_double(v); });
      } else {
        out += render_double(v);
      }
      return;
    }
    case ExprKind::Coordinate:
      out += n.chart.name(n.coord);
      return;
    case ExprKind::Add:
      return paren(1, [&] {
        render(n.a, 1, out);
        out += " + ";
        render(n.b, 2, out);
      });
    case ExprKind::Sub:
      return paren(1, [&] {
        render(n.a, 1, out);
        out += " - ";
        render(n.b, 2, out);
      });
    case ExprKind::Mul:
      return paren(2, [&] {
        render(n.a, 2, out);
        out += '*';
        render(n.b, 3, out);
      });
    case ExprKind::Div:
      return paren(2, [&] {
        render(n.a, 2, out);
        out += '/';
        render(n.b, 3, out);
      });
    case ExprKind::Pow:
      return paren(4, [&] {
        render(n.a, 5, out);
        out += '^';
        if (n.exponent < 0) {
          out += '(' + std::to_string(n.exponent) + ')';
        } else {
          out += std::to_string(n.exponent);
        }
      });
    case ExprKind::Neg:
      return paren(3, [&] {
        out += '-';
        render(n.a, 3, out);
      });
    case ExprKind::Sqrt:
    case ExprKind::Ln:
    case ExprKind::Sin:
    case ExprKind::Cos:
    case ExprKind::Atan: {
      static const char* names[] = {"sqrt", "ln", "sin", "cos", "atan"};
      out += names[static_cast<int>(n.kind) - static_cast<int>(ExprKind::Sqrt)];
      out += '(';
      render(n.a, 0, out);
      out += ')';
      return;
    }
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  render(e, 0, out);
  return out;
}

}  // namespace vfe
