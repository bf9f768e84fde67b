#ifndef VFE_EXPR_HPP
#define VFE_EXPR_HPP

#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "vfe/chart.hpp"

namespace vfe {

enum class ExprKind {
  Constant,
  Coordinate,
  Add,
  Sub,
  Mul,
  Div,
  Pow,  // integer exponent only
  Sqrt,
  Ln,
  Sin,
  Cos,
  Atan,
  Neg,
};

class Expr;

/// A numeric point of (a subset of) a chart. Coordinates not set are
/// "missing"; evaluating an expression that references a missing coordinate
/// is an error, never a silent NaN.
class Point {
 public:
  explicit Point(Chart chart)
      : chart_(std::move(chart)), vals_(chart_.dim(), 0.0), set_(chart_.dim(), 0) {}

  Point& set(int coord, double value) {
    vals_.at(coord) = value;
    set_.at(coord) = 1;
    return *this;
  }
  bool has(int coord) const { return set_.at(coord) != 0; }
  double get(int coord) const;
  const Chart& chart() const { return chart_; }

 private:
  Chart chart_;
  std::vector<double> vals_;
  std::vector<char> set_;
};

/// Immutable symbolic expression tree over the coordinates of a Chart.
/// Construction applies only local algebraic cleanup (constant folding,
/// 0*e -> 0, e+0 -> e, 1*e -> e); equality of expressions is a question of
/// evaluation, not of structure. Values are freely shareable across threads.
class Expr {
 public:
  Expr() = default;  // the constant 0

  static Expr constant(double value);
  static Expr coordinate(const Chart& chart, int index);

  static Expr add(Expr a, Expr b);
  static Expr sub(Expr a, Expr b);
  static Expr mul(Expr a, Expr b);
  static Expr div(Expr a, Expr b);
  static Expr pow(Expr base, int exponent);
  static Expr sqrt(Expr e);
  static Expr ln(Expr e);
  static Expr sin(Expr e);
  static Expr cos(Expr e);
  static Expr atan(Expr e);
  static Expr neg(Expr e);

  ExprKind kind() const;
  bool is_constant() const { return kind() == ExprKind::Constant; }
  bool is_zero() const;
  bool is_one() const;
  double constant_value() const;
  int coord_index() const;

  struct Node;
  const Node& node() const;

 private:
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;  // null encodes the constant 0
};

struct Expr::Node {
  ExprKind kind;
  double value = 0.0;  // Constant
  int coord = -1;      // Coordinate
  Chart chart;         // Coordinate
  int exponent = 0;    // Pow
  Expr a, b;           // children; b only for binary kinds
};

// Arithmetic sugar; all route through the cleaning factories.
inline Expr operator+(Expr a, Expr b) { return Expr::add(std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return Expr::sub(std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return Expr::mul(std::move(a), std::move(b)); }
inline Expr operator/(Expr a, Expr b) { return Expr::div(std::move(a), std::move(b)); }
inline Expr operator-(Expr a) { return Expr::neg(std::move(a)); }
inline Expr operator+(Expr a, double b) { return Expr::add(std::move(a), Expr::constant(b)); }
inline Expr operator+(double a, Expr b) { return Expr::add(Expr::constant(a), std::move(b)); }
inline Expr operator-(Expr a, double b) { return Expr::sub(std::move(a), Expr::constant(b)); }
inline Expr operator-(double a, Expr b) { return Expr::sub(Expr::constant(a), std::move(b)); }
inline Expr operator*(Expr a, double b) { return Expr::mul(std::move(a), Expr::constant(b)); }
inline Expr operator*(double a, Expr b) { return Expr::mul(Expr::constant(a), std::move(b)); }
inline Expr operator/(Expr a, double b) { return Expr::div(std::move(a), Expr::constant(b)); }
inline Expr operator/(double a, Expr b) { return Expr::div(Expr::constant(a), std::move(b)); }

/// Exact symbolic partial derivative with respect to one chart coordinate.
/// All chart coordinates are treated as independent.
Expr diff(const Expr& e, int coord);

/// Recursive numeric evaluation. Throws EvalError on a missing coordinate or
/// an analytic singularity, naming the offending subexpression.
double eval(const Expr& e, const Point& pt);

struct FdCheck {
  double analytic;
  double numeric;
  double abs_err;
};

/// Central-difference oracle for diff: numeric = (e(pt+h) - e(pt-h)) / (2h)
/// on coordinate `coord`, analytic = eval(diff(e, coord), pt).
FdCheck fd_check(const Expr& e, int coord, const Point& pt, double h);

/// Replace coordinate references by expressions. Coordinates absent from the
/// map are left untouched.
Expr substitute(const Expr& e, const std::map<int, Expr>& repl);

/// Linear indices of all coordinates referenced by e.
std::set<int> referenced_coords(const Expr& e);

/// Infix rendering in the same syntax the parser accepts.
std::string to_string(const Expr& e);

}  // namespace vfe

#endif
