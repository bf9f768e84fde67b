#ifndef VFE_CHART_HPP
#define VFE_CHART_HPP

#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "vfe/errors.hpp"

namespace vfe {

/// The ordered coordinate system of the extended jet-multimomentum chart for
/// a trivial bundle R^m x R^N -> R^m:
///
///   x1..xm, y1..yN, vA_alpha (A-major), pA_alpha (A-major), p
///
/// Linear indices follow this order and are fixed at construction; they define
/// the multi-index ordering used by differential forms. Charts are cheap
/// shared handles; two charts are interchangeable iff they have the same
/// (m, N).
class Chart {
 public:
  Chart() = default;  // null chart (constants carry no chart)
  Chart(int m, int N);

  bool null() const { return !d_; }
  int m() const { return d_->m; }
  int N() const { return d_->N; }
  /// Total number of coordinates: m + N + 2*N*m + 1.
  int dim() const { return static_cast<int>(d_->names.size()); }

  // Linear index of each coordinate; all arguments 0-based.
  int x(int alpha) const { return check(alpha, d_->m), alpha; }
  int y(int A) const { return check(A, d_->N), d_->m + A; }
  int v(int A, int alpha) const {
    check(A, d_->N);
    check(alpha, d_->m);
    return d_->m + d_->N + A * d_->m + alpha;
  }
  int mom(int A, int alpha) const {
    check(A, d_->N);
    check(alpha, d_->m);
    return d_->m + d_->N + d_->N * d_->m + A * d_->m + alpha;
  }
  int p() const { return dim() - 1; }

  enum class Kind { Base, Field, Velocity, Momentum, ScalarMomentum };
  Kind kind(int index) const;

  const std::string& name(int index) const { return d_->names.at(index); }
  /// -1 if no such coordinate.
  int index_of(std::string_view name) const;

  bool compatible(const Chart& other) const {
    return d_ && other.d_ && (d_ == other.d_ || (m() == other.m() && N() == other.N()));
  }

 private:
  struct Data {
    int m, N;
    std::vector<std::string> names;
    std::unordered_map<std::string, int> by_name;
  };
  static void check(int i, int n) {
    if (i < 0 || i >= n) throw Error("coordinate index out of range");
  }
  std::shared_ptr<const Data> d_;
};

}  // namespace vfe

#endif
