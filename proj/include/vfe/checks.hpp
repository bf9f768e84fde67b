#ifndef VFE_CHECKS_HPP
#define VFE_CHECKS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "vfe/bundles.hpp"

namespace vfe {

struct CheckOptions {
  std::uint64_t seed = 42;
  int points = 100;
  // Sampling boxes: velocities and base/field values per coordinate, momenta
  // per-field Euclidean norm (so sampled points stay inside the Hamiltonian's
  // analytic domain).
  double v_box = 2.0;
  double p_box = 0.7;
  double x_box = 1.0;
  double y_box = 1.0;
  /// Self-test hook: flips the sign of the expected coefficient in the
  /// semibasic-contraction check, which must then fail.
  bool corrupt_lemma1_sign = false;
};

struct CheckResult {
  std::string name;
  int points = 0;
  double worst = 0.0;
  double tol = 0.0;
  bool passed = false;
};

/// Run the full invariant suite (exterior algebra identities, the canonical
/// form expansions, the Legendre/constraint round trips, the field-equation
/// equivalences) at seeded random points. Requires a regular problem; throws
/// SingularError with the standard refusal otherwise.
std::vector<CheckResult> run_check_suite(const LagrangianProblem& prob, const CheckOptions& opts);

}  // namespace vfe

#endif
