#pragma once

#include "qil/matrix.hpp"

namespace qil {

/// Thresholds shared by every residual and rank decision.
struct ToleranceConfig {
  double zero_rel = 1e-8;    // relative residual threshold
  double rank_rel = 1e-10;   // singular-value threshold factor
  double abs_floor = 1e-12;  // absolute floor added to every zero test

  void validate() const {
    if (zero_rel < 0 || rank_rel < 0 || abs_floor < 0)
      throw InvalidInputError("ToleranceConfig: fields must be nonnegative");
  }
};

/// A residual together with the largest Frobenius norm among the terms that
/// produced it. The zero test is ||R|| <= abs_floor + zero_rel * scale, which
/// keeps the binomial sums honest under cancellation.
struct ScaledResidual {
  double norm = 0.0;
  double scale = 0.0;

  bool within(const ToleranceConfig& tol) const {
    return norm <= tol.abs_floor + tol.zero_rel * scale;
  }
  double relative() const { return scale > 0.0 ? norm / scale : norm; }
};

inline bool residual_within(double norm, double scale, const ToleranceConfig& tol) {
  return ScaledResidual{norm, scale}.within(tol);
}

}  // namespace qil
