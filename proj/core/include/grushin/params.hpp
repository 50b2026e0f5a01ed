// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <grushin/errors.hpp>

namespace grushin {

// Instance of the Grushin-type structure on R^p x R^q with weight
// |x|^alpha: vector fields X_j = d/dx_j, Y_l = (alpha+1) |x|^alpha d/dy_l.
//
// alpha = 0 is admitted as the Euclidean limit (both metrics collapse to
// the flat metric); the curvature theorems themselves are only nontrivial
// for alpha > 0.
struct GrushinParams {
  int p = 3;
  int q = 1;
  double alpha = 1.0;

  GrushinParams() = default;
  GrushinParams(int p_, int q_, double alpha_) : p(p_), q(q_), alpha(alpha_) {
    validate();
  }

  void validate() const {
    if (p < 1 || q < 1) throw DimensionTooSmall("GrushinParams: need p >= 1 and q >= 1");
    if (alpha < 0.0) throw NonpositiveFactor("GrushinParams: need alpha >= 0");
  }

  // Topological dimension.
  int n() const { return p + q; }
  // Homogeneous dimension p + (alpha+1) q; exceeds n exactly when alpha > 0.
  double homogeneous_dim() const { return p + (alpha + 1.0) * q; }
};

}  // namespace grushin
