// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <grushin/conformal.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace grushin {

// ---------------------------------------------------------------------------
// Admissible control paths: z' = sum_j a_j X_j + sum_l b_l Y_l with the
// diagonal fields X_j = d_xj, Y_l = (alpha+1)|x|^alpha d_yl. Controls are
// piecewise constant on the grid; the fields are defined on all of R^(p+q),
// including x = 0, so paths may cross the singular set.

struct AdmissiblePath {
  CartesianPoint start;
  VectorXd times;  // K+1 knots, strictly increasing, times[0] = 0
  MatrixXd a;      // p x K
  MatrixXd b;      // q x K
  int intervals() const { return static_cast<int>(a.cols()); }
};

struct Trajectory {
  std::vector<double> t;
  std::vector<CartesianPoint> z;
};

// x integrates exactly (piecewise linear); y by composite Simpson of
// (alpha+1)|x(s)|^alpha per substep, fourth order on smooth stretches.
Trajectory integrate_controls(const GrushinParams& par, const AdmissiblePath& path,
                              int substeps = 16);

// Control cost integral sum_k sqrt(|a_k|^2 + |b_k|^2) dt_k; this is the
// ghat-length of the trajectory and the quantity whose infimum defines the
// control distance.
double path_length(const AdmissiblePath& path);

// Length of the same trajectory in either metric: ghat reproduces
// path_length exactly; g weighs each interval by the quadrature of
// (alpha+1)|x(s)|^alpha.
double path_cost(const GrushinParams& par, const AdmissiblePath& path, MetricKind k,
                 int substeps = 64);

// ---------------------------------------------------------------------------
// Geodesic initial value problem in the cylinder chart, for g or ghat.

struct GeodesicState {
  CylindricalPoint pos;
  CylindricalVector vel;
  MetricKind metric = MetricKind::g;
};

struct GeodesicOptions {
  double dt = 1e-3;      // RK4 step in the arclength parameter
  double r_guard = 1e-6; // abort below this radius
  int record_stride = 10;
};

// Integrates for the given arc length (velocity need not be unit). Throws
// LeftRiemannianRegion when r drops under the guard. The returned states
// include start and end; speed is conserved to the integrator's order.
std::vector<GeodesicState> geodesic_ivp(const GrushinParams& par,
                                        const GeodesicState& start, double length,
                                        const GeodesicOptions& opt = {});

// ---------------------------------------------------------------------------
// Distance upper bounds by direct optimization over piecewise-constant
// controls: seeded multi-start gradient descent on length plus a scheduled
// endpoint penalty, then feasibility restoration (an explicit admissible
// connector closes the residual endpoint gap), so d_hat is always the length
// of an actual admissible path.

struct DistanceOptions {
  MetricKind metric = MetricKind::ghat;  // ghat is the control distance
  int intervals = 32;
  int multistarts = 3;
  int max_iterations = 160;  // per penalty stage
  std::uint64_t seed = 0;
  long budget = 400000;  // objective evaluations across all stages/starts
};

struct DistanceResult {
  double d_hat = 0.0;
  AdmissiblePath path;
  double endpoint_gap = 0.0;  // coordinate gap closed by the connector
  bool budget_exhausted = false;
};

DistanceResult distance_upper_bound(const GrushinParams& par, const CartesianPoint& z,
                                    const CartesianPoint& z1,
                                    const DistanceOptions& opt = {});

// ---------------------------------------------------------------------------
// Metric-space conformality quotients d(f(zeta), f(z)) / d(zeta, z) along an
// epsilon ladder of displaced points zeta = z + eps v, with Richardson
// extrapolation per direction. The target is 1/u_ghat(z), the infinitesimal
// scaling of the control distance under the chain.

struct QuotientRow {
  double epsilon = 0.0;
  int direction_id = 0;
  double quotient = 0.0;
  double extrapolated = 0.0;  // 2 q(eps) - q(2 eps) once two rungs exist
  double target = 0.0;
  double rel_error = 0.0;  // |extrapolated - target| / |target|
};

struct QuotientTable {
  std::vector<QuotientRow> rows;
  double target = 0.0;
  double worst_rel_error = 0.0;   // over directions, at the finest rung
  double mean_extrapolated = 0.0; // over directions, at the finest rung
};

QuotientTable conformality_quotient(const MapChain& chain, const CartesianPoint& z,
                                    const std::vector<double>& epsilons,
                                    const DistanceOptions& opt = {},
                                    int random_directions = 4);

// CSV with header epsilon,direction_id,quotient,extrapolated,target,rel_error.
void write_quotient_csv(const QuotientTable& table, const std::string& path);

// ---------------------------------------------------------------------------
// |Delta_alpha Gamma| * |z|_hom^Q for the kernel Gamma = |z|_hom^(2-Q),
// Q = p + (alpha+1) q; harmonic away from the origin, including the x = 0
// slice. The |z|_hom^Q factor makes the residual scale-free.
double harmonic_kernel_residual(const GrushinParams& par, const CartesianPoint& z,
                                double step = 1e-3);

}  // namespace grushin
