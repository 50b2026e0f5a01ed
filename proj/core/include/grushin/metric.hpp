// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <grushin/chart.hpp>
#include <grushin/tensor.hpp>

#include <functional>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

namespace grushin {

// ---------------------------------------------------------------------------
// Scalar fields on a coordinate chart, with analytic derivatives when the
// caller has them and central finite differences otherwise.

struct ScalarField {
  std::function<double(const VectorXd&)> value;
  std::function<VectorXd(const VectorXd&)> grad;   // optional
  std::function<MatrixXd(const VectorXd&)> hess;   // optional
  double fd_step = 1e-5;

  double operator()(const VectorXd& u) const { return value(u); }
  VectorXd gradient(const VectorXd& u) const;
  MatrixXd hessian(const VectorXd& u) const;
};

// ---------------------------------------------------------------------------
// Metrics as matrix-valued functions of chart coordinates. This is the
// form the finite-difference pipeline consumes; it never sees closed-form
// derivatives, which keeps the two verification routes independent.

class CoordinateMetric {
 public:
  virtual ~CoordinateMetric() = default;
  virtual int dim() const = 0;
  virtual MatrixXd eval(const VectorXd& u) const = 0;
  // Distance from u to the boundary of the chart domain; finite-difference
  // stencils must stay strictly inside.
  virtual double domain_clearance(const VectorXd&) const {
    return std::numeric_limits<double>::infinity();
  }
};

enum class MetricKind { g, ghat };

// Grushin metric on Cartesian coordinates (x, y):
//   g    = (alpha+1)^2 |x|^(2 alpha) |dx|^2 + |dy|^2
//   ghat = |dx|^2 + (alpha+1)^-2 |x|^(-2 alpha) |dy|^2
class GrushinCartesian final : public CoordinateMetric {
 public:
  GrushinCartesian(GrushinParams par, MetricKind kind) : par_(par), kind_(kind) {}
  int dim() const override { return par_.n(); }
  MatrixXd eval(const VectorXd& u) const override;
  double domain_clearance(const VectorXd& u) const override;
  const GrushinParams& params() const { return par_; }

 private:
  GrushinParams par_;
  MetricKind kind_;
};

// u^-2 g for a positive factor u.
class ConformalScaled final : public CoordinateMetric {
 public:
  ConformalScaled(std::shared_ptr<const CoordinateMetric> base, ScalarField u)
      : base_(std::move(base)), u_(std::move(u)) {}
  int dim() const override { return base_->dim(); }
  MatrixXd eval(const VectorXd& u) const override;
  double domain_clearance(const VectorXd& u) const override {
    return base_->domain_clearance(u);
  }

 private:
  std::shared_ptr<const CoordinateMetric> base_;
  ScalarField u_;
};

// Warped product H x_w S with flat H = R^dh and S the round unit sphere
// S^ds in stereographic coordinates sigma (metric 4 |dsigma|^2/(1+|sigma|^2)^2).
// Coordinates: u = (h, sigma). Covers the Grushin cylinder chart
// (h = (r, y), w = (alpha+1) r, ds = p-1) and products like S^3 x R^2 (w = 1).
class GenericWarped final : public CoordinateMetric {
 public:
  GenericWarped(int dim_h, int dim_s, ScalarField w)
      : dim_h_(dim_h), dim_s_(dim_s), w_(std::move(w)) {}
  int dim() const override { return dim_h_ + dim_s_; }
  MatrixXd eval(const VectorXd& u) const override;
  double domain_clearance(const VectorXd& u) const override;

  int dim_h() const { return dim_h_; }
  int dim_s() const { return dim_s_; }
  const ScalarField& warp() const { return w_; }

  // The Grushin instance in the cylinder-stereographic chart.
  static GenericWarped grushin(const GrushinParams& par);

 private:
  int dim_h_;
  int dim_s_;
  ScalarField w_;
};

class EuclideanMetric final : public CoordinateMetric {
 public:
  explicit EuclideanMetric(int n) : n_(n) {}
  int dim() const override { return n_; }
  MatrixXd eval(const VectorXd&) const override { return MatrixXd::Identity(n_, n_); }

 private:
  int n_;
};

// ---------------------------------------------------------------------------
// Pointwise metric evaluation in the two Grushin charts. The cylindrical
// form acts on ambient (dr, dy, dtheta) components; the dtheta block is the
// projector (alpha+1)^2 r^2 (I - theta theta^T) so it ignores any stray
// radial component of dtheta.

MatrixXd metric_cartesian(const GrushinParams& par, const CartesianPoint& z, MetricKind k);
MatrixXd metric_cylindrical(const GrushinParams& par, const CylindricalPoint& z, MetricKind k);
double inner_cartesian(const GrushinParams& par, const CartesianVector& a,
                       const CartesianVector& b, MetricKind k);
double inner_cylindrical(const GrushinParams& par, const CylindricalVector& a,
                         const CylindricalVector& b, MetricKind k);

// ---------------------------------------------------------------------------
// Finite-difference pipeline (independent verification route).

struct FdOptions {
  double step = 1e-4;  // scaled by (1 + |u|) internally
  int order = 2;       // 2 or 4: central stencil order
};

// Gamma[k](i, j) = Gamma^k_{ij}.
using ChristoffelAt = std::vector<MatrixXd>;

ChristoffelAt christoffel_fd(const CoordinateMetric& M, const VectorXd& u,
                             const FdOptions& opt = {});
CurvTensor4 riemann_fd(const CoordinateMetric& M, const VectorXd& u,
                       const FdOptions& opt = {});
MatrixXd ricci_fd(const CoordinateMetric& M, const VectorXd& u,
                  const FdOptions& opt = {});
double scalar_fd(const CoordinateMetric& M, const VectorXd& u,
                 const FdOptions& opt = {});

// ---------------------------------------------------------------------------
// Closed forms for the Grushin metric g (the other verification route).

// Cartesian chart: the only nonzero symbols sit in the x-block,
// Gamma^k_{ij} = alpha |x|^-2 (delta_ik x_j + delta_jk x_i - delta_ij x_k).
ChristoffelAt christoffel_closed(const GrushinParams& par, const CartesianPoint& z);

// Sigma-projection form s(U, V) = g(U_Sigma, V_Sigma) as a matrix on
// Cartesian coordinates.
MatrixXd sigma_form_cartesian(const GrushinParams& par, const CartesianPoint& z);

// kappa = alpha (alpha+2) (alpha+1)^-2 r^-2; the full curvature tensor of g
// is R = (kappa/2) (s . s) with s the Sigma-projection form, equivalently
// R(U,V,X,Y) = -kappa { g(U_S,X_S) g(V_S,Y_S) - g(U_S,Y_S) g(V_S,X_S) }.
double curvature_kappa(const GrushinParams& par, double r);

CurvTensor4 riemann_closed_cartesian(const GrushinParams& par, const CartesianPoint& z);
double riemann_closed(const GrushinParams& par, const CylindricalPoint& z,
                      const CylindricalVector& U, const CylindricalVector& V,
                      const CylindricalVector& X, const CylindricalVector& Y);

// Ric(U, V) = -kappa (p-2) g(U_S, V_S);  Scal = -kappa (p-2)(p-1).
MatrixXd ricci_closed_cartesian(const GrushinParams& par, const CartesianPoint& z);
std::pair<double, double> ricci_scal_closed(const GrushinParams& par,
                                            const CylindricalPoint& z,
                                            const CylindricalVector& U,
                                            const CylindricalVector& V);
double scal_closed(const GrushinParams& par, double r);

// Curvature of a generic warped product H x_w S at coordinates u, as a
// tensor on the (h, sigma) coordinate basis:
//   R = (w^-1 Hess_H w) . s - B/2 (s . s),   B = w^-2 (1 - |grad_H w|^2),
// with s the sphere block of the coordinate metric and "." Kulkarni-Nomizu.
CurvTensor4 warped_riemann_closed(const GenericWarped& W, const VectorXd& u);
double warped_curvature_closed(const GenericWarped& W, const VectorXd& u,
                               const VectorXd& v1, const VectorXd& v2,
                               const VectorXd& v3, const VectorXd& v4);

// ---------------------------------------------------------------------------
// Warped-product Hessian and Laplacian of a scalar field on the cylinder.

struct WarpedScalar {
  std::function<double(const CylindricalPoint&)> value;
  // Optional analytic derivatives in the (r, y) factor; components ordered
  // (r, y_1..y_q). Sphere dependence always goes through great-circle FD.
  std::function<VectorXd(const CylindricalPoint&)> h_grad;
  std::function<MatrixXd(const CylindricalPoint&)> h_hess;
  bool h_only = false;  // field independent of theta
  double h_step = 1e-5;
  double s_step = 1e-4;
};

struct HessLapResult {
  MatrixXd hessian;   // components on the supplied directions
  VectorXd gradient;  // du(direction_i)
  double laplacian = 0.0;
  double grad_sq = 0.0;  // |grad u|_g^2
};

// Hessian on the given directions (cylinder tangent vectors at pt), plus
// chart-independent Laplacian and |grad u|^2, all for the metric g via the
// warped-product connection:
//   Hess u(d_r, d_r) = u_rr, Hess u(X, X') = Hess_S u(X, X') + (u_r/r) g(X, X'),
//   mixed r/sphere: d_r(X u) - (1/r) X u, etc.
HessLapResult hessian_laplacian_warped(const GrushinParams& par, const WarpedScalar& u,
                                       const CylindricalPoint& pt,
                                       const std::vector<CylindricalVector>& directions);

// ---------------------------------------------------------------------------
// The degenerate (sub-elliptic) Laplacian on all of R^(p+q):
//   L u = Delta_x u + (alpha+1)^2 |x|^(2 alpha) Delta_y u.
// Defined at x = 0 as well; uses fourth-order second-difference stencils
// unless the field supplies an analytic Hessian.
double grushin_laplacian(const GrushinParams& par, const ScalarField& u,
                         const CartesianPoint& z, double step = 1e-3);

// ---------------------------------------------------------------------------
// Right-hand side of the conformal Ricci identity for gt = u^-2 g:
//   Ric_gt(U,V) = Ric_g(U,V) + (n-2) u^-1 Hess u(U,V)
//                 - u^-2 { (n-1) |grad u|^2 - u Lap u } g(U,V).
// Everything evaluated in the Cartesian chart with closed-form symbols;
// u must be positive at z.
double conformal_ricci_rhs(const GrushinParams& par, const ScalarField& u,
                           const CartesianPoint& z, const VectorXd& U,
                           const VectorXd& V);

}  // namespace grushin
