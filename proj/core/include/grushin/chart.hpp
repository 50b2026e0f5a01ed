// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <grushin/params.hpp>

#include <utility>

namespace grushin {

using Eigen::VectorXd;

// Everything here lives on M0 = (R^p \ {0}) x R^q. Points with
// |x| < kSingularGuard * (1 + |y|) are rejected: the cylinder chart and
// the anisotropic dilations degenerate there.
inline constexpr double kSingularGuard = 1e-9;

struct CartesianPoint {
  VectorXd x;  // size p
  VectorXd y;  // size q
};

// Cylinder chart: r = |x|^(alpha+1), theta = x/|x| stored as an ambient
// unit vector in R^p, y unchanged.
struct CylindricalPoint {
  double r = 0.0;   // > 0
  VectorXd y;       // size q
  VectorXd theta;   // size p, |theta| = 1
};

// Tangent vectors carry their base point; mixing base points in binary
// operations is a bug we check for.
struct CartesianVector {
  CartesianPoint base;
  VectorXd dx;  // size p
  VectorXd dy;  // size q
};

// dtheta is the ambient representative of a sphere tangent:
// <theta, dtheta> = 0.
struct CylindricalVector {
  CylindricalPoint base;
  double dr = 0.0;
  VectorXd dy;      // size q
  VectorXd dtheta;  // size p
};

void check_dims(const GrushinParams& par, const CartesianPoint& z);
void check_dims(const GrushinParams& par, const CylindricalPoint& z);
void check_off_singular(const CartesianPoint& z);
bool same_base(const CartesianPoint& a, const CartesianPoint& b, double tol = 1e-12);
bool same_base(const CylindricalPoint& a, const CylindricalPoint& b, double tol = 1e-12);

CylindricalPoint to_cylindrical(const GrushinParams& par, const CartesianPoint& z);
CartesianPoint to_cartesian(const GrushinParams& par, const CylindricalPoint& z);

// |z| = (|x|^(2(alpha+1)) + |y|^2)^(1/(2(alpha+1))); homogeneous of
// degree one under dilations, and |x|^(2(alpha+1)) + |y|^2 = r^2 + |y|^2.
double homogeneous_norm(const GrushinParams& par, const CartesianPoint& z);
double homogeneous_norm_cyl(const GrushinParams& par, const CylindricalPoint& z);

// delta_t(x, y) = (t x, t^(alpha+1) y); in the cylinder chart
// (r, y, theta) -> (t^(alpha+1) r, t^(alpha+1) y, theta).
CartesianPoint dilate(const GrushinParams& par, const CartesianPoint& z, double t);
CylindricalPoint dilate(const GrushinParams& par, const CylindricalPoint& z, double t);

// Pushforward along the chart change. With rho = |x|, theta = x/rho:
//   dr = (alpha+1) rho^alpha <theta, dx>,  dtheta = (dx - <theta,dx> theta)/rho
// and the inverse dx = drho theta + rho dtheta, drho = dr rho^-alpha/(alpha+1).
CylindricalVector chart_pushforward(const GrushinParams& par, const CartesianVector& v);
CartesianVector chart_pushforward(const GrushinParams& par, const CylindricalVector& v);

// Warped-product split T M0 = T H + T Sigma, H = (0,inf) x R^q carrying
// (r, y) and Sigma the sphere factor. The two parts are g-orthogonal by
// block diagonality of the cylinder form of the metric.
struct TangentSplit {
  CylindricalVector horizontal;  // (dr, dy, 0)
  CylindricalVector spherical;   // (0, 0, dtheta)
};
TangentSplit split_tangent(const CylindricalVector& v);
TangentSplit split_tangent(const GrushinParams& par, const CartesianVector& v);

// Ambient orthonormal basis of theta-perp in R^p (columns), i.e. the
// tangent space of the unit sphere at theta.
Eigen::MatrixXd sphere_tangent_basis(const VectorXd& theta);

}  // namespace grushin
