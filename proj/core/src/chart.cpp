// SPDX-License-Identifier: Apache-2.0
#include <grushin/chart.hpp>

#include <Eigen/Dense>

#include <cmath>

namespace grushin {

void check_dims(const GrushinParams& par, const CartesianPoint& z) {
  if (z.x.size() != par.p || z.y.size() != par.q)
    throw DimensionMismatch("CartesianPoint does not match (p, q)");
}

void check_dims(const GrushinParams& par, const CylindricalPoint& z) {
  if (z.theta.size() != par.p || z.y.size() != par.q)
    throw DimensionMismatch("CylindricalPoint does not match (p, q)");
  if (!(z.r > 0.0)) throw InvalidInput("CylindricalPoint: r must be positive");
  if (std::abs(z.theta.norm() - 1.0) > 1e-8)
    throw InvalidInput("CylindricalPoint: theta must be a unit vector");
}

void check_off_singular(const CartesianPoint& z) {
  if (z.x.norm() < kSingularGuard * (1.0 + z.y.norm()))
    throw SingularChart("point too close to the singular set {x = 0}");
}

bool same_base(const CartesianPoint& a, const CartesianPoint& b, double tol) {
  return (a.x - b.x).norm() <= tol && (a.y - b.y).norm() <= tol;
}

bool same_base(const CylindricalPoint& a, const CylindricalPoint& b, double tol) {
  return std::abs(a.r - b.r) <= tol && (a.y - b.y).norm() <= tol &&
         (a.theta - b.theta).norm() <= tol;
}

CylindricalPoint to_cylindrical(const GrushinParams& par, const CartesianPoint& z) {
  check_dims(par, z);
  check_off_singular(z);
  const double rho = z.x.norm();
  CylindricalPoint c;
  c.r = std::pow(rho, par.alpha + 1.0);
  c.y = z.y;
  c.theta = z.x / rho;
  return c;
}

CartesianPoint to_cartesian(const GrushinParams& par, const CylindricalPoint& z) {
  check_dims(par, z);
  const double rho = std::pow(z.r, 1.0 / (par.alpha + 1.0));
  return {rho * z.theta, z.y};
}

double homogeneous_norm(const GrushinParams& par, const CartesianPoint& z) {
  check_dims(par, z);
  const double e = 2.0 * (par.alpha + 1.0);
  return std::pow(std::pow(z.x.norm(), e) + z.y.squaredNorm(), 1.0 / e);
}

double homogeneous_norm_cyl(const GrushinParams& par, const CylindricalPoint& z) {
  check_dims(par, z);
  const double e = 2.0 * (par.alpha + 1.0);
  return std::pow(z.r * z.r + z.y.squaredNorm(), 1.0 / e);
}

CartesianPoint dilate(const GrushinParams& par, const CartesianPoint& z, double t) {
  check_dims(par, z);
  if (!(t > 0.0)) throw InvalidInput("dilate: t must be positive");
  return {t * z.x, std::pow(t, par.alpha + 1.0) * z.y};
}

CylindricalPoint dilate(const GrushinParams& par, const CylindricalPoint& z, double t) {
  check_dims(par, z);
  if (!(t > 0.0)) throw InvalidInput("dilate: t must be positive");
  const double s = std::pow(t, par.alpha + 1.0);
  return {s * z.r, s * z.y, z.theta};
}

CylindricalVector chart_pushforward(const GrushinParams& par, const CartesianVector& v) {
  CylindricalPoint base = to_cylindrical(par, v.base);
  const double rho = v.base.x.norm();
  const double radial = base.theta.dot(v.dx);
  CylindricalVector w;
  w.base = base;
  w.dr = (par.alpha + 1.0) * std::pow(rho, par.alpha) * radial;
  w.dy = v.dy;
  w.dtheta = (v.dx - radial * base.theta) / rho;
  return w;
}

CartesianVector chart_pushforward(const GrushinParams& par, const CylindricalVector& v) {
  CartesianPoint base = to_cartesian(par, v.base);
  const double rho = std::pow(v.base.r, 1.0 / (par.alpha + 1.0));
  const double drho = v.dr * std::pow(rho, -par.alpha) / (par.alpha + 1.0);
  CartesianVector w;
  w.base = base;
  w.dx = drho * v.base.theta + rho * v.dtheta;
  w.dy = v.dy;
  return w;
}

TangentSplit split_tangent(const CylindricalVector& v) {
  CylindricalVector h = v;
  h.dtheta.setZero();
  CylindricalVector s = v;
  s.dr = 0.0;
  s.dy.setZero();
  return {h, s};
}

TangentSplit split_tangent(const GrushinParams& par, const CartesianVector& v) {
  return split_tangent(chart_pushforward(par, v));
}

Eigen::MatrixXd sphere_tangent_basis(const VectorXd& theta) {
  const int p = static_cast<int>(theta.size());
  if (std::abs(theta.norm() - 1.0) > 1e-8)
    throw InvalidInput("sphere_tangent_basis: theta must be a unit vector");
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(theta);
  Eigen::MatrixXd Q = qr.householderQ();
  // first column is +-theta; the remaining columns span theta-perp
  return Q.rightCols(p - 1);
}

}  // namespace grushin
