// SPDX-License-Identifier: Apache-2.0
#include <grushin/chart.hpp>
#include <grushin/metric.hpp>

#include <doctest.h>

#include <random>

using namespace grushin;

namespace {

GrushinParams def() { return GrushinParams{3, 1, 1.0}; }

VectorXd vec3(double a, double b, double c) {
  VectorXd v(3);
  v << a, b, c;
  return v;
}

VectorXd vec1(double a) {
  VectorXd v(1);
  v << a;
  return v;
}

}  // namespace

TEST_CASE("cylinder chart round trip and frozen values") {
  GrushinParams par = def();
  CartesianPoint z{vec3(3.0, 4.0, 0.0), vec1(0.5)};
  CylindricalPoint c = to_cylindrical(par, z);
  CHECK(c.r == doctest::Approx(25.0).epsilon(1e-14));  // |x|^(alpha+1) = 5^2
  CHECK(c.theta[0] == doctest::Approx(0.6));
  CHECK(c.theta[1] == doctest::Approx(0.8));
  CHECK(c.theta[2] == doctest::Approx(0.0));
  CHECK(c.y[0] == doctest::Approx(0.5));

  CartesianPoint back = to_cartesian(par, c);
  CHECK((back.x - z.x).norm() < 1e-13);
  CHECK((back.y - z.y).norm() < 1e-13);
}

TEST_CASE("homogeneous norm and dilations") {
  GrushinParams par = def();
  CHECK(homogeneous_norm(par, {vec3(1.0, 0.0, 0.0), vec1(0.0)}) ==
        doctest::Approx(1.0).epsilon(1e-14));
  // (0 + 81)^(1/4) = 3; the norm is defined across x = 0
  CHECK(homogeneous_norm(par, {vec3(0.0, 0.0, 0.0), vec1(9.0)}) ==
        doctest::Approx(3.0).epsilon(1e-14));

  CartesianPoint z{vec3(1.0, 0.0, 0.0), vec1(1.0)};
  CartesianPoint d = dilate(par, z, 2.0);
  CHECK(d.x[0] == doctest::Approx(2.0));
  CHECK(d.y[0] == doctest::Approx(4.0));  // t^(alpha+1) = 4
  CHECK(homogeneous_norm(par, d) ==
        doctest::Approx(2.0 * homogeneous_norm(par, z)).epsilon(1e-13));

  CHECK_THROWS_AS(dilate(par, z, 0.0), InvalidInput);
}

TEST_CASE("pushforward maps the radial direction to (alpha+1)|x|^alpha d_r") {
  GrushinParams par = def();
  CartesianPoint z{vec3(1.0, 0.0, 0.0), vec1(0.0)};
  CartesianVector v{z, vec3(1.0, 0.0, 0.0), vec1(0.0)};
  CylindricalVector c = chart_pushforward(par, v);
  CHECK(c.dr == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(c.dtheta.norm() < 1e-14);

  CartesianVector back = chart_pushforward(par, c);
  CHECK((back.dx - v.dx).norm() < 1e-13);
  CHECK((back.dy - v.dy).norm() < 1e-13);
}

TEST_CASE("pushforward round trips on random vectors") {
  GrushinParams par{4, 2, 0.7};
  std::mt19937_64 rng(11);
  std::normal_distribution<double> nd;
  auto randv = [&](int n) {
    VectorXd v(n);
    for (int i = 0; i < n; ++i) v[i] = nd(rng);
    return v;
  };
  for (int k = 0; k < 20; ++k) {
    CartesianPoint z;
    z.x = randv(4);
    if (z.x.norm() < 0.3) continue;
    z.y = randv(2);
    CartesianVector v{z, randv(4), randv(2)};
    CartesianVector back = chart_pushforward(par, chart_pushforward(par, v));
    CHECK((back.dx - v.dx).norm() < 1e-12 * (1.0 + v.dx.norm()));
    CHECK((back.dy - v.dy).norm() < 1e-12);
  }
}

TEST_CASE("tangent split is a g-orthogonal decomposition") {
  GrushinParams par = def();
  CylindricalPoint pt;
  pt.r = 1.3;
  pt.y = vec1(0.4);
  pt.theta = vec3(0.6, 0.8, 0.0);
  MatrixXd basis = sphere_tangent_basis(pt.theta);
  CHECK(basis.cols() == 2);
  CHECK((basis.transpose() * basis - MatrixXd::Identity(2, 2)).norm() < 1e-12);
  CHECK((basis.transpose() * pt.theta).norm() < 1e-12);

  CylindricalVector v;
  v.base = pt;
  v.dr = 0.7;
  v.dy = vec1(-0.2);
  v.dtheta = basis.col(0) * 0.5 + basis.col(1) * 0.1;
  TangentSplit sp = split_tangent(v);
  CHECK(sp.horizontal.dtheta.norm() == 0.0);
  CHECK(sp.spherical.dr == 0.0);
  CHECK(inner_cylindrical(par, sp.horizontal, sp.spherical, MetricKind::g) ==
        doctest::Approx(0.0).epsilon(1e-14));
  double full = inner_cylindrical(par, v, v, MetricKind::g);
  double parts = inner_cylindrical(par, sp.horizontal, sp.horizontal, MetricKind::g) +
                 inner_cylindrical(par, sp.spherical, sp.spherical, MetricKind::g);
  CHECK(full == doctest::Approx(parts).epsilon(1e-13));
}

TEST_CASE("chart guards") {
  GrushinParams par = def();
  CHECK_THROWS_AS(to_cylindrical(par, {vec3(0.0, 0.0, 0.0), vec1(1.0)}), SingularChart);
  CHECK_THROWS_AS(check_dims(par, CartesianPoint{vec1(1.0), vec1(0.0)}),
                  DimensionMismatch);
  CylindricalPoint bad;
  bad.r = -1.0;
  bad.y = vec1(0.0);
  bad.theta = vec3(1.0, 0.0, 0.0);
  CHECK_THROWS_AS(check_dims(par, bad), InvalidInput);
  bad.r = 1.0;
  bad.theta = vec3(2.0, 0.0, 0.0);
  CHECK_THROWS_AS(check_dims(par, bad), InvalidInput);
}
