// SPDX-License-Identifier: Apache-2.0
#include <grushin/metric.hpp>

#include <doctest.h>

#include <cmath>
#include <random>

using namespace grushin;

namespace {

GrushinParams def() { return GrushinParams{3, 1, 1.0}; }

VectorXd vec(std::initializer_list<double> vals) {
  VectorXd v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

}  // namespace

TEST_CASE("metric matrices at a frozen point") {
  GrushinParams par{2, 1, 1.0};
  CartesianPoint z{vec({1.0, 0.0}), vec({0.3})};
  MatrixXd G = metric_cartesian(par, z, MetricKind::g);
  CHECK((G - vec({4.0, 4.0, 1.0}).asDiagonal().toDenseMatrix()).norm() < 1e-14);
  MatrixXd Gh = metric_cartesian(par, z, MetricKind::ghat);
  CHECK((Gh - vec({1.0, 1.0, 0.25}).asDiagonal().toDenseMatrix()).norm() < 1e-14);
}

TEST_CASE("closed Christoffel symbols, frozen components") {
  // alpha = 1, x = (1, 0): Gamma^k_ij = |x|^-2 (d_ik x_j + d_jk x_i - d_ij x_k)
  GrushinParams par{2, 1, 1.0};
  CartesianPoint z{vec({1.0, 0.0}), vec({0.0})};
  ChristoffelAt G = christoffel_closed(par, z);
  CHECK(G[0](0, 0) == doctest::Approx(1.0));   // Gamma^1_11 = x_1
  CHECK(G[0](1, 1) == doctest::Approx(-1.0));  // Gamma^1_22 = -x_1
  CHECK(G[1](0, 1) == doctest::Approx(1.0));   // Gamma^2_12 = x_1
  CHECK(G[1](1, 0) == doctest::Approx(1.0));
  CHECK(G[2].cwiseAbs().maxCoeff() == doctest::Approx(0.0));  // y-block is flat
}

TEST_CASE("finite-difference Christoffel converges at second order") {
  // alpha = 2 keeps the metric non-polynomial so the truncation term is
  // actually present (alpha = 1 would be exactly quadratic in x).
  GrushinParams par{2, 1, 2.0};
  GrushinCartesian M(par, MetricKind::g);
  CartesianPoint z{vec({0.9, 0.4}), vec({0.2})};
  VectorXd u(3);
  u << z.x, z.y;
  ChristoffelAt exact = christoffel_closed(par, z);

  auto err = [&](double h) {
    ChristoffelAt fd = christoffel_fd(M, u, FdOptions{h, 2});
    double worst = 0.0;
    for (size_t k = 0; k < fd.size(); ++k)
      worst = std::max(worst, (fd[k] - exact[k]).cwiseAbs().maxCoeff());
    return worst;
  };
  double e1 = err(1e-2);
  double e2 = err(5e-3);
  double order = std::log2(e1 / e2);
  CHECK(order > 1.7);
  CHECK(order < 2.3);
}

TEST_CASE("curvature closed forms at the default instance") {
  GrushinParams par = def();
  CHECK(curvature_kappa(par, 1.0) == doctest::Approx(0.75));  // alpha(alpha+2)/(alpha+1)^2
  CHECK(scal_closed(par, 1.0) == doctest::Approx(-1.5));
  CHECK(scal_closed(par, 2.0) == doctest::Approx(-1.5 / 4.0));  // r^-2 law

  // Sectional curvature of a sphere pair is -kappa = -3/4 at r = 1.
  CylindricalPoint pt;
  pt.r = 1.0;
  pt.y = vec({0.0});
  pt.theta = vec({1.0, 0.0, 0.0});
  CylindricalVector X, Y;
  X.base = Y.base = pt;
  X.dr = Y.dr = 0.0;
  X.dy = Y.dy = vec({0.0});
  X.dtheta = vec({0.0, 1.0, 0.0}) / ((par.alpha + 1.0) * pt.r);  // g-unit
  Y.dtheta = vec({0.0, 0.0, 1.0}) / ((par.alpha + 1.0) * pt.r);
  CHECK(riemann_closed(par, pt, X, Y, X, Y) == doctest::Approx(-0.75).epsilon(1e-12));

  // Ric at x = (1,0,0): the x-sphere block carries -kappa (p-2) lambda.
  CartesianPoint z{vec({1.0, 0.0, 0.0}), vec({0.0})};
  MatrixXd ric = ricci_closed_cartesian(par, z);
  MatrixXd expect = MatrixXd::Zero(4, 4);
  expect(1, 1) = expect(2, 2) = -3.0;  // -(3/4) * 1 * (alpha+1)^2 |x|^(2 alpha)
  CHECK((ric - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("p = 2 closed curvature vanishes") {
  GrushinParams par{2, 2, 1.5};
  CartesianPoint z{vec({0.7, -0.4}), vec({0.1, 0.3})};
  CHECK(riemann_closed_cartesian(par, z).max_abs() == doctest::Approx(0.0));
  CHECK(scal_closed(par, 0.8) == doctest::Approx(0.0));
}

TEST_CASE("FD and closed curvature agree at spot points") {
  GrushinParams par{3, 2, 0.5};
  GrushinCartesian M(par, MetricKind::g);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 4; ++k) {
    CartesianPoint z;
    z.x = vec({1.0 + 0.2 * nd(rng), 0.3 * nd(rng), 0.3 * nd(rng)});
    z.y = vec({nd(rng), nd(rng)});
    VectorXd u(5);
    u << z.x, z.y;
    CurvTensor4 fd = riemann_fd(M, u, FdOptions{1e-4, 2});
    CurvTensor4 cl = riemann_closed_cartesian(par, z);
    CurvTensor4 diff = fd;
    diff.add_scaled(cl, -1.0);
    CHECK(diff.max_abs() < 1e-5 * (1.0 + cl.max_abs()));
  }
}

TEST_CASE("warped engine matches the cylinder closed form") {
  GrushinParams par = def();
  GenericWarped W = GenericWarped::grushin(par);
  VectorXd u(4);  // (r, y, sigma), sigma in R^(p-1)
  u << 1.2, 0.4, 0.3, -0.2;
  CurvTensor4 fd = riemann_fd(W, u, FdOptions{1e-4, 2});
  CurvTensor4 cl = warped_riemann_closed(W, u);
  CurvTensor4 diff = fd;
  diff.add_scaled(cl, -1.0);
  CHECK(diff.max_abs() < 1e-5 * (1.0 + cl.max_abs()));
  CHECK(scalar_fd(W, u, FdOptions{1e-3, 4}) ==
        doctest::Approx(scal_closed(par, 1.2)).epsilon(1e-6));
}

TEST_CASE("degenerate Laplacian pins") {
  GrushinParams par = def();
  ScalarField xsq;
  xsq.value = [](const VectorXd& u) { return u.head(3).squaredNorm(); };
  ScalarField ysq;
  ysq.value = [](const VectorXd& u) { return u.tail(1).squaredNorm(); };

  CartesianPoint z{vec({1.0, 0.0, 0.0}), vec({0.7})};
  // L|x|^2 = 2p;  L|y|^2 = (alpha+1)^2 |x|^(2 alpha) 2q = 8 at |x| = 1
  CHECK(grushin_laplacian(par, xsq, z) == doctest::Approx(6.0).epsilon(1e-8));
  CHECK(grushin_laplacian(par, ysq, z) == doctest::Approx(8.0).epsilon(1e-8));

  CartesianPoint origin{vec({0.0, 0.0, 0.0}), vec({0.7})};
  CHECK(grushin_laplacian(par, xsq, origin) == doctest::Approx(6.0).epsilon(1e-8));
  CHECK(grushin_laplacian(par, ysq, origin) == doctest::Approx(0.0).epsilon(1e-8));
}

TEST_CASE("warped Hessian reproduces the radial Laplacian") {
  GrushinParams par = def();
  WarpedScalar u;
  u.value = [](const CylindricalPoint& pt) {
    return pt.r * pt.r + pt.y.squaredNorm();
  };
  u.h_only = true;
  CylindricalPoint pt;
  pt.r = 1.4;
  pt.y = vec({-0.3});
  pt.theta = vec({0.0, 1.0, 0.0});
  HessLapResult res = hessian_laplacian_warped(par, u, pt, {});
  // Lap(r^2 + |y|^2) = 2 + 2 (p-1) + 2 q = 2 n for the metric g
  CHECK(res.laplacian == doctest::Approx(2.0 * par.n()).epsilon(1e-6));
  // |grad u|^2 = 4 (r^2 + |y|^2)
  CHECK(res.grad_sq ==
        doctest::Approx(4.0 * (pt.r * pt.r + pt.y.squaredNorm())).epsilon(1e-6));
}
