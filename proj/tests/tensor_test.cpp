// SPDX-License-Identifier: Apache-2.0
#include <grushin/metric.hpp>
#include <grushin/tensor.hpp>

#include <doctest.h>

#include <cmath>
#include <random>

using namespace grushin;

namespace {

// Round unit sphere S^ds in stereographic coordinates, metric
// 4 |dsigma|^2 / (1 + |sigma|^2)^2. Independent oracle for the tensor
// helpers: R_abcd = g_ac g_bd - g_ad g_bc, Ric = (n-1) g, Scal = n(n-1).
class StereoSphere final : public CoordinateMetric {
 public:
  explicit StereoSphere(int n) : n_(n) {}
  int dim() const override { return n_; }
  MatrixXd eval(const VectorXd& u) const override {
    double den = 1.0 + u.squaredNorm();
    return (4.0 / (den * den)) * MatrixXd::Identity(n_, n_);
  }

 private:
  int n_;
};

}  // namespace

TEST_CASE("Kulkarni-Nomizu of the identity") {
  int n = 3;
  MatrixXd I = MatrixXd::Identity(n, n);
  CurvTensor4 gg = kulkarni_nomizu(I, I);
  // (g . g)_{abba} = 2 for a != b, with the index order (a, b, b, a)
  CHECK(gg.at(0, 1, 1, 0) == doctest::Approx(2.0));
  CHECK(gg.at(0, 1, 0, 1) == doctest::Approx(-2.0));
  CHECK(gg.at(0, 0, 1, 1) == doctest::Approx(0.0));
  CHECK(validate_symmetries(gg).worst_relative() < 1e-15);
}

TEST_CASE("sphere curvature through the FD pipeline") {
  StereoSphere sphere(3);
  VectorXd u(3);
  u << 0.3, -0.2, 0.5;
  CurvTensor4 R = riemann_fd(sphere, u, FdOptions{1e-4, 2});
  MatrixXd g = sphere.eval(u);

  CurvTensor4 expect(3);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b)
      for (int c = 0; c < 3; ++c)
        for (int d = 0; d < 3; ++d)
          expect.at(a, b, c, d) = g(a, c) * g(b, d) - g(a, d) * g(b, c);

  CurvTensor4 diff = R;
  diff.add_scaled(expect, -1.0);
  CHECK(diff.max_abs() < 1e-6 * expect.max_abs());

  MatrixXd ric = ricci_from_riemann(R, g);
  CHECK((ric - 2.0 * g).cwiseAbs().maxCoeff() < 1e-6);
  CHECK(scalar_from_ricci(ric, g) == doctest::Approx(6.0).epsilon(1e-6));
  CHECK(validate_symmetries(R).worst_relative() < 1e-6);
}

TEST_CASE("Weyl of a constant-curvature space vanishes") {
  StereoSphere sphere(4);
  VectorXd u(4);
  u << 0.1, 0.4, -0.3, 0.2;
  CurvTensor4 R = riemann_fd(sphere, u, FdOptions{1e-4, 2});
  MatrixXd g = sphere.eval(u);
  MatrixXd ric = ricci_from_riemann(R, g);
  CurvTensor4 W = weyl_from_parts(R, ric, scalar_from_ricci(ric, g), g);
  CHECK(W.max_abs() < 1e-6 * R.max_abs());
}

TEST_CASE("Weyl needs at least four dimensions") {
  CurvTensor4 R(3);
  MatrixXd g = MatrixXd::Identity(3, 3);
  CHECK_THROWS_AS(weyl_from_parts(R, g, 0.0, g), DimensionTooSmall);
}

TEST_CASE("Gram-Schmidt in a general inner product") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> nd;
  int n = 5;
  MatrixXd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = nd(rng);
  MatrixXd G = A * A.transpose() + n * MatrixXd::Identity(n, n);

  MatrixXd V(n, 3);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < 3; ++j) V(i, j) = nd(rng);
  MatrixXd E = gram_schmidt(G, V);
  CHECK((E.transpose() * G * E - MatrixXd::Identity(3, 3)).cwiseAbs().maxCoeff() < 1e-10);

  MatrixXd bad(n, 2);
  bad.col(0) = V.col(0);
  bad.col(1) = 2.0 * V.col(0);
  CHECK_THROWS_AS(gram_schmidt(G, bad), DegenerateInput);
}

TEST_CASE("contract matches explicit index sums") {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd;
  int n = 3;
  CurvTensor4 T(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) T.at(a, b, c, d) = nd(rng);
  VectorXd X(n), Y(n), U(n), V(n);
  for (int i = 0; i < n; ++i) {
    X[i] = nd(rng);
    Y[i] = nd(rng);
    U[i] = nd(rng);
    V[i] = nd(rng);
  }
  double direct = 0.0;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          direct += T.at(a, b, c, d) * X[a] * Y[b] * U[c] * V[d];
  CHECK(T.contract(X, Y, U, V) == doctest::Approx(direct).epsilon(1e-12));
}
