// SPDX-License-Identifier: Apache-2.0
#include <grushin/tensor.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace grushin {

double CurvTensor4::max_abs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::abs(v));
  return m;
}

CurvTensor4& CurvTensor4::add_scaled(const CurvTensor4& other, double s) {
  if (other.n_ != n_) throw DimensionMismatch("CurvTensor4::add_scaled");
  for (size_t i = 0; i < data_.size(); ++i) data_[i] += s * other.data_[i];
  return *this;
}

CurvTensor4 CurvTensor4::scaled(double s) const {
  CurvTensor4 out = *this;
  for (double& v : out.data_) v *= s;
  return out;
}

double CurvTensor4::contract(const VectorXd& X, const VectorXd& Y,
                             const VectorXd& U, const VectorXd& V) const {
  if (X.size() != n_ || Y.size() != n_ || U.size() != n_ || V.size() != n_)
    throw DimensionMismatch("CurvTensor4::contract");
  // Contract one slot at a time to keep this O(n^4) instead of O(n^4) per
  // output times four loops; n is small but this runs in inner loops.
  double acc = 0.0;
  for (int a = 0; a < n_; ++a) {
    if (X[a] == 0.0) continue;
    for (int b = 0; b < n_; ++b) {
      if (Y[b] == 0.0) continue;
      double cd = 0.0;
      for (int c = 0; c < n_; ++c) {
        if (U[c] == 0.0) continue;
        double dsum = 0.0;
        for (int d = 0; d < n_; ++d) dsum += at(a, b, c, d) * V[d];
        cd += U[c] * dsum;
      }
      acc += X[a] * Y[b] * cd;
    }
  }
  return acc;
}

CurvTensor4 kulkarni_nomizu(const MatrixXd& h, const MatrixXd& s) {
  const int n = static_cast<int>(h.rows());
  if (h.cols() != n || s.rows() != n || s.cols() != n)
    throw DimensionMismatch("kulkarni_nomizu");
  CurvTensor4 T(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d)
          T.at(a, b, c, d) = h(a, d) * s(b, c) + h(b, c) * s(a, d) -
                             h(a, c) * s(b, d) - h(b, d) * s(a, c);
  return T;
}

MatrixXd ricci_from_riemann(const CurvTensor4& R, const MatrixXd& g) {
  const int n = R.dim();
  if (g.rows() != n || g.cols() != n) throw DimensionMismatch("ricci_from_riemann");
  const MatrixXd ginv = g.inverse();
  MatrixXd ric = MatrixXd::Zero(n, n);
  for (int b = 0; b < n; ++b)
    for (int d = 0; d < n; ++d) {
      double acc = 0.0;
      for (int a = 0; a < n; ++a)
        for (int c = 0; c < n; ++c) acc += ginv(a, c) * R.at(a, b, c, d);
      ric(b, d) = acc;
    }
  return ric;
}

double scalar_from_ricci(const MatrixXd& ric, const MatrixXd& g) {
  return (g.inverse() * ric).trace();
}

CurvTensor4 weyl_from_parts(const CurvTensor4& R, const MatrixXd& ric,
                            double scal, const MatrixXd& g) {
  const int n = R.dim();
  if (n < 4) throw DimensionTooSmall("weyl_from_parts: need n >= 4");
  CurvTensor4 W = R;
  W.add_scaled(kulkarni_nomizu(ric, g), 1.0 / (n - 2));
  W.add_scaled(kulkarni_nomizu(g, g), -scal / (2.0 * (n - 1) * (n - 2)));
  return W;
}

double SymmetryReport::worst_relative() const {
  const double s = std::max(scale, 1e-300);
  return std::max({antisym_ab, antisym_cd, pair_symmetry, first_bianchi}) / s;
}

SymmetryReport validate_symmetries(const CurvTensor4& R) {
  const int n = R.dim();
  SymmetryReport rep;
  rep.scale = R.max_abs();
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          const double v = R.at(a, b, c, d);
          rep.antisym_ab = std::max(rep.antisym_ab, std::abs(v + R.at(b, a, c, d)));
          rep.antisym_cd = std::max(rep.antisym_cd, std::abs(v + R.at(a, b, d, c)));
          rep.pair_symmetry = std::max(rep.pair_symmetry, std::abs(v - R.at(c, d, a, b)));
          rep.first_bianchi = std::max(
              rep.first_bianchi,
              std::abs(v + R.at(a, c, d, b) + R.at(a, d, b, c)));
        }
  return rep;
}

MatrixXd gram_schmidt(const MatrixXd& gram, const MatrixXd& vectors, double tol) {
  const int n = static_cast<int>(vectors.rows());
  const int k = static_cast<int>(vectors.cols());
  if (gram.rows() != n || gram.cols() != n) throw DimensionMismatch("gram_schmidt");
  MatrixXd out = vectors;
  for (int j = 0; j < k; ++j) {
    const double in_norm = std::sqrt(out.col(j).dot(gram * out.col(j)));
    for (int i = 0; i < j; ++i) {
      const double proj = out.col(i).dot(gram * out.col(j));
      out.col(j) -= proj * out.col(i);
    }
    const double norm = std::sqrt(out.col(j).dot(gram * out.col(j)));
    if (!(norm > tol * std::max(in_norm, 1.0)))
      throw DegenerateInput("gram_schmidt: vector became degenerate");
    out.col(j) /= norm;
  }
  return out;
}

}  // namespace grushin
