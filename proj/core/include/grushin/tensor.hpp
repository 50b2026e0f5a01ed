// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <grushin/errors.hpp>

#include <vector>

namespace grushin {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Dense covariant 4-tensor T_{abcd} on an n-dimensional space, stored
// row-major in a flat buffer. n stays small (<= 12) so no sparsity.
class CurvTensor4 {
 public:
  CurvTensor4() = default;
  explicit CurvTensor4(int n) : n_(n), data_(static_cast<size_t>(n) * n * n * n, 0.0) {}

  int dim() const { return n_; }
  double& at(int a, int b, int c, int d) { return data_[idx(a, b, c, d)]; }
  double at(int a, int b, int c, int d) const { return data_[idx(a, b, c, d)]; }

  double max_abs() const;

  CurvTensor4& add_scaled(const CurvTensor4& other, double s);
  CurvTensor4 scaled(double s) const;

  // T(X, Y, U, V) = T_{abcd} X^a Y^b U^c V^d.
  double contract(const VectorXd& X, const VectorXd& Y, const VectorXd& U,
                  const VectorXd& V) const;

 private:
  size_t idx(int a, int b, int c, int d) const {
    return ((static_cast<size_t>(a) * n_ + b) * n_ + c) * n_ + d;
  }
  int n_ = 0;
  std::vector<double> data_;
};

// Kulkarni-Nomizu product of symmetric 2-tensors:
// (h . s)_{abcd} = h_{ ad} s_{bc} + h_{bc} s_{ad} - h_{ac} s_{bd} - h_{bd} s_{ac}.
// With h = s = g (identity) this gives (g . g)_{1221} = 2.
CurvTensor4 kulkarni_nomizu(const MatrixXd& h, const MatrixXd& s);

// Ricci contraction Ric_{bd} = g^{ac} R_{abcd}. With the sign conventions
// used throughout (unit round sphere: R_{abcd} = g_{ac} g_{bd} - g_{ad} g_{bc})
// this yields Ric = (n-1) g on the unit sphere.
MatrixXd ricci_from_riemann(const CurvTensor4& R, const MatrixXd& g);

double scalar_from_ricci(const MatrixXd& ric, const MatrixXd& g);

// Weyl part of an algebraic curvature tensor:
// W = R + (Ric . g)/(n-2) - Scal (g . g)/(2(n-1)(n-2)).
// Guarded to n >= 4 (identically zero in n = 3, no content).
CurvTensor4 weyl_from_parts(const CurvTensor4& R, const MatrixXd& ric,
                            double scal, const MatrixXd& g);

struct SymmetryReport {
  double antisym_ab = 0.0;     // |R_{abcd} + R_{bacd}|
  double antisym_cd = 0.0;     // |R_{abcd} + R_{abdc}|
  double pair_symmetry = 0.0;  // |R_{abcd} - R_{cdab}|
  double first_bianchi = 0.0;  // |R_{abcd} + R_{acdb} + R_{adbc}|
  double scale = 0.0;          // max |R|
  double worst_relative() const;
  bool pass(double rel_tol) const { return worst_relative() <= rel_tol; }
};

// Residuals are reported relative to max|R| (a tensor that is zero to
// machine precision passes trivially).
SymmetryReport validate_symmetries(const CurvTensor4& R);

// Frame at a point: columns of `basis` are tangent vectors in some chart.
struct Frame {
  MatrixXd basis;           // n x k
  bool orthonormal = false; // g(e_i, e_j) = delta_ij within 1e-10 when set
};

// Modified Gram-Schmidt in the inner product given by gram (SPD matrix).
// Throws DegenerateInput when a vector drops below tol * its input norm.
MatrixXd gram_schmidt(const MatrixXd& gram, const MatrixXd& vectors,
                      double tol = 1e-10);

}  // namespace grushin
