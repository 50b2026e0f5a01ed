// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <grushin/metric.hpp>

#include <cstdint>
#include <utility>
#include <vector>

namespace grushin {

// ---------------------------------------------------------------------------
// Elementary conformal maps of the Grushin structure and chains thereof.

class SmoothMap {
 public:
  virtual ~SmoothMap() = default;
  virtual CartesianPoint apply(const CartesianPoint&) const = 0;
  virtual MatrixXd jacobian(const CartesianPoint&) const = 0;  // (p+q) square
};

struct ElementaryMap {
  enum class Kind { Isometry, Dilation, Inversion };
  Kind kind = Kind::Isometry;
  MatrixXd A;  // p x p orthogonal (Isometry)
  MatrixXd B;  // q x q orthogonal (Isometry)
  VectorXd b;  // y-translation      (Isometry)
  double t = 1.0;  // Dilation factor

  // Gamma(x, y) = (A x, B y + b); plain y-translation is A = I, B = I.
  static ElementaryMap isometry(MatrixXd A, MatrixXd B, VectorXd b);
  static ElementaryMap y_translation(VectorXd b);
  static ElementaryMap dilation(double t);
  // Phi = delta_{|z|^-2} z; involution fixing {|z| = 1}, undefined at the origin.
  static ElementaryMap inversion();
};

CartesianPoint apply_map(const GrushinParams& par, const ElementaryMap& m,
                         const CartesianPoint& z);
MatrixXd map_jacobian(const GrushinParams& par, const ElementaryMap& m,
                      const CartesianPoint& z);
// Closed-form conformal factor u with f* metric = u^-2 metric:
// Isometry: 1. Dilation t: t^-(alpha+1) for g, t^-1 for ghat.
// Inversion: |z|^(2(alpha+1)) for g, |z|^2 for ghat.
double map_factor(const GrushinParams& par, const ElementaryMap& m,
                  const CartesianPoint& z, MetricKind k);

// Maps applied in list order: chain = {m1, m2} acts as z -> m2(m1(z)).
class MapChain final : public SmoothMap {
 public:
  MapChain(GrushinParams par, std::vector<ElementaryMap> maps)
      : par_(par), maps_(std::move(maps)) {}

  CartesianPoint apply(const CartesianPoint& z) const override;
  MatrixXd jacobian(const CartesianPoint& z) const override;
  // Cocycle product of the closed-form factors: u_{F o G} = (u_F o G) u_G.
  double known_factor(const CartesianPoint& z, MetricKind k) const;

  const GrushinParams& params() const { return par_; }
  const std::vector<ElementaryMap>& maps() const { return maps_; }

 private:
  GrushinParams par_;
  std::vector<ElementaryMap> maps_;
};

// ---------------------------------------------------------------------------
// Measured conformality: push a g-orthonormal frame at z through the chain
// and compare the image Gram matrix against u_hat^-2 I. Returns (u_hat,
// residual); residual is relative to u_hat^-2. At points (0, y) the frame
// degenerates and the measurement restricts to the y-block for g and the
// x-block for ghat (both are honestly orthonormal there).
std::pair<double, double> cr_residual(const MapChain& chain, const CartesianPoint& z,
                                      MetricKind k);
std::pair<double, double> cr_residual_hat(const MapChain& chain, const CartesianPoint& z);

// |Ric(f_* U, f_* V)(f(z)) - Ric(U, V)(z)| via the closed forms; conformal
// maps of the classification form preserve Ricci exactly.
double ricci_preservation_residual(const GrushinParams& par, const SmoothMap& f,
                                   const CartesianPoint& z, const VectorXd& U,
                                   const VectorXd& V);

// ---------------------------------------------------------------------------
// Adapted-basis curvature model: g-orthonormal basis with dim_h horizontal
// then dim_s vertical (sphere) vectors; the only curvature is the vertical
// block with sectional curvature `sect` (Grushin: sect = -kappa; round
// S^k x R^m products: sect = +1).
CurvTensor4 adapted_riemann(int dim_h, int dim_s, double sect);
CurvTensor4 adapted_weyl(int dim_h, int dim_s, double sect);

// Components of a cylinder tangent vector on the adapted orthonormal frame
// (d_r, d_y, sphere columns of basis scaled by (alpha+1) r).
VectorXd adapted_components(const GrushinParams& par, const CylindricalVector& v,
                            const MatrixXd& sphere_basis);

// ---------------------------------------------------------------------------
// The degenerate-Weyl cone U_P = { X : W(X, Y, U, V) = 0 for all pairwise-
// orthogonal Y, U, V } which equals T_P S union T_P H for p >= 3 and all of
// T_P M0 for p = 2.

enum class ConeMode { ClosedForm, WeylSearch };

struct ConeOptions {
  ConeMode mode = ConeMode::ClosedForm;
  int trials = 500;        // random orthogonal completions (WeylSearch)
  std::uint64_t seed = 0;
  double split_tol = 1e-9;  // closed-form: |X_H| |X_S| threshold, relative
  double weyl_tol = 1e-6;   // search: max |W| relative to |W|_inf and norms
};

struct ConeResult {
  bool member = false;
  char part = 'M';      // 'H', 'S', 'M' (mixed), 'A' (p = 2: everything)
  double witness = 0;   // closed-form: min part norm ratio; search: max |W| ratio
};

ConeResult cone_membership(const GrushinParams& par, const CylindricalPoint& pt,
                           const CylindricalVector& X, const ConeOptions& opt = {});

// Same machinery on a generic adapted model (dim_h, dim_s, sect), with the
// vector given directly in adapted components. Used for product instances.
ConeResult cone_membership_adapted(int dim_h, int dim_s, double sect,
                                   const VectorXd& X, const ConeOptions& opt = {});

// Pushes the adapted frame generators through the chain and checks the
// image classification against a product pattern: 1 = (S->S, H->H),
// 2 = (S->H, H->S); the swap is only admissible when p - 1 = q + 1.
struct ConePattern {
  int pattern = 1;
  double residual = 0;  // worst contamination fraction across generators
};
ConePattern cone_invariance_check(const MapChain& chain, const CartesianPoint& z);

// ---------------------------------------------------------------------------
// Quadratic conformal-factor ansatz u = (H/2)(r^2 + |y|^2) + L r + <M, y> + N
// on the half-space H; genuine factors have L = 0 and |M|^2 = 2 N H.

struct ConformalFactorModel {
  double H = 0.0;
  double L = 0.0;
  VectorXd M;  // size q
  double N = 0.0;

  double value(double r, const VectorXd& y) const;
  WarpedScalar as_warped() const;  // analytic derivatives, h_only
};

// Least-squares fit of the model through the chain's closed-form factor for
// the metric g (the ghat factors are not quadratic in (r, y) unless
// alpha = 0); exact for chains of elementary maps, FitFailed otherwise.
ConformalFactorModel model_from_chain(const MapChain& chain,
                                      const CylindricalPoint& around);

// Residuals of the conformal-factor PDE at pt:
//   full:  (n-2) u^-1 Hess u(U, V) = g(U, V) u^-2 { (n-1)|grad u|^2 - u Lap u }
//   trace: 2 u Lap u = n |grad u|^2
// both scale-normalized. Overloads take the analytic model, a raw field, or
// a chain (factor model fitted first).
std::pair<double, double> factor_pde_residual(const GrushinParams& par,
                                              const ConformalFactorModel& u,
                                              const CylindricalPoint& pt);
std::pair<double, double> factor_pde_residual(const GrushinParams& par,
                                              const WarpedScalar& u,
                                              const CylindricalPoint& pt);
std::pair<double, double> factor_pde_residual(const GrushinParams& par,
                                              const MapChain& chain,
                                              const CylindricalPoint& pt);

// ---------------------------------------------------------------------------
// Recover the classification form f = Gamma o delta_t o (Phi o T_-b if s = -2)
// from input/output samples. b is reported as 0 for s = 0 (it folds into
// Gamma's translation there).

struct ClassificationFit {
  MatrixXd A;  // p x p orthogonal
  MatrixXd B;  // q x q orthogonal
  VectorXd v;  // Gamma's y-translation
  double t = 1.0;
  VectorXd b;  // pre-inversion y-translation; zero when s = 0
  int s = 0;   // 0 or -2
  double fit_residual = 0.0;

  MapChain as_chain(const GrushinParams& par) const;
};

using SamplePair = std::pair<CartesianPoint, CartesianPoint>;

ClassificationFit fit_classification(const GrushinParams& par,
                                     const std::vector<SamplePair>& samples,
                                     std::uint64_t seed = 0);

// W(X, Y, X, Y) / (g(X,X) g(Y,Y)) for g-orthogonal sphere vectors X, Y;
// equals -q(q+1)/((n-1)(n-2)) * alpha(alpha+2)(alpha+1)^-2 r^-2.
double weyl_sectional_ratio(const GrushinParams& par, const CylindricalPoint& pt,
                            const CylindricalVector& X, const CylindricalVector& Y);

}  // namespace grushin
