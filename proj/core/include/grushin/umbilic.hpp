// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <grushin/conformal.hpp>

#include <cstdint>
#include <functional>
#include <vector>

namespace grushin {

// Hypersurface in M0 described as a regular level set F = 0. The coordinate
// gradient is the d(p+q)-vector of partials of F; the g-unit normal is the
// normalized metric gradient times `orientation`.
struct HypersurfaceSpec {
  GrushinParams params;
  std::function<double(const CartesianPoint&)> F;
  std::function<VectorXd(const CartesianPoint&)> grad;
  double orientation = 1.0;
};

// The three umbilic families:
//   A1: |x|^(2(alpha+1)) + |y - b|^2 = c^2   (homogeneous sphere, c > 0)
//   A2: <a, y> = c                           (horizontal plane)
//   B:  <a, x> = 0                           (vertical plane through x = 0)
struct SurfaceFamily {
  enum class Type { A1, A2, B };
  Type type = Type::A1;
  VectorXd b;      // A1 center offset (size q)
  double c = 1.0;  // A1 radius / A2 offset
  VectorXd a;      // plane normal: size q (A2) or size p (B), unit

  static SurfaceFamily sphere(VectorXd b, double c);       // A1
  static SurfaceFamily y_plane(VectorXd a, double c);      // A2
  static SurfaceFamily x_plane(VectorXd a);                // B
};

// Closed-form level function and gradient for a family member. A1 carries
// orientation -1 so that the unit normal is -(r d_r + (y-b) d_y)/c, pointing
// into the sphere; A2 and B use +1.
HypersurfaceSpec surface_of(const GrushinParams& par, const SurfaceFamily& family);

// Level set of F o f, i.e. the preimage f^-1(S) of spec's surface S. To
// describe the image of S under an involution (the inversion), pass the map
// itself; otherwise pass the inverse map.
HypersurfaceSpec pullback_spec(const HypersurfaceSpec& spec, const MapChain& f);

// g-unit normal (coordinate components) at a point of the surface.
CartesianVector unit_normal(const HypersurfaceSpec& spec, const CartesianPoint& z,
                            MetricKind k = MetricKind::g);

struct ShapeReport {
  CartesianPoint base;
  VectorXd principal;       // n-1 eigenvalues of the symmetrized operator, ascending
  double kappa = 0.0;       // mean curvature estimate: trace/(n-1)
  double asymmetry = 0.0;   // self-adjointness defect before symmetrizing, relative
};

// Two independent evaluation routes: Cartesian uses the closed-form
// Christoffel symbols of g; WarpedChart redoes everything in the cylinder-
// stereographic chart with finite-difference symbols.
enum class ShapeMode { Cartesian, WarpedChart };

struct ShapeOptions {
  ShapeMode mode = ShapeMode::Cartesian;
  MetricKind kind = MetricKind::g;  // WarpedChart supports g only
  double normal_step = 1e-5;        // FD step for the normal field, scaled
  double surface_tol = 1e-7;        // |F| gate for "on the surface"
};

ShapeReport shape_operator(const HypersurfaceSpec& spec, const CartesianPoint& z,
                           const ShapeOptions& opt = {});

// (max - min) of the principal values over 1 + max |principal|.
double umbilicity_residual(const ShapeReport& report);

// | g(V,Z) dkappa(U) - g(U,Z) dkappa(V) - R(N,Z,U,V) | with the kappa field
// differentiated along the surface (step h, Newton-projected back onto the
// level set) and R from the closed form. U, V, Z are coordinate tangent
// vectors at z.
double codazzi_residual(const HypersurfaceSpec& spec, const CartesianPoint& z,
                        const VectorXd& U, const VectorXd& V, const VectorXd& Z,
                        double step = 1e-4);

// true = obstructed: no umbilic hypersurface through pt can have this unit
// normal, i.e. N lies outside the degenerate-Weyl cone. Never obstructed
// for p = 2 (flat); DimensionTooSmall for p < 2.
bool cone_obstruction(const GrushinParams& par, const CylindricalPoint& pt,
                      const CylindricalVector& N);

// Deterministic on-surface sample cloud for a family member, avoiding the
// singular set and keeping r in a moderate band.
std::vector<CartesianPoint> sample_surface(const GrushinParams& par,
                                           const SurfaceFamily& family, int count,
                                           std::uint64_t seed);

struct ClassifiedFamily {
  SurfaceFamily family;
  double residual = 0.0;  // worst normalized level residual over the samples
};

// Checks the samples are umbilic points of spec's surface (InvalidInput
// otherwise), then fits A2, B, A1 in that order and returns the first family
// within tolerance, or the best one. ClassificationFailed when the samples
// are umbilic but no family fits within 1e-4.
ClassifiedFamily family_classifier(const HypersurfaceSpec& spec,
                                   const std::vector<CartesianPoint>& samples);

}  // namespace grushin
