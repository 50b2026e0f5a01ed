// SPDX-License-Identifier: Apache-2.0
#include <grushin/conformal.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>

namespace grushin {

namespace {

bool near_singular(const CartesianPoint& z) {
  return z.x.norm() < kSingularGuard * (1.0 + z.y.norm());
}

void check_orthogonal(const MatrixXd& A, const char* what) {
  const int n = static_cast<int>(A.rows());
  if (A.cols() != n) throw DimensionMismatch(what);
  if (n == 0) return;
  if ((A.transpose() * A - MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-10)
    throw InvalidInput(std::string(what) + ": matrix is not orthogonal");
}

}  // namespace

ElementaryMap ElementaryMap::isometry(MatrixXd A, MatrixXd B, VectorXd b) {
  check_orthogonal(A, "ElementaryMap::isometry A");
  check_orthogonal(B, "ElementaryMap::isometry B");
  if (b.size() != B.rows()) throw DimensionMismatch("ElementaryMap::isometry b");
  ElementaryMap m;
  m.kind = Kind::Isometry;
  m.A = std::move(A);
  m.B = std::move(B);
  m.b = std::move(b);
  return m;
}

ElementaryMap ElementaryMap::y_translation(VectorXd b) {
  const int q = static_cast<int>(b.size());
  return isometry(MatrixXd::Identity(0, 0), MatrixXd::Identity(q, q), std::move(b));
}

ElementaryMap ElementaryMap::dilation(double t) {
  if (!(t > 0.0)) throw InvalidInput("ElementaryMap::dilation: t must be positive");
  ElementaryMap m;
  m.kind = Kind::Dilation;
  m.t = t;
  return m;
}

ElementaryMap ElementaryMap::inversion() {
  ElementaryMap m;
  m.kind = Kind::Inversion;
  return m;
}

CartesianPoint apply_map(const GrushinParams& par, const ElementaryMap& m,
                         const CartesianPoint& z) {
  check_dims(par, z);
  switch (m.kind) {
    case ElementaryMap::Kind::Isometry: {
      if (m.A.size() && m.A.rows() != z.x.size())
        throw DimensionMismatch("apply_map: A vs x");
      if (m.B.rows() != z.y.size()) throw DimensionMismatch("apply_map: B vs y");
      // an empty A stands for the identity (y-translation shorthand)
      VectorXd x = m.A.size() ? VectorXd(m.A * z.x) : z.x;
      return {x, m.B * z.y + m.b};
    }
    case ElementaryMap::Kind::Dilation:
      return dilate(par, z, m.t);
    case ElementaryMap::Kind::Inversion: {
      const double S = std::pow(z.x.squaredNorm(), par.alpha + 1.0) + z.y.squaredNorm();
      if (!(S > 0.0)) throw DomainViolation("inversion undefined at the origin");
      return {z.x * std::pow(S, -1.0 / (par.alpha + 1.0)), z.y / S};
    }
  }
  throw InvalidInput("apply_map: unknown kind");
}

MatrixXd map_jacobian(const GrushinParams& par, const ElementaryMap& m,
                      const CartesianPoint& z) {
  check_dims(par, z);
  const int p = par.p, q = par.q, n = par.n();
  MatrixXd J = MatrixXd::Zero(n, n);
  switch (m.kind) {
    case ElementaryMap::Kind::Isometry:
      J.topLeftCorner(p, p) =
          m.A.size() ? m.A : MatrixXd::Identity(p, p);
      J.bottomRightCorner(q, q) = m.B;
      return J;
    case ElementaryMap::Kind::Dilation:
      J.topLeftCorner(p, p) = m.t * MatrixXd::Identity(p, p);
      J.bottomRightCorner(q, q) =
          std::pow(m.t, par.alpha + 1.0) * MatrixXd::Identity(q, q);
      return J;
    case ElementaryMap::Kind::Inversion: {
      const double a1 = par.alpha + 1.0;
      const double x2 = z.x.squaredNorm();
      const double S = std::pow(x2, a1) + z.y.squaredNorm();
      if (!(S > 0.0)) throw DomainViolation("inversion undefined at the origin");
      // |x|^(2 alpha) x is smooth for alpha >= 0 and vanishes at x = 0
      const double xw = x2 > 0.0 ? std::pow(x2, par.alpha) : (par.alpha == 0.0 ? 1.0 : 0.0);
      const VectorXd wx = xw * z.x;
      const double Sa = std::pow(S, -1.0 / a1);
      J.topLeftCorner(p, p) =
          Sa * (MatrixXd::Identity(p, p) - (2.0 / S) * wx * z.x.transpose());
      J.topRightCorner(p, q) = -(2.0 * Sa / (a1 * S)) * z.x * z.y.transpose();
      J.bottomLeftCorner(q, p) = -(2.0 * a1 / (S * S)) * z.y * wx.transpose();
      J.bottomRightCorner(q, q) =
          MatrixXd::Identity(q, q) / S - (2.0 / (S * S)) * z.y * z.y.transpose();
      return J;
    }
  }
  throw InvalidInput("map_jacobian: unknown kind");
}

double map_factor(const GrushinParams& par, const ElementaryMap& m,
                  const CartesianPoint& z, MetricKind k) {
  switch (m.kind) {
    case ElementaryMap::Kind::Isometry:
      return 1.0;
    case ElementaryMap::Kind::Dilation:
      return k == MetricKind::g ? std::pow(m.t, -(par.alpha + 1.0)) : 1.0 / m.t;
    case ElementaryMap::Kind::Inversion: {
      const double nz = homogeneous_norm(par, z);
      if (!(nz > 0.0)) throw DomainViolation("inversion undefined at the origin");
      return k == MetricKind::g ? std::pow(nz, 2.0 * (par.alpha + 1.0)) : nz * nz;
    }
  }
  throw InvalidInput("map_factor: unknown kind");
}

CartesianPoint MapChain::apply(const CartesianPoint& z) const {
  CartesianPoint w = z;
  for (const auto& m : maps_) w = apply_map(par_, m, w);
  return w;
}

MatrixXd MapChain::jacobian(const CartesianPoint& z) const {
  MatrixXd J = MatrixXd::Identity(par_.n(), par_.n());
  CartesianPoint w = z;
  for (const auto& m : maps_) {
    J = map_jacobian(par_, m, w) * J;
    w = apply_map(par_, m, w);
  }
  return J;
}

double MapChain::known_factor(const CartesianPoint& z, MetricKind k) const {
  double u = 1.0;
  CartesianPoint w = z;
  for (const auto& m : maps_) {
    u *= map_factor(par_, m, w, k);
    w = apply_map(par_, m, w);
  }
  return u;
}

std::pair<double, double> cr_residual(const MapChain& chain, const CartesianPoint& z,
                                      MetricKind k) {
  const GrushinParams& par = chain.params();
  check_dims(par, z);
  const int p = par.p, q = par.q, n = par.n();
  const MatrixXd J = chain.jacobian(z);
  const CartesianPoint w = chain.apply(z);

  MatrixXd Gp;  // Gram matrix of the pushed frame
  if (near_singular(z)) {
    // On {x = 0} only one block of either metric is honestly orthonormal:
    // the y-block for g, the x-block for ghat. Maps of the structure
    // preserve {x = 0} and the block splitting there.
    if (k == MetricKind::g) {
      const MatrixXd Jy = J.bottomRightCorner(q, q);
      Gp = Jy.transpose() * Jy;
    } else {
      const MatrixXd Jx = J.topLeftCorner(p, p);
      Gp = Jx.transpose() * Jx;
    }
  } else {
    const MatrixXd G = metric_cartesian(par, z, k);
    const MatrixXd E = gram_schmidt(G, MatrixXd::Identity(n, n));
    const MatrixXd Gw = metric_cartesian(par, w, k);
    const MatrixXd Ep = J * E;
    Gp = Ep.transpose() * Gw * Ep;
  }

  double logsum = 0.0;
  for (int i = 0; i < Gp.rows(); ++i) {
    if (!(Gp(i, i) > 0.0)) throw DegenerateInput("cr_residual: collapsed frame");
    logsum += std::log(Gp(i, i));
  }
  const double u_hat = std::exp(-0.5 * logsum / Gp.rows());
  const double scale = 1.0 / (u_hat * u_hat);
  const MatrixXd dev = Gp - scale * MatrixXd::Identity(Gp.rows(), Gp.cols());
  return {u_hat, dev.cwiseAbs().maxCoeff() / scale};
}

std::pair<double, double> cr_residual_hat(const MapChain& chain, const CartesianPoint& z) {
  return cr_residual(chain, z, MetricKind::ghat);
}

double ricci_preservation_residual(const GrushinParams& par, const SmoothMap& f,
                                   const CartesianPoint& z, const VectorXd& U,
                                   const VectorXd& V) {
  const MatrixXd ric0 = ricci_closed_cartesian(par, z);
  const CartesianPoint w = f.apply(z);
  const MatrixXd ric1 = ricci_closed_cartesian(par, w);
  const MatrixXd J = f.jacobian(z);
  const VectorXd Ju = J * U, Jv = J * V;
  return std::abs(Ju.dot(ric1 * Jv) - U.dot(ric0 * V));
}

CurvTensor4 adapted_riemann(int dim_h, int dim_s, double sect) {
  const int n = dim_h + dim_s;
  MatrixXd sv = MatrixXd::Zero(n, n);
  sv.bottomRightCorner(dim_s, dim_s).setIdentity();
  return kulkarni_nomizu(sv, sv).scaled(-0.5 * sect);
}

CurvTensor4 adapted_weyl(int dim_h, int dim_s, double sect) {
  const int n = dim_h + dim_s;
  const MatrixXd g = MatrixXd::Identity(n, n);
  const CurvTensor4 R = adapted_riemann(dim_h, dim_s, sect);
  const MatrixXd ric = ricci_from_riemann(R, g);
  return weyl_from_parts(R, ric, scalar_from_ricci(ric, g), g);
}

VectorXd adapted_components(const GrushinParams& par, const CylindricalVector& v,
                            const MatrixXd& sphere_basis) {
  const int q = par.q, p = par.p;
  VectorXd c(1 + q + (p - 1));
  c[0] = v.dr;
  c.segment(1, q) = v.dy;
  const double wr = (par.alpha + 1.0) * v.base.r;
  for (int i = 0; i < p - 1; ++i)
    c[1 + q + i] = wr * sphere_basis.col(i).dot(v.dtheta);
  return c;
}

namespace {

// Deterministic Step-1 witness for a mixed vector X (adapted orthonormal
// components, dim_h horizontal then dim_s vertical): pairwise-orthogonal
// (U, V, Z) all orthogonal to X with R(X, U, V, Z) = R(Xs, Xs_perp, Xs, Xs_perp).
struct Witness {
  bool ok = false;
  VectorXd U, V, Z;
};

Witness step1_witness(int dim_h, int dim_s, const VectorXd& X) {
  Witness w;
  if (dim_s < 2 || dim_h < 2) return w;
  const int n = dim_h + dim_s;
  VectorXd Xh = VectorXd::Zero(n), Xs = VectorXd::Zero(n);
  Xh.head(dim_h) = X.head(dim_h);
  Xs.tail(dim_s) = X.tail(dim_s);
  const double nh2 = Xh.squaredNorm(), ns2 = Xs.squaredNorm();
  if (nh2 < 1e-20 || ns2 < 1e-20) return w;
  // orthogonal companions inside each factor
  auto perp_in = [&](const VectorXd& v, int lo, int len) {
    VectorXd seed = VectorXd::Zero(n);
    int best = lo;
    for (int i = lo; i < lo + len; ++i)
      if (std::abs(v[i]) < std::abs(v[best])) best = i;
    seed[best] = 1.0;
    VectorXd u = seed - (seed.dot(v) / v.squaredNorm()) * v;
    return VectorXd(u / u.norm());
  };
  const VectorXd Xhp = perp_in(Xh, 0, dim_h);
  const VectorXd Xsp = perp_in(Xs, dim_h, dim_s);
  w.V = Xs - (ns2 / nh2) * Xh;
  w.U = Xsp + Xhp;
  w.Z = Xsp - Xhp;  // |Xsp| = |Xhp| = 1, so c2 = 1
  w.U /= w.U.norm();
  w.V /= w.V.norm();
  w.Z /= w.Z.norm();
  w.ok = true;
  return w;
}

ConeResult cone_search(int dim_h, int dim_s, double sect, const VectorXd& X,
                       const ConeOptions& opt) {
  const int n = dim_h + dim_s;
  ConeResult res;
  const CurvTensor4 W = adapted_weyl(dim_h, dim_s, sect);
  const double wnorm = W.max_abs();
  const VectorXd Xu = X / X.norm();
  double worst = 0.0;
  if (wnorm > 0.0) {
    const Witness det = step1_witness(dim_h, dim_s, Xu);
    if (det.ok)
      worst = std::abs(W.contract(Xu, det.U, det.V, det.Z)) / wnorm;
    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const MatrixXd gram = MatrixXd::Identity(n, n);
    for (int trial = 0; trial < opt.trials; ++trial) {
      MatrixXd cand(n, 4);
      cand.col(0) = Xu;
      for (int j = 1; j < 4; ++j)
        for (int i = 0; i < n; ++i) cand(i, j) = gauss(rng);
      MatrixXd on;
      try {
        on = gram_schmidt(gram, cand);
      } catch (const DegenerateInput&) {
        continue;  // astronomically unlikely; just redraw
      }
      const double val =
          std::abs(W.contract(Xu, on.col(1), on.col(2), on.col(3))) / wnorm;
      worst = std::max(worst, val);
    }
  }
  res.witness = worst;
  res.member = worst <= opt.weyl_tol;
  const double nh = X.head(dim_h).norm() / X.norm();
  const double ns = X.tail(dim_s).norm() / X.norm();
  res.part = ns <= opt.split_tol ? 'H' : (nh <= opt.split_tol ? 'S' : 'M');
  return res;
}

}  // namespace

ConeResult cone_membership_adapted(int dim_h, int dim_s, double sect,
                                   const VectorXd& X, const ConeOptions& opt) {
  if (X.size() != dim_h + dim_s) throw DimensionMismatch("cone_membership_adapted");
  if (!(X.norm() > 1e-14)) throw DegenerateInput("cone_membership_adapted: zero vector");
  if (opt.mode == ConeMode::WeylSearch) {
    if (dim_h + dim_s < 4) throw DimensionTooSmall("cone search needs n >= 4");
    return cone_search(dim_h, dim_s, sect, X, opt);
  }
  ConeResult res;
  if (sect == 0.0) {
    // Curvature-free model: the cone is the whole tangent space.
    res.member = true;
    res.part = 'A';
    return res;
  }
  const double nh = X.head(dim_h).norm() / X.norm();
  const double ns = X.tail(dim_s).norm() / X.norm();
  res.witness = std::min(nh, ns);
  res.member = res.witness <= opt.split_tol;
  res.part = ns <= opt.split_tol ? 'H' : (nh <= opt.split_tol ? 'S' : 'M');
  return res;
}

ConeResult cone_membership(const GrushinParams& par, const CylindricalPoint& pt,
                           const CylindricalVector& X, const ConeOptions& opt) {
  check_dims(par, pt);
  if (!same_base(X.base, pt, 1e-10))
    throw InvalidInput("cone_membership: vector based off pt");
  if (par.p == 2) {
    // flat: the degenerate-Weyl cone is the whole tangent space
    ConeResult res;
    res.member = true;
    res.part = 'A';
    res.witness = 0.0;
    return res;
  }
  const MatrixXd basis = sphere_tangent_basis(pt.theta);
  const VectorXd Xa = adapted_components(par, X, basis);
  const double sect = -curvature_kappa(par, pt.r);
  return cone_membership_adapted(1 + par.q, par.p - 1, sect, Xa, opt);
}

ConePattern cone_invariance_check(const MapChain& chain, const CartesianPoint& z) {
  const GrushinParams& par = chain.params();
  const CylindricalPoint cyl = to_cylindrical(par, z);
  const MatrixXd basis = sphere_tangent_basis(cyl.theta);
  const int p = par.p, q = par.q;

  const CartesianPoint w = chain.apply(z);
  const MatrixXd J = chain.jacobian(z);

  std::vector<std::pair<char, CylindricalVector>> gens;
  auto mk = [&](double dr, int yidx, int sidx) {
    CylindricalVector v;
    v.base = cyl;
    v.dr = dr;
    v.dy = VectorXd::Zero(q);
    if (yidx >= 0) v.dy[yidx] = 1.0;
    v.dtheta = VectorXd::Zero(p);
    if (sidx >= 0) v.dtheta = basis.col(sidx) / ((par.alpha + 1.0) * cyl.r);
    return v;
  };
  gens.emplace_back('H', mk(1.0, -1, -1));
  for (int l = 0; l < q; ++l) gens.emplace_back('H', mk(0.0, l, -1));
  for (int i = 0; i < p - 1; ++i) gens.emplace_back('S', mk(0.0, -1, i));

  double res1 = 0.0, res2 = 0.0;  // contamination for identity / swap pattern
  for (const auto& [type, gen] : gens) {
    CartesianVector cart = chart_pushforward(par, gen);
    VectorXd vc(p + q);
    vc << cart.dx, cart.dy;
    const VectorXd im = J * vc;
    CartesianVector imv;
    imv.base = w;
    imv.dx = im.head(p);
    imv.dy = im.tail(q);
    const TangentSplit sp = split_tangent(par, imv);
    const double nh = std::sqrt(std::max(
        0.0, inner_cylindrical(par, sp.horizontal, sp.horizontal, MetricKind::g)));
    const double ns = std::sqrt(std::max(
        0.0, inner_cylindrical(par, sp.spherical, sp.spherical, MetricKind::g)));
    const double tot = std::hypot(nh, ns);
    const double frac_h = nh / tot, frac_s = ns / tot;
    if (type == 'H') {
      res1 = std::max(res1, frac_s);
      res2 = std::max(res2, frac_h);
    } else {
      res1 = std::max(res1, frac_h);
      res2 = std::max(res2, frac_s);
    }
  }
  ConePattern out;
  const bool swap_ok = (p - 1) == (q + 1);
  if (swap_ok && res2 < res1) {
    out.pattern = 2;
    out.residual = res2;
  } else {
    out.pattern = 1;
    out.residual = res1;
  }
  return out;
}

double ConformalFactorModel::value(double r, const VectorXd& y) const {
  return 0.5 * H * (r * r + y.squaredNorm()) + L * r + M.dot(y) + N;
}

WarpedScalar ConformalFactorModel::as_warped() const {
  WarpedScalar f;
  const ConformalFactorModel m = *this;
  f.value = [m](const CylindricalPoint& z) { return m.value(z.r, z.y); };
  f.h_grad = [m](const CylindricalPoint& z) {
    VectorXd g(1 + m.M.size());
    g[0] = m.H * z.r + m.L;
    g.tail(m.M.size()) = m.H * z.y + m.M;
    return g;
  };
  f.h_hess = [m](const CylindricalPoint& z) {
    const int d = 1 + static_cast<int>(m.M.size());
    (void)z;
    return MatrixXd(m.H * MatrixXd::Identity(d, d));
  };
  f.h_only = true;
  return f;
}

ConformalFactorModel model_from_chain(const MapChain& chain,
                                      const CylindricalPoint& around) {
  const GrushinParams& par = chain.params();
  check_dims(par, around);
  const int q = par.q;
  // deterministic sample cloud in (r, y) around the base point
  std::vector<CylindricalPoint> pts;
  const double dr[] = {1.0, 0.8, 1.25, 1.1};
  for (double f : dr) {
    CylindricalPoint z = around;
    z.r *= f;
    pts.push_back(z);
  }
  for (int l = 0; l < q; ++l)
    for (double off : {0.35, -0.3}) {
      CylindricalPoint z = around;
      z.y[l] += off;
      pts.push_back(z);
    }
  {
    CylindricalPoint z = around;
    z.r *= 0.9;
    z.y.array() += 0.15;
    pts.push_back(z);
  }

  const int K = static_cast<int>(pts.size());
  MatrixXd D(K, 3 + q);
  VectorXd rhs(K);
  for (int i = 0; i < K; ++i) {
    const auto& z = pts[i];
    D(i, 0) = 0.5 * (z.r * z.r + z.y.squaredNorm());
    D(i, 1) = z.r;
    D.block(i, 2, 1, q) = z.y.transpose();
    D(i, 2 + q) = 1.0;
    rhs[i] = chain.known_factor(to_cartesian(par, z), MetricKind::g);
  }
  const VectorXd sol = D.colPivHouseholderQr().solve(rhs);
  const double resid = (D * sol - rhs).cwiseAbs().maxCoeff();
  if (resid > 1e-8 * std::max(1.0, rhs.cwiseAbs().maxCoeff()))
    throw FitFailed("model_from_chain: factor is not of the quadratic form");
  ConformalFactorModel m;
  m.H = sol[0];
  m.L = sol[1];
  m.M = sol.segment(2, q);
  m.N = sol[2 + q];
  return m;
}

std::pair<double, double> factor_pde_residual(const GrushinParams& par,
                                              const WarpedScalar& u,
                                              const CylindricalPoint& pt) {
  check_dims(par, pt);
  const int p = par.p, q = par.q, n = par.n();
  const double u0 = u.value(pt);
  if (!(u0 > 0.0)) throw NonpositiveFactor("factor_pde_residual: u must be positive");

  // orthonormal frame (d_r, d_y, sphere)
  const MatrixXd basis = sphere_tangent_basis(pt.theta);
  std::vector<CylindricalVector> dirs;
  for (int i = 0; i < n; ++i) {
    CylindricalVector v;
    v.base = pt;
    v.dr = i == 0 ? 1.0 : 0.0;
    v.dy = VectorXd::Zero(q);
    if (i >= 1 && i <= q) v.dy[i - 1] = 1.0;
    v.dtheta = VectorXd::Zero(p);
    if (i > q) v.dtheta = basis.col(i - q - 1) / ((par.alpha + 1.0) * pt.r);
    dirs.push_back(v);
  }
  const HessLapResult h = hessian_laplacian_warped(par, u, pt, dirs);

  const MatrixXd A = (n - 2.0) / u0 * h.hessian;
  const double c = ((n - 1.0) * h.grad_sq - u0 * h.laplacian) / (u0 * u0);
  const MatrixXd dev = A - c * MatrixXd::Identity(n, n);
  const double full_den =
      std::max({1.0, A.cwiseAbs().maxCoeff(), std::abs(c)});
  const double full = dev.cwiseAbs().maxCoeff() / full_den;

  const double lhs = 2.0 * u0 * h.laplacian;
  const double rhs = n * h.grad_sq;
  const double trace_den = std::max({1.0, std::abs(lhs), std::abs(rhs)});
  const double trace = std::abs(lhs - rhs) / trace_den;
  return {full, trace};
}

std::pair<double, double> factor_pde_residual(const GrushinParams& par,
                                              const ConformalFactorModel& u,
                                              const CylindricalPoint& pt) {
  return factor_pde_residual(par, u.as_warped(), pt);
}

std::pair<double, double> factor_pde_residual(const GrushinParams& par,
                                              const MapChain& chain,
                                              const CylindricalPoint& pt) {
  (void)par;
  return factor_pde_residual(chain.params(), model_from_chain(chain, pt), pt);
}

namespace {

struct AffineFit {
  MatrixXd Mx;  // p x p, no offset
  MatrixXd My;  // q x q
  VectorXd v;   // y offset
  double residual = 0.0;
};

AffineFit affine_fit(const GrushinParams& par, const std::vector<SamplePair>& samples) {
  const int p = par.p, q = par.q;
  const int K = static_cast<int>(samples.size());
  MatrixXd Xin(K, p), Xout(K, p), Yin(K, q + 1), Yout(K, q);
  for (int i = 0; i < K; ++i) {
    Xin.row(i) = samples[i].first.x.transpose();
    Xout.row(i) = samples[i].second.x.transpose();
    Yin.block(i, 0, 1, q) = samples[i].first.y.transpose();
    Yin(i, q) = 1.0;
    Yout.row(i) = samples[i].second.y.transpose();
  }
  AffineFit fit;
  fit.Mx = Xin.colPivHouseholderQr().solve(Xout).transpose();
  const MatrixXd Ys = Yin.colPivHouseholderQr().solve(Yout);
  fit.My = Ys.topRows(q).transpose();
  fit.v = Ys.row(q).transpose();
  double worst = 0.0;
  for (int i = 0; i < K; ++i) {
    const VectorXd ex = fit.Mx * samples[i].first.x - samples[i].second.x;
    const VectorXd ey = fit.My * samples[i].first.y + fit.v - samples[i].second.y;
    const double scale = 1.0 + samples[i].second.x.norm() + samples[i].second.y.norm();
    worst = std::max(worst, std::sqrt(ex.squaredNorm() + ey.squaredNorm()) / scale);
  }
  fit.residual = worst;
  return fit;
}

// residual of the s = -2 ansatz for a given pre-translation b
double inversion_residual(const GrushinParams& par, const std::vector<SamplePair>& samples,
                          const VectorXd& b, AffineFit* out) {
  std::vector<SamplePair> moved;
  moved.reserve(samples.size());
  const ElementaryMap inv = ElementaryMap::inversion();
  for (const auto& [zin, zout] : samples) {
    CartesianPoint shifted{zin.x, zin.y - b};
    const double S =
        std::pow(shifted.x.squaredNorm(), par.alpha + 1.0) + shifted.y.squaredNorm();
    if (S < 1e-12) return 1e6;  // pole inside the sample cloud: hopeless b
    moved.emplace_back(apply_map(par, inv, shifted), zout);
  }
  AffineFit f = affine_fit(par, moved);
  if (out) *out = f;
  return f.residual;
}

VectorXd nelder_mead(const std::function<double(const VectorXd&)>& f, VectorXd start,
                     double scale, int iters) {
  const int d = static_cast<int>(start.size());
  std::vector<VectorXd> xs(d + 1, start);
  std::vector<double> fs(d + 1);
  for (int i = 0; i < d; ++i) xs[i + 1][i] += scale;
  for (int i = 0; i <= d; ++i) fs[i] = f(xs[i]);
  for (int it = 0; it < iters; ++it) {
    // order
    std::vector<int> idx(d + 1);
    for (int i = 0; i <= d; ++i) idx[i] = i;
    std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fs[a] < fs[b]; });
    std::vector<VectorXd> xs2(d + 1);
    std::vector<double> fs2(d + 1);
    for (int i = 0; i <= d; ++i) {
      xs2[i] = xs[idx[i]];
      fs2[i] = fs[idx[i]];
    }
    xs = xs2;
    fs = fs2;
    if ((xs[d] - xs[0]).norm() < 1e-12 && std::abs(fs[d] - fs[0]) < 1e-15) break;
    VectorXd centroid = VectorXd::Zero(d);
    for (int i = 0; i < d; ++i) centroid += xs[i];
    centroid /= d;
    const VectorXd refl = centroid + (centroid - xs[d]);
    const double fr = f(refl);
    if (fr < fs[0]) {
      const VectorXd exp_ = centroid + 2.0 * (centroid - xs[d]);
      const double fe = f(exp_);
      if (fe < fr) {
        xs[d] = exp_;
        fs[d] = fe;
      } else {
        xs[d] = refl;
        fs[d] = fr;
      }
    } else if (fr < fs[d - 1]) {
      xs[d] = refl;
      fs[d] = fr;
    } else {
      const VectorXd con = centroid + 0.5 * (xs[d] - centroid);
      const double fc = f(con);
      if (fc < fs[d]) {
        xs[d] = con;
        fs[d] = fc;
      } else {
        for (int i = 1; i <= d; ++i) {
          xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
          fs[i] = f(xs[i]);
        }
      }
    }
  }
  int best = 0;
  for (int i = 1; i <= d; ++i)
    if (fs[i] < fs[best]) best = i;
  return xs[best];
}

}  // namespace

MapChain ClassificationFit::as_chain(const GrushinParams& par) const {
  std::vector<ElementaryMap> maps;
  if (s == -2) {
    maps.push_back(ElementaryMap::y_translation(-b));
    maps.push_back(ElementaryMap::inversion());
  }
  maps.push_back(ElementaryMap::dilation(t));
  maps.push_back(ElementaryMap::isometry(A, B, v));
  return MapChain(par, std::move(maps));
}

ClassificationFit fit_classification(const GrushinParams& par,
                                     const std::vector<SamplePair>& samples,
                                     std::uint64_t seed) {
  const int p = par.p, q = par.q;
  const int need = p * p + q * q + q + 3;
  if (static_cast<int>(samples.size()) < need)
    throw InvalidInput("fit_classification: not enough samples");

  const AffineFit direct = affine_fit(par, samples);

  // s = -2 branch: optimize the pre-translation b
  VectorXd ymean = VectorXd::Zero(q);
  for (const auto& s : samples) ymean += s.first.y;
  ymean /= static_cast<double>(samples.size());
  auto objective = [&](const VectorXd& b) {
    return inversion_residual(par, samples, b, nullptr);
  };
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<VectorXd> starts{VectorXd::Zero(q), ymean};
  for (int k = 0; k < 3; ++k) {
    VectorXd s0 = ymean;
    for (int i = 0; i < q; ++i) s0[i] += gauss(rng);
    starts.push_back(s0);
  }
  VectorXd best_b = starts[0];
  double best_res = objective(best_b);
  for (const auto& s0 : starts) {
    const VectorXd b1 = nelder_mead(objective, s0, 0.5, 400);
    const VectorXd b2 = nelder_mead(objective, b1, 1e-4, 200);  // polish
    const double r2 = objective(b2);
    if (r2 < best_res) {
      best_res = r2;
      best_b = b2;
    }
  }

  AffineFit inv_fit;
  const double res_inv = inversion_residual(par, samples, best_b, &inv_fit);

  ClassificationFit out;
  const bool use_inv = res_inv < direct.residual;
  const AffineFit& f = use_inv ? inv_fit : direct;
  out.s = use_inv ? -2 : 0;
  out.b = use_inv ? best_b : VectorXd::Zero(q);

  // polar extraction: Mx = t A,  My = t^(alpha+1) B
  Eigen::JacobiSVD<MatrixXd> svx(f.Mx, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.A = svx.matrixU() * svx.matrixV().transpose();
  const double tx = svx.singularValues().mean();
  Eigen::JacobiSVD<MatrixXd> svy(f.My, Eigen::ComputeFullU | Eigen::ComputeFullV);
  out.B = svy.matrixU() * svy.matrixV().transpose();
  const double ty = std::pow(svy.singularValues().mean(), 1.0 / (par.alpha + 1.0));
  out.t = 0.5 * (tx + ty);
  out.v = f.v;

  const MapChain chain = out.as_chain(par);
  double worst = 0.0;
  for (const auto& [zin, zout] : samples) {
    const CartesianPoint pred = chain.apply(zin);
    const double scale = 1.0 + zout.x.norm() + zout.y.norm();
    worst = std::max(worst, std::sqrt((pred.x - zout.x).squaredNorm() +
                                      (pred.y - zout.y).squaredNorm()) /
                                scale);
  }
  out.fit_residual = worst;
  if (out.fit_residual > 1e-4)
    throw FitFailed("fit_classification: samples do not match the classification form");
  return out;
}

double weyl_sectional_ratio(const GrushinParams& par, const CylindricalPoint& pt,
                            const CylindricalVector& X, const CylindricalVector& Y) {
  check_dims(par, pt);
  if (par.p < 3) throw DimensionTooSmall("weyl_sectional_ratio: need p >= 3");
  const MatrixXd basis = sphere_tangent_basis(pt.theta);
  const VectorXd Xa = adapted_components(par, X, basis);
  const VectorXd Ya = adapted_components(par, Y, basis);
  const int dh = 1 + par.q, ds = par.p - 1;
  if (Xa.head(dh).norm() > 1e-8 * Xa.norm() || Ya.head(dh).norm() > 1e-8 * Ya.norm())
    throw InvalidInput("weyl_sectional_ratio: vectors must be sphere vectors");
  if (std::abs(Xa.dot(Ya)) > 1e-8 * Xa.norm() * Ya.norm())
    throw InvalidInput("weyl_sectional_ratio: vectors must be g-orthogonal");
  const CurvTensor4 W = adapted_weyl(dh, ds, -curvature_kappa(par, pt.r));
  return W.contract(Xa, Ya, Xa, Ya) / (Xa.squaredNorm() * Ya.squaredNorm());
}

}  // namespace grushin
