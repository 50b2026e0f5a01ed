// SPDX-License-Identifier: Apache-2.0
#include <grushin/metric.hpp>

#include <Eigen/Dense>

#include <cmath>

namespace grushin {

namespace {

double scaled_step(double base, const VectorXd& u) { return base * (1.0 + u.norm()); }

// Central first-difference weights at unit step; order 2 or 4.
template <typename F>
auto central_diff(const F& f, double h, int order) -> decltype(f(0.0)) {
  if (order == 4)
    return (f(-2.0 * h) - 8.0 * f(-h) + 8.0 * f(h) - f(2.0 * h)) / (12.0 * h);
  return (f(h) - f(-h)) / (2.0 * h);
}

MatrixXd safe_inverse(const MatrixXd& g) {
  Eigen::FullPivLU<MatrixXd> lu(g);
  lu.setThreshold(1e-13);
  if (!lu.isInvertible()) throw SingularMetric("metric not invertible within tolerance");
  return lu.inverse();
}

}  // namespace

VectorXd ScalarField::gradient(const VectorXd& u) const {
  if (grad) return grad(u);
  const double h = scaled_step(fd_step, u);
  VectorXd g(u.size());
  for (int i = 0; i < u.size(); ++i) {
    VectorXd up = u, dn = u;
    up[i] += h;
    dn[i] -= h;
    g[i] = (value(up) - value(dn)) / (2.0 * h);
  }
  return g;
}

MatrixXd ScalarField::hessian(const VectorXd& u) const {
  if (hess) return hess(u);
  const double h = scaled_step(fd_step, u);
  const int n = static_cast<int>(u.size());
  MatrixXd H(n, n);
  const double u0 = value(u);
  for (int i = 0; i < n; ++i) {
    VectorXd up = u, dn = u;
    up[i] += h;
    dn[i] -= h;
    H(i, i) = (value(up) - 2.0 * u0 + value(dn)) / (h * h);
  }
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      VectorXd pp = u, pm = u, mp = u, mm = u;
      pp[i] += h; pp[j] += h;
      pm[i] += h; pm[j] -= h;
      mp[i] -= h; mp[j] += h;
      mm[i] -= h; mm[j] -= h;
      H(i, j) = H(j, i) =
          (value(pp) - value(pm) - value(mp) + value(mm)) / (4.0 * h * h);
    }
  return H;
}

MatrixXd GrushinCartesian::eval(const VectorXd& u) const {
  const int p = par_.p, q = par_.q;
  if (u.size() != p + q) throw DimensionMismatch("GrushinCartesian::eval");
  const double rho2 = u.head(p).squaredNorm();
  const double ap1 = par_.alpha + 1.0;
  MatrixXd g = MatrixXd::Zero(p + q, p + q);
  if (kind_ == MetricKind::g) {
    const double lam = ap1 * ap1 * std::pow(rho2, par_.alpha);
    g.topLeftCorner(p, p) = lam * MatrixXd::Identity(p, p);
    g.bottomRightCorner(q, q).setIdentity();
  } else {
    const double mu = std::pow(rho2, -par_.alpha) / (ap1 * ap1);
    g.topLeftCorner(p, p).setIdentity();
    g.bottomRightCorner(q, q) = mu * MatrixXd::Identity(q, q);
  }
  return g;
}

double GrushinCartesian::domain_clearance(const VectorXd& u) const {
  return u.head(par_.p).norm();
}

MatrixXd ConformalScaled::eval(const VectorXd& u) const {
  const double f = u_(u);
  if (!(f > 0.0)) throw NonpositiveFactor("ConformalScaled: factor must be positive");
  return base_->eval(u) / (f * f);
}

MatrixXd GenericWarped::eval(const VectorXd& u) const {
  if (u.size() != dim_h_ + dim_s_) throw DimensionMismatch("GenericWarped::eval");
  const double w = w_(u.head(dim_h_));
  if (!(w > 0.0)) throw NonpositiveFactor("GenericWarped: warp must be positive");
  const double c = 4.0 / std::pow(1.0 + u.tail(dim_s_).squaredNorm(), 2);
  MatrixXd g = MatrixXd::Identity(dim(), dim());
  g.bottomRightCorner(dim_s_, dim_s_) *= w * w * c;
  return g;
}

double GenericWarped::domain_clearance(const VectorXd& u) const {
  return w_(u.head(dim_h_));
}

GenericWarped GenericWarped::grushin(const GrushinParams& par) {
  const double ap1 = par.alpha + 1.0;
  ScalarField w;
  w.value = [ap1](const VectorXd& h) { return ap1 * h[0]; };
  w.grad = [ap1](const VectorXd& h) {
    VectorXd g = VectorXd::Zero(h.size());
    g[0] = ap1;
    return g;
  };
  w.hess = [](const VectorXd& h) {
    return MatrixXd::Zero(h.size(), h.size()).eval();
  };
  return GenericWarped(1 + par.q, par.p - 1, std::move(w));
}

MatrixXd metric_cartesian(const GrushinParams& par, const CartesianPoint& z, MetricKind k) {
  check_dims(par, z);
  check_off_singular(z);
  VectorXd u(par.n());
  u << z.x, z.y;
  return GrushinCartesian(par, k).eval(u);
}

MatrixXd metric_cylindrical(const GrushinParams& par, const CylindricalPoint& z, MetricKind k) {
  check_dims(par, z);
  const int p = par.p, q = par.q;
  const double ap1 = par.alpha + 1.0;
  MatrixXd g = MatrixXd::Zero(1 + q + p, 1 + q + p);
  const MatrixXd proj =
      MatrixXd::Identity(p, p) - z.theta * z.theta.transpose();
  if (k == MetricKind::g) {
    g(0, 0) = 1.0;
    g.block(1, 1, q, q).setIdentity();
    g.bottomRightCorner(p, p) = ap1 * ap1 * z.r * z.r * proj;
  } else {
    const double hfac = std::pow(z.r, -2.0 * par.alpha / (par.alpha + 1.0)) / (ap1 * ap1);
    g(0, 0) = hfac;
    g.block(1, 1, q, q) = hfac * MatrixXd::Identity(q, q);
    g.bottomRightCorner(p, p) = std::pow(z.r, 2.0 / (par.alpha + 1.0)) * proj;
  }
  return g;
}

double inner_cartesian(const GrushinParams& par, const CartesianVector& a,
                       const CartesianVector& b, MetricKind k) {
  if (!same_base(a.base, b.base, 1e-10))
    throw InvalidInput("inner_cartesian: vectors based at different points");
  const MatrixXd g = metric_cartesian(par, a.base, k);
  VectorXd va(par.n()), vb(par.n());
  va << a.dx, a.dy;
  vb << b.dx, b.dy;
  return va.dot(g * vb);
}

double inner_cylindrical(const GrushinParams& par, const CylindricalVector& a,
                         const CylindricalVector& b, MetricKind k) {
  if (!same_base(a.base, b.base, 1e-10))
    throw InvalidInput("inner_cylindrical: vectors based at different points");
  const MatrixXd g = metric_cylindrical(par, a.base, k);
  const int dim = 1 + par.q + par.p;
  VectorXd va(dim), vb(dim);
  va << a.dr, a.dy, a.dtheta;
  vb << b.dr, b.dy, b.dtheta;
  return va.dot(g * vb);
}

ChristoffelAt christoffel_fd(const CoordinateMetric& M, const VectorXd& u,
                             const FdOptions& opt) {
  const int n = M.dim();
  if (u.size() != n) throw DimensionMismatch("christoffel_fd");
  const double h = scaled_step(opt.step, u);
  const double reach = (opt.order == 4 ? 2.0 : 1.0) * h;
  if (M.domain_clearance(u) <= 4.0 * reach)
    throw StepTooLarge("christoffel_fd: stencil too close to the chart boundary");

  std::vector<MatrixXd> dg(n);
  for (int i = 0; i < n; ++i) {
    auto slice = [&](double t) {
      VectorXd v = u;
      v[i] += t;
      return M.eval(v);
    };
    dg[i] = central_diff(slice, h, opt.order);
  }
  const MatrixXd ginv = safe_inverse(M.eval(u));
  ChristoffelAt gamma(n, MatrixXd::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double acc = 0.0;
        for (int l = 0; l < n; ++l)
          acc += ginv(k, l) * (dg[i](j, l) + dg[j](i, l) - dg[l](i, j));
        gamma[k](i, j) = gamma[k](j, i) = 0.5 * acc;
      }
  return gamma;
}

CurvTensor4 riemann_fd(const CoordinateMetric& M, const VectorXd& u,
                       const FdOptions& opt) {
  const int n = M.dim();
  if (u.size() != n) throw DimensionMismatch("riemann_fd");
  const double h = scaled_step(opt.step, u);

  const ChristoffelAt gamma0 = christoffel_fd(M, u, opt);
  // dgamma[c][a](d, b) = partial_c Gamma^a_{db}
  std::vector<ChristoffelAt> dgamma(n);
  for (int c = 0; c < n; ++c) {
    auto slice = [&](double t) {
      VectorXd v = u;
      v[c] += t;
      ChristoffelAt ga = christoffel_fd(M, v, opt);
      // flatten so central_diff can do arithmetic on one object
      MatrixXd flat(n, n * n);
      for (int k = 0; k < n; ++k) flat.middleCols(k * n, n) = ga[k];
      return flat;
    };
    MatrixXd dflat = central_diff(slice, h, opt.order);
    dgamma[c].resize(n);
    for (int k = 0; k < n; ++k) dgamma[c][k] = dflat.middleCols(k * n, n);
  }

  const MatrixXd g0 = M.eval(u);
  CurvTensor4 R(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = c + 1; d < n; ++d) {
          // R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
          //            + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
          double up = dgamma[c][a](d, b) - dgamma[d][a](c, b);
          for (int e = 0; e < n; ++e)
            up += gamma0[a](c, e) * gamma0[e](d, b) -
                  gamma0[a](d, e) * gamma0[e](c, b);
          // store lowered on the fly below; keep R^a_{bcd} in a temp slot
          R.at(a, b, c, d) = up;
          R.at(a, b, d, c) = -up;
        }
  // lower the first index: R_{abcd} = g_{ae} R^e_{bcd}
  CurvTensor4 low(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c)
        for (int d = 0; d < n; ++d) {
          double acc = 0.0;
          for (int e = 0; e < n; ++e) acc += g0(a, e) * R.at(e, b, c, d);
          low.at(a, b, c, d) = acc;
        }
  return low;
}

MatrixXd ricci_fd(const CoordinateMetric& M, const VectorXd& u, const FdOptions& opt) {
  return ricci_from_riemann(riemann_fd(M, u, opt), M.eval(u));
}

double scalar_fd(const CoordinateMetric& M, const VectorXd& u, const FdOptions& opt) {
  return scalar_from_ricci(ricci_fd(M, u, opt), M.eval(u));
}

ChristoffelAt christoffel_closed(const GrushinParams& par, const CartesianPoint& z) {
  check_dims(par, z);
  check_off_singular(z);
  const int p = par.p, n = par.n();
  const double rho2 = z.x.squaredNorm();
  ChristoffelAt gamma(n, MatrixXd::Zero(n, n));
  for (int k = 0; k < p; ++k)
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) {
        double v = 0.0;
        if (i == k) v += z.x[j];
        if (j == k) v += z.x[i];
        if (i == j) v -= z.x[k];
        gamma[k](i, j) = par.alpha * v / rho2;
      }
  return gamma;
}

MatrixXd sigma_form_cartesian(const GrushinParams& par, const CartesianPoint& z) {
  check_dims(par, z);
  check_off_singular(z);
  const int p = par.p, n = par.n();
  const double rho2 = z.x.squaredNorm();
  const double ap1 = par.alpha + 1.0;
  const double lam = ap1 * ap1 * std::pow(rho2, par.alpha);
  const VectorXd theta = z.x / std::sqrt(rho2);
  MatrixXd s = MatrixXd::Zero(n, n);
  s.topLeftCorner(p, p) =
      lam * (MatrixXd::Identity(p, p) - theta * theta.transpose());
  return s;
}

double curvature_kappa(const GrushinParams& par, double r) {
  if (!(r > 0.0)) throw SingularChart("curvature_kappa: r must be positive");
  const double ap1 = par.alpha + 1.0;
  return par.alpha * (par.alpha + 2.0) / (ap1 * ap1 * r * r);
}

CurvTensor4 riemann_closed_cartesian(const GrushinParams& par, const CartesianPoint& z) {
  const MatrixXd s = sigma_form_cartesian(par, z);
  const double r = std::pow(z.x.norm(), par.alpha + 1.0);
  return kulkarni_nomizu(s, s).scaled(0.5 * curvature_kappa(par, r));
}

namespace {

// g(U_Sigma, V_Sigma) for cylinder vectors: only the dtheta parts enter.
double sigma_inner(const GrushinParams& par, const CylindricalPoint& z,
                   const CylindricalVector& a, const CylindricalVector& b) {
  const double ap1 = par.alpha + 1.0;
  const MatrixXd proj =
      MatrixXd::Identity(par.p, par.p) - z.theta * z.theta.transpose();
  return ap1 * ap1 * z.r * z.r * a.dtheta.dot(proj * b.dtheta);
}

}  // namespace

double riemann_closed(const GrushinParams& par, const CylindricalPoint& z,
                      const CylindricalVector& U, const CylindricalVector& V,
                      const CylindricalVector& X, const CylindricalVector& Y) {
  check_dims(par, z);
  for (const CylindricalVector* v : {&U, &V, &X, &Y})
    if (!same_base(v->base, z, 1e-10))
      throw InvalidInput("riemann_closed: vector based off the evaluation point");
  const double kappa = curvature_kappa(par, z.r);
  return -kappa * (sigma_inner(par, z, U, X) * sigma_inner(par, z, V, Y) -
                   sigma_inner(par, z, U, Y) * sigma_inner(par, z, V, X));
}

MatrixXd ricci_closed_cartesian(const GrushinParams& par, const CartesianPoint& z) {
  const MatrixXd s = sigma_form_cartesian(par, z);
  const double r = std::pow(z.x.norm(), par.alpha + 1.0);
  return -curvature_kappa(par, r) * (par.p - 2.0) * s;
}

std::pair<double, double> ricci_scal_closed(const GrushinParams& par,
                                            const CylindricalPoint& z,
                                            const CylindricalVector& U,
                                            const CylindricalVector& V) {
  check_dims(par, z);
  if (!same_base(U.base, z, 1e-10) || !same_base(V.base, z, 1e-10))
    throw InvalidInput("ricci_scal_closed: vector based off the evaluation point");
  const double kappa = curvature_kappa(par, z.r);
  const double ric = -kappa * (par.p - 2.0) * sigma_inner(par, z, U, V);
  return {ric, scal_closed(par, z.r)};
}

double scal_closed(const GrushinParams& par, double r) {
  return -curvature_kappa(par, r) * (par.p - 2.0) * (par.p - 1.0);
}

CurvTensor4 warped_riemann_closed(const GenericWarped& W, const VectorXd& u) {
  const int n = W.dim(), dh = W.dim_h(), ds = W.dim_s();
  if (u.size() != n) throw DimensionMismatch("warped_riemann_closed");
  const VectorXd h = u.head(dh);
  const double w = W.warp()(h);
  if (!(w > 0.0)) throw NonpositiveFactor("warped_riemann_closed: warp must be positive");
  const VectorXd gw = W.warp().gradient(h);
  const MatrixXd Hw = W.warp().hessian(h);

  const MatrixXd g = W.eval(u);
  MatrixXd s = MatrixXd::Zero(n, n);
  s.bottomRightCorner(ds, ds) = g.bottomRightCorner(ds, ds);
  MatrixXd hm = MatrixXd::Zero(n, n);
  hm.topLeftCorner(dh, dh) = Hw / w;

  const double B = (1.0 - gw.squaredNorm()) / (w * w);
  CurvTensor4 R = kulkarni_nomizu(hm, s);
  R.add_scaled(kulkarni_nomizu(s, s), -0.5 * B);
  return R;
}

double warped_curvature_closed(const GenericWarped& W, const VectorXd& u,
                               const VectorXd& v1, const VectorXd& v2,
                               const VectorXd& v3, const VectorXd& v4) {
  return warped_riemann_closed(W, u).contract(v1, v2, v3, v4);
}

HessLapResult hessian_laplacian_warped(const GrushinParams& par, const WarpedScalar& u,
                                       const CylindricalPoint& pt,
                                       const std::vector<CylindricalVector>& dirs) {
  check_dims(par, pt);
  const int p = par.p, q = par.q;
  const double ap1 = par.alpha + 1.0;
  const double r = pt.r;

  // --- H-factor derivatives (r, y) ---
  VectorXd hgrad(1 + q);
  MatrixXd hhess(1 + q, 1 + q);
  if (u.h_grad && u.h_hess) {
    hgrad = u.h_grad(pt);
    hhess = u.h_hess(pt);
  } else {
    ScalarField f;
    VectorXd base(1 + q);
    base[0] = r;
    base.tail(q) = pt.y;
    f.value = [&](const VectorXd& v) {
      CylindricalPoint zz = pt;
      zz.r = v[0];
      zz.y = v.tail(q);
      return u.value(zz);
    };
    f.fd_step = u.h_step;
    hgrad = f.gradient(base);
    hhess = f.hessian(base);
  }

  // --- sphere-factor derivatives via great circles ---
  const MatrixXd X = sphere_tangent_basis(pt.theta);  // p x (p-1), ambient orthonormal
  VectorXd su = VectorXd::Zero(p - 1);        // X_i u (unit-sphere scale)
  MatrixXd shess = MatrixXd::Zero(p - 1, p - 1);
  VectorXd mixed_r = VectorXd::Zero(p - 1);   // d_r (X_i u)
  MatrixXd mixed_y = MatrixXd::Zero(q, p - 1);
  if (!u.h_only) {
    const double hs = u.s_step;
    auto circ = [&](const CylindricalPoint& at, const VectorXd& dir, double t) {
      CylindricalPoint zz = at;
      zz.theta = std::cos(t) * at.theta + std::sin(t) * dir;
      return u.value(zz);
    };
    auto sphere_d1 = [&](const CylindricalPoint& at, const VectorXd& dir) {
      return (circ(at, dir, hs) - circ(at, dir, -hs)) / (2.0 * hs);
    };
    auto sphere_d2 = [&](const VectorXd& dir) {
      return (circ(pt, dir, hs) - 2.0 * u.value(pt) + circ(pt, dir, -hs)) / (hs * hs);
    };
    for (int i = 0; i < p - 1; ++i) su[i] = sphere_d1(pt, X.col(i));
    for (int i = 0; i < p - 1; ++i) shess(i, i) = sphere_d2(X.col(i));
    for (int i = 0; i < p - 1; ++i)
      for (int j = i + 1; j < p - 1; ++j) {
        const VectorXd mid = (X.col(i) + X.col(j)).normalized();
        shess(i, j) = shess(j, i) =
            0.5 * (2.0 * sphere_d2(mid) - shess(i, i) - shess(j, j));
      }
    // nested FD for mixed H-sphere second derivatives
    const double hr = std::max(u.h_step, 1e-4) * (1.0 + r);
    for (int i = 0; i < p - 1; ++i) {
      CylindricalPoint zp = pt, zm = pt;
      zp.r += hr;
      zm.r -= hr;
      mixed_r[i] = (sphere_d1(zp, X.col(i)) - sphere_d1(zm, X.col(i))) / (2.0 * hr);
      for (int l = 0; l < q; ++l) {
        CylindricalPoint yp = pt, ym = pt;
        yp.y[l] += hr;
        ym.y[l] -= hr;
        mixed_y(l, i) = (sphere_d1(yp, X.col(i)) - sphere_d1(ym, X.col(i))) / (2.0 * hr);
      }
    }
  }

  // --- assemble on the orthonormal frame (d_r, d_y, f_i = X_i/((a+1) r)) ---
  const int nf = 1 + q + (p - 1);
  MatrixXd Hf = MatrixXd::Zero(nf, nf);
  Hf.topLeftCorner(1 + q, 1 + q) = hhess;
  const double wr = ap1 * r;
  for (int i = 0; i < p - 1; ++i) {
    const int I = 1 + q + i;
    // Hess u(d_r, X) = d_r(X u) - (1/r) X u, then scale X -> f_i
    Hf(0, I) = Hf(I, 0) = (mixed_r[i] - su[i] / r) / wr;
    for (int l = 0; l < q; ++l) Hf(1 + l, I) = Hf(I, 1 + l) = mixed_y(l, i) / wr;
    for (int j = 0; j < p - 1; ++j) {
      const int J = 1 + q + j;
      // Hess u(X, X') = Hess_S u(X, X') + (u_r / r) g(X, X')
      Hf(I, J) = shess(i, j) / (wr * wr) + (i == j ? hgrad[0] / r : 0.0);
    }
  }

  HessLapResult out;
  out.laplacian = hhess(0, 0) + (p - 1.0) * hgrad[0] / r +
                  hhess.bottomRightCorner(q, q).trace() +
                  shess.trace() / (wr * wr);
  out.grad_sq = hgrad.squaredNorm() + su.squaredNorm() / (wr * wr);

  // express each requested direction in the orthonormal frame
  const int nd = static_cast<int>(dirs.size());
  MatrixXd comp(nf, nd);
  for (int d = 0; d < nd; ++d) {
    if (!same_base(dirs[d].base, pt, 1e-10))
      throw InvalidInput("hessian_laplacian_warped: direction based off pt");
    comp(0, d) = dirs[d].dr;
    comp.block(1, d, q, 1) = dirs[d].dy;
    for (int i = 0; i < p - 1; ++i)
      comp(1 + q + i, d) = wr * X.col(i).dot(dirs[d].dtheta);
  }
  out.hessian = comp.transpose() * Hf * comp;
  VectorXd gf(nf);
  gf.head(1 + q) = hgrad;
  for (int i = 0; i < p - 1; ++i) gf[1 + q + i] = su[i] / wr;
  out.gradient = comp.transpose() * gf;
  return out;
}

double grushin_laplacian(const GrushinParams& par, const ScalarField& u,
                         const CartesianPoint& z, double step) {
  check_dims(par, z);
  const int p = par.p, q = par.q;
  VectorXd v(par.n());
  v << z.x, z.y;
  double lap_x = 0.0, lap_y = 0.0;
  if (u.hess) {
    const MatrixXd H = u.hess(v);
    lap_x = H.topLeftCorner(p, p).trace();
    lap_y = H.bottomRightCorner(q, q).trace();
  } else {
    const double h = step * (1.0 + v.norm());
    const double u0 = u.value(v);
    auto d2 = [&](int i) {
      auto f = [&](double t) {
        VectorXd w = v;
        w[i] += t;
        return u.value(w);
      };
      // fourth-order second difference keeps truncation ~h^4
      return (-f(2.0 * h) + 16.0 * f(h) - 30.0 * u0 + 16.0 * f(-h) - f(-2.0 * h)) /
             (12.0 * h * h);
    };
    for (int i = 0; i < p; ++i) lap_x += d2(i);
    for (int i = p; i < p + q; ++i) lap_y += d2(i);
  }
  const double ap1 = par.alpha + 1.0;
  const double weight = ap1 * ap1 * std::pow(z.x.squaredNorm(), par.alpha);
  return lap_x + weight * lap_y;
}

double conformal_ricci_rhs(const GrushinParams& par, const ScalarField& u,
                           const CartesianPoint& z, const VectorXd& U,
                           const VectorXd& V) {
  check_dims(par, z);
  const int n = par.n();
  if (U.size() != n || V.size() != n) throw DimensionMismatch("conformal_ricci_rhs");
  VectorXd v(n);
  v << z.x, z.y;
  const double u0 = u.value(v);
  if (!(u0 > 0.0)) throw NonpositiveFactor("conformal_ricci_rhs: u must be positive");
  const VectorXd du = u.gradient(v);
  const MatrixXd d2u = u.hessian(v);

  const ChristoffelAt gamma = christoffel_closed(par, z);
  MatrixXd hess(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = d2u(i, j);
      for (int k = 0; k < n; ++k) acc -= gamma[k](i, j) * du[k];
      hess(i, j) = acc;
    }

  const MatrixXd g = metric_cartesian(par, z, MetricKind::g);
  const MatrixXd ginv = safe_inverse(g);
  const double grad_sq = du.dot(ginv * du);
  const double lap = (ginv * hess).trace();
  const MatrixXd ric = ricci_closed_cartesian(par, z);

  const double ricUV = U.dot(ric * V);
  const double hessUV = U.dot(hess * V);
  const double gUV = U.dot(g * V);
  return ricUV + (n - 2.0) * hessUV / u0 -
         ((n - 1.0) * grad_sq - u0 * lap) * gUV / (u0 * u0);
}

}  // namespace grushin
