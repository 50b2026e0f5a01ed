// SPDX-License-Identifier: Apache-2.0
#include <grushin/umbilic.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace grushin {

namespace {

VectorXd normalize_axis(VectorXd a, const char* what) {
  const double n = a.norm();
  if (n < 1e-12) throw InvalidInput(std::string(what) + ": zero axis");
  a /= n;
  // fix the sign so classification results are reproducible
  int lead = 0;
  for (int i = 1; i < a.size(); ++i)
    if (std::abs(a[i]) > std::abs(a[lead])) lead = i;
  if (a[lead] < 0.0) a = -a;
  return a;
}

double surface_scale(const CartesianPoint& z) {
  return 1.0 + z.x.squaredNorm() + z.y.squaredNorm();
}

void gate_on_surface(const HypersurfaceSpec& spec, const CartesianPoint& z, double tol) {
  if (std::abs(spec.F(z)) > tol * surface_scale(z))
    throw InvalidInput("point is not on the surface");
}

// G-orthonormal frame with `first` as its leading vector; coordinate axes
// complete it, dependent candidates skipped.
MatrixXd complete_frame(const MatrixXd& G, const VectorXd& first) {
  const int n = static_cast<int>(G.rows());
  MatrixXd frame(n, n);
  int have = 0;
  auto push = [&](VectorXd v) {
    for (int i = 0; i < have; ++i) v -= (frame.col(i).transpose() * G * v)(0) * frame.col(i);
    const double nn = std::sqrt(std::max(0.0, (v.transpose() * G * v)(0)));
    if (nn < 1e-8 * (1.0 + v.norm())) return false;
    frame.col(have++) = v / nn;
    return true;
  };
  push(first);
  for (int k = 0; k < n && have < n; ++k) push(VectorXd::Unit(n, k));
  if (have < n) throw DegenerateInput("complete_frame: could not span the tangent space");
  return frame;
}

VectorXd coords_of(const CartesianPoint& z) {
  VectorXd u(z.x.size() + z.y.size());
  u << z.x, z.y;
  return u;
}

CartesianPoint point_of(const GrushinParams& par, const VectorXd& u) {
  return {u.head(par.p), u.tail(par.q)};
}

// Shape operator core shared by both chart routes: inputs are a coordinate
// normal field, Christoffel symbols at the base point, and the metric there.
ShapeReport shape_from_parts(const CartesianPoint& base,
                             const std::function<VectorXd(const VectorXd&)>& normal,
                             const VectorXd& u0, const ChristoffelAt& gamma,
                             const MatrixXd& G, double step) {
  const int n = static_cast<int>(u0.size());
  const VectorXd N = normal(u0);

  MatrixXd dN(n, n);  // dN(a, k) = d N^a / d u^k
  for (int k = 0; k < n; ++k) {
    const double h = step * (1.0 + std::abs(u0[k]));
    VectorXd up = u0, dn = u0;
    up[k] += h;
    dn[k] -= h;
    dN.col(k) = (normal(up) - normal(dn)) / (2.0 * h);
  }

  const MatrixXd frame = complete_frame(G, N);
  const int m = n - 1;
  MatrixXd L(m, m);
  for (int j = 0; j < m; ++j) {
    const VectorXd T = frame.col(j + 1);
    VectorXd cov = dN * T;  // partial term
    for (int a = 0; a < n; ++a) cov[a] += T.dot(gamma[a] * N);
    const VectorXd minus_cov = -cov;
    for (int i = 0; i < m; ++i) L(i, j) = frame.col(i + 1).dot(G * minus_cov);
  }

  ShapeReport rep;
  rep.base = base;
  const double lscale = 1.0 + L.cwiseAbs().maxCoeff();
  rep.asymmetry = (L - L.transpose()).cwiseAbs().maxCoeff() / lscale;
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(0.5 * (L + L.transpose()));
  rep.principal = es.eigenvalues();
  rep.kappa = rep.principal.mean();
  return rep;
}

// Stereographic sphere point and embedding Jacobian for the warped chart.
VectorXd theta_of_sigma(const VectorXd& sigma) {
  const int p = static_cast<int>(sigma.size()) + 1;
  const double D = 1.0 + sigma.squaredNorm();
  VectorXd theta(p);
  theta.head(p - 1) = 2.0 * sigma / D;
  theta[p - 1] = (2.0 - D) / D;
  return theta;
}

}  // namespace

SurfaceFamily SurfaceFamily::sphere(VectorXd b, double c) {
  if (!(c > 0.0)) throw InvalidInput("SurfaceFamily::sphere: c must be positive");
  SurfaceFamily f;
  f.type = Type::A1;
  f.b = std::move(b);
  f.c = c;
  return f;
}

SurfaceFamily SurfaceFamily::y_plane(VectorXd a, double c) {
  SurfaceFamily f;
  f.type = Type::A2;
  f.a = normalize_axis(std::move(a), "SurfaceFamily::y_plane");
  f.c = c;
  return f;
}

SurfaceFamily SurfaceFamily::x_plane(VectorXd a) {
  SurfaceFamily f;
  f.type = Type::B;
  f.a = normalize_axis(std::move(a), "SurfaceFamily::x_plane");
  return f;
}

HypersurfaceSpec surface_of(const GrushinParams& par, const SurfaceFamily& family) {
  par.validate();
  HypersurfaceSpec spec;
  spec.params = par;
  const int p = par.p, q = par.q;
  const double a1 = par.alpha + 1.0;
  switch (family.type) {
    case SurfaceFamily::Type::A1: {
      if (family.b.size() != q) throw InvalidInput("surface_of: A1 offset size");
      const VectorXd b = family.b;
      const double c2 = family.c * family.c;
      spec.F = [b, c2, a1](const CartesianPoint& z) {
        return std::pow(z.x.squaredNorm(), a1) + (z.y - b).squaredNorm() - c2;
      };
      spec.grad = [b, a1, p, q](const CartesianPoint& z) {
        VectorXd g(p + q);
        const double x2 = z.x.squaredNorm();
        const double w = x2 > 0.0 ? std::pow(x2, a1 - 1.0) : (a1 == 1.0 ? 1.0 : 0.0);
        g.head(p) = 2.0 * a1 * w * z.x;
        g.tail(q) = 2.0 * (z.y - b);
        return g;
      };
      spec.orientation = -1.0;  // unit normal -(r d_r + (y - b) d_y)/c
      return spec;
    }
    case SurfaceFamily::Type::A2: {
      if (family.a.size() != q) throw InvalidInput("surface_of: A2 axis size");
      const VectorXd a = family.a;
      const double c = family.c;
      spec.F = [a, c](const CartesianPoint& z) { return a.dot(z.y) - c; };
      spec.grad = [a, p, q](const CartesianPoint& z) {
        (void)z;
        VectorXd g = VectorXd::Zero(p + q);
        g.tail(q) = a;
        return g;
      };
      return spec;
    }
    case SurfaceFamily::Type::B: {
      if (family.a.size() != p) throw InvalidInput("surface_of: B axis size");
      const VectorXd a = family.a;
      spec.F = [a](const CartesianPoint& z) { return a.dot(z.x); };
      spec.grad = [a, p, q](const CartesianPoint& z) {
        (void)z;
        VectorXd g = VectorXd::Zero(p + q);
        g.head(p) = a;
        return g;
      };
      return spec;
    }
  }
  throw InvalidInput("surface_of: unknown family");
}

HypersurfaceSpec pullback_spec(const HypersurfaceSpec& spec, const MapChain& f) {
  HypersurfaceSpec out;
  out.params = spec.params;
  out.orientation = spec.orientation;
  const HypersurfaceSpec base = spec;
  out.F = [base, f](const CartesianPoint& z) { return base.F(f.apply(z)); };
  out.grad = [base, f](const CartesianPoint& z) {
    return VectorXd(f.jacobian(z).transpose() * base.grad(f.apply(z)));
  };
  return out;
}

CartesianVector unit_normal(const HypersurfaceSpec& spec, const CartesianPoint& z,
                            MetricKind k) {
  const GrushinParams& par = spec.params;
  check_dims(par, z);
  gate_on_surface(spec, z, 1e-7);
  const VectorXd dF = spec.grad(z);
  if (dF.norm() < 1e-12) throw DegenerateGradient("unit_normal: vanishing gradient");
  const MatrixXd G = metric_cartesian(par, z, k);
  const VectorXd up = G.ldlt().solve(dF);
  const double len2 = dF.dot(up);
  if (!(len2 > 0.0)) throw DegenerateGradient("unit_normal: degenerate metric gradient");
  const VectorXd N = spec.orientation * up / std::sqrt(len2);
  CartesianVector v;
  v.base = z;
  v.dx = N.head(par.p);
  v.dy = N.tail(par.q);
  return v;
}

ShapeReport shape_operator(const HypersurfaceSpec& spec, const CartesianPoint& z,
                           const ShapeOptions& opt) {
  const GrushinParams& par = spec.params;
  check_dims(par, z);
  check_off_singular(z);
  gate_on_surface(spec, z, opt.surface_tol);
  if (spec.grad(z).norm() < 1e-12)
    throw DegenerateGradient("shape_operator: vanishing gradient");

  if (opt.mode == ShapeMode::Cartesian) {
    const HypersurfaceSpec s = spec;
    const MetricKind kind = opt.kind;
    auto normal = [s, kind](const VectorXd& u) {
      const GrushinParams& pp = s.params;
      const CartesianPoint w = point_of(pp, u);
      const VectorXd dF = s.grad(w);
      const MatrixXd G = metric_cartesian(pp, w, kind);
      const VectorXd up = G.ldlt().solve(dF);
      return VectorXd(s.orientation * up / std::sqrt(dF.dot(up)));
    };
    const ChristoffelAt gamma =
        opt.kind == MetricKind::g
            ? christoffel_closed(par, z)
            : christoffel_fd(GrushinCartesian(par, MetricKind::ghat), coords_of(z),
                             {1e-3, 4});
    return shape_from_parts(z, normal, coords_of(z), gamma,
                            metric_cartesian(par, z, opt.kind), opt.normal_step);
  }

  // Warped-chart route: everything recomputed in (r, y, sigma) coordinates
  // with finite-difference Christoffels of the warped metric.
  if (opt.kind != MetricKind::g)
    throw InvalidInput("shape_operator: warped chart supports the metric g only");
  const CylindricalPoint cyl = to_cylindrical(par, z);
  if (1.0 + cyl.theta[par.p - 1] < 0.1)
    throw InvalidInput("shape_operator: too close to the stereographic pole");
  const double D = 1.0 + cyl.theta[par.p - 1];
  VectorXd u0(par.n());
  u0[0] = cyl.r;
  u0.segment(1, par.q) = cyl.y;
  u0.tail(par.p - 1) = cyl.theta.head(par.p - 1) / D;

  const GrushinParams parc = par;
  auto embed = [parc](const VectorXd& u) {
    const int p = parc.p, q = parc.q;
    CartesianPoint z;
    const double rho = std::pow(u[0], 1.0 / (parc.alpha + 1.0));
    z.x = rho * theta_of_sigma(u.tail(p - 1));
    z.y = u.segment(1, q);
    return z;
  };
  auto embed_jacobian = [parc](const VectorXd& u) {
    const int p = parc.p, q = parc.q, n = p + q;
    const double a1 = parc.alpha + 1.0;
    const VectorXd sigma = u.tail(p - 1);
    const double rho = std::pow(u[0], 1.0 / a1);
    const VectorXd theta = theta_of_sigma(sigma);
    MatrixXd J = MatrixXd::Zero(n, n);
    J.col(0).head(p) = rho / (a1 * u[0]) * theta;
    J.block(p, 1, q, q).setIdentity();
    const double D = 1.0 + sigma.squaredNorm();
    for (int j = 0; j < p - 1; ++j) {
      VectorXd dth(p);
      dth.head(p - 1) = (2.0 / D) * (VectorXd::Unit(p - 1, j) - (2.0 * sigma[j] / D) * sigma);
      dth[p - 1] = -4.0 * sigma[j] / (D * D);
      J.col(1 + q + j).head(p) = rho * dth;
    }
    return J;
  };

  const GenericWarped W = GenericWarped::grushin(par);
  const HypersurfaceSpec s = spec;
  auto normal = [s, &W, embed, embed_jacobian](const VectorXd& u) {
    const VectorXd dFw = embed_jacobian(u).transpose() * s.grad(embed(u));
    const MatrixXd G = W.eval(u);
    const VectorXd up = G.ldlt().solve(dFw);
    return VectorXd(s.orientation * up / std::sqrt(dFw.dot(up)));
  };
  const ChristoffelAt gamma = christoffel_fd(W, u0, {1e-3, 4});
  return shape_from_parts(z, normal, u0, gamma, W.eval(u0), opt.normal_step);
}

double umbilicity_residual(const ShapeReport& report) {
  if (report.principal.size() == 0) return 0.0;
  const double spread = report.principal.maxCoeff() - report.principal.minCoeff();
  return spread / (1.0 + report.principal.cwiseAbs().maxCoeff());
}

double codazzi_residual(const HypersurfaceSpec& spec, const CartesianPoint& z,
                        const VectorXd& U, const VectorXd& V, const VectorXd& Z,
                        double step) {
  const GrushinParams& par = spec.params;
  check_dims(par, z);
  const VectorXd dF = spec.grad(z);
  for (const VectorXd* t : {&U, &V, &Z})
    if (std::abs(dF.dot(*t)) > 1e-6 * dF.norm() * (1.0 + t->norm()))
      throw InvalidInput("codazzi_residual: vector not tangent to the surface");

  const HypersurfaceSpec s = spec;
  auto project = [s](CartesianPoint w) {
    for (int it = 0; it < 3; ++it) {
      const VectorXd g = s.grad(w);
      const double g2 = g.squaredNorm();
      if (g2 < 1e-24) break;
      const double f = s.F(w);
      const VectorXd du = (f / g2) * g;
      w.x -= du.head(w.x.size());
      w.y -= du.tail(w.y.size());
    }
    return w;
  };
  auto kappa_at = [&](const CartesianPoint& w) {
    return shape_operator(spec, w).kappa;
  };
  auto dkappa = [&](const VectorXd& T) {
    CartesianPoint plus = z, minus = z;
    plus.x += step * T.head(par.p);
    plus.y += step * T.tail(par.q);
    minus.x -= step * T.head(par.p);
    minus.y -= step * T.tail(par.q);
    return (kappa_at(project(plus)) - kappa_at(project(minus))) / (2.0 * step);
  };

  const MatrixXd G = metric_cartesian(par, z, MetricKind::g);
  const double lhs = (V.transpose() * G * Z)(0) * dkappa(U) -
                     (U.transpose() * G * Z)(0) * dkappa(V);
  const CartesianVector Nv = unit_normal(spec, z);
  VectorXd N(par.n());
  N << Nv.dx, Nv.dy;
  const double rhs = riemann_closed_cartesian(par, z).contract(N, Z, U, V);
  return std::abs(lhs - rhs);
}

bool cone_obstruction(const GrushinParams& par, const CylindricalPoint& pt,
                      const CylindricalVector& N) {
  if (par.p < 2) throw DimensionTooSmall("cone_obstruction: needs p >= 2");
  if (par.p == 2) return false;  // flat: every normal is realizable
  return !cone_membership(par, pt, N).member;
}

std::vector<CartesianPoint> sample_surface(const GrushinParams& par,
                                           const SurfaceFamily& family, int count,
                                           std::uint64_t seed) {
  par.validate();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int p = par.p, q = par.q;
  const double a1 = par.alpha + 1.0;

  auto unit = [&](int d) {
    VectorXd v(d);
    double n = 0.0;
    do {
      for (int i = 0; i < d; ++i) v[i] = gauss(rng);
      n = v.norm();
    } while (n < 1e-6);
    return VectorXd(v / n);
  };

  std::vector<CartesianPoint> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    CartesianPoint z;
    switch (family.type) {
      case SurfaceFamily::Type::A1: {
        // r = c sin(psi), |y - b| = c |cos(psi)|; keep r away from 0
        const double psi = 0.3 + (M_PI - 0.6) * unif(rng);
        const double r = family.c * std::sin(psi);
        z.x = std::pow(r, 1.0 / a1) * unit(p);
        z.y = family.b + family.c * std::cos(psi) * unit(q);
        break;
      }
      case SurfaceFamily::Type::A2: {
        MatrixXd basis = sphere_tangent_basis(family.a);  // a-perp in R^q
        z.y = family.c * family.a;
        for (int j = 0; j < q - 1; ++j) z.y += (3.0 * unif(rng) - 1.5) * basis.col(j);
        const double r = 0.6 + 1.2 * unif(rng);
        z.x = std::pow(r, 1.0 / a1) * unit(p);
        break;
      }
      case SurfaceFamily::Type::B: {
        MatrixXd basis = sphere_tangent_basis(family.a);  // a-perp in R^p
        VectorXd dir = basis * unit(p - 1);
        z.x = (0.7 + 0.9 * unif(rng)) * dir;
        z.y = VectorXd(q);
        for (int j = 0; j < q; ++j) z.y[j] = 3.0 * unif(rng) - 1.5;
        break;
      }
    }
    out.push_back(std::move(z));
  }
  return out;
}

ClassifiedFamily family_classifier(const HypersurfaceSpec& spec,
                                   const std::vector<CartesianPoint>& samples) {
  const GrushinParams& par = spec.params;
  if (samples.size() < 4) throw InvalidInput("family_classifier: too few samples");
  for (const auto& z : samples) {
    const ShapeReport rep = shape_operator(spec, z);
    if (umbilicity_residual(rep) > 1e-6)
      throw InvalidInput("family_classifier: sample fails the umbilicity gate");
  }

  const int K = static_cast<int>(samples.size());
  const int p = par.p, q = par.q;
  const double a1 = par.alpha + 1.0;

  // A2: <a, y> = c via the smallest principal direction of the y covariance
  SurfaceFamily fa2;
  double res_a2 = std::numeric_limits<double>::infinity();
  {
    VectorXd mean = VectorXd::Zero(q);
    for (const auto& z : samples) mean += z.y;
    mean /= K;
    MatrixXd cov = MatrixXd::Zero(q, q);
    for (const auto& z : samples) cov += (z.y - mean) * (z.y - mean).transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(cov);
    const VectorXd a = normalize_axis(es.eigenvectors().col(0), "family_classifier");
    const double c = a.dot(mean);
    double worst = 0.0;
    for (const auto& z : samples) worst = std::max(worst, std::abs(a.dot(z.y) - c));
    fa2.type = SurfaceFamily::Type::A2;
    fa2.a = a;
    fa2.c = c;
    res_a2 = worst / (1.0 + std::abs(c));
  }

  // B: <a, x> = 0 via the smallest principal direction of sum x x^T
  SurfaceFamily fb;
  double res_b = std::numeric_limits<double>::infinity();
  if (p >= 2) {
    MatrixXd m = MatrixXd::Zero(p, p);
    double scale = 0.0;
    for (const auto& z : samples) {
      m += z.x * z.x.transpose();
      scale += z.x.norm();
    }
    scale /= K;
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(m);
    const VectorXd a = normalize_axis(es.eigenvectors().col(0), "family_classifier");
    double worst = 0.0;
    for (const auto& z : samples) worst = std::max(worst, std::abs(a.dot(z.x)));
    fb.type = SurfaceFamily::Type::B;
    fb.a = a;
    res_b = worst / (1.0 + scale);
  }

  // A1: w := |x|^(2(alpha+1)) + |y|^2 solves w = 2 <b, y> + (c^2 - |b|^2)
  SurfaceFamily fa1;
  double res_a1 = std::numeric_limits<double>::infinity();
  {
    MatrixXd D(K, q + 1);
    VectorXd rhs(K);
    for (int i = 0; i < K; ++i) {
      D.block(i, 0, 1, q) = 2.0 * samples[i].y.transpose();
      D(i, q) = 1.0;
      rhs[i] = std::pow(samples[i].x.squaredNorm(), a1) + samples[i].y.squaredNorm();
    }
    const VectorXd sol = D.colPivHouseholderQr().solve(rhs);
    const VectorXd b = sol.head(q);
    const double c2 = sol[q] + b.squaredNorm();
    if (c2 > 1e-12) {
      double worst = (D * sol - rhs).cwiseAbs().maxCoeff();
      fa1.type = SurfaceFamily::Type::A1;
      fa1.b = b;
      fa1.c = std::sqrt(c2);
      res_a1 = worst / (1.0 + c2);
    }
  }

  // smaller families first; a genuine plane should not be reported as a
  // huge near-degenerate sphere
  const std::pair<const SurfaceFamily*, double> ordered[] = {
      {&fa2, res_a2}, {&fb, res_b}, {&fa1, res_a1}};
  for (const auto& [fam, res] : ordered)
    if (res <= 1e-6) return {*fam, res};
  const auto* best = &ordered[0];
  for (const auto& cand : ordered)
    if (cand.second < best->second) best = &cand;
  if (best->second > 1e-4)
    throw ClassificationFailed(
        "family_classifier: umbilic samples fit no family (unexpected for p >= 3)");
  return {*best->first, best->second};
}

}  // namespace grushin
