// SPDX-License-Identifier: Apache-2.0
//
// The verification suites. Every check pits a closed form against an
// independent route (finite differences, random search, direct
// optimization) and appends one record. Residual conventions:
//   - equality claims: scale-normalized worst deviation over the samples;
//   - "at least" claims: shortfall below the floor, so 0 means the
//     measured effect clears the floor;
//   - set/fraction claims: fraction of draws violating, tolerance 0.

#include <grushin/suites.hpp>

#include <grushin/conformal.hpp>
#include <grushin/distance.hpp>
#include <grushin/metric.hpp>
#include <grushin/umbilic.hpp>

#include <Eigen/LU>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace grushin {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One generator per (seed, stream, index); scheduling order never touches it.
std::mt19937_64 rng_at(std::uint64_t seed, std::uint64_t stream, int index) {
  return std::mt19937_64(
      splitmix64(splitmix64(seed ^ stream) + static_cast<std::uint64_t>(index)));
}

VectorXd gaussian(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> nd;
  VectorXd v(dim);
  for (int i = 0; i < dim; ++i) v[i] = nd(rng);
  return v;
}

VectorXd unit_vec(std::mt19937_64& rng, int dim) {
  VectorXd v;
  do {
    v = gaussian(rng, dim);
  } while (v.norm() < 1e-8);
  return v / v.norm();
}

MatrixXd random_orthogonal(std::mt19937_64& rng, int dim) {
  if (dim == 0) return MatrixXd(0, 0);
  MatrixXd A(dim, dim);
  for (int i = 0; i < dim; ++i) A.col(i) = gaussian(rng, dim);
  Eigen::HouseholderQR<MatrixXd> qr(A);
  MatrixXd Q = qr.householderQ();
  // Fix the column signs so the draw depends only on the rng stream.
  MatrixXd R = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < dim; ++i)
    if (R(i, i) < 0) Q.col(i) = -Q.col(i);
  return Q;
}

// 0 when measured clears the floor, the relative shortfall otherwise.
double shortfall(double measured, double floor) {
  if (measured >= floor) return 0.0;
  return (floor - measured) / floor;
}

double vec_max(const std::vector<double>& vals) {
  double m = 0.0;
  for (double v : vals)
    if (std::isnan(v)) return v;
  for (double v : vals) m = std::max(m, v);
  return m;
}

struct Ctx {
  const SuiteConfig& cfg;
  SuiteReport& rep;

  double tol(const std::string& id, double base) const {
    auto it = cfg.tol_override.find(id);
    if (it != cfg.tol_override.end()) return it->second;
    return base * cfg.tol_scale;
  }

  std::string repro(const std::string& suite) const {
    std::ostringstream os;
    os << "verify --suite " << suite << " --p " << cfg.params.p << " --q "
       << cfg.params.q << " --alpha " << cfg.params.alpha << " --seed "
       << cfg.seed << " --points " << cfg.points;
    return os.str();
  }

  std::string digest(const std::string& id) const {
    DigestBuilder d;
    d.add(id)
        .add(cfg.params.p)
        .add(cfg.params.q)
        .add(cfg.params.alpha)
        .add(cfg.seed)
        .add(cfg.points);
    return d.hex();
  }

  void add(const std::string& suite, const std::string& id, const std::string& anchor,
           double residual, double base_tol, const std::string& note = "") {
    CheckRecord rec;
    rec.suite = suite;
    rec.check_id = id;
    rec.anchor = anchor;
    rec.inputs_digest = digest(id);
    rec.residual = residual;
    rec.tolerance = tol(id, base_tol);
    rec.status = residual <= rec.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
    if (rec.status == CheckStatus::Fail) rec.repro = repro(suite);
    rec.note = note;
    rep.records.push_back(std::move(rec));
  }

  void skip(const std::string& suite, const std::string& id, const std::string& anchor,
            const std::string& note) {
    CheckRecord rec;
    rec.suite = suite;
    rec.check_id = id;
    rec.anchor = anchor;
    rec.inputs_digest = digest(id);
    rec.status = CheckStatus::Skip;
    rec.note = note;
    rep.records.push_back(std::move(rec));
  }

  // Deterministic max over an indexed family, evaluated by the pool.
  double max_over(int count, const std::function<double(int)>& f) const {
    std::vector<double> vals(static_cast<size_t>(std::max(count, 0)), 0.0);
    parallel_for(count, cfg.jobs, [&](int i) { vals[static_cast<size_t>(i)] = f(i); });
    return vec_max(vals);
  }
};

// A crash in one check must not take down the suite; it becomes a FAIL
// record with the exception text.
void guarded(Ctx& ctx, const std::string& suite, const std::string& id,
             const std::string& anchor, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    ctx.add(suite, id, anchor, kInf, 0.0, std::string("exception: ") + e.what());
  }
}

VectorXd coords_of(const CartesianPoint& z) {
  VectorXd u(z.x.size() + z.y.size());
  u << z.x, z.y;
  return u;
}

// ---------------------------------------------------------------------------
// curvature

constexpr const char* kAnchorGamma =
    "Gamma^k_ij = alpha |x|^-2 (d_ik x_j + d_jk x_i - d_ij x_k) on the x-block";
constexpr const char* kAnchorRiemann = "R = (kappa/2) s . s, kappa = alpha(alpha+2)/((alpha+1)^2 r^2)";
constexpr const char* kAnchorRicci = "Ric = -kappa (p-2) s";
constexpr const char* kAnchorScal = "Scal = -kappa (p-2)(p-1)";

void suite_curvature(Ctx& ctx, const std::vector<CylindricalPoint>& pts) {
  const char* S = "curvature";
  const GrushinParams par = ctx.cfg.params;
  const int N = static_cast<int>(pts.size());
  GrushinCartesian Mg(par, MetricKind::g);

  guarded(ctx, S, "christoffel_fd_vs_closed", kAnchorGamma, [&] {
    double r = ctx.max_over(N, [&](int i) {
      CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>(i)]);
      ChristoffelAt fd = christoffel_fd(Mg, coords_of(z), FdOptions{1e-4, 2});
      ChristoffelAt cl = christoffel_closed(par, z);
      double diff = 0.0, scale = 0.0;
      for (int k = 0; k < par.n(); ++k) {
        diff = std::max(diff, (fd[static_cast<size_t>(k)] - cl[static_cast<size_t>(k)])
                                  .cwiseAbs()
                                  .maxCoeff());
        scale = std::max(scale, cl[static_cast<size_t>(k)].cwiseAbs().maxCoeff());
      }
      return diff / (1.0 + scale);
    });
    ctx.add(S, "christoffel_fd_vs_closed", kAnchorGamma, r, 1e-6);
  });

  guarded(ctx, S, "riemann_fd_vs_closed", kAnchorRiemann, [&] {
    double r = ctx.max_over(N, [&](int i) {
      CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>(i)]);
      CurvTensor4 fd = riemann_fd(Mg, coords_of(z), FdOptions{1e-4, 2});
      CurvTensor4 cl = riemann_closed_cartesian(par, z);
      double scale = 1.0 + cl.max_abs();
      fd.add_scaled(cl, -1.0);
      return fd.max_abs() / scale;
    });
    ctx.add(S, "riemann_fd_vs_closed", kAnchorRiemann, r, 1e-5);
  });

  guarded(ctx, S, "ricci_fd_vs_closed", kAnchorRicci, [&] {
    double r = ctx.max_over(N, [&](int i) {
      CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>(i)]);
      MatrixXd fd = ricci_fd(Mg, coords_of(z), FdOptions{1e-4, 2});
      MatrixXd cl = ricci_closed_cartesian(par, z);
      return (fd - cl).cwiseAbs().maxCoeff() / (1.0 + cl.cwiseAbs().maxCoeff());
    });
    ctx.add(S, "ricci_fd_vs_closed", kAnchorRicci, r, 1e-5);
  });

  guarded(ctx, S, "scalar_fd_vs_closed", kAnchorScal, [&] {
    double r = ctx.max_over(N, [&](int i) {
      CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>(i)]);
      double fd = scalar_fd(Mg, coords_of(z), FdOptions{1e-4, 2});
      double cl = scal_closed(par, pts[static_cast<size_t>(i)].r);
      return std::abs(fd - cl) / (1.0 + std::abs(cl));
    });
    ctx.add(S, "scalar_fd_vs_closed", kAnchorScal, r, 1e-5);
  });

  {
    const char* id = "scal_pinned_instance";
    const char* anchor = "Scal = -3/2 at (p, q, alpha) = (3, 1, 1), r = 1";
    if (par.p == 3 && par.q == 1 && par.alpha == 1.0) {
      guarded(ctx, S, id, anchor, [&] {
        ctx.add(S, id, anchor, std::abs(scal_closed(par, 1.0) + 1.5), 1e-12);
      });
    } else {
      ctx.skip(S, id, anchor, "pinned instance is (3, 1, 1)");
    }
  }

  {
    const char* id = "scal_scaling_law";
    const char* anchor = "Scal(r) = C r^-2: 4 Scal(2r) = Scal(r)";
    if (par.p == 2) {
      ctx.skip(S, id, anchor, "flat when p = 2");
    } else {
      guarded(ctx, S, id, anchor, [&] {
        int m = std::min(N, 16);
        double r = ctx.max_over(m, [&](int i) {
          CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>(i)]);
          CartesianPoint z2 = z;
          z2.x *= std::pow(2.0, 1.0 / (par.alpha + 1.0));  // doubles the cylinder radius
          double s1 = scalar_fd(Mg, coords_of(z), FdOptions{1e-3, 4});
          double s2 = scalar_fd(Mg, coords_of(z2), FdOptions{1e-3, 4});
          return std::abs(4.0 * s2 - s1) / std::max(std::abs(s1), 1e-30);
        });
        ctx.add(S, id, anchor, r, 1e-8);
      });
    }
  }

  {
    const char* id = "flatness_p2";
    const char* anchor = "p = 2: the Grushin metric is flat";
    if (par.p != 2) {
      ctx.skip(S, id, anchor, "requires p = 2");
    } else {
      guarded(ctx, S, id, anchor, [&] {
        int m = std::min(N, 32);
        double r = ctx.max_over(m, [&](int i) {
          CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>(i)]);
          double fd = riemann_fd(Mg, coords_of(z), FdOptions{1e-3, 4}).max_abs();
          double cl = riemann_closed_cartesian(par, z).max_abs();
          return std::max(fd, cl);
        });
        ctx.add(S, id, anchor, r, 1e-8);
      });
    }
  }

  guarded(ctx, S, "fd_tensor_symmetries",
          "R_abcd = -R_bacd = -R_abdc = R_cdab; first Bianchi", [&] {
            int m = std::min(N, 32);
            double r = ctx.max_over(m, [&](int i) {
              CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>(i)]);
              CurvTensor4 fd = riemann_fd(Mg, coords_of(z), FdOptions{1e-4, 2});
              return validate_symmetries(fd).worst_relative();
            });
            ctx.add(S, "fd_tensor_symmetries",
                    "R_abcd = -R_bacd = -R_abdc = R_cdab; first Bianchi", r, 1e-6);
          });

  guarded(ctx, S, "cross_chart_contraction", "R(U,V,X,Y) agrees across charts", [&] {
    double r = ctx.max_over(N, [&](int i) {
      const CylindricalPoint& pt = pts[static_cast<size_t>(i)];
      CartesianPoint z = to_cartesian(par, pt);
      auto rng = rng_at(ctx.cfg.seed, 0xc0de01, i);
      std::vector<CylindricalVector> vs;
      for (int k = 0; k < 4; ++k) {
        CylindricalVector v;
        v.base = pt;
        v.dr = gaussian(rng, 1)[0];
        v.dy = gaussian(rng, par.q);
        VectorXd w = gaussian(rng, par.p);
        v.dtheta = w - pt.theta * pt.theta.dot(w);
        vs.push_back(v);
      }
      double cyl = riemann_closed(par, pt, vs[0], vs[1], vs[2], vs[3]);
      CurvTensor4 cart = riemann_closed_cartesian(par, z);
      std::vector<VectorXd> cs;
      for (const auto& v : vs) {
        CartesianVector cv = chart_pushforward(par, v);
        VectorXd c(par.n());
        c << cv.dx, cv.dy;
        cs.push_back(c);
      }
      double val = cart.contract(cs[0], cs[1], cs[2], cs[3]);
      return std::abs(cyl - val) / (1.0 + std::abs(val));
    });
    ctx.add(S, "cross_chart_contraction", "R(U,V,X,Y) agrees across charts", r, 1e-10);
  });

  guarded(ctx, S, "warped_engine_vs_fd",
          "R = (Hess_H w / w) . s - (B/2) s . s, B = w^-2 (1 - |grad_H w|^2)", [&] {
            GenericWarped W = GenericWarped::grushin(par);
            int m = std::min(N, 16);
            double r = ctx.max_over(m, [&](int i) {
              const CylindricalPoint& pt = pts[static_cast<size_t>(i)];
              auto rng = rng_at(ctx.cfg.seed, 0xc0de02, i);
              VectorXd u(1 + par.q + (par.p - 1));
              u[0] = pt.r;
              u.segment(1, par.q) = pt.y;
              u.tail(par.p - 1) = 1.2 * unit_vec(rng, par.p - 1) *
                                  std::uniform_real_distribution<double>(0.1, 1.0)(rng);
              CurvTensor4 fd = riemann_fd(W, u, FdOptions{1e-4, 2});
              CurvTensor4 cl = warped_riemann_closed(W, u);
              double scale = 1.0 + cl.max_abs();
              fd.add_scaled(cl, -1.0);
              return fd.max_abs() / scale;
            });
            ctx.add(S, "warped_engine_vs_fd",
                    "R = (Hess_H w / w) . s - (B/2) s . s, B = w^-2 (1 - |grad_H w|^2)", r,
                    1e-5);
          });

  guarded(ctx, S, "warped_scalar_cross", "Scal agrees in the warped chart", [&] {
    GenericWarped W = GenericWarped::grushin(par);
    int m = std::min(N, 16);
    double r = ctx.max_over(m, [&](int i) {
      const CylindricalPoint& pt = pts[static_cast<size_t>(i)];
      auto rng = rng_at(ctx.cfg.seed, 0xc0de03, i);
      VectorXd u(1 + par.q + (par.p - 1));
      u[0] = pt.r;
      u.segment(1, par.q) = pt.y;
      u.tail(par.p - 1) = 0.8 * unit_vec(rng, par.p - 1) *
                          std::uniform_real_distribution<double>(0.1, 1.0)(rng);
      double fd = scalar_fd(W, u, FdOptions{1e-3, 4});
      double cl = scal_closed(par, pt.r);
      return std::abs(fd - cl) / (1.0 + std::abs(cl));
    });
    ctx.add(S, "warped_scalar_cross", "Scal agrees in the warped chart", r, 1e-6);
  });
}

// ---------------------------------------------------------------------------
// cones

constexpr const char* kAnchorCone = "U_P = T_P S union T_P H (p >= 3)";

struct ConeDraw {
  CylindricalVector X;
  char type = 'H';  // 'H', 'S', 'M'
};

ConeDraw cone_draw(const GrushinParams& par, const CylindricalPoint& pt,
                   std::mt19937_64& rng, int which) {
  MatrixXd basis = sphere_tangent_basis(pt.theta);
  CylindricalVector H;
  H.base = pt;
  H.dr = gaussian(rng, 1)[0];
  H.dy = gaussian(rng, par.q);
  double hn = std::sqrt(H.dr * H.dr + H.dy.squaredNorm());
  H.dr /= hn;
  H.dy /= hn;
  H.dtheta = VectorXd::Zero(par.p);

  CylindricalVector V;
  V.base = pt;
  V.dr = 0.0;
  V.dy = VectorXd::Zero(par.q);
  VectorXd w = unit_vec(rng, par.p - 1);
  V.dtheta = basis * w / ((par.alpha + 1.0) * pt.r);  // g-unit

  ConeDraw d;
  d.X.base = pt;
  if (which == 0) {
    d.X = H;
    d.type = 'H';
  } else if (which == 1) {
    d.X = V;
    d.type = 'S';
  } else {
    double phi = std::uniform_real_distribution<double>(0.3, M_PI / 2 - 0.3)(rng);
    d.X.dr = std::cos(phi) * H.dr;
    d.X.dy = std::cos(phi) * H.dy;
    d.X.dtheta = std::sin(phi) * V.dtheta;
    d.type = 'M';
  }
  return d;
}

void suite_cones(Ctx& ctx, const std::vector<CylindricalPoint>& pts) {
  const char* S = "cones";
  const GrushinParams par = ctx.cfg.params;
  const int N = static_cast<int>(pts.size());

  if (par.p < 3) {
    ctx.skip(S, "cone_structure", kAnchorCone, "requires p >= 3");
    guarded(ctx, S, "flatness_p2", "p = 2: the Grushin metric is flat", [&] {
      GrushinCartesian Mg(par, MetricKind::g);
      int m = std::min(N, 16);
      double r = ctx.max_over(m, [&](int i) {
        CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>(i)]);
        double fd = riemann_fd(Mg, coords_of(z), FdOptions{1e-3, 4}).max_abs();
        return std::max(fd, riemann_closed_cartesian(par, z).max_abs());
      });
      ctx.add(S, "flatness_p2", "p = 2: the Grushin metric is flat", r, 1e-8);
    });
    return;
  }

  const bool flat = par.alpha == 0.0;
  ConeOptions search;
  search.mode = ConeMode::WeylSearch;
  search.trials = 200;

  guarded(ctx, S, "dual_mode_agreement", kAnchorCone, [&] {
    double r = ctx.max_over(N, [&](int i) {
      const CylindricalPoint& pt = pts[static_cast<size_t>(i)];
      auto rng = rng_at(ctx.cfg.seed, 0xc04e01, i);
      ConeDraw d = cone_draw(par, pt, rng, i % 3);
      ConeOptions so = search;
      so.seed = splitmix64(ctx.cfg.seed + 7 * static_cast<std::uint64_t>(i));
      ConeResult a = cone_membership(par, pt, d.X, ConeOptions{});
      ConeResult b = cone_membership(par, pt, d.X, so);
      return a.member == b.member ? 0.0 : 1.0;
    });
    ctx.add(S, "dual_mode_agreement", kAnchorCone, r, 0.0);
  });

  guarded(ctx, S, "pure_vectors_member", kAnchorCone, [&] {
    double r = ctx.max_over(N, [&](int i) {
      const CylindricalPoint& pt = pts[static_cast<size_t>(i)];
      auto rng = rng_at(ctx.cfg.seed, 0xc04e02, i);
      ConeDraw d = cone_draw(par, pt, rng, i % 2);
      ConeOptions so = search;
      so.seed = splitmix64(ctx.cfg.seed + 11 * static_cast<std::uint64_t>(i));
      if (!cone_membership(par, pt, d.X, ConeOptions{}).member) return 1.0;
      if (!cone_membership(par, pt, d.X, so).member) return 1.0;
      return 0.0;
    });
    ctx.add(S, "pure_vectors_member", kAnchorCone, r, 0.0);
  });

  {
    const char* id = "mixed_vectors_excluded";
    if (flat) {
      ctx.skip(S, id, kAnchorCone, "flat instance: the cone is all of T_P M0");
    } else {
      guarded(ctx, S, id, kAnchorCone, [&] {
        double r = ctx.max_over(N, [&](int i) {
          const CylindricalPoint& pt = pts[static_cast<size_t>(i)];
          auto rng = rng_at(ctx.cfg.seed, 0xc04e03, i);
          ConeDraw d = cone_draw(par, pt, rng, 2);
          ConeOptions so = search;
          so.seed = splitmix64(ctx.cfg.seed + 13 * static_cast<std::uint64_t>(i));
          if (cone_membership(par, pt, d.X, ConeOptions{}).member) return 1.0;
          if (cone_membership(par, pt, d.X, so).member) return 1.0;
          return 0.0;
        });
        ctx.add(S, id, kAnchorCone, r, 0.0);
      });
    }
  }

  {
    const char* id = "mixed_witness_floor";
    const char* anchor = "mixed X: some W(X, ., ., .) component survives";
    if (flat) {
      ctx.skip(S, id, anchor, "flat instance: W = 0");
    } else {
      guarded(ctx, S, id, anchor, [&] {
        int m = std::min(N, 64);
        double r = ctx.max_over(m, [&](int i) {
          const CylindricalPoint& pt = pts[static_cast<size_t>(i)];
          auto rng = rng_at(ctx.cfg.seed, 0xc04e04, i);
          ConeDraw d = cone_draw(par, pt, rng, 2);
          ConeOptions so = search;
          so.seed = splitmix64(ctx.cfg.seed + 17 * static_cast<std::uint64_t>(i));
          ConeResult res = cone_membership(par, pt, d.X, so);
          return shortfall(res.witness, 10.0 * so.weyl_tol);
        });
        ctx.add(S, id, anchor, r, 0.0);
      });
    }
  }

  guarded(ctx, S, "weyl_sectional_ratio",
          "W(X,Y,X,Y)/(g(X,X) g(Y,Y)) = -q(q+1)/((n-1)(n-2)) alpha(alpha+2)/((alpha+1)^2 r^2)",
          [&] {
            double C0 = -static_cast<double>(par.q) * (par.q + 1) /
                        ((par.n() - 1.0) * (par.n() - 2.0)) * par.alpha *
                        (par.alpha + 2.0) / ((par.alpha + 1.0) * (par.alpha + 1.0));
            double r = ctx.max_over(N, [&](int i) {
              const CylindricalPoint& pt = pts[static_cast<size_t>(i)];
              auto rng = rng_at(ctx.cfg.seed, 0xc04e05, i);
              MatrixXd basis = sphere_tangent_basis(pt.theta);
              MatrixXd rot = random_orthogonal(rng, par.p - 1);
              CylindricalVector X, Y;
              X.base = Y.base = pt;
              X.dr = Y.dr = 0.0;
              X.dy = Y.dy = VectorXd::Zero(par.q);
              double sx = std::uniform_real_distribution<double>(0.5, 2.0)(rng);
              X.dtheta = sx * basis * rot.col(0);
              Y.dtheta = basis * rot.col(1);
              double ratio = weyl_sectional_ratio(par, pt, X, Y);
              double expect = C0 / (pt.r * pt.r);
              return std::abs(ratio - expect) / std::max(std::abs(expect), 1e-12);
            });
            ctx.add(S, "weyl_sectional_ratio",
                    "W(X,Y,X,Y)/(g(X,X) g(Y,Y)) = -q(q+1)/((n-1)(n-2)) alpha(alpha+2)/((alpha+1)^2 r^2)",
                    r, 1e-6, flat ? "flat instance: both sides vanish" : "");
          });

  guarded(ctx, S, "weyl_trace_free", "g^ac W_abcd = 0", [&] {
    int m = std::min(N, 32);
    double r = ctx.max_over(m, [&](int i) {
      CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>(i)]);
      MatrixXd G = metric_cartesian(par, z, MetricKind::g);
      CurvTensor4 R = riemann_closed_cartesian(par, z);
      MatrixXd ric = ricci_closed_cartesian(par, z);
      double scal = scal_closed(par, pts[static_cast<size_t>(i)].r);
      CurvTensor4 W = weyl_from_parts(R, ric, scal, G);
      MatrixXd ginv = G.inverse();
      int n = par.n();
      double worst = 0.0;
      for (int b = 0; b < n; ++b)
        for (int d = 0; d < n; ++d) {
          double t = 0.0;
          for (int a = 0; a < n; ++a)
            for (int c = 0; c < n; ++c) t += ginv(a, c) * W.at(a, b, c, d);
          worst = std::max(worst, std::abs(t));
        }
      return worst / (1.0 + W.max_abs());
    });
    ctx.add(S, "weyl_trace_free", "g^ac W_abcd = 0", r, 1e-9);
  });

  // Product instance S^3 x R^2 through the same warped engine, w = 1.
  guarded(ctx, S, "product_curvature", "S^3 x R^2: R = -(1/2) s . s (sectional +1)", [&] {
    ScalarField one;
    one.value = [](const VectorXd&) { return 1.0; };
    one.grad = [](const VectorXd& u) { return VectorXd::Zero(u.size()).eval(); };
    one.hess = [](const VectorXd& u) {
      return MatrixXd::Zero(u.size(), u.size()).eval();
    };
    GenericWarped W(2, 3, one);
    double r = ctx.max_over(8, [&](int i) {
      auto rng = rng_at(ctx.cfg.seed, 0xc04e06, i);
      VectorXd u(5);
      u.head(2) = gaussian(rng, 2);
      u.tail(3) = 1.1 * unit_vec(rng, 3) *
                  std::uniform_real_distribution<double>(0.1, 1.0)(rng);
      CurvTensor4 fd = riemann_fd(W, u, FdOptions{1e-4, 2});
      CurvTensor4 cl = warped_riemann_closed(W, u);
      double scale = 1.0 + cl.max_abs();
      CurvTensor4 diff = fd;
      diff.add_scaled(cl, -1.0);
      return diff.max_abs() / scale;
    });
    ctx.add(S, "product_curvature", "S^3 x R^2: R = -(1/2) s . s (sectional +1)", r, 1e-5);
  });

  guarded(ctx, S, "product_cones", "S^3 x R^2: U = T R^2 union T S^3", [&] {
    double r = ctx.max_over(48, [&](int i) {
      auto rng = rng_at(ctx.cfg.seed, 0xc04e07, i);
      VectorXd X = VectorXd::Zero(5);
      int which = i % 3;
      bool expect_member = which != 2;
      if (which == 0) {
        X.head(2) = unit_vec(rng, 2);
      } else if (which == 1) {
        X.tail(3) = unit_vec(rng, 3);
      } else {
        double phi = std::uniform_real_distribution<double>(0.3, M_PI / 2 - 0.3)(rng);
        X.head(2) = std::cos(phi) * unit_vec(rng, 2);
        X.tail(3) = std::sin(phi) * unit_vec(rng, 3);
      }
      ConeOptions so;
      so.mode = ConeMode::WeylSearch;
      so.trials = 200;
      so.seed = splitmix64(ctx.cfg.seed + 19 * static_cast<std::uint64_t>(i));
      ConeResult a = cone_membership_adapted(2, 3, 1.0, X, ConeOptions{});
      ConeResult b = cone_membership_adapted(2, 3, 1.0, X, so);
      if (a.member != expect_member || b.member != expect_member) return 1.0;
      return 0.0;
    });
    ctx.add(S, "product_cones", "S^3 x R^2: U = T R^2 union T S^3", r, 0.0);
  });
}

// ---------------------------------------------------------------------------
// conformal

struct NamedChain {
  std::string name;
  MapChain chain;
};

std::vector<NamedChain> standard_chains(const GrushinParams& par, std::uint64_t seed) {
  auto rng = rng_at(seed, 0xcf01, 0);
  MatrixXd A = random_orthogonal(rng, par.p);
  MatrixXd B = random_orthogonal(rng, par.q);
  VectorXd v = gaussian(rng, par.q);
  VectorXd shift = VectorXd::Zero(par.q);
  shift[0] = 2.5;  // keeps the inversion argument away from the origin

  std::vector<NamedChain> out;
  out.push_back({"iso", MapChain(par, {ElementaryMap::isometry(A, B, v)})});
  out.push_back({"dil", MapChain(par, {ElementaryMap::dilation(1.7)})});
  out.push_back({"inv", MapChain(par, {ElementaryMap::inversion()})});
  out.push_back({"mix1", MapChain(par, {ElementaryMap::y_translation(shift),
                                        ElementaryMap::inversion(),
                                        ElementaryMap::dilation(0.8),
                                        ElementaryMap::isometry(A, B, v)})});
  out.push_back({"mix2", MapChain(par, {ElementaryMap::dilation(1.3),
                                        ElementaryMap::inversion()})});
  return out;
}

void suite_conformal(Ctx& ctx, const std::vector<CylindricalPoint>& pts) {
  const char* S = "conformal";
  const GrushinParams par = ctx.cfg.params;
  const int N = static_cast<int>(pts.size());
  auto chains = standard_chains(par, ctx.cfg.seed);
  const int C = static_cast<int>(chains.size());
  const int M = std::min(N, 40);

  guarded(ctx, S, "cr_measured_g", "g(f_* U, f_* V) = u^-2 g(U, V)", [&] {
    double r = ctx.max_over(C * M, [&](int i) {
      const MapChain& ch = chains[static_cast<size_t>(i / M)].chain;
      CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>(i % M)]);
      return cr_residual(ch, z, MetricKind::g).second;
    });
    ctx.add(S, "cr_measured_g", "g(f_* U, f_* V) = u^-2 g(U, V)", r, 1e-8);
  });

  guarded(ctx, S, "cr_measured_ghat", "ghat(f_* U, f_* V) = u^-2 ghat(U, V)", [&] {
    double r = ctx.max_over(C * M, [&](int i) {
      const MapChain& ch = chains[static_cast<size_t>(i / M)].chain;
      CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>(i % M)]);
      return cr_residual_hat(ch, z).second;
    });
    ctx.add(S, "cr_measured_ghat", "ghat(f_* U, f_* V) = u^-2 ghat(U, V)", r, 1e-8);
  });

  guarded(ctx, S, "factor_closed_vs_measured",
          "u_Gamma = 1; u_delta = t^-(alpha+1) | t^-1; u_Phi = |z|^(2(alpha+1)) | |z|^2",
          [&] {
            double r = ctx.max_over(C * M, [&](int i) {
              const MapChain& ch = chains[static_cast<size_t>(i / M)].chain;
              CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>(i % M)]);
              double worst = 0.0;
              for (MetricKind k : {MetricKind::g, MetricKind::ghat}) {
                double known = ch.known_factor(z, k);
                double u_hat = k == MetricKind::g ? cr_residual(ch, z, k).first
                                                 : cr_residual_hat(ch, z).first;
                worst = std::max(worst, std::abs(u_hat - known) / known);
              }
              return worst;
            });
            ctx.add(S, "factor_closed_vs_measured",
                    "u_Gamma = 1; u_delta = t^-(alpha+1) | t^-1; u_Phi = |z|^(2(alpha+1)) | |z|^2",
                    r, 1e-8);
          });

  guarded(ctx, S, "cr_singular_slice", "conformality extends across {x = 0}", [&] {
    double r = ctx.max_over(C * 8, [&](int i) {
      const MapChain& ch = chains[static_cast<size_t>(i / 8)].chain;
      auto rng = rng_at(ctx.cfg.seed, 0xcf02, i);
      CartesianPoint z;
      z.x = VectorXd::Zero(par.p);
      z.y = unit_vec(rng, par.q) *
            std::uniform_real_distribution<double>(0.5, 2.0)(rng);
      double worst = cr_residual(ch, z, MetricKind::g).second;
      worst = std::max(worst, cr_residual_hat(ch, z).second);
      double known = ch.known_factor(z, MetricKind::ghat);
      double u_hat = cr_residual_hat(ch, z).first;
      worst = std::max(worst, std::abs(u_hat - known) / known);
      return worst;
    });
    ctx.add(S, "cr_singular_slice", "conformality extends across {x = 0}", r, 1e-8);
  });

  guarded(ctx, S, "factor_cocycle", "u_{F o G} = (u_F o G) u_G", [&] {
    double r = ctx.max_over(2 * 8, [&](int i) {
      const NamedChain& nc = chains[static_cast<size_t>(3 + i / 8)];  // mix1, mix2
      CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>((i % 8) * (N / 8))]);
      double whole = cr_residual_hat(nc.chain, z).first;
      double prod = 1.0;
      CartesianPoint w = z;
      for (const auto& m : nc.chain.maps()) {
        MapChain single(par, {m});
        prod *= cr_residual_hat(single, w).first;
        w = apply_map(par, m, w);
      }
      return std::abs(whole - prod) / whole;
    });
    ctx.add(S, "factor_cocycle", "u_{F o G} = (u_F o G) u_G", r, 1e-8);
  });

  guarded(ctx, S, "ricci_preserved", "Ric(f_* U, f_* V)(f z) = Ric(U, V)(z)", [&] {
    double r = ctx.max_over(C * M, [&](int i) {
      const MapChain& ch = chains[static_cast<size_t>(i / M)].chain;
      CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>(i % M)]);
      auto rng = rng_at(ctx.cfg.seed, 0xcf03, i);
      VectorXd U = gaussian(rng, par.n());
      VectorXd V = gaussian(rng, par.n());
      MatrixXd ric = ricci_closed_cartesian(par, z);
      double scale = 1.0 + std::abs(U.dot(ric * V));
      return ricci_preservation_residual(par, ch, z, U, V) / scale;
    });
    ctx.add(S, "ricci_preserved", "Ric(f_* U, f_* V)(f z) = Ric(U, V)(z)", r, 1e-8);
  });

  {
    const char* id = "ricci_fault_detected";
    const char* anchor = "a non-conformal shear moves Ric by >= 1e-2";
    if (par.p < 3 || par.alpha == 0.0) {
      ctx.skip(S, id, anchor, "Ric vanishes identically (p = 2 or alpha = 0)");
    } else {
      guarded(ctx, S, id, anchor, [&] {
        // Linear shear in the x-block: distorts sphere directions, which is
        // exactly what Ric sees.
        struct Shear final : SmoothMap {
          GrushinParams par;
          MatrixXd L;
          CartesianPoint apply(const CartesianPoint& z) const override {
            return {L * z.x, z.y};
          }
          MatrixXd jacobian(const CartesianPoint& z) const override {
            MatrixXd J = MatrixXd::Identity(par.n(), par.n());
            J.topLeftCorner(par.p, par.p) = L;
            (void)z;
            return J;
          }
        };
        Shear f;
        f.par = par;
        f.L = MatrixXd::Identity(par.p, par.p);
        f.L(0, 1) = 0.25;
        std::vector<double> vals(16);
        for (int i = 0; i < 16; ++i) {
          const CylindricalPoint& pt = pts[static_cast<size_t>(i % N)];
          CartesianPoint z = to_cartesian(par, pt);
          auto rng = rng_at(ctx.cfg.seed, 0xcf04, i);
          MatrixXd basis = sphere_tangent_basis(pt.theta);
          VectorXd U = VectorXd::Zero(par.n());
          U.head(par.p) = basis * unit_vec(rng, par.p - 1);
          MatrixXd ric = ricci_closed_cartesian(par, z);
          double scale = std::max(std::abs(U.dot(ric * U)), 1e-12);
          vals[static_cast<size_t>(i)] =
              ricci_preservation_residual(par, f, z, U, U) / scale;
        }
        double detected = *std::max_element(vals.begin(), vals.end());
        std::ostringstream note;
        note << "max normalized deviation " << detected;
        ctx.add(S, id, anchor, shortfall(detected, 1e-2), 0.0, note.str());
      });
    }
  }

  {
    const char* id = "weyl_conformal_invariance";
    const char* anchor = "W_{u^-2 g} = u^-2 W_g as (0,4) tensors";
    if (par.n() < 4) {
      ctx.skip(S, id, anchor, "Weyl needs n >= 4");
    } else {
      guarded(ctx, S, id, anchor, [&] {
        auto base = std::make_shared<GrushinCartesian>(par, MetricKind::g);
        double r = ctx.max_over(5 * 4, [&](int i) {
          auto rng = rng_at(ctx.cfg.seed, 0xcf05, i / 4);
          std::normal_distribution<double> nd(0.0, 0.15);
          double c1 = std::clamp(nd(rng), -0.3, 0.3);
          double c2 = std::clamp(nd(rng), -0.3, 0.3);
          double c3 = std::clamp(nd(rng), -0.3, 0.3);
          double p1 = std::uniform_real_distribution<double>(0.0, 6.28)(rng);
          double p2 = std::uniform_real_distribution<double>(0.0, 6.28)(rng);
          const int p = par.p, n = par.n();
          ScalarField u;
          u.value = [=](const VectorXd& w) {
            return std::exp(c1 * std::sin(w[0] + p1) + c2 * std::cos(w[p] + p2) +
                            0.3 * c3 * w[p - 1] * w[n - 1]);
          };
          ConformalScaled scaled(base, u);

          const CylindricalPoint& pt = pts[static_cast<size_t>((i % 4) * (N / 4))];
          CartesianPoint z = to_cartesian(par, pt);
          VectorXd w = coords_of(z);
          CurvTensor4 Rs = riemann_fd(scaled, w, FdOptions{2e-3, 4});
          MatrixXd Gs = scaled.eval(w);
          MatrixXd rics = ricci_from_riemann(Rs, Gs);
          CurvTensor4 Ws = weyl_from_parts(Rs, rics, scalar_from_ricci(rics, Gs), Gs);

          MatrixXd G = metric_cartesian(par, z, MetricKind::g);
          CurvTensor4 W0 = weyl_from_parts(riemann_closed_cartesian(par, z),
                                           ricci_closed_cartesian(par, z),
                                           scal_closed(par, pt.r), G);
          double uv = u.value(w);
          W0 = W0.scaled(1.0 / (uv * uv));
          double scale = std::max({Ws.max_abs(), W0.max_abs(), 1e-12});
          Ws.add_scaled(W0, -1.0);
          return Ws.max_abs() / scale;
        });
        ctx.add(S, id, anchor, r, 1e-4);
      });
    }
  }

  guarded(ctx, S, "factor_pde_genuine",
          "(n-2) u^-1 Hess u = u^-2 ((n-1)|grad u|^2 - u Lap u) g; L = 0, |M|^2 = 2 N H",
          [&] {
            double r = ctx.max_over(16, [&](int i) {
              const CylindricalPoint& pt = pts[static_cast<size_t>(i % N)];
              auto rng = rng_at(ctx.cfg.seed, 0xcf06, i);
              ConformalFactorModel model;
              if (i % 2 == 0) {
                // inv, mix1, mix2 in rotation; all carry an inversion factor
                const MapChain& ch = chains[static_cast<size_t>(2 + (i / 2) % 3)].chain;
                model = model_from_chain(ch, pt);
              } else {
                double a = std::uniform_real_distribution<double>(0.4, 1.5)(rng);
                VectorXd b = gaussian(rng, par.q);
                model.H = 2.0 * a;
                model.L = 0.0;
                model.M = -2.0 * a * b;
                model.N = a * b.squaredNorm();
              }
              auto res = factor_pde_residual(par, model, pt);
              return std::max(res.first, res.second);
            });
            ctx.add(S, "factor_pde_genuine",
                    "(n-2) u^-1 Hess u = u^-2 ((n-1)|grad u|^2 - u Lap u) g; L = 0, |M|^2 = 2 N H",
                    r, 1e-8);
          });

  guarded(ctx, S, "factor_pde_violator", "u with |M|^2 != 2 N H leaves a trace residual",
          [&] {
            ConformalFactorModel bad;
            bad.H = 2.0;
            bad.L = 0.0;
            bad.M = VectorXd::Zero(par.q);
            bad.N = 1.0;  // |M|^2 = 0 but 2 N H = 4
            double least = kInf;
            for (int i = 0; i < 8; ++i) {
              auto res = factor_pde_residual(par, bad, pts[static_cast<size_t>(i % N)]);
              least = std::min(least, res.second);
            }
            std::ostringstream note;
            note << "min trace residual " << least;
            ctx.add(S, "factor_pde_violator",
                    "u with |M|^2 != 2 N H leaves a trace residual",
                    shortfall(least, 0.1), 0.0, note.str());
          });

  guarded(ctx, S, "classification_roundtrip",
          "f = Gamma o delta_t o (Phi o T_-b)^(s in {0,-2})", [&] {
    double r = ctx.max_over(6, [&](int i) {
      auto rng = rng_at(ctx.cfg.seed, 0xcf07, i);
      MatrixXd A = random_orthogonal(rng, par.p);
      MatrixXd B = random_orthogonal(rng, par.q);
      VectorXd v = gaussian(rng, par.q);
      double t = std::uniform_real_distribution<double>(0.6, 1.8)(rng);
      int s = (i % 2 == 0) ? 0 : -2;
      VectorXd b = 0.3 * gaussian(rng, par.q);

      std::vector<ElementaryMap> maps;
      if (s == -2) {
        maps.push_back(ElementaryMap::y_translation(-b));
        maps.push_back(ElementaryMap::inversion());
      }
      maps.push_back(ElementaryMap::dilation(t));
      maps.push_back(ElementaryMap::isometry(A, B, v));
      MapChain truth(par, maps);

      std::vector<SamplePair> samples;
      int need = 3 * (par.p * par.p + par.q * par.q + par.q + 3);
      while (static_cast<int>(samples.size()) < need) {
        CartesianPoint z;
        z.x = unit_vec(rng, par.p) *
              std::uniform_real_distribution<double>(0.6, 1.6)(rng);
        z.y = gaussian(rng, par.q);
        if (s == -2 && homogeneous_norm(par, {z.x, (z.y - b).eval()}) < 0.4) continue;
        samples.push_back({z, truth.apply(z)});
      }
      ClassificationFit fit =
          fit_classification(par, samples, splitmix64(ctx.cfg.seed + 23 * static_cast<std::uint64_t>(i)));
      double worst = fit.fit_residual;
      if (fit.s != s) worst = std::max(worst, 1.0);
      worst = std::max(worst, std::abs(fit.t - t) / t);
      return worst;
    });
    ctx.add(S, "classification_roundtrip",
            "f = Gamma o delta_t o (Phi o T_-b)^(s in {0,-2})", r, 1e-6);
  });

  guarded(ctx, S, "classification_reject", "non-conformal samples are rejected", [&] {
    double r = ctx.max_over(2, [&](int i) {
      auto rng = rng_at(ctx.cfg.seed, 0xcf08, i);
      std::vector<SamplePair> samples;
      int need = 3 * (par.p * par.p + par.q * par.q + par.q + 3);
      for (int k = 0; k < need; ++k) {
        CartesianPoint z;
        z.x = unit_vec(rng, par.p) *
              std::uniform_real_distribution<double>(0.6, 1.6)(rng);
        z.y = gaussian(rng, par.q);
        CartesianPoint w = z;
        w.x[0] += 0.2 * std::sin(z.x[0] + z.y[0]);
        samples.push_back({z, w});
      }
      try {
        ClassificationFit fit = fit_classification(
            par, samples, splitmix64(ctx.cfg.seed + 29 * static_cast<std::uint64_t>(i)));
        return fit.fit_residual > 1e-4 ? 0.0 : 1.0;
      } catch (const FitFailed&) {
        return 0.0;
      }
    });
    ctx.add(S, "classification_reject", "non-conformal samples are rejected", r, 0.0);
  });

  guarded(ctx, S, "factor_product_form", "log u(h, theta) separates: rank-one grid", [&] {
    const MapChain& ch = chains[2].chain;  // inversion
    const int HR = 6, TH = 5;
    MatrixXd logs(HR, TH);
    for (int i = 0; i < HR; ++i) {
      auto rngh = rng_at(ctx.cfg.seed, 0xcf09, i);
      double r = std::uniform_real_distribution<double>(0.6, 1.8)(rngh);
      VectorXd y = gaussian(rngh, par.q);
      for (int j = 0; j < TH; ++j) {
        auto rngt = rng_at(ctx.cfg.seed, 0xcf0a, j);
        CylindricalPoint pt;
        pt.r = r;
        pt.y = y;
        pt.theta = unit_vec(rngt, par.p);
        CartesianPoint z = to_cartesian(par, pt);
        logs(i, j) = std::log(cr_residual_hat(ch, z).first);
      }
    }
    MatrixXd centered = logs;  // rank-one after adding a constant column term
    Eigen::JacobiSVD<MatrixXd> svd(centered);
    double s0 = svd.singularValues()[0];
    double s1 = svd.singularValues().size() > 1 ? svd.singularValues()[1] : 0.0;
    ctx.add(S, "factor_product_form", "log u(h, theta) separates: rank-one grid",
            s1 / std::max(s0, 1e-12), 1e-8);
  });

  {
    const char* id = "cone_pattern_invariance";
    const char* anchor = "f_* preserves {T S, T H}; the swap needs p - 1 = q + 1";
    if (par.p < 3) {
      ctx.skip(S, id, anchor, "requires p >= 3");
    } else {
      guarded(ctx, S, id, anchor, [&] {
        double r = ctx.max_over(C * 6, [&](int i) {
          const MapChain& ch = chains[static_cast<size_t>(i / 6)].chain;
          CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>((i % 6) * (N / 6))]);
          return cone_invariance_check(ch, z).residual;
        });
        ctx.add(S, id, anchor, r, 1e-8);
      });
    }
  }
}

// ---------------------------------------------------------------------------
// umbilic

void suite_umbilic(Ctx& ctx, const std::vector<CylindricalPoint>& pts) {
  const char* S = "umbilic";
  const GrushinParams par = ctx.cfg.params;
  const int N = static_cast<int>(pts.size());
  auto rng0 = rng_at(ctx.cfg.seed, 0xb001, 0);

  struct Member {
    std::string name;
    SurfaceFamily family;
    double kappa_target;
  };
  std::vector<Member> members;
  members.push_back({"A1_centered", SurfaceFamily::sphere(VectorXd::Zero(par.q), 1.0), 1.0});
  members.push_back(
      {"A1_offset", SurfaceFamily::sphere(0.4 * unit_vec(rng0, par.q), 1.3), 1.0 / 1.3});
  members.push_back({"A2", SurfaceFamily::y_plane(unit_vec(rng0, par.q), 0.7), 0.0});
  if (par.p >= 2)
    members.push_back({"B", SurfaceFamily::x_plane(unit_vec(rng0, par.p)), 0.0});

  const int m_samples = std::min(std::max(N / 2, 20), 100);
  std::vector<std::vector<CartesianPoint>> clouds;
  for (size_t f = 0; f < members.size(); ++f)
    clouds.push_back(sample_surface(par, members[f].family, m_samples,
                                    splitmix64(ctx.cfg.seed + 31 * f)));

  const int F = static_cast<int>(members.size());

  guarded(ctx, S, "families_umbilic", "A1, A2, B are totally umbilic", [&] {
    double r = ctx.max_over(F * m_samples, [&](int i) {
      const auto& cloud = clouds[static_cast<size_t>(i / m_samples)];
      HypersurfaceSpec spec =
          surface_of(par, members[static_cast<size_t>(i / m_samples)].family);
      ShapeReport rep = shape_operator(spec, cloud[static_cast<size_t>(i % m_samples)]);
      return umbilicity_residual(rep);
    });
    ctx.add(S, "families_umbilic", "A1, A2, B are totally umbilic", r, 1e-8);
  });

  guarded(ctx, S, "family_kappa", "kappa_A1 = 1/c (inward); kappa_A2 = kappa_B = 0", [&] {
    double r = ctx.max_over(F * m_samples, [&](int i) {
      const Member& mem = members[static_cast<size_t>(i / m_samples)];
      HypersurfaceSpec spec = surface_of(par, mem.family);
      ShapeReport rep = shape_operator(
          spec, clouds[static_cast<size_t>(i / m_samples)][static_cast<size_t>(i % m_samples)]);
      return std::abs(rep.kappa - mem.kappa_target);
    });
    ctx.add(S, "family_kappa", "kappa_A1 = 1/c (inward); kappa_A2 = kappa_B = 0", r, 1e-8);
  });

  guarded(ctx, S, "shape_self_adjoint", "the shape operator is g-self-adjoint", [&] {
    double r = ctx.max_over(F * 8, [&](int i) {
      const Member& mem = members[static_cast<size_t>(i / 8)];
      HypersurfaceSpec spec = surface_of(par, mem.family);
      ShapeReport rep = shape_operator(
          spec, clouds[static_cast<size_t>(i / 8)][static_cast<size_t>((i % 8) * (m_samples / 8))]);
      return rep.asymmetry;
    });
    ctx.add(S, "shape_self_adjoint", "the shape operator is g-self-adjoint", r, 1e-6);
  });

  {
    const char* id = "codazzi";
    const char* anchor = "g(V,Z) U kappa - g(U,Z) V kappa = R(N, Z, U, V)";
    if (par.n() < 4) {
      ctx.skip(S, id, anchor, "needs three independent tangents: n >= 4");
    } else {
      guarded(ctx, S, id, anchor, [&] {
        double r = ctx.max_over(F * 6, [&](int i) {
          const Member& mem = members[static_cast<size_t>(i / 6)];
          HypersurfaceSpec spec = surface_of(par, mem.family);
          CartesianPoint z =
              clouds[static_cast<size_t>(i / 6)][static_cast<size_t>((i % 6) * (m_samples / 6))];
          VectorXd grad = spec.grad(z);
          MatrixXd G = metric_cartesian(par, z, MetricKind::g);
          // Coordinate projections of the axes onto the tangent plane, with
          // the most-normal axis dropped, then G-orthonormalized.
          int drop = 0;
          grad.cwiseAbs().maxCoeff(&drop);
          MatrixXd cand(par.n(), par.n() - 1);
          int col = 0;
          for (int k = 0; k < par.n(); ++k) {
            if (k == drop) continue;
            VectorXd e = VectorXd::Zero(par.n());
            e[k] = 1.0;
            cand.col(col++) = e - grad * (grad.dot(e) / grad.squaredNorm());
          }
          MatrixXd frame = gram_schmidt(G, cand);
          return codazzi_residual(spec, z, frame.col(0), frame.col(1), frame.col(2));
        });
        ctx.add(S, id, anchor, r, 1e-5);
      });
    }
  }

  guarded(ctx, S, "chart_cross_check", "shape operator agrees across charts", [&] {
    // A1/A2 only: those surfaces are x-sphere symmetric, so a flip keeps the
    // sample on the surface while dodging the stereographic pole.
    double r = ctx.max_over(3 * 6, [&](int i) {
      const Member& mem = members[static_cast<size_t>(i / 6)];
      HypersurfaceSpec spec = surface_of(par, mem.family);
      CartesianPoint z =
          clouds[static_cast<size_t>(i / 6)][static_cast<size_t>((i % 6) * (m_samples / 6))];
      if (mem.family.type != SurfaceFamily::Type::B && z.x[par.p - 1] < -0.5 * z.x.norm())
        z.x = -z.x;
      ShapeOptions cart;
      ShapeOptions warped;
      warped.mode = ShapeMode::WarpedChart;
      ShapeReport a = shape_operator(spec, z, cart);
      ShapeReport b = shape_operator(spec, z, warped);
      double scale = 1.0 + a.principal.cwiseAbs().maxCoeff();
      return (a.principal - b.principal).cwiseAbs().maxCoeff() / scale;
    });
    ctx.add(S, "chart_cross_check", "shape operator agrees across charts", r, 1e-6);
  });

  guarded(ctx, S, "inversion_image_refit", "Phi maps umbilic families to umbilic families",
          [&] {
            SurfaceFamily fam = SurfaceFamily::sphere(0.9 * unit_vec(rng0, par.q), 0.5);
            HypersurfaceSpec spec = surface_of(par, fam);
            MapChain inv(par, {ElementaryMap::inversion()});
            HypersurfaceSpec image = pullback_spec(spec, inv);  // Phi is an involution
            auto samples = sample_surface(par, fam, 24, splitmix64(ctx.cfg.seed + 41));
            std::vector<CartesianPoint> mapped;
            for (const auto& z : samples) mapped.push_back(inv.apply(z));
            ClassifiedFamily cls = family_classifier(image, mapped);
            double r = cls.residual;
            if (cls.family.type == SurfaceFamily::Type::B) r = std::max(r, 1.0);
            std::ostringstream note;
            note << "image classified as type "
                 << (cls.family.type == SurfaceFamily::Type::A1
                         ? "A1"
                         : cls.family.type == SurfaceFamily::Type::A2 ? "A2" : "B");
            ctx.add(S, "inversion_image_refit",
                    "Phi maps umbilic families to umbilic families", r, 1e-6, note.str());
          });

  guarded(ctx, S, "normals_in_cone", "umbilic unit normals lie in U_P", [&] {
    double r = ctx.max_over(F * 12, [&](int i) {
      const Member& mem = members[static_cast<size_t>(i / 12)];
      HypersurfaceSpec spec = surface_of(par, mem.family);
      CartesianPoint z =
          clouds[static_cast<size_t>(i / 12)][static_cast<size_t>((i % 12) * (m_samples / 12))];
      CartesianVector Ncart = unit_normal(spec, z);
      CylindricalVector N = chart_pushforward(par, Ncart);
      return cone_obstruction(par, N.base, N) ? 1.0 : 0.0;
    });
    ctx.add(S, "normals_in_cone", "umbilic unit normals lie in U_P", r, 0.0);
  });

  {
    const char* id = "mixed_normals_obstructed";
    const char* anchor = "mixed directions admit no umbilic hypersurface (p >= 3)";
    if (par.p < 3) {
      ctx.skip(S, id, anchor, "never obstructed for p = 2");
    } else if (par.alpha == 0.0) {
      ctx.skip(S, id, anchor, "flat instance: nothing is obstructed");
    } else {
      guarded(ctx, S, id, anchor, [&] {
        double r = ctx.max_over(24, [&](int i) {
          const CylindricalPoint& pt = pts[static_cast<size_t>(i % N)];
          auto rng = rng_at(ctx.cfg.seed, 0xb002, i);
          ConeDraw d = cone_draw(par, pt, rng, 2);
          return cone_obstruction(par, pt, d.X) ? 0.0 : 1.0;
        });
        ctx.add(S, id, anchor, r, 0.0);
      });
    }
  }

  guarded(ctx, S, "nonumbilic_quadric", "the quadric <a, y> = |x|^2 is not umbilic", [&] {
    VectorXd a = unit_vec(rng0, par.q);
    HypersurfaceSpec spec;
    spec.params = par;
    spec.F = [a](const CartesianPoint& z) { return a.dot(z.y) - z.x.squaredNorm(); };
    spec.grad = [a, &parn = par](const CartesianPoint& z) {
      VectorXd g(parn.n());
      g.head(parn.p) = -2.0 * z.x;
      g.tail(parn.q) = a;
      return g;
    };
    double least = kInf;
    for (int i = 0; i < 6; ++i) {
      auto rng = rng_at(ctx.cfg.seed, 0xb003, i);
      CartesianPoint z;
      z.x = unit_vec(rng, par.p) * std::uniform_real_distribution<double>(0.7, 1.3)(rng);
      VectorXd off = gaussian(rng, par.q);
      off -= a * a.dot(off);
      z.y = a * z.x.squaredNorm() + 0.5 * off;
      ShapeReport rep = shape_operator(spec, z);
      least = std::min(least, umbilicity_residual(rep));
    }
    std::ostringstream note;
    note << "min spread " << least;
    ctx.add(S, "nonumbilic_quadric", "the quadric <a, y> = |x|^2 is not umbilic",
            shortfall(least, 1e-2), 0.0, note.str());
  });

  {
    const char* id = "b_maps_to_b";
    const char* anchor = "isometries and dilations carry type B to type B";
    if (par.p < 2) {
      ctx.skip(S, id, anchor, "type B needs p >= 2");
    } else {
      guarded(ctx, S, id, anchor, [&] {
        auto rng = rng_at(ctx.cfg.seed, 0xb004, 0);
        SurfaceFamily fam = SurfaceFamily::x_plane(unit_vec(rng, par.p));
        HypersurfaceSpec spec = surface_of(par, fam);
        MatrixXd A = random_orthogonal(rng, par.p);
        MatrixXd B = random_orthogonal(rng, par.q);
        VectorXd v = gaussian(rng, par.q);
        double t = 1.4;
        MapChain fwd(par, {ElementaryMap::dilation(t), ElementaryMap::isometry(A, B, v)});
        MapChain inv_chain(
            par, {ElementaryMap::isometry(A.transpose(), B.transpose(),
                                          (-B.transpose() * v).eval()),
                  ElementaryMap::dilation(1.0 / t)});
        HypersurfaceSpec image = pullback_spec(spec, inv_chain);
        auto samples = sample_surface(par, fam, 20, splitmix64(ctx.cfg.seed + 43));
        std::vector<CartesianPoint> mapped;
        for (const auto& z : samples) mapped.push_back(fwd.apply(z));
        ClassifiedFamily cls = family_classifier(image, mapped);
        double r = cls.residual;
        if (cls.family.type != SurfaceFamily::Type::B) r = std::max(r, 1.0);
        ctx.add(S, id, anchor, r, 1e-6);
      });
    }
  }
}

// ---------------------------------------------------------------------------
// distance

void suite_distance(Ctx& ctx, const std::vector<CylindricalPoint>& pts) {
  const char* S = "distance";
  const GrushinParams par = ctx.cfg.params;
  const int N = static_cast<int>(pts.size());

  DistanceOptions fast;
  fast.intervals = 16;
  fast.multistarts = 2;
  fast.max_iterations = 120;
  fast.budget = 120000;
  fast.seed = ctx.cfg.seed;

  auto dist = [&](const CartesianPoint& a, const CartesianPoint& b,
                  const DistanceOptions& o) {
    return distance_upper_bound(par, a, b, o).d_hat;
  };

  guarded(ctx, S, "x_aligned_exact", "d((0,0), (s e1, 0)) = s", [&] {
    CartesianPoint z0{VectorXd::Zero(par.p), VectorXd::Zero(par.q)};
    CartesianPoint z1 = z0;
    z1.x[0] = 0.8;
    double d = dist(z0, z1, fast);
    ctx.add(S, "x_aligned_exact", "d((0,0), (s e1, 0)) = s", std::abs(d - 0.8), 1e-4);
  });

  guarded(ctx, S, "symmetry", "d(z, z') = d(z', z)", [&] {
    double r = ctx.max_over(3, [&](int i) {
      auto rng = rng_at(ctx.cfg.seed, 0xd001, i);
      CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>(i * (N / 3))]);
      CartesianPoint w = z;
      VectorXd step = 0.6 * unit_vec(rng, par.n());
      w.x += step.head(par.p);
      w.y += step.tail(par.q);
      DistanceOptions o = fast;
      o.seed = splitmix64(ctx.cfg.seed + 100 + static_cast<std::uint64_t>(i));
      double ab = dist(z, w, o);
      double ba = dist(w, z, o);
      return std::abs(ab - ba) / std::max(ab, ba);
    });
    ctx.add(S, "symmetry", "d(z, z') = d(z', z)", r, 0.02);
  });

  guarded(ctx, S, "triangle_inequality", "d(z1,z3) <= d(z1,z2) + d(z2,z3)", [&] {
    double r = ctx.max_over(2, [&](int i) {
      auto rng = rng_at(ctx.cfg.seed, 0xd002, i);
      CartesianPoint z1 = to_cartesian(par, pts[static_cast<size_t>(i * (N / 2))]);
      CartesianPoint z2 = z1, z3 = z1;
      VectorXd s1 = 0.5 * unit_vec(rng, par.n());
      VectorXd s2 = 0.5 * unit_vec(rng, par.n());
      z2.x += s1.head(par.p);
      z2.y += s1.tail(par.q);
      z3.x += s1.head(par.p) + s2.head(par.p);
      z3.y += s1.tail(par.q) + s2.tail(par.q);
      DistanceOptions o = fast;
      o.seed = splitmix64(ctx.cfg.seed + 200 + static_cast<std::uint64_t>(i));
      double d12 = dist(z1, z2, o), d23 = dist(z2, z3, o), d13 = dist(z1, z3, o);
      return std::max(0.0, d13 - d12 - d23) / (d12 + d23);
    });
    ctx.add(S, "triangle_inequality", "d(z1,z3) <= d(z1,z2) + d(z2,z3)", r, 0.02);
  });

  guarded(ctx, S, "dilation_covariance", "d(delta_t z, delta_t z') = t d(z, z')", [&] {
    double r = ctx.max_over(2, [&](int i) {
      auto rng = rng_at(ctx.cfg.seed, 0xd003, i);
      double t = 1.6;
      CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>(i * (N / 2))]);
      CartesianPoint w = z;
      VectorXd step = 0.5 * unit_vec(rng, par.n());
      w.x += step.head(par.p);
      w.y += step.tail(par.q);
      DistanceOptions o = fast;
      o.seed = splitmix64(ctx.cfg.seed + 300 + static_cast<std::uint64_t>(i));
      double d = dist(z, w, o);
      double dt = dist(dilate(par, z, t), dilate(par, w, t), o);
      return std::abs(dt - t * d) / (t * d);
    });
    ctx.add(S, "dilation_covariance", "d(delta_t z, delta_t z') = t d(z, z')", r, 0.02);
  });

  guarded(ctx, S, "geodesic_shooting", "short ghat geodesics realize the distance", [&] {
    double r = ctx.max_over(3, [&](int i) {
      const CylindricalPoint& pt = pts[static_cast<size_t>(N - 1 - i)];  // larger r
      auto rng = rng_at(ctx.cfg.seed, 0xd004, i);
      GeodesicState st;
      st.pos = pt;
      st.metric = MetricKind::ghat;
      CylindricalVector v;
      v.base = pt;
      v.dr = gaussian(rng, 1)[0];
      v.dy = gaussian(rng, par.q);
      VectorXd w = gaussian(rng, par.p);
      v.dtheta = w - pt.theta * pt.theta.dot(w);
      double nrm = std::sqrt(inner_cylindrical(par, v, v, MetricKind::ghat));
      v.dr /= nrm;
      v.dy /= nrm;
      v.dtheta /= nrm;
      st.vel = v;
      double L = 0.35;
      auto traj = geodesic_ivp(par, st, L);
      CartesianPoint z0 = to_cartesian(par, pt);
      CartesianPoint z1 = to_cartesian(par, traj.back().pos);
      DistanceOptions o = fast;
      o.seed = splitmix64(ctx.cfg.seed + 400 + static_cast<std::uint64_t>(i));
      double d = dist(z0, z1, o);
      return std::abs(d - L) / L;
    });
    ctx.add(S, "geodesic_shooting", "short ghat geodesics realize the distance", r, 0.01);
  });

  guarded(ctx, S, "hleaf_euclidean", "g-distance on an H-leaf: sqrt(dr^2 + |dy|^2)", [&] {
    double r = ctx.max_over(2, [&](int i) {
      auto rng = rng_at(ctx.cfg.seed, 0xd005, i);
      const CylindricalPoint& pt = pts[static_cast<size_t>(i * (N / 2))];
      CylindricalPoint pt2 = pt;
      pt2.r = pt.r + std::uniform_real_distribution<double>(0.2, 0.5)(rng);
      pt2.y = pt.y + 0.4 * unit_vec(rng, par.q);
      double target = std::sqrt((pt2.r - pt.r) * (pt2.r - pt.r) +
                                (pt2.y - pt.y).squaredNorm());
      DistanceOptions o = fast;
      o.metric = MetricKind::g;
      o.intervals = 24;
      o.max_iterations = 200;
      o.seed = splitmix64(ctx.cfg.seed + 500 + static_cast<std::uint64_t>(i));
      double d = dist(to_cartesian(par, pt), to_cartesian(par, pt2), o);
      return std::abs(d - target) / target;
    });
    ctx.add(S, "hleaf_euclidean", "g-distance on an H-leaf: sqrt(dr^2 + |dy|^2)", r, 0.01);
  });

  guarded(ctx, S, "geodesic_energy", "|gamma'| is conserved along geodesics", [&] {
    double r = ctx.max_over(4, [&](int i) {
      const CylindricalPoint& pt = pts[static_cast<size_t>(N - 1 - i)];
      auto rng = rng_at(ctx.cfg.seed, 0xd006, i);
      GeodesicState st;
      st.pos = pt;
      st.metric = (i % 2 == 0) ? MetricKind::g : MetricKind::ghat;
      CylindricalVector v;
      v.base = pt;
      v.dr = gaussian(rng, 1)[0];
      v.dy = gaussian(rng, par.q);
      VectorXd w = gaussian(rng, par.p);
      v.dtheta = w - pt.theta * pt.theta.dot(w);
      st.vel = v;
      auto traj = geodesic_ivp(par, st, 0.3);
      double s0 = std::sqrt(inner_cylindrical(par, traj.front().vel, traj.front().vel,
                                              st.metric));
      double worst = 0.0;
      for (const auto& g : traj) {
        double s = std::sqrt(inner_cylindrical(par, g.vel, g.vel, st.metric));
        worst = std::max(worst, std::abs(s - s0) / s0);
      }
      return worst;
    });
    ctx.add(S, "geodesic_energy", "|gamma'| is conserved along geodesics", r, 1e-8);
  });

  guarded(ctx, S, "leaf_straightness",
          "theta' = 0 leaves of g are (r, y)-Euclidean; ghat radials stay radial", [&] {
    double worst = 0.0;
    {
      const CylindricalPoint& pt = pts[static_cast<size_t>(N / 2)];
      auto rng = rng_at(ctx.cfg.seed, 0xd007, 0);
      GeodesicState st;
      st.pos = pt;
      st.metric = MetricKind::g;
      CylindricalVector v;
      v.base = pt;
      v.dr = 0.4;
      v.dy = 0.5 * unit_vec(rng, par.q);
      v.dtheta = VectorXd::Zero(par.p);
      st.vel = v;
      auto traj = geodesic_ivp(par, st, 0.5);
      VectorXd end(1 + par.q);
      end[0] = traj.back().pos.r - pt.r;
      end.tail(par.q) = traj.back().pos.y - pt.y;
      VectorXd dir = end.normalized();
      for (const auto& g : traj) {
        worst = std::max(worst, (g.pos.theta - pt.theta).cwiseAbs().maxCoeff());
        VectorXd d(1 + par.q);
        d[0] = g.pos.r - pt.r;
        d.tail(par.q) = g.pos.y - pt.y;
        VectorXd lateral = d - dir * dir.dot(d);
        worst = std::max(worst, lateral.norm());
      }
    }
    {
      const CylindricalPoint& pt = pts[static_cast<size_t>(N - 1)];
      GeodesicState st;
      st.pos = pt;
      st.metric = MetricKind::ghat;
      CylindricalVector v;
      v.base = pt;
      v.dr = 0.5;
      v.dy = VectorXd::Zero(par.q);
      v.dtheta = VectorXd::Zero(par.p);
      st.vel = v;
      auto traj = geodesic_ivp(par, st, 0.4);
      for (const auto& g : traj) {
        worst = std::max(worst, (g.pos.theta - pt.theta).cwiseAbs().maxCoeff());
        worst = std::max(worst, (g.pos.y - pt.y).cwiseAbs().maxCoeff());
      }
    }
    ctx.add(S, "leaf_straightness",
            "theta' = 0 leaves of g are (r, y)-Euclidean; ghat radials stay radial", worst,
            1e-8);
  });

  // Conformality quotients along the epsilon ladder.
  const std::vector<double> ladder{1e-1, 5e-2, 2.5e-2, 1.25e-2};
  DistanceOptions qopt = fast;
  qopt.budget = 60000;

  auto emit_quotient = [&](const std::string& id, const std::string& anchor,
                           const MapChain& chain, const CartesianPoint& z, double rel_tol,
                           bool check_decay) {
    guarded(ctx, S, id, anchor, [&, id, anchor, rel_tol, check_decay] {
      QuotientTable table = conformality_quotient(chain, z, ladder, qopt, 2);
      std::string note;
      if (!ctx.cfg.csv_dir.empty()) {
        std::filesystem::create_directories(ctx.cfg.csv_dir);
        std::string name = id + ".csv";
        write_quotient_csv(table, ctx.cfg.csv_dir + "/" + name);
        ctx.rep.artifacts.push_back(name);
        note = "table: " + name;
      }
      ctx.add(S, id, anchor, table.worst_rel_error, rel_tol, note);

      if (check_decay) {
        // Error at the finest rung must undercut the coarsest rung by the
        // contraction factor, direction by direction.
        int viol = 0, total = 0;
        std::set<int> dirs;
        for (const auto& row : table.rows) dirs.insert(row.direction_id);
        for (int dir : dirs) {
          double coarse = -1.0, fine = -1.0;
          for (const auto& row : table.rows) {
            if (row.direction_id != dir) continue;
            double err = std::abs(row.quotient - table.target) /
                         std::abs(table.target);
            if (row.epsilon == ladder.front()) coarse = err;
            if (row.epsilon == ladder.back()) fine = err;
          }
          if (coarse < 1e-4) continue;  // already at the noise floor
          ++total;
          if (fine > 0.7 * coarse) ++viol;
        }
        double frac = total == 0 ? 0.0 : static_cast<double>(viol) / total;
        ctx.add(S, id + "_decay", "quotient error contracts as eps -> 0", frac, 0.0);
      }
    });
  };

  {
    auto rng = rng_at(ctx.cfg.seed, 0xd008, 0);
    double scale = std::pow(2.0, par.alpha + 1.0);  // |z|_hom = 2
    CylindricalPoint pt;
    pt.r = 0.8 * scale;
    pt.y = 0.6 * scale * unit_vec(rng, par.q);
    pt.theta = unit_vec(rng, par.p);
    CartesianPoint z = to_cartesian(par, pt);
    MapChain inv(par, {ElementaryMap::inversion()});
    emit_quotient("quotient_inversion", "Phi quotient -> |z|^-2 = 1/4 at |z|_hom = 2",
                  inv, z, 0.05, true);
  }
  {
    CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>(N / 3)]);
    MapChain dil(par, {ElementaryMap::dilation(1.6)});
    emit_quotient("quotient_dilation", "delta_t quotient -> t", dil, z, 0.02, false);
  }
  {
    auto rng = rng_at(ctx.cfg.seed, 0xd009, 0);
    CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>(2 * N / 3)]);
    MapChain iso(par, {ElementaryMap::isometry(random_orthogonal(rng, par.p),
                                               random_orthogonal(rng, par.q),
                                               gaussian(rng, par.q))});
    emit_quotient("quotient_isometry", "isometry quotient -> 1", iso, z, 0.02, false);
  }

  guarded(ctx, S, "kernel_vanishing", "L |z|^(2-Q) = 0 off the pole, Q = p + (alpha+1) q",
          [&] {
            int m = std::min(N, 24);
            double r = ctx.max_over(m, [&](int i) {
              CartesianPoint z = to_cartesian(par, pts[static_cast<size_t>(i)]);
              return harmonic_kernel_residual(par, z);
            });
            ctx.add(S, "kernel_vanishing",
                    "L |z|^(2-Q) = 0 off the pole, Q = p + (alpha+1) q", r, 1e-6);
          });

  {
    const char* id = "kernel_singular_slice";
    const char* anchor = "the kernel is L-harmonic across {x = 0} as well";
    double af = std::round(par.alpha);
    if (std::abs(par.alpha - af) > 1e-12 || af > 2.0) {
      ctx.skip(S, id, anchor, "x = 0 stencil needs alpha in {0, 1, 2}");
    } else {
      guarded(ctx, S, id, anchor, [&] {
        double r = ctx.max_over(6, [&](int i) {
          auto rng = rng_at(ctx.cfg.seed, 0xd00a, i);
          CartesianPoint z;
          z.x = VectorXd::Zero(par.p);
          z.y = unit_vec(rng, par.q) *
                std::uniform_real_distribution<double>(0.7, 1.8)(rng);
          return harmonic_kernel_residual(par, z);
        });
        ctx.add(S, id, anchor, r, 1e-6);
      });
    }
  }

  guarded(ctx, S, "kernel_newtonian", "alpha = 0 reduces to the Newtonian kernel", [&] {
    GrushinParams par0 = par;
    par0.alpha = 0.0;
    double r = ctx.max_over(8, [&](int i) {
      auto rng = rng_at(ctx.cfg.seed, 0xd00b, i);
      CartesianPoint z;
      if (i % 2 == 0) {
        z.x = unit_vec(rng, par.p) *
              std::uniform_real_distribution<double>(0.6, 1.6)(rng);
        z.y = gaussian(rng, par.q);
      } else {
        z.x = VectorXd::Zero(par.p);
        z.y = unit_vec(rng, par.q) *
              std::uniform_real_distribution<double>(0.7, 1.8)(rng);
      }
      return harmonic_kernel_residual(par0, z);
    });
    ctx.add(S, "kernel_newtonian", "alpha = 0 reduces to the Newtonian kernel", r, 1e-8);
  });
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<CylindricalPoint> sample_points(const SuiteConfig& cfg) {
  cfg.params.validate();
  if (cfg.points < 1) throw ConfigError("points must be positive");
  const int n = cfg.points;
  std::vector<CylindricalPoint> pts(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    auto rng = rng_at(cfg.seed, 0x9a3f, i);
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    CylindricalPoint z;
    z.r = 0.5 + 1.5 * ((i + u01(rng)) / n);  // stratified over [0.5, 2]
    z.theta = unit_vec(rng, cfg.params.p);
    z.y = VectorXd(cfg.params.q);
    for (int j = 0; j < cfg.params.q; ++j) z.y[j] = -1.5 + 3.0 * u01(rng);
    pts[static_cast<size_t>(i)] = z;
  }
  return pts;
}

void parallel_for(int count, int jobs, const std::function<void(int)>& fn) {
  if (count <= 0) return;
  if (jobs <= 0) jobs = static_cast<int>(std::thread::hardware_concurrency());
  if (jobs <= 0) jobs = 1;
  jobs = std::min(jobs, count);
  if (jobs == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(static_cast<size_t>(count));
  std::vector<std::thread> pool;
  pool.reserve(static_cast<size_t>(jobs));
  for (int w = 0; w < jobs; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        int i = next.fetch_add(1);
        if (i >= count) break;
        try {
          fn(i);
        } catch (...) {
          errors[static_cast<size_t>(i)] = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  for (int i = 0; i < count; ++i)
    if (errors[static_cast<size_t>(i)]) std::rethrow_exception(errors[static_cast<size_t>(i)]);
}

SuiteReport run_suite(const SuiteConfig& cfg) {
  try {
    cfg.params.validate();
  } catch (const InvalidInput& e) {
    throw ConfigError(e.what());
  }
  if (cfg.points < 1) throw ConfigError("points must be positive");

  static const std::set<std::string> known{"curvature", "cones", "conformal",
                                          "umbilic", "distance", "all"};
  bool all = false;
  std::set<std::string> wanted;
  for (const auto& s : cfg.suites) {
    if (!known.count(s)) throw ConfigError("unknown suite: " + s);
    if (s == "all")
      all = true;
    else
      wanted.insert(s);
  }
  if (cfg.suites.empty()) throw ConfigError("no suites requested");

  SuiteReport rep;
  rep.config = cfg;
  auto t0 = std::chrono::steady_clock::now();
  auto pts = sample_points(cfg);
  Ctx ctx{cfg, rep};

  const char* order[] = {"curvature", "cones", "conformal", "umbilic", "distance"};
  for (const char* name : order) {
    if (!all && !wanted.count(name)) continue;
    if (std::string(name) == "curvature") suite_curvature(ctx, pts);
    if (std::string(name) == "cones") suite_cones(ctx, pts);
    if (std::string(name) == "conformal") suite_conformal(ctx, pts);
    if (std::string(name) == "umbilic") suite_umbilic(ctx, pts);
    if (std::string(name) == "distance") suite_distance(ctx, pts);
  }

  rep.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace grushin
