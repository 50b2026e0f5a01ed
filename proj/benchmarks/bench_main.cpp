// SPDX-License-Identifier: Apache-2.0
// Hot-path benchmarks: the FD curvature pipeline dominates the verification
// suites, the control optimizer dominates the distance suite.

#include <grushin/distance.hpp>
#include <grushin/suites.hpp>

#include <benchmark/benchmark.h>

using namespace grushin;

namespace {

VectorXd sample_coords(const GrushinParams& par) {
  SuiteConfig cfg;
  cfg.params = par;
  cfg.seed = 7;
  cfg.points = 1;
  CartesianPoint z = to_cartesian(par, sample_points(cfg)[0]);
  VectorXd u(par.n());
  u << z.x, z.y;
  return u;
}

void BM_ChristoffelFd(benchmark::State& state) {
  GrushinParams par{static_cast<int>(state.range(0)), 2, 1.0};
  GrushinCartesian M(par, MetricKind::g);
  VectorXd u = sample_coords(par);
  for (auto _ : state)
    benchmark::DoNotOptimize(christoffel_fd(M, u, FdOptions{1e-4, 2}));
}
BENCHMARK(BM_ChristoffelFd)->Arg(3)->Arg(4)->Arg(6);

void BM_RiemannFd(benchmark::State& state) {
  GrushinParams par{static_cast<int>(state.range(0)), 2, 1.0};
  GrushinCartesian M(par, MetricKind::g);
  VectorXd u = sample_coords(par);
  for (auto _ : state)
    benchmark::DoNotOptimize(riemann_fd(M, u, FdOptions{1e-4, 2}));
}
BENCHMARK(BM_RiemannFd)->Arg(3)->Arg(4)->Arg(6);

void BM_RiemannClosed(benchmark::State& state) {
  GrushinParams par{static_cast<int>(state.range(0)), 2, 1.0};
  VectorXd u = sample_coords(par);
  CartesianPoint z{u.head(par.p), u.tail(par.q)};
  for (auto _ : state)
    benchmark::DoNotOptimize(riemann_closed_cartesian(par, z));
}
BENCHMARK(BM_RiemannClosed)->Arg(3)->Arg(4)->Arg(6);

void BM_ConeSearch(benchmark::State& state) {
  GrushinParams par{4, 2, 1.0};
  SuiteConfig cfg;
  cfg.params = par;
  cfg.seed = 11;
  cfg.points = 1;
  CylindricalPoint pt = sample_points(cfg)[0];
  MatrixXd basis = sphere_tangent_basis(pt.theta);
  CylindricalVector v;
  v.base = pt;
  v.dr = 0.6;
  v.dy = VectorXd::Zero(2);
  v.dtheta = basis.col(0) * 0.8 / ((par.alpha + 1.0) * pt.r);
  ConeOptions opt;
  opt.mode = ConeMode::WeylSearch;
  opt.trials = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(cone_membership(par, pt, v, opt));
}
BENCHMARK(BM_ConeSearch)->Arg(100)->Arg(500);

void BM_DistanceUpperBound(benchmark::State& state) {
  GrushinParams par{2, 1, 1.0};
  CartesianPoint a{VectorXd::Zero(2), VectorXd::Zero(1)};
  VectorXd bx(2);
  bx << 0.5, 0.2;
  CartesianPoint b{bx, 0.4 * VectorXd::Ones(1)};
  DistanceOptions opt;
  opt.intervals = static_cast<int>(state.range(0));
  opt.multistarts = 1;
  opt.max_iterations = 80;
  opt.budget = 40000;
  opt.seed = 3;
  for (auto _ : state)
    benchmark::DoNotOptimize(distance_upper_bound(par, a, b, opt));
}
BENCHMARK(BM_DistanceUpperBound)->Arg(8)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_GeodesicIvp(benchmark::State& state) {
  GrushinParams par{3, 1, 1.0};
  GeodesicState s;
  s.pos.r = 1.0;
  s.pos.y = VectorXd::Zero(1);
  s.pos.theta = VectorXd::Unit(3, 0);
  s.vel.base = s.pos;
  s.vel.dr = 0.5;
  s.vel.dy = 0.5 * VectorXd::Ones(1);
  s.vel.dtheta = 0.5 * VectorXd::Unit(3, 1);
  s.metric = MetricKind::g;
  for (auto _ : state) benchmark::DoNotOptimize(geodesic_ivp(par, s, 0.4));
}
BENCHMARK(BM_GeodesicIvp)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
