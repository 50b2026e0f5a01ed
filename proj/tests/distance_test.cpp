// SPDX-License-Identifier: Apache-2.0
#include <grushin/distance.hpp>

#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

using namespace grushin;

namespace {

VectorXd vec(std::initializer_list<double> vals) {
  VectorXd v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

AdmissiblePath const_controls(CartesianPoint start, const VectorXd& a,
                              const VectorXd& b, double T, int K) {
  AdmissiblePath p;
  p.start = std::move(start);
  p.times = VectorXd::LinSpaced(K + 1, 0.0, T);
  p.a = a.replicate(1, K);
  p.b = b.replicate(1, K);
  return p;
}

}  // namespace

TEST_CASE("control integration: y moves at (alpha+1)|x|^alpha b") {
  GrushinParams par{2, 1, 1.0};
  AdmissiblePath p = const_controls({vec({1.0, 0.0}), vec({0.0})},
                                    vec({0.0, 0.0}), vec({1.0}), 1.0, 8);
  Trajectory tr = integrate_controls(par, p);
  CHECK((tr.z.back().x - vec({1.0, 0.0})).norm() < 1e-12);
  CHECK(tr.z.back().y[0] == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("path length and metric costs") {
  GrushinParams par{2, 1, 1.0};
  AdmissiblePath p = const_controls({vec({1.0, 0.0}), vec({0.0})},
                                    vec({3.0, 0.0}), vec({4.0}), 1.0, 6);
  CHECK(path_length(p) == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(path_cost(par, p, MetricKind::ghat) == doctest::Approx(5.0).epsilon(1e-10));

  // Pure x-motion from x = (1,0): g-speed 2(1+t), cost = int_0^1 = 3.
  AdmissiblePath px = const_controls({vec({1.0, 0.0}), vec({0.0})},
                                     vec({1.0, 0.0}), vec({0.0}), 1.0, 6);
  CHECK(path_cost(par, px, MetricKind::g) == doctest::Approx(3.0).epsilon(1e-8));
}

TEST_CASE("g-geodesics with no sphere motion run straight in (r, y)") {
  GrushinParams par{3, 1, 1.0};
  GeodesicState s;
  s.pos.r = 1.0;
  s.pos.y = vec({0.0});
  s.pos.theta = vec({0.0, 1.0, 0.0});
  s.vel.base = s.pos;
  s.vel.dr = 0.6;
  s.vel.dy = vec({0.8});
  s.vel.dtheta = VectorXd::Zero(3);
  s.metric = MetricKind::g;
  auto states = geodesic_ivp(par, s, 0.5);
  const GeodesicState& e = states.back();
  CHECK(e.pos.r == doctest::Approx(1.3).epsilon(1e-9));
  CHECK(e.pos.y[0] == doctest::Approx(0.4).epsilon(1e-9));
  CHECK((e.pos.theta - s.pos.theta).norm() < 1e-9);
}

TEST_CASE("ghat radial geodesics advance sqrt(r) linearly (alpha = 1)") {
  GrushinParams par{3, 1, 1.0};
  GeodesicState s;
  s.pos.r = 1.0;
  s.pos.y = vec({0.2});
  s.pos.theta = vec({1.0, 0.0, 0.0});
  s.vel.base = s.pos;
  s.vel.dr = 2.0;  // ghat(d_r, d_r) = 1/(4r): unit speed at r = 1
  s.vel.dy = vec({0.0});
  s.vel.dtheta = VectorXd::Zero(3);
  s.metric = MetricKind::ghat;
  auto states = geodesic_ivp(par, s, 0.5);
  const GeodesicState& e = states.back();
  CHECK(e.pos.r == doctest::Approx(2.25).epsilon(1e-7));
  CHECK(e.pos.y[0] == doctest::Approx(0.2).epsilon(1e-9));
  CHECK((e.pos.theta - s.pos.theta).norm() < 1e-9);
}

TEST_CASE("geodesics stopping at the guard raise") {
  GrushinParams par{3, 1, 1.0};
  GeodesicState s;
  s.pos.r = 0.05;
  s.pos.y = vec({0.0});
  s.pos.theta = vec({1.0, 0.0, 0.0});
  s.vel.base = s.pos;
  s.vel.dr = -1.0;
  s.vel.dy = vec({0.0});
  s.vel.dtheta = VectorXd::Zero(3);
  s.metric = MetricKind::g;
  CHECK_THROWS_AS((void)geodesic_ivp(par, s, 0.2), LeftRiemannianRegion);
}

TEST_CASE("control distance along the x-axis is the Euclidean gap") {
  GrushinParams par{2, 1, 1.0};
  DistanceOptions opt;
  opt.seed = 3;
  opt.intervals = 16;
  opt.multistarts = 2;
  opt.budget = 150000;
  DistanceResult res = distance_upper_bound(par, {vec({0.0, 0.0}), vec({0.0})},
                                            {vec({0.8, 0.0}), vec({0.0})}, opt);
  CHECK(res.d_hat >= 0.8 - 1e-9);  // genuine upper bound
  CHECK(res.d_hat == doctest::Approx(0.8).epsilon(2e-3));
  CHECK(res.endpoint_gap < 1e-6);
}

TEST_CASE("quotients under a dilation extrapolate to t") {
  GrushinParams par{2, 1, 1.0};
  MapChain chain(par, {ElementaryMap::dilation(1.6)});
  CartesianPoint z{vec({1.0, 0.0}), vec({0.3})};
  DistanceOptions opt;
  opt.seed = 9;
  opt.intervals = 12;
  opt.multistarts = 2;
  opt.max_iterations = 100;
  opt.budget = 60000;
  QuotientTable table =
      conformality_quotient(chain, z, {1e-1, 5e-2}, opt, 2);
  CHECK(table.target == doctest::Approx(1.6).epsilon(1e-12));
  CHECK(table.worst_rel_error < 0.05);
  // directions = n-frame (3) + 2 random, two rungs each
  CHECK(table.rows.size() == 10);

  std::string path = "quotient_test_tmp.csv";
  write_quotient_csv(table, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "epsilon,direction_id,quotient,extrapolated,target,rel_error");
  int lines = 0;
  for (std::string line; std::getline(in, line);)
    if (!line.empty()) ++lines;
  CHECK(lines == 10);
  in.close();
  std::remove(path.c_str());
}

TEST_CASE("homogeneous kernel is harmonic for the degenerate Laplacian") {
  GrushinParams par{3, 1, 1.0};
  CHECK(harmonic_kernel_residual(par, {vec({0.9, 0.3, -0.2}), vec({0.5})}) < 1e-6);
  CHECK(harmonic_kernel_residual(par, {vec({0.0, 0.0, 0.0}), vec({1.2})}) < 1e-6);

  // alpha = 0 collapses to the Newtonian kernel |z|^(2-n) on R^4.
  GrushinParams par0{3, 1, 0.0};
  CHECK(harmonic_kernel_residual(par0, {vec({0.8, -0.4, 0.1}), vec({0.6})}) < 1e-8);
  CHECK(harmonic_kernel_residual(par0, {vec({0.0, 0.0, 0.0}), vec({1.0})}) < 1e-8);

  CHECK_THROWS_AS((void)harmonic_kernel_residual(par, {vec({1e-3, 0.0, 0.0}), vec({0.0})}),
                  DomainViolation);
}
