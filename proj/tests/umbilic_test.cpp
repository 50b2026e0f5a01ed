// SPDX-License-Identifier: Apache-2.0
#include <grushin/umbilic.hpp>

#include <doctest.h>

#include <cmath>

using namespace grushin;

namespace {

VectorXd vec(std::initializer_list<double> vals) {
  VectorXd v(static_cast<int>(vals.size()));
  int i = 0;
  for (double x : vals) v[i++] = x;
  return v;
}

MatrixXd rot_xy(double angle) {
  MatrixXd A = MatrixXd::Identity(3, 3);
  A(0, 0) = A(1, 1) = std::cos(angle);
  A(0, 1) = -std::sin(angle);
  A(1, 0) = std::sin(angle);
  return A;
}

}  // namespace

TEST_CASE("unit normals of the frozen family members") {
  GrushinParams par{3, 1, 1.0};

  // A1 at x = e1, y = 0, c = 1: N = -d_r, i.e. dx = -theta/2 for alpha = 1.
  HypersurfaceSpec sphere = surface_of(par, SurfaceFamily::sphere(vec({0.0}), 1.0));
  CartesianPoint z1{vec({1.0, 0.0, 0.0}), vec({0.0})};
  CartesianVector n1 = unit_normal(sphere, z1);
  CHECK((n1.dx - vec({-0.5, 0.0, 0.0})).norm() < 1e-12);
  CHECK(n1.dy.cwiseAbs().maxCoeff() < 1e-12);

  // B plane <e1, x> = 0 at x = e2: metric gradient of x_1 scaled to g-unit.
  HypersurfaceSpec plane = surface_of(par, SurfaceFamily::x_plane(vec({1.0, 0.0, 0.0})));
  CartesianPoint z2{vec({0.0, 1.0, 0.0}), vec({0.3})};
  CartesianVector n2 = unit_normal(plane, z2);
  CHECK((n2.dx - vec({0.5, 0.0, 0.0})).norm() < 1e-12);
  CHECK(n2.dy.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("spheres are umbilic with principal curvature 1/c") {
  GrushinParams par{3, 1, 1.0};
  SurfaceFamily fam = SurfaceFamily::sphere(vec({0.4}), 1.3);
  HypersurfaceSpec spec = surface_of(par, fam);
  for (const CartesianPoint& z : sample_surface(par, fam, 8, 17)) {
    ShapeReport rep = shape_operator(spec, z);
    CHECK(umbilicity_residual(rep) < 1e-8);
    CHECK(rep.kappa == doctest::Approx(1.0 / 1.3).epsilon(1e-8));
    CHECK(rep.asymmetry < 1e-6);
  }
}

TEST_CASE("planes are umbilic and geodesic") {
  GrushinParams par{3, 1, 1.0};
  for (const SurfaceFamily& fam :
       {SurfaceFamily::y_plane(vec({1.0}), 0.7),
        SurfaceFamily::x_plane(vec({0.0, 1.0, 0.0}))}) {
    HypersurfaceSpec spec = surface_of(par, fam);
    for (const CartesianPoint& z : sample_surface(par, fam, 8, 23)) {
      ShapeReport rep = shape_operator(spec, z);
      CHECK(umbilicity_residual(rep) < 1e-8);
      CHECK(std::abs(rep.kappa) < 1e-8);
    }
  }
}

TEST_CASE("warped-chart route agrees with the Cartesian one") {
  GrushinParams par{3, 1, 1.0};
  SurfaceFamily fam = SurfaceFamily::sphere(vec({0.2}), 1.1);
  HypersurfaceSpec spec = surface_of(par, fam);
  CartesianPoint z = sample_surface(par, fam, 4, 31)[1];
  ShapeOptions warped;
  warped.mode = ShapeMode::WarpedChart;
  ShapeReport a = shape_operator(spec, z);
  ShapeReport b = shape_operator(spec, z, warped);
  CHECK((a.principal - b.principal).cwiseAbs().maxCoeff() < 1e-6);
}

TEST_CASE("Codazzi holds on a sphere") {
  GrushinParams par{3, 1, 1.0};
  HypersurfaceSpec spec = surface_of(par, SurfaceFamily::sphere(vec({0.0}), 1.0));
  CartesianPoint z{vec({0.6, 0.0, 0.0}), vec({std::sqrt(1.0 - 0.1296)})};
  // Coordinate tangents: dF = (4 |x|^2 x, 2 y) at z.
  VectorXd U = vec({0.0, 1.0, 0.0, 0.0});
  VectorXd V = vec({0.0, 0.0, 1.0, 0.0});
  VectorXd Z = vec({2.0 * z.y[0], 0.0, 0.0, -4.0 * 0.36 * 0.6});
  CHECK(codazzi_residual(spec, z, U, V, Z) < 1e-5);
  CHECK(codazzi_residual(spec, z, U, Z, V) < 1e-5);
}

TEST_CASE("a non-umbilic quadric is flagged") {
  GrushinParams par{3, 1, 1.0};
  HypersurfaceSpec quad;
  quad.params = par;
  quad.F = [](const CartesianPoint& z) { return z.y[0] - z.x.squaredNorm(); };
  quad.grad = [](const CartesianPoint& z) {
    VectorXd g(4);
    g << -2.0 * z.x, 1.0;
    return g;
  };
  CartesianPoint z{vec({0.9, 0.2, -0.3}), vec({0.94})};
  ShapeReport rep = shape_operator(quad, z);
  CHECK(umbilicity_residual(rep) > 1e-2);

  std::vector<CartesianPoint> cloud;
  for (double s : {0.7, 0.9, 1.1, 1.3, 0.8, 1.2}) {
    CartesianPoint w{vec({0.9 * s, 0.2, -0.3 * s}), vec({0.0})};
    w.y[0] = w.x.squaredNorm();
    cloud.push_back(w);
  }
  CHECK_THROWS_AS((void)family_classifier(quad, cloud), InvalidInput);
}

TEST_CASE("cone obstruction matches the normal type") {
  GrushinParams par{3, 1, 1.0};
  CylindricalPoint pt;
  pt.r = 1.0;
  pt.y = vec({0.2});
  pt.theta = vec({0.0, 1.0, 0.0});
  MatrixXd basis = sphere_tangent_basis(pt.theta);

  CylindricalVector h;  // pure horizontal: A1/A2 normals live here
  h.base = pt;
  h.dr = -1.0;
  h.dy = vec({0.4});
  h.dtheta = VectorXd::Zero(3);
  CHECK_FALSE(cone_obstruction(par, pt, h));

  CylindricalVector s;  // pure spherical: B normals
  s.base = pt;
  s.dy = vec({0.0});
  s.dtheta = basis.col(0) * 0.3;
  CHECK_FALSE(cone_obstruction(par, pt, s));

  CylindricalVector m = h;  // mixed: no umbilic surface admits this normal
  m.dtheta = basis.col(0) * 0.3;
  CHECK(cone_obstruction(par, pt, m));

  // p = 2 is flat: nothing is obstructed.
  GrushinParams flat{2, 1, 1.0};
  CylindricalPoint pf;
  pf.r = 1.0;
  pf.y = vec({0.0});
  pf.theta = vec({1.0, 0.0});
  CylindricalVector mf;
  mf.base = pf;
  mf.dr = 0.5;
  mf.dy = vec({0.0});
  mf.dtheta = vec({0.0, 0.5});
  CHECK_FALSE(cone_obstruction(flat, pf, mf));

  GrushinParams line{1, 1, 1.0};
  CylindricalPoint pl;
  pl.r = 1.0;
  pl.y = vec({0.0});
  pl.theta = vec({1.0});
  CylindricalVector vl;
  vl.base = pl;
  vl.dr = 1.0;
  vl.dy = vec({0.0});
  vl.dtheta = VectorXd::Zero(1);
  CHECK_THROWS_AS((void)cone_obstruction(line, pl, vl), DimensionTooSmall);
}

TEST_CASE("classifier recovers each family from its samples") {
  GrushinParams par{3, 1, 1.0};
  {
    SurfaceFamily fam = SurfaceFamily::sphere(vec({0.3}), 0.9);
    ClassifiedFamily got = family_classifier(surface_of(par, fam),
                                             sample_surface(par, fam, 14, 41));
    CHECK(got.family.type == SurfaceFamily::Type::A1);
    CHECK(got.family.c == doctest::Approx(0.9).epsilon(1e-6));
    CHECK(got.residual < 1e-6);
  }
  {
    SurfaceFamily fam = SurfaceFamily::y_plane(vec({1.0}), -0.4);
    ClassifiedFamily got = family_classifier(surface_of(par, fam),
                                             sample_surface(par, fam, 14, 43));
    CHECK(got.family.type == SurfaceFamily::Type::A2);
    CHECK(got.residual < 1e-6);
  }
  {
    SurfaceFamily fam = SurfaceFamily::x_plane(vec({0.0, 0.6, 0.8}));
    ClassifiedFamily got = family_classifier(surface_of(par, fam),
                                             sample_surface(par, fam, 14, 47));
    CHECK(got.family.type == SurfaceFamily::Type::B);
    CHECK(got.residual < 1e-6);
  }
}

TEST_CASE("inversion image of an off-center sphere classifies as A1") {
  GrushinParams par{3, 1, 1.0};
  SurfaceFamily fam = SurfaceFamily::sphere(vec({0.4}), 0.7);  // 0 not on surface
  HypersurfaceSpec spec = surface_of(par, fam);
  MapChain inv(par, {ElementaryMap::inversion()});
  HypersurfaceSpec image = pullback_spec(spec, inv);  // involution: same map

  std::vector<CartesianPoint> mapped;
  for (const CartesianPoint& z : sample_surface(par, fam, 14, 53))
    mapped.push_back(inv.apply(z));
  ClassifiedFamily got = family_classifier(image, mapped);
  CHECK(got.family.type == SurfaceFamily::Type::A1);
  CHECK(got.residual < 1e-6);
}

TEST_CASE("B planes map to B planes under the isometry group") {
  GrushinParams par{3, 1, 1.0};
  MatrixXd A = rot_xy(0.6);
  MapChain fwd(par, {ElementaryMap::isometry(A, MatrixXd::Identity(1, 1), vec({0.2})),
                     ElementaryMap::dilation(1.4)});
  MapChain bwd(par, {ElementaryMap::dilation(1.0 / 1.4),
                     ElementaryMap::isometry(A.transpose(), MatrixXd::Identity(1, 1),
                                             vec({-0.2}))});
  SurfaceFamily fam = SurfaceFamily::x_plane(vec({1.0, 0.0, 0.0}));
  HypersurfaceSpec image = pullback_spec(surface_of(par, fam), bwd);

  std::vector<CartesianPoint> mapped;
  for (const CartesianPoint& z : sample_surface(par, fam, 12, 59))
    mapped.push_back(fwd.apply(z));
  ClassifiedFamily got = family_classifier(image, mapped);
  CHECK(got.family.type == SurfaceFamily::Type::B);
  CHECK(got.residual < 1e-6);
  CHECK(std::abs(got.family.a.dot(A.col(0))) == doctest::Approx(1.0).epsilon(1e-8));
}
