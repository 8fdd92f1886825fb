#include <cmath>
#include <random>

#include "curvekit/catalog.hpp"
#include "curvekit/frenet.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace curvekit;
using curvekit::testfix::ip;

namespace {

void check_frame_algebra(const CatalogCurve& cat, double t, double tol) {
  const FrenetApparatus fr = frenet_apparatus(cat.system, *cat.curve, t);
  const Vec3 p = cat.curve->position(t);
  auto g2 = [&](const Vec3& u, const Vec3& v) { return ip(cat.system, p, u, v); };

  CHECK(std::abs(g2(fr.T, fr.T) - fr.eps1) <= tol);
  CHECK(std::abs(g2(fr.N, fr.N) - fr.eps2) <= tol);
  CHECK(std::abs(g2(fr.B, fr.B) - fr.eps3) <= tol);
  CHECK(std::abs(g2(fr.T, fr.N)) <= tol);
  CHECK(std::abs(g2(fr.T, fr.B)) <= tol);
  CHECK(std::abs(g2(fr.N, fr.B)) <= tol);

  const int omega = signature_sign(cat.system.metric, p);
  CHECK(fr.eps3 == omega * fr.eps1 * fr.eps2);
  CHECK(volume(cat.system.metric, p, fr.T, fr.N, fr.B) == doctest::Approx(1.0));

  // the frame closes under the metric cross product
  auto cr = [&](const Vec3& u, const Vec3& v) {
    return cross(cat.system.metric, p, u, v);
  };
  CHECK((cr(fr.T, fr.N) - double(fr.eps3) * fr.B).norm() <= 1e-8);
  CHECK((cr(fr.N, fr.B) - double(fr.eps1) * fr.T).norm() <= 1e-8);
  CHECK((cr(fr.B, fr.T) - double(fr.eps2) * fr.N).norm() <= 1e-8);
}

double worst_ode_residual(const CatalogCurve& cat, double t) {
  const auto res = frenet_ode_residual(cat.system, *cat.curve, t);
  double w = 0.0;
  for (const Vec3& r : res) w = std::max(w, r.norm());
  return w;
}

}  // namespace

TEST_CASE("euclidean helix curvature and torsion") {
  CatalogCurve cat = catalog_curve("helix", {{"r", 0.5}, {"h", 0.5}},
                                   {{"metric", "euclidean3"}});
  for (double t : {0.0, 0.8, 2.4}) {
    const FrenetApparatus fr = frenet_apparatus(cat.system, *cat.curve, t);
    CHECK(std::abs(fr.kappa - 1.0) <= 1e-10);
    CHECK(std::abs(fr.tau - 1.0) <= 1e-8);
    CHECK(fr.eps1 == 1);
    CHECK(fr.eps2 == 1);
    CHECK(fr.eps3 == 1);
    check_frame_algebra(cat, t, 1e-8);
    CHECK(worst_ode_residual(cat, t) <= 1e-8);
  }
}

TEST_CASE("minkowski helices hit the designed constants") {
  // spacelike: r = 4/3, h = -2/3 gives kappa = 1, tau = 1/2
  CatalogCurve sp = catalog_curve("helix", {{"r", 4.0 / 3.0}, {"h", -2.0 / 3.0}},
                                  {{"metric", "minkowski3_ppm"}});
  const FrenetApparatus fs = frenet_apparatus(sp.system, *sp.curve, 0.7);
  CHECK(std::abs(fs.kappa - 1.0) <= 1e-9);
  CHECK(std::abs(fs.tau - 0.5) <= 1e-8);
  CHECK(fs.eps1 == 1);
  CHECK(fs.eps2 == 1);
  CHECK(fs.eps3 == -1);
  check_frame_algebra(sp, 0.7, 1e-8);

  // timelike: r = 2/3, h = 4/3 gives kappa = 1/2, tau = 1
  CatalogCurve tl = catalog_curve("helix", {{"r", 2.0 / 3.0}, {"h", 4.0 / 3.0}},
                                  {{"metric", "minkowski3_ppm"}});
  const FrenetApparatus ft = frenet_apparatus(tl.system, *tl.curve, -0.3);
  CHECK(std::abs(ft.kappa - 0.5) <= 1e-9);
  CHECK(std::abs(ft.tau - 1.0) <= 1e-8);
  CHECK(ft.eps1 == -1);
  CHECK(ft.eps2 == 1);
  CHECK(ft.eps3 == 1);
  check_frame_algebra(tl, -0.3, 1e-8);
  CHECK(worst_ode_residual(tl, -0.3) <= 1e-8);
}

TEST_CASE("example curve closed-form curvature and torsion") {
  // spacelike triple
  CatalogCurve cat = catalog_curve(
      "example1curve", {{"a", 2.0}, {"b", 3.0}, {"lambda", 1.0}});
  const double P = (4.0 + 1.0) * (9.0 - 1.0);
  for (double t : {0.5, 1.0, 2.0, 5.0}) {
    const FrenetApparatus fr = frenet_apparatus(cat.system, *cat.curve, t);
    CHECK(std::abs(fr.kappa - std::sqrt(P) / (2.0 * t)) / (std::sqrt(P) / (2.0 * t)) <=
          1e-7);
    CHECK(std::abs(fr.tau - (-3.0 / t)) / (3.0 / t) <= 1e-7);
    CHECK(fr.eps1 == 1);
    CHECK(fr.eps2 == 1);
    CHECK(fr.eps3 == -1);
    CHECK(fr.eps == 1);
    check_frame_algebra(cat, t, 1e-8);
    CHECK(worst_ode_residual(cat, t) <= 1e-6);
  }

  // timelike triple: lambda = -1 flips eps1 and the sign of tau
  CatalogCurve tl = catalog_curve(
      "example1curve", {{"a", 2.0}, {"b", 2.0}, {"lambda", -1.0}});
  const double Pt = (4.0 - 1.0) * (4.0 + 1.0);
  for (double t : {0.5, 1.0, 2.0}) {
    const FrenetApparatus fr = frenet_apparatus(tl.system, *tl.curve, t);
    CHECK(std::abs(fr.kappa - std::sqrt(Pt) / (2.0 * t)) <= 1e-7 * fr.kappa);
    CHECK(std::abs(fr.tau - 2.0 / t) <= 1e-7 * std::abs(fr.tau));
    CHECK(fr.eps1 == -1);
    CHECK(fr.eps2 == 1);
    CHECK(fr.eps3 == 1);
    check_frame_algebra(tl, t, 1e-8);
  }

  CatalogCurve ex2 = catalog_curve("example2curve", {{"a", 0.5}, {"b", 0.5}});
  for (double t : {0.5, 1.0, 2.0, 5.0}) {
    const FrenetApparatus fr = frenet_apparatus(ex2.system, *ex2.curve, t);
    CHECK(std::abs(fr.kappa - 1.5 / t) <= 1e-7 * fr.kappa);
    CHECK(std::abs(fr.tau + 0.5 / t) <= 1e-7 * std::abs(fr.tau));
    CHECK(fr.eps1 == 1);
    CHECK(fr.eps2 == 1);
    CHECK(fr.eps3 == -1);
    check_frame_algebra(ex2, t, 1e-8);
    CHECK(worst_ode_residual(ex2, t) <= 1e-6);
  }
}

TEST_CASE("Lagrange identity ties the cross square to the Gram minor") {
  for (auto params : {std::map<std::string, double>{{"a", 2.0}, {"b", 3.0}, {"lambda", 1.0}},
                      std::map<std::string, double>{{"a", 2.0}, {"b", 2.0}, {"lambda", 1.0}}}) {
    CatalogCurve cat = catalog_curve("example1curve", params);
    for (double t : {0.5, 1.0, 3.0}) {
      const CovariantJet jet = covariant_jet(cat.system.connection, *cat.curve, t, 1);
      const Vec3 p = jet.position;
      const Vec3 c = cross(cat.system.metric, p, jet.d1, jet.cd[0]);
      const double lhs = ip(cat.system, p, c, c);
      const double omega = signature_sign(cat.system.metric, p);
      const double rhs =
          omega * (ip(cat.system, p, jet.d1, jet.d1) *
                       ip(cat.system, p, jet.cd[0], jet.cd[0]) -
                   std::pow(ip(cat.system, p, jet.d1, jet.cd[0]), 2));
      CHECK(std::abs(lhs - rhs) / (1.0 + std::abs(rhs)) <= 1e-8);
    }
  }
}

TEST_CASE("degenerate inputs raise typed errors") {
  auto sys = catalog_metric("euclidean3");
  CurveSpec line;
  line.t_min = -10.0;
  line.t_max = 10.0;
  line.position = [](double t) { return Vec3(t, 0.0, 0.0); };
  line.derivative[0] = [](double) { return Vec3(1.0, 0.0, 0.0); };
  line.derivative[1] = [](double) { return Vec3(0.0, 0.0, 0.0); };
  CHECK_THROWS_AS(frenet_apparatus(sys, line, 0.5), DegenerateCurve);

  CurveSpec fast;
  fast.t_min = -10.0;
  fast.t_max = 10.0;
  fast.position = [](double t) { return Vec3(std::cos(2.0 * t), std::sin(2.0 * t), 0.0); };
  CHECK_THROWS_AS(frenet_apparatus(sys, fast, 0.5), NotUnitSpeed);
}
