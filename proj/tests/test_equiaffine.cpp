#include <cmath>
#include <random>

#include "curvekit/catalog.hpp"
#include "curvekit/equiaffine.hpp"
#include "curvekit/numdiff.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace curvekit;
using curvekit::testfix::ip;

namespace {

ScalarFunction reciprocal_scalar(double A) {
  ScalarFunction f;
  f.value = [A](double t) { return A / t; };
  f.d1 = [A](double t) { return -A / (t * t); };
  f.d2 = [A](double t) { return 2.0 * A / (t * t * t); };
  f.d3 = [A](double t) { return -6.0 * A / (t * t * t * t); };
  return f;
}

ScalarFunction constant_scalar(double A) {
  ScalarFunction f;
  f.value = [A](double) { return A; };
  f.d1 = [](double) { return 0.0; };
  f.d2 = [](double) { return 0.0; };
  f.d3 = [](double) { return 0.0; };
  return f;
}

// nabla_{e1} e3 assembled from a stencil over the Cartan frame field.
Vec3 frame_derivative(const CatalogCurve& cat, double t) {
  auto e3_of = [&](double u) { return cartan_frame(cat.system, *cat.curve, u).e3; };
  const double h = 1e-3 * std::fmax(1.0, std::abs(t));
  const Vec3 de3 = vector_d1_stencil4(e3_of, t, h);
  const CartanApparatus ca = cartan_frame(cat.system, *cat.curve, t);
  const CovariantJet jet = covariant_jet(cat.system.connection, *cat.curve, t, 1);
  const Christoffel gam = cat.system.connection.gamma(jet.position);
  Vec3 correction;
  for (int k = 0; k < 3; ++k) correction[k] = jet.d1.dot(gam[k] * ca.e3);
  return ca.phi * (de3 + correction);
}

}  // namespace

TEST_CASE("equi-affine speed of the first example curve") {
  CatalogCurve cat = catalog_curve(
      "example1curve", {{"a", 2.0}, {"b", 2.0}, {"lambda", 1.0}});
  for (double t : {0.5, 1.0, 2.0, 5.0}) {
    const EquiaffineSpeed sp = equiaffine_speed(cat.system, *cat.curve, t);
    const double triple = 7.5 / (t * t * t);
    CHECK(std::abs(std::pow(sp.mu, 6) - triple) / triple <= 1e-8);
    CHECK(sp.eps == 1);
    CHECK(sp.phi == doctest::Approx(1.0 / sp.mu));
  }
  CHECK(equiaffine_speed(cat.system, *cat.curve, 1.0).mu ==
        doctest::Approx(std::pow(7.5, 1.0 / 6.0)));
}

TEST_CASE("equi-affine arc length closed form and reversal") {
  CatalogCurve cat = catalog_curve(
      "example1curve", {{"a", 2.0}, {"b", 2.0}, {"lambda", 1.0}});
  const double c = std::pow(7.5, 1.0 / 6.0);
  for (double t : {0.6, 1.5, 4.0}) {
    const double sigma = equiaffine_arclength(cat.system, *cat.curve, 1.0, t);
    CHECK(std::abs(sigma - 2.0 * c * (std::sqrt(t) - 1.0)) <= 1e-8);
    CHECK(std::abs(sigma + equiaffine_arclength(cat.system, *cat.curve, t, 1.0)) <=
          1e-10);
  }
}

TEST_CASE("Cartan frame invariants") {
  CatalogCurve cat = catalog_curve(
      "example1curve", {{"a", 2.0}, {"b", 3.0}, {"lambda", 1.0}});
  for (double t : {0.5, 1.0, 2.0}) {
    const CartanApparatus ca = cartan_frame(cat.system, *cat.curve, t);
    const Vec3 p = cat.curve->position(t);
    const Vec3 d1 = curve_derivative(*cat.curve, t, 1);
    CHECK((ca.e1 - ca.phi * d1).norm() <= 1e-12);
    CHECK(std::abs(volume(cat.system.metric, p, ca.e1, ca.e2, ca.e3) - ca.eps) <=
          1e-6);

    const FrenetApparatus fr = frenet_apparatus(cat.system, *cat.curve, t);
    const double phi_ft =
        std::pow(fr.kappa, -1.0 / 3.0) * std::pow(std::abs(fr.tau), -1.0 / 6.0);
    CHECK(std::abs(ca.phi - phi_ft) <= 1e-7 * phi_ft);

    // volume of the jet triple carries eps3 kappa^2 tau
    const CovariantJet jet = covariant_jet(cat.system.connection, *cat.curve, t, 2);
    const double triple =
        volume(cat.system.metric, p, jet.d1, jet.cd[0], jet.cd[1]);
    const double expect = fr.eps3 * fr.kappa * fr.kappa * fr.tau;
    CHECK(std::abs(triple - expect) / std::abs(expect) <= 1e-6);
    CHECK(ca.eps == (triple > 0.0 ? 1 : -1));
  }
}

TEST_CASE("all three curvature routes agree and match closed forms") {
  struct Entry {
    const char* name;
    std::map<std::string, double> params;
    std::map<std::string, std::string> options;
    std::vector<double> ts;
  };
  const Entry entries[] = {
      {"example1curve", {{"a", 2.0}, {"b", 3.0}, {"lambda", 1.0}}, {}, {0.5, 1.0, 2.0, 5.0}},
      {"example2curve", {{"a", 0.5}, {"b", 0.5}}, {}, {0.5, 1.0, 2.0, 5.0}},
      {"helix", {{"r", 0.5}, {"h", 0.5}}, {{"metric", "euclidean3"}}, {0.0, 1.1}},
  };
  for (const auto& e : entries) {
    CatalogCurve cat = catalog_curve(e.name, e.params, e.options);
    for (double t : e.ts) {
      const auto dir = curvatures_direct(cat.system, *cat.curve, t);
      const auto str = curvatures_structural(cat.system, *cat.curve, t);
      CHECK(std::abs(dir.first - str.first) <= 1e-4);
      CHECK(std::abs(dir.second - str.second) <= 1e-4);
      if (cat.source) {
        const auto fre = curvatures_frenet(*cat.source, t);
        CHECK(std::abs(dir.first - fre.first) <= 1e-4);
        CHECK(std::abs(dir.second - fre.second) <= 1e-4);
      }
      if (cat.kappa1_closed) {
        const double k1 = cat.kappa1_closed(t);
        const double k2 = cat.kappa2_closed(t);
        CHECK(std::abs(dir.first - k1) <= 1e-4 * std::fmax(1.0, std::abs(k1)));
        CHECK(std::abs(dir.second - k2) <= 1e-4 * std::fmax(1.0, std::abs(k2)));
      }
    }
  }
}

TEST_CASE("frame-route curvatures match the reciprocal closed form") {
  std::mt19937 rng(99u);
  std::uniform_real_distribution<double> amp(0.5, 3.0);
  std::uniform_int_distribution<int> coin(0, 1);
  for (int n = 0; n < 20; ++n) {
    KappaTauSource src;
    const double A = amp(rng);
    const double B = (coin(rng) ? 1.0 : -1.0) * amp(rng);
    src.kappa = reciprocal_scalar(A);
    src.tau = reciprocal_scalar(B);
    src.eps1 = coin(rng) ? 1 : -1;
    src.eps2 = coin(rng) ? 1 : -1;
    src.eps3 = coin(rng) ? 1 : -1;
    for (double t : {0.5, 1.0, 3.0}) {
      const auto got = curvatures_frenet(src, t);
      const auto want = corollary_curvatures("reciprocal", A, B, src.eps1,
                                             src.eps2, src.eps3, t);
      CHECK(std::abs(got.first - want.first) <=
            1e-8 * std::fmax(1.0, std::abs(want.first)));
      CHECK(std::abs(got.second - want.second) <=
            1e-8 * std::fmax(1.0, std::abs(want.second)));
    }
  }
}

TEST_CASE("constant curvature and torsion: flat curvature profile") {
  KappaTauSource src;
  src.kappa = constant_scalar(1.0);
  src.tau = constant_scalar(1.0);
  const auto got = curvatures_frenet(src, 0.3);
  CHECK(std::abs(got.first) <= 1e-12);
  CHECK(got.second == doctest::Approx(-2.0));
  const auto want = corollary_curvatures("const", 1.0, 1.0, 1, 1, 1, 0.3);
  CHECK(want.first == 0.0);
  CHECK(want.second == doctest::Approx(-2.0));

  // the C = 0 reciprocal family is equi-affinely flat: both curvatures vanish
  const double A = std::sqrt(1.0 / 8.0);
  const auto zero = corollary_curvatures("reciprocal", A, A, 1, -1, 1, 1.7);
  CHECK(std::abs(zero.first) <= 1e-15);
  CHECK(std::abs(zero.second) <= 1e-15);
}

TEST_CASE("Cartan frame through the Frenet frame") {
  CatalogCurve cat = catalog_curve(
      "example1curve", {{"a", 2.0}, {"b", 3.0}, {"lambda", 1.0}});
  for (double t : {0.5, 1.0, 2.0}) {
    const auto viaf = cartan_from_frenet(cat.system, *cat.curve, t);
    const CartanApparatus ca = cartan_frame(cat.system, *cat.curve, t);
    CHECK((viaf[0] - ca.e1).cwiseAbs().maxCoeff() <= 1e-4);
    CHECK((viaf[1] - ca.e2).cwiseAbs().maxCoeff() <= 1e-4);
    CHECK((viaf[2] - ca.e3).cwiseAbs().maxCoeff() <= 1e-4);
  }
}

TEST_CASE("derivative of e3 stays in the e1,e2 plane") {
  CatalogCurve cat = catalog_curve(
      "example1curve", {{"a", 2.0}, {"b", 3.0}, {"lambda", 1.0}});
  for (double t : {0.8, 1.6}) {
    const CartanApparatus ca = cartan_frame(cat.system, *cat.curve, t);
    const Vec3 nabla = frame_derivative(cat, t);
    const auto dir = curvatures_direct(cat.system, *cat.curve, t);
    CHECK((nabla - dir.first * ca.e1 - dir.second * ca.e2).norm() <= 1e-4);
    const Vec3 p = cat.curve->position(t);
    const double c3 =
        ca.eps * volume(cat.system.metric, p, ca.e1, ca.e2, nabla);
    CHECK(std::abs(c3) <= 1e-5);
  }
}

TEST_CASE("vanishing curvature witness for the converse failure") {
  CatalogCurve cat = catalog_curve(
      "example1curve", {{"a", 2.0}, {"b", 2.0}, {"lambda", 1.0}});
  for (double t : {0.5, 1.0, 2.0, 5.0}) {
    const auto dir = curvatures_direct(cat.system, *cat.curve, t);
    const auto str = curvatures_structural(cat.system, *cat.curve, t);
    const auto fre = curvatures_frenet(*cat.source, t);
    for (double v : {dir.first, dir.second, fre.first, fre.second}) {
      CHECK(std::abs(v) <= 1e-5);
    }
    CHECK(std::abs(str.first) <= 1e-5);
    CHECK(std::abs(str.second) <= 1e-5);
  }
  // while kappa is anything but constant there
  const double dkappa = cat.source->kappa.d1(1.0);
  CHECK(std::abs(dkappa) >= 0.5);
}

TEST_CASE("curvature routes reject degenerate data") {
  KappaTauSource flat;
  flat.kappa = constant_scalar(0.0);
  flat.tau = constant_scalar(1.0);
  CHECK_THROWS_AS(curvatures_frenet(flat, 1.0), ZeroCurvature);

  KappaTauSource planar;
  planar.kappa = constant_scalar(1.0);
  planar.tau = constant_scalar(0.0);
  CHECK_THROWS_AS(curvatures_frenet(planar, 1.0), ZeroTorsion);

  CHECK_THROWS_AS(corollary_curvatures("const", 0.0, 1.0, 1, 1, 1, 1.0),
                  ConfigError);
  CHECK_THROWS_AS(corollary_curvatures("const", 1.0, 0.0, 1, 1, 1, 1.0),
                  ConfigError);
  CHECK_THROWS_AS(corollary_curvatures("funky", 1.0, 1.0, 1, 1, 1, 1.0),
                  ConfigError);

  auto sys = catalog_metric("euclidean3");
  CurveSpec planar_curve;
  planar_curve.t_min = -10.0;
  planar_curve.t_max = 10.0;
  planar_curve.position = [](double t) { return Vec3(t, t * t, 0.0); };
  CHECK_THROWS_AS(equiaffine_speed(sys, planar_curve, 0.5), DegenerateCurve);
}
