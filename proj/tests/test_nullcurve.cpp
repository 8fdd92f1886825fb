#include <cmath>

#include "curvekit/catalog.hpp"
#include "curvekit/equiaffine.hpp"
#include "curvekit/nullcurve.hpp"
#include "doctest.h"
#include "fixtures.hpp"

using namespace curvekit;
using curvekit::testfix::curved_null;
using curvekit::testfix::ip;

namespace {

void check_null_tables(const MetricSystem& sys, const CurveSpec& curve,
                       double t) {
  const CovariantJet jet = covariant_jet(sys.connection, curve, t, 2);
  const Vec3 p = jet.position;
  CHECK(std::abs(ip(sys, p, jet.d1, jet.d1)) <= 1e-10);
  CHECK(std::abs(ip(sys, p, jet.cd[0], jet.cd[0]) - 1.0) <= 1e-8);
  CHECK(std::abs(ip(sys, p, jet.cd[0], jet.d1)) <= 1e-9);
  CHECK(std::abs(ip(sys, p, jet.cd[1], jet.d1) + 1.0) <= 1e-6);

  const double tau = pseudo_torsion(sys, curve, t);
  CHECK(std::abs(ip(sys, p, jet.cd[1], jet.cd[1]) - 2.0 * tau) <= 1e-6);

  const NullFrenetApparatus nf = null_frame(sys, curve, t);
  auto g2 = [&](const Vec3& u, const Vec3& v) { return ip(sys, p, u, v); };
  CHECK(std::abs(g2(nf.L, nf.N) - 1.0) <= 1e-7);
  CHECK(std::abs(g2(nf.W, nf.W) - 1.0) <= 1e-7);
  CHECK(std::abs(g2(nf.L, nf.L)) <= 1e-7);
  CHECK(std::abs(g2(nf.N, nf.N)) <= 1e-7);
  CHECK(std::abs(g2(nf.L, nf.W)) <= 1e-7);
  CHECK(std::abs(g2(nf.N, nf.W)) <= 1e-7);
  CHECK(std::abs(std::abs(volume(sys.metric, p, nf.L, nf.N, nf.W)) - 1.0) <=
        1e-6);

  double worst = 0.0;
  for (const Vec3& r : null_ode_residual(sys, curve, t)) {
    worst = std::max(worst, r.norm());
  }
  CHECK(worst <= 1e-5);
}

}  // namespace

TEST_CASE("schwarzian derivative closed values") {
  CHECK(std::abs(schwarzian(catalog_generator("linear", {{"c0", 0.0}, {"c1", 2.0}}),
                            0.4)) <= 1e-12);
  CHECK(schwarzian(catalog_generator("exponential"), -0.8) ==
        doctest::Approx(-0.5));
  CHECK(schwarzian(catalog_generator("power", {{"p", 2.0}}), 1.3) ==
        doctest::Approx(-3.0 / (2.0 * 1.3 * 1.3)));
  CHECK(std::abs(schwarzian(
            catalog_generator("moebius", {{"a", 2.0}, {"b", 1.0}, {"c", 1.0}, {"d", 3.0}}),
            0.5)) <= 1e-12);
  CHECK(schwarzian(catalog_generator("tan"), 0.3) == doctest::Approx(2.0));
}

TEST_CASE("null curve from the exponential generator") {
  auto sys = catalog_metric("minkowski3_ppm");
  const CurveSpec curve =
      minkowski_null_from_f(catalog_generator("exponential"), 0.0,
                            Vec3(0.0, 0.0, 0.0), 1);
  for (double t : {-1.0, 0.0, 1.0}) {
    CHECK(pseudo_torsion(sys, curve, t) == doctest::Approx(-0.5));
    check_null_tables(sys, curve, t);
    const auto k = null_equiaffine_curvatures(sys, curve, t);
    CHECK(std::abs(k.first) <= 1e-6);
    CHECK(std::abs(k.second - 1.0) <= 1e-8);

    // the equi-affine machinery collapses on a pseudo-arc null curve
    const EquiaffineSpeed sp = equiaffine_speed(sys, curve, t);
    CHECK(std::abs(sp.mu - 1.0) <= 1e-8);
    CHECK(std::abs(sp.phi - 1.0) <= 1e-8);
    CHECK((sp.eps == 1 || sp.eps == -1));
  }
}

TEST_CASE("pseudo-torsion profiles across the generator catalog") {
  auto sys = catalog_metric("minkowski3_ppm");

  const CurveSpec pw = minkowski_null_from_f(
      catalog_generator("power", {{"p", 2.0}}), 1.0, Vec3(0.0, 0.0, 0.0), 1);
  for (double t : {0.8, 1.5}) {
    CHECK(pseudo_torsion(sys, pw, t) ==
          doctest::Approx(-3.0 / (2.0 * t * t)).epsilon(1e-8));
    const auto k = null_equiaffine_curvatures(sys, pw, t);
    CHECK(std::abs(k.first + 3.0 / (t * t * t)) <= 1e-6);
    CHECK(std::abs(k.second - 3.0 / (t * t)) <= 1e-8);
    check_null_tables(sys, pw, t);
  }

  const CurveSpec lin = minkowski_null_from_f(
      catalog_generator("linear", {{"c0", 1.0}, {"c1", 0.5}}), 0.0,
      Vec3(1.0, 0.0, 0.0), -1);
  for (double t : {-0.5, 0.7}) {
    CHECK(std::abs(pseudo_torsion(sys, lin, t)) <= 1e-10);
    const auto k = null_equiaffine_curvatures(sys, lin, t);
    CHECK(std::abs(k.first) <= 1e-8);
    CHECK(std::abs(k.second) <= 1e-8);
  }

  const CurveSpec tn =
      minkowski_null_from_f(catalog_generator("tan"), 0.0, Vec3(0.0, 0.0, 0.0), 1);
  for (double t : {-0.9, 0.4}) {
    CHECK(pseudo_torsion(sys, tn, t) == doctest::Approx(2.0));
    const auto k = null_equiaffine_curvatures(sys, tn, t);
    CHECK(std::abs(k.first) <= 1e-6);
    CHECK(std::abs(k.second + 4.0) <= 1e-8);
    check_null_tables(sys, tn, t);
  }
}

TEST_CASE("catalog closed forms for null curves match the frame") {
  CatalogCurve cat = catalog_curve(
      "nullfromf", {{"eps", 1.0}, {"t0", 1.0}, {"p", 2.0}},
      {{"generator", "power"}});
  REQUIRE(cat.is_null);
  REQUIRE(cat.kappa1_closed);
  for (double t : {0.9, 1.4, 2.0}) {
    const auto k = null_equiaffine_curvatures(cat.system, *cat.curve, t);
    CHECK(std::abs(k.first - cat.kappa1_closed(t)) <= 1e-6);
    CHECK(std::abs(k.second - cat.kappa2_closed(t)) <= 1e-8);
  }
}

TEST_CASE("theorem-3 collapse matches the structural route off flat space") {
  auto sys = catalog_metric("example1");
  Reparametrization rep = reparametrize_pseudo_arclength(sys, curved_null(), 0.0);
  for (double s : {-1.0, 0.5, 2.0}) {
    const auto nul = null_equiaffine_curvatures(sys, rep.curve, s);
    const auto str = curvatures_structural(sys, rep.curve, s);
    CHECK(std::abs(nul.first - str.first) <= 1e-4);
    CHECK(std::abs(nul.second - str.second) <= 1e-4);
    check_null_tables(sys, rep.curve, s);
  }
}

TEST_CASE("null-curve degeneracies are typed") {
  auto sys = catalog_metric("minkowski3_ppm");

  GeneratorFunction gen;
  gen.f = [](double t) { return std::sin(t); };
  gen.d1 = [](double t) { return std::cos(t); };
  gen.d2 = [](double t) { return -std::sin(t); };
  gen.d3 = [](double t) { return -std::cos(t); };
  const CurveSpec bad =
      minkowski_null_from_f(gen, 0.0, Vec3(0.0, 0.0, 0.0), 1);
  CHECK_THROWS_AS(curve_derivative(bad, std::acos(-1.0) / 2.0, 1),
                  GeneratorDegenerate);

  // a null curve that is not pseudo-arc parametrized is rejected as such
  const CurveSpec base =
      minkowski_null_from_f(catalog_generator("exponential"), 0.0,
                            Vec3(0.0, 0.0, 0.0), 1);
  CurveSpec scaled;
  scaled.t_min = base.t_min / 2.0;
  scaled.t_max = base.t_max / 2.0;
  scaled.position = [base](double t) { return base.position(2.0 * t); };
  scaled.derivative[0] = [base](double t) {
    return (2.0 * base.derivative[0](2.0 * t)).eval();
  };
  scaled.derivative[1] = [base](double t) {
    return (4.0 * base.derivative[1](2.0 * t)).eval();
  };
  scaled.derivative[2] = [base](double t) {
    return (8.0 * base.derivative[2](2.0 * t)).eval();
  };
  CHECK_THROWS_AS(null_frame(sys, scaled, 0.3), NotPseudoArc);

  CatalogCurve spacelike = catalog_curve(
      "example1curve", {{"a", 2.0}, {"b", 2.0}, {"lambda", 1.0}});
  CHECK_THROWS_AS(null_frame(spacelike.system, *spacelike.curve, 1.0),
                  NullPointEncountered);
}
