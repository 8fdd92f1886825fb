#include <cmath>
#include <random>

#include "curvekit/manifold.hpp"
#include "curvekit/numdiff.hpp"
#include "doctest.h"

using namespace curvekit;

namespace {

Vec3 random_point(std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  return Vec3(u(rng), u(rng), u(rng));
}

// Worst residual of the seven cross-product identities plus the Gram
// identity, normalized by the magnitude of the terms involved.
double identity_worst(const ChartMetric& metric, const Vec3& p,
                      std::mt19937& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto vec = [&]() { return Vec3(u(rng), u(rng), u(rng)); };
  const Vec3 X = vec(), Y = vec(), Z = vec(), W = vec();
  auto g2 = [&](const Vec3& a, const Vec3& b) { return inner(metric, p, a, b); };
  auto cr = [&](const Vec3& a, const Vec3& b) { return cross(metric, p, a, b); };
  auto vol = [&](const Vec3& a, const Vec3& b, const Vec3& c) {
    return volume(metric, p, a, b, c);
  };
  const double omega = signature_sign(metric, p);
  double worst = 0.0;
  auto rel = [&](double resid, double scale) {
    worst = std::max(worst, std::abs(resid) / (1.0 + std::abs(scale)));
  };

  rel((cr(X, Y) + cr(Y, X)).norm(), cr(X, Y).norm());
  rel(g2(cr(X, Y), X), cr(X, Y).norm() * X.norm());
  rel(g2(cr(X, Y), Y), cr(X, Y).norm() * Y.norm());

  const Vec3 bac = omega * (-g2(Y, Z) * X + g2(X, Z) * Y);
  rel((cr(cr(X, Y), Z) - bac).norm(), bac.norm());

  rel((cr(cr(X, Y), Z) + cr(cr(Y, Z), X) + cr(cr(Z, X), Y)).norm(),
      cr(cr(X, Y), Z).norm());

  rel(g2(cr(X, Y), cr(X, Y)) - omega * (g2(X, X) * g2(Y, Y) - g2(X, Y) * g2(X, Y)),
      g2(X, X) * g2(Y, Y));

  rel(g2(cr(X, Y), cr(Z, W)) - omega * (g2(X, Z) * g2(Y, W) - g2(X, W) * g2(Y, Z)),
      g2(X, Z) * g2(Y, W));

  const Vec3 dbl = omega * (vol(X, Y, W) * Z - vol(X, Y, Z) * W);
  rel((cr(cr(X, Y), cr(Z, W)) - dbl).norm(), dbl.norm());

  // Gram identity for two triples
  const Vec3 U1 = vec(), U2 = vec(), U3 = vec();
  Mat3 gram;
  const Vec3 us[3] = {U1, U2, U3};
  const Vec3 vs[3] = {X, Y, Z};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) gram(i, j) = g2(us[i], vs[j]);
  rel(vol(U1, U2, U3) * vol(X, Y, Z) - omega * gram.determinant(),
      vol(U1, U2, U3) * vol(X, Y, Z));
  return worst;
}

// Gram-Schmidt with respect to g; may fail on unlucky draws (null
// directions), in which case the caller skips the tuple.
bool orthonormal_volume(const ChartMetric& metric, const Vec3& p,
                        std::mt19937& rng, double* out) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  auto g2 = [&](const Vec3& a, const Vec3& b) { return inner(metric, p, a, b); };
  Vec3 e[3];
  double sign[3];
  for (int i = 0; i < 3; ++i) {
    Vec3 v(u(rng), u(rng), u(rng));
    for (int j = 0; j < i; ++j) v -= sign[j] * g2(v, e[j]) * e[j];
    const double q = g2(v, v);
    if (std::abs(q) < 1e-6) return false;
    sign[i] = q > 0.0 ? 1.0 : -1.0;
    e[i] = v / std::sqrt(std::abs(q));
  }
  *out = std::abs(volume(metric, p, e[0], e[1], e[2]));
  return true;
}

}  // namespace

TEST_CASE("catalog metrics evaluate and classify") {
  auto e3 = catalog_metric("euclidean3");
  auto m3 = catalog_metric("minkowski3_ppm");
  auto ex1 = catalog_metric("example1");
  auto ex2 = catalog_metric("example2");
  const Vec3 origin(0.0, 0.0, 0.0);

  CHECK(signature_sign(e3.metric, origin) == 1);
  CHECK(signature_sign(m3.metric, origin) == -1);
  CHECK(signature_sign(ex1.metric, origin) == -1);
  CHECK(signature_sign(ex2.metric, origin) == -1);

  const Vec3 p(0.0, 0.0, std::log(2.0));
  const Mat3 g = metric_eval(ex1.metric, p);
  CHECK(g(0, 0) == doctest::Approx(4.0));
  CHECK(g(1, 1) == doctest::Approx(4.0));
  CHECK(g(2, 2) == doctest::Approx(-4.0));
  CHECK(std::abs(g(0, 1)) + std::abs(g(0, 2)) + std::abs(g(1, 2)) == 0.0);

  // sqrt|det g| = 8 there, so the coordinate triple has volume 8
  CHECK(volume(ex1.metric, p, Vec3(1, 0, 0), Vec3(0, 1, 0), Vec3(0, 0, 1)) ==
        doctest::Approx(8.0));

  CHECK_THROWS_AS(catalog_metric("no_such_metric"), UnknownCatalogEntry);
}

TEST_CASE("metric cross product orientation") {
  auto e3 = catalog_metric("euclidean3");
  auto m3 = catalog_metric("minkowski3_ppm");
  const Vec3 p(0.2, -0.4, 0.7);
  const Vec3 ex(1, 0, 0), ey(0, 1, 0), ez(0, 0, 1);

  CHECK((cross(e3.metric, p, ex, ey) - ez).norm() <= 1e-14);
  // g(ex x ey, z) = Omega(ex,ey,z) forces the flipped sign on the timelike leg
  CHECK((cross(m3.metric, p, ex, ey) + ez).norm() <= 1e-14);
}

TEST_CASE("derived Christoffels match the closed forms") {
  for (const char* name : {"example1", "example2"}) {
    auto sys = catalog_metric(name);
    Connection derived = levi_civita(sys.metric);
    std::mt19937 rng(11u);
    for (int n = 0; n < 20; ++n) {
      const Vec3 p = random_point(rng);
      const Christoffel a = sys.connection.gamma(p);
      const Christoffel b = derived.gamma(p);
      for (int k = 0; k < 3; ++k) {
        CHECK((a[k] - b[k]).cwiseAbs().maxCoeff() <= 1e-8);
      }
    }
  }
}

TEST_CASE("metric compatibility and symmetry of the connection") {
  for (const char* name : {"euclidean3", "minkowski3_ppm", "example1", "example2"}) {
    auto sys = catalog_metric(name);
    std::mt19937 rng(7u);
    for (int n = 0; n < 100; ++n) {
      const Vec3 p = random_point(rng);
      const Christoffel gam = christoffel(sys.metric, p);
      for (int k = 0; k < 3; ++k) {
        CHECK((gam[k] - gam[k].transpose()).cwiseAbs().maxCoeff() <= 1e-12);
      }
      MetricJacobian dg;
      if (sys.metric.dg) {
        dg = sys.metric.dg(p);
      } else {
        for (int m = 0; m < 3; ++m) {
          for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
              dg[m](i, j) = central_stencil4(
                  [&](double x) {
                    Vec3 q = p;
                    q[m] = x;
                    return metric_eval(sys.metric, q)(i, j);
                  },
                  p[m], 1, 1e-3);
            }
          }
        }
      }
      const Mat3 g = metric_eval(sys.metric, p);
      for (int k = 0; k < 3; ++k) {
        for (int i = 0; i < 3; ++i) {
          for (int j = 0; j < 3; ++j) {
            double nabla = dg[k](i, j);
            for (int m = 0; m < 3; ++m) {
              nabla -= gam[m](k, i) * g(m, j) + gam[m](k, j) * g(i, m);
            }
            CHECK(std::abs(nabla) <= 1e-8);
          }
        }
      }
    }
  }
}

TEST_CASE("cross-product identity fuzz") {
  for (const char* name : {"euclidean3", "minkowski3_ppm", "example1", "example2"}) {
    auto sys = catalog_metric(name);
    std::mt19937 rng(1234u);
    double worst = 0.0;
    int kept = 0;
    for (int n = 0; n < 200; ++n) {
      const Vec3 p = random_point(rng);
      worst = std::max(worst, identity_worst(sys.metric, p, rng));
      double av = 0.0;
      if (orthonormal_volume(sys.metric, p, rng, &av)) {
        worst = std::max(worst, std::abs(av - 1.0));
        ++kept;
      }
    }
    CHECK(worst <= 1e-10);
    CHECK(kept > 100);
  }
}

TEST_CASE("singular and sign-flipping metrics are rejected") {
  ChartMetric bad;
  bad.g = [](const Vec3&) {
    Mat3 g = Mat3::Zero();
    g(0, 0) = 1.0;
    g(1, 1) = 1.0;
    return g;
  };
  CHECK_THROWS_AS(metric_eval(bad, Vec3(0, 0, 0)), SingularMetric);

  ChartMetric flip;
  flip.g = [](const Vec3& p) {
    Mat3 g = Mat3::Identity();
    g(2, 2) = p[2];
    return g;
  };
  CHECK(signature_sign(flip, Vec3(0, 0, 1)) == 1);
  CHECK_THROWS_AS(signature_sign(flip, Vec3(0, 0, -1)), SignatureChanged);
}
