#include "curvekit/equiaffine.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>

#include "curvekit/numdiff.hpp"

namespace curvekit {

namespace {

double clipped_scale(const CurveSpec& curve, double t) {
  const double dist = std::fmin(t - curve.t_min, curve.t_max - t);
  if (dist <= 0.0) {
    throw DifferentiationFailure("t = " + std::to_string(t) +
                                 " is outside the curve domain");
  }
  return std::fmin(std::fmax(1.0, std::abs(t)), dist / 4.0);
}

Vec3 gamma_apply(const Christoffel& G, const Vec3& u, const Vec3& v) {
  return Vec3(u.dot(G[0] * v), u.dot(G[1] * v), u.dot(G[2] * v));
}

}  // namespace

EquiaffineSpeed equiaffine_speed(const MetricSystem& system,
                                 const CurveSpec& curve, double t) {
  const CovariantJet jet = covariant_jet(system.connection, curve, t, 2);
  const Mat3 g = metric_eval(system.metric, jet.position);
  const double triple = volume(system.metric, jet.position, jet.d1, jet.cd[0],
                               jet.cd[1]);
  const double hadamard = std::sqrt(std::abs(g.determinant())) *
                          jet.d1.norm() * jet.cd[0].norm() * jet.cd[1].norm();
  if (std::abs(triple) <= kDegeneracyTol * hadamard) {
    throw DegenerateCurve(
        "volume of (alpha', cd1, cd2) vanishes at t = " + std::to_string(t) +
        " (curve is degenerate there)");
  }
  EquiaffineSpeed out;
  out.mu = std::pow(std::abs(triple), 1.0 / 6.0);
  out.phi = 1.0 / out.mu;
  out.eps = triple > 0.0 ? +1 : -1;
  return out;
}

double equiaffine_arclength(const MetricSystem& system, const CurveSpec& curve,
                            double t0, double t) {
  if (t == t0) return 0.0;
  auto mu = [&](double u) { return equiaffine_speed(system, curve, u).mu; };
  using boost::math::quadrature::gauss_kronrod;
  if (t > t0) {
    return gauss_kronrod<double, 15>::integrate(mu, t0, t,
                                                quad_depth(t0, t), kQuadTol);
  }
  return -gauss_kronrod<double, 15>::integrate(mu, t, t0,
                                               quad_depth(t, t0), kQuadTol);
}

CartanApparatus cartan_frame(const MetricSystem& system,
                             const CurveSpec& curve, double t) {
  const CovariantJet jet = covariant_jet(system.connection, curve, t, 2);
  const EquiaffineSpeed sp = equiaffine_speed(system, curve, t);
  const double scl = clipped_scale(curve, t);
  auto phi_f = [&](double u) {
    return equiaffine_speed(system, curve, u).phi;
  };
  const double p1 = scalar_derivative(phi_f, t, 1, scl);
  const double p2 = scalar_derivative(phi_f, t, 2, scl);
  const double phi = sp.phi;

  CartanApparatus c;
  c.t = t;
  c.mu = sp.mu;
  c.phi = phi;
  c.eps = sp.eps;
  c.e1 = phi * jet.d1;
  c.e2 = phi * p1 * jet.d1 + phi * phi * jet.cd[0];
  c.e3 = (phi * p1 * p1 + phi * phi * p2) * jet.d1 +
         3.0 * phi * phi * p1 * jet.cd[0] + phi * phi * phi * jet.cd[1];
  return c;
}

std::pair<double, double> curvatures_direct(const MetricSystem& system,
                                            const CurveSpec& curve, double t) {
  const CovariantJet jet = covariant_jet(system.connection, curve, t, 3);
  const EquiaffineSpeed sp = equiaffine_speed(system, curve, t);
  const double scl = clipped_scale(curve, t);
  auto phi_f = [&](double u) {
    return equiaffine_speed(system, curve, u).phi;
  };
  const double p1 = scalar_derivative(phi_f, t, 1, scl);
  const double p2 = scalar_derivative(phi_f, t, 2, scl);
  const double p3 = scalar_derivative(phi_f, t, 3, scl);

  const double oa = volume(system.metric, jet.position, jet.d1, jet.cd[1],
                           jet.cd[2]);
  const double ob = volume(system.metric, jet.position, jet.cd[0], jet.cd[1],
                           jet.cd[2]);
  const double phi = sp.phi;
  const double eps = sp.eps;
  const double phi8 = std::pow(phi, 8);

  const double k1 = phi * phi * p3 - 6.0 * p1 * p1 * p1 +
                    eps * phi8 * p1 * oa + eps * phi8 * phi * ob;
  const double k2 = 4.0 * phi * p2 + 7.0 * p1 * p1 - eps * phi8 * oa;
  return {k1, k2};
}

std::pair<double, double> curvatures_structural(const MetricSystem& system,
                                                const CurveSpec& curve,
                                                double t) {
  const CartanApparatus base = cartan_frame(system, curve, t);
  const Vec3 p = curve.position(t);
  const Vec3 d1 = curve_derivative(curve, t, 1);
  auto e3_field = [&](double u) { return cartan_frame(system, curve, u).e3; };

  // The e3 field carries the noise of two phi-derivative levels, which
  // varies a lot between closed-form and reparametrized curves. Probe it
  // with a tight second difference and let the measured floor set the
  // differentiation step.
  const double scl = clipped_scale(curve, t);
  const double hp = 1e-7 * scl;
  const Vec3 probe = e3_field(t + hp) - 2.0 * base.e3 + e3_field(t - hp);
  const double mag = std::fmax(base.e3.norm(), 1e-30);
  const double rel =
      std::clamp(probe.norm() / (4.0 * mag), kMachineEps, 1e-3);
  const double h = std::fmin(std::pow(rel, 0.2), 0.2) * scl;

  const Vec3 de3 = vector_d1_stencil4(e3_field, t, h);
  const Christoffel G = system.connection.gamma(p);
  const Vec3 nabla_e3 = de3 + gamma_apply(G, d1, base.e3);

  const double k1 = base.eps * base.phi *
                    volume(system.metric, p, nabla_e3, base.e2, base.e3);
  const double k2 = base.eps * base.phi *
                    volume(system.metric, p, base.e1, nabla_e3, base.e3);
  return {k1, k2};
}

std::pair<double, double> curvatures_frenet(const KappaTauSource& source,
                                            double t) {
  const double scl = std::fmax(1.0, std::abs(t));
  auto deriv = [&](const ScalarFunction& f, int k) -> double {
    switch (k) {
      case 0:
        return f.value(t);
      case 1:
        return f.d1 ? f.d1(t) : scalar_derivative(f.value, t, 1, scl);
      case 2:
        return f.d2 ? f.d2(t) : scalar_derivative(f.value, t, 2, scl);
      default:
        return f.d3 ? f.d3(t) : scalar_derivative(f.value, t, 3, scl);
    }
  };
  const double K = deriv(source.kappa, 0);
  const double T = deriv(source.tau, 0);
  if (K <= 0.0) {
    throw ZeroCurvature("Frenet curvature must be positive; kappa(t) = " +
                        std::to_string(K));
  }
  if (std::abs(T) <= 1e-9 * K * K) {
    throw ZeroTorsion("Frenet torsion vanishes at t = " + std::to_string(t));
  }
  const double K1 = deriv(source.kappa, 1);
  const double K2 = deriv(source.kappa, 2);
  const double K3 = deriv(source.kappa, 3);
  const double T1 = deriv(source.tau, 1);
  const double T2 = deriv(source.tau, 2);
  const double T3 = deriv(source.tau, 3);
  const double e1 = source.eps1;
  const double e2 = source.eps2;
  const double e3 = source.eps3;
  const double at = std::abs(T);

  const double poly1 =
      -288.0 * e1 * e2 * std::pow(K, 4) * std::pow(T, 3) * K1 -
      72.0 * e2 * e3 * K * K * std::pow(T, 5) * K1 -
      320.0 * std::pow(T, 3) * K1 * K1 * K1 +
      180.0 * e1 * e2 * std::pow(K, 5) * T * T * T1 -
      36.0 * e2 * e3 * std::pow(K, 3) * std::pow(T, 4) * T1 -
      120.0 * K * T * T * K1 * K1 * T1 - 42.0 * K * K * T * K1 * T1 * T1 -
      85.0 * std::pow(K, 3) * T1 * T1 * T1 +
      360.0 * K * std::pow(T, 3) * K1 * K2 + 72.0 * K * K * T * T * T1 * K2 +
      36.0 * K * K * T * T * K1 * T2 + 126.0 * std::pow(K, 3) * T * T1 * T2 -
      72.0 * K * K * std::pow(T, 3) * K3 -
      36.0 * std::pow(K, 3) * T * T * T3;
  const double k1 = poly1 / (216.0 * std::pow(K, 4) * std::pow(T, 3) *
                             std::sqrt(at));

  const double poly2 = -36.0 * e1 * e2 * std::pow(K, 4) * T * T -
                       36.0 * e2 * e3 * K * K * std::pow(T, 4) +
                       20.0 * T * T * K1 * K1 + 8.0 * K * T * K1 * T1 +
                       35.0 * K * K * T1 * T1 - 12.0 * K * T * T * K2 -
                       24.0 * K * K * T * T2;
  const double k2 =
      poly2 / (36.0 * std::pow(K, 8.0 / 3.0) * T * T * std::cbrt(at));
  return {k1, k2};
}

std::array<Vec3, 3> cartan_from_frenet(const MetricSystem& system,
                                       const CurveSpec& curve, double t) {
  const FrenetApparatus fr = frenet_apparatus(system, curve, t);
  if (std::abs(fr.tau) <= 1e-9 * fr.kappa * fr.kappa) {
    throw ZeroTorsion("Frenet torsion vanishes at t = " + std::to_string(t));
  }
  const double scl = clipped_scale(curve, t);
  auto kf = [&](double u) { return frenet_apparatus(system, curve, u).kappa; };
  auto tf = [&](double u) { return frenet_apparatus(system, curve, u).tau; };
  const double K = fr.kappa;
  const double T = fr.tau;
  const double K1 = scalar_derivative(kf, t, 1, scl);
  const double K2 = scalar_derivative(kf, t, 2, scl);
  const double T1 = scalar_derivative(tf, t, 1, scl);
  const double T2 = scalar_derivative(tf, t, 2, scl);
  const double e1 = fr.eps1;
  const double e2 = fr.eps2;
  const double e3 = fr.eps3;
  const double at = std::abs(T);

  const Vec3 v1 = std::pow(K, -1.0 / 3.0) * std::pow(at, -1.0 / 6.0) * fr.T;

  const Vec3 v2 = -(1.0 / 6.0) * std::pow(K, -5.0 / 3.0) / T *
                      std::pow(at, -1.0 / 3.0) * (2.0 * T * K1 + K * T1) *
                      fr.T +
                  e2 * std::cbrt(K) * std::pow(at, -1.0 / 3.0) * fr.N;

  const double coefT =
      (1.0 / 18.0) * std::pow(K, -3) / (T * T) / std::sqrt(at) *
      (-18.0 * e1 * e2 * std::pow(K, 4) * T * T + 10.0 * T * T * K1 * K1 +
       4.0 * K * T * K1 * T1 + 4.0 * K * K * T1 * T1 - 6.0 * K * T * T * K2 -
       3.0 * K * K * T * T2);
  const double coefN = -0.5 * e2 / T / std::sqrt(at) * T1;
  const double coefB = e2 * e3 * T / std::sqrt(at);
  const Vec3 v3 = coefT * fr.T + coefN * fr.N + coefB * fr.B;
  return {v1, v2, v3};
}

std::pair<double, double> corollary_curvatures(const std::string& mode,
                                               double A, double B, int eps1,
                                               int eps2, int eps3, double t) {
  auto sign_ok = [](int e) { return e == 1 || e == -1; };
  if (!sign_ok(eps1) || !sign_ok(eps2) || !sign_ok(eps3)) {
    throw ConfigError("causal signs must be +1 or -1");
  }
  if (!(A > 0.0)) {
    throw ConfigError("curvature constant A must be positive");
  }
  if (B == 0.0) {
    throw ConfigError("torsion constant B must be non-zero");
  }
  if (mode == "const") {
    const double k2 = -eps2 * (eps1 * A * A + eps3 * B * B) /
                      (std::pow(A, 2.0 / 3.0) * std::cbrt(std::abs(B)));
    return {0.0, k2};
  }
  if (mode == "reciprocal") {
    if (!(t > 0.0)) {
      throw ConfigError("reciprocal mode needs t > 0");
    }
    const double C = 1.0 + 4.0 * eps2 * (eps1 * A * A + eps3 * B * B);
    const double k1 = C / (8.0 * A * std::sqrt(std::abs(B) * t * t * t));
    const double k2 = -C / (4.0 * std::cbrt(A * A * std::abs(B)) * t);
    return {k1, k2};
  }
  throw ConfigError("unknown corollary mode '" + mode +
                    "' (expected const or reciprocal)");
}

}  // namespace curvekit
