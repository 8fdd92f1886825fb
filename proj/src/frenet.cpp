#include "curvekit/frenet.hpp"

#include <cmath>

#include "curvekit/curvejet.hpp"
#include "curvekit/numdiff.hpp"

namespace curvekit {

FrenetApparatus frenet_apparatus(const MetricSystem& system,
                                 const CurveSpec& curve, double t) {
  const CovariantJet jet = covariant_jet(system.connection, curve, t, 2);
  const Vec3& p = jet.position;
  const Mat3 g = metric_eval(system.metric, p);
  auto ip = [&](const Vec3& x, const Vec3& y) { return x.dot(g * y); };

  const double w = ip(jet.d1, jet.d1);
  if (std::abs(std::abs(w) - 1.0) > kUnitSpeedTol) {
    throw NotUnitSpeed("curve is not arc-length parametrized at t = " +
                       std::to_string(t) + ": g(T,T) = " + std::to_string(w));
  }

  FrenetApparatus fr;
  fr.t = t;
  fr.T = jet.d1;
  fr.eps1 = w > 0.0 ? +1 : -1;

  const Vec3& a = jet.cd[0];
  const Vec3 c = cross(system.metric, p, jet.d1, a);
  const double gcc = ip(c, c);
  const double lagrange_scale =
      std::abs(ip(jet.d1, jet.d1) * ip(a, a)) + ip(jet.d1, a) * ip(jet.d1, a);
  if (std::abs(gcc) <= kDegeneracyTol * lagrange_scale) {
    throw DegenerateCurve(
        "alpha' and its covariant derivative span a null plane at t = " +
        std::to_string(t) + " (Frenet frame undefined)");
  }
  const double kappa = std::sqrt(std::abs(gcc));
  if (kappa <= 1e-12 * std::fmax(1.0, a.norm())) {
    throw ZeroCurvature("Frenet curvature vanishes at t = " +
                        std::to_string(t));
  }

  const double gaa = ip(a, a);
  fr.eps2 = gaa > 0.0 ? +1 : -1;
  const int omega = signature_sign(system.metric, p);
  fr.eps3 = omega * fr.eps1 * fr.eps2;

  fr.kappa = kappa;
  fr.N = fr.eps3 * cross(system.metric, p, c, jet.d1) / kappa;
  fr.B = omega * fr.eps1 * c / kappa;

  const double triple = volume(system.metric, p, jet.d1, a, jet.cd[1]);
  fr.tau = fr.eps3 * triple / (kappa * kappa);
  fr.eps = triple > 0.0 ? +1 : (triple < 0.0 ? -1 : 0);
  return fr;
}

std::array<Vec3, 3> frenet_ode_residual(const MetricSystem& system,
                                        const CurveSpec& curve, double t) {
  const FrenetApparatus fr = frenet_apparatus(system, curve, t);
  const Vec3 p = curve.position(t);
  const Christoffel G = system.connection.gamma(p);
  auto gamma_apply = [&](const Vec3& u, const Vec3& v) {
    return Vec3(u.dot(G[0] * v), u.dot(G[1] * v), u.dot(G[2] * v));
  };
  const double dist = std::fmin(t - curve.t_min, curve.t_max - t);
  const double scale = std::fmin(std::fmax(1.0, std::abs(t)), dist / 4.0);

  auto covariant_rate = [&](const std::function<Vec3(double)>& field) {
    const Vec3 dt = vector_derivative(field, t, 1, scale);
    return Vec3(dt + gamma_apply(fr.T, field(t)));
  };

  const Vec3 dT = covariant_rate(
      [&](double u) { return frenet_apparatus(system, curve, u).T; });
  const Vec3 dN = covariant_rate(
      [&](double u) { return frenet_apparatus(system, curve, u).N; });
  const Vec3 dB = covariant_rate(
      [&](double u) { return frenet_apparatus(system, curve, u).B; });

  return {Vec3(dT - fr.eps2 * fr.kappa * fr.N),
          Vec3(dN + fr.eps1 * fr.kappa * fr.T - fr.eps3 * fr.tau * fr.B),
          Vec3(dB + fr.eps2 * fr.tau * fr.N)};
}

}  // namespace curvekit
