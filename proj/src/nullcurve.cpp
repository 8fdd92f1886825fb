#include "curvekit/nullcurve.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

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

struct NullJet {
  CovariantJet jet;
  double tau;
};

NullJet null_jet(const MetricSystem& system, const CurveSpec& curve,
                 double t) {
  NullJet out;
  out.jet = covariant_jet(system.connection, curve, t, 2);
  const Mat3 g = metric_eval(system.metric, out.jet.position);
  auto ip = [&](const Vec3& x, const Vec3& y) { return x.dot(g * y); };

  const double w = ip(out.jet.d1, out.jet.d1);
  if (std::abs(w) > kNullTol * out.jet.d1.squaredNorm()) {
    throw NullPointEncountered("curve is not null at t = " +
                               std::to_string(t) +
                               ": g(alpha',alpha') = " + std::to_string(w));
  }
  const double q = ip(out.jet.cd[0], out.jet.cd[0]);
  if (std::abs(q - 1.0) > kPseudoArcTol) {
    throw NotPseudoArc("curve is not pseudo-arc parametrized at t = " +
                       std::to_string(t) +
                       ": g(cd1,cd1) = " + std::to_string(q));
  }
  out.tau = 0.5 * ip(out.jet.cd[1], out.jet.cd[1]);
  return out;
}

}  // namespace

double pseudo_torsion(const MetricSystem& system, const CurveSpec& curve,
                      double t) {
  return null_jet(system, curve, t).tau;
}

NullFrenetApparatus null_frame(const MetricSystem& system,
                               const CurveSpec& curve, double t) {
  const NullJet nj = null_jet(system, curve, t);
  NullFrenetApparatus fr;
  fr.t = t;
  fr.tau = nj.tau;
  fr.L = nj.jet.d1;
  fr.W = nj.jet.cd[0];
  fr.N = -nj.jet.cd[1] - nj.tau * nj.jet.d1;
  const double scl = clipped_scale(curve, t);
  fr.tau_prime = scalar_derivative(
      [&](double u) { return pseudo_torsion(system, curve, u); }, t, 1, scl);
  return fr;
}

std::array<Vec3, 3> null_ode_residual(const MetricSystem& system,
                                      const CurveSpec& curve, double t) {
  const NullFrenetApparatus fr = null_frame(system, curve, t);
  const Vec3 p = curve.position(t);
  const Christoffel G = system.connection.gamma(p);
  const double scl = clipped_scale(curve, t);

  auto covariant_rate = [&](const std::function<Vec3(double)>& field) {
    const Vec3 dt = vector_derivative(field, t, 1, scl);
    return Vec3(dt + gamma_apply(G, fr.L, field(t)));
  };

  const Vec3 dL = covariant_rate(
      [&](double u) { return null_frame(system, curve, u).L; });
  const Vec3 dN = covariant_rate(
      [&](double u) { return null_frame(system, curve, u).N; });
  const Vec3 dW = covariant_rate(
      [&](double u) { return null_frame(system, curve, u).W; });

  return {Vec3(dL - fr.W), Vec3(dN - fr.tau * fr.W),
          Vec3(dW + fr.tau * fr.L + fr.N)};
}

std::pair<double, double> null_equiaffine_curvatures(
    const MetricSystem& system, const CurveSpec& curve, double t) {
  const NullFrenetApparatus fr = null_frame(system, curve, t);
  return {-fr.tau_prime, -2.0 * fr.tau};
}

namespace {

struct GenJet {
  double f, f1, f2, f3, f4;
  bool has4;
};

GenJet gen_eval(const GeneratorFunction& gen, double t, bool need_high) {
  GenJet j{};
  j.f = gen.f(t);
  auto numeric = [&](int order) {
    const double scl = std::fmax(1.0, std::abs(t));
    return scalar_derivative(gen.f, t, order, scl);
  };
  j.f1 = gen.d1 ? gen.d1(t) : numeric(1);
  if (std::abs(j.f1) <= 1e-10) {
    throw GeneratorDegenerate("generator derivative vanishes at t = " +
                              std::to_string(t));
  }
  if (!need_high) return j;
  j.f2 = gen.d2 ? gen.d2(t) : numeric(2);
  j.f3 = gen.d3 ? gen.d3(t) : numeric(3);
  j.has4 = static_cast<bool>(gen.d4);
  if (j.has4) j.f4 = gen.d4(t);
  return j;
}

}  // namespace

double schwarzian(const GeneratorFunction& gen, double t) {
  const GenJet j = gen_eval(gen, t, true);
  const double r = j.f2 / j.f1;
  return j.f3 / j.f1 - 1.5 * r * r;
}

CurveSpec minkowski_null_from_f(const GeneratorFunction& gen, double t0,
                                const Vec3& p0, int eps) {
  if (eps != 1 && eps != -1) {
    throw ConfigError("null generator sign must be +1 or -1");
  }
  const double e = eps;

  auto d1 = [gen, e](double t) -> Vec3 {
    const GenJet j = gen_eval(gen, t, false);
    const Vec3 P(2.0 * j.f, j.f * j.f - 1.0, j.f * j.f + 1.0);
    return 0.5 * e / j.f1 * P;
  };

  // Higher derivatives by the product rule on alpha' = (eps/2) P(f) / f',
  // with P = (2f, f^2-1, f^2+1):
  //   P'   = 2 f' (1, f, f)
  //   P''  = 2 f'' (1, f, f) + 2 f'^2 (0, 1, 1)
  //   P''' = 2 f''' (1, f, f) + 6 f' f'' (0, 1, 1)
  // and the reciprocal derivatives of 1/f'.
  auto d2 = [gen, e](double t) -> Vec3 {
    const GenJet j = gen_eval(gen, t, true);
    const Vec3 P(2.0 * j.f, j.f * j.f - 1.0, j.f * j.f + 1.0);
    const Vec3 U(1.0, j.f, j.f);
    const double G = 1.0 / j.f1;
    const double G1 = -j.f2 / (j.f1 * j.f1);
    return 0.5 * e * (2.0 * j.f1 * U * G + P * G1);
  };
  auto d3 = [gen, e](double t) -> Vec3 {
    const GenJet j = gen_eval(gen, t, true);
    const Vec3 P(2.0 * j.f, j.f * j.f - 1.0, j.f * j.f + 1.0);
    const Vec3 U(1.0, j.f, j.f);
    const Vec3 V(0.0, 1.0, 1.0);
    const double G = 1.0 / j.f1;
    const double G1 = -j.f2 / (j.f1 * j.f1);
    const double G2 = -j.f3 / (j.f1 * j.f1) +
                      2.0 * j.f2 * j.f2 / (j.f1 * j.f1 * j.f1);
    const Vec3 Pp = 2.0 * j.f1 * U;
    const Vec3 Ppp = 2.0 * j.f2 * U + 2.0 * j.f1 * j.f1 * V;
    return 0.5 * e * (Ppp * G + 2.0 * Pp * G1 + P * G2);
  };

  CurveSpec curve;
  curve.t_min = gen.t_min;
  curve.t_max = gen.t_max;
  curve.mode = CurveMode::analytic;
  curve.derivative[0] = d1;
  curve.derivative[1] = d2;
  curve.derivative[2] = d3;
  if (gen.d4) {
    curve.derivative[3] = [gen, e](double t) -> Vec3 {
      const GenJet j = gen_eval(gen, t, true);
      const Vec3 P(2.0 * j.f, j.f * j.f - 1.0, j.f * j.f + 1.0);
      const Vec3 U(1.0, j.f, j.f);
      const Vec3 V(0.0, 1.0, 1.0);
      const double f1 = j.f1;
      const double G = 1.0 / f1;
      const double G1 = -j.f2 / (f1 * f1);
      const double G2 = -j.f3 / (f1 * f1) + 2.0 * j.f2 * j.f2 / (f1 * f1 * f1);
      const double G3 = -j.f4 / (f1 * f1) + 6.0 * j.f2 * j.f3 / (f1 * f1 * f1) -
                        6.0 * j.f2 * j.f2 * j.f2 / (f1 * f1 * f1 * f1);
      const Vec3 Pp = 2.0 * f1 * U;
      const Vec3 Ppp = 2.0 * j.f2 * U + 2.0 * f1 * f1 * V;
      const Vec3 Pppp = 2.0 * j.f3 * U + 6.0 * f1 * j.f2 * V;
      return 0.5 * e * (Pppp * G + 3.0 * Ppp * G1 + 3.0 * Pp * G2 + P * G3);
    };
  }
  curve.position = [d1, t0, p0](double t) -> Vec3 {
    if (t == t0) return p0;
    using boost::math::quadrature::gauss_kronrod;
    Vec3 out = p0;
    for (int i = 0; i < 3; ++i) {
      auto component = [&](double u) { return d1(u)[i]; };
      if (t > t0) {
        out[i] += gauss_kronrod<double, 15>::integrate(
            component, t0, t, quad_depth(t0, t), kQuadTol);
      } else {
        out[i] -= gauss_kronrod<double, 15>::integrate(
            component, t, t0, quad_depth(t, t0), kQuadTol);
      }
    }
    return out;
  };
  return curve;
}

}  // namespace curvekit
