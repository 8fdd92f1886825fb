#include "curvekit/curvejet.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

#include "curvekit/numdiff.hpp"

namespace curvekit {

namespace {

// Step clipped so a stencil reaching `units` steps out keeps three quarters
// of the distance to the domain edge in reserve for nested stencils.
double clip_step(const CurveSpec& curve, double t, double h, double units) {
  const double dist = std::fmin(t - curve.t_min, curve.t_max - t);
  if (dist <= 0.0) {
    throw DifferentiationFailure("t = " + std::to_string(t) +
                                 " is outside the curve domain");
  }
  return std::fmin(h, dist / (4.0 * units));
}

Vec3 vec_central4(const std::function<Vec3(double)>& f, double t, int order,
                  double h) {
  auto e = [&](double off) { return f(t + off * h); };
  Vec3 d;
  switch (order) {
    case 1:
      d = (e(-2) - e(2) + 8.0 * (e(1) - e(-1))) / (12.0 * h);
      break;
    case 2:
      d = (-e(-2) + 16.0 * e(-1) - 30.0 * e(0) + 16.0 * e(1) - e(2)) /
          (12.0 * h * h);
      break;
    case 3:
      d = (e(-3) / 8.0 - e(-2) + 13.0 / 8.0 * e(-1) - 13.0 / 8.0 * e(1) +
           e(2) - e(3) / 8.0) /
          (h * h * h);
      break;
    default:
      d = (-e(-3) / 6.0 + 2.0 * e(-2) - 6.5 * e(-1) + 28.0 / 3.0 * e(0) -
           6.5 * e(1) + 2.0 * e(2) - e(3) / 6.0) /
          (h * h * h * h);
      break;
  }
  if (!d.allFinite()) {
    throw DifferentiationFailure(
        "non-finite curve values on the stencil near t = " + std::to_string(t));
  }
  return d;
}

Vec3 stencil_derivative(const CurveSpec& curve, double t, int order) {
  const double h0 = std::pow(kMachineEps, 1.0 / (order + 4.0)) *
                    std::fmax(1.0, std::abs(t));
  const double units = order <= 2 ? 2.0 : 3.0;
  const double h = clip_step(curve, t, h0, units);
  return vec_central4([&](double u) { return curve.position(u); }, t, order,
                      h);
}

Vec3 gamma_apply(const Christoffel& G, const Vec3& u, const Vec3& v) {
  return Vec3(u.dot(G[0] * v), u.dot(G[1] * v), u.dot(G[2] * v));
}

}  // namespace

Vec3 curve_derivative(const CurveSpec& curve, double t, int order) {
  if (order < 1 || order > 4) {
    throw Error("curve_derivative: order must be 1..4");
  }
  if (curve.mode == CurveMode::analytic && curve.derivative[order - 1]) {
    return curve.derivative[order - 1](t);
  }
  return stencil_derivative(curve, t, order);
}

CovariantJet covariant_jet(const Connection& conn, const CurveSpec& curve,
                           double t, int order) {
  if (order < 1 || order > 3) {
    throw Error("covariant_jet: order must be 1..3");
  }
  CovariantJet jet;
  jet.t = t;
  jet.position = curve.position(t);
  jet.d1 = curve_derivative(curve, t, 1);

  const Christoffel G = conn.gamma(jet.position);
  const Vec3 d2 = curve_derivative(curve, t, 2);
  jet.cd[0] = d2 + gamma_apply(G, jet.d1, jet.d1);
  jet.order = 1;
  if (order == 1) return jet;

  const double scl = std::fmax(1.0, std::abs(t));
  const bool exact_maps = curve.mode == CurveMode::analytic &&
                          curve.derivative[0] && curve.derivative[1];
  // relative noise floor of the cd1 field; stencilled position derivatives
  // carry roundoff amplified by 1/h^2
  double noise = exact_maps ? kMachineEps : std::pow(kMachineEps, 2.0 / 3.0);

  const bool chain2 = static_cast<bool>(conn.dgamma) &&
                      curve.mode == CurveMode::analytic &&
                      static_cast<bool>(curve.derivative[2]);
  if (chain2) {
    const Vec3 d3 = curve.derivative[2](t);
    const ChristoffelJacobian dG = conn.dgamma(jet.position);
    Christoffel Gdot;
    for (int k = 0; k < 3; ++k) {
      Gdot[k] =
          jet.d1[0] * dG[0][k] + jet.d1[1] * dG[1][k] + jet.d1[2] * dG[2][k];
    }
    jet.cd[1] = d3 + gamma_apply(Gdot, jet.d1, jet.d1) +
                2.0 * gamma_apply(G, jet.d1, d2) +
                gamma_apply(G, jet.d1, jet.cd[0]);
  } else {
    auto cd1_at = [&](double u) -> Vec3 {
      const Vec3 du1 = curve_derivative(curve, u, 1);
      const Vec3 du2 = curve_derivative(curve, u, 2);
      return du2 + gamma_apply(conn.gamma(curve.position(u)), du1, du1);
    };
    const double h2 = clip_step(curve, t, std::pow(noise, 0.2) * scl, 2.0);
    jet.cd[1] = vec_central4(cd1_at, t, 1, h2) +
                gamma_apply(G, jet.d1, jet.cd[0]);
    noise = std::pow(noise, 0.8);
  }
  jet.order = 2;
  if (order == 2) return jet;

  auto cd2_at = [&](double u) -> Vec3 {
    return covariant_jet(conn, curve, u, 2).cd[1];
  };
  const double h3 = clip_step(curve, t, std::pow(noise, 0.2) * scl, 2.0);
  jet.cd[2] =
      vec_central4(cd2_at, t, 1, h3) + gamma_apply(G, jet.d1, jet.cd[1]);
  jet.order = 3;
  return jet;
}

CausalCharacter causal_character(const ChartMetric& metric,
                                 const CurveSpec& curve, double t) {
  const Vec3 p = curve.position(t);
  const Vec3 d1 = curve_derivative(curve, t, 1);
  const double aux = d1.squaredNorm();
  if (aux <= kRegularityTol * kRegularityTol) {
    throw DegenerateCurve("curve is not regular (alpha' vanishes) at t = " +
                          std::to_string(t));
  }
  const double w = inner(metric, p, d1, d1);
  CausalCharacter c;
  c.value = w;
  if (std::abs(w) <= kNullTol * aux) {
    c.tag = CausalTag::lightlike;
    c.eps1 = 0;
  } else if (w > 0.0) {
    c.tag = CausalTag::spacelike;
    c.eps1 = +1;
  } else {
    c.tag = CausalTag::timelike;
    c.eps1 = -1;
  }
  return c;
}

const char* to_string(CausalTag tag) {
  switch (tag) {
    case CausalTag::spacelike:
      return "spacelike";
    case CausalTag::timelike:
      return "timelike";
    default:
      return "lightlike";
  }
}

namespace {

// Monotone parameter map with synchronized memo tables: sigma(t) integrates
// the density from the nearest known anchor; invert(s) solves sigma(t) = s
// with a bracket read off the table. Seeded with the domain bounds, so every
// in-range target is bracketed from the start.
class ParamMap {
 public:
  ParamMap(std::function<double(double)> density, double t0, double lo,
           double hi)
      : density_(std::move(density)), lo_(lo), hi_(hi) {
    by_t_[t0] = 0.0;
    by_s_[0.0] = t0;
    s_lo_ = seed_bound(t0, lo);
    s_hi_ = seed_bound(t0, hi);
  }

  double sigma(double t) {
    {
      std::lock_guard<std::mutex> g(m_);
      auto it = by_t_.find(t);
      if (it != by_t_.end()) return it->second;
    }
    const double s = integrate_from_anchor(t);
    store(t, s);
    return s;
  }

  double invert(double s) {
    double tlo, thi;
    {
      std::lock_guard<std::mutex> g(m_);
      auto it = by_s_.find(s);
      if (it != by_s_.end()) return it->second;
      it = by_s_.lower_bound(s);
      if (it == by_s_.end() || it == by_s_.begin()) {
        throw Error("parameter value " + std::to_string(s) +
                    " is outside the reparametrized range [" +
                    std::to_string(s_lo_) + ", " + std::to_string(s_hi_) + "]");
      }
      thi = it->second;
      tlo = std::prev(it)->second;
    }
    const double t = invert_monotone([this](double u) { return sigma(u); },
                                     density_, tlo, thi, s, kNewtonTol);
    store(t, sigma(t));
    {
      std::lock_guard<std::mutex> g(m_);
      by_s_[s] = t;  // remember the exact query key for repeat lookups
    }
    return t;
  }

  double s_lo() const { return s_lo_; }
  double s_hi() const { return s_hi_; }

 private:
  // Walks from t0 toward `target` in panels, storing each cumulative value,
  // so later inversions always find a tight bracket in the table. Curves may
  // blow up before their formal domain edge (a generator derivative
  // underflowing, say), so halve back toward t0 until the walk succeeds.
  double seed_bound(double t0, double target) {
    constexpr int kPanels = 32;
    double t = target;
    for (int attempt = 0; attempt < 60; ++attempt) {
      try {
        double s = 0.0;
        for (int i = 1; i <= kPanels; ++i) {
          s = sigma(t0 + (t - t0) * (static_cast<double>(i) / kPanels));
        }
        return s;
      } catch (const std::exception&) {
        t = t0 + 0.5 * (t - t0);
      }
    }
    return sigma(t);
  }

  double integrate_from_anchor(double t) {
    double ta, sa;
    {
      std::lock_guard<std::mutex> g(m_);
      auto hi = by_t_.lower_bound(t);
      if (hi == by_t_.end()) {
        ta = std::prev(hi)->first;
        sa = std::prev(hi)->second;
      } else if (hi == by_t_.begin()) {
        ta = hi->first;
        sa = hi->second;
      } else {
        auto lo = std::prev(hi);
        if (t - lo->first <= hi->first - t) {
          ta = lo->first;
          sa = lo->second;
        } else {
          ta = hi->first;
          sa = hi->second;
        }
      }
    }
    if (t == ta) return sa;
    using boost::math::quadrature::gauss_kronrod;
    const double piece = gauss_kronrod<double, 15>::integrate(
        density_, ta, t, quad_depth(ta, t), kQuadTol);
    return sa + piece;
  }

  void store(double t, double s) {
    std::lock_guard<std::mutex> g(m_);
    by_t_[t] = s;
    by_s_[s] = t;
  }

  std::function<double(double)> density_;
  double lo_, hi_;
  double s_lo_ = 0.0, s_hi_ = 0.0;
  std::map<double, double> by_t_;
  std::map<double, double> by_s_;
  std::mutex m_;
};

struct TDerivs {
  double t1, t2, t3;  // dT/ds and the next two derivatives, at t = T(s)
};

// The inverse-map derivatives are requested three times per jet level and
// again for every stencil revisit of the same t, so memoize them.
std::function<TDerivs(double)> memoized(std::function<TDerivs(double)> raw) {
  struct Cache {
    std::mutex m;
    std::map<double, TDerivs> table;
  };
  auto cache = std::make_shared<Cache>();
  return [cache, raw](double t) -> TDerivs {
    {
      std::lock_guard<std::mutex> g(cache->m);
      auto it = cache->table.find(t);
      if (it != cache->table.end()) return it->second;
    }
    const TDerivs d = raw(t);
    std::lock_guard<std::mutex> g(cache->m);
    if (cache->table.size() > 8192) cache->table.clear();
    cache->table[t] = d;
    return d;
  };
}

// Chain-rule derivatives of the inverse map from the derivatives of the
// integrand reciprocal u(t): T' = u, T'' = u'u, T''' = (u''u + u'^2)u.
TDerivs chain_inverse(double u, double du, double ddu) {
  TDerivs d;
  d.t1 = u;
  d.t2 = du * u;
  d.t3 = (ddu * u + du * du) * u;
  return d;
}

CurveSpec reparametrized_spec(const CurveSpec& base,
                              std::shared_ptr<ParamMap> map,
                              std::function<TDerivs(double)> tderivs) {
  CurveSpec out;
  out.t_min = map->s_lo();
  out.t_max = map->s_hi();
  out.mode = CurveMode::analytic;
  out.position = [base, map](double s) {
    return base.position(map->invert(s));
  };
  out.derivative[0] = [base, map, tderivs](double s) -> Vec3 {
    const double t = map->invert(s);
    return curve_derivative(base, t, 1) * tderivs(t).t1;
  };
  out.derivative[1] = [base, map, tderivs](double s) -> Vec3 {
    const double t = map->invert(s);
    const TDerivs d = tderivs(t);
    return curve_derivative(base, t, 2) * (d.t1 * d.t1) +
           curve_derivative(base, t, 1) * d.t2;
  };
  out.derivative[2] = [base, map, tderivs](double s) -> Vec3 {
    const double t = map->invert(s);
    const TDerivs d = tderivs(t);
    return curve_derivative(base, t, 3) * (d.t1 * d.t1 * d.t1) +
           3.0 * curve_derivative(base, t, 2) * (d.t1 * d.t2) +
           curve_derivative(base, t, 1) * d.t3;
  };
  return out;
}

}  // namespace

Reparametrization reparametrize_arclength(const MetricSystem& system,
                                          const CurveSpec& curve, double t0) {
  if (!(t0 > curve.t_min && t0 < curve.t_max)) {
    throw Error("reparametrization anchor t0 = " + std::to_string(t0) +
                " is outside the curve domain");
  }
  auto speed = [system, curve](double u) -> double {
    const Vec3 p = curve.position(u);
    const Vec3 d1 = curve_derivative(curve, u, 1);
    const double w = inner(system.metric, p, d1, d1);
    if (std::abs(w) <= kNullTol * d1.squaredNorm()) {
      throw NullPointEncountered("curve becomes null near t = " +
                                 std::to_string(u));
    }
    return std::sqrt(std::abs(w));
  };
  const double lo = std::fmax(
      curve.t_min + 1e-9 * std::fmax(1.0, std::abs(curve.t_min)), t0 - 1e4);
  const double hi = std::fmin(
      curve.t_max - 1e-9 * std::fmax(1.0, std::abs(curve.t_max)), t0 + 1e4);
  auto map = std::make_shared<ParamMap>(speed, t0, lo, hi);

  // Derivatives of u = |g(alpha',alpha')|^{-1/2} through the jet, using
  // metric compatibility: w' = 2 g(cd1, a'), w'' = 2 g(cd2, a') +
  // 2 g(cd1, cd1).
  MetricSystem sys = system;
  CurveSpec base = curve;
  auto tderivs = [sys, base](double t) -> TDerivs {
    const CovariantJet jet = covariant_jet(sys.connection, base, t, 2);
    const Mat3 g = metric_eval(sys.metric, jet.position);
    auto ip = [&](const Vec3& x, const Vec3& y) { return x.dot(g * y); };
    double w = ip(jet.d1, jet.d1);
    double w1 = 2.0 * ip(jet.cd[0], jet.d1);
    double w2 = 2.0 * ip(jet.cd[1], jet.d1) + 2.0 * ip(jet.cd[0], jet.cd[0]);
    if (w < 0.0) {
      w = -w;
      w1 = -w1;
      w2 = -w2;
    }
    const double u = std::pow(w, -0.5);
    const double du = -0.5 * std::pow(w, -1.5) * w1;
    const double ddu = 0.75 * std::pow(w, -2.5) * w1 * w1 -
                       0.5 * std::pow(w, -1.5) * w2;
    return chain_inverse(u, du, ddu);
  };

  Reparametrization out;
  out.curve = reparametrized_spec(curve, map, memoized(tderivs));
  out.from_param = [map](double t) { return map->sigma(t); };
  out.to_param = [map](double s) { return map->invert(s); };
  out.s_min = map->s_lo();
  out.s_max = map->s_hi();
  return out;
}

Reparametrization reparametrize_pseudo_arclength(const MetricSystem& system,
                                                 const CurveSpec& curve,
                                                 double t0) {
  if (!(t0 > curve.t_min && t0 < curve.t_max)) {
    throw Error("reparametrization anchor t0 = " + std::to_string(t0) +
                " is outside the curve domain");
  }
  MetricSystem sys = system;
  CurveSpec base = curve;
  {
    const CausalCharacter c = causal_character(sys.metric, base, t0);
    if (c.tag != CausalTag::lightlike) {
      throw DegenerateNullCurve(
          "pseudo-arc reparametrization requires a null curve; g(a',a') = " +
          std::to_string(c.value) + " at t = " + std::to_string(t0));
    }
  }
  auto density = [sys, base](double u) -> double {
    const CovariantJet jet = covariant_jet(sys.connection, base, u, 1);
    const double q = inner(sys.metric, jet.position, jet.cd[0], jet.cd[0]);
    if (q <= 0.0) {
      throw DegenerateNullCurve(
          "g(cd1, cd1) is not positive at t = " + std::to_string(u) +
          "; pseudo-arc length is undefined");
    }
    return std::pow(q, 0.25);
  };
  const double lo = std::fmax(
      curve.t_min + 1e-9 * std::fmax(1.0, std::abs(curve.t_min)), t0 - 1e4);
  const double hi = std::fmin(
      curve.t_max - 1e-9 * std::fmax(1.0, std::abs(curve.t_max)), t0 + 1e4);
  auto map = std::make_shared<ParamMap>(density, t0, lo, hi);

  // u = q^{-1/4} with q = g(cd1, cd1); q' = 2 g(cd2, cd1),
  // q'' = 2 g(cd3, cd1) + 2 g(cd2, cd2).
  auto tderivs = [sys, base](double t) -> TDerivs {
    const CovariantJet jet = covariant_jet(sys.connection, base, t, 3);
    const Mat3 g = metric_eval(sys.metric, jet.position);
    auto ip = [&](const Vec3& x, const Vec3& y) { return x.dot(g * y); };
    const double q = ip(jet.cd[0], jet.cd[0]);
    if (q <= 0.0) {
      throw DegenerateNullCurve("g(cd1, cd1) is not positive at t = " +
                                std::to_string(t));
    }
    const double q1 = 2.0 * ip(jet.cd[1], jet.cd[0]);
    const double q2 = 2.0 * ip(jet.cd[2], jet.cd[0]) +
                      2.0 * ip(jet.cd[1], jet.cd[1]);
    const double u = std::pow(q, -0.25);
    const double du = -0.25 * std::pow(q, -1.25) * q1;
    const double ddu = 5.0 / 16.0 * std::pow(q, -2.25) * q1 * q1 -
                       0.25 * std::pow(q, -1.25) * q2;
    return chain_inverse(u, du, ddu);
  };

  Reparametrization out;
  out.curve = reparametrized_spec(curve, map, memoized(tderivs));
  out.from_param = [map](double t) { return map->sigma(t); };
  out.to_param = [map](double s) { return map->invert(s); };
  out.s_min = map->s_lo();
  out.s_max = map->s_hi();
  return out;
}

}  // namespace curvekit
