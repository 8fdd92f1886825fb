#pragma once

#include "curvekit/manifold.hpp"
#include "curvekit/types.hpp"

#include <cmath>
#include <functional>
#include <optional>

namespace curvekit {

enum class CurveMode { analytic, finite_difference };

// A parametric curve on an open interval. Derivative maps are optional
// (orders 1..4); missing ones are recovered from position by fourth-order
// central stencils. In finite_difference mode the derivative maps are
// ignored entirely, which the tests use to cross-check the analytic maps.
struct CurveSpec {
  double t_min = 0.0;
  double t_max = 0.0;
  std::function<Vec3(double)> position;
  std::array<std::function<Vec3(double)>, 4> derivative;  // [k-1] = order k
  CurveMode mode = CurveMode::analytic;
};

// alpha^(k)(t), analytic when available, stencil fallback otherwise.
Vec3 curve_derivative(const CurveSpec& curve, double t, int order);

struct CovariantJet {
  double t = 0.0;
  Vec3 position;
  Vec3 d1;                  // alpha'
  std::array<Vec3, 3> cd;   // cd[k-1] = k-th covariant derivative of alpha'
  int order = 0;            // how many cd entries are populated
};

// Covariant derivative jet along the curve:
//   cd1^k = alpha''^k + Gamma^k_ij alpha'^i alpha'^j,
//   cd(k+1) = d/dt cd(k) + Gamma(alpha', cd(k)).
// The component derivative of cd1 is evaluated through the chain rule when
// the connection carries dgamma and the curve can produce alpha'''; higher
// levels always use a five-point stencil whose step is chosen from the
// noise floor of the level below.
CovariantJet covariant_jet(const Connection& conn, const CurveSpec& curve,
                           double t, int order);

enum class CausalTag { spacelike, timelike, lightlike };

struct CausalCharacter {
  CausalTag tag = CausalTag::spacelike;
  double value = 0.0;  // g(alpha', alpha')
  int eps1 = 0;        // sign of value where non-null, 0 on null
};

// Classifies by the sign of g(alpha',alpha') against
// null_tol * |alpha'|^2 (auxiliary Euclidean norm on components).
CausalCharacter causal_character(const ChartMetric& metric,
                                 const CurveSpec& curve, double t);

const char* to_string(CausalTag tag);

// Result of a reparametrization: the curve in the new parameter s plus both
// directions of the parameter map (s(t) is from_param, t(s) is to_param).
struct Reparametrization {
  CurveSpec curve;
  std::function<double(double)> to_param;
  std::function<double(double)> from_param;
  double s_min = 0.0;
  double s_max = 0.0;
};

// Arc length for non-null curves: s(t) = integral of |g(alpha',alpha')|^1/2
// from t0, by adaptive Gauss-Kronrod quadrature; the inverse map by
// bracketed Newton (tolerance 1e-12). The returned curve evaluates
// derivatives through the chain rule with numerically differentiated
// parameter maps. Throws NullPointEncountered if the speed dips below the
// null threshold at any evaluation point.
Reparametrization reparametrize_arclength(const MetricSystem& system,
                                          const CurveSpec& curve, double t0);

// Pseudo-arc length for null curves: density g(cd1,cd1)^{1/4}, which makes
// g(cd1,cd1) = 1 in the new parameter (verified by tests rather than
// assumed). Throws DegenerateNullCurve where g(cd1,cd1) <= 0.
Reparametrization reparametrize_pseudo_arclength(const MetricSystem& system,
                                                 const CurveSpec& curve,
                                                 double t0);

// Tolerances shared across modules (scale-aware where noted).
constexpr double kSingularTol = 1e-12;     // vs (max row norm)^3 of g
constexpr double kRegularityTol = 1e-10;   // vs auxiliary component norms
constexpr double kNullTol = 1e-9;          // vs |alpha'|_aux^2
constexpr double kDegeneracyTol = 1e-9;    // vs Hadamard bound of the triple
constexpr double kUnitSpeedTol = 1e-6;
constexpr double kPseudoArcTol = 1e-5;
constexpr double kNewtonTol = 1e-12;
// Gauss-Kronrod termination. The estimator bottoms out near 3e-11 relative
// on short intervals, so asking for less recurses to full depth for nothing;
// achieved error on smooth integrands is ~1e-15 regardless.
constexpr double kQuadTol = 1.5e-8;

// On very short intervals the Kronrod error estimate is pure roundoff and
// adaptive subdivision recurses to full depth chasing it, so use a single
// panel there; it is already exact to machine precision.
inline unsigned quad_depth(double a, double b) {
  const double scale = std::fmax(1.0, std::fmax(std::abs(a), std::abs(b)));
  return std::abs(b - a) <= 1e-4 * scale ? 0u : 15u;
}

}  // namespace curvekit
