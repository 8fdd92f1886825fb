#pragma once

#include <functional>

#include "curvekit/curvejet.hpp"
#include "curvekit/manifold.hpp"
#include "curvekit/types.hpp"

namespace curvekit {

// Frame of a null curve in pseudo-arc parametrization (g(cd1,cd1) = 1):
//   L = alpha', W = cd1, N = -cd2 - tau alpha', tau = g(cd2,cd2)/2,
// satisfying g(L,N) = g(W,W) = 1, all other products zero, and
//   nabla_L L = W, nabla_L N = tau W, nabla_L W = -tau L - N.
struct NullFrenetApparatus {
  double t = 0.0;
  Vec3 L, N, W;
  double tau = 0.0;        // pseudo-torsion
  double tau_prime = 0.0;  // d(tau)/dt along the curve
};

// Throws NullPointEncountered when alpha' is not null and NotPseudoArc when
// |g(cd1,cd1) - 1| > 1e-5.
NullFrenetApparatus null_frame(const MetricSystem& system,
                               const CurveSpec& curve, double t);

double pseudo_torsion(const MetricSystem& system, const CurveSpec& curve,
                      double t);

// Residuals of the three null frame equations above, frame fields
// differentiated numerically along the curve.
std::array<Vec3, 3> null_ode_residual(const MetricSystem& system,
                                      const CurveSpec& curve, double t);

// For a null curve in pseudo-arc parametrization the equi-affine machinery
// collapses: mu = phi = 1, Omega(alpha', cd1, cd2) = eps in {-1, +1}, and
//   kappa1 = -tau', kappa2 = -2 tau.
std::pair<double, double> null_equiaffine_curvatures(const MetricSystem& system,
                                                     const CurveSpec& curve,
                                                     double t);

// Generator of a null curve in flat Minkowski space: a scalar function f with
// derivatives up to third order (d4 optional, used only when present).
struct GeneratorFunction {
  std::function<double(double)> f;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  std::function<double(double)> d3;
  std::function<double(double)> d4;  // may be empty
  double t_min = -1e100;
  double t_max = 1e100;
};

// Pseudo-arc null curve in (R^3, dx^2 + dy^2 - dz^2) built from a generator:
//   alpha'(t) = (eps / (2 f')) * (2 f, f^2 - 1, f^2 + 1),  eps = +-1,
// integrated from alpha(t0) = p0. Requires |f'| > 1e-10 on the grid; throws
// GeneratorDegenerate otherwise. Its pseudo-torsion is the Schwarzian
// derivative
//   S(f) = f'''/f' - (3/2) (f''/f')^2.
CurveSpec minkowski_null_from_f(const GeneratorFunction& gen, double t0,
                                const Vec3& p0, int eps);

double schwarzian(const GeneratorFunction& gen, double t);

}  // namespace curvekit
