#pragma once

#include "curvekit/curvejet.hpp"
#include "curvekit/manifold.hpp"
#include "curvekit/types.hpp"

namespace curvekit {

// Frenet data of a non-null, non-degenerate, arc-length curve at one t.
//   T = alpha', kappa = |alpha' x cd1|, tau = eps3 * Omega(T,cd1,cd2)/kappa^2,
//   N = eps3 (alpha' x cd1) x alpha' / kappa, B = omega eps1 (alpha' x cd1)/kappa.
struct FrenetApparatus {
  double t = 0.0;
  Vec3 T, N, B;
  double kappa = 0.0;
  double tau = 0.0;
  int eps1 = 0;  // g(T,T)
  int eps2 = 0;  // sign g(cd1,cd1)
  int eps3 = 0;  // omega * eps1 * eps2
  int eps = 0;   // sign Omega(alpha', cd1, cd2)
};

// Throws NotUnitSpeed when | |g(alpha',alpha')| - 1 | > 1e-6 and
// DegenerateCurve when the cross product alpha' x cd1 is null relative to
// its Lagrange-identity scale.
FrenetApparatus frenet_apparatus(const MetricSystem& system,
                                 const CurveSpec& curve, double t);

// Residuals of the three Frenet equations
//   nabla_T T - eps2 kappa N,
//   nabla_T N + eps1 kappa T - eps3 tau B,
//   nabla_T B + eps2 tau N,
// with the frame fields differentiated numerically along the curve. Used as
// a self-consistency oracle by the tests and by the check command.
std::array<Vec3, 3> frenet_ode_residual(const MetricSystem& system,
                                        const CurveSpec& curve, double t);

}  // namespace curvekit
