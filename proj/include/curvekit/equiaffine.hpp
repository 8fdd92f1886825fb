#pragma once

#include <functional>
#include <utility>

#include "curvekit/curvejet.hpp"
#include "curvekit/frenet.hpp"
#include "curvekit/manifold.hpp"
#include "curvekit/types.hpp"

namespace curvekit {

// Scalar function of one variable packaged with optional closed-form
// derivatives. Missing derivatives (empty std::function) are computed by
// scalar_derivative.
struct ScalarFunction {
  std::function<double(double)> value;
  std::function<double(double)> d1;
  std::function<double(double)> d2;
  std::function<double(double)> d3;
};

// Curvature and torsion of an arc-length curve, as functions of t, together
// with the causal signs. This is all the data the Frenet-side formulas need,
// so purely abstract curves (no embedding) can be fed through them too.
struct KappaTauSource {
  ScalarFunction kappa;
  ScalarFunction tau;
  int eps1 = 1;
  int eps2 = 1;
  int eps3 = 1;
};

// Equi-affine speed mu = |Omega(alpha', cd1, cd2)|^{1/6}, phi = 1/mu and the
// orientation sign eps of the volume triple. Throws DegenerateCurve when the
// triple vanishes relative to its Hadamard bound.
struct EquiaffineSpeed {
  double mu = 0.0;
  double phi = 0.0;
  int eps = 0;
};

EquiaffineSpeed equiaffine_speed(const MetricSystem& system,
                                 const CurveSpec& curve, double t);

// sigma(t) = integral_{t0}^{t} mu, the equi-affine arc length.
double equiaffine_arclength(const MetricSystem& system, const CurveSpec& curve,
                            double t0, double t);

// The Cartan frame e1 = phi alpha', e2 = phi nabla_{alpha'} e1,
// e3 = phi nabla_{alpha'} e2, expanded through the jet:
//   e2 = phi phi' alpha' + phi^2 cd1
//   e3 = (phi phi'^2 + phi^2 phi'') alpha' + 3 phi^2 phi' cd1 + phi^3 cd2
// phi-derivatives are taken numerically along the curve.
struct CartanApparatus {
  double t = 0.0;
  Vec3 e1, e2, e3;
  double mu = 0.0;
  double phi = 0.0;
  int eps = 0;
};

CartanApparatus cartan_frame(const MetricSystem& system, const CurveSpec& curve,
                             double t);

// Equi-affine curvatures from nabla_{e1} e3 = kappa1 e1 + kappa2 e2.
// Both routes return {kappa1, kappa2}.
//
// The direct route expands everything in the covariant jet:
//   kappa1 = phi^2 phi''' - 6 phi'^3
//            + eps phi^8 phi' Omega(alpha', cd2, cd3)
//            + eps phi^9 Omega(cd1, cd2, cd3)
//   kappa2 = 4 phi phi'' + 7 phi'^2 - eps phi^8 Omega(alpha', cd2, cd3)
std::pair<double, double> curvatures_direct(const MetricSystem& system,
                                            const CurveSpec& curve, double t);

// The structural route reads the coefficients off with volume forms:
//   kappa1 = eps phi Omega(nabla_{alpha'} e3, e2, e3)
//   kappa2 = eps phi Omega(e1, nabla_{alpha'} e3, e3)
// where nabla_{alpha'} e3 is a covariant stencil over the frame field.
std::pair<double, double> curvatures_structural(const MetricSystem& system,
                                                const CurveSpec& curve,
                                                double t);

// Frenet route: kappa1, kappa2 as polynomials in kappa, tau and their first
// three derivatives, divided by powers of kappa and tau. Needs no embedding.
// Throws ZeroCurvature / ZeroTorsion when the input functions vanish at t.
std::pair<double, double> curvatures_frenet(const KappaTauSource& source,
                                            double t);

// Cartan frame expressed over the Frenet frame (T, N, B) of the same curve:
// returns {e1, e2, e3} with each vector given by its coordinate components.
std::array<Vec3, 3> cartan_from_frenet(const MetricSystem& system,
                                       const CurveSpec& curve, double t);

// Closed forms for the two special families.
//   mode "const":      kappa = A, tau = B constant. kappa1 = 0,
//                      kappa2 = -eps2 (eps1 A^2 + eps3 B^2) / (A^{2/3} |B|^{1/3}).
//   mode "reciprocal": kappa = A/t, tau = B/t. With
//                      C = 1 + 4 eps2 (eps1 A^2 + eps3 B^2),
//                      kappa1 = C / (8 A sqrt(|B| t^3)),
//                      kappa2 = -C / (4 (A^2 |B|)^{1/3} t).
std::pair<double, double> corollary_curvatures(const std::string& mode,
                                               double A, double B, int eps1,
                                               int eps2, int eps3, double t);

}  // namespace curvekit
