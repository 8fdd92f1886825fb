#pragma once

#include "curvekit/types.hpp"

#include <functional>

namespace curvekit {

// Derivative of order 1..3 of a scalar function by central differences with
// one Richardson extrapolation level. The base step is
//   h0 = scale * eps^(1/(order+4)),
// which balances the O(h^2) truncation of the compact central stencils
// against round-off amplified by 1/h^order; the extrapolated result is
// fourth-order accurate. Throws DifferentiationFailure if f produces a
// non-finite value anywhere on the stencil.
double scalar_derivative(const std::function<double(double)>& f, double t,
                         int order, double scale = 1.0);

// Same scheme applied componentwise to a vector-valued function.
Vec3 vector_derivative(const std::function<Vec3(double)>& f, double t,
                       int order, double scale = 1.0);

// One-shot fourth-order first derivative on the five-point stencil
// (-2h..2h) with an explicit step; used by the covariant-jet recursion,
// which picks its steps from the noise level of the differentiated field.
Vec3 vector_d1_stencil4(const std::function<Vec3(double)>& f, double t,
                        double h);

// Fourth-order central stencils for derivatives of a scalar component, with
// an explicit step; order 1..4 (orders 3 and 4 use seven points).
double central_stencil4(const std::function<double(double)>& f, double t,
                        int order, double h);

// Bracketed Newton for a strictly monotone function: solves F(t) = target
// for t in [lo, hi], falling back to bisection whenever the Newton step
// leaves the bracket. Converges to |F(t) - target| <= tol or a bracket of
// width <= tol * max(1, |t|).
double invert_monotone(const std::function<double(double)>& F,
                       const std::function<double(double)>& dF, double lo,
                       double hi, double target, double tol = 1e-12);

}  // namespace curvekit
