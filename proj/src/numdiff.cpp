#include "curvekit/numdiff.hpp"

#include <cmath>
#include <string>

namespace curvekit {

namespace {

void require_finite(double v, double t) {
  if (!std::isfinite(v)) {
    throw DifferentiationFailure(
        "non-finite function value on the difference stencil near t = " +
        std::to_string(t));
  }
}

// Compact second-order central stencils, one per order.
template <typename F>
double compact(const F& f, double t, int order, double h) {
  switch (order) {
    case 1:
      return (f(t + h) - f(t - h)) / (2.0 * h);
    case 2:
      return (f(t + h) - 2.0 * f(t) + f(t - h)) / (h * h);
    case 3:
      return (f(t + 2.0 * h) - 2.0 * f(t + h) + 2.0 * f(t - h) -
              f(t - 2.0 * h)) /
             (2.0 * h * h * h);
    default:
      throw DifferentiationFailure("scalar_derivative supports orders 1..3");
  }
}

}  // namespace

double scalar_derivative(const std::function<double(double)>& f, double t,
                         int order, double scale) {
  if (order < 1 || order > 3) {
    throw DifferentiationFailure("scalar_derivative supports orders 1..3");
  }
  const double h = scale * std::pow(kMachineEps, 1.0 / (order + 4));
  auto eval = [&](double u) {
    double v = f(u);
    require_finite(v, t);
    return v;
  };
  const double coarse = compact(eval, t, order, h);
  const double fine = compact(eval, t, order, 0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

Vec3 vector_derivative(const std::function<Vec3(double)>& f, double t,
                       int order, double scale) {
  if (order < 1 || order > 3) {
    throw DifferentiationFailure("vector_derivative supports orders 1..3");
  }
  const double h = scale * std::pow(kMachineEps, 1.0 / (order + 4));
  auto eval = [&](double u) {
    Vec3 v = f(u);
    require_finite(v.sum(), t);
    return v;
  };
  auto compact_vec = [&](double step) -> Vec3 {
    switch (order) {
      case 1:
        return (eval(t + step) - eval(t - step)) / (2.0 * step);
      case 2:
        return (eval(t + step) - 2.0 * eval(t) + eval(t - step)) /
               (step * step);
      default:
        return (eval(t + 2.0 * step) - 2.0 * eval(t + step) +
                2.0 * eval(t - step) - eval(t - 2.0 * step)) /
               (2.0 * step * step * step);
    }
  };
  const Vec3 coarse = compact_vec(h);
  const Vec3 fine = compact_vec(0.5 * h);
  return (4.0 * fine - coarse) / 3.0;
}

Vec3 vector_d1_stencil4(const std::function<Vec3(double)>& f, double t,
                        double h) {
  const Vec3 m2 = f(t - 2.0 * h);
  const Vec3 m1 = f(t - h);
  const Vec3 p1 = f(t + h);
  const Vec3 p2 = f(t + 2.0 * h);
  Vec3 d = (m2 - p2 + 8.0 * (p1 - m1)) / (12.0 * h);
  if (!std::isfinite(d.sum())) {
    throw DifferentiationFailure(
        "non-finite value on the derivative stencil near t = " +
        std::to_string(t));
  }
  return d;
}

double central_stencil4(const std::function<double(double)>& f, double t,
                        int order, double h) {
  auto e = [&](double off) {
    double v = f(t + off * h);
    require_finite(v, t);
    return v;
  };
  switch (order) {
    case 1:
      return (e(-2) - e(2) + 8.0 * (e(1) - e(-1))) / (12.0 * h);
    case 2:
      return (-e(-2) + 16.0 * e(-1) - 30.0 * e(0) + 16.0 * e(1) - e(2)) /
             (12.0 * h * h);
    case 3:
      return (e(-3) / 8.0 - e(-2) + 13.0 / 8.0 * e(-1) - 13.0 / 8.0 * e(1) +
              e(2) - e(3) / 8.0) /
             (h * h * h);
    case 4:
      return (-e(-3) / 6.0 + 2.0 * e(-2) - 6.5 * e(-1) + 28.0 / 3.0 * e(0) -
              6.5 * e(1) + 2.0 * e(2) - e(3) / 6.0) /
             (h * h * h * h);
    default:
      throw DifferentiationFailure("central_stencil4 supports orders 1..4");
  }
}

double invert_monotone(const std::function<double(double)>& F,
                       const std::function<double(double)>& dF, double lo,
                       double hi, double target, double tol) {
  double flo = F(lo) - target;
  double fhi = F(hi) - target;
  if (!std::isfinite(flo) || !std::isfinite(fhi)) {
    throw DifferentiationFailure("non-finite bracket values in invert_monotone");
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) {
    throw Error("invert_monotone: target " + std::to_string(target) +
                " is not bracketed by [" + std::to_string(lo) + ", " +
                std::to_string(hi) + "]");
  }
  const double up = fhi > flo ? 1.0 : -1.0;  // orientation of F
  double t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double ft = F(t) - target;
    if (std::abs(ft) <= tol) return t;
    if (up * ft > 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    if (hi - lo <= tol * std::fmax(1.0, std::abs(t))) return 0.5 * (lo + hi);
    const double d = dF(t);
    double next = 0.5 * (lo + hi);
    if (std::isfinite(d) && d != 0.0) {
      const double newton = t - ft / d;
      if (newton > lo && newton < hi) next = newton;
    }
    t = next;
  }
  return t;
}

}  // namespace curvekit
