#pragma once

// Shared curve fixtures and small helpers for the test suite.

#include <cmath>

#include "curvekit/catalog.hpp"
#include "curvekit/curvejet.hpp"
#include "curvekit/manifold.hpp"

namespace curvekit::testfix {

// A null curve of the e^{2z}(dx^2+dy^2-dz^2) metric that is not a geodesic:
// the tangent (cos t, sin t, 1) has zero metric square everywhere while the
// covariant acceleration stays non-null, so the pseudo-arc machinery has
// something real to chew on.
inline CurveSpec curved_null() {
  CurveSpec spec;
  spec.t_min = -6.0;
  spec.t_max = 6.0;
  spec.mode = CurveMode::analytic;
  spec.position = [](double t) {
    return Vec3(std::sin(t), 1.0 - std::cos(t), t);
  };
  spec.derivative[0] = [](double t) { return Vec3(std::cos(t), std::sin(t), 1.0); };
  spec.derivative[1] = [](double t) { return Vec3(-std::sin(t), std::cos(t), 0.0); };
  spec.derivative[2] = [](double t) { return Vec3(-std::cos(t), -std::sin(t), 0.0); };
  spec.derivative[3] = [](double t) { return Vec3(std::sin(t), -std::cos(t), 0.0); };
  return spec;
}

inline double ip(const MetricSystem& sys, const Vec3& p, const Vec3& u,
                 const Vec3& v) {
  return inner(sys.metric, p, u, v);
}

}  // namespace curvekit::testfix
