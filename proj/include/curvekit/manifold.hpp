#pragma once

#include "curvekit/types.hpp"

#include <atomic>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace curvekit {

// Derivatives of the metric components: dg[k](i,j) = d g_ij / d x^k.
using MetricJacobian = std::array<Mat3, 3>;

// A pseudo-Riemannian metric on a single chart of a 3-manifold. Component
// functions are supplied as callables; the partial-derivative map is
// optional and falls back to fourth-order central differences.
//
// The sign of det g must not change across the chart: the first computed
// sign is cached (shared by copies, which represent the same metric) and a
// later flip raises SignatureChanged.
struct ChartMetric {
  std::function<Mat3(const Vec3&)> g;
  std::function<MetricJacobian(const Vec3&)> dg;  // may be empty
  int orientation = +1;  // declared orientation of the coordinate basis

  ChartMetric() : omega_cache_(std::make_shared<std::atomic<int>>(0)) {}

  std::shared_ptr<std::atomic<int>> omega_cache_;
};

// Torsion-free affine connection; either attached in closed form by the
// catalog or derived from a metric. dgamma (the coordinate derivatives of
// the coefficients) is optional; when present the covariant-jet recursion
// can evaluate second covariant derivatives without a stencil.
struct Connection {
  std::function<Christoffel(const Vec3&)> gamma;
  std::function<ChristoffelJacobian(const Vec3&)> dgamma;  // may be empty
  bool closed_form = false;
};

// Metric together with its Levi-Civita connection; most curve-level
// operations need both.
struct MetricSystem {
  ChartMetric metric;
  Connection connection;
};

Mat3 metric_eval(const ChartMetric& metric, const Vec3& p);

// omega = sign(det g); +1 for signatures (+++)/(+--), -1 for (++-)/(---).
int signature_sign(const ChartMetric& metric, const Vec3& p);

Christoffel christoffel(const ChartMetric& metric, const Vec3& p);

// The connection induced by the metric (coefficients recomputed per call).
Connection levi_civita(const ChartMetric& metric);

// Omega(u,v,w) = sqrt|det g| * det[u v w] * orientation.
double volume(const ChartMetric& metric, const Vec3& p, const Vec3& u,
              const Vec3& v, const Vec3& w);

// The metric cross product, defined by g(X x Y, Z) = Omega(X,Y,Z).
Vec3 cross(const ChartMetric& metric, const Vec3& p, const Vec3& X,
           const Vec3& Y);

// g_p(u, v)
double inner(const ChartMetric& metric, const Vec3& p, const Vec3& u,
             const Vec3& v);

// Catalog: euclidean3, minkowski3_ppm, example1, example2. The last two are
// the exponential-factor Lorentzian metrics e^{2z}(dx^2+dy^2-dz^2) and
// e^{2x}(dx^2+dy^2-dz^2); they come with closed-form connections.
MetricSystem catalog_metric(const std::string& name,
                            const std::map<std::string, double>& params = {});

}  // namespace curvekit
