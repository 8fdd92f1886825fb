#include "curvekit/manifold.hpp"

#include <cmath>

#include "curvekit/numdiff.hpp"

namespace curvekit {

namespace {

constexpr double kDetTol = 1e-12;  // vs (max row norm)^3

double max_row_norm(const Mat3& g) {
  double m = 0.0;
  for (int i = 0; i < 3; ++i) m = std::fmax(m, g.row(i).template lpNorm<1>());
  return m;
}

// Metric partials: analytic map when present, otherwise fourth-order central
// differences coordinate by coordinate.
MetricJacobian metric_jacobian(const ChartMetric& metric, const Vec3& p) {
  if (metric.dg) return metric.dg(p);
  MetricJacobian out;
  for (int k = 0; k < 3; ++k) {
    const double h =
        std::pow(kMachineEps, 0.2) * std::fmax(1.0, std::abs(p[k]));
    Mat3 acc;
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        acc(i, j) = central_stencil4(
            [&](double x) {
              Vec3 q = p;
              q[k] = x;
              return metric.g(q)(i, j);
            },
            p[k], 1, h);
      }
    }
    out[k] = acc;
  }
  return out;
}

Mat3 constant_diag(double a, double b, double c) {
  Mat3 g = Mat3::Zero();
  g(0, 0) = a;
  g(1, 1) = b;
  g(2, 2) = c;
  return g;
}

MetricJacobian zero_jacobian() {
  return {Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
}

Christoffel zero_christoffel() {
  return {Mat3::Zero(), Mat3::Zero(), Mat3::Zero()};
}

ChristoffelJacobian zero_christoffel_jacobian() {
  return {zero_christoffel(), zero_christoffel(), zero_christoffel()};
}

Connection flat_connection() {
  Connection c;
  c.gamma = [](const Vec3&) { return zero_christoffel(); };
  c.dgamma = [](const Vec3&) { return zero_christoffel_jacobian(); };
  c.closed_form = true;
  return c;
}

}  // namespace

Mat3 metric_eval(const ChartMetric& metric, const Vec3& p) {
  Mat3 g = metric.g(p);
  if (!g.allFinite()) {
    throw ChartExit("metric components are not finite at (" +
                    std::to_string(p[0]) + ", " + std::to_string(p[1]) + ", " +
                    std::to_string(p[2]) + ")");
  }
  g = 0.5 * (g + g.transpose().eval());
  const double scale = max_row_norm(g);
  if (std::abs(g.determinant()) <= kDetTol * scale * scale * scale) {
    throw SingularMetric("metric determinant vanishes at (" +
                         std::to_string(p[0]) + ", " + std::to_string(p[1]) +
                         ", " + std::to_string(p[2]) + ")");
  }
  return g;
}

int signature_sign(const ChartMetric& metric, const Vec3& p) {
  const double det = metric_eval(metric, p).determinant();
  const int s = det > 0.0 ? +1 : -1;
  int expected = 0;
  if (!metric.omega_cache_->compare_exchange_strong(expected, s)) {
    if (expected != s) {
      throw SignatureChanged(
          "sign of det g changed across the chart (metric signature is "
          "assumed constant)");
    }
  }
  return s;
}

Christoffel christoffel(const ChartMetric& metric, const Vec3& p) {
  const Mat3 g = metric_eval(metric, p);
  const Mat3 ginv = g.inverse();
  const MetricJacobian dg = metric_jacobian(metric, p);
  Christoffel out;
  for (int k = 0; k < 3; ++k) out[k] = Mat3::Zero();
  for (int k = 0; k < 3; ++k) {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        double sum = 0.0;
        for (int l = 0; l < 3; ++l) {
          sum += ginv(k, l) * (dg[i](l, j) + dg[j](l, i) - dg[l](i, j));
        }
        out[k](i, j) = 0.5 * sum;
      }
    }
  }
  return out;
}

Connection levi_civita(const ChartMetric& metric) {
  Connection c;
  c.gamma = [metric](const Vec3& p) { return christoffel(metric, p); };
  c.closed_form = false;
  return c;
}

double volume(const ChartMetric& metric, const Vec3& p, const Vec3& u,
              const Vec3& v, const Vec3& w) {
  const Mat3 g = metric_eval(metric, p);
  Mat3 cols;
  cols.col(0) = u;
  cols.col(1) = v;
  cols.col(2) = w;
  return metric.orientation * std::sqrt(std::abs(g.determinant())) *
         cols.determinant();
}

Vec3 cross(const ChartMetric& metric, const Vec3& p, const Vec3& X,
           const Vec3& Y) {
  const Mat3 g = metric_eval(metric, p);
  const Vec3 e = X.cross(Y);  // component-wise cross, weighted below
  return metric.orientation * std::sqrt(std::abs(g.determinant())) *
         g.inverse() * e;
}

double inner(const ChartMetric& metric, const Vec3& p, const Vec3& u,
             const Vec3& v) {
  return u.dot(metric_eval(metric, p) * v);
}

MetricSystem catalog_metric(const std::string& name,
                            const std::map<std::string, double>& params) {
  (void)params;  // all catalog metrics are parameter-free
  MetricSystem sys;
  if (name == "euclidean3") {
    sys.metric.g = [](const Vec3&) { return constant_diag(1, 1, 1); };
    sys.metric.dg = [](const Vec3&) { return zero_jacobian(); };
    sys.connection = flat_connection();
    return sys;
  }
  if (name == "minkowski3_ppm") {
    sys.metric.g = [](const Vec3&) { return constant_diag(1, 1, -1); };
    sys.metric.dg = [](const Vec3&) { return zero_jacobian(); };
    sys.connection = flat_connection();
    return sys;
  }
  if (name == "example1") {
    // e^{2z}(dx^2 + dy^2 - dz^2)
    sys.metric.g = [](const Vec3& p) {
      const double f = std::exp(2.0 * p[2]);
      return constant_diag(f, f, -f);
    };
    sys.metric.dg = [](const Vec3& p) {
      MetricJacobian j = zero_jacobian();
      const double f = 2.0 * std::exp(2.0 * p[2]);
      j[2] = constant_diag(f, f, -f);
      return j;
    };
    sys.connection.gamma = [](const Vec3&) {
      Christoffel c = zero_christoffel();
      c[2](0, 0) = c[2](1, 1) = c[2](2, 2) = 1.0;
      c[0](0, 2) = c[0](2, 0) = 1.0;
      c[1](1, 2) = c[1](2, 1) = 1.0;
      return c;
    };
    sys.connection.dgamma = [](const Vec3&) {
      return zero_christoffel_jacobian();
    };
    sys.connection.closed_form = true;
    return sys;
  }
  if (name == "example2") {
    // e^{2x}(dx^2 + dy^2 - dz^2)
    sys.metric.g = [](const Vec3& p) {
      const double f = std::exp(2.0 * p[0]);
      return constant_diag(f, f, -f);
    };
    sys.metric.dg = [](const Vec3& p) {
      MetricJacobian j = zero_jacobian();
      const double f = 2.0 * std::exp(2.0 * p[0]);
      j[0] = constant_diag(f, f, -f);
      return j;
    };
    sys.connection.gamma = [](const Vec3&) {
      Christoffel c = zero_christoffel();
      c[0](0, 0) = 1.0;
      c[0](1, 1) = -1.0;
      c[0](2, 2) = 1.0;
      c[1](0, 1) = c[1](1, 0) = 1.0;
      c[2](0, 2) = c[2](2, 0) = 1.0;
      return c;
    };
    sys.connection.dgamma = [](const Vec3&) {
      return zero_christoffel_jacobian();
    };
    sys.connection.closed_form = true;
    return sys;
  }
  throw UnknownCatalogEntry("unknown metric '" + name +
                            "' (available: euclidean3, minkowski3_ppm, "
                            "example1, example2)");
}

}  // namespace curvekit
