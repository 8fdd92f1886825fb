#include "curvekit/catalog.hpp"

#include <cmath>
#include <complex>
#include <set>

namespace curvekit {

namespace {

double get(const std::map<std::string, double>& params, const std::string& key,
           double fallback) {
  auto it = params.find(key);
  return it == params.end() ? fallback : it->second;
}

bool has(const std::map<std::string, double>& params, const std::string& key) {
  return params.count(key) > 0;
}

double small_factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

// Derivatives of the log-spiral pattern (rho cos(q ln(at)), rho sin(q ln(at)),
// ln(at)) through (at)^{iq}: the k-th derivative multiplies by
// (iq)(iq-1)...(iq-k+1) / t^k.
Vec3 ex1_deriv(double a, double b, double lam, double t, int k) {
  const double q = b / a;
  const double rho = std::sqrt(a * a + lam) / b;
  const double L = std::log(a * t);
  if (k == 0) {
    return Vec3(rho * std::cos(q * L), rho * std::sin(q * L), L);
  }
  std::complex<double> fac(0.0, q);
  for (int j = 1; j < k; ++j) fac *= std::complex<double>(-j, q);
  const std::complex<double> w =
      std::exp(std::complex<double>(0.0, q * L)) * fac / std::pow(t, k);
  const double zk =
      (k % 2 == 1 ? 1.0 : -1.0) * small_factorial(k - 1) / std::pow(t, k);
  return Vec3(rho * w.real(), rho * w.imag(), zk);
}

// Same pattern with hyperbolic functions, through (at)^{+-q}.
Vec3 ex2_deriv(double a, double b, double t, int k) {
  const double q = b / a;
  const double rho = std::sqrt(1.0 - a * a) / b;
  const double L = std::log(a * t);
  const double U = std::exp(q * L);
  const double V = std::exp(-q * L);
  if (k == 0) {
    return Vec3(L, rho * (U - V) / 2.0, rho * (U + V) / 2.0);
  }
  double fu = 1.0, fv = 1.0;
  for (int j = 0; j < k; ++j) {
    fu *= (q - j);
    fv *= (-q - j);
  }
  const double tk = std::pow(t, k);
  const double Uk = U * fu / tk;
  const double Vk = V * fv / tk;
  const double xk = (k % 2 == 1 ? 1.0 : -1.0) * small_factorial(k - 1) / tk;
  return Vec3(xk, rho * (Uk - Vk) / 2.0, rho * (Uk + Vk) / 2.0);
}

Vec3 helix_deriv(double r, double h, double om, double s, int k) {
  const double c = std::cos(om * s);
  const double sn = std::sin(om * s);
  double cc, ss;
  switch (k % 4) {
    case 0:
      cc = c;
      ss = sn;
      break;
    case 1:
      cc = -sn;
      ss = c;
      break;
    case 2:
      cc = -c;
      ss = -sn;
      break;
    default:
      cc = sn;
      ss = -c;
      break;
  }
  const double wk = std::pow(om, k);
  const double z = k == 0 ? h * om * s : (k == 1 ? h * om : 0.0);
  return Vec3(r * wk * cc, r * wk * ss, z);
}

ScalarFunction constant_fn(double v) {
  ScalarFunction f;
  f.value = [v](double) { return v; };
  f.d1 = [](double) { return 0.0; };
  f.d2 = [](double) { return 0.0; };
  f.d3 = [](double) { return 0.0; };
  return f;
}

// A/t with its first three derivatives.
ScalarFunction reciprocal_fn(double A) {
  ScalarFunction f;
  f.value = [A](double t) { return A / t; };
  f.d1 = [A](double t) { return -A / (t * t); };
  f.d2 = [A](double t) { return 2.0 * A / (t * t * t); };
  f.d3 = [A](double t) { return -6.0 * A / (t * t * t * t); };
  return f;
}

void check_sign(std::vector<std::string>& out,
                const std::map<std::string, double>& params,
                const std::string& key) {
  const double v = get(params, key, 1.0);
  if (v != 1.0 && v != -1.0) {
    out.push_back(key + " must be +1 or -1");
  }
}

void check_keys(std::vector<std::string>& out,
                const std::map<std::string, double>& params,
                const std::set<std::string>& known, const std::string& name) {
  for (const auto& kv : params) {
    if (!known.count(kv.first)) {
      out.push_back("unknown parameter '" + kv.first + "' for " + name);
    }
  }
}

void check_options(std::vector<std::string>& out,
                   const std::map<std::string, std::string>& options,
                   const std::set<std::string>& known,
                   const std::string& name) {
  for (const auto& kv : options) {
    if (!known.count(kv.first)) {
      out.push_back("unknown option '" + kv.first + "' for " + name);
    }
  }
}

}  // namespace

GeneratorFunction catalog_generator(
    const std::string& name, const std::map<std::string, double>& params) {
  GeneratorFunction g;
  if (name == "linear") {
    const double c0 = get(params, "c0", 0.0);
    const double c1 = get(params, "c1", 1.0);
    if (c1 == 0.0) {
      throw ConfigError("linear generator needs slope c1 != 0");
    }
    g.f = [c0, c1](double u) { return c0 + c1 * u; };
    g.d1 = [c1](double) { return c1; };
    g.d2 = [](double) { return 0.0; };
    g.d3 = [](double) { return 0.0; };
    g.d4 = [](double) { return 0.0; };
    g.t_min = -1e6;
    g.t_max = 1e6;
    return g;
  }
  if (name == "exponential") {
    auto e = [](double u) { return std::exp(u); };
    g.f = e;
    g.d1 = e;
    g.d2 = e;
    g.d3 = e;
    g.d4 = e;
    g.t_min = -20.0;
    g.t_max = 20.0;
    return g;
  }
  if (name == "power") {
    const double p = get(params, "p", 2.0);
    if (p == 0.0) {
      throw ConfigError("power generator needs a non-zero exponent");
    }
    auto dk = [p](int k) {
      return [p, k](double u) {
        double coef = 1.0;
        for (int j = 0; j < k; ++j) coef *= (p - j);
        return coef * std::pow(u, p - k);
      };
    };
    g.f = dk(0);
    g.d1 = dk(1);
    g.d2 = dk(2);
    g.d3 = dk(3);
    g.d4 = dk(4);
    g.t_min = 1e-6;
    g.t_max = 1e6;
    return g;
  }
  if (name == "moebius") {
    const double a = get(params, "a", 2.0);
    const double b = get(params, "b", 1.0);
    const double c = get(params, "c", 1.0);
    const double d = get(params, "d", 3.0);
    if (a * d - b * c == 0.0) {
      throw ConfigError("moebius generator needs ad - bc != 0");
    }
    if (c == 0.0) {
      if (d == 0.0) throw ConfigError("moebius generator needs c or d != 0");
      return catalog_generator("linear", {{"c0", b / d}, {"c1", a / d}});
    }
    // f = a/c + (bc - ad) / (c (cu + d)); the k-th derivative is
    // (bc - ad) (-1)^k k! c^{k-1} / (cu + d)^{k+1}
    auto dk = [a, b, c, d](int k) {
      return [a, b, c, d, k](double u) {
        const double den = c * u + d;
        if (k == 0) return (a * u + b) / den;
        const double num = (b * c - a * d) *
                           (k % 2 == 0 ? 1.0 : -1.0) * small_factorial(k) *
                           std::pow(c, k - 1);
        return num / std::pow(den, k + 1);
      };
    };
    g.f = dk(0);
    g.d1 = dk(1);
    g.d2 = dk(2);
    g.d3 = dk(3);
    g.d4 = dk(4);
    const double pole = -d / c;
    g.t_min = pole + 1e-6 * std::fmax(1.0, std::abs(pole));
    g.t_max = 1e6;
    return g;
  }
  if (name == "tan") {
    g.f = [](double u) { return std::tan(u); };
    g.d1 = [](double u) {
      const double f = std::tan(u);
      return 1.0 + f * f;
    };
    g.d2 = [](double u) {
      const double f = std::tan(u);
      const double f1 = 1.0 + f * f;
      return 2.0 * f * f1;
    };
    g.d3 = [](double u) {
      const double f = std::tan(u);
      const double f1 = 1.0 + f * f;
      const double f2 = 2.0 * f * f1;
      return 2.0 * f1 * f1 + 2.0 * f * f2;
    };
    g.d4 = [](double u) {
      const double f = std::tan(u);
      const double f1 = 1.0 + f * f;
      const double f2 = 2.0 * f * f1;
      const double f3 = 2.0 * f1 * f1 + 2.0 * f * f2;
      return 6.0 * f1 * f2 + 2.0 * f * f3;
    };
    g.t_min = -1.45;
    g.t_max = 1.45;
    return g;
  }
  throw UnknownCatalogEntry(
      "unknown generator '" + name +
      "' (available: linear, exponential, power, moebius, tan)");
}

std::vector<std::string> catalog_admissibility(
    const std::string& name, const std::map<std::string, double>& params,
    const std::map<std::string, std::string>& options) {
  std::vector<std::string> out;
  if (name == "example1curve") {
    check_keys(out, params, {"a", "b", "lambda"}, name);
    check_options(out, options, {}, name);
    const double a = get(params, "a", 1.0);
    const double b = get(params, "b", 1.0);
    const double lam = get(params, "lambda", 1.0);
    if (lam != 1.0 && lam != -1.0) out.push_back("lambda must be +1 or -1");
    if (!(a > 0.0)) out.push_back("a must be positive");
    if (!(a * a + lam > 0.0)) out.push_back("a^2 + lambda must be positive");
    if (b == 0.0) out.push_back("b must be non-zero");
    if (!(b * b - lam > 0.0)) out.push_back("b^2 - lambda must be positive");
    return out;
  }
  if (name == "example2curve") {
    check_keys(out, params, {"a", "b"}, name);
    check_options(out, options, {}, name);
    const double a = get(params, "a", 0.5);
    const double b = get(params, "b", 0.5);
    if (!(a > 0.0 && a < 1.0)) out.push_back("a must lie in (0, 1)");
    if (!(b * b > 0.0 && b * b < 1.0)) {
      out.push_back("b^2 must lie in (0, 1)");
    }
    return out;
  }
  if (name == "helix") {
    check_keys(out, params, {"r", "h"}, name);
    check_options(out, options, {"metric"}, name);
    const double r = get(params, "r", 1.0);
    const double h = get(params, "h", 1.0);
    const std::string metric = options.count("metric")
                                   ? options.at("metric")
                                   : std::string("euclidean3");
    if (!(r > 0.0)) out.push_back("r must be positive");
    if (metric == "minkowski3_ppm") {
      if (r * r == h * h) {
        out.push_back("r and |h| must differ (|r^2 - h^2| sets the speed)");
      }
    } else if (metric != "euclidean3") {
      out.push_back("helix metric must be euclidean3 or minkowski3_ppm");
    }
    return out;
  }
  if (name == "nullfromf") {
    check_keys(out, params,
               {"eps", "t0", "px", "py", "pz", "c0", "c1", "p", "a", "b", "c",
                "d"},
               name);
    check_options(out, options, {"generator"}, name);
    if (!options.count("generator")) {
      out.push_back("nullfromf needs a generator option");
      return out;
    }
    const double eps = get(params, "eps", 1.0);
    if (eps != 1.0 && eps != -1.0) out.push_back("eps must be +1 or -1");
    try {
      GeneratorFunction gen = catalog_generator(options.at("generator"), params);
      const double t0 = get(params, "t0", 1.0);
      if (!(t0 > gen.t_min && t0 < gen.t_max)) {
        out.push_back("t0 is outside the generator domain");
      }
    } catch (const Error& e) {
      out.push_back(e.what());
    }
    return out;
  }
  if (name == "corollary2") {
    check_keys(out, params, {"A", "B", "eps1", "eps2", "eps3"}, name);
    check_options(out, options, {}, name);
    const double A = get(params, "A", 1.0);
    const double B = get(params, "B", 1.0);
    if (!(A > 0.0)) out.push_back("A must be positive");
    if (B == 0.0) out.push_back("B must be non-zero");
    check_sign(out, params, "eps1");
    check_sign(out, params, "eps2");
    check_sign(out, params, "eps3");
    return out;
  }
  out.push_back("unknown curve '" + name +
                "' (available: example1curve, example2curve, helix, "
                "nullfromf, corollary2)");
  return out;
}

CatalogCurve catalog_curve(const std::string& name,
                           const std::map<std::string, double>& params,
                           const std::map<std::string, std::string>& options) {
  {
    const std::set<std::string> known{"example1curve", "example2curve",
                                      "helix", "nullfromf", "corollary2"};
    if (!known.count(name)) {
      throw UnknownCatalogEntry(
          "unknown curve '" + name +
          "' (available: example1curve, example2curve, helix, nullfromf, "
          "corollary2)");
    }
  }
  const std::vector<std::string> bad = catalog_admissibility(name, params,
                                                             options);
  if (!bad.empty()) {
    std::string msg = "inadmissible parameters for " + name + ":";
    for (const auto& m : bad) msg += " " + m + ";";
    msg.pop_back();
    throw ConfigError(msg);
  }

  CatalogCurve out;
  out.name = name;

  if (name == "example1curve") {
    const double a = get(params, "a", 1.0);
    const double b = get(params, "b", 1.0);
    const double lam = get(params, "lambda", 1.0);
    out.metric_name = "example1";
    out.system = catalog_metric("example1");
    CurveSpec c;
    c.t_min = 0.0;
    c.t_max = 1e6;
    c.position = [a, b, lam](double t) { return ex1_deriv(a, b, lam, t, 0); };
    for (int k = 1; k <= 4; ++k) {
      c.derivative[k - 1] = [a, b, lam, k](double t) {
        return ex1_deriv(a, b, lam, t, k);
      };
    }
    out.curve = c;
    const double P = (a * a + lam) * (b * b - lam);
    KappaTauSource src;
    src.kappa = reciprocal_fn(std::sqrt(P) / a);
    src.tau = reciprocal_fn(-lam * b);
    src.eps1 = static_cast<int>(lam);
    src.eps2 = 1;
    src.eps3 = static_cast<int>(-lam);
    out.source = src;
    out.kappa1_closed = [a, b, lam, P](double t) {
      return (-3.0 * a * a + 4.0 * (b * b - lam)) /
             (8.0 * a * std::sqrt(std::abs(b) * P * t * t * t));
    };
    out.kappa2_closed = [a, b, lam, P](double t) {
      return (3.0 * a * a - 4.0 * (b * b - lam)) /
             (4.0 * a * std::cbrt(a * std::abs(b) * P) * t);
    };
    return out;
  }

  if (name == "example2curve") {
    const double a = get(params, "a", 0.5);
    const double b = get(params, "b", 0.5);
    out.metric_name = "example2";
    out.system = catalog_metric("example2");
    CurveSpec c;
    c.t_min = 0.0;
    c.t_max = 1e6;
    c.position = [a, b](double t) { return ex2_deriv(a, b, t, 0); };
    for (int k = 1; k <= 4; ++k) {
      c.derivative[k - 1] = [a, b, k](double t) {
        return ex2_deriv(a, b, t, k);
      };
    }
    out.curve = c;
    const double P = (1.0 - a * a) * (1.0 - b * b);
    KappaTauSource src;
    src.kappa = reciprocal_fn(std::sqrt(P) / a);
    src.tau = reciprocal_fn(-b);
    src.eps1 = 1;
    src.eps2 = 1;
    src.eps3 = -1;
    out.source = src;
    out.kappa1_closed = [a, b, P](double t) {
      return (4.0 - 3.0 * a * a - 4.0 * b * b) /
             (8.0 * a * std::sqrt(std::abs(b) * P * t * t * t));
    };
    out.kappa2_closed = [a, b, P](double t) {
      return (3.0 * a * a + 4.0 * b * b - 4.0) /
             (4.0 * a * std::cbrt(a * std::abs(b) * P) * t);
    };
    return out;
  }

  if (name == "helix") {
    const double r = get(params, "r", 1.0);
    const double h = get(params, "h", 1.0);
    const std::string metric = options.count("metric")
                                   ? options.at("metric")
                                   : std::string("euclidean3");
    out.metric_name = metric;
    out.system = catalog_metric(metric);
    double om, kappa, tau;
    int e1, e2, e3;
    if (metric == "euclidean3") {
      om = 1.0 / std::sqrt(r * r + h * h);
      kappa = r * om * om;
      tau = h * om * om;
      e1 = e2 = e3 = 1;
    } else {
      const double D = r * r - h * h;
      om = 1.0 / std::sqrt(std::abs(D));
      kappa = r * om * om;
      e2 = 1;
      if (D > 0.0) {  // spacelike
        e1 = 1;
        e3 = -1;
        tau = -h * om * om;
      } else {  // timelike
        e1 = -1;
        e3 = 1;
        tau = h * om * om;
      }
    }
    CurveSpec c;
    c.t_min = -1e6;
    c.t_max = 1e6;
    c.position = [r, h, om](double s) { return helix_deriv(r, h, om, s, 0); };
    for (int k = 1; k <= 4; ++k) {
      c.derivative[k - 1] = [r, h, om, k](double s) {
        return helix_deriv(r, h, om, s, k);
      };
    }
    out.curve = c;
    KappaTauSource src;
    src.kappa = constant_fn(kappa);
    src.tau = constant_fn(tau);
    src.eps1 = e1;
    src.eps2 = e2;
    src.eps3 = e3;
    out.source = src;
    if (tau != 0.0) {
      const auto closed =
          corollary_curvatures("const", kappa, tau, e1, e2, e3, 1.0);
      out.kappa1_closed = [closed](double) { return closed.first; };
      out.kappa2_closed = [closed](double) { return closed.second; };
    }
    return out;
  }

  if (name == "nullfromf") {
    const std::string gname = options.at("generator");
    GeneratorFunction gen = catalog_generator(gname, params);
    const double t0 = get(params, "t0", 1.0);
    const Vec3 p0(get(params, "px", 0.0), get(params, "py", 0.0),
                  get(params, "pz", 0.0));
    const int eps = static_cast<int>(get(params, "eps", 1.0));
    out.metric_name = "minkowski3_ppm";
    out.system = catalog_metric("minkowski3_ppm");
    out.curve = minkowski_null_from_f(gen, t0, p0, eps);
    out.is_null = true;
    out.kappa2_closed = [gen](double t) { return -2.0 * schwarzian(gen, t); };
    if (gen.d4) {
      // kappa1 = -dS/dt with S' = f''''/f' - 4 f''' f''/f'^2 + 3 f''^3/f'^3
      out.kappa1_closed = [gen](double t) {
        const double f1 = gen.d1(t);
        const double f2 = gen.d2(t);
        const double f3 = gen.d3(t);
        const double f4 = gen.d4(t);
        return -(f4 / f1 - 4.0 * f3 * f2 / (f1 * f1) +
                 3.0 * f2 * f2 * f2 / (f1 * f1 * f1));
      };
    }
    return out;
  }

  // corollary2: no embedding, only the kappa/tau data
  const double A = get(params, "A", 1.0);
  const double B = get(params, "B", 1.0);
  const int e1 = static_cast<int>(get(params, "eps1", 1.0));
  const int e2 = static_cast<int>(get(params, "eps2", 1.0));
  const int e3 = static_cast<int>(get(params, "eps3", 1.0));
  out.metric_name = "abstract";
  out.system = catalog_metric("euclidean3");
  KappaTauSource src;
  src.kappa = reciprocal_fn(A);
  src.tau = reciprocal_fn(B);
  src.eps1 = e1;
  src.eps2 = e2;
  src.eps3 = e3;
  out.source = src;
  out.kappa1_closed = [A, B, e1, e2, e3](double t) {
    return corollary_curvatures("reciprocal", A, B, e1, e2, e3, t).first;
  };
  out.kappa2_closed = [A, B, e1, e2, e3](double t) {
    return corollary_curvatures("reciprocal", A, B, e1, e2, e3, t).second;
  };
  return out;
}

}  // namespace curvekit
