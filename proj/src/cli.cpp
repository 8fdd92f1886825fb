#include "curvekit/cli.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "json.hpp"

#include "curvekit/equiaffine.hpp"
#include "curvekit/frenet.hpp"
#include "curvekit/nullcurve.hpp"

namespace curvekit {

namespace {

using nlohmann::json;

std::string classify(const std::exception& e) {
  auto tag = [&]() -> const char* {
    if (dynamic_cast<const ConfigError*>(&e)) return "ConfigError";
    if (dynamic_cast<const UnknownCatalogEntry*>(&e)) return "UnknownCatalogEntry";
    if (dynamic_cast<const GeneratorDegenerate*>(&e)) return "GeneratorDegenerate";
    if (dynamic_cast<const ZeroTorsion*>(&e)) return "ZeroTorsion";
    if (dynamic_cast<const ZeroCurvature*>(&e)) return "ZeroCurvature";
    if (dynamic_cast<const NotPseudoArc*>(&e)) return "NotPseudoArc";
    if (dynamic_cast<const NotUnitSpeed*>(&e)) return "NotUnitSpeed";
    if (dynamic_cast<const DegenerateNullCurve*>(&e)) return "DegenerateNullCurve";
    if (dynamic_cast<const DegenerateCurve*>(&e)) return "DegenerateCurve";
    if (dynamic_cast<const NullPointEncountered*>(&e)) return "NullPointEncountered";
    if (dynamic_cast<const ChartExit*>(&e)) return "ChartExit";
    if (dynamic_cast<const DifferentiationFailure*>(&e)) return "DifferentiationFailure";
    if (dynamic_cast<const SignatureChanged*>(&e)) return "SignatureChanged";
    if (dynamic_cast<const SingularMetric*>(&e)) return "SingularMetric";
    if (dynamic_cast<const Error*>(&e)) return "Error";
    return "error";
  }();
  return std::string(tag) + ": " + e.what();
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string out;
  for (size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += "\"";
  return out;
}

std::string json_escape(const std::string& s) {
  std::string out;
  for (unsigned char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof buf, "\\u%04x", c);
          out += buf;
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

std::string json_number(double v) {
  if (!std::isfinite(v)) return "null";
  return format_double(v);
}

std::string opt_csv(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::string opt_json(const std::optional<double>& v) {
  return v ? json_number(*v) : std::string("null");
}

std::string opt_csv_int(const std::optional<int>& v) {
  return v ? std::to_string(*v) : std::string();
}

std::string opt_json_int(const std::optional<int>& v) {
  return v ? std::to_string(*v) : std::string("null");
}

std::vector<double> grid_points(const GridSpec& grid) {
  std::vector<double> out;
  if (grid.samples <= 1) {
    out.push_back(grid.t_start);
    return out;
  }
  const double step = (grid.t_end - grid.t_start) / (grid.samples - 1);
  for (int i = 0; i < grid.samples; ++i) {
    out.push_back(i + 1 == grid.samples ? grid.t_end : grid.t_start + i * step);
  }
  return out;
}

// The helix entry carries its metric as a curve option; feed the configured
// metric through so the catalog and the config cannot disagree silently.
std::map<std::string, std::string> resolved_options(const JobConfig& config) {
  std::map<std::string, std::string> opts = config.curve_options;
  if (config.curve_name == "helix" && !opts.count("metric")) {
    opts["metric"] = config.metric_name;
  }
  return opts;
}

const std::map<std::string, std::vector<std::string>>& curve_metric_pairs() {
  static const std::map<std::string, std::vector<std::string>> pairs = {
      {"example1curve", {"example1"}},
      {"example2curve", {"example2"}},
      {"helix", {"euclidean3", "minkowski3_ppm"}},
      {"nullfromf", {"minkowski3_ppm"}},
      {"corollary2", {}},  // abstract, any metric
  };
  return pairs;
}

int env_threads() {
  const char* raw = std::getenv("CURVEKIT_THREADS");
  if (!raw) return 1;
  const int n = std::atoi(raw);
  return std::max(1, std::min(n, 64));
}

double integral(const std::function<double(double)>& f, double a, double b) {
  if (a == b) return 0.0;
  const double lo = std::min(a, b), hi = std::max(a, b);
  double err = 0.0;
  const double v =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
          f, lo, hi, quad_depth(lo, hi), kQuadTol, &err);
  return a <= b ? v : -v;
}

struct RoutePlan {
  bool direct = false;
  bool structural = false;
  bool frenet = false;
};

RoutePlan route_plan(const std::vector<std::string>& routes) {
  RoutePlan plan;
  for (const auto& r : routes) {
    if (r == "direct") plan.direct = true;
    if (r == "structural") plan.structural = true;
    if (r == "frenet") plan.frenet = true;
  }
  return plan;
}

InvariantRow compute_row(const CatalogCurve& cat, const RoutePlan& plan,
                         double t_origin, double t) {
  InvariantRow row;
  row.t = t;
  std::vector<std::string> errs;

  if (!cat.curve) {
    // abstract entry: kappa/tau data only, frenet-side route only
    const KappaTauSource& src = *cat.source;
    row.character = src.eps1 > 0 ? "spacelike" : "timelike";
    row.eps1 = src.eps1;
    row.eps2 = src.eps2;
    row.eps3 = src.eps3;
    try {
      const double k = src.kappa.value(t);
      const double tau = src.tau.value(t);
      row.kappa = k;
      row.tau = tau;
      row.mu = std::cbrt(k) * std::pow(std::abs(tau), 1.0 / 6.0);
      row.eps = src.eps3 * (tau < 0.0 ? -1 : 1);
      row.sigma = integral(
          [&src](double u) {
            return std::cbrt(src.kappa.value(u)) *
                   std::pow(std::abs(src.tau.value(u)), 1.0 / 6.0);
          },
          t_origin, t);
    } catch (const std::exception& e) {
      errs.push_back(classify(e));
    }
    if (plan.frenet) {
      try {
        const auto k = curvatures_frenet(src, t);
        row.k1_frenet = k.first;
        row.k2_frenet = k.second;
      } catch (const std::exception& e) {
        errs.push_back(classify(e));
      }
    }
    row.error = join(errs, " | ");
    return row;
  }

  const MetricSystem& sys = cat.system;
  const CurveSpec& curve = *cat.curve;

  try {
    row.sigma = equiaffine_arclength(sys, curve, t_origin, t);
  } catch (const std::exception& e) {
    errs.push_back(classify(e));
  }
  try {
    row.character = to_string(causal_character(sys.metric, curve, t).tag);
  } catch (const std::exception& e) {
    errs.push_back(classify(e));
  }
  try {
    const auto sp = equiaffine_speed(sys, curve, t);
    row.mu = sp.mu;
    row.eps = sp.eps;
  } catch (const std::exception& e) {
    errs.push_back(classify(e));
  }

  if (cat.is_null) {
    try {
      row.tau = pseudo_torsion(sys, curve, t);
    } catch (const std::exception& e) {
      errs.push_back(classify(e));
    }
    if (plan.frenet) {
      try {
        const auto k = null_equiaffine_curvatures(sys, curve, t);
        row.k1_frenet = k.first;
        row.k2_frenet = k.second;
      } catch (const std::exception& e) {
        errs.push_back(classify(e));
      }
    }
  } else {
    try {
      const auto fr = frenet_apparatus(sys, curve, t);
      row.kappa = fr.kappa;
      row.tau = fr.tau;
      row.eps1 = fr.eps1;
      row.eps2 = fr.eps2;
      row.eps3 = fr.eps3;
    } catch (const std::exception& e) {
      errs.push_back(classify(e));
    }
    if (plan.frenet && cat.source) {
      try {
        const auto k = curvatures_frenet(*cat.source, t);
        row.k1_frenet = k.first;
        row.k2_frenet = k.second;
      } catch (const std::exception& e) {
        errs.push_back(classify(e));
      }
    }
  }

  if (plan.direct) {
    try {
      const auto k = curvatures_direct(sys, curve, t);
      row.k1_direct = k.first;
      row.k2_direct = k.second;
    } catch (const std::exception& e) {
      errs.push_back(classify(e));
    }
  }
  if (plan.structural) {
    try {
      const auto k = curvatures_structural(sys, curve, t);
      row.k1_structural = k.first;
      row.k2_structural = k.second;
    } catch (const std::exception& e) {
      errs.push_back(classify(e));
    }
  }

  // max pairwise gap across the routes that produced values
  std::vector<std::pair<double, double>> got;
  if (row.k1_direct && row.k2_direct) got.push_back({*row.k1_direct, *row.k2_direct});
  if (row.k1_structural && row.k2_structural) {
    got.push_back({*row.k1_structural, *row.k2_structural});
  }
  if (row.k1_frenet && row.k2_frenet) got.push_back({*row.k1_frenet, *row.k2_frenet});
  if (got.size() >= 2) {
    double worst = 0.0;
    for (size_t i = 0; i < got.size(); ++i) {
      for (size_t j = i + 1; j < got.size(); ++j) {
        worst = std::max(worst, std::abs(got[i].first - got[j].first));
        worst = std::max(worst, std::abs(got[i].second - got[j].second));
      }
    }
    row.discrepancy = worst;
  }

  row.error = join(errs, " | ");
  return row;
}

void emit_invariants_csv(const std::vector<InvariantRow>& rows,
                         std::ostream& out) {
  out << "t,sigma,character,kappa,tau,eps1,eps2,eps3,eps,mu,kappa1_direct,"
         "kappa2_direct,kappa1_structural,kappa2_structural,kappa1_frenet,"
         "kappa2_frenet,route_discrepancy,error\n";
  for (const auto& r : rows) {
    out << format_double(r.t) << ',' << opt_csv(r.sigma) << ','
        << csv_escape(r.character) << ',' << opt_csv(r.kappa) << ','
        << opt_csv(r.tau) << ',' << opt_csv_int(r.eps1) << ','
        << opt_csv_int(r.eps2) << ',' << opt_csv_int(r.eps3) << ','
        << opt_csv_int(r.eps) << ',' << opt_csv(r.mu) << ','
        << opt_csv(r.k1_direct) << ',' << opt_csv(r.k2_direct) << ','
        << opt_csv(r.k1_structural) << ',' << opt_csv(r.k2_structural) << ','
        << opt_csv(r.k1_frenet) << ',' << opt_csv(r.k2_frenet) << ','
        << opt_csv(r.discrepancy) << ',' << csv_escape(r.error) << '\n';
  }
}

void emit_invariants_json(const JobConfig& config,
                          const std::vector<InvariantRow>& rows,
                          std::ostream& out) {
  out << "{\"command\":\"invariants\",\"metric\":\""
      << json_escape(config.metric_name) << "\",\"curve\":\""
      << json_escape(config.curve_name) << "\",\"rows\":[";
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i) out << ',';
    out << "{\"t\":" << json_number(r.t) << ",\"sigma\":" << opt_json(r.sigma)
        << ",\"character\":\"" << json_escape(r.character) << "\""
        << ",\"kappa\":" << opt_json(r.kappa) << ",\"tau\":" << opt_json(r.tau)
        << ",\"eps1\":" << opt_json_int(r.eps1)
        << ",\"eps2\":" << opt_json_int(r.eps2)
        << ",\"eps3\":" << opt_json_int(r.eps3)
        << ",\"eps\":" << opt_json_int(r.eps) << ",\"mu\":" << opt_json(r.mu)
        << ",\"kappa1_direct\":" << opt_json(r.k1_direct)
        << ",\"kappa2_direct\":" << opt_json(r.k2_direct)
        << ",\"kappa1_structural\":" << opt_json(r.k1_structural)
        << ",\"kappa2_structural\":" << opt_json(r.k2_structural)
        << ",\"kappa1_frenet\":" << opt_json(r.k1_frenet)
        << ",\"kappa2_frenet\":" << opt_json(r.k2_frenet)
        << ",\"route_discrepancy\":" << opt_json(r.discrepancy)
        << ",\"error\":"
        << (r.error.empty() ? std::string("null")
                            : "\"" + json_escape(r.error) + "\"")
        << "}";
  }
  out << "]}\n";
}

struct CheckRow {
  std::string name;
  std::string status;  // pass | fail | skipped | error
  std::optional<double> worst;
  double tolerance = 0.0;
};

void emit_check_csv(const std::vector<CheckRow>& rows, std::ostream& out) {
  out << "name,status,worst_residual,tolerance\n";
  for (const auto& r : rows) {
    out << r.name << ',' << r.status << ',' << opt_csv(r.worst) << ','
        << format_double(r.tolerance) << '\n';
  }
}

void emit_check_json(const JobConfig& config, const std::vector<CheckRow>& rows,
                     std::ostream& out) {
  out << "{\"command\":\"check\",\"metric\":\"" << json_escape(config.metric_name)
      << "\",\"curve\":\"" << json_escape(config.curve_name)
      << "\",\"checks\":[";
  for (size_t i = 0; i < rows.size(); ++i) {
    const auto& r = rows[i];
    if (i) out << ',';
    out << "{\"name\":\"" << r.name << "\",\"status\":\"" << r.status
        << "\",\"worst_residual\":" << opt_json(r.worst)
        << ",\"tolerance\":" << json_number(r.tolerance) << "}";
  }
  out << "]}\n";
}

double rel(double resid, double scale) {
  return std::abs(resid) / (1.0 + scale);
}

double relv(const Vec3& resid, double scale) {
  return resid.norm() / (1.0 + scale);
}

// Seven cross-product identities, the Gram identity and the orthonormal
// volume check, on random component vectors at the given point.
double identity_residual(const ChartMetric& metric, const Vec3& p,
                         std::mt19937& rng) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  auto rv = [&]() { return Vec3(uni(rng), uni(rng), uni(rng)); };
  const Vec3 X = rv(), Y = rv(), Z = rv(), W = rv();
  const double om = signature_sign(metric, p);
  auto g2 = [&](const Vec3& u, const Vec3& v) { return inner(metric, p, u, v); };
  auto cr = [&](const Vec3& u, const Vec3& v) { return cross(metric, p, u, v); };
  auto vol = [&](const Vec3& u, const Vec3& v, const Vec3& w) {
    return volume(metric, p, u, v, w);
  };

  double worst = 0.0;
  const Vec3 XY = cr(X, Y);
  const Vec3 ZW = cr(Z, W);

  worst = std::max(worst, relv(XY + cr(Y, X), 2.0 * XY.norm()));
  worst = std::max(worst, rel(g2(XY, X), std::abs(g2(XY, X)) + XY.norm() * X.norm()));
  worst = std::max(worst, rel(g2(XY, Y), std::abs(g2(XY, Y)) + XY.norm() * Y.norm()));

  {
    const Vec3 lhs = cr(XY, Z);
    const Vec3 rhs = om * (-g2(Y, Z) * X + g2(X, Z) * Y);
    worst = std::max(worst, relv(lhs - rhs, lhs.norm() + rhs.norm()));
  }
  {
    const Vec3 jac = cr(X, cr(Y, Z)) + cr(Y, cr(Z, X)) + cr(Z, cr(X, Y));
    worst = std::max(
        worst, relv(jac, cr(X, cr(Y, Z)).norm() + cr(Y, cr(Z, X)).norm() +
                             cr(Z, cr(X, Y)).norm()));
  }
  {
    const double lhs = g2(XY, XY);
    const double rhs = om * (g2(X, X) * g2(Y, Y) - g2(X, Y) * g2(X, Y));
    worst = std::max(worst, rel(lhs - rhs, std::abs(lhs) + std::abs(rhs)));
  }
  {
    const double lhs = g2(XY, ZW);
    const double rhs = om * (g2(X, Z) * g2(Y, W) - g2(X, W) * g2(Y, Z));
    worst = std::max(worst, rel(lhs - rhs, std::abs(lhs) + std::abs(rhs)));
  }
  {
    const Vec3 lhs = cr(XY, ZW);
    const Vec3 rhs = om * (vol(X, Y, W) * Z - vol(X, Y, Z) * W);
    worst = std::max(worst, relv(lhs - rhs, lhs.norm() + rhs.norm()));
  }
  {
    const double lhs = vol(X, Y, Z) * vol(X, Y, Z);
    Mat3 gram;
    const Vec3 v[3] = {X, Y, Z};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) gram(i, j) = g2(v[i], v[j]);
    const double rhs = om * gram.determinant();
    worst = std::max(worst, rel(lhs - rhs, std::abs(lhs) + std::abs(rhs)));
  }
  {
    // volume of a g-orthonormal triple built by Gram-Schmidt is +-1
    Vec3 E[3] = {rv(), rv(), rv()};
    bool ok = true;
    for (int i = 0; i < 3 && ok; ++i) {
      for (int j = 0; j < i; ++j) {
        const double sj = g2(E[j], E[j]);
        E[i] -= (g2(E[i], E[j]) / sj) * E[j];
      }
      const double n = g2(E[i], E[i]);
      if (std::abs(n) < 1e-6) {
        ok = false;  // unlucky draw near a null direction, skip the triple
        break;
      }
      E[i] /= std::sqrt(std::abs(n));
    }
    if (ok) {
      const double v3 = vol(E[0], E[1], E[2]);
      worst = std::max(worst, rel(std::abs(v3) - 1.0, 1.0));
    }
  }
  return worst;
}

}  // namespace

std::string format_double(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return std::string(buf);
}

JobConfig parse_config(std::istream& in) {
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  std::vector<std::string> errs;
  JobConfig config;

  if (!doc.is_object()) {
    throw ConfigError("config root must be a JSON object");
  }
  const std::set<std::string> top{"metric", "curve", "grid",
                                  "routes", "output", "tolerances"};
  for (const auto& kv : doc.items()) {
    if (!top.count(kv.key())) errs.push_back("unknown key '" + kv.key() + "'");
  }

  if (!doc.contains("metric") || !doc["metric"].is_object()) {
    errs.push_back("config needs a metric object");
  } else {
    const json& m = doc["metric"];
    for (const auto& kv : m.items()) {
      if (kv.key() != "name" && kv.key() != "params") {
        errs.push_back("unknown key 'metric." + kv.key() + "'");
      }
    }
    if (!m.contains("name") || !m["name"].is_string()) {
      errs.push_back("metric.name must be a string");
    } else {
      config.metric_name = m["name"].get<std::string>();
    }
    if (m.contains("params")) {
      if (!m["params"].is_object()) {
        errs.push_back("metric.params must be an object");
      } else {
        for (const auto& kv : m["params"].items()) {
          if (!kv.value().is_number()) {
            errs.push_back("metric.params." + kv.key() + " must be a number");
          } else {
            config.metric_params[kv.key()] = kv.value().get<double>();
          }
        }
      }
    }
  }

  if (!doc.contains("curve") || !doc["curve"].is_object()) {
    errs.push_back("config needs a curve object");
  } else {
    const json& c = doc["curve"];
    for (const auto& kv : c.items()) {
      if (kv.key() != "name" && kv.key() != "params") {
        errs.push_back("unknown key 'curve." + kv.key() + "'");
      }
    }
    if (!c.contains("name") || !c["name"].is_string()) {
      errs.push_back("curve.name must be a string");
    } else {
      config.curve_name = c["name"].get<std::string>();
    }
    if (c.contains("params")) {
      if (!c["params"].is_object()) {
        errs.push_back("curve.params must be an object");
      } else {
        for (const auto& kv : c["params"].items()) {
          if (kv.value().is_number()) {
            config.curve_params[kv.key()] = kv.value().get<double>();
          } else if (kv.value().is_string()) {
            config.curve_options[kv.key()] = kv.value().get<std::string>();
          } else {
            errs.push_back("curve.params." + kv.key() +
                           " must be a number or a string");
          }
        }
      }
    }
  }

  if (!doc.contains("grid") || !doc["grid"].is_object()) {
    errs.push_back("config needs a grid object");
  } else {
    const json& g = doc["grid"];
    for (const auto& kv : g.items()) {
      if (kv.key() != "t_start" && kv.key() != "t_end" && kv.key() != "samples") {
        errs.push_back("unknown key 'grid." + kv.key() + "'");
      }
    }
    auto num = [&](const char* key, double& slot, bool integral) {
      if (!g.contains(key) || !g[key].is_number()) {
        errs.push_back(std::string("grid.") + key + " must be a number");
        return;
      }
      slot = g[key].get<double>();
      if (integral && slot != std::floor(slot)) {
        errs.push_back(std::string("grid.") + key + " must be an integer");
      }
    };
    double samples = 0.0;
    num("t_start", config.grid.t_start, false);
    num("t_end", config.grid.t_end, false);
    num("samples", samples, true);
    config.grid.samples = static_cast<int>(samples);
  }

  if (doc.contains("routes")) {
    if (!doc["routes"].is_array()) {
      errs.push_back("routes must be an array of strings");
    } else {
      config.routes.clear();
      for (const auto& r : doc["routes"]) {
        if (!r.is_string()) {
          errs.push_back("routes must be an array of strings");
          break;
        }
        const std::string name = r.get<std::string>();
        if (std::find(config.routes.begin(), config.routes.end(), name) ==
            config.routes.end()) {
          config.routes.push_back(name);
        }
      }
    }
  }

  if (doc.contains("output")) {
    if (!doc["output"].is_object()) {
      errs.push_back("output must be an object");
    } else {
      const json& o = doc["output"];
      for (const auto& kv : o.items()) {
        if (kv.key() != "format" && kv.key() != "path") {
          errs.push_back("unknown key 'output." + kv.key() + "'");
        }
      }
      if (o.contains("format")) {
        if (!o["format"].is_string()) {
          errs.push_back("output.format must be a string");
        } else {
          config.output.format = o["format"].get<std::string>();
        }
      }
      if (o.contains("path")) {
        if (!o["path"].is_string()) {
          errs.push_back("output.path must be a string");
        } else {
          config.output.path = o["path"].get<std::string>();
        }
      }
    }
  }

  if (doc.contains("tolerances")) {
    if (!doc["tolerances"].is_object()) {
      errs.push_back("tolerances must be an object");
    } else {
      std::map<std::string, double*> slots{
          {"route_agreement", &config.tol.route_agreement},
          {"kappa_tau", &config.tol.kappa_tau},
          {"closed_form", &config.tol.closed_form},
          {"frame_identity", &config.tol.frame_identity},
          {"omega_triple", &config.tol.omega_triple},
          {"ode_residual", &config.tol.ode_residual},
          {"cross_identity", &config.tol.cross_identity},
          {"null_products", &config.tol.null_products},
          {"reparam_residual", &config.tol.reparam_residual},
      };
      for (const auto& kv : doc["tolerances"].items()) {
        auto it = slots.find(kv.key());
        if (it == slots.end()) {
          errs.push_back("unknown tolerance '" + kv.key() + "'");
        } else if (!kv.value().is_number()) {
          errs.push_back("tolerances." + kv.key() + " must be a number");
        } else {
          *it->second = kv.value().get<double>();
        }
      }
    }
  }

  if (!errs.empty()) throw ConfigError(join(errs, "; "));
  return config;
}

JobConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in);
}

std::vector<std::string> validate_config(const JobConfig& config) {
  std::vector<std::string> errs;

  const std::set<std::string> metrics{"euclidean3", "minkowski3_ppm",
                                      "example1", "example2"};
  const bool metric_known = metrics.count(config.metric_name) > 0;
  if (!metric_known) {
    errs.push_back("unknown metric '" + config.metric_name +
                   "' (available: euclidean3, minkowski3_ppm, example1, "
                   "example2)");
  }
  if (!config.metric_params.empty()) {
    errs.push_back("catalog metrics take no parameters");
  }

  if (config.routes.empty()) {
    errs.push_back("routes must not be empty");
  }
  for (const auto& r : config.routes) {
    if (r != "direct" && r != "structural" && r != "frenet") {
      errs.push_back("unknown route '" + r +
                     "' (available: direct, structural, frenet)");
    }
  }

  if (config.output.format != "csv" && config.output.format != "json") {
    errs.push_back("output.format must be csv or json");
  }

  const double* tols[] = {
      &config.tol.route_agreement, &config.tol.kappa_tau,
      &config.tol.closed_form,     &config.tol.frame_identity,
      &config.tol.omega_triple,    &config.tol.ode_residual,
      &config.tol.cross_identity,  &config.tol.null_products,
      &config.tol.reparam_residual};
  for (const double* t : tols) {
    if (!(*t > 0.0)) {
      errs.push_back("tolerances must be positive");
      break;
    }
  }

  if (!std::isfinite(config.grid.t_start) || !std::isfinite(config.grid.t_end)) {
    errs.push_back("grid bounds must be finite");
  }
  if (config.grid.samples < 1) {
    errs.push_back("grid.samples must be at least 1");
  }
  if (config.grid.samples > 1 && !(config.grid.t_start < config.grid.t_end)) {
    errs.push_back("grid.t_start must be below grid.t_end");
  }

  const auto opts = resolved_options(config);
  const auto bad = catalog_admissibility(config.curve_name, config.curve_params,
                                         opts);
  errs.insert(errs.end(), bad.begin(), bad.end());

  const auto& pairs = curve_metric_pairs();
  auto pit = pairs.find(config.curve_name);
  if (pit != pairs.end() && metric_known && !pit->second.empty()) {
    if (std::find(pit->second.begin(), pit->second.end(), config.metric_name) ==
        pit->second.end()) {
      errs.push_back("curve '" + config.curve_name +
                     "' is not defined for metric '" + config.metric_name +
                     "' (expects " + join(pit->second, " or ") + ")");
    }
  }

  if (bad.empty() && pit != pairs.end()) {
    // grid must sit inside the curve domain with room for the stencils
    try {
      const CatalogCurve cat =
          catalog_curve(config.curve_name, config.curve_params, opts);
      const double lo = cat.curve ? cat.curve->t_min : 0.0;
      const double hi = cat.curve ? cat.curve->t_max : 1e6;
      auto margin = [](double t) { return 0.1 * std::fmax(1.0, std::abs(t)); };
      if (!(config.grid.t_start - margin(config.grid.t_start) > lo) ||
          !(config.grid.t_end + margin(config.grid.t_end) < hi)) {
        std::ostringstream msg;
        msg << "grid [" << config.grid.t_start << ", " << config.grid.t_end
            << "] leaves no stencil margin inside the curve domain (" << lo
            << ", " << hi << ")";
        errs.push_back(msg.str());
      }
    } catch (const std::exception& e) {
      errs.push_back(classify(e));
    }
  }

  return errs;
}

int cmd_invariants(const JobConfig& config, std::ostream& out,
                   std::ostream& diag) {
  const auto errs = validate_config(config);
  if (!errs.empty()) {
    for (const auto& e : errs) diag << "config error: " << e << "\n";
    return 1;
  }
  const CatalogCurve cat = catalog_curve(config.curve_name, config.curve_params,
                                         resolved_options(config));
  RoutePlan plan = route_plan(config.routes);
  if (!cat.curve && (plan.direct || plan.structural)) {
    diag << "note: curve '" << cat.name
         << "' has no embedding; only the frenet route applies\n";
    plan.direct = plan.structural = false;
  }
  if (cat.is_null && plan.frenet) {
    diag << "note: curve is null; the frenet columns report the null-frame "
            "curvatures (-tau', -2 tau)\n";
  }

  const std::vector<double> ts = grid_points(config.grid);
  std::vector<InvariantRow> rows(ts.size());
  const int threads = std::min<int>(env_threads(), static_cast<int>(ts.size()));
  if (threads <= 1) {
    for (size_t i = 0; i < ts.size(); ++i) {
      rows[i] = compute_row(cat, plan, config.grid.t_start, ts[i]);
    }
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < threads; ++w) {
      pool.emplace_back([&, w]() {
        for (size_t i = w; i < ts.size(); i += threads) {
          rows[i] = compute_row(cat, plan, config.grid.t_start, ts[i]);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  if (config.output.format == "csv") {
    emit_invariants_csv(rows, out);
  } else {
    emit_invariants_json(config, rows, out);
  }
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      diag << "row t=" << format_double(r.t) << ": " << r.error << "\n";
    }
  }
  const bool bad = std::any_of(rows.begin(), rows.end(),
                               [](const InvariantRow& r) { return !r.error.empty(); });
  return bad ? 2 : 0;
}

int cmd_check(const JobConfig& config, std::ostream& out, std::ostream& diag) {
  const auto errs = validate_config(config);
  if (!errs.empty()) {
    for (const auto& e : errs) diag << "config error: " << e << "\n";
    return 1;
  }
  const CatalogCurve cat = catalog_curve(config.curve_name, config.curve_params,
                                         resolved_options(config));
  RoutePlan plan = route_plan(config.routes);
  if (!cat.curve) plan.direct = plan.structural = false;

  const std::vector<double> ts = grid_points(config.grid);
  const Tolerances& tol = config.tol;
  std::vector<CheckRow> rows;

  auto run = [&](const std::string& name, double tolerance, bool applies,
                 const std::function<std::optional<double>()>& body) {
    CheckRow row;
    row.name = name;
    row.tolerance = tolerance;
    if (!applies) {
      row.status = "skipped";
      rows.push_back(row);
      return;
    }
    try {
      row.worst = body();
      if (!row.worst) {
        row.status = "skipped";
      } else {
        row.status = *row.worst <= tolerance ? "pass" : "fail";
      }
    } catch (const std::exception& e) {
      row.status = "error";
      diag << "check " << name << ": " << classify(e) << "\n";
    }
    rows.push_back(row);
  };

  auto point_of = [&](double t) {
    return cat.curve ? cat.curve->position(t) : Vec3(t, 0.0, 0.0);
  };

  run("metric_identities", tol.cross_identity, true,
      [&]() -> std::optional<double> {
        std::mt19937 rng(20240816u);
        double worst = 0.0;
        for (double t : ts) {
          const Vec3 p = point_of(t);
          for (int k = 0; k < 25; ++k) {
            worst = std::max(worst, identity_residual(cat.system.metric, p, rng));
          }
        }
        return worst;
      });

  run("kappa_tau_closed_form", tol.kappa_tau,
      cat.curve && !cat.is_null && cat.source,
      [&]() -> std::optional<double> {
        double worst = 0.0;
        for (double t : ts) {
          const auto fr = frenet_apparatus(cat.system, *cat.curve, t);
          const double kc = cat.source->kappa.value(t);
          const double tc = cat.source->tau.value(t);
          worst = std::max(worst, std::abs(fr.kappa - kc) /
                                      (std::abs(kc) > 1e-12 ? std::abs(kc) : 1.0));
          worst = std::max(worst, std::abs(fr.tau - tc) /
                                      (std::abs(tc) > 1e-12 ? std::abs(tc) : 1.0));
        }
        return worst;
      });

  run("frame_identities", tol.frame_identity, cat.curve && !cat.is_null,
      [&]() -> std::optional<double> {
        double worst = 0.0;
        for (double t : ts) {
          const auto fr = frenet_apparatus(cat.system, *cat.curve, t);
          const Vec3 p = cat.curve->position(t);
          auto g2 = [&](const Vec3& u, const Vec3& v) {
            return inner(cat.system.metric, p, u, v);
          };
          worst = std::max(worst, std::abs(g2(fr.T, fr.T) - fr.eps1));
          worst = std::max(worst, std::abs(g2(fr.N, fr.N) - fr.eps2));
          worst = std::max(worst, std::abs(g2(fr.B, fr.B) - fr.eps3));
          worst = std::max(worst, std::abs(g2(fr.T, fr.N)));
          worst = std::max(worst, std::abs(g2(fr.T, fr.B)));
          worst = std::max(worst, std::abs(g2(fr.N, fr.B)));
          worst = std::max(
              worst, std::abs(volume(cat.system.metric, p, fr.T, fr.N, fr.B) - 1.0));
          const int om = signature_sign(cat.system.metric, p);
          worst = std::max(worst,
                           std::abs(double(fr.eps3 - om * fr.eps1 * fr.eps2)));
          const auto ca = cartan_frame(cat.system, *cat.curve, t);
          worst = std::max(
              worst, std::abs(volume(cat.system.metric, p, ca.e1, ca.e2, ca.e3) -
                              ca.eps));
          if (fr.tau != 0.0) {
            const int st = fr.tau < 0.0 ? -1 : 1;
            worst = std::max(worst, std::abs(double(st - ca.eps * fr.eps3)));
            const double phi_ref =
                std::pow(fr.kappa, -1.0 / 3.0) *
                std::pow(std::abs(fr.tau), -1.0 / 6.0);
            worst = std::max(worst, std::abs(ca.phi - phi_ref) / phi_ref);
          }
        }
        return worst;
      });

  run("omega_triple", tol.omega_triple, cat.curve && !cat.is_null,
      [&]() -> std::optional<double> {
        double worst = 0.0;
        for (double t : ts) {
          const auto fr = frenet_apparatus(cat.system, *cat.curve, t);
          const auto jet = covariant_jet(cat.system.connection, *cat.curve, t, 2);
          const double triple = volume(cat.system.metric, jet.position, jet.d1,
                                       jet.cd[0], jet.cd[1]);
          const double ref = fr.eps3 * fr.kappa * fr.kappa * fr.tau;
          worst = std::max(worst, std::abs(triple - ref) /
                                      (std::abs(ref) > 1e-12 ? std::abs(ref) : 1.0));
        }
        return worst;
      });

  run("ode_residual", tol.ode_residual, static_cast<bool>(cat.curve),
      [&]() -> std::optional<double> {
        double worst = 0.0;
        for (double t : ts) {
          const auto res = cat.is_null
                               ? null_ode_residual(cat.system, *cat.curve, t)
                               : frenet_ode_residual(cat.system, *cat.curve, t);
          for (const auto& r : res) worst = std::max(worst, r.norm());
        }
        return worst;
      });

  run("route_agreement", tol.route_agreement, static_cast<bool>(cat.curve),
      [&]() -> std::optional<double> {
        double worst = 0.0;
        bool any = false;
        for (double t : ts) {
          const InvariantRow row = compute_row(cat, plan, config.grid.t_start, t);
          if (!row.error.empty()) throw Error(row.error);
          if (row.discrepancy) {
            worst = std::max(worst, *row.discrepancy);
            any = true;
          }
        }
        if (!any) return std::nullopt;
        return worst;
      });

  run("closed_form_curvatures", tol.closed_form,
      static_cast<bool>(cat.kappa1_closed) && static_cast<bool>(cat.kappa2_closed),
      [&]() -> std::optional<double> {
        double worst = 0.0;
        for (double t : ts) {
          const InvariantRow row = compute_row(cat, plan, config.grid.t_start, t);
          if (!row.error.empty()) throw Error(row.error);
          const double c1 = cat.kappa1_closed(t);
          const double c2 = cat.kappa2_closed(t);
          auto score = [&](const std::optional<double>& v, double c) {
            if (!v) return;
            worst = std::max(worst, std::abs(*v - c) /
                                        (std::abs(c) > 1e-9 ? std::abs(c) : 1.0));
          };
          score(row.k1_direct, c1);
          score(row.k1_structural, c1);
          score(row.k1_frenet, c1);
          score(row.k2_direct, c2);
          score(row.k2_structural, c2);
          score(row.k2_frenet, c2);
        }
        return worst;
      });

  run("null_products", tol.null_products, cat.is_null,
      [&]() -> std::optional<double> {
        double worst = 0.0;
        for (double t : ts) {
          const auto nf = null_frame(cat.system, *cat.curve, t);
          const Vec3 p = cat.curve->position(t);
          auto g2 = [&](const Vec3& u, const Vec3& v) {
            return inner(cat.system.metric, p, u, v);
          };
          worst = std::max(worst, std::abs(g2(nf.L, nf.N) - 1.0));
          worst = std::max(worst, std::abs(g2(nf.W, nf.W) - 1.0));
          worst = std::max(worst, std::abs(g2(nf.L, nf.L)));
          worst = std::max(worst, std::abs(g2(nf.N, nf.N)));
          worst = std::max(worst, std::abs(g2(nf.L, nf.W)));
          worst = std::max(worst, std::abs(g2(nf.N, nf.W)));
        }
        return worst;
      });

  run("pseudo_arc_norm", kPseudoArcTol, cat.is_null,
      [&]() -> std::optional<double> {
        double worst = 0.0;
        for (double t : ts) {
          const auto jet = covariant_jet(cat.system.connection, *cat.curve, t, 1);
          const Vec3 p = jet.position;
          worst = std::max(
              worst,
              std::abs(inner(cat.system.metric, p, jet.cd[0], jet.cd[0]) - 1.0));
        }
        return worst;
      });

  if (config.output.format == "csv") {
    emit_check_csv(rows, out);
  } else {
    emit_check_json(config, rows, out);
  }
  const bool bad = std::any_of(rows.begin(), rows.end(), [](const CheckRow& r) {
    return r.status == "fail" || r.status == "error";
  });
  return bad ? 2 : 0;
}

int cmd_reparam(const JobConfig& config, std::ostream& out,
                std::ostream& diag) {
  auto errs = validate_config(config);
  if (!errs.empty()) {
    for (const auto& e : errs) diag << "config error: " << e << "\n";
    return 1;
  }
  const CatalogCurve cat = catalog_curve(config.curve_name, config.curve_params,
                                         resolved_options(config));
  if (!cat.curve) {
    diag << "config error: curve '" << cat.name
         << "' has no embedding to reparametrize\n";
    return 1;
  }

  bool bad = false;
  std::ostringstream body;
  std::vector<std::string> json_rows;
  try {
    const Reparametrization rep =
        cat.is_null
            ? reparametrize_pseudo_arclength(cat.system, *cat.curve,
                                             config.grid.t_start)
            : reparametrize_arclength(cat.system, *cat.curve,
                                      config.grid.t_start);
    for (double t : grid_points(config.grid)) {
      try {
        const double s = rep.from_param(t);
        double residual;
        if (cat.is_null) {
          const auto jet =
              covariant_jet(cat.system.connection, rep.curve, s, 1);
          residual = std::abs(
              inner(cat.system.metric, jet.position, jet.cd[0], jet.cd[0]) -
              1.0);
        } else {
          const Vec3 p = rep.curve.position(s);
          const Vec3 v = curve_derivative(rep.curve, s, 1);
          residual = std::abs(std::abs(inner(cat.system.metric, p, v, v)) - 1.0);
        }
        body << format_double(t) << ',' << format_double(s) << ','
             << format_double(residual) << '\n';
        json_rows.push_back("{\"t\":" + json_number(t) +
                            ",\"s\":" + json_number(s) +
                            ",\"residual\":" + json_number(residual) + "}");
      } catch (const std::exception& e) {
        bad = true;
        diag << "row t=" << format_double(t) << ": " << classify(e) << "\n";
        body << format_double(t) << ",,\n";
        json_rows.push_back("{\"t\":" + json_number(t) +
                            ",\"s\":null,\"residual\":null}");
      }
    }
  } catch (const std::exception& e) {
    diag << "reparam failed: " << classify(e) << "\n";
    return 2;
  }

  if (config.output.format == "csv") {
    out << "t,s,residual\n" << body.str();
  } else {
    out << "{\"command\":\"reparam\",\"curve\":\"" << json_escape(cat.name)
        << "\",\"rows\":[" << join(json_rows, ",") << "]}\n";
  }
  return bad ? 2 : 0;
}

}  // namespace curvekit
