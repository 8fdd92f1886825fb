#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curvekit/catalog.hpp"
#include "curvekit/types.hpp"

namespace curvekit {

// Tolerance ladder used by the check command; every field can be overridden
// from the config's "tolerances" object under the same key.
struct Tolerances {
  double route_agreement = 1e-4;   // pairwise kappa1/kappa2 across routes
  double kappa_tau = 1e-7;         // kappa, tau vs catalog closed forms
  double closed_form = 1e-4;       // kappa1, kappa2 vs catalog closed forms
  double frame_identity = 1e-7;    // Gram matrix, volume of frames, phi relation
  double omega_triple = 1e-6;      // Omega(alpha',cd1,cd2) = eps3 kappa^2 tau
  double ode_residual = 1e-5;      // Frenet / null frame equations
  double cross_identity = 1e-10;   // cross-product identities at curve points
  double null_products = 1e-7;     // null product tables
  double reparam_residual = 1e-9;  // | |g(beta',beta')| - 1 | after reparam
};

struct GridSpec {
  double t_start = 0.0;
  double t_end = 0.0;
  int samples = 0;
};

struct OutputSpec {
  std::string format = "csv";  // csv | json
  std::string path;            // empty = stdout
};

struct JobConfig {
  std::string metric_name;
  std::map<std::string, double> metric_params;
  std::string curve_name;
  std::map<std::string, double> curve_params;
  std::map<std::string, std::string> curve_options;
  GridSpec grid;
  std::vector<std::string> routes = {"direct", "structural", "frenet"};
  OutputSpec output;
  Tolerances tol;
};

// Reads the JSON config document. Throws ConfigError on malformed JSON or
// unknown keys; admissibility is checked separately by validate_config.
JobConfig parse_config(std::istream& in);
JobConfig parse_config_file(const std::string& path);

// Every violated invariant of the config (admissibility, grid vs domain with
// stencil margin, route names, metric/curve pairing). Empty means valid.
std::vector<std::string> validate_config(const JobConfig& config);

// One output row of the invariants table. Missing values (e.g. kappa on a
// null curve) stay unset and print as empty CSV cells / JSON null.
struct InvariantRow {
  double t = 0.0;
  std::optional<double> sigma;
  std::string character;
  std::optional<double> kappa;
  std::optional<double> tau;  // Frenet torsion, or pseudo-torsion when null
  std::optional<int> eps1, eps2, eps3, eps;
  std::optional<double> mu;
  std::optional<double> k1_direct, k2_direct;
  std::optional<double> k1_structural, k2_structural;
  std::optional<double> k1_frenet, k2_frenet;
  std::optional<double> discrepancy;
  std::string error;
};

// Subcommands. Tables go to `out`; notes and per-row diagnostics go to
// `diag`. Return value is the process exit code: 0 clean, 1 invalid config,
// 2 at least one row carries an error marker.
int cmd_invariants(const JobConfig& config, std::ostream& out,
                   std::ostream& diag);
int cmd_check(const JobConfig& config, std::ostream& out, std::ostream& diag);
int cmd_reparam(const JobConfig& config, std::ostream& out, std::ostream& diag);

// Fixed float formatting shared by both output formats: shortest form with 17
// significant digits, "." decimal point, no locale dependence.
std::string format_double(double value);

}  // namespace curvekit
