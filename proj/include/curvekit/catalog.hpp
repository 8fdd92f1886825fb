#pragma once

#include <map>
#include <optional>
#include <string>

#include "curvekit/curvejet.hpp"
#include "curvekit/equiaffine.hpp"
#include "curvekit/manifold.hpp"
#include "curvekit/nullcurve.hpp"
#include "curvekit/types.hpp"

namespace curvekit {

// A ready-to-sample fixture: resolved metric, embedded curve (when there is
// one), closed-form curvature/torsion data when known, and closed-form
// equi-affine curvatures when known. Abstract entries (corollary2) carry only
// the kappa/tau source.
struct CatalogCurve {
  std::string name;
  std::string metric_name;
  MetricSystem system;
  std::optional<CurveSpec> curve;
  std::optional<KappaTauSource> source;
  std::function<double(double)> kappa1_closed;  // may be empty
  std::function<double(double)> kappa2_closed;  // may be empty
  bool is_null = false;
};

// Curve names and numeric parameters:
//   example1curve  {a, b, lambda}      unit-speed curve of the example1 metric
//   example2curve  {a, b}              unit-speed curve of the example2 metric
//   helix          {r, h}              constant kappa/tau helix; options
//                                      {"metric": euclidean3|minkowski3_ppm}
//   nullfromf      {eps, t0, px, py, pz, + generator params}
//                                      options {"generator": <name>}
//   corollary2     {A, B, eps1, eps2, eps3}   abstract kappa = A/t, tau = B/t
// Throws UnknownCatalogEntry for other names and ConfigError when parameters
// violate admissibility.
CatalogCurve catalog_curve(const std::string& name,
                           const std::map<std::string, double>& params = {},
                           const std::map<std::string, std::string>& options = {});

// Generators for null curves: linear {c0, c1}, exponential {}, power {p},
// moebius {a, b, c, d}, tan {}. All come with closed-form derivatives and
// domain bounds.
GeneratorFunction catalog_generator(const std::string& name,
                                    const std::map<std::string, double>& params = {});

// Every violated admissibility condition for the given entry, empty when the
// parameters are fine. catalog_curve throws with this list joined.
std::vector<std::string> catalog_admissibility(
    const std::string& name, const std::map<std::string, double>& params,
    const std::map<std::string, std::string>& options = {});

}  // namespace curvekit
