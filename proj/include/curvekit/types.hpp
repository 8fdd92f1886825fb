#pragma once

#include <Eigen/Dense>

#include <array>
#include <stdexcept>
#include <string>

namespace curvekit {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Gamma[k](i,j) = Gamma^k_ij, the coefficient with upper index k.
using Christoffel = std::array<Mat3, 3>;

// d_gamma[m][k](i,j) = d Gamma^k_ij / d x^m
using ChristoffelJacobian = std::array<Christoffel, 3>;

constexpr double kMachineEps = 2.220446049250313e-16;

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SingularMetric : Error { using Error::Error; };
struct SignatureChanged : Error { using Error::Error; };
struct DifferentiationFailure : Error { using Error::Error; };
struct ChartExit : Error { using Error::Error; };
struct NullPointEncountered : Error { using Error::Error; };
struct DegenerateCurve : Error { using Error::Error; };
struct DegenerateNullCurve : Error { using Error::Error; };
struct NotUnitSpeed : Error { using Error::Error; };
struct NotPseudoArc : Error { using Error::Error; };
struct ZeroCurvature : Error { using Error::Error; };
struct ZeroTorsion : Error { using Error::Error; };
struct GeneratorDegenerate : Error { using Error::Error; };
struct UnknownCatalogEntry : Error { using Error::Error; };
struct ConfigError : Error { using Error::Error; };

}  // namespace curvekit
