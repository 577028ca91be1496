#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace kreinlab {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Invalid user input: malformed model description, bad window, bad options.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& msg) : Error(msg) {}
};

/// A documented precondition of an operation was violated (e.g. a matrix that
/// must be Hermitian is not, a trace was requested from an element that has
/// no boundary data).
class ContractError : public Error {
 public:
  explicit ContractError(const std::string& msg) : Error(msg) {}
};

/// A dense linear system was singular to working tolerance.
class SingularSystem : public Error {
 public:
  SingularSystem(const std::string& msg, double rcond_estimate)
      : Error(msg + " (rcond ~ " + std::to_string(rcond_estimate) + ")"),
        rcond(rcond_estimate) {}
  double rcond;  ///< reciprocal condition number estimate at the failure
};

/// The spectral parameter landed inside the exclusion window around the
/// Dirichlet spectrum, where the Dirichlet solution operator does not exist.
class NearDirichletSpectrum : public Error {
 public:
  NearDirichletSpectrum(std::complex<double> z_, double distance_)
      : Error("spectral parameter too close to the Dirichlet spectrum"),
        z(z_),
        distance(distance_) {}
  std::complex<double> z;
  double distance;  ///< distance to the nearest Dirichlet eigenvalue
};

/// An operator that had to be inverted has an eigenvalue at the requested
/// spectral point (e.g. the Krein middle term when z is a Robin eigenvalue).
class EigenvalueAt : public Error {
 public:
  explicit EigenvalueAt(std::complex<double> z_)
      : Error("operator is singular at the requested spectral point"), z(z_) {}
  std::complex<double> z;
};

}  // namespace kreinlab
