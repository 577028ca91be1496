#pragma once

#include <Eigen/Dense>
#include <optional>

#include "kreinlab/types.hpp"

namespace kreinlab {

/// Solution of a dense square system together with the reciprocal condition
/// number estimate from the LU factorization.
struct DenseSolve {
  Vector x;
  double rcond = 0.0;
};

struct DenseSolveMatrix {
  Matrix x;
  double rcond = 0.0;
};

/// Solve A x = b by partial-pivot LU.  Throws SingularSystem (carrying the
/// rcond estimate) when the factorization is singular to tolerance.
DenseSolve solve_dense(const Matrix& a, const Vector& b,
                       double singular_tol = 1e-14);
DenseSolveMatrix solve_dense(const Matrix& a, const Matrix& b,
                             double singular_tol = 1e-14);

/// Eigendecomposition of a matrix that is Hermitian (entrywise, checked to
/// tolerance), optionally generalized against a Hermitian positive definite
/// Gram matrix:  A v = lambda * Gram * v, eigenvectors Gram-orthonormal.
/// Eigenvalues come out real and ascending.
struct HermitianEig {
  RealVector values;
  Matrix vectors;  // columns, Gram-orthonormal
};

HermitianEig hermitian_eig(const Matrix& a,
                           const std::optional<Matrix>& gram = std::nullopt,
                           double hermiticity_tol = 1e-10);

/// SVD-based nullspace: columns of V whose singular values fall below
/// rel_tol * sigma_max (all of V when the matrix is exactly zero).
struct Nullspace {
  Matrix basis;              // n x nullity, orthonormal columns
  RealVector singular_values;  // all of them, descending
  int nullity = 0;
};

Nullspace nullspace(const Matrix& m, double rel_tol = 1e-8);

/// Hermitian matrix power A^s through the spectral decomposition; requires
/// positive eigenvalues whenever s is not a nonnegative integer.
Matrix hermitian_power(const Matrix& a, double s);

/// Convenience: ||A||_2 estimated as the largest singular value.
double spectral_norm(const Matrix& a);

}  // namespace kreinlab
