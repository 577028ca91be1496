#include "kreinlab/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "kreinlab/errors.hpp"

namespace kreinlab {

namespace {

Eigen::PartialPivLU<Matrix> factor_checked(const Matrix& a, double singular_tol,
                                           double* rcond_out) {
  if (a.rows() != a.cols()) throw ContractError("solve_dense: matrix not square");
  Eigen::PartialPivLU<Matrix> lu(a);
  double rcond = lu.rcond();
  if (!std::isfinite(rcond)) rcond = 0.0;  // exactly singular factorizations
  *rcond_out = rcond;
  if (!(rcond > singular_tol))
    throw SingularSystem("dense system singular to tolerance", rcond);
  return lu;
}

void check_hermitian(const Matrix& a, double tol) {
  const double scale = 1.0 + a.norm();
  const double dev = (a - a.adjoint()).norm();
  if (dev > tol * scale)
    throw ContractError("hermitian_eig: matrix deviates from Hermitian by " +
                        std::to_string(dev));
}

}  // namespace

DenseSolve solve_dense(const Matrix& a, const Vector& b, double singular_tol) {
  if (a.rows() != b.size()) throw ContractError("solve_dense: size mismatch");
  DenseSolve out;
  auto lu = factor_checked(a, singular_tol, &out.rcond);
  out.x = lu.solve(b);
  return out;
}

DenseSolveMatrix solve_dense(const Matrix& a, const Matrix& b,
                             double singular_tol) {
  if (a.rows() != b.rows()) throw ContractError("solve_dense: size mismatch");
  DenseSolveMatrix out;
  auto lu = factor_checked(a, singular_tol, &out.rcond);
  out.x = lu.solve(b);
  return out;
}

HermitianEig hermitian_eig(const Matrix& a, const std::optional<Matrix>& gram,
                           double hermiticity_tol) {
  check_hermitian(a, hermiticity_tol);
  HermitianEig out;
  if (!gram) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(a);
    if (es.info() != Eigen::Success)
      throw ContractError("hermitian_eig: eigensolver failed");
    out.values = es.eigenvalues();
    out.vectors = es.eigenvectors();
    return out;
  }

  check_hermitian(*gram, hermiticity_tol);
  Eigen::SelfAdjointEigenSolver<Matrix> gram_es(*gram);
  if (gram_es.eigenvalues().minCoeff() <= 0.0)
    throw ContractError("hermitian_eig: Gram matrix not positive definite");
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> es(a, *gram,
                                                      Eigen::Ax_lBx |
                                                          Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    throw ContractError("hermitian_eig: generalized eigensolver failed");
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
  return out;
}

Nullspace nullspace(const Matrix& m, double rel_tol) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  Nullspace out;
  out.singular_values = svd.singularValues();
  const double sigma_max =
      out.singular_values.size() > 0 ? out.singular_values[0] : 0.0;
  const double cut = rel_tol * sigma_max;
  int nullity = 0;
  for (int i = 0; i < out.singular_values.size(); ++i)
    if (out.singular_values[i] <= cut) ++nullity;
  if (sigma_max == 0.0) nullity = static_cast<int>(m.cols());
  out.nullity = nullity;
  out.basis = svd.matrixV().rightCols(nullity);
  return out;
}

Matrix hermitian_power(const Matrix& a, double s) {
  const HermitianEig eig = hermitian_eig(a);
  const bool integral = std::abs(s - std::round(s)) == 0.0 && s >= 0.0;
  RealVector powered(eig.values.size());
  for (int i = 0; i < eig.values.size(); ++i) {
    const double lam = eig.values[i];
    if (!integral && lam <= 0.0)
      throw ContractError("hermitian_power: non-positive eigenvalue");
    powered[i] = std::pow(lam, s);
  }
  return eig.vectors * powered.asDiagonal() * eig.vectors.adjoint();
}

double spectral_norm(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues()[0];
}

}  // namespace kreinlab
