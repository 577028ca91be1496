#include "kreinlab/quadrature.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "kreinlab/errors.hpp"

namespace kreinlab {

namespace {

struct ReferenceRule {
  RealVector nodes;    // on [-1, 1], ascending
  RealVector weights;  // sum to 2
};

// Golub-Welsch: nodes are the eigenvalues of the symmetric tridiagonal Jacobi
// matrix with off-diagonal b_k = k / sqrt(4k^2 - 1); weights are
// 2 * (first eigenvector component)^2.
ReferenceRule build_reference(int order) {
  RealMatrix jacobi = RealMatrix::Zero(order, order);
  for (int k = 1; k < order; ++k) {
    const double b = k / std::sqrt(4.0 * k * k - 1.0);
    jacobi(k, k - 1) = b;
    jacobi(k - 1, k) = b;
  }
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(jacobi);
  ReferenceRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule.weights[i] = 2.0 * v0 * v0;
  }
  return rule;
}

const ReferenceRule& reference_rule(int order) {
  static std::map<int, ReferenceRule> cache;
  static std::mutex mutex;
  std::lock_guard<std::mutex> lock(mutex);
  auto it = cache.find(order);
  if (it == cache.end()) it = cache.emplace(order, build_reference(order)).first;
  return it->second;
}

}  // namespace

QuadratureRule gauss_rule(int order, double a, double b) {
  if (order < 1) throw ConfigError("quadrature order must be >= 1");
  if (!(a < b)) throw ConfigError("quadrature interval must satisfy a < b");

  const ReferenceRule& ref = reference_rule(order);
  QuadratureRule rule;
  rule.order = order;
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  rule.nodes = (ref.nodes.array() * half + mid).matrix();
  rule.weights = ref.weights * half;
  return rule;
}

}  // namespace kreinlab
