#pragma once

#include <Eigen/Dense>

#include "kreinlab/types.hpp"

namespace kreinlab {

/// Gauss-Legendre rule on [a, b]; exact for polynomials of degree 2n-1.
struct QuadratureRule {
  RealVector nodes;
  RealVector weights;
  int order = 0;

  /// Integrate a callable f(double) -> Complex (or double).
  template <class F>
  auto integrate(const F& f) const -> decltype(f(0.0)) {
    decltype(f(0.0)) acc{};
    for (int i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// Build an order-n Gauss-Legendre rule on [a, b] (Golub-Welsch; nodes of the
/// reference rule are cached per order).  Throws ConfigError for order < 1 or
/// an empty/reversed interval.
QuadratureRule gauss_rule(int order, double a, double b);

}  // namespace kreinlab
