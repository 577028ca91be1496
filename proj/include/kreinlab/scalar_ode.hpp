#pragma once

#include <Eigen/Dense>
#include <complex>

#include "kreinlab/types.hpp"

namespace kreinlab {

/// Values at x of the normalized fundamental system of  -u'' = z u:
///   c(z,0) = 1, c'(z,0) = 0,   s(z,0) = 0, s'(z,0) = 1.
///
/// Both solutions are entire in z (even functions of sqrt(z)), so the struct
/// is branch-free: real z < 0 yields hyperbolic values, real z > 0
/// trigonometric ones, and complex z is fine.  The derivatives satisfy the
/// exact identities c' = -z s and s' = c, and the Wronskian c s' - c' s
/// collapses to c^2 + z s^2 = 1, which tests use as a nontrivial invariant.
struct FundamentalPair {
  Complex c;
  Complex s;
  Complex dc;  ///< c'(z, x) = -z s(z, x)
  Complex ds;  ///< s'(z, x) = c(z, x)
};

/// Evaluate the fundamental pair at (z, x).  Uses the power series in z*x^2
/// when |z| x^2 is small (removing the 0/0 in sin(sqrt(z) x)/sqrt(z)) and
/// trigonometric/hyperbolic closed forms otherwise.  x may be any finite
/// real; z any finite complex.
FundamentalPair fundamental_pair(Complex z, double x);

/// Transfer matrix over a run of length ell:
///   [u(t+ell); u'(t+ell)] = T * [u(t); u'(t)],   T = [[c, s], [c', s']].
Eigen::Matrix2cd transfer_matrix(Complex z, double ell);

}  // namespace kreinlab
