#include "kreinlab/scalar_ode.hpp"

#include <cmath>

namespace kreinlab {

namespace {

// Series branch: c = sum (-u)^n/(2n)!, s = x sum (-u)^n/(2n+1)!, u = z x^2.
// For |u| < 0.25 twelve terms reach full double precision
// (0.25^12 / 24! ~ 1e-31).
FundamentalPair series_pair(Complex z, double x) {
  const Complex u = z * (x * x);
  Complex term_c(1.0, 0.0);   // (-u)^n / (2n)!
  Complex term_s(1.0, 0.0);   // (-u)^n / (2n+1)!
  Complex sum_c = term_c;
  Complex sum_s = term_s;
  for (int n = 1; n <= 12; ++n) {
    const double k = 2.0 * n;
    term_c *= -u / (k * (k - 1.0));
    term_s *= -u / (k * (k + 1.0));
    sum_c += term_c;
    sum_s += term_s;
  }
  FundamentalPair out;
  out.c = sum_c;
  out.s = x * sum_s;
  out.dc = -z * out.s;
  out.ds = out.c;
  return out;
}

}  // namespace

FundamentalPair fundamental_pair(Complex z, double x) {
  if (std::abs(z) * x * x < 0.25) return series_pair(z, x);

  const Complex w = std::sqrt(z);  // principal branch; result is even in w
  const Complex wx = w * x;
  FundamentalPair out;
  out.c = std::cos(wx);
  out.s = std::sin(wx) / w;
  out.dc = -z * out.s;
  out.ds = out.c;
  return out;
}

Eigen::Matrix2cd transfer_matrix(Complex z, double ell) {
  const FundamentalPair p = fundamental_pair(z, ell);
  Eigen::Matrix2cd t;
  t << p.c, p.s, p.dc, p.ds;
  return t;
}

}  // namespace kreinlab
