#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <vector>

namespace kreinlab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/// Open real interval used for spectral scans.
struct Window {
  double lo = 0.0;
  double hi = 0.0;
  double width() const { return hi - lo; }
};

/// An eigenvalue together with the nullity-based multiplicity hint.
struct EigenPair {
  double value = 0.0;
  int multiplicity = 1;
};

/// Deterministic, platform-independent pseudo-random stream (splitmix64).
/// std::uniform_real_distribution is implementation-defined, which would break
/// byte-identical reports across standard libraries, so we draw doubles
/// directly from the integer stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
  }

  /// Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  Complex complex_in(double re_lo, double re_hi, double im_lo, double im_hi) {
    return {uniform(re_lo, re_hi), uniform(im_lo, im_hi)};
  }

 private:
  std::uint64_t state_;
};

}  // namespace kreinlab
