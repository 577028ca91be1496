#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "kreinlab/errors.hpp"
#include "kreinlab/linalg.hpp"
#include "kreinlab/rootscan.hpp"
#include "kreinlab/types.hpp"

namespace kreinlab {

/// Boundary operations realized uniformly over any backend exposing
///   boundary_dim, harmonic, resolvent, robin_resolve, operator_image,
///   combine, trace, normal_flux, inner, energy_inner, norm,
///   dirichlet_exclusions
/// with a value-semantics Function handle type.
///
/// Orientation conventions used throughout (fixed by the surface term of the
/// integration-by-parts identity with the *outward* normal flux):
///   <Lap f, g> - <f, Lap g> = <trace f, flux g> - <flux f, trace g>,
/// inner products conjugate-linear in the first slot.

/// Dirichlet-to-Neumann map at spectral parameter z: trace data in, outward
/// normal flux of the z-harmonic extension out.
template <class Backend>
Matrix dtn(const Backend& bk, Complex z) {
  const int n = bk.boundary_dim();
  Matrix out(n, n);
  for (int j = 0; j < n; ++j) {
    Vector e = Vector::Zero(n);
    e(j) = Complex(1.0, 0.0);
    out.col(j) = bk.normal_flux(bk.harmonic(z, e));
  }
  return out;
}

/// The boundary space carries the metric Lambda = dtn(-1), which is exactly
/// the inverse of (gamma0 gamma0^*).  Powers of it renormalize boundary maps.
struct BoundaryMetric {
  Matrix lambda;
  Matrix inverse;
  Matrix half;
  Matrix inv_half;
  double lambda_min = 0.0;  // equals 1 / ||gamma0||^2
};

template <class Backend>
BoundaryMetric boundary_metric(const Backend& bk) {
  Matrix l = dtn(bk, Complex(-1.0, 0.0));
  if ((l - l.adjoint()).norm() > 1e-9 * (1.0 + l.norm()))
    throw ContractError("boundary metric: flux map at -1 is not Hermitian");
  l = 0.5 * (l + l.adjoint().eval());
  BoundaryMetric m;
  m.lambda = l;
  m.inverse = hermitian_power(l, -1.0);
  m.half = hermitian_power(l, 0.5);
  m.inv_half = hermitian_power(l, -0.5);
  m.lambda_min = hermitian_eig(l).values.minCoeff();
  return m;
}

/// Weyl family normalized against the boundary metric: q0(-1) = identity.
template <class Backend>
Matrix q0(const Backend& bk, const BoundaryMetric& m, Complex z) {
  return m.inverse * dtn(bk, z);
}

inline void require_hermitian_coupling(const Matrix& btilde) {
  if ((btilde - btilde.adjoint()).norm() > 1e-10 * (1.0 + btilde.norm()))
    throw ContractError("boundary coupling matrix must be Hermitian");
}

/// Adjoint of the gamma field at parameter w applied to h:
/// (beta^w)^* h = Lambda^{-1} [ <beta^w e_j, h> ]_j.
template <class Backend, class F>
Vector beta_adjoint_apply(const Backend& bk, const BoundaryMetric& m, Complex w,
                          const F& h) {
  const int n = bk.boundary_dim();
  Vector raw(n);
  for (int j = 0; j < n; ++j) {
    Vector e = Vector::Zero(n);
    e(j) = Complex(1.0, 0.0);
    raw(j) = bk.inner(bk.harmonic(w, e), h);
  }
  return m.inverse * raw;
}

/// The boundary-space formula for the resolvent difference
///   (Lap_B - z)^{-1} h - (Lap_D - z)^{-1} h
///     = beta^z (Q(z) - B)^{-1} (beta^{conj z})^* h,
/// evaluated without forming Q or B: with w_j = <beta^{conj z} e_j, h> the
/// right side is the z-harmonic extension of (dtn(z) - btilde)^{-1} w.
/// Throws EigenvalueAt when z is an eigenvalue of the coupled operator.
template <class Backend, class F>
auto predicted_resolvent_diff(const Backend& bk, Complex z,
                              const Matrix& btilde, const F& h) {
  require_hermitian_coupling(btilde);
  const int n = bk.boundary_dim();
  Vector w(n);
  for (int j = 0; j < n; ++j) {
    Vector e = Vector::Zero(n);
    e(j) = Complex(1.0, 0.0);
    w(j) = bk.inner(bk.harmonic(std::conj(z), e), h);
  }
  const Matrix a = dtn(bk, z) - btilde;
  Vector xi;
  try {
    xi = solve_dense(a, w).x;
  } catch (const SingularSystem&) {
    throw EigenvalueAt(z.real());
  }
  return bk.harmonic(z, xi);
}

/// Projection onto z-harmonic functions along the range of the Dirichlet
/// resolvent: f - (Lap_D - z)^{-1} (Lap - z) f.  Preserves the trace and
/// maps into the kernel of (Lap - z).
template <class Backend>
typename Backend::Function harmonic_projection(
    const Backend& bk, Complex z, const typename Backend::Function& f) {
  auto image = bk.operator_image(z, f);
  auto corrected = bk.resolvent(z, image);
  return bk.combine({{Complex(1.0, 0.0), f}, {Complex(-1.0, 0.0), corrected}});
}

/// Defect of the integration-by-parts identity for a pair of functions.
template <class Backend>
Complex greens_identity_residual(const Backend& bk,
                                 const typename Backend::Function& f,
                                 const typename Backend::Function& g) {
  const Complex zero{0.0, 0.0};
  const Complex lhs = bk.inner(bk.operator_image(zero, f), g) -
                      bk.inner(f, bk.operator_image(zero, g));
  const Vector tf = bk.trace(f);
  const Vector tg = bk.trace(g);
  const Vector nf = bk.normal_flux(f);
  const Vector ng = bk.normal_flux(g);
  const Complex rhs = (tf.adjoint() * ng).value() - (nf.adjoint() * tg).value();
  return lhs - rhs;
}

/// Scan of the boundary relation det(dtn(z) - btilde) = 0 over a real
/// window.  Dirichlet eigenvalues are poles of dtn and are excluded from the
/// scan by hypothesis; they are reported in `excluded`.
struct SpectralScanResult {
  std::vector<EigenPair> roots;
  std::vector<double> excluded;
};

template <class Backend>
SpectralScanResult spectral_relation_scan(const Backend& bk, Window window,
                                          const Matrix& btilde,
                                          double grid_per_unit = 8.0,
                                          int min_grid = 64,
                                          const ScanOptions& scan = {}) {
  require_hermitian_coupling(btilde);
  const auto exclusions = bk.dirichlet_exclusions(window);
  auto matrix_eval = [&](double z) -> Matrix {
    return dtn(bk, Complex(z, 0.0)) - btilde;
  };
  auto det_eval = [&](double z) -> double {
    // dtn(z) - btilde is Hermitian for real z, so the determinant is real
    // and sign changes locate odd-order roots.
    const Matrix a = matrix_eval(z);
    return Eigen::PartialPivLU<Matrix>(a).determinant().real();
  };
  const int grid = std::max(
      min_grid, static_cast<int>(std::ceil(window.width() * grid_per_unit)));
  SpectralScanResult out;
  for (const auto& h :
       scan_real_roots(det_eval, window, exclusions, grid, matrix_eval, scan))
    out.roots.push_back({h.z, h.multiplicity});
  for (const auto& e : exclusions) out.excluded.push_back(e.center);
  return out;
}

/// Normalized states u = beta^z xi for xi in the kernel of
/// (dtn(z) - btilde); these satisfy the coupled boundary condition
/// flux(u) = btilde * trace(u) and (Lap - z) u = 0.
template <class Backend>
std::vector<typename Backend::Function> boundary_kernel_states(
    const Backend& bk, Complex z, const Matrix& btilde,
    double nullity_rel_tol = 1e-8) {
  require_hermitian_coupling(btilde);
  const Matrix a = dtn(bk, z) - btilde;
  const auto ns = nullspace(a, nullity_rel_tol);
  std::vector<typename Backend::Function> out;
  for (int k = 0; k < ns.nullity; ++k) {
    auto u = bk.harmonic(z, Vector(ns.basis.col(k)));
    const double nrm = bk.norm(u);
    if (nrm == 0.0) continue;
    out.push_back(
        bk.combine({{Complex(1.0 / nrm, 0.0), std::move(u)}}));
  }
  return out;
}

/// Variational study of the trace-map norm: over boundary data xi the
/// (-1)-harmonic extension has squared graph norm xi^* Lambda xi, so the
/// Euclidean trace norm satisfies sup |xi|^2 / (xi^* Lambda xi)
/// = 1 / lambda_min(Lambda).
struct TraceNormStudy {
  double bound = 0.0;       // 1 / lambda_min
  double best_ratio = 0.0;  // largest ratio over the trial set
};

template <class Backend>
TraceNormStudy trace_norm_study(const Backend& bk, const BoundaryMetric& m,
                                int random_trials, Rng& rng) {
  TraceNormStudy study;
  study.bound = 1.0 / m.lambda_min;
  const int n = bk.boundary_dim();
  const auto eig = hermitian_eig(m.lambda);
  std::vector<Vector> trials;
  trials.push_back(eig.vectors.col(0));  // minimizing eigenvector
  for (int t = 0; t < random_trials; ++t) {
    Vector xi(n);
    for (int i = 0; i < n; ++i)
      xi(i) = rng.complex_in(-1.0, 1.0, -1.0, 1.0);
    trials.push_back(xi);
  }
  for (const auto& xi : trials) {
    auto u = bk.harmonic(Complex(-1.0, 0.0), xi);
    const double graph_sq =
        (bk.inner(u, u) + bk.energy_inner(u, u)).real();
    if (graph_sq <= 0.0) continue;
    study.best_ratio =
        std::max(study.best_ratio, xi.squaredNorm() / graph_sq);
  }
  return study;
}

}  // namespace kreinlab
