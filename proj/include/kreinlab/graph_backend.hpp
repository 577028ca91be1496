#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "kreinlab/graph_function.hpp"
#include "kreinlab/metric_graph.hpp"
#include "kreinlab/rootscan.hpp"
#include "kreinlab/types.hpp"

namespace kreinlab {

struct SpectrumOptions {
  double grid_per_unit = 8.0;
  int min_grid = 64;
  ScanOptions scan{};
};

/// Exact (closed-form per edge) realization of the Laplacian calculus on a
/// metric graph: Dirichlet/Robin spectra via secular determinants, harmonic
/// extensions, resolvents, boundary traces and fluxes, and L2 inner products.
///
/// Boundary-coordinate convention: vectors over the boundary follow the
/// graph's boundary order, and the normal flux at a boundary vertex is the
/// derivative toward the vertex (outward normal direction).
class GraphBackend {
 public:
  explicit GraphBackend(std::shared_ptr<const MetricGraph> graph,
                        double exclusion_scale = 1e-6);

  const MetricGraph& graph() const { return *graph_; }
  const std::shared_ptr<const MetricGraph>& graph_ptr() const {
    return graph_;
  }
  int boundary_dim() const { return graph_->boundary_dim(); }
  double exclusion_scale() const { return exclusion_scale_; }

  /// Matrix of the homogeneous vertex system at z: Dirichlet rows when
  /// `btilde` is absent, Robin rows otherwise.  Roots of its determinant in z
  /// are exactly the eigenvalues of the corresponding Laplacian.
  Matrix secular_matrix(Complex z, const std::optional<Matrix>& btilde) const;
  /// Row-normalized determinant of `secular_matrix`, sign-carrying whenever
  /// the system is real (real z and real boundary condition), otherwise the
  /// modulus (roots are then located by singular-value dips alone).
  double secular_det(double z, const std::optional<Matrix>& btilde) const;

  std::vector<EigenPair> dirichlet_spectrum(
      Window window, const SpectrumOptions& opts = {}) const;
  std::vector<EigenPair> robin_spectrum(Window window, const Matrix& btilde,
                                        const SpectrumOptions& opts = {}) const;

  /// Balls of radius `exclusion_scale * (1 + |lambda|)` around each Dirichlet
  /// eigenvalue in the window, for scans of functions with poles there.
  std::vector<Exclusion> dirichlet_exclusions(Window window) const;
  /// Throws NearDirichletSpectrum when z is within the exclusion radius of a
  /// Dirichlet eigenvalue.
  void guard_regular(Complex z) const;

  /// The unique solution of (Delta - z) u = 0 with boundary trace g.
  HomogeneousSolution dirichlet_solve(Complex z, const Vector& g) const;
  /// (Delta_D - z)^{-1} h: zero boundary trace, (Delta - z) u = h exactly.
  ForcedSolution dirichlet_resolvent(
      Complex z, std::shared_ptr<const GraphFunction> h) const;
  /// (Delta_B - z)^{-1} h for the vertex condition flux = btilde * trace;
  /// throws EigenvalueAt when z is an eigenvalue of that operator.
  ForcedSolution robin_resolvent(Complex z, const Matrix& btilde,
                                 std::shared_ptr<const GraphFunction> h) const;

  /// L2-normalized basis of solutions of the homogeneous problem at z
  /// (eigenfunctions when z is an eigenvalue; empty otherwise).
  std::vector<HomogeneousSolution> solution_space(
      Complex z, const std::optional<Matrix>& btilde) const;

  Vector trace(const GraphFunction& f) const;
  Vector normal_flux(const GraphFunction& f) const;

  /// L2 inner product, conjugate-linear in the first argument.
  Complex inner(const GraphFunction& f, const GraphFunction& g) const;
  double norm(const GraphFunction& f) const;
  /// Inner product of first derivatives (the quadratic form of the
  /// Laplacian), conjugate-linear in the first argument.
  Complex energy_inner(const GraphFunction& f, const GraphFunction& g) const;

  // Handle-based interface shared with the finite-dimensional backend, so
  // boundary operations can be written once against either realization.
  using Function = std::shared_ptr<const GraphFunction>;

  Function harmonic(Complex z, const Vector& g) const {
    return std::make_shared<HomogeneousSolution>(dirichlet_solve(z, g));
  }
  Function resolvent(Complex z, const Function& h) const {
    return std::make_shared<ForcedSolution>(dirichlet_resolvent(z, h));
  }
  Function robin_resolve(Complex z, const Matrix& btilde,
                         const Function& h) const {
    return std::make_shared<ForcedSolution>(robin_resolvent(z, btilde, h));
  }
  /// (Delta - z) f, usable as a resolvent source.
  Function operator_image(Complex z, const Function& f) const;
  Function combine(std::vector<std::pair<Complex, Function>> terms) const;
  Function constant(Complex value) const;

  Vector trace(const Function& f) const { return trace(*f); }
  Vector normal_flux(const Function& f) const { return normal_flux(*f); }
  Complex inner(const Function& f, const Function& g) const {
    return inner(*f, *g);
  }
  Complex energy_inner(const Function& f, const Function& g) const {
    return energy_inner(*f, *g);
  }
  double norm(const Function& f) const { return norm(*f); }

 private:
  void ensure_covered(double lo, double hi) const;
  void insert_eigenvalue(double value, int multiplicity) const;

  std::shared_ptr<const MetricGraph> graph_;
  double exclusion_scale_;
  mutable SpectrumOptions cache_opts_;
  mutable std::vector<EigenPair> sigma0_;                 // sorted by value
  mutable std::vector<std::pair<double, double>> covered_;  // merged intervals
};

}  // namespace kreinlab
