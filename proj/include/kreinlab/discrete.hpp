#pragma once

#include <memory>
#include <string>
#include <vector>

#include "kreinlab/metric_graph.hpp"
#include "kreinlab/types.hpp"

namespace kreinlab {

/// Finite-dimensional model of the boundary calculus: Gram matrices on
/// vertex functions and edge one-forms, an oriented difference matrix, and a
/// designated boundary index set with its own Gram.  All boundary objects
/// below are exact linear algebra over this data.
struct DiscreteModel {
  Matrix gram0;          // vertex masses, Hermitian PD
  Matrix gram1;          // edge masses, Hermitian PD
  Matrix incidence;      // edges x vertices, one +w / -w pair per row
  std::vector<int> boundary;
  Matrix boundary_gram;  // Hermitian PD on boundary coordinates

  DiscreteModel(Matrix gram0_in, Matrix gram1_in, Matrix incidence_in,
                std::vector<int> boundary_in, Matrix boundary_gram_in);

  int vertex_count() const { return static_cast<int>(gram0.rows()); }
  int edge_count() const { return static_cast<int>(gram1.rows()); }
  int boundary_dim() const { return static_cast<int>(boundary.size()); }
  std::vector<int> interior() const;

  /// Stiffness d^H Gram1 d.
  Matrix stiffness() const;
  /// Full first-order Gram: stiffness + Gram0 (the |f|^2 + |df|^2 form).
  Matrix h1_gram() const;

  /// Unweighted path on `vertices` vertices with both ends as boundary;
  /// all Grams are identities.
  static DiscreteModel unweighted_path(int vertices);
};

enum class Scheme { DecLumped, FemP1 };

/// Accepted names: "dec-lumped", "fem-p1"; anything else is a ConfigError.
Scheme parse_scheme(const std::string& name);
std::string scheme_name(Scheme scheme);

/// Subdivide each edge of `graph` into `n_per_edge` equal segments and build
/// the matching model: lumped diagonal vertex masses for DecLumped,
/// consistent piecewise-linear masses for FemP1.  Edge masses are 1/h per
/// segment in both schemes, so the stiffness is the usual second-difference
/// matrix and boundary values stay pointwise (identity boundary Gram).
DiscreteModel discretize(const MetricGraph& graph, int n_per_edge,
                         Scheme scheme);

/// Boundary Schur complement of the h1 Gram after eliminating the interior
/// block; Hermitian PD, and <phi, S phi> is the minimal h1 energy among
/// extensions of phi.
Matrix boundary_schur(const DiscreteModel& model);

/// Extension of boundary data `phi` annihilated by the interior rows of
/// stiffness - z * Gram0.  Throws SingularSystem at interior eigenvalues.
Vector discrete_harmonic(const DiscreteModel& model, Complex z,
                         const Vector& phi);

/// Flux Dirichlet-to-Neumann matrix: boundary components of
/// d^H Gram1 (d u) for the z-harmonic extensions of the boundary basis,
/// rescaled by the boundary Gram.
Matrix flux_dtn(const DiscreteModel& model, Complex z);

/// Conormal variant using the full operator rows (stiffness - z Gram0)
/// instead of the stiffness alone; at z = -1 this is exactly
/// boundary_gram^{-1} * boundary_schur.
Matrix conormal_dtn(const DiscreteModel& model, Complex z);

/// Norm of the boundary trace map from (vertex functions, h1 Gram) to
/// (boundary data, boundary Gram): the largest generalized singular value.
double trace_operator_norm(const DiscreteModel& model);

/// Residual of the exact discrete Green identity for weak pairs: each
/// element is a vertex vector together with a declared boundary flux, the
/// weak Laplacian being Gram0^{-1}(stiffness * f - lift of the flux).
/// Vanishes to rounding for arbitrary data.
Complex discrete_green_residual(const DiscreteModel& model, const Vector& f,
                                const Vector& flux_f, const Vector& g,
                                const Vector& flux_g);

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  double flux_error = 0.0;
  double flux_rate = 0.0;       // NaN on the first row
  double conormal_error = 0.0;
  double conormal_rate = 0.0;   // NaN on the first row
};

/// Errors of the two discrete DtN matrices against the closed-form metric
/// graph DtN at z, over refinement levels; rates are successive Richardson
/// slopes in the level ratio.
std::vector<ConvergenceRow> convergence_study(
    std::shared_ptr<const MetricGraph> graph, Complex z,
    const std::vector<int>& levels, Scheme scheme);

}  // namespace kreinlab
