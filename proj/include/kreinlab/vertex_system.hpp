#pragma once

#include <optional>

#include "kreinlab/graph_function.hpp"
#include "kreinlab/metric_graph.hpp"
#include "kreinlab/types.hpp"

namespace kreinlab {

/// Boundary conditions for the vertex linear system.
///
/// Without `btilde`, boundary traces are pinned to `dirichlet` (one entry per
/// boundary vertex, in boundary order).  With `btilde`, the flux condition
/// flux(v) = sum_w btilde(v, w) trace(w) is imposed instead; `btilde` may
/// couple distinct boundary vertices.
struct BoundaryData {
  std::optional<Matrix> btilde;
  Vector dirichlet;

  static BoundaryData dirichlet_data(Vector g) {
    BoundaryData bd;
    bd.dirichlet = std::move(g);
    return bd;
  }
  static BoundaryData robin_data(Matrix btilde) {
    BoundaryData bd;
    bd.btilde = std::move(btilde);
    return bd;
  }
};

/// Dense linear system for the per-edge coefficients (a_e, b_e) of
/// f = a_e c(z, t) + b_e s(z, t) (+ particular integral of `source`):
/// continuity and flux balance at interior vertices, plus the requested
/// boundary rows.  Unknown layout: x[2e] = a_e, x[2e + 1] = b_e.
struct VertexSystem {
  Matrix a;
  Vector rhs;
};

VertexSystem assemble_vertex_system(const MetricGraph& g, Complex z,
                                    const BoundaryData& bc,
                                    const GraphFunction* source = nullptr);

}  // namespace kreinlab
