#include "kreinlab/vertex_system.hpp"

#include <vector>

#include "kreinlab/errors.hpp"
#include "kreinlab/scalar_ode.hpp"

namespace kreinlab {

namespace {

// Closed-form endpoint data of one edge at t = length, plus the particular
// integral's endpoint contribution when a source is present.
struct EndData {
  Complex c{1.0, 0.0}, s{0.0, 0.0}, dc{0.0, 0.0}, ds{1.0, 0.0};
  Complex p{0.0, 0.0}, dp{0.0, 0.0};
};

// Linear expression alpha * a_e + beta * b_e + constant part.
struct EndpointExpr {
  int edge;
  Complex alpha, beta, part;
};

EndpointExpr value_expr(const Incidence& inc, const EndData& d) {
  if (!inc.at_head) return {inc.edge, {1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}};
  return {inc.edge, d.c, d.s, d.p};
}

// Derivative toward the vertex (the outward normal direction at a boundary
// vertex): -f'(0) at a tail, +f'(length) at a head.
EndpointExpr toward_expr(const Incidence& inc, const EndData& d) {
  if (!inc.at_head) return {inc.edge, {0.0, 0.0}, {-1.0, 0.0}, {0.0, 0.0}};
  return {inc.edge, d.dc, d.ds, d.dp};
}

}  // namespace

VertexSystem assemble_vertex_system(const MetricGraph& g, Complex z,
                                    const BoundaryData& bc,
                                    const GraphFunction* source) {
  const int n = 2 * g.edge_count();
  const int bdim = g.boundary_dim();
  if (bc.btilde) {
    if (bc.btilde->rows() != bdim || bc.btilde->cols() != bdim)
      throw ContractError(
          "vertex system: robin matrix must be boundary x boundary");
  } else if (bc.dirichlet.size() != bdim) {
    throw ContractError(
        "vertex system: one Dirichlet value per boundary vertex");
  }

  std::vector<EndData> end(g.edge_count());
  for (int e = 0; e < g.edge_count(); ++e) {
    const auto p = fundamental_pair(z, g.edge(e).length);
    end[e] = {p.c, p.s, p.dc, p.ds, {0.0, 0.0}, {0.0, 0.0}};
    if (source) {
      const auto part = particular_integral(z, *source, e, g.edge(e).length);
      end[e].p = part.p;
      end[e].dp = part.dp;
    }
  }

  VertexSystem sys;
  sys.a = Matrix::Zero(n, n);
  sys.rhs = Vector::Zero(n);
  int row = 0;
  auto add = [&sys](int row, const EndpointExpr& ex, Complex scale) {
    sys.a(row, 2 * ex.edge) += scale * ex.alpha;
    sys.a(row, 2 * ex.edge + 1) += scale * ex.beta;
    sys.rhs(row) -= scale * ex.part;
  };

  for (int v = 0; v < g.vertex_count(); ++v) {
    const auto& inc = g.incidences(v);
    const int bix = g.boundary_index(v);

    if (bix >= 0 && !bc.btilde) {
      for (const auto& i : inc) {
        add(row, value_expr(i, end[i.edge]), {1.0, 0.0});
        sys.rhs(row) += bc.dirichlet(bix);
        ++row;
      }
      continue;
    }

    // Continuity across the vertex (interior and Robin vertices alike).
    for (size_t k = 1; k < inc.size(); ++k) {
      add(row, value_expr(inc[0], end[inc[0].edge]), {1.0, 0.0});
      add(row, value_expr(inc[k], end[inc[k].edge]), {-1.0, 0.0});
      ++row;
    }

    if (bix < 0) {
      // Flux balance: derivatives toward the vertex sum to zero.
      for (const auto& i : inc) add(row, toward_expr(i, end[i.edge]), {1.0, 0.0});
      ++row;
    } else {
      // Robin row: flux(v) - sum_w btilde(v, w) trace(w) = 0, where trace(w)
      // is read off the first incidence of w (continuity rows identify the
      // others).
      for (const auto& i : inc) add(row, toward_expr(i, end[i.edge]), {1.0, 0.0});
      for (int w = 0; w < bdim; ++w) {
        const Complex coeff = -(*bc.btilde)(bix, w);
        const auto& winc = g.incidences(g.boundary()[w]).front();
        add(row, value_expr(winc, end[winc.edge]), coeff);
      }
      ++row;
    }
  }
  if (row != n)
    throw ContractError("vertex system: row count mismatch during assembly");
  return sys;
}

}  // namespace kreinlab
