#include "kreinlab/discrete.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "kreinlab/boundary_ops.hpp"
#include "kreinlab/errors.hpp"
#include "kreinlab/graph_backend.hpp"
#include "kreinlab/linalg.hpp"

namespace kreinlab {

namespace {

void require_hermitian_pd(const Matrix& m, const std::string& label) {
  if (m.rows() != m.cols())
    throw ConfigError(label + " must be square");
  const double scale = 1.0 + m.norm();
  if ((m - m.adjoint()).norm() > 1e-10 * scale)
    throw ConfigError(label + " must be Hermitian");
  Eigen::SelfAdjointEigenSolver<Matrix> es(
      Matrix(0.5 * (m + m.adjoint())), Eigen::EigenvaluesOnly);
  const double lo = es.eigenvalues().minCoeff();
  const double hi = es.eigenvalues().maxCoeff();
  if (lo <= 1e-12 * std::max(1.0, hi))
    throw ConfigError(label + " must be positive definite");
}

Matrix select(const Matrix& m, const std::vector<int>& rows,
              const std::vector<int>& cols) {
  Matrix out(rows.size(), cols.size());
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < cols.size(); ++j) out(i, j) = m(rows[i], cols[j]);
  return out;
}

// Columns: z-harmonic extensions of the boundary basis vectors.
Matrix harmonic_columns(const DiscreteModel& model, Complex z) {
  const Matrix a = model.stiffness() - z * model.gram0;
  const std::vector<int> inner = model.interior();
  const int n = model.vertex_count();
  const int b = model.boundary_dim();
  Matrix u = Matrix::Zero(n, b);
  for (int j = 0; j < b; ++j) u(model.boundary[j], j) = Complex(1.0, 0.0);
  if (!inner.empty()) {
    const Matrix a_ii = select(a, inner, inner);
    const Matrix a_ib = select(a, inner, model.boundary);
    const Matrix u_i = solve_dense(a_ii, Matrix(-a_ib)).x;
    for (size_t i = 0; i < inner.size(); ++i) u.row(inner[i]) = u_i.row(i);
  }
  return u;
}

Matrix boundary_rows(const DiscreteModel& model, const Matrix& m) {
  Matrix out(model.boundary_dim(), m.cols());
  for (int i = 0; i < model.boundary_dim(); ++i)
    out.row(i) = m.row(model.boundary[i]);
  return out;
}

}  // namespace

DiscreteModel::DiscreteModel(Matrix gram0_in, Matrix gram1_in,
                             Matrix incidence_in, std::vector<int> boundary_in,
                             Matrix boundary_gram_in)
    : gram0(std::move(gram0_in)),
      gram1(std::move(gram1_in)),
      incidence(std::move(incidence_in)),
      boundary(std::move(boundary_in)),
      boundary_gram(std::move(boundary_gram_in)) {
  require_hermitian_pd(gram0, "vertex Gram");
  require_hermitian_pd(gram1, "edge Gram");
  const int n = vertex_count();
  const int e = edge_count();
  if (e < 1) throw ConfigError("discrete model needs at least one edge");
  if (incidence.rows() != e || incidence.cols() != n)
    throw ConfigError("difference matrix must be edges x vertices");
  for (int r = 0; r < e; ++r) {
    const double scale = incidence.row(r).cwiseAbs().maxCoeff();
    if (scale == 0.0)
      throw ConfigError("difference matrix row " + std::to_string(r) +
                        " is zero");
    int nonzero = 0;
    Complex sum{0.0, 0.0};
    for (int c = 0; c < n; ++c) {
      if (std::abs(incidence(r, c)) > 1e-12 * scale) {
        ++nonzero;
        sum += incidence(r, c);
      }
    }
    if (nonzero != 2 || std::abs(sum) > 1e-12 * scale)
      throw ConfigError("difference matrix row " + std::to_string(r) +
                        " must hold one +w and one -w entry");
  }
  if (boundary.empty()) throw ConfigError("boundary set must be nonempty");
  std::set<int> seen;
  for (int v : boundary) {
    if (v < 0 || v >= n)
      throw ConfigError("boundary index " + std::to_string(v) +
                        " out of range");
    if (!seen.insert(v).second)
      throw ConfigError("boundary index " + std::to_string(v) + " repeated");
  }
  require_hermitian_pd(boundary_gram, "boundary Gram");
  if (boundary_gram.rows() != boundary_dim())
    throw ConfigError("boundary Gram must match the boundary set size");
}

std::vector<int> DiscreteModel::interior() const {
  std::set<int> b(boundary.begin(), boundary.end());
  std::vector<int> out;
  for (int v = 0; v < vertex_count(); ++v)
    if (!b.count(v)) out.push_back(v);
  return out;
}

Matrix DiscreteModel::stiffness() const {
  return incidence.adjoint() * gram1 * incidence;
}

Matrix DiscreteModel::h1_gram() const { return stiffness() + gram0; }

DiscreteModel DiscreteModel::unweighted_path(int vertices) {
  if (vertices < 2) throw ConfigError("path needs at least two vertices");
  Matrix d = Matrix::Zero(vertices - 1, vertices);
  for (int e = 0; e < vertices - 1; ++e) {
    d(e, e) = Complex(-1.0, 0.0);
    d(e, e + 1) = Complex(1.0, 0.0);
  }
  return DiscreteModel(Matrix::Identity(vertices, vertices),
                       Matrix::Identity(vertices - 1, vertices - 1),
                       std::move(d), {0, vertices - 1},
                       Matrix::Identity(2, 2));
}

Scheme parse_scheme(const std::string& name) {
  if (name == "dec-lumped") return Scheme::DecLumped;
  if (name == "fem-p1") return Scheme::FemP1;
  throw ConfigError("unknown discretization scheme \"" + name +
                    "\" (expected dec-lumped or fem-p1)");
}

std::string scheme_name(Scheme scheme) {
  return scheme == Scheme::DecLumped ? "dec-lumped" : "fem-p1";
}

DiscreteModel discretize(const MetricGraph& graph, int n_per_edge,
                         Scheme scheme) {
  if (n_per_edge < 1)
    throw ConfigError("n_per_edge must be at least 1");
  const int base = graph.vertex_count();
  const int per_edge = n_per_edge - 1;
  const int n = base + per_edge * graph.edge_count();
  const int segments = n_per_edge * graph.edge_count();

  Matrix d = Matrix::Zero(segments, n);
  Matrix gram0 = Matrix::Zero(n, n);
  Matrix gram1 = Matrix::Zero(segments, segments);

  for (int e = 0; e < graph.edge_count(); ++e) {
    const Edge& edge = graph.edge(e);
    const double h = edge.length / n_per_edge;
    // Chain of vertex ids from tail to head.
    std::vector<int> chain;
    chain.push_back(edge.tail);
    for (int k = 0; k < per_edge; ++k) chain.push_back(base + e * per_edge + k);
    chain.push_back(edge.head);

    for (int s = 0; s < n_per_edge; ++s) {
      const int row = e * n_per_edge + s;
      const int lo = chain[s];
      const int hi = chain[s + 1];
      d(row, lo) = Complex(-1.0, 0.0);
      d(row, hi) = Complex(1.0, 0.0);
      gram1(row, row) = Complex(1.0 / h, 0.0);
      if (scheme == Scheme::DecLumped) {
        gram0(lo, lo) += Complex(0.5 * h, 0.0);
        gram0(hi, hi) += Complex(0.5 * h, 0.0);
      } else {
        gram0(lo, lo) += Complex(h / 3.0, 0.0);
        gram0(hi, hi) += Complex(h / 3.0, 0.0);
        gram0(lo, hi) += Complex(h / 6.0, 0.0);
        gram0(hi, lo) += Complex(h / 6.0, 0.0);
      }
    }
  }

  const int b = graph.boundary_dim();
  return DiscreteModel(std::move(gram0), std::move(gram1), std::move(d),
                       graph.boundary(), Matrix::Identity(b, b));
}

Matrix boundary_schur(const DiscreteModel& model) {
  const Matrix a = model.h1_gram();
  const std::vector<int> inner = model.interior();
  Matrix s = select(a, model.boundary, model.boundary);
  if (!inner.empty()) {
    const Matrix a_ii = select(a, inner, inner);
    const Matrix a_ib = select(a, inner, model.boundary);
    const Matrix a_bi = select(a, model.boundary, inner);
    s -= a_bi * solve_dense(a_ii, a_ib).x;
  }
  return 0.5 * (s + s.adjoint().eval());
}

Vector discrete_harmonic(const DiscreteModel& model, Complex z,
                         const Vector& phi) {
  if (phi.size() != model.boundary_dim())
    throw ContractError("harmonic extension: boundary data size mismatch");
  const Matrix a = model.stiffness() - z * model.gram0;
  const std::vector<int> inner = model.interior();
  Vector u = Vector::Zero(model.vertex_count());
  for (int j = 0; j < model.boundary_dim(); ++j) u(model.boundary[j]) = phi(j);
  if (!inner.empty()) {
    const Matrix a_ii = select(a, inner, inner);
    const Matrix a_ib = select(a, inner, model.boundary);
    const Vector u_i = solve_dense(a_ii, Vector(-a_ib * phi)).x;
    for (size_t i = 0; i < inner.size(); ++i) u(inner[i]) = u_i(i);
  }
  return u;
}

Matrix flux_dtn(const DiscreteModel& model, Complex z) {
  const Matrix u = harmonic_columns(model, z);
  const Matrix flux = boundary_rows(model, model.stiffness() * u);
  return solve_dense(model.boundary_gram, flux).x;
}

Matrix conormal_dtn(const DiscreteModel& model, Complex z) {
  const Matrix u = harmonic_columns(model, z);
  const Matrix a = model.stiffness() - z * model.gram0;
  const Matrix flux = boundary_rows(model, a * u);
  return solve_dense(model.boundary_gram, flux).x;
}

double trace_operator_norm(const DiscreteModel& model) {
  const int n = model.vertex_count();
  Matrix lifted = Matrix::Zero(n, n);
  for (int i = 0; i < model.boundary_dim(); ++i)
    for (int j = 0; j < model.boundary_dim(); ++j)
      lifted(model.boundary[i], model.boundary[j]) = model.boundary_gram(i, j);
  const auto eig = hermitian_eig(lifted, model.h1_gram());
  return std::sqrt(std::max(0.0, eig.values(eig.values.size() - 1)));
}

Complex discrete_green_residual(const DiscreteModel& model, const Vector& f,
                                const Vector& flux_f, const Vector& g,
                                const Vector& flux_g) {
  const int b = model.boundary_dim();
  if (f.size() != model.vertex_count() || g.size() != model.vertex_count() ||
      flux_f.size() != b || flux_g.size() != b)
    throw ContractError("green residual: vector size mismatch");
  const Matrix k = model.stiffness();
  Vector lift_f = Vector::Zero(model.vertex_count());
  Vector lift_g = Vector::Zero(model.vertex_count());
  const Vector gf = model.boundary_gram * flux_f;
  const Vector gg = model.boundary_gram * flux_g;
  for (int j = 0; j < b; ++j) {
    lift_f(model.boundary[j]) = gf(j);
    lift_g(model.boundary[j]) = gg(j);
  }
  // <Lap f, g> - <f, Lap g> in the vertex Gram, with the weak Laplacian
  // Gram0^{-1}(K f - lift); the Gram0 factors cancel algebraically.
  const Complex lhs =
      ((k * f - lift_f).adjoint() * g).value() -
      (f.adjoint() * (k * g - lift_g)).value();

  Vector trace_f(b), trace_g(b);
  for (int j = 0; j < b; ++j) {
    trace_f(j) = f(model.boundary[j]);
    trace_g(j) = g(model.boundary[j]);
  }
  const Complex rhs = (trace_f.adjoint() * model.boundary_gram * flux_g).value() -
                      (flux_f.adjoint() * model.boundary_gram * trace_g).value();
  return lhs - rhs;
}

std::vector<ConvergenceRow> convergence_study(
    std::shared_ptr<const MetricGraph> graph, Complex z,
    const std::vector<int>& levels, Scheme scheme) {
  if (levels.empty()) throw ConfigError("convergence study needs levels");
  GraphBackend bk(graph);
  const Matrix reference = dtn(bk, z);

  double max_len = 0.0;
  for (const Edge& e : graph->edges()) max_len = std::max(max_len, e.length);

  std::vector<ConvergenceRow> rows;
  const double nan = std::numeric_limits<double>::quiet_NaN();
  for (size_t i = 0; i < levels.size(); ++i) {
    const int n = levels[i];
    const DiscreteModel model = discretize(*graph, n, scheme);
    ConvergenceRow row;
    row.n = n;
    row.h = max_len / n;
    row.flux_error = (flux_dtn(model, z) - reference).cwiseAbs().maxCoeff();
    row.conormal_error =
        (conormal_dtn(model, z) - reference).cwiseAbs().maxCoeff();
    if (i == 0) {
      row.flux_rate = nan;
      row.conormal_rate = nan;
    } else {
      const auto& prev = rows.back();
      const double ratio = std::log(double(n) / double(prev.n));
      row.flux_rate = std::log(prev.flux_error / row.flux_error) / ratio;
      row.conormal_rate =
          std::log(prev.conormal_error / row.conormal_error) / ratio;
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace kreinlab
