#include "kreinlab/graph_backend.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/LU>

#include "kreinlab/errors.hpp"
#include "kreinlab/linalg.hpp"
#include "kreinlab/quadrature.hpp"
#include "kreinlab/vertex_system.hpp"

namespace kreinlab {

namespace {

void check_hermitian_bc(const Matrix& btilde) {
  const double dev = (btilde - btilde.adjoint()).norm();
  if (dev > 1e-10 * (1.0 + btilde.norm()))
    throw ContractError("robin boundary matrix must be Hermitian");
}

std::vector<EdgeCoefficients> unpack(const Vector& x) {
  std::vector<EdgeCoefficients> coeffs(static_cast<size_t>(x.size() / 2));
  for (Eigen::Index e = 0; 2 * e + 1 < x.size(); ++e)
    coeffs[static_cast<size_t>(e)] = {x(2 * e), x(2 * e + 1)};
  return coeffs;
}

}  // namespace

GraphBackend::GraphBackend(std::shared_ptr<const MetricGraph> graph,
                           double exclusion_scale)
    : graph_(std::move(graph)), exclusion_scale_(exclusion_scale) {
  if (!graph_) throw ContractError("graph backend: null graph");
  if (!(exclusion_scale_ > 0.0))
    throw ConfigError("graph backend: exclusion scale must be positive");
}

Matrix GraphBackend::secular_matrix(
    Complex z, const std::optional<Matrix>& btilde) const {
  BoundaryData bc;
  if (btilde)
    bc = BoundaryData::robin_data(*btilde);
  else
    bc = BoundaryData::dirichlet_data(Vector::Zero(boundary_dim()));
  return assemble_vertex_system(*graph_, z, bc, nullptr).a;
}

double GraphBackend::secular_det(double z,
                                 const std::optional<Matrix>& btilde) const {
  Matrix a = secular_matrix(Complex(z, 0.0), btilde);
  for (int r = 0; r < a.rows(); ++r) {
    const double nrm = a.row(r).norm();
    if (nrm == 0.0) return 0.0;
    a.row(r) /= nrm;
  }
  const double im = a.imag().cwiseAbs().maxCoeff();
  if (im <= 1e-12) {
    RealMatrix ar = a.real();
    return Eigen::PartialPivLU<RealMatrix>(ar).determinant();
  }
  return std::abs(Eigen::PartialPivLU<Matrix>(a).determinant());
}

std::vector<EigenPair> GraphBackend::robin_spectrum(
    Window window, const Matrix& btilde, const SpectrumOptions& opts) const {
  check_hermitian_bc(btilde);
  const std::optional<Matrix> bc(btilde);
  const int grid = std::max(
      opts.min_grid,
      static_cast<int>(std::ceil(window.width() * opts.grid_per_unit)));
  auto f = [&](double z) { return secular_det(z, bc); };
  auto m = [&](double z) { return secular_matrix(Complex(z, 0.0), bc); };
  const auto hits = scan_real_roots(f, window, {}, grid, m, opts.scan);
  std::vector<EigenPair> out;
  for (const auto& h : hits) out.push_back({h.z, h.multiplicity});
  return out;
}

void GraphBackend::insert_eigenvalue(double value, int multiplicity) const {
  auto it = std::lower_bound(
      sigma0_.begin(), sigma0_.end(), value,
      [](const EigenPair& p, double v) { return p.value < v; });
  const double tol = 1e-7 * (1.0 + std::abs(value));
  if (it != sigma0_.end() && std::abs(it->value - value) <= tol) return;
  if (it != sigma0_.begin() && std::abs(std::prev(it)->value - value) <= tol)
    return;
  sigma0_.insert(it, {value, multiplicity});
}

void GraphBackend::ensure_covered(double lo, double hi) const {
  // Collect the parts of [lo, hi] not yet covered by earlier scans.
  std::vector<std::pair<double, double>> gaps{{lo, hi}};
  for (const auto& c : covered_) {
    std::vector<std::pair<double, double>> next;
    for (const auto& g : gaps) {
      if (c.second <= g.first || c.first >= g.second) {
        next.push_back(g);
        continue;
      }
      if (c.first > g.first) next.emplace_back(g.first, c.first);
      if (c.second < g.second) next.emplace_back(c.second, g.second);
    }
    gaps = std::move(next);
  }
  const std::optional<Matrix> none;
  for (const auto& g : gaps) {
    // Pad so roots sitting exactly on a seam between scans are still found.
    const Window w{g.first - 0.5, g.second + 0.5};
    const int grid = std::max(
        cache_opts_.min_grid,
        static_cast<int>(std::ceil(w.width() * cache_opts_.grid_per_unit)));
    auto f = [&](double z) { return secular_det(z, none); };
    auto m = [&](double z) { return secular_matrix(Complex(z, 0.0), none); };
    for (const auto& h : scan_real_roots(f, w, {}, grid, m, cache_opts_.scan))
      insert_eigenvalue(h.z, h.multiplicity);
    covered_.emplace_back(g.first, g.second);
  }
  // Merge the coverage list.
  std::sort(covered_.begin(), covered_.end());
  std::vector<std::pair<double, double>> merged;
  for (const auto& c : covered_) {
    if (!merged.empty() && c.first <= merged.back().second)
      merged.back().second = std::max(merged.back().second, c.second);
    else
      merged.push_back(c);
  }
  covered_ = std::move(merged);
}

std::vector<EigenPair> GraphBackend::dirichlet_spectrum(
    Window window, const SpectrumOptions& opts) const {
  if (!(window.lo < window.hi))
    throw ConfigError("dirichlet_spectrum: window must satisfy lo < hi");
  cache_opts_ = opts;
  ensure_covered(window.lo, window.hi);
  std::vector<EigenPair> out;
  for (const auto& p : sigma0_)
    if (p.value > window.lo && p.value < window.hi) out.push_back(p);
  return out;
}

std::vector<Exclusion> GraphBackend::dirichlet_exclusions(
    Window window) const {
  ensure_covered(window.lo, window.hi);
  std::vector<Exclusion> out;
  for (const auto& p : sigma0_)
    if (p.value > window.lo && p.value < window.hi)
      out.push_back({p.value, exclusion_scale_ * (1.0 + std::abs(p.value))});
  return out;
}

void GraphBackend::guard_regular(Complex z) const {
  const double radius = exclusion_scale_ * (1.0 + std::abs(z));
  if (std::abs(z.imag()) >= radius) return;
  const double x = z.real();
  ensure_covered(x - 2.0, x + 2.0);
  for (const auto& p : sigma0_) {
    const double dist = std::hypot(x - p.value, z.imag());
    if (dist < radius) throw NearDirichletSpectrum(x, dist);
  }
}

HomogeneousSolution GraphBackend::dirichlet_solve(Complex z,
                                                  const Vector& g) const {
  if (g.size() != boundary_dim())
    throw ContractError("dirichlet_solve: one value per boundary vertex");
  guard_regular(z);
  const auto sys =
      assemble_vertex_system(*graph_, z, BoundaryData::dirichlet_data(g));
  const auto sol = solve_dense(sys.a, sys.rhs);
  return HomogeneousSolution(graph_, z, unpack(sol.x));
}

ForcedSolution GraphBackend::dirichlet_resolvent(
    Complex z, std::shared_ptr<const GraphFunction> h) const {
  if (!h) throw ContractError("dirichlet_resolvent: null source");
  guard_regular(z);
  const auto sys = assemble_vertex_system(
      *graph_, z, BoundaryData::dirichlet_data(Vector::Zero(boundary_dim())),
      h.get());
  const auto sol = solve_dense(sys.a, sys.rhs);
  return ForcedSolution(graph_, z, unpack(sol.x), std::move(h));
}

ForcedSolution GraphBackend::robin_resolvent(
    Complex z, const Matrix& btilde,
    std::shared_ptr<const GraphFunction> h) const {
  if (!h) throw ContractError("robin_resolvent: null source");
  check_hermitian_bc(btilde);
  const auto sys = assemble_vertex_system(
      *graph_, z, BoundaryData::robin_data(btilde), h.get());
  try {
    const auto sol = solve_dense(sys.a, sys.rhs);
    return ForcedSolution(graph_, z, unpack(sol.x), std::move(h));
  } catch (const SingularSystem&) {
    throw EigenvalueAt(z.real());
  }
}

std::vector<HomogeneousSolution> GraphBackend::solution_space(
    Complex z, const std::optional<Matrix>& btilde) const {
  const Matrix a = secular_matrix(z, btilde);
  const auto ns = nullspace(a);
  std::vector<HomogeneousSolution> out;
  for (int k = 0; k < ns.nullity; ++k) {
    HomogeneousSolution f(graph_, z, unpack(Vector(ns.basis.col(k))));
    const double nrm = norm(f);
    if (nrm == 0.0) continue;
    auto coeffs = f.coefficients();
    for (auto& c : coeffs) {
      c.a /= nrm;
      c.b /= nrm;
    }
    out.emplace_back(graph_, z, std::move(coeffs));
  }
  return out;
}

Vector GraphBackend::trace(const GraphFunction& f) const {
  Vector out(boundary_dim());
  for (int i = 0; i < boundary_dim(); ++i) {
    const int v = graph_->boundary()[i];
    const Incidence& inc = graph_->incidences(v).front();
    const double t = inc.at_head ? graph_->edge(inc.edge).length : 0.0;
    out(i) = f.value(inc.edge, t);
  }
  return out;
}

Vector GraphBackend::normal_flux(const GraphFunction& f) const {
  Vector out = Vector::Zero(boundary_dim());
  for (int i = 0; i < boundary_dim(); ++i) {
    const int v = graph_->boundary()[i];
    for (const Incidence& inc : graph_->incidences(v)) {
      if (inc.at_head)
        out(i) += f.derivative(inc.edge, graph_->edge(inc.edge).length);
      else
        out(i) -= f.derivative(inc.edge, 0.0);
    }
  }
  return out;
}

Complex GraphBackend::inner(const GraphFunction& f,
                            const GraphFunction& g) const {
  if (f.graph_ptr().get() != graph_.get() ||
      g.graph_ptr().get() != graph_.get())
    throw ContractError("inner: functions live on another graph");
  const int hint = std::max(f.quadrature_hint(), g.quadrature_hint());
  Complex sum{0.0, 0.0};
  for (int e = 0; e < graph_->edge_count(); ++e) {
    const double len = graph_->edge(e).length;
    const int order =
        std::max(8, static_cast<int>(std::ceil(hint * std::max(1.0, len))));
    const QuadratureRule rule = gauss_rule(order, 0.0, len);
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
      sum += rule.weights[i] * std::conj(f.value(e, rule.nodes[i])) *
             g.value(e, rule.nodes[i]);
  }
  return sum;
}

double GraphBackend::norm(const GraphFunction& f) const {
  return std::sqrt(std::max(0.0, inner(f, f).real()));
}

Complex GraphBackend::energy_inner(const GraphFunction& f,
                                   const GraphFunction& g) const {
  if (f.graph_ptr().get() != graph_.get() ||
      g.graph_ptr().get() != graph_.get())
    throw ContractError("energy_inner: functions live on another graph");
  const int hint = std::max(f.quadrature_hint(), g.quadrature_hint());
  Complex sum{0.0, 0.0};
  for (int e = 0; e < graph_->edge_count(); ++e) {
    const double len = graph_->edge(e).length;
    const int order =
        std::max(8, static_cast<int>(std::ceil(hint * std::max(1.0, len))));
    const QuadratureRule rule = gauss_rule(order, 0.0, len);
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i)
      sum += rule.weights[i] * std::conj(f.derivative(e, rule.nodes[i])) *
             g.derivative(e, rule.nodes[i]);
  }
  return sum;
}

GraphBackend::Function GraphBackend::operator_image(Complex z,
                                                    const Function& f) const {
  if (!f) throw ContractError("operator_image: null function");
  auto source = f;
  return std::make_shared<SmoothFunction>(
      graph_,
      [source, z](int e, double t) {
        return source->laplacian(e, t) - z * source->value(e, t);
      },
      SmoothFunction::Field{}, SmoothFunction::Field{},
      f->quadrature_hint() + 8);
}

GraphBackend::Function GraphBackend::combine(
    std::vector<std::pair<Complex, Function>> terms) const {
  std::vector<LinearCombination::Term> converted;
  converted.reserve(terms.size());
  for (auto& [c, f] : terms) converted.emplace_back(c, std::move(f));
  return std::make_shared<LinearCombination>(graph_, std::move(converted));
}

GraphBackend::Function GraphBackend::constant(Complex value) const {
  return std::make_shared<SmoothFunction>(
      graph_, [value](int, double) { return value; },
      [](int, double) { return Complex(0.0, 0.0); },
      [](int, double) { return Complex(0.0, 0.0); }, 16);
}

}  // namespace kreinlab
