#include "kreinlab/graph_function.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "kreinlab/errors.hpp"
#include "kreinlab/quadrature.hpp"
#include "kreinlab/scalar_ode.hpp"

namespace kreinlab {

namespace {

int oscillation_order(Complex z, double length) {
  return static_cast<int>(std::ceil(2.0 * std::sqrt(std::abs(z)) *
                                    std::max(length, 1.0)));
}

void check_edge(const MetricGraph& g, int edge, double t) {
  if (edge < 0 || edge >= g.edge_count())
    throw ContractError("graph function: edge index out of range");
  const double len = g.edge(edge).length;
  if (t < -1e-12 || t > len * (1.0 + 1e-12))
    throw ContractError("graph function: coordinate outside edge");
}

}  // namespace

GraphFunction::GraphFunction(std::shared_ptr<const MetricGraph> graph)
    : graph_(std::move(graph)) {
  if (!graph_) throw ContractError("graph function: null graph");
}

HomogeneousSolution::HomogeneousSolution(
    std::shared_ptr<const MetricGraph> graph, Complex z,
    std::vector<EdgeCoefficients> coefficients)
    : GraphFunction(std::move(graph)),
      z_(z),
      coefficients_(std::move(coefficients)) {
  if (static_cast<int>(coefficients_.size()) != graph_->edge_count())
    throw ContractError("homogeneous solution: one (a, b) pair per edge");
}

Complex HomogeneousSolution::value(int edge, double t) const {
  check_edge(*graph_, edge, t);
  const auto p = fundamental_pair(z_, t);
  return coefficients_[edge].a * p.c + coefficients_[edge].b * p.s;
}

Complex HomogeneousSolution::derivative(int edge, double t) const {
  check_edge(*graph_, edge, t);
  const auto p = fundamental_pair(z_, t);
  return coefficients_[edge].a * p.dc + coefficients_[edge].b * p.ds;
}

Complex HomogeneousSolution::laplacian(int edge, double t) const {
  return z_ * value(edge, t);
}

int HomogeneousSolution::quadrature_hint() const {
  return 32 + oscillation_order(z_, 1.0);
}

ParticularEndpoint particular_integral(Complex z, const GraphFunction& h,
                                       int edge, double t) {
  ParticularEndpoint out;
  if (t <= 0.0) return out;
  const int order = std::max(
      8, h.quadrature_hint() + oscillation_order(z, t) + 8);
  const QuadratureRule rule = gauss_rule(order, 0.0, t);
  for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) {
    const double tau = rule.nodes[i];
    const auto p = fundamental_pair(z, t - tau);
    const Complex hv = h.value(edge, tau) * rule.weights[i];
    out.p -= p.s * hv;
    out.dp -= p.c * hv;
  }
  return out;
}

ForcedSolution::ForcedSolution(std::shared_ptr<const MetricGraph> graph,
                               Complex z,
                               std::vector<EdgeCoefficients> coefficients,
                               std::shared_ptr<const GraphFunction> source)
    : GraphFunction(std::move(graph)),
      z_(z),
      coefficients_(std::move(coefficients)),
      source_(std::move(source)) {
  if (static_cast<int>(coefficients_.size()) != graph_->edge_count())
    throw ContractError("forced solution: one (a, b) pair per edge");
  if (!source_) throw ContractError("forced solution: null source");
  if (source_->graph_ptr().get() != graph_.get())
    throw ContractError("forced solution: source lives on another graph");
}

Complex ForcedSolution::value(int edge, double t) const {
  check_edge(*graph_, edge, t);
  const auto p = fundamental_pair(z_, t);
  const Complex hom =
      coefficients_[edge].a * p.c + coefficients_[edge].b * p.s;
  return hom + particular_integral(z_, *source_, edge, t).p;
}

Complex ForcedSolution::derivative(int edge, double t) const {
  check_edge(*graph_, edge, t);
  const auto p = fundamental_pair(z_, t);
  const Complex hom =
      coefficients_[edge].a * p.dc + coefficients_[edge].b * p.ds;
  return hom + particular_integral(z_, *source_, edge, t).dp;
}

Complex ForcedSolution::laplacian(int edge, double t) const {
  return z_ * value(edge, t) + source_->value(edge, t);
}

int ForcedSolution::quadrature_hint() const {
  return source_->quadrature_hint() + oscillation_order(z_, 1.0) + 16;
}

SmoothFunction::SmoothFunction(std::shared_ptr<const MetricGraph> graph,
                               Field value, Field derivative, Field laplacian,
                               int quadrature_hint)
    : GraphFunction(std::move(graph)),
      value_(std::move(value)),
      derivative_(std::move(derivative)),
      laplacian_(std::move(laplacian)),
      hint_(quadrature_hint) {
  if (!value_) throw ContractError("smooth function: value callback required");
}

Complex SmoothFunction::value(int edge, double t) const {
  check_edge(*graph_, edge, t);
  return value_(edge, t);
}

Complex SmoothFunction::derivative(int edge, double t) const {
  check_edge(*graph_, edge, t);
  if (!derivative_)
    throw ContractError("smooth function: no derivative callback");
  return derivative_(edge, t);
}

Complex SmoothFunction::laplacian(int edge, double t) const {
  check_edge(*graph_, edge, t);
  if (!laplacian_)
    throw ContractError("smooth function: no laplacian callback");
  return laplacian_(edge, t);
}

int SmoothFunction::quadrature_hint() const { return hint_; }

LinearCombination::LinearCombination(std::shared_ptr<const MetricGraph> graph,
                                     std::vector<Term> terms)
    : GraphFunction(std::move(graph)), terms_(std::move(terms)) {
  for (const auto& [coeff, f] : terms_) {
    (void)coeff;
    if (!f) throw ContractError("linear combination: null term");
    if (f->graph_ptr().get() != graph_.get())
      throw ContractError("linear combination: term lives on another graph");
  }
}

Complex LinearCombination::value(int edge, double t) const {
  Complex sum{0.0, 0.0};
  for (const auto& [coeff, f] : terms_) sum += coeff * f->value(edge, t);
  return sum;
}

Complex LinearCombination::derivative(int edge, double t) const {
  Complex sum{0.0, 0.0};
  for (const auto& [coeff, f] : terms_) sum += coeff * f->derivative(edge, t);
  return sum;
}

Complex LinearCombination::laplacian(int edge, double t) const {
  Complex sum{0.0, 0.0};
  for (const auto& [coeff, f] : terms_) sum += coeff * f->laplacian(edge, t);
  return sum;
}

int LinearCombination::quadrature_hint() const {
  int hint = 8;
  for (const auto& [coeff, f] : terms_) {
    (void)coeff;
    hint = std::max(hint, f->quadrature_hint());
  }
  return hint;
}

void sample_csv(std::ostream& out, const GraphFunction& f,
                int samples_per_edge) {
  if (samples_per_edge < 2)
    throw ConfigError("sample_csv: need at least two samples per edge");
  out << "edge_id,t,value_re,value_im\n";
  char buf[96];
  const MetricGraph& g = f.graph();
  for (int e = 0; e < g.edge_count(); ++e) {
    const double len = g.edge(e).length;
    for (int i = 0; i < samples_per_edge; ++i) {
      const double t = len * i / double(samples_per_edge - 1);
      const Complex v = f.value(e, t);
      std::snprintf(buf, sizeof(buf), "%d,%.17g,%.17g,%.17g\n", e, t,
                    v.real(), v.imag());
      out << buf;
    }
  }
}

}  // namespace kreinlab
