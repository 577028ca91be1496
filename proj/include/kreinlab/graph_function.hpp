#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <utility>
#include <vector>

#include "kreinlab/metric_graph.hpp"
#include "kreinlab/types.hpp"

namespace kreinlab {

/// A scalar function on a metric graph, evaluated per edge in the edge's own
/// arclength coordinate.  `laplacian` is the action of the negative second
/// derivative; the solution classes below compute it in closed form, so
/// operator identities can be checked without numerical differentiation.
class GraphFunction {
 public:
  explicit GraphFunction(std::shared_ptr<const MetricGraph> graph);
  virtual ~GraphFunction() = default;

  const MetricGraph& graph() const { return *graph_; }
  const std::shared_ptr<const MetricGraph>& graph_ptr() const {
    return graph_;
  }

  virtual Complex value(int edge, double t) const = 0;
  virtual Complex derivative(int edge, double t) const = 0;
  virtual Complex laplacian(int edge, double t) const = 0;

  /// Gauss order adequate for integrating this function against a smooth
  /// factor over one edge of unit length.
  virtual int quadrature_hint() const { return 48; }

 protected:
  std::shared_ptr<const MetricGraph> graph_;
};

/// Coefficients of f = a c(z, t) + b s(z, t) on one edge.
struct EdgeCoefficients {
  Complex a{0.0, 0.0};
  Complex b{0.0, 0.0};
};

/// An exact solution of (Delta - z) f = 0, edge by edge.  Its `laplacian`
/// is z * value with no discretization error.
class HomogeneousSolution final : public GraphFunction {
 public:
  HomogeneousSolution(std::shared_ptr<const MetricGraph> graph, Complex z,
                      std::vector<EdgeCoefficients> coefficients);

  Complex z() const { return z_; }
  const std::vector<EdgeCoefficients>& coefficients() const {
    return coefficients_;
  }

  Complex value(int edge, double t) const override;
  Complex derivative(int edge, double t) const override;
  Complex laplacian(int edge, double t) const override;
  int quadrature_hint() const override;

 private:
  Complex z_;
  std::vector<EdgeCoefficients> coefficients_;
};

/// Value and derivative of the particular integral
///   u_p(t) = -int_0^t s(z, t - tau) h(tau) dtau
/// on one edge, which satisfies (Delta - z) u_p = h with u_p(0) = u_p'(0) = 0.
struct ParticularEndpoint {
  Complex p{0.0, 0.0};
  Complex dp{0.0, 0.0};
};
ParticularEndpoint particular_integral(Complex z, const GraphFunction& h,
                                       int edge, double t);

/// An exact solution of (Delta - z) f = h: homogeneous part plus the
/// particular integral of the stored source.  Only values of the source are
/// ever needed.
class ForcedSolution final : public GraphFunction {
 public:
  ForcedSolution(std::shared_ptr<const MetricGraph> graph, Complex z,
                 std::vector<EdgeCoefficients> coefficients,
                 std::shared_ptr<const GraphFunction> source);

  Complex z() const { return z_; }
  const GraphFunction& source() const { return *source_; }

  Complex value(int edge, double t) const override;
  Complex derivative(int edge, double t) const override;
  Complex laplacian(int edge, double t) const override;
  int quadrature_hint() const override;

 private:
  Complex z_;
  std::vector<EdgeCoefficients> coefficients_;
  std::shared_ptr<const GraphFunction> source_;
};

/// Analytic test functions: the caller supplies value, derivative and
/// negative-second-derivative callbacks taking (edge, t).
class SmoothFunction final : public GraphFunction {
 public:
  using Field = std::function<Complex(int, double)>;
  SmoothFunction(std::shared_ptr<const MetricGraph> graph, Field value,
                 Field derivative, Field laplacian, int quadrature_hint = 48);

  Complex value(int edge, double t) const override;
  Complex derivative(int edge, double t) const override;
  Complex laplacian(int edge, double t) const override;
  int quadrature_hint() const override;

 private:
  Field value_, derivative_, laplacian_;
  int hint_;
};

/// A finite linear combination of functions on the same graph.
class LinearCombination final : public GraphFunction {
 public:
  using Term = std::pair<Complex, std::shared_ptr<const GraphFunction>>;
  LinearCombination(std::shared_ptr<const MetricGraph> graph,
                    std::vector<Term> terms);

  Complex value(int edge, double t) const override;
  Complex derivative(int edge, double t) const override;
  Complex laplacian(int edge, double t) const override;
  int quadrature_hint() const override;

 private:
  std::vector<Term> terms_;
};

/// Write uniform samples of f as CSV with header
/// `edge_id,t,value_re,value_im`.
void sample_csv(std::ostream& out, const GraphFunction& f,
                int samples_per_edge);

}  // namespace kreinlab
