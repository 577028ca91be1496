#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "kreinlab/discrete.hpp"
#include "kreinlab/metric_graph.hpp"
#include "kreinlab/report.hpp"
#include "kreinlab/types.hpp"

namespace kreinlab {

/// Validated model description loaded from a JSON file.  Validation is
/// strict: unknown fields anywhere are rejected, and every error message
/// names the offending field path (e.g. `edges[0].length must be > 0`).
///
/// Schema by `type`:
///   "interval"     — optional `length` (> 0, default 1): one edge, both
///                    endpoints boundary vertices.
///   "metric_graph" — required `edges` (nonempty list of {from, to, length})
///                    and `boundary` (nonempty list of distinct vertex ids).
///   "discrete"     — the metric_graph fields plus required
///                    `discretization`: {n_per_edge >= 1, scheme}.
/// All types accept an optional `quadrature_order` (>= 1): the minimum
/// Gauss-Legendre panel order used for probe-function integrals.
struct ModelConfig {
  std::string type;
  double length = 1.0;  // interval only
  std::vector<Edge> edges;
  std::vector<int> boundary;
  std::optional<int> quadrature_order;
  int n_per_edge = 0;                  // discrete only
  Scheme scheme = Scheme::DecLumped;   // discrete only

  bool is_discrete() const { return type == "discrete"; }
  /// True when the model is one edge with both endpoints on the boundary
  /// (the scope of the first-order calculus).
  bool single_interval() const;

  /// Builds the metric graph this config describes (for "discrete" this is
  /// the graph to be discretized).
  std::shared_ptr<const MetricGraph> graph() const;
  /// Builds the finite-dimensional model; only valid for type "discrete".
  DiscreteModel discrete_model() const;

  /// Quadrature panel order for probe functions (config override or the
  /// library default of 48).
  int probe_quadrature() const;

  /// Canonical echo of the validated config (deterministic field order).
  JsonValue to_json() const;
};

/// Parses and validates config text; `origin` (typically the file name) is
/// prefixed to error messages.  Throws ConfigError on any violation.
ModelConfig parse_config(const std::string& text, const std::string& origin);

/// Reads the file and delegates to parse_config.  Throws ConfigError when
/// the file cannot be read or fails validation.
ModelConfig load_config(const std::string& path);

/// Parses a Robin coupling specification: "identity", "zero", a real scalar
/// (meaning scalar * identity), or an inline JSON matrix with real or
/// [re, im] entries.  The matrix must be dim x dim and Hermitian.
Matrix parse_robin(const std::string& text, int dim);

}  // namespace kreinlab
