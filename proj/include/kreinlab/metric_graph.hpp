#pragma once

#include <memory>
#include <vector>

namespace kreinlab {

/// One edge of a metric graph, parametrized by arclength t in [0, length]
/// running from `tail` (t = 0) to `head` (t = length).
struct Edge {
  int tail = 0;
  int head = 0;
  double length = 1.0;
};

/// How an edge meets a vertex: the edge id and which end sits at the vertex.
struct Incidence {
  int edge = 0;
  bool at_head = false;
};

/// A finite connected metric graph with a distinguished nonempty list of
/// boundary vertices.  The boundary order fixed here is the coordinate order
/// of all boundary-data vectors and matrices elsewhere in the library.
class MetricGraph {
 public:
  MetricGraph(int vertex_count, std::vector<Edge> edges,
              std::vector<int> boundary);

  int vertex_count() const { return vertex_count_; }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  const Edge& edge(int e) const { return edges_.at(e); }
  const std::vector<Edge>& edges() const { return edges_; }

  const std::vector<int>& boundary() const { return boundary_; }
  int boundary_dim() const { return static_cast<int>(boundary_.size()); }
  bool is_boundary(int v) const { return boundary_index(v) >= 0; }
  /// Position of v in the boundary order, or -1 for interior vertices.
  int boundary_index(int v) const { return boundary_index_.at(v); }

  const std::vector<Incidence>& incidences(int v) const {
    return incident_.at(v);
  }
  int degree(int v) const { return static_cast<int>(incident_.at(v).size()); }
  double total_length() const;

  /// Single edge of the given length; both endpoints are boundary vertices,
  /// ordered (left, right).
  static std::shared_ptr<const MetricGraph> interval(double length = 1.0);
  /// Star with `leaves` edges of equal length from a central vertex; the
  /// boundary is the list of leaves, the center is interior.
  static std::shared_ptr<const MetricGraph> star(int leaves,
                                                 double edge_length = 1.0);

 private:
  int vertex_count_;
  std::vector<Edge> edges_;
  std::vector<int> boundary_;
  std::vector<int> boundary_index_;
  std::vector<std::vector<Incidence>> incident_;
};

}  // namespace kreinlab
