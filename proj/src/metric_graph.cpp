#include "kreinlab/metric_graph.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "kreinlab/errors.hpp"

namespace kreinlab {

namespace {

int find_root(std::vector<int>& parent, int v) {
  while (parent[v] != v) {
    parent[v] = parent[parent[v]];
    v = parent[v];
  }
  return v;
}

}  // namespace

MetricGraph::MetricGraph(int vertex_count, std::vector<Edge> edges,
                         std::vector<int> boundary)
    : vertex_count_(vertex_count),
      edges_(std::move(edges)),
      boundary_(std::move(boundary)) {
  if (vertex_count_ < 2)
    throw ConfigError("metric graph needs at least two vertices");
  if (edges_.empty()) throw ConfigError("metric graph needs at least one edge");
  incident_.assign(vertex_count_, {});
  for (size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    if (edge.tail < 0 || edge.tail >= vertex_count_ || edge.head < 0 ||
        edge.head >= vertex_count_)
      throw ConfigError("edge " + std::to_string(e) +
                        ": endpoint out of range");
    if (edge.tail == edge.head)
      throw ConfigError("edge " + std::to_string(e) +
                        ": self-loops are not supported");
    if (!(edge.length > 0.0) || !std::isfinite(edge.length))
      throw ConfigError("edge " + std::to_string(e) +
                        ": length must be positive and finite");
    incident_[edge.tail].push_back({static_cast<int>(e), false});
    incident_[edge.head].push_back({static_cast<int>(e), true});
  }
  if (boundary_.empty())
    throw ConfigError("metric graph needs a nonempty boundary");
  boundary_index_.assign(vertex_count_, -1);
  for (size_t i = 0; i < boundary_.size(); ++i) {
    const int v = boundary_[i];
    if (v < 0 || v >= vertex_count_)
      throw ConfigError("boundary vertex " + std::to_string(v) +
                        " out of range");
    if (boundary_index_[v] >= 0)
      throw ConfigError("boundary vertex " + std::to_string(v) +
                        " listed twice");
    boundary_index_[v] = static_cast<int>(i);
  }
  for (int v = 0; v < vertex_count_; ++v)
    if (incident_[v].empty())
      throw ConfigError("vertex " + std::to_string(v) + " is isolated");

  std::vector<int> parent(vertex_count_);
  std::iota(parent.begin(), parent.end(), 0);
  for (const Edge& edge : edges_) {
    const int a = find_root(parent, edge.tail);
    const int b = find_root(parent, edge.head);
    parent[a] = b;
  }
  const int root = find_root(parent, 0);
  for (int v = 1; v < vertex_count_; ++v)
    if (find_root(parent, v) != root)
      throw ConfigError("metric graph must be connected");
}

double MetricGraph::total_length() const {
  double sum = 0.0;
  for (const Edge& e : edges_) sum += e.length;
  return sum;
}

std::shared_ptr<const MetricGraph> MetricGraph::interval(double length) {
  return std::make_shared<const MetricGraph>(
      2, std::vector<Edge>{{0, 1, length}}, std::vector<int>{0, 1});
}

std::shared_ptr<const MetricGraph> MetricGraph::star(int leaves,
                                                     double edge_length) {
  if (leaves < 1) throw ConfigError("star graph needs at least one leaf");
  std::vector<Edge> edges;
  std::vector<int> boundary;
  for (int i = 1; i <= leaves; ++i) {
    edges.push_back({0, i, edge_length});
    boundary.push_back(i);
  }
  return std::make_shared<const MetricGraph>(leaves + 1, std::move(edges),
                                             std::move(boundary));
}

}  // namespace kreinlab
