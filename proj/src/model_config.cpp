#include "kreinlab/model_config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "kreinlab/errors.hpp"

namespace kreinlab {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& msg) {
  throw ConfigError(origin.empty() ? msg : origin + ": " + msg);
}

void reject_unknown_fields(const std::string& origin, const json& obj,
                           const std::string& prefix,
                           const std::set<std::string>& allowed) {
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key()))
      fail(origin, prefix + "unknown field \"" + item.key() + "\"");
  }
}

long long require_integer(const std::string& origin, const json& value,
                          const std::string& path) {
  if (!value.is_number_integer())
    fail(origin, path + " must be an integer");
  return value.get<long long>();
}

double require_number(const std::string& origin, const json& value,
                      const std::string& path) {
  if (!value.is_number()) fail(origin, path + " must be a number");
  return value.get<double>();
}

std::vector<Edge> parse_edges(const std::string& origin, const json& value) {
  if (!value.is_array() || value.empty())
    fail(origin, "edges must be a nonempty array");
  std::vector<Edge> edges;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const std::string path = "edges[" + std::to_string(i) + "]";
    const json& item = value[i];
    if (!item.is_object()) fail(origin, path + " must be an object");
    reject_unknown_fields(origin, item, path + ": ",
                          {"from", "to", "length"});
    for (const char* key : {"from", "to", "length"})
      if (!item.contains(key))
        fail(origin, path + " is missing field \"" + std::string(key) + "\"");
    Edge e;
    const long long from = require_integer(origin, item["from"],
                                           path + ".from");
    const long long to = require_integer(origin, item["to"], path + ".to");
    if (from < 0) fail(origin, path + ".from must be a non-negative integer");
    if (to < 0) fail(origin, path + ".to must be a non-negative integer");
    e.tail = static_cast<int>(from);
    e.head = static_cast<int>(to);
    e.length = require_number(origin, item["length"], path + ".length");
    if (!(e.length > 0.0) || !std::isfinite(e.length))
      fail(origin, path + ".length must be > 0");
    edges.push_back(e);
  }
  return edges;
}

std::vector<int> parse_boundary(const std::string& origin, const json& value,
                                int vertex_count) {
  if (!value.is_array() || value.empty())
    fail(origin, "boundary must be a nonempty array of vertex ids");
  std::vector<int> boundary;
  std::set<long long> seen;
  for (std::size_t i = 0; i < value.size(); ++i) {
    const std::string path = "boundary[" + std::to_string(i) + "]";
    const long long v = require_integer(origin, value[i], path);
    if (v < 0 || v >= vertex_count)
      fail(origin, path + " must be an existing vertex id");
    if (!seen.insert(v).second)
      fail(origin, path + " duplicates vertex " + std::to_string(v));
    boundary.push_back(static_cast<int>(v));
  }
  return boundary;
}

int max_vertex_id(const std::vector<Edge>& edges) {
  int hi = -1;
  for (const auto& e : edges) hi = std::max({hi, e.tail, e.head});
  return hi;
}

std::string trimmed(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

Complex robin_entry(const json& cell, int i, int j) {
  if (cell.is_number()) return Complex(cell.get<double>(), 0.0);
  if (cell.is_array() && cell.size() == 2 && cell[0].is_number() &&
      cell[1].is_number())
    return Complex(cell[0].get<double>(), cell[1].get<double>());
  throw ConfigError("robin matrix entry (" + std::to_string(i) + "," +
                    std::to_string(j) +
                    ") must be a number or an [re, im] pair");
}

}  // namespace

bool ModelConfig::single_interval() const {
  if (type == "interval") return true;
  return edges.size() == 1 && boundary.size() == 2;
}

std::shared_ptr<const MetricGraph> ModelConfig::graph() const {
  if (type == "interval") return MetricGraph::interval(length);
  const int vertex_count = max_vertex_id(edges) + 1;
  return std::make_shared<const MetricGraph>(vertex_count, edges, boundary);
}

DiscreteModel ModelConfig::discrete_model() const {
  if (!is_discrete())
    throw ConfigError("discrete_model requires a config of type \"discrete\"");
  return discretize(*graph(), n_per_edge, scheme);
}

int ModelConfig::probe_quadrature() const {
  return std::max(48, quadrature_order.value_or(0));
}

JsonValue ModelConfig::to_json() const {
  JsonValue out = JsonValue::object();
  out.set("type", JsonValue::string(type));
  if (type == "interval") {
    out.set("length", JsonValue::number(length));
  } else {
    JsonValue edge_list = JsonValue::array();
    for (const auto& e : edges) {
      JsonValue item = JsonValue::object();
      item.set("from", JsonValue::integer(e.tail));
      item.set("to", JsonValue::integer(e.head));
      item.set("length", JsonValue::number(e.length));
      edge_list.push(std::move(item));
    }
    out.set("edges", std::move(edge_list));
    JsonValue boundary_list = JsonValue::array();
    for (const int v : boundary) boundary_list.push(JsonValue::integer(v));
    out.set("boundary", std::move(boundary_list));
  }
  if (quadrature_order)
    out.set("quadrature_order", JsonValue::integer(*quadrature_order));
  if (is_discrete()) {
    JsonValue d = JsonValue::object();
    d.set("n_per_edge", JsonValue::integer(n_per_edge));
    d.set("scheme", JsonValue::string(scheme_name(scheme)));
    out.set("discretization", std::move(d));
  }
  return out;
}

ModelConfig parse_config(const std::string& text, const std::string& origin) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    fail(origin, std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object())
    fail(origin, "top-level config must be a JSON object");
  if (!doc.contains("type")) fail(origin, "missing required field \"type\"");
  if (!doc["type"].is_string()) fail(origin, "type must be a string");

  ModelConfig cfg;
  cfg.type = doc["type"].get<std::string>();
  if (cfg.type != "interval" && cfg.type != "metric_graph" &&
      cfg.type != "discrete")
    fail(origin, "type must be one of \"interval\", \"metric_graph\", "
                 "\"discrete\" (got \"" + cfg.type + "\")");

  std::set<std::string> allowed = {"type", "quadrature_order"};
  if (cfg.type == "interval") {
    allowed.insert("length");
  } else {
    allowed.insert("edges");
    allowed.insert("boundary");
    if (cfg.type == "discrete") allowed.insert("discretization");
  }
  reject_unknown_fields(origin, doc, "", allowed);

  if (doc.contains("quadrature_order")) {
    const long long q = require_integer(origin, doc["quadrature_order"],
                                        "quadrature_order");
    if (q < 1) fail(origin, "quadrature_order must be a positive integer");
    cfg.quadrature_order = static_cast<int>(q);
  }

  if (cfg.type == "interval") {
    if (doc.contains("length")) {
      cfg.length = require_number(origin, doc["length"], "length");
      if (!(cfg.length > 0.0) || !std::isfinite(cfg.length))
        fail(origin, "length must be > 0");
    }
    return cfg;
  }

  for (const char* key : {"edges", "boundary"})
    if (!doc.contains(key))
      fail(origin, "missing required field \"" + std::string(key) + "\"");
  cfg.edges = parse_edges(origin, doc["edges"]);
  cfg.boundary =
      parse_boundary(origin, doc["boundary"], max_vertex_id(cfg.edges) + 1);

  if (cfg.type == "discrete") {
    if (!doc.contains("discretization"))
      fail(origin, "missing required field \"discretization\"");
    const json& d = doc["discretization"];
    if (!d.is_object()) fail(origin, "discretization must be an object");
    reject_unknown_fields(origin, d, "discretization: ",
                          {"n_per_edge", "scheme"});
    for (const char* key : {"n_per_edge", "scheme"})
      if (!d.contains(key))
        fail(origin, "discretization is missing field \"" +
                         std::string(key) + "\"");
    const long long n = require_integer(origin, d["n_per_edge"],
                                        "discretization.n_per_edge");
    if (n < 1)
      fail(origin, "discretization.n_per_edge must be a positive integer");
    cfg.n_per_edge = static_cast<int>(n);
    if (!d["scheme"].is_string())
      fail(origin, "discretization.scheme must be a string");
    try {
      cfg.scheme = parse_scheme(d["scheme"].get<std::string>());
    } catch (const ConfigError& e) {
      fail(origin, std::string("discretization.scheme: ") + e.what());
    }
  }

  // Structural validation (connectivity, boundary placement) happens in the
  // MetricGraph constructor; surface its message under this file's origin.
  try {
    cfg.graph();
  } catch (const ConfigError& e) {
    fail(origin, e.what());
  }
  return cfg;
}

ModelConfig load_config(const std::string& path) {
  std::ifstream stream(path, std::ios::binary);
  if (!stream.is_open()) throw ConfigError("cannot read config file: " + path);
  std::ostringstream buffer;
  buffer << stream.rdbuf();
  std::string origin = path;
  const std::size_t slash = origin.find_last_of('/');
  if (slash != std::string::npos) origin = origin.substr(slash + 1);
  return parse_config(buffer.str(), origin);
}

Matrix parse_robin(const std::string& text, int dim) {
  const std::string arg = trimmed(text);
  if (arg.empty())
    throw ConfigError("robin: expected \"identity\", \"zero\", a real "
                      "scalar, or a JSON matrix");
  if (arg == "identity") return Matrix::Identity(dim, dim);
  if (arg == "zero") return Matrix::Zero(dim, dim);

  {
    char* end = nullptr;
    const double scalar = std::strtod(arg.c_str(), &end);
    if (end && *end == '\0' && std::isfinite(scalar))
      return scalar * Matrix::Identity(dim, dim);
  }

  json doc;
  try {
    doc = json::parse(arg);
  } catch (const json::parse_error&) {
    throw ConfigError("robin: expected \"identity\", \"zero\", a real "
                      "scalar, or a JSON matrix (got \"" + arg + "\")");
  }
  if (!doc.is_array() || doc.empty())
    throw ConfigError("robin matrix must be a nonempty array of rows");
  if (static_cast<int>(doc.size()) != dim)
    throw ConfigError("robin matrix must be " + std::to_string(dim) + "x" +
                      std::to_string(dim) + " to match the boundary (got " +
                      std::to_string(doc.size()) + " rows)");
  Matrix b(dim, dim);
  for (int i = 0; i < dim; ++i) {
    const json& row = doc[i];
    if (!row.is_array() || static_cast<int>(row.size()) != dim)
      throw ConfigError("robin matrix row " + std::to_string(i) + " must have " +
                        std::to_string(dim) + " entries");
    for (int j = 0; j < dim; ++j) b(i, j) = robin_entry(row[j], i, j);
  }
  if ((b - b.adjoint()).norm() > 1e-10 * (1.0 + b.norm()))
    throw ConfigError("robin matrix must be Hermitian");
  return b;
}

}  // namespace kreinlab
