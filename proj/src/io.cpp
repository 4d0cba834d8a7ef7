#include "cat0/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "cat0/error.hpp"

namespace cat0::io {
namespace {

const json& field(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ParseError(std::string("missing field '") + key + "'");
  return j.at(key);
}

double as_double(const json& j, const char* what) {
  if (!j.is_number()) throw ParseError(std::string(what) + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) throw ParseError(std::string(what) + ": non-finite number");
  return x;
}

long long as_int(const json& j, const char* what) {
  if (!j.is_number_integer() && !(j.is_number() && j.get<double>() == std::floor(j.get<double>())))
    throw ParseError(std::string(what) + ": expected an integer");
  return j.get<long long>();
}

void check_version(const json& j) {
  if (j.is_object() && j.contains("version") && as_int(j.at("version"), "version") != kFormatVersion)
    throw ParseError("unsupported format version");
}

Eigen::MatrixXd matrix_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw ParseError(std::string(what) + ": matrix must be square");
    for (Eigen::Index k = 0; k < n; ++k) m(i, k) = as_double(row.at(static_cast<std::size_t>(k)), what);
  }
  return m;
}

Eigen::VectorXd vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw ParseError(std::string(what) + ": expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = as_double(j.at(i), what);
  return v;
}

EdgePoint edge_point_from_json(const json& j, const char* vertex_key, const char* edge_key) {
  if (j.contains(vertex_key)) return EdgePoint::at_vertex(static_cast<int>(as_int(j.at(vertex_key), vertex_key)));
  if (j.contains(edge_key))
    return EdgePoint::on_edge(static_cast<int>(as_int(j.at(edge_key), edge_key)), as_double(field(j, "offset"), "offset"));
  throw ParseError(std::string("point needs '") + vertex_key + "' or '" + edge_key + "'");
}

}  // namespace

double round12(double x) {
  if (!std::isfinite(x) || x == 0.0) return x;
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return std::strtod(buf, nullptr);
}

json number(double x) {
  if (!std::isfinite(x)) return nullptr;
  return round12(x);
}

json matrix(const Eigen::MatrixXd& m) {
  json out = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(number(m(i, k)));
    out.push_back(std::move(row));
  }
  return out;
}

json vector(const Eigen::VectorXd& v) {
  json out = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

json parse(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
}

// --- spaces and points ------------------------------------------------------

ModelSpace space_from_json(const json& j) {
  check_version(j);
  const auto& kind = field(j, "kind");
  if (!kind.is_string()) throw ParseError("space kind must be a string");
  const std::string k = kind.get<std::string>();
  if (k == "euclidean") {
    const auto dim = as_int(field(j, "dimension"), "dimension");
    if (dim < 1) throw ParseError("dimension must be positive");
    return EuclideanSpace{static_cast<std::size_t>(dim)};
  }
  if (k == "tree") {
    if (j.contains("star")) {
      std::vector<double> legs;
      for (const auto& x : j.at("star")) legs.push_back(as_double(x, "star leg"));
      return MetricTree::star(legs);
    }
    const auto n = as_int(field(j, "vertices"), "vertices");
    if (n < 1) throw ParseError("tree needs at least one vertex");
    std::vector<MetricGraph::Edge> edges;
    for (const auto& e : field(j, "edges")) {
      if (!e.is_array() || e.size() != 3) throw ParseError("tree edges are [u, v, length]");
      edges.push_back({static_cast<int>(as_int(e[0], "edge")), static_cast<int>(as_int(e[1], "edge")),
                       as_double(e[2], "edge length")});
    }
    return MetricTree(static_cast<std::size_t>(n), std::move(edges));
  }
  if (k == "cone") return EuclideanCone(metric_from_json(field(j, "base")));
  if (k == "product") {
    std::vector<ModelSpace> factors;
    for (const auto& f : field(j, "factors")) factors.push_back(space_from_json(f));
    if (factors.empty()) throw ParseError("product needs at least one factor");
    return ProductSpace(std::move(factors));
  }
  throw ParseError("unknown space kind '" + k + "'");
}

json to_json(const ModelSpace& space) {
  json j{{"version", kFormatVersion}, {"kind", to_string(space.kind())}};
  switch (space.kind()) {
    case SpaceKind::Euclidean:
      j["dimension"] = space.as<EuclideanSpace>().dimension;
      break;
    case SpaceKind::Tree: {
      const auto& g = space.as<MetricTree>().graph();
      j["vertices"] = g.num_vertices();
      j["edges"] = json::array();
      for (const auto& e : g.edges()) j["edges"].push_back({e.u, e.v, number(e.length)});
      break;
    }
    case SpaceKind::Cone:
      j["base"] = to_json(space.as<EuclideanCone>().base());
      break;
    case SpaceKind::Product:
      j["factors"] = json::array();
      for (const auto& f : space.as<ProductSpace>().factors()) j["factors"].push_back(to_json(f));
      break;
  }
  return j;
}

Point point_from_json(const ModelSpace& space, const json& j) {
  Point p;
  switch (space.kind()) {
    case SpaceKind::Euclidean:
      p = Point::euclidean(vector_from_json(j, "euclidean point"));
      break;
    case SpaceKind::Tree:
      if (!j.is_object()) throw ParseError("tree points are objects");
      p = Point(edge_point_from_json(j, "vertex", "edge"));
      break;
    case SpaceKind::Cone: {
      if (!j.is_object()) throw ParseError("cone points are objects");
      if (j.value("origin", false)) {
        p = Point(ConePoint::origin());
        break;
      }
      ConePoint c;
      c.direction = edge_point_from_json(j, "base", "base_edge");
      c.radius = as_double(field(j, "radius"), "radius");
      p = Point(c);
      break;
    }
    case SpaceKind::Product: {
      const auto& factors = space.as<ProductSpace>().factors();
      if (!j.is_array() || j.size() != factors.size()) throw ParseError("product point arity mismatch");
      ProductPoint pp;
      for (std::size_t i = 0; i < factors.size(); ++i) pp.factors.push_back(point_from_json(factors[i], j[i]));
      p = Point(std::move(pp));
      break;
    }
  }
  validate_point(space, p);
  return canonicalize(space, p);
}

json to_json(const ModelSpace& space, const Point& p0) {
  const Point p = canonicalize(space, p0);
  switch (space.kind()) {
    case SpaceKind::Euclidean:
      return vector(p.as<EuclideanPoint>().x);
    case SpaceKind::Tree: {
      const auto& t = p.as<TreePoint>();
      if (t.is_vertex()) return {{"vertex", t.vertex}};
      return {{"edge", t.edge}, {"offset", number(t.offset)}};
    }
    case SpaceKind::Cone: {
      const auto& c = p.as<ConePoint>();
      if (c.is_origin()) return {{"origin", true}};
      if (c.direction.is_vertex()) return {{"base", c.direction.vertex}, {"radius", number(c.radius)}};
      return {{"base_edge", c.direction.edge}, {"offset", number(c.direction.offset)}, {"radius", number(c.radius)}};
    }
    case SpaceKind::Product: {
      json out = json::array();
      const auto& factors = space.as<ProductSpace>().factors();
      const auto& pp = p.as<ProductPoint>();
      for (std::size_t i = 0; i < factors.size(); ++i) out.push_back(to_json(factors[i], pp.factors[i]));
      return out;
    }
  }
  return nullptr;
}

Measure measure_from_json(const json& j) {
  check_version(j);
  Measure mu{space_from_json(field(j, "space")), {}, {}};
  for (const auto& p : field(j, "support")) mu.support.push_back(point_from_json(mu.space, p));
  if (mu.support.empty()) throw ParseError("measure support is empty");
  if (j.contains("weights")) {
    for (const auto& w : j.at("weights")) mu.weights.push_back(as_double(w, "weight"));
  } else {
    mu.weights.assign(mu.support.size(), 1.0 / static_cast<double>(mu.support.size()));
  }
  if (mu.weights.size() != mu.support.size()) throw ParseError("weights and support differ in length");
  mu.validate();
  return mu;
}

json to_json(const Measure& mu) {
  json j{{"version", kFormatVersion}, {"space", to_json(mu.space)}, {"support", json::array()}, {"weights", json::array()}};
  for (std::size_t i = 0; i < mu.size(); ++i) {
    j["support"].push_back(to_json(mu.space, mu.support[i]));
    j["weights"].push_back(number(mu.weights[i]));
  }
  return j;
}

// --- metric spaces, graphs, profiles ---------------------------------------------

FiniteMetricSpace metric_from_json(const json& j) {
  check_version(j);
  if (j.contains("distances")) return FiniteMetricSpace(matrix_from_json(j.at("distances"), "distances"));
  if (j.contains("graph")) {
    const LabeledGraph g = graph_from_json(j.at("graph"));
    const double len = j.contains("edge_length") ? as_double(j.at("edge_length"), "edge_length") : 1.0;
    return FiniteMetricSpace::graph_metric(g.num_vertices(), g.edges(), len);
  }
  if (j.contains("uniform")) {
    const auto& u = j.at("uniform");
    return FiniteMetricSpace::uniform(static_cast<std::size_t>(as_int(field(u, "points"), "points")),
                                      as_double(field(u, "distance"), "distance"));
  }
  throw ParseError("metric space needs 'distances', 'graph' or 'uniform'");
}

json to_json(const FiniteMetricSpace& X) { return {{"version", kFormatVersion}, {"distances", matrix(X.matrix())}}; }

LabeledGraph graph_from_json(const json& j) {
  check_version(j);
  if (j.contains("named")) {
    const std::string name = j.at("named").get<std::string>();
    const auto colon = name.find(':');
    const std::string base = name.substr(0, colon);
    long long arg = 0;
    if (colon != std::string::npos) {
      try {
        arg = std::stoll(name.substr(colon + 1));
      } catch (const std::exception&) {
        throw ParseError("bad graph name '" + name + "'");
      }
    }
    if (base == "heawood") return LabeledGraph::heawood();
    if (base == "petersen") return LabeledGraph::petersen();
    if (arg <= 0) throw ParseError("graph name '" + name + "' needs a positive size");
    const auto n = static_cast<std::size_t>(arg);
    if (base == "complete") return LabeledGraph::complete(n);
    if (base == "cycle") return LabeledGraph::cycle(n);
    if (base == "path") return LabeledGraph::path(n);
    if (base == "star") return LabeledGraph::star(n);
    if (base == "hypercube") return LabeledGraph::hypercube(static_cast<int>(arg));
    throw ParseError("unknown graph name '" + name + "'");
  }
  const auto n = as_int(field(j, "vertices"), "vertices");
  if (n < 0) throw ParseError("vertex count must be nonnegative");
  std::vector<LabeledGraph::Edge> edges;
  for (const auto& e : field(j, "edges")) {
    if (!e.is_array() || e.size() != 2) throw ParseError("graph edges are [u, v]");
    edges.emplace_back(static_cast<int>(as_int(e[0], "edge")), static_cast<int>(as_int(e[1], "edge")));
  }
  LabeledGraph g(static_cast<std::size_t>(n), std::move(edges));
  if (j.contains("labels")) {
    std::vector<int> labels;
    for (const auto& l : j.at("labels")) {
      if (l.is_string()) {
        const Word w = parse_word(l.get<std::string>());
        if (w.size() != 1) throw ParseError("each edge label is a single generator");
        labels.push_back(w[0]);
      } else {
        labels.push_back(static_cast<int>(as_int(l, "label")));
      }
    }
    const int k = j.contains("generators") ? static_cast<int>(as_int(j.at("generators"), "generators")) : [&] {
      int m = 1;
      for (int l : labels) m = std::max(m, std::abs(l));
      return m;
    }();
    g.set_labels(k, std::move(labels));
  }
  return g;
}

json to_json(const LabeledGraph& g) {
  json j{{"version", kFormatVersion}, {"vertices", g.num_vertices()}, {"edges", json::array()}};
  for (const auto& [u, v] : g.edges()) j["edges"].push_back({u, v});
  j["oriented"] = g.oriented();
  if (!g.labels().empty()) {
    j["generators"] = g.num_generators();
    j["labels"] = json::array();
    for (int l : g.labels()) j["labels"].push_back(to_string(Word{l}));
  }
  return j;
}

LabeledGraph graph_from_edge_list(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::vector<LabeledGraph::Edge> edges;
  long long declared = -1;
  int max_vertex = -1;
  bool first = true;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    std::vector<long long> nums;
    std::string tok;
    while (ls >> tok) {
      try {
        std::size_t used = 0;
        nums.push_back(std::stoll(tok, &used));
        if (used != tok.size()) throw std::invalid_argument(tok);
      } catch (const std::exception&) {
        throw ParseError("edge list line " + std::to_string(lineno) + ": bad token '" + tok + "'");
      }
    }
    if (nums.empty()) continue;
    if (first && nums.size() == 1) {
      declared = nums[0];
      first = false;
      continue;
    }
    first = false;
    if (nums.size() != 2 || nums[0] < 0 || nums[1] < 0)
      throw ParseError("edge list line " + std::to_string(lineno) + ": expected 'u v'");
    edges.emplace_back(static_cast<int>(nums[0]), static_cast<int>(nums[1]));
    max_vertex = std::max({max_vertex, static_cast<int>(nums[0]), static_cast<int>(nums[1])});
  }
  const std::size_t n = declared >= 0 ? static_cast<std::size_t>(declared) : static_cast<std::size_t>(max_vertex + 1);
  return LabeledGraph(n, std::move(edges));
}

LabeledGraph graph_from_text(const std::string& text) {
  const auto pos = text.find_first_not_of(" \t\r\n");
  if (pos != std::string::npos && text[pos] == '{') return graph_from_json(parse(text));
  return graph_from_edge_list(text);
}

DistanceProfile profile_from_json(const json& j) {
  check_version(j);
  DistanceProfile p{matrix_from_json(field(j, "pairwise"), "pairwise"), vector_from_json(field(j, "radial"), "radial")};
  p.validate();
  return p;
}

json to_json(const DistanceProfile& p) {
  return {{"version", kFormatVersion}, {"pairwise", matrix(p.pairwise)}, {"radial", vector(p.radial)}};
}

FixedPointThresholds thresholds_from_json(const json& j) {
  if (!j.is_object()) throw ParseError("thresholds must be a JSON object");
  FixedPointThresholds t;
  if (j.contains("min_girth")) t.min_girth = static_cast<int>(as_int(j.at("min_girth"), "min_girth"));
  if (j.contains("min_lambda")) t.min_lambda = as_double(j.at("min_lambda"), "min_lambda");
  if (j.contains("min_degree")) t.min_degree = static_cast<int>(as_int(j.at("min_degree"), "min_degree"));
  if (j.contains("max_degree")) t.max_degree = static_cast<int>(as_int(j.at("max_degree"), "max_degree"));
  if (j.contains("delta_constant")) t.delta_constant = as_double(j.at("delta_constant"), "delta_constant");
  return t;
}

PropertyPTriple triple_from_json(const json& j) {
  PropertyPTriple t{as_double(field(j, "theta"), "theta"), as_double(field(j, "alpha"), "alpha"),
                    as_double(field(j, "epsilon"), "epsilon"), ""};
  t.validate();
  return t;
}

json to_json(const PropertyPTriple& t) {
  json j{{"theta", number(t.theta)}, {"alpha", number(t.alpha)}, {"epsilon", number(t.epsilon)}};
  if (!t.note.empty()) j["note"] = t.note;
  return j;
}

}  // namespace cat0::io
