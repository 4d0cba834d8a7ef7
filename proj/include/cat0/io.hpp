#pragma once

// JSON and text formats for spaces, points, measures, metric spaces, graphs
// and distance profiles. Every document carries "version": 1.

#include <string>

#include <json.hpp>

#include "cat0/barycenter.hpp"
#include "cat0/graph.hpp"
#include "cat0/invariant.hpp"
#include "cat0/metric.hpp"
#include "cat0/randomgroups.hpp"
#include "cat0/regularity.hpp"
#include "cat0/spaces.hpp"

namespace cat0::io {

using json = nlohmann::json;

constexpr int kFormatVersion = 1;

/// Rounds to 12 significant digits, the precision of every serialized number.
double round12(double x);
json number(double x);
json matrix(const Eigen::MatrixXd& m);
json vector(const Eigen::VectorXd& v);

/// Parses text, mapping syntax errors to ParseError.
json parse(const std::string& text);

ModelSpace space_from_json(const json& j);
json to_json(const ModelSpace& space);

Point point_from_json(const ModelSpace& space, const json& j);
json to_json(const ModelSpace& space, const Point& p);

/// {"space": ..., "support": [...], "weights": [...]}; weights default to uniform.
Measure measure_from_json(const json& j);
json to_json(const Measure& mu);

/// {"distances": [[...]]} or {"graph": ..., "edge_length": L}.
FiniteMetricSpace metric_from_json(const json& j);
json to_json(const FiniteMetricSpace& X);

/// {"vertices": n, "edges": [[u, v], ...]} with optional "generators"/"labels",
/// or {"named": "heawood" | "petersen" | "complete:n" | "cycle:n" | "path:n" | "star:k" | "hypercube:d"}.
LabeledGraph graph_from_json(const json& j);
json to_json(const LabeledGraph& g);
/// One "u v" pair per line, 0-indexed; '#' starts a comment. A first line with
/// a single integer fixes the vertex count.
LabeledGraph graph_from_edge_list(const std::string& text);
/// Chooses JSON or edge-list by the first non-blank character.
LabeledGraph graph_from_text(const std::string& text);

/// {"pairwise": [[...]], "radial": [...]}.
DistanceProfile profile_from_json(const json& j);
json to_json(const DistanceProfile& p);

FixedPointThresholds thresholds_from_json(const json& j);
PropertyPTriple triple_from_json(const json& j);
json to_json(const PropertyPTriple& t);

}  // namespace cat0::io
