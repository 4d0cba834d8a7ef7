#include "cat0/commands.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <numbers>
#include <sstream>

#include "cat0/barycenter.hpp"
#include "cat0/error.hpp"
#include "cat0/invariant.hpp"
#include "cat0/io.hpp"
#include "cat0/randomgroups.hpp"
#include "cat0/regularity.hpp"
#include "cat0/spectral.hpp"

namespace cat0 {
namespace {

using json = nlohmann::json;
using io::number;

struct Context {
  const json& req;
  std::uint64_t seed = 0;
  double tol = 0.0;

  bool has(const char* key) const { return req.contains(key) && !req.at(key).is_null(); }
  const json& at(const char* key) const {
    if (!has(key)) throw ParseError(std::string("request is missing '") + key + "'");
    return req.at(key);
  }
  double real(const char* key, double fallback) const { return has(key) ? req.at(key).get<double>() : fallback; }
  long long integer(const char* key, long long fallback) const {
    return has(key) ? req.at(key).get<long long>() : fallback;
  }
};

struct Command {
  const char* citation;
  double default_tol;
  std::function<json(Context&)> run;
};

LabeledGraph graph_of(const json& j) {
  if (j.is_string()) return io::graph_from_edge_list(j.get<std::string>());
  return io::graph_from_json(j);
}

json certification(const CertificationReport& r, double tol) {
  return {{"passed", r.passed},
          {"probes", r.probes},
          {"worst_variance_gap", number(r.worst_variance_gap)},
          {"worst_directional_derivative", number(r.worst_directional)},
          {"tolerance", tol},
          {"detail", r.detail}};
}

json delta_command(Context& c) {
  DistanceProfile profile;
  std::vector<double> weights;
  json out;
  if (c.has("measure")) {
    const Measure mu = io::measure_from_json(c.at("measure"));
    BarycenterOptions bo;
    bo.seed = c.seed;
    profile = distance_profile(mu, bo);
    weights = mu.weights;
    out["barycenter"] = io::to_json(mu.space, barycenter(mu, bo));
  } else {
    profile = io::profile_from_json(c.at("profile"));
    for (const auto& w : c.at("weights")) weights.push_back(w.get<double>());
  }
  SdpOptions so;
  so.gap_tol = c.tol;
  so.max_iter = static_cast<int>(c.integer("max_iter", so.max_iter));
  so.seed = c.seed;
  const DeltaResult r = delta_sdp(profile, weights, so);
  MultistartOptions mo;
  mo.num_starts = static_cast<int>(c.integer("restarts", mo.num_starts));
  mo.seed = c.seed;
  const MultistartResult ms = delta_multistart(profile, weights, mo);
  const auto& d = r.diagnostics;
  // A certified bracket inside [0, tol] is reported as zero.
  const bool zero = d.certificate == "duality-gap" && r.value <= c.tol;
  out["value"] = number(zero ? 0.0 : r.value);
  out["upper_bound"] = number(r.value);
  out["tolerance"] = c.tol;
  out["lower_bound"] = number(d.lower_bound);
  out["duality_gap"] = number(d.gap);
  out["certificate"] = d.certificate;
  out["gram"] = io::matrix(r.gram);
  out["profile"] = io::to_json(profile);
  out["diagnostics"] = {{"iterations", d.iterations},
                        {"primal_residual", number(d.primal_residual)},
                        {"dual_residual", number(d.dual_residual)},
                        {"repair_shift", number(d.repair_shift)},
                        {"gram_min_eigenvalue", number(d.gram_min_eigenvalue)},
                        {"max_norm_residual", number(d.max_norm_residual)},
                        {"max_lipschitz_residual", number(d.max_lipschitz_residual)},
                        {"clusters", d.clusters},
                        {"constraints", d.constraints}};
  out["multistart"] = {{"value", number(ms.value)},
                       {"starts", mo.num_starts},
                       {"agrees", std::abs(ms.value - r.value) <= 1e-4},
                       {"tolerance", 1e-4}};
  return out;
}

json barycenter_command(Context& c) {
  const Measure mu = io::measure_from_json(c.at("measure"));
  BarycenterOptions bo;
  bo.tol = c.tol;
  bo.seed = c.seed;
  bo.num_probes = static_cast<int>(c.integer("probes", bo.num_probes));
  bo.certify = false;
  const Point bar = barycenter(mu, bo);
  const CertificationReport rep = certify_barycenter(mu, bar, bo.tol, bo.num_probes, bo.seed);
  if (!rep.passed) throw UncertifiedBarycenter(bar, rep);
  return {{"point", io::to_json(mu.space, bar)},
          {"objective", number(frechet_objective(mu, bar))},
          {"certification", certification(rep, bo.tol)}};
}

json lambda1_command(Context& c) {
  const LabeledGraph g = graph_of(c.at("graph"));
  const SpectralGap s = laplacian_spectrum(g);
  return {{"lambda1", number(s.lambda1)},
          {"variational_quotient", number(s.variational_quotient)},
          {"method", s.iterative ? "lanczos" : "dense"},
          {"vertices", g.num_vertices()},
          {"edges", g.num_edges()},
          {"tolerance", c.tol}};
}

WangOptions wang_options(const Context& c) {
  WangOptions wo;
  wo.restarts = static_cast<int>(c.integer("restarts", wo.restarts));
  wo.max_sweeps = static_cast<int>(c.integer("max_iter", wo.max_sweeps));
  wo.seed = c.seed;
  return wo;
}

json wang_command(Context& c) {
  const LabeledGraph g = graph_of(c.at("graph"));
  const ModelSpace space = io::space_from_json(c.at("space"));
  const WangResult w = wang_lambda1(g, space, wang_options(c));
  const double l1 = laplacian_lambda1(g);
  json out{{"upper_estimate", number(w.estimate)}, {"lambda1", number(l1)}, {"tolerance", c.tol}};
  out["restart_values"] = json::array();
  for (double v : w.restart_values) out["restart_values"].push_back(number(v));
  out["witness"] = json::array();
  for (const auto& p : w.witness) out["witness"].push_back(io::to_json(space, p));
  if (c.has("delta_upper")) {
    const double db = c.real("delta_upper", 1.0);
    out["bracket"] = {number((1.0 - db) * l1), number(w.estimate)};
    out["delta_upper"] = db;
  } else {
    out["bracket"] = {nullptr, number(w.estimate)};
  }
  return out;
}

json sandwich_command(Context& c) {
  const LabeledGraph g = graph_of(c.at("graph"));
  const ModelSpace space = io::space_from_json(c.at("space"));
  const double db = c.at("delta_upper").get<double>();
  const SandwichReport r = sandwich_check(g, space, db, wang_options(c), c.tol);
  return {{"lambda1", number(r.lambda1)},
          {"wang_estimate", number(r.wang)},
          {"delta_upper", db},
          {"lower", number(r.lower)},
          {"lower_margin", number(r.lower_margin)},
          {"upper_margin", number(r.upper_margin)},
          {"passed", r.passed},
          {"tolerance", c.tol},
          {"hypotheses", {"(1 - delta_upper) lambda1 <= wang estimate", "wang estimate <= lambda1"}}};
}

json p_report(const PropertyPReport& r) {
  json failures = json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(r.failures.size(), 20); ++i)
    failures.push_back({{"x", r.failures[i].x}, {"y", r.failures[i].y}, {"separating", r.failures[i].separating}});
  return {{"passed", r.passed},
          {"pairs_checked", r.pairs_checked},
          {"required_separators", r.required},
          {"failure_count", r.failures.size()},
          {"failures", failures}};
}

json property_p_command(Context& c) {
  const FiniteMetricSpace X = io::metric_from_json(c.at("metric"));
  json out;
  std::vector<std::size_t> S;
  PropertyPTriple triple;
  if (c.has("witness")) {
    for (const auto& s : c.at("witness")) S.push_back(s.get<std::size_t>());
    triple = io::triple_from_json(c.at("triple"));
    out["witness_source"] = "supplied";
  } else {
    const PropertyPWitness w = property_p_witness_from_net(X);
    S = w.net;
    triple = c.has("triple") ? io::triple_from_json(c.at("triple")) : w.triple;
    out["witness_source"] = "pi/12 net";
    out["cover_number"] = w.cover_number;
  }
  out["witness"] = S;
  out["triple"] = io::to_json(triple);
  out["check"] = p_report(check_property_p(X, S, triple));
  out["tolerance"] = c.tol;
  out["delta_bound"] =
      "property P yields a constant C(theta, alpha, epsilon) < 1 bounding delta; no formula for C is available, so "
      "no numeric bound is reported";
  return out;
}

json doubling_command(Context& c) {
  const FiniteMetricSpace X = io::metric_from_json(c.at("metric"));
  const int exponent = static_cast<int>(c.integer("exponent", 2));
  const DoublingResult d = doubling_constant(X);
  const PropertyPTriple t = doubling_p_triple(static_cast<int>(d.constant), exponent);
  const PropertyPWitness net = property_p_witness_from_net(X);
  return {{"constant", d.constant},
          {"exact", d.exact},
          {"worst_center", d.center},
          {"worst_radius", number(d.radius)},
          {"exponent", exponent},
          {"triple", io::to_json(t)},
          {"net_check", {{"witness", net.net}, {"check", p_report(check_property_p(X, net.net, t))}}},
          {"tolerance", c.tol}};
}

json covering_command(Context& c) {
  const FiniteMetricSpace X = io::metric_from_json(c.at("metric"));
  const CoverResult r = covering_number(X, c.at("radius").get<double>());
  return {{"count", r.count}, {"centers", r.centers}, {"exact", r.exact}, {"radius", c.at("radius")}};
}

json random_group_command(Context& c) {
  const LabeledGraph g = graph_of(c.at("graph"));
  const int k = static_cast<int>(c.at("generators").get<long long>());
  if (!c.has("thresholds")) throw ParseError("missing threshold configuration (--thresholds)");
  const json& thj = c.at("thresholds");
  const FixedPointThresholds th = io::thresholds_from_json(thj);
  double delta_upper = 0.0;
  if (c.has("delta_upper"))
    delta_upper = c.at("delta_upper").get<double>();
  else if (thj.contains("delta_upper"))
    delta_upper = thj.at("delta_upper").get<double>();
  else
    throw ParseError("missing threshold configuration: delta_upper");

  const LabeledGraph lg = sample_labels(g, k, c.seed);
  const auto gi = girth(g);
  const int cap = static_cast<int>(c.integer("max_cycle_length", gi ? *gi : 0));
  const CycleWords cw = cycle_words(lg, cap);
  const FixedPointReport fp = fixed_point_report(g, delta_upper, th);

  json relators = json::array();
  for (const auto& w : cw.words) relators.push_back(to_string(w));
  json hyps = json::array();
  for (const auto& h : fp.hypotheses) hyps.push_back({{"name", h.name}, {"satisfied", h.satisfied}, {"detail", h.detail}});
  return {{"labeled_graph", io::to_json(lg)},
          {"girth", gi ? json(*gi) : json("infinite")},
          {"max_cycle_length", cap},
          {"relators", relators},
          {"relator_count", cw.words.size()},
          {"relator_note", cw.note.empty() ? "relators from simple cycles up to the cap; the full relator set is their "
                                             "normal closure"
                                           : cw.note},
          {"criterion",
           {{"verdict", fp.verdict},
            {"met", fp.met},
            {"lambda1", number(fp.lambda1)},
            {"delta_upper", delta_upper},
            {"hypotheses", hyps},
            {"citation", fp.citation}}}};
}

json obstruction_command(Context& c) {
  std::vector<LabeledGraph> family;
  if (c.has("graphs")) {
    for (const auto& g : c.at("graphs")) family.push_back(graph_of(g));
  } else if (c.has("family")) {
    const json& f = c.at("family");
    const int d = f.value("degree", 3);
    const std::uint64_t fseed = f.value("seed", c.seed);
    for (const auto& n : f.at("sizes")) family.push_back(random_regular_graph(n.get<std::size_t>(), d, fseed));
  } else {
    family.push_back(graph_of(c.at("graph")));
  }
  const double lambda = c.at("lambda").get<double>();
  const double lip = c.real("lipschitz", 1.0);
  std::function<double(double)> rho1;
  if (c.has("rho1_divisor")) {
    const double div = c.at("rho1_divisor").get<double>();
    if (!(div > 0.0)) throw InvalidArgument("rho1_divisor must be positive");
    rho1 = [div](double s) { return s / div; };
  }
  json rows = json::array();
  for (const auto& g : family) {
    const ObstructionReport r = embedding_obstruction(g, lambda, lip, rho1);
    const SpectralGap s = laplacian_spectrum(g);
    json row{{"vertices", r.vertices},
             {"lambda1", number(s.lambda1)},
             {"lambda1_method", s.iterative ? "lanczos" : "dense"},
             {"lambda_hypothesis_holds", s.lambda1 >= lambda},
             {"bound", number(r.bound)},
             {"median_distance", r.median_distance}};
    if (rho1) {
      row["rho1_at_median"] = number(r.rho1_at_median);
      row["contradiction_flagged"] = r.contradiction_flagged;
      row["rigorous_contradiction"] = r.rigorous_contradiction;
    }
    rows.push_back(std::move(row));
  }
  return {{"bound", number(displacement_bound(lambda, lip))},
          {"lambda", lambda},
          {"lipschitz", lip},
          {"rows", rows},
          {"tolerance", c.tol},
          {"hypotheses",
           {"edge images have length <= lipschitz", "lambda_1(G, Y) >= lambda",
            "flagged when rho1(median distance) > bound"}}};
}

json validate_cat0_command(Context& c) {
  const ModelSpace space = io::space_from_json(c.at("space"));
  const auto samples = static_cast<std::size_t>(c.integer("samples", 1000));
  const Cat0Report r = verify_cat0_sample(space, samples, c.seed, c.tol, c.real("scale", 1.0));
  json examples = json::array();
  for (const auto& v : r.examples)
    examples.push_back({{"p", io::to_json(space, v.p)},
                        {"q", io::to_json(space, v.q)},
                        {"r", io::to_json(space, v.r)},
                        {"s", number(v.s)},
                        {"t", number(v.t)},
                        {"actual", number(v.actual)},
                        {"comparison", number(v.comparison)}});
  return {{"samples", r.samples},
          {"violations", r.violations},
          {"max_excess", number(r.max_excess)},
          {"examples", examples},
          {"tolerance", c.tol}};
}

const std::map<std::string, Command>& registry() {
  static const std::map<std::string, Command> reg{
      {"delta",
       {"Izeki-Nayatani invariant delta(mu): infimum over realizations phi of |sum t_i phi(p_i)|^2 / sum t_i "
        "|phi(p_i)|^2",
        1e-7, delta_command}},
      {"barycenter",
       {"Barycenter of a finitely supported measure, certified by the variance inequality (Sturm)", 1e-8,
        barycenter_command}},
      {"lambda1", {"First positive eigenvalue of the combinatorial Laplacian of a finite graph", 1e-9, lambda1_command}},
      {"wang",
       {"Wang's invariant lambda_1(G, Y), with (1 - delta(Y)) lambda_1(G) <= lambda_1(G, Y) <= lambda_1(G)", 1e-9,
        wang_command}},
      {"sandwich",
       {"Sandwich inequality (1 - delta(Y)) lambda_1(G) <= lambda_1(G, Y) <= lambda_1(G) (Izeki-Nayatani)", 1e-9,
        sandwich_command}},
      {"property-p",
       {"Property P(theta, alpha, epsilon); a pi/12-net with N balls witnesses P(pi/3, 2/N, pi/6) (Toyoda)", 1e-12,
        property_p_command}},
      {"doubling",
       {"Doubling constant N; an N-doubling cone base has property P(pi/3, 2/N^2, pi/6) (Toyoda)", 1e-12,
        doubling_command}},
      {"covering", {"Covering number by open balls (uniform total boundedness)", 0.0, covering_command}},
      {"random-group",
       {"Random groups of the graph model (Gromov); fixed point criterion of Izeki-Kondo-Nayatani", 0.0,
        random_group_command}},
      {"obstruction",
       {"Poincare-inequality obstruction: expanders do not embed coarsely into spaces with delta < 1 (Gromov, Kondo)", 1e-9,
        obstruction_command}},
      {"validate-cat0",
       {"CAT(0) comparison: geodesic triangles are no fatter than their Euclidean comparison triangles", 1e-9,
        validate_cat0_command}},
  };
  return reg;
}

json run_single(const std::string& name, const Command& cmd, const json& req) {
  Context c{req};
  c.seed = req.contains("seed") ? req.at("seed").get<std::uint64_t>() : 0;
  c.tol = req.contains("tol") ? req.at("tol").get<double>() : cmd.default_tol;
  if (!(c.tol >= 0.0)) throw InvalidArgument("tolerance must be nonnegative");
  json report{{"schema_version", kReportSchemaVersion},
              {"command", name},
              {"citation", cmd.citation},
              {"seed", c.seed},
              {"tol", c.tol}};
  if (req.contains("source")) report["source"] = req.at("source");
  report["result"] = cmd.run(c);
  return report;
}

void flatten(const json& j, const std::string& prefix, std::vector<std::pair<std::string, std::string>>& out) {
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) flatten(*it, prefix.empty() ? it.key() : prefix + "." + it.key(), out);
  } else if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) flatten(j[i], prefix + "[" + std::to_string(i) + "]", out);
  } else if (j.is_string()) {
    out.emplace_back(prefix, j.get<std::string>());
  } else {
    out.emplace_back(prefix, j.dump());
  }
}

std::string csv_cell(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char ch : s) {
    if (ch == '"') q += '"';
    q += ch;
  }
  return q + "\"";
}

}  // namespace

const std::vector<std::string>& command_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : registry()) v.push_back(k);
    return v;
  }();
  return names;
}

json run_command(const std::string& command, const json& request) {
  const auto it = registry().find(command);
  if (it == registry().end()) throw ParseError("unknown command '" + command + "'");
  if (!request.is_object()) throw ParseError("request must be a JSON object");
  try {
    if (request.contains("batch")) {
      json runs = json::array();
      for (const auto& entry : request.at("batch")) {
        json merged = request;
        merged.erase("batch");
        for (auto e = entry.begin(); e != entry.end(); ++e) merged[e.key()] = *e;
        runs.push_back(run_single(command, it->second, merged));
      }
      return {{"schema_version", kReportSchemaVersion}, {"command", command}, {"runs", runs}};
    }
    return run_single(command, it->second, request);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad request field: ") + e.what());
  }
}

std::string report_to_csv(const json& report) {
  std::vector<json> rows;
  auto add_report = [&](const json& r) {
    json base = r;
    json result = base.contains("result") ? base["result"] : json::object();
    base.erase("result");
    if (result.contains("rows") && result["rows"].is_array()) {
      json shared = result;
      shared.erase("rows");
      for (const auto& row : result["rows"]) {
        json flat = base;
        flat["result"] = shared;
        for (auto e = row.begin(); e != row.end(); ++e) flat["result"][e.key()] = *e;
        rows.push_back(flat);
      }
    } else {
      base["result"] = result;
      rows.push_back(base);
    }
  };
  if (report.contains("runs"))
    for (const auto& r : report.at("runs")) add_report(r);
  else
    add_report(report);

  std::vector<std::string> header;
  std::vector<std::map<std::string, std::string>> cells;
  for (const auto& r : rows) {
    std::vector<std::pair<std::string, std::string>> flat;
    flatten(r, "", flat);
    std::map<std::string, std::string> m;
    for (auto& [k, v] : flat) {
      if (std::find(header.begin(), header.end(), k) == header.end()) header.push_back(k);
      m[k] = v;
    }
    cells.push_back(std::move(m));
  }
  std::ostringstream out;
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << csv_cell(header[i]);
  out << '\n';
  for (const auto& m : cells) {
    for (std::size_t i = 0; i < header.size(); ++i) {
      const auto f = m.find(header[i]);
      out << (i ? "," : "") << (f == m.end() ? "" : csv_cell(f->second));
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace cat0
