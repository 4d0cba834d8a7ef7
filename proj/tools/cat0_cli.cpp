#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cat0/cat0.h"

using json = nlohmann::json;

namespace {

struct Subcommand {
  const char* name;
  const char* help;
  const char* input_key;  // request field an input file fills
};

constexpr Subcommand kCommands[] = {
    {"delta", "Izeki-Nayatani invariant of a measure (or distance profile)", "measure"},
    {"barycenter", "Certified barycenter of a measure", "measure"},
    {"lambda1", "First positive eigenvalue of a graph Laplacian", "graph"},
    {"wang", "Wang invariant of a graph into a model space", "graph"},
    {"sandwich", "Check (1 - delta) lambda1 <= lambda1(G, Y) <= lambda1", "graph"},
    {"property-p", "Property P verdict and witness for a finite metric space", "metric"},
    {"doubling", "Doubling constant and induced property P triple", "metric"},
    {"covering", "Covering number by open balls", "metric"},
    {"random-group", "Random group of the graph model with fixed point criterion", "graph"},
    {"obstruction", "Poincare obstruction to coarse embeddings", "graph"},
    {"validate-cat0", "Sampled CAT(0) comparison check for a model space", "space"},
};

const char* const kRequestKeys[] = {"profile", "graphs", "family"};

struct Options {
  std::vector<std::string> inputs;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::optional<int> restarts;
  std::optional<int> max_iter;
  std::string thresholds;
  std::string out;
  std::string format = "json";
  std::string space;
  std::string witness;
  std::string triple;
  std::optional<double> delta_upper;
  std::optional<double> radius;
  std::optional<int> exponent;
  std::optional<int> generators;
  std::optional<int> max_cycle_length;
  std::optional<double> lambda;
  std::optional<double> lipschitz;
  std::optional<double> rho1_divisor;
  std::optional<int> degree;
  std::vector<std::size_t> sizes;
  std::optional<std::size_t> samples;
  std::optional<double> scale;
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json read_json(const std::string& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::parse_error& e) {
    throw InputError(path + ": " + e.what());
  }
}

bool looks_like_json(const std::string& text) {
  for (char c : text) {
    if (c == ' ' || c == '\t' || c == '\n' || c == '\r') continue;
    return c == '{' || c == '[';
  }
  return false;
}

// An input file is either a full request (holding the primary field or one of
// kRequestKeys) or the object that field expects. Graph inputs may be edge lists.
json input_request(const Subcommand& cmd, const std::string& path) {
  const std::string text = read_file(path);
  json req = json::object();
  if (!looks_like_json(text)) {
    req[cmd.input_key] = text;
  } else {
    json doc;
    try {
      doc = json::parse(text);
    } catch (const json::parse_error& e) {
      throw InputError(path + ": " + e.what());
    }
    bool full = doc.is_object() && doc.contains(cmd.input_key);
    if (doc.is_object())
      for (const char* k : kRequestKeys) full = full || doc.contains(k);
    if (full)
      req = doc;
    else if (std::string(cmd.input_key) == "measure" && doc.is_object() && doc.contains("pairwise")) {
      if (doc.contains("weights")) {
        req["weights"] = doc["weights"];
        doc.erase("weights");
      }
      req["profile"] = doc;
    }
    else
      req[cmd.input_key] = doc;
  }
  req["source"] = path;
  return req;
}

json build_request(const Subcommand& cmd, const Options& o) {
  json req = json::object();
  if (o.seed) req["seed"] = *o.seed;
  if (o.tol) req["tol"] = *o.tol;
  if (o.restarts) req["restarts"] = *o.restarts;
  if (o.max_iter) req["max_iter"] = *o.max_iter;
  if (!o.thresholds.empty()) req["thresholds"] = read_json(o.thresholds);
  if (!o.space.empty()) req["space"] = read_json(o.space);
  if (!o.witness.empty()) req["witness"] = read_json(o.witness);
  if (!o.triple.empty()) req["triple"] = read_json(o.triple);
  if (o.delta_upper) req["delta_upper"] = *o.delta_upper;
  if (o.radius) req["radius"] = *o.radius;
  if (o.exponent) req["exponent"] = *o.exponent;
  if (o.generators) req["generators"] = *o.generators;
  if (o.max_cycle_length) req["max_cycle_length"] = *o.max_cycle_length;
  if (o.lambda) req["lambda"] = *o.lambda;
  if (o.lipschitz) req["lipschitz"] = *o.lipschitz;
  if (o.rho1_divisor) req["rho1_divisor"] = *o.rho1_divisor;
  if (o.samples) req["samples"] = *o.samples;
  if (o.scale) req["scale"] = *o.scale;
  if (!o.sizes.empty()) {
    json fam{{"sizes", o.sizes}, {"degree", o.degree.value_or(3)}};
    if (o.seed) fam["seed"] = *o.seed;
    req["family"] = fam;
  }

  std::vector<json> inputs;
  for (const auto& path : o.inputs) inputs.push_back(input_request(cmd, path));
  if (inputs.size() == 1) {
    for (auto it = inputs[0].begin(); it != inputs[0].end(); ++it)
      if (!req.contains(it.key())) req[it.key()] = *it;
  } else if (std::string(cmd.name) == "obstruction" && !inputs.empty()) {
    json graphs = json::array();
    for (const auto& in : inputs) graphs.push_back(in.at("graph"));
    req["graphs"] = graphs;
  } else if (!inputs.empty()) {
    req["batch"] = inputs;
  }
  return req;
}

int exit_code(cat0_status st) {
  switch (st) {
    case CAT0_OK:
      return 0;
    case CAT0_ERR_PARSE:
    case CAT0_ERR_INVALID:
      return 1;
    default:
      return 2;
  }
}

int emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    if (text.empty() || text.back() != '\n') std::cout << '\n';
    return 0;
  }
  std::ofstream f(out, std::ios::binary);
  if (!f) {
    std::cerr << "error: cannot write '" << out << "'\n";
    return 2;
  }
  f << text;
  if (text.empty() || text.back() != '\n') f << '\n';
  return 0;
}

int run(const Subcommand& cmd, const Options& o) {
  json req;
  try {
    req = build_request(cmd, o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  char* report = nullptr;
  const cat0_status st = cat0_run(cmd.name, req.dump().c_str(), &report);
  std::string text = report ? report : "";
  cat0_string_free(report);
  if (st != CAT0_OK) {
    std::cerr << "error: " << cat0_last_error() << '\n';
    emit(text, o.out);
    return exit_code(st);
  }
  if (o.format == "csv") {
    char* csv = nullptr;
    const cat0_status cst = cat0_report_to_csv(text.c_str(), &csv);
    if (cst != CAT0_OK) {
      std::cerr << "error: " << cat0_last_error() << '\n';
      return exit_code(cst);
    }
    text = csv;
    cat0_string_free(csv);
  }
  return emit(text, o.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical toolkit for CAT(0) invariants, spectral gaps and random group criteria"};
  app.set_version_flag("--version", std::string(cat0_version()));
  app.require_subcommand(1);

  Options o;
  const Subcommand* chosen = nullptr;
  for (const auto& cmd : kCommands) {
    CLI::App* sub = app.add_subcommand(cmd.name, cmd.help);
    sub->add_option("inputs", o.inputs, "Input files; several inputs run as a batch");
    sub->add_option("--seed", o.seed, "Random seed");
    sub->add_option("--tol", o.tol, "Tolerance");
    sub->add_option("--restarts", o.restarts, "Restarts / multistart count");
    sub->add_option("--max-iter", o.max_iter, "Iteration cap");
    sub->add_option("--thresholds", o.thresholds, "Threshold configuration file (JSON)");
    sub->add_option("--out", o.out, "Write the report here instead of stdout");
    sub->add_option("--format", o.format, "Report format")->check(CLI::IsMember({"json", "csv"}));
    const std::string name = cmd.name;
    if (name == "wang" || name == "sandwich" || name == "validate-cat0")
      sub->add_option("--space", o.space, "Target model space file (JSON)");
    if (name == "wang" || name == "sandwich" || name == "random-group")
      sub->add_option("--delta-upper", o.delta_upper, "Upper bound for delta of the target");
    if (name == "property-p") {
      sub->add_option("--witness", o.witness, "Witness index list (JSON)");
      sub->add_option("--triple", o.triple, "Triple {theta, alpha, epsilon} (JSON)");
    }
    if (name == "doubling") sub->add_option("--exponent", o.exponent, "Exponent e in alpha = 2/N^e");
    if (name == "covering") sub->add_option("--radius", o.radius, "Ball radius")->required();
    if (name == "random-group") {
      sub->add_option("--generators", o.generators, "Number of generators k")->required();
      sub->add_option("--max-cycle-length", o.max_cycle_length, "Longest cycle read as a relator");
    }
    if (name == "obstruction") {
      sub->add_option("--lambda", o.lambda, "Spectral gap lower bound")->required();
      sub->add_option("--lipschitz", o.lipschitz, "Edge Lipschitz constant");
      sub->add_option("--rho1-divisor", o.rho1_divisor, "Compression rho1(s) = s / divisor");
      sub->add_option("--degree", o.degree, "Degree of the random regular family");
      sub->add_option("--sizes", o.sizes, "Sizes of the random regular family");
    }
    if (name == "validate-cat0") {
      sub->add_option("--samples", o.samples, "Triangle samples");
      sub->add_option("--scale", o.scale, "Sampling scale");
    }
    sub->callback([&chosen, &cmd] { chosen = &cmd; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }
  return chosen ? run(*chosen, o) : 1;
}
