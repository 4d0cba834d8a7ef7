#include "cat0/cat0.h"

#include <cstdlib>
#include <cstring>
#include <string>

#include "cat0/commands.hpp"
#include "cat0/error.hpp"
#include "cat0/invariant.hpp"
#include "cat0/io.hpp"
#include "cat0/randomgroups.hpp"
#include "cat0/spectral.hpp"

struct cat0_space {
  cat0::ModelSpace space;
};
struct cat0_measure {
  cat0::Measure mu;
};
struct cat0_graph {
  cat0::LabeledGraph g;
};

namespace {

thread_local std::string last_error;

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <class F>
cat0_status guarded(F&& f) {
  try {
    f();
    last_error.clear();
    return CAT0_OK;
  } catch (const cat0::ParseError& e) {
    last_error = e.what();
    return CAT0_ERR_PARSE;
  } catch (const cat0::InvalidArgument& e) {
    last_error = e.what();
    return CAT0_ERR_INVALID;
  } catch (const cat0::ComputationError& e) {
    last_error = e.what();
    return CAT0_ERR_COMPUTATION;
  } catch (const nlohmann::json::exception& e) {
    last_error = e.what();
    return CAT0_ERR_PARSE;
  } catch (const std::exception& e) {
    last_error = e.what();
    return CAT0_ERR_INTERNAL;
  } catch (...) {
    last_error = "unknown error";
    return CAT0_ERR_INTERNAL;
  }
}

cat0_status null_arg(const char* what) {
  last_error = std::string("null argument: ") + what;
  return CAT0_ERR_INVALID;
}

}  // namespace

extern "C" {

const char* cat0_version(void) { return "0.1.0"; }

const char* cat0_last_error(void) { return last_error.c_str(); }

void cat0_string_free(char* s) { std::free(s); }

cat0_status cat0_space_from_json(const char* json, cat0_space** out) {
  if (!json || !out) return null_arg("json/out");
  return guarded([&] { *out = new cat0_space{cat0::io::space_from_json(cat0::io::parse(json))}; });
}

void cat0_space_free(cat0_space* space) { delete space; }

cat0_status cat0_space_distance(const cat0_space* space, const char* p, const char* q, double* out) {
  if (!space || !p || !q || !out) return null_arg("space/p/q/out");
  return guarded([&] {
    const auto a = cat0::io::point_from_json(space->space, cat0::io::parse(p));
    const auto b = cat0::io::point_from_json(space->space, cat0::io::parse(q));
    *out = cat0::distance(space->space, a, b);
  });
}

cat0_status cat0_measure_from_json(const char* json, cat0_measure** out) {
  if (!json || !out) return null_arg("json/out");
  return guarded([&] { *out = new cat0_measure{cat0::io::measure_from_json(cat0::io::parse(json))}; });
}

void cat0_measure_free(cat0_measure* mu) { delete mu; }

cat0_status cat0_measure_barycenter(const cat0_measure* mu, double tol, uint64_t seed, char** point_json) {
  if (!mu || !point_json) return null_arg("mu/point_json");
  return guarded([&] {
    cat0::BarycenterOptions bo;
    bo.tol = tol;
    bo.seed = seed;
    const auto bar = cat0::barycenter(mu->mu, bo);
    *point_json = dup(cat0::io::to_json(mu->mu.space, bar).dump());
  });
}

cat0_status cat0_measure_delta(const cat0_measure* mu, double gap_tol, double* value, double* lower_bound) {
  if (!mu || !value) return null_arg("mu/value");
  return guarded([&] {
    const auto profile = cat0::distance_profile(mu->mu);
    cat0::SdpOptions so;
    so.gap_tol = gap_tol;
    const auto r = cat0::delta_sdp(profile, mu->mu.weights, so);
    *value = r.value;
    if (lower_bound) *lower_bound = r.diagnostics.lower_bound;
  });
}

cat0_status cat0_graph_from_edge_list(const char* text, cat0_graph** out) {
  if (!text || !out) return null_arg("text/out");
  return guarded([&] { *out = new cat0_graph{cat0::io::graph_from_edge_list(text)}; });
}

cat0_status cat0_graph_from_json(const char* json, cat0_graph** out) {
  if (!json || !out) return null_arg("json/out");
  return guarded([&] { *out = new cat0_graph{cat0::io::graph_from_json(cat0::io::parse(json))}; });
}

void cat0_graph_free(cat0_graph* g) { delete g; }

cat0_status cat0_graph_size(const cat0_graph* g, size_t* vertices, size_t* edges) {
  if (!g) return null_arg("graph");
  if (vertices) *vertices = g->g.num_vertices();
  if (edges) *edges = g->g.num_edges();
  last_error.clear();
  return CAT0_OK;
}

cat0_status cat0_graph_lambda1(const cat0_graph* g, double* out) {
  if (!g || !out) return null_arg("graph/out");
  return guarded([&] { *out = cat0::laplacian_lambda1(g->g); });
}

cat0_status cat0_graph_girth(const cat0_graph* g, int* out) {
  if (!g || !out) return null_arg("graph/out");
  return guarded([&] { *out = cat0::girth(g->g).value_or(0); });
}

cat0_status cat0_run(const char* command, const char* request_json, char** report_json) {
  if (!command || !request_json || !report_json) return null_arg("command/request/report");
  *report_json = nullptr;
  nlohmann::json report;
  const cat0_status st = guarded([&] { report = cat0::run_command(command, cat0::io::parse(request_json)); });
  if (st != CAT0_OK) {
    const std::string msg = last_error;
    report = {{"schema_version", cat0::kReportSchemaVersion},
              {"command", command},
              {"error", {{"code", static_cast<int>(st)}, {"message", msg}}}};
    last_error = msg;
  }
  *report_json = dup(report.dump(2));
  return st;
}

cat0_status cat0_report_to_csv(const char* report_json, char** csv) {
  if (!report_json || !csv) return null_arg("report/csv");
  return guarded([&] { *csv = dup(cat0::report_to_csv(cat0::io::parse(report_json))); });
}

}  // extern "C"
