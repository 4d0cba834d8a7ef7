#include "cat0/randomgroups.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <queue>
#include <sstream>

#include "cat0/error.hpp"
#include "cat0/random.hpp"
#include "cat0/spectral.hpp"

namespace cat0 {

Word free_reduce(const Word& w) {
  Word out;
  for (Generator g : w) {
    if (!out.empty() && out.back() == -g)
      out.pop_back();
    else
      out.push_back(g);
  }
  return out;
}

Word inverse(const Word& w) {
  Word out(w.rbegin(), w.rend());
  for (auto& g : out) g = -g;
  return out;
}

std::string to_string(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (Generator g : w) {
    if (!s.empty()) s += ' ';
    s += (g > 0 ? 's' : 'S') + std::to_string(std::abs(g));
  }
  return s;
}

Word parse_word(const std::string& text) {
  std::istringstream in(text);
  Word w;
  std::string tok;
  while (in >> tok) {
    if (tok == "1") continue;
    if (tok.size() < 2 || (tok[0] != 's' && tok[0] != 'S') ||
        !std::all_of(tok.begin() + 1, tok.end(), [](unsigned char c) { return std::isdigit(c); }))
      throw ParseError("bad generator token '" + tok + "'");
    const int i = std::stoi(tok.substr(1));
    if (i < 1) throw ParseError("generator indices start at 1");
    w.push_back(tok[0] == 's' ? i : -i);
  }
  return w;
}

LabeledGraph sample_labels(const LabeledGraph& g, int k, std::uint64_t seed) {
  if (k < 1) throw InvalidArgument("need at least one generator");
  Rng rng = make_rng(seed, 0x1abe1);
  LabeledGraph out = g;
  std::vector<int> labels;
  for (std::size_t e = 0; e < g.num_edges(); ++e) {
    if (uniform_index(rng, 2) == 1) out.flip(e);
    const auto idx = static_cast<int>(uniform_index(rng, 2 * static_cast<std::size_t>(k)));
    labels.push_back(idx < k ? idx + 1 : -(idx - k + 1));
  }
  out.set_labels(k, std::move(labels));
  return out;
}

std::optional<int> girth(const LabeledGraph& g) {
  const std::size_t n = g.num_vertices();
  int best = -1;
  for (std::size_t s = 0; s < n; ++s) {
    std::vector<int> dist(n, -1), parent(n, -1);
    std::queue<int> q;
    dist[s] = 0;
    q.push(static_cast<int>(s));
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      if (best > 0 && 2 * dist[static_cast<std::size_t>(u)] + 1 >= best) break;
      for (int w : g.neighbors(u)) {
        if (dist[static_cast<std::size_t>(w)] < 0) {
          dist[static_cast<std::size_t>(w)] = dist[static_cast<std::size_t>(u)] + 1;
          parent[static_cast<std::size_t>(w)] = u;
          q.push(w);
        } else if (w != parent[static_cast<std::size_t>(u)]) {
          const int len = dist[static_cast<std::size_t>(u)] + dist[static_cast<std::size_t>(w)] + 1;
          if (best < 0 || len < best) best = len;
        }
      }
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

CycleWords cycle_words(const LabeledGraph& g, int max_length) {
  if (g.labels().size() != g.num_edges()) throw InvalidArgument("cycle words: edges are not labelled");
  CycleWords out;
  out.cap = max_length;
  std::map<std::pair<int, int>, std::size_t> edge_of;
  for (std::size_t k = 0; k < g.num_edges(); ++k) {
    const auto [u, v] = g.edges()[k];
    edge_of[{u, v}] = k;
    edge_of[{v, u}] = k;
  }
  auto symbol = [&](int a, int b) {
    const std::size_t k = edge_of.at({a, b});
    const int l = g.labels()[k];
    return g.edges()[k].first == a ? l : -l;
  };

  constexpr std::size_t kMaxCycles = 1'000'000;
  const int n = static_cast<int>(g.num_vertices());
  std::vector<int> path;
  std::vector<bool> on_path(static_cast<std::size_t>(n), false);
  bool truncated = false;
  // Depth-first search over paths whose vertices all exceed the start vertex.
  auto dfs = [&](auto&& self, int start, int u) -> void {
    if (truncated) return;
    for (int w : g.neighbors(u)) {
      if (w == start && path.size() >= 3) {
        if (out.cycles.size() >= kMaxCycles) {
          truncated = true;
          return;
        }
        Word word;
        for (std::size_t i = 0; i < path.size(); ++i) word.push_back(symbol(path[i], path[(i + 1) % path.size()]));
        out.cycles.push_back(path);
        out.words.push_back(std::move(word));
      } else if (w > start && !on_path[static_cast<std::size_t>(w)] && static_cast<int>(path.size()) < max_length) {
        on_path[static_cast<std::size_t>(w)] = true;
        path.push_back(w);
        self(self, start, w);
        path.pop_back();
        on_path[static_cast<std::size_t>(w)] = false;
      }
    }
  };
  for (int s = 0; s < n && max_length >= 3; ++s) {
    path = {s};
    on_path[static_cast<std::size_t>(s)] = true;
    dfs(dfs, s, s);
    on_path[static_cast<std::size_t>(s)] = false;
  }

  const auto gi = girth(g);
  if (!gi)
    out.note = "graph has no cycles";
  else if (max_length < *gi)
    out.note = "cap below girth (" + std::to_string(*gi) + ")";
  if (truncated) out.note += std::string(out.note.empty() ? "" : "; ") + "truncated at 10^6 cycles";
  return out;
}

FixedPointReport fixed_point_report(const LabeledGraph& g, double delta_upper, const FixedPointThresholds& th) {
  auto missing = [](const char* name) { return ParseError(std::string("missing threshold configuration: ") + name); };
  if (!th.min_girth) throw missing("min_girth");
  if (!th.min_lambda) throw missing("min_lambda");
  if (!th.min_degree) throw missing("min_degree");
  if (!th.max_degree) throw missing("max_degree");
  if (!th.delta_constant) throw missing("delta_constant");
  if (!(*th.delta_constant < 1.0)) throw InvalidArgument("delta_constant must be below 1");

  FixedPointReport rep;
  rep.citation =
      "Izeki-Kondo-Nayatani fixed point theorem for random groups of the graph model (Gromov); "
      "probability constants are not available, so only the hypotheses are checked";
  rep.girth = girth(g);
  rep.lambda1 = (g.num_vertices() >= 2 && g.is_connected()) ? laplacian_lambda1(g) : 0.0;

  const bool girth_ok = !rep.girth || *rep.girth >= *th.min_girth;
  rep.hypotheses.push_back({"girth", girth_ok,
                            "girth " + (rep.girth ? std::to_string(*rep.girth) : std::string("infinite")) +
                                ", required >= " + std::to_string(*th.min_girth)});
  rep.hypotheses.push_back({"spectral gap", rep.lambda1 >= *th.min_lambda,
                            "lambda1 " + std::to_string(rep.lambda1) + ", required >= " + std::to_string(*th.min_lambda)});
  const bool deg_ok = g.min_degree() >= *th.min_degree && g.max_degree() <= *th.max_degree;
  rep.hypotheses.push_back({"degree", deg_ok,
                            "degrees in [" + std::to_string(g.min_degree()) + ", " + std::to_string(g.max_degree()) +
                                "], required within [" + std::to_string(*th.min_degree) + ", " +
                                std::to_string(*th.max_degree) + "]"});
  rep.hypotheses.push_back({"delta", delta_upper <= *th.delta_constant,
                            "delta upper bound " + std::to_string(delta_upper) + ", required <= " +
                                std::to_string(*th.delta_constant)});

  std::string failed;
  for (const auto& h : rep.hypotheses)
    if (!h.satisfied) failed += (failed.empty() ? "" : ", ") + h.name;
  rep.met = failed.empty();
  rep.verdict = rep.met ? "met (conditional on configured constants)" : "not met: " + failed;
  return rep;
}

}  // namespace cat0
