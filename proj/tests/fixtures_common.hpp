#pragma once

// Shared in-test constructions: the rank-3 rose pair and the two-vertex
// train track map used across the test suites.

#include <memory>
#include <random>

#include "ttk/graph_map.hpp"

namespace ttk::testing {

inline std::shared_ptr<const MarkedGraph> rose3() {
  return std::make_shared<MarkedGraph>(
      std::vector<std::string>{"v"},
      std::vector<std::tuple<std::string, std::string, std::string>>{
          {"A", "v", "v"}, {"B", "v", "v"}, {"C", "v", "v"}});
}

// A -> AC, B -> A, C -> B
inline GraphSelfMap phi_map(std::shared_ptr<const MarkedGraph> g = rose3()) {
  return make_self_map(g, {{"v", "v"}}, {{"A", "A C"}, {"B", "A"}, {"C", "B"}});
}

// A -> B, B -> C, C -> ~B A
inline GraphSelfMap phi_inverse_map(std::shared_ptr<const MarkedGraph> g = rose3()) {
  return make_self_map(g, {{"v", "v"}}, {{"A", "B"}, {"B", "C"}, {"C", "~B A"}});
}

// Two vertices r,q; B: q->r, C: r->q, D: r->q, E: q->q.
// B -> C ~E ~C D E, C -> ~C ~B ~E ~D, D -> B, E -> C B.
inline std::shared_ptr<const MarkedGraph> two_vertex_graph() {
  return std::make_shared<MarkedGraph>(
      std::vector<std::string>{"r", "q"},
      std::vector<std::tuple<std::string, std::string, std::string>>{
          {"B", "q", "r"}, {"C", "r", "q"}, {"D", "r", "q"}, {"E", "q", "q"}});
}

inline GraphSelfMap two_vertex_map(std::shared_ptr<const MarkedGraph> g = two_vertex_graph()) {
  return make_self_map(g, {{"r", "q"}, {"q", "r"}},
                       {{"B", "C ~E ~C D E"}, {"C", "~C ~B ~E ~D"}, {"D", "B"}, {"E", "C B"}});
}

// Random tight-ish path generator for property tests.
inline EdgePath random_path(const MarkedGraph& g, std::mt19937& rng, int max_len) {
  std::uniform_int_distribution<int> len_dist(0, max_len);
  int len = len_dist(rng);
  EdgePath p;
  int at = -1;
  for (int i = 0; i < len; ++i) {
    std::vector<OrientedEdge> options;
    for (int e = 0; e < g.num_edges(); ++e)
      for (bool fwd : {true, false}) {
        OrientedEdge d(e, fwd);
        if (at < 0 || initial_vertex(g, d) == at) options.push_back(d);
      }
    if (options.empty()) break;
    std::uniform_int_distribution<size_t> pick(0, options.size() - 1);
    OrientedEdge d = options[pick(rng)];
    p.push_back(d);
    at = terminal_vertex(g, d);
  }
  return p;
}

}  // namespace ttk::testing
