#include "doctest.h"
#include "fixtures_common.hpp"
#include "ttk/graph_map.hpp"

using namespace ttk;
using namespace ttk::testing;

TEST_CASE("phi on the 3-rose is a valid map") {
  auto m = phi_map();
  CHECK(check_map(m).valid);
}

TEST_CASE("empty edge image is invalid") {
  auto g = rose3();
  GraphSelfMap m(g, {0}, {EdgePath{}, parse_path(*g, "A"), parse_path(*g, "B")});
  auto r = check_map(m);
  CHECK(!r.valid);
}

TEST_CASE("endpoint mismatch is invalid") {
  auto g = two_vertex_graph();
  // the image of C must run from q to r, but C itself runs r -> q
  auto m = make_self_map(g, {{"r", "q"}, {"q", "r"}},
                         {{"B", "C ~E ~C D E"}, {"C", "C"}, {"D", "B"}, {"E", "C B"}});
  CHECK(!check_map(m).valid);
}

TEST_CASE("compose with identity is the identity of composition") {
  auto g = rose3();
  auto m = phi_map(g);
  auto id = identity_map(g);
  auto lhs = compose(id, m);
  for (int e = 0; e < 3; ++e) CHECK(lhs.edge_image(e) == m.edge_image(e));
  auto rhs = compose(m, id);
  for (int e = 0; e < 3; ++e) CHECK(rhs.edge_image(e) == m.edge_image(e));
}

TEST_CASE("phi squared sends B to A C") {
  auto g = rose3();
  auto m2 = compose(phi_map(g), phi_map(g));
  CHECK(m2.edge_image(g->edge_index("B")) == parse_path(*g, "A C"));
}

TEST_CASE("composition is associative on a random triple") {
  auto g = rose3();
  auto f1 = phi_map(g);
  auto f2 = phi_inverse_map(g);
  auto f3 = make_self_map(g, {{"v", "v"}}, {{"A", "B A"}, {"B", "B"}, {"C", "C"}});
  auto lhs = compose(compose(f1, f2), f3);
  auto rhs = compose(f1, compose(f2, f3));
  for (int e = 0; e < 3; ++e) CHECK(lhs.edge_image(e) == rhs.edge_image(e));
}

TEST_CASE("iterate_edge matches powers and stays cancellation-free on phi") {
  auto g = rose3();
  auto m = phi_map(g);
  CHECK(iterate_edge(m, g->edge_index("A"), 0) == parse_path(*g, "A"));
  CHECK(iterate_edge(m, g->edge_index("A"), 2) == parse_path(*g, "A C B"));
  bool cancel = false;
  for (int e = 0; e < 3; ++e)
    for (int n = 1; n <= 10; ++n) {
      iterate_edge(m, e, n, &cancel);
      CHECK(!cancel);
    }
}

TEST_CASE("direction map of phi: A->A, B->A, C->B, ~A->~C") {
  auto g = rose3();
  auto dm = direction_map(phi_map(g));
  int A = g->edge_index("A"), B = g->edge_index("B"), C = g->edge_index("C");
  CHECK(dm[dart_id({A, true})] == OrientedEdge(A, true));
  CHECK(dm[dart_id({B, true})] == OrientedEdge(A, true));
  CHECK(dm[dart_id({C, true})] == OrientedEdge(B, true));
  CHECK(dm[dart_id({A, false})] == OrientedEdge(C, false));
}

TEST_CASE("direction map is functorial under composition") {
  auto g = rose3();
  auto m = phi_map(g);
  auto dm1 = direction_map(m);
  auto dm2 = direction_map(compose(m, m));
  for (int i = 0; i < 6; ++i) CHECK(dm2[i] == dm1[dart_id(dm1[i])]);
}

TEST_CASE("gates of the phi rose") {
  auto g = rose3();
  auto gs = gates(phi_map(g));
  int A = g->edge_index("A"), B = g->edge_index("B"), C = g->edge_index("C");
  CHECK(gs.gates_per_vertex[0].size() == 4);  // {A,B,C}, {~A}, {~B}, {~C}
  CHECK(gs.same_gate({A, true}, {B, true}));
  CHECK(gs.same_gate({A, true}, {C, true}));
  CHECK(!gs.same_gate({A, false}, {B, false}));
  REQUIRE(gs.illegal_turns.size() == 3);
  CHECK(gs.turn_illegal(*g, Turn({A, true}, {B, true})));
  CHECK(gs.turn_illegal(*g, Turn({A, true}, {C, true})));
  CHECK(gs.turn_illegal(*g, Turn({B, true}, {C, true})));
  CHECK(!gs.turn_illegal(*g, Turn({A, true}, {A, false})));

  // periodic directions: A is fixed, the reversed darts form a 3-cycle
  CHECK(gs.direction_period[dart_id({A, true})] == 1);
  CHECK(gs.direction_period[dart_id({A, false})] == 3);
  CHECK(gs.direction_period[dart_id({B, false})] == 3);
  CHECK(gs.direction_period[dart_id({C, false})] == 3);
  CHECK(gs.direction_period[dart_id({B, true})] == 0);
  CHECK(gs.period_lcm == 3);
}

TEST_CASE("identity map: singleton gates, no illegal turns") {
  auto g = rose3();
  auto gs = gates(identity_map(g));
  CHECK(gs.illegal_turns.empty());
  CHECK(gs.gates_per_vertex[0].size() == 6);
  CHECK(gs.period_lcm == 1);
}

TEST_CASE("every illegal turn eventually degenerates under the direction map") {
  for (auto m : {phi_map(), two_vertex_map()}) {
    auto gs = gates(m);
    auto dm = direction_map(m);
    int nd = 2 * m.graph().num_edges();
    for (auto t : gs.illegal_turns) {
      OrientedEdge a = t.a, b = t.b;
      bool degenerated = false;
      for (int k = 0; k < nd && !degenerated; ++k) {
        a = dm[dart_id(a)];
        b = dm[dart_id(b)];
        degenerated = a == b;
      }
      CHECK(degenerated);
    }
  }
}

TEST_CASE("gate partition is a fixed point of further refinement") {
  for (auto m : {phi_map(), two_vertex_map()}) {
    auto gs = gates(m);
    auto dm = direction_map(m);
    const auto& g = m.graph();
    // one more application of the direction map identifies nothing new
    for (int i = 0; i < 2 * g.num_edges(); ++i)
      for (int j = 0; j < 2 * g.num_edges(); ++j) {
        if (gs.gate_of_dart[i] != gs.gate_of_dart[j]) continue;
        OrientedEdge a = dart_from_id(i), b = dart_from_id(j);
        if (initial_vertex(g, a) != initial_vertex(g, b)) continue;
        CHECK(gs.gate_of_dart[dart_id(dm[i])] == gs.gate_of_dart[dart_id(dm[j])]);
      }
  }
}

TEST_CASE("phi and the two-vertex example are train track maps") {
  CHECK(is_train_track(phi_map()).is_train_track);
  CHECK(is_train_track(two_vertex_map()).is_train_track);
}

TEST_CASE("a -> ab, b -> ~a is not a train track map") {
  auto g = std::make_shared<MarkedGraph>(
      std::vector<std::string>{"v"},
      std::vector<std::tuple<std::string, std::string, std::string>>{{"a", "v", "v"},
                                                                     {"b", "v", "v"}});
  auto m = make_self_map(g, {{"v", "v"}}, {{"a", "a b"}, {"b", "~a"}});
  auto r = is_train_track(m);
  CHECK(!r.is_train_track);
  REQUIRE(r.witness.has_value());
  CHECK(r.witness->edge == g->edge_index("a"));
  CHECK(r.witness->turn == Turn({g->edge_index("a"), false}, {g->edge_index("b"), true}));
}

TEST_CASE("train track maps iterate without cancellation") {
  auto m = two_vertex_map();
  bool cancel = false;
  for (int e = 0; e < 4; ++e)
    for (int n = 1; n <= 6; ++n) {
      iterate_edge(m, e, n, &cancel);
      CHECK(!cancel);
    }
}

TEST_CASE("whitehead graphs of the two-vertex example are connected at r and q") {
  auto g = two_vertex_graph();
  auto m = two_vertex_map(g);
  CHECK(local_whitehead_graph(m, g->vertex_index("r")).connected);
  CHECK(local_whitehead_graph(m, g->vertex_index("q")).connected);
}

TEST_CASE("identity map has a disconnected whitehead graph") {
  auto g = rose3();
  auto w = local_whitehead_graph(identity_map(g), 0);
  CHECK(w.edges.empty());
  CHECK(!w.connected);
}

TEST_CASE("whitehead graph of the phi rose is computed from iterated turns") {
  auto g = rose3();
  auto w = local_whitehead_graph(phi_map(g), 0);
  CHECK(w.directions.size() == 6);
  CHECK(!w.edges.empty());
  CHECK(w.connected);
}
