#include "doctest.h"
#include "fixtures_common.hpp"
#include "ttk/graph.hpp"

using namespace ttk;
using namespace ttk::testing;

// Independent reducer for cross-checking tighten: repeatedly scans for a
// cancelling pair instead of using a stack.
static EdgePath naive_reduce(const EdgePath& p) {
  EdgePath q = p;
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i + 1 < q.size(); ++i) {
      if (q[i + 1] == q[i].reversed()) {
        q.erase(q.begin() + i, q.begin() + i + 2);
        changed = true;
        break;
      }
    }
  }
  return q;
}

TEST_CASE("rose with 3 petals has rank 3") {
  auto g = rose3();
  auto r = validate_graph(*g);
  CHECK(r.valid);
  CHECK(r.connected);
  CHECK(r.rank == 3);
  CHECK(r.valence_table.at("v") == 6);
}

TEST_CASE("two-vertex example graph has rank 3") {
  auto g = two_vertex_graph();
  auto r = validate_graph(*g);
  CHECK(r.connected);
  CHECK(r.rank == 3);
}

TEST_CASE("edge with a missing endpoint is rejected") {
  CHECK_THROWS_WITH_AS(
      MarkedGraph({"v"}, {{"A", "v", "z"}}),
      doctest::Contains("endpoint"), error);
  try {
    MarkedGraph({"v"}, {{"A", "v", "z"}});
  } catch (const error& e) {
    CHECK(e.code == errc::dangling_endpoint);
  }
}

TEST_CASE("duplicate edge names are rejected") {
  try {
    MarkedGraph({"v"}, {{"A", "v", "v"}, {"A", "v", "v"}});
    CHECK(false);
  } catch (const error& e) {
    CHECK(e.code == errc::duplicate_edge_name);
  }
}

TEST_CASE("disconnected graph is flagged") {
  MarkedGraph g({"u", "w"}, {{"A", "u", "u"}, {"B", "w", "w"}});
  auto r = validate_graph(g);
  CHECK(!r.valid);
  CHECK(!r.connected);
}

TEST_CASE("tighten cancels adjacent inverse pairs") {
  auto g = rose3();
  CHECK(tighten(*g, parse_path(*g, "A ~A")).empty());
  CHECK(tighten(*g, parse_path(*g, "A C")) == parse_path(*g, "A C"));
  CHECK(tighten(*g, parse_path(*g, "A C ~C ~A B")) == parse_path(*g, "B"));
}

TEST_CASE("tighten is idempotent and kills p * reverse(p), 1000 random paths") {
  auto g = two_vertex_graph();
  std::mt19937 rng(20240811);
  for (int i = 0; i < 1000; ++i) {
    EdgePath p = random_path(*g, rng, 12);
    EdgePath t = tighten(*g, p);
    CHECK(tighten(*g, t) == t);
    CHECK(t == naive_reduce(p));
    EdgePath pr = p;
    EdgePath rev = reverse_path(p);
    pr.insert(pr.end(), rev.begin(), rev.end());
    CHECK(tighten(*g, pr).empty());
  }
}

TEST_CASE("path_length sums the metric and shrinks under tightening") {
  auto g = std::make_shared<MarkedGraph>(
      std::vector<std::string>{"v"},
      std::vector<std::tuple<std::string, std::string, std::string>>{
          {"A", "v", "v"}, {"B", "v", "v"}, {"C", "v", "v"}},
      std::vector<double>{2.0, 1.5, 1.0});
  CHECK(path_length(*g, {}) == 0.0);
  CHECK(path_length(*g, parse_path(*g, "B")) == 1.5);
  CHECK(path_length(*g, parse_path(*g, "A B C")) == doctest::Approx(g->total_length()));
  std::mt19937 rng(7);
  for (int i = 0; i < 200; ++i) {
    EdgePath p = random_path(*g, rng, 10);
    CHECK(path_length(*g, tighten(*g, p)) <= path_length(*g, p) + 1e-12);
  }
  MarkedGraph plain({"v"}, {{"A", "v", "v"}});
  CHECK_THROWS_AS(path_length(plain, parse_path(plain, "A")), error);
}

TEST_CASE("subdividing a loop adds a valence-2 vertex and keeps rank") {
  auto g = rose3();
  auto sub = subdivide(*g, "A", 2);
  auto r = validate_graph(*sub.graph);
  CHECK(r.rank == 3);
  CHECK(sub.graph->num_vertices() == 2);
  int mid = sub.graph->vertex_index("A.v1");
  REQUIRE(mid >= 0);
  CHECK(validate_graph(*sub.graph).valence_table.at("A.v1") == 2);

  // relabeling rewrites A into its two pieces
  EdgePath relabeled = sub.relabel.apply(parse_path(*g, "A"));
  CHECK(relabeled == parse_path(*sub.graph, "A.1 A.2"));
}

TEST_CASE("subdivision preserves tightened images under relabeling") {
  auto g = two_vertex_graph();
  std::mt19937 rng(99);
  auto sub = subdivide(*g, "E", 3);
  for (int i = 0; i < 300; ++i) {
    EdgePath p = random_path(*g, rng, 10);
    EdgePath lhs = sub.relabel.apply(tighten(*g, p));
    EdgePath rhs = sub.relabel.apply(p);
    CHECK(lhs == rhs);
  }
}

TEST_CASE("metric splits under subdivision according to fractions") {
  auto g = std::make_shared<MarkedGraph>(
      std::vector<std::string>{"v"},
      std::vector<std::tuple<std::string, std::string, std::string>>{{"A", "v", "v"}},
      std::vector<double>{3.0});
  auto sub = subdivide(*g, "A", 2, {1.0 / 3, 2.0 / 3});
  CHECK(sub.graph->edge_length(sub.graph->edge_index("A.1")) == doctest::Approx(1.0));
  CHECK(sub.graph->edge_length(sub.graph->edge_index("A.2")) == doctest::Approx(2.0));
  CHECK(sub.graph->total_length() == doctest::Approx(3.0));
}
