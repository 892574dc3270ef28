#pragma once

#include <set>
#include <utility>

#include "ttk/graph.hpp"

namespace ttk {

// A map between graphs sending vertices to vertices and edges to tight
// nonempty edge paths. The image of a reversed edge is the reversed image,
// so only forward images are stored.
class GraphMap {
 public:
  GraphMap() = default;
  GraphMap(std::shared_ptr<const MarkedGraph> source,
           std::shared_ptr<const MarkedGraph> target,
           std::vector<int> vertex_image, std::vector<EdgePath> edge_image);

  const MarkedGraph& source() const { return *source_; }
  const MarkedGraph& target() const { return *target_; }
  std::shared_ptr<const MarkedGraph> source_ptr() const { return source_; }
  std::shared_ptr<const MarkedGraph> target_ptr() const { return target_; }

  int vertex_image(int v) const { return vertex_image_.at(v); }
  const EdgePath& edge_image(int e) const { return edge_image_.at(e); }
  EdgePath dart_image(OrientedEdge d) const {
    return d.forward ? edge_image_.at(d.edge) : reverse_path(edge_image_.at(d.edge));
  }

  EdgePath apply(const EdgePath& p) const;  // tightened image

  bool same_graphs(const GraphMap& other) const;

 private:
  std::shared_ptr<const MarkedGraph> source_, target_;
  std::vector<int> vertex_image_;
  std::vector<EdgePath> edge_image_;
};

// A topological representative: a graph self-map.
class GraphSelfMap : public GraphMap {
 public:
  GraphSelfMap() = default;
  GraphSelfMap(std::shared_ptr<const MarkedGraph> graph, std::vector<int> vertex_image,
               std::vector<EdgePath> edge_image)
      : GraphMap(graph, graph, std::move(vertex_image), std::move(edge_image)) {}

  const MarkedGraph& graph() const { return source(); }
  std::shared_ptr<const MarkedGraph> graph_ptr() const { return source_ptr(); }
};

GraphSelfMap identity_map(std::shared_ptr<const MarkedGraph> g);

// Builds a self-map from names: vertex name -> vertex name, edge name -> path
// tokens. Validates nothing beyond parse; run check_map for the invariants.
GraphSelfMap make_self_map(std::shared_ptr<const MarkedGraph> g,
                           const std::map<std::string, std::string>& vertex_images,
                           const std::map<std::string, std::string>& edge_images);

struct MapValidationReport {
  bool valid = true;
  std::vector<std::string> problems;
};

MapValidationReport check_map(const GraphSelfMap& m);

// compose(m1, m2) applies m2 first: edge images are tightened m1-images of
// m2-images. Both maps must live on the same graph.
GraphSelfMap compose(const GraphSelfMap& m1, const GraphSelfMap& m2);
GraphSelfMap power(const GraphSelfMap& m, int n);

// Tightened n-fold image of an edge. When `m` is a train track map no
// cancellation can occur; `cancellation_seen` reports whether any did.
EdgePath iterate_edge(const GraphSelfMap& m, int edge, int n,
                      bool* cancellation_seen = nullptr);

// The induced map on directions: a direction goes to the first oriented edge
// of its image path.
std::vector<OrientedEdge> direction_map(const GraphSelfMap& m);

inline int dart_id(OrientedEdge d) { return 2 * d.edge + (d.forward ? 0 : 1); }
inline OrientedEdge dart_from_id(int id) { return {id / 2, id % 2 == 0}; }

// An unordered pair of directions sharing an initial vertex.
struct Turn {
  OrientedEdge a, b;  // normalized so that a <= b
  Turn() = default;
  Turn(OrientedEdge x, OrientedEdge y) : a(std::min(x, y)), b(std::max(x, y)) {}
  bool degenerate() const { return a == b; }
  bool operator==(const Turn&) const = default;
  auto operator<=>(const Turn&) const = default;
};

std::string format_turn(const MarkedGraph& g, const Turn& t);

struct GateStructure {
  // gate id per dart id; two directions lie in one gate iff based at the
  // same vertex and some iterate of the direction map identifies them.
  std::vector<int> gate_of_dart;
  std::vector<std::vector<std::vector<OrientedEdge>>> gates_per_vertex;
  std::vector<Turn> illegal_turns;
  // period per dart id for periodic directions, 0 for pre-periodic ones.
  std::vector<int> direction_period;
  int period_lcm = 1;

  bool same_gate(OrientedEdge x, OrientedEdge y) const {
    return gate_of_dart[dart_id(x)] == gate_of_dart[dart_id(y)];
  }
  bool turn_illegal(const MarkedGraph& g, const Turn& t) const {
    return !t.degenerate() && initial_vertex(g, t.a) == initial_vertex(g, t.b) &&
           same_gate(t.a, t.b);
  }
};

GateStructure gates(const GraphSelfMap& m);

// Turns taken by a path at its interior junctions (step i to step i+1).
std::vector<Turn> turns_taken(const EdgePath& p);
int count_illegal_turns(const MarkedGraph& g, const GateStructure& gs, const EdgePath& p);

struct TrainTrackWitness {
  int edge = -1;      // edge whose image crosses an illegal turn
  int position = -1;  // junction index within the image path
  Turn turn;
};

struct TrainTrackResult {
  bool is_train_track = false;
  std::optional<TrainTrackWitness> witness;
};

TrainTrackResult is_train_track(const GraphSelfMap& m);

struct WhiteheadGraph {
  std::vector<OrientedEdge> directions;     // vertices of the turn graph
  std::set<std::pair<int, int>> edges;      // index pairs into `directions`
  bool connected = false;
  int iterate_bound = 0;                    // turns of g^k images, k <= bound
};

// The graph of turns taken at `v` by iterated edge images. `iterate_bound`
// defaults to the primitivity exponent of the transition matrix (capped).
WhiteheadGraph local_whitehead_graph(const GraphSelfMap& m, int v, int iterate_bound = 0);

}  // namespace ttk
