#pragma once

#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace ttk {

// Error codes surfaced by the library. The CLI maps these onto exit codes.
enum class errc {
  disconnected_graph,
  duplicate_edge_name,
  dangling_endpoint,
  incompatible_path,
  no_metric,
  unknown_edge,
  graph_mismatch,
  rank_mismatch,
  trivial_seed,
  not_irreducible,
  no_convergence,
  not_train_track,
  not_primitive,
  not_homotopy_equivalence,
  illegal_turn_count_violation,
  not_automorphism,
  not_verified_nielsen,
  no_factorization,
  not_nielsen_unique,
  empty_subgraph,
  edge_not_in_subgraph,
  position_out_of_range,
  not_parageometric,
  missing_inverse_evidence,
  parse_error,
};

struct error : std::runtime_error {
  errc code;
  error(errc c, const std::string& what) : std::runtime_error(what), code(c) {}
};

const char* errc_name(errc c);

// A finite graph with named oriented edges and an optional positive edge
// metric. Immutable after construction; operations that "modify" a graph
// return a new one.
class MarkedGraph {
 public:
  struct Edge {
    std::string name;
    int from = 0;  // vertex index
    int to = 0;
  };

  MarkedGraph() = default;
  MarkedGraph(std::vector<std::string> vertices,
              std::vector<std::tuple<std::string, std::string, std::string>> edges,
              std::optional<std::vector<double>> metric = std::nullopt);

  int num_vertices() const { return static_cast<int>(vertex_names_.size()); }
  int num_edges() const { return static_cast<int>(edges_.size()); }
  const std::string& vertex_name(int v) const { return vertex_names_[v]; }
  const Edge& edge(int e) const { return edges_[e]; }
  const std::string& edge_name(int e) const { return edges_[e].name; }

  int vertex_index(const std::string& name) const;  // -1 when absent
  int edge_index(const std::string& name) const;    // -1 when absent

  bool has_metric() const { return metric_.has_value(); }
  double edge_length(int e) const;
  double total_length() const;  // sum of edge lengths
  MarkedGraph with_metric(std::vector<double> lengths) const;

  bool connected() const;
  int rank() const;  // |E| - |V| + 1 for connected graphs
  std::vector<int> valences() const;

 private:
  std::vector<std::string> vertex_names_;
  std::vector<Edge> edges_;
  std::optional<std::vector<double>> metric_;
  std::map<std::string, int> vertex_index_;
  std::map<std::string, int> edge_index_;
};

// An oriented edge: index into the graph's edge list plus a direction flag.
struct OrientedEdge {
  int edge = -1;
  bool forward = true;

  OrientedEdge() = default;
  OrientedEdge(int e, bool f) : edge(e), forward(f) {}
  OrientedEdge reversed() const { return {edge, !forward}; }
  bool operator==(const OrientedEdge&) const = default;
  auto operator<=>(const OrientedEdge&) const = default;
};

inline int initial_vertex(const MarkedGraph& g, OrientedEdge d) {
  const auto& e = g.edge(d.edge);
  return d.forward ? e.from : e.to;
}
inline int terminal_vertex(const MarkedGraph& g, OrientedEdge d) {
  const auto& e = g.edge(d.edge);
  return d.forward ? e.to : e.from;
}

// A path is a finite sequence of oriented edges; the empty path is allowed
// (and carries no basepoint of its own).
using EdgePath = std::vector<OrientedEdge>;

EdgePath reverse_path(const EdgePath& p);
bool endpoint_compatible(const MarkedGraph& g, const EdgePath& p);
bool is_tight(const EdgePath& p);

// Reduces a path rel endpoints by cancelling adjacent e, e-bar pairs.
// Idempotent; throws incompatible_path when consecutive steps do not meet.
EdgePath tighten(const MarkedGraph& g, const EdgePath& p);

double path_length(const MarkedGraph& g, const EdgePath& p);

std::string format_path(const MarkedGraph& g, const EdgePath& p);
EdgePath parse_path(const MarkedGraph& g, const std::string& tokens);

// Rewrites paths of one graph into another after a subdivision or fold.
// Every dart of the source graph maps to a path in the target.
class PathRelabeling {
 public:
  PathRelabeling() = default;
  PathRelabeling(std::shared_ptr<const MarkedGraph> source,
                 std::shared_ptr<const MarkedGraph> target,
                 std::vector<EdgePath> forward_images,  // per source edge
                 std::vector<int> vertex_images);

  const MarkedGraph& source() const { return *source_; }
  const MarkedGraph& target() const { return *target_; }
  std::shared_ptr<const MarkedGraph> source_ptr() const { return source_; }
  std::shared_ptr<const MarkedGraph> target_ptr() const { return target_; }

  EdgePath apply(OrientedEdge d) const;
  // Substitutes every step and tightens the result.
  EdgePath apply(const EdgePath& p) const;
  int apply_vertex(int v) const { return vertex_images_.at(v); }

 private:
  std::shared_ptr<const MarkedGraph> source_, target_;
  std::vector<EdgePath> forward_images_;
  std::vector<int> vertex_images_;
};

struct SubdivisionResult {
  std::shared_ptr<const MarkedGraph> graph;
  PathRelabeling relabel;
  std::vector<std::string> part_names;  // the k new edges, in series order
};

// Replaces `edge` by `parts` edges in series with fresh names. Metric lengths
// split according to `fractions` (default: equal parts).
SubdivisionResult subdivide(const MarkedGraph& g, const std::string& edge, int parts,
                            const std::vector<double>& fractions = {});

struct ValidationReport {
  bool valid = true;
  bool connected = false;
  int rank = 0;
  std::map<std::string, int> valence_table;
  bool metric_present = false;
  bool metric_positive = true;
  std::vector<std::string> problems;  // human-readable, one per failure
};

ValidationReport validate_graph(const MarkedGraph& g);

}  // namespace ttk
