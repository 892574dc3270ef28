#pragma once

#include "ttk/nielsen.hpp"

namespace ttk {

// Combinatorial shadow of the wedge model: the 2-complex obtained by
// attaching a triangular disc along the Nielsen path is never represented as
// geometry, only through its dihedral valences, the vertical pairing of the
// two legal halves, and the pruned transition matrix.
struct WedgeModel {
  GraphSelfMap map;  // Nielsen-unique representative, metric graph
  double lambda = 1;
  NielsenPath rho;
  EdgePath alpha, beta;  // legal halves, endpoint -> illegal turn
  std::map<std::string, int> dihedral_valence;
  std::vector<std::string> free_edges;  // valence exactly 1
  bool closed = false;
};

WedgeModel build_wedge(const GraphSelfMap& metric_map, double lambda, const NielsenPath& rho,
                       double length_tol = 1e-6);

struct NonfreeSubgraph {
  std::vector<std::string> edges;  // edges of dihedral valence > 1
  TransitionMatrix m1;             // transition matrix pruned to those edges
  double lambda_prime = 0;         // spectral radius of m1
};

NonfreeSubgraph nonfree_subgraph(const WedgeModel& w, double tol = 1e-10);

// Column sum of M1^n: the number of n-fold preimages staying in the nonfree
// subgraph, for a point interior to `edge`.
std::int64_t i1_preimage_count(const WedgeModel& w, const NonfreeSubgraph& sub,
                               const std::string& edge, int n);

// A finite leaf-graph approximation: breadth-first closure of a point under
// the vertical pairing alpha(t) ~ beta(t).
struct LeafPoint {
  int edge = -1;
  double position = 0;  // metric offset within the edge
  bool operator<(const LeafPoint& o) const;
};

struct LeafGraph {
  std::vector<LeafPoint> points;
  std::vector<std::pair<int, int>> segments;  // index pairs, one per wedge segment
  std::vector<int> valence;                   // per point
  bool acyclic = true;
  int depth = 0;
};

LeafGraph leaf_graph(const WedgeModel& w, const LeafPoint& x, int depth);

std::string leaf_graph_dot(const WedgeModel& w, const LeafGraph& lg);

// Evidence for the expansion factor of the inverse class: a train track
// representative when available, otherwise a growth estimate.
struct InverseEvidence {
  std::optional<GraphSelfMap> representative;
  std::optional<double> growth_estimate;
  std::string description;
};

struct GapReport {
  // at the power of the Nielsen-unique representative
  double lambda_phi_power = 0;
  double lambda_prime_power = 0;
  double lambda_inverse_power = 0;
  int power = 1;
  // first-power values (q-th roots)
  double lambda_phi = 0;
  double lambda_prime = 0;
  double lambda_inverse = 0;
  bool verdict = false;
  std::vector<std::string> provenance;
};

// Verifies lambda(inverse) <= lambda' < lambda on a parageometric
// representative; `power` is the iterate the representative models.
GapReport verify_gap(const Classification& classification, int power,
                     const InverseEvidence& inverse, double tol = 1e-9);

}  // namespace ttk
