#pragma once

#include <cstdint>

#include "ttk/graph_map.hpp"

namespace ttk {

// Nonnegative integer matrix indexed by edge names. Convention:
// entry(e, e') = number of times the image of e' traverses e in either
// direction. The transition digraph TG has a directed edge e -> e' for each
// traversal of e' by the image of e, so its adjacency matrix is the
// transpose of this one.
class TransitionMatrix {
 public:
  TransitionMatrix() = default;
  TransitionMatrix(std::vector<std::string> index, std::vector<std::int64_t> entries);

  int dim() const { return static_cast<int>(index_.size()); }
  const std::vector<std::string>& index() const { return index_; }
  std::int64_t entry(int row, int col) const { return entries_[row * dim() + col]; }
  std::int64_t& entry(int row, int col) { return entries_[row * dim() + col]; }

  TransitionMatrix transposed() const;
  TransitionMatrix times(const TransitionMatrix& other) const;
  TransitionMatrix pow(int n) const;
  bool operator==(const TransitionMatrix&) const = default;

 private:
  std::vector<std::string> index_;
  std::vector<std::int64_t> entries_;
};

TransitionMatrix transition_matrix(const GraphSelfMap& m);

bool is_irreducible(const TransitionMatrix& M);
// Primitive iff M^k > 0 entrywise for some k <= (dim-1)^2 + 1.
bool is_primitive(const TransitionMatrix& M, int* exponent = nullptr);

struct PFData {
  double lambda = 0;
  std::map<std::string, double> eigenvector;  // entries sum to 1
  double tolerance = 0;
  bool primitive = false;
  bool irreducible = false;
  // Collatz-Wielandt bracket at the final iterate; contains lambda.
  double bracket_lo = 0, bracket_hi = 0;
  long iterations = 0;
};

// Power iteration bracketed by Collatz-Wielandt bounds; stops when the
// bracket width drops below tol. Requires an irreducible matrix.
PFData pf_eigen(const TransitionMatrix& M, double tol = 1e-10, long max_iter = 1000000);

// Maximum of the PF eigenvalues over strongly connected components
// (0 for nilpotent matrices). Handles reducible input.
double spectral_radius(const TransitionMatrix& M, double tol = 1e-10);

struct EigenMetricResult {
  std::shared_ptr<const MarkedGraph> graph;  // same graph with metric set
  GraphSelfMap map;                          // the input map on the metric graph
  double lambda = 0;
  double max_stretch_error = 0;  // max |Length(g(e)) - lambda Length(e)|
};

// Assigns the PF eigenvector of the transposed matrix as edge lengths, so
// that the map stretches every edge length by lambda.
EigenMetricResult eigen_metric(const GraphSelfMap& m, double tol = 1e-10);

// |g^{-n}(x)| for x interior to `edge`: the number of directed n-paths in
// the transition digraph ending at `edge`.
std::int64_t preimage_count(const GraphSelfMap& m, int edge, int n);
std::int64_t preimage_count(const TransitionMatrix& M, int edge_row, int n);

}  // namespace ttk
