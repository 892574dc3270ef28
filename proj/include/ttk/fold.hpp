#pragma once

#include <variant>

#include "ttk/graph_map.hpp"
#include "ttk/word.hpp"

namespace ttk {

// One stage of a Stallings factorization: either an elementary subdivision
// (an edge cut in two so that its initial part maps onto a single edge) or a
// full fold of two oriented edges with equal images.
struct FoldStageData {
  OrientedEdge folded_a, folded_b;  // darts of the source graph, same origin
  OrientedEdge kept;                // dart of the target graph they map to
};

struct SubdivideStageData {
  std::string edge;                  // source edge that was cut
  std::vector<std::string> parts;    // its pieces in the target graph
};

struct FoldStage {
  enum class Kind { fold, subdivide } kind;
  std::shared_ptr<const MarkedGraph> source, target;
  PathRelabeling relabel;  // quotient map, dart -> path in target
  FoldStageData fold;
  SubdivideStageData subdivide;
};

// A factorization G0 -> G1 -> ... -> GK -> G0 of a self-map into elementary
// stages followed by a terminal graph isomorphism. Composing every stage and
// the terminal isomorphism, edge by edge with tightening, reproduces the
// original map exactly.
struct FoldSequence {
  std::shared_ptr<const MarkedGraph> base;
  std::vector<FoldStage> stages;
  PathRelabeling terminal;  // GK -> G0, every dart image a single dart
  int fold_count = 0;
  int subdivision_count = 0;
};

// Generic fold loop: factors any graph map into stages plus a terminal
// isomorphism onto its target. Throws not_homotopy_equivalence when the
// terminal immersion is not an isomorphism.
struct GeneralFoldResult {
  std::vector<FoldStage> stages;
  PathRelabeling terminal;
  // forward vertex images of a chosen source vertex through all stages
  std::vector<int> vertex_trace;
};
GeneralFoldResult fold_map(const GraphMap& h, int traced_vertex = 0);

FoldSequence fold_factorization(const GraphSelfMap& m);

bool verify_factorization(const FoldSequence& seq, const GraphSelfMap& m);

// The self-map and metric data attached to each graph of the fold cycle
// G0 -> ... -> GK -> G0. Position i holds the conjugated representative
// g_i = f_i ... f_1 iso f_K ... f_{i+1} together with its gate structure and
// the stage metric (edge lengths scale so that every arrow is edge-isometric
// and one full cycle contracts by lambda).
struct CyclePosition {
  std::shared_ptr<const MarkedGraph> graph;  // metric graph at this position
  GraphSelfMap self_map;
  GateStructure gate_structure;
  double total_length = 0;
};

struct FoldCycle {
  std::shared_ptr<const FoldSequence> seq;
  std::vector<CyclePosition> positions;  // size K+1: G0..GK
  double lambda = 0;
  // arrow j goes from position j to position j+1 (mod K+1); the last arrow
  // is the terminal isomorphism.
  int length() const { return static_cast<int>(positions.size()); }
};

// Requires an eigen metric on the base graph of the sequence.
FoldCycle build_fold_cycle(const GraphSelfMap& metric_map, FoldSequence seq, double lambda);

// All paths one stage upstairs, each with exactly one illegal turn, whose
// tightened image is one of the input paths; candidates longer than
// `length_cap` in the stage metric are discarded. `arrow` indexes the cycle
// arrow whose target holds the input paths, so results live at position
// `arrow` and inputs at position `(arrow+1) mod length`.
std::vector<EdgePath> pullback_one_illegal(const FoldCycle& cycle, int arrow,
                                           const std::vector<EdgePath>& paths,
                                           double length_cap);

// Inverse of a rose automorphism, by folding the letter-labeled rose of the
// image words onto the rose and lifting each generator loop back through the
// fold stages. Throws not_automorphism if the folded graph is not the rose.
GraphSelfMap invert_automorphism(const GraphSelfMap& m);

struct InversePairResult {
  bool is_inverse = false;
  FreeWord conjugator;  // w with phi(psi(x)) = w x w^-1 for all generators
};

InversePairResult is_inverse_pair(const GraphSelfMap& phi, const GraphSelfMap& psi);

// True when h is an inner automorphism; returns the conjugator.
InversePairResult is_inner_automorphism(const GraphSelfMap& h);

// phi = w . psi . w^-1 for a single word w (equality in Out).
bool outer_equal(const GraphSelfMap& phi, const GraphSelfMap& psi);

}  // namespace ttk
