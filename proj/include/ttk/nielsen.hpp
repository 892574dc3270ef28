#pragma once

#include "ttk/fold.hpp"
#include "ttk/spectral.hpp"

namespace ttk {

// A (periodic) Nielsen path: fixed up to homotopy rel endpoints by the
// `power`-th iterate of the map it belongs to. Indivisible ones carry
// exactly one illegal turn, at the split index.
struct NielsenPath {
  EdgePath path;
  int power = 1;
  int illegal_index = -1;  // junction index of the unique illegal turn
  bool endpoints_coincide = false;
};

bool is_nielsen_path(const GraphSelfMap& m, const EdgePath& p, int power);

// A self-map subdivided at the interior fixed points of its q-th power, so
// that candidate Nielsen-path endpoints are vertices. Edge footprints map
// pieces back into the base graph for comparisons across powers.
struct NielsenModel {
  GraphSelfMap map;     // the subdivided q-th power, on a metric graph
  double lambda = 1;    // stretch factor of `map`
  int power = 1;        // q, relative to the base map
  PathRelabeling relabel;  // base metric graph -> model graph
  GateStructure gate_structure;
  std::vector<int> orig_edge;       // per model edge
  std::vector<double> orig_lo, orig_hi;  // footprint interval in the base edge
};

// Subdivides a metric self-map at given interior edge positions, recomputing
// the map so every cut point becomes a fixed combinatorial vertex of the
// refined structure. The map must stretch the metric by `lambda`.
struct SubdividedSelfMap {
  GraphSelfMap map;
  PathRelabeling relabel;
  std::vector<int> orig_edge;
  std::vector<double> orig_lo, orig_hi;
};
SubdividedSelfMap subdivide_self_map(const GraphSelfMap& m, double lambda,
                                     std::vector<std::vector<double>> cuts_per_edge);

// Builds the q-th power model of a metric train track map (eigen metric and
// stretch `lambda` for the base map).
NielsenModel power_model(const GraphSelfMap& metric_map, double lambda, int q,
                         long image_size_guard = 2000000);

struct InpCandidate {
  std::shared_ptr<const NielsenModel> model;
  NielsenPath path;
};

struct InpResult {
  std::vector<InpCandidate> paths;  // deduplicated up to reversal and power
  std::vector<int> powers_searched;
  std::vector<std::string> notes;
  double base_lambda = 1;
};

// Finds all indivisible periodic Nielsen paths of metric length at most
// 2 Length(G) + tol for powers q <= power_bound (default: the lcm of the
// periodic direction periods). Endpoints of candidates are forced to
// vertices by subdividing at fixed points of the edge maps; candidates are
// grown as matching eigenrays from fixed directions and verified exactly.
InpResult find_inp(const GraphSelfMap& m, int power_bound = 0);

// Same search on an already-metrized representative.
InpResult find_inp_metric(const GraphSelfMap& metric_map, double lambda, int power_bound = 0);

// Elimination of periodic Nielsen paths by pulling the illegal-turn paths
// backward around the fold cycle.
struct EliminationResult {
  enum class Kind { empty, survivors, exhausted } kind = Kind::exhausted;
  int steps = 0;  // backward steps taken when the verdict was reached
  std::vector<EdgePath> survivors;  // set at the base graph of the repeating cycle
  int first_repeat = 0;
  int period = 0;
  int cycle_length = 0;
  std::vector<std::size_t> set_sizes;  // |E_{-k}| per backward step
};

EliminationResult nielsen_elimination(const GraphSelfMap& m, int max_back = 64);

// Folding an indivisible Nielsen path: identifies the maximal initial
// segments of the reversed legal halves with equal images and quotients.
// collapse_inp identifies the halves entirely, eliminating the path; this is
// the one-shot form of the small-path elimination used when deriving
// Nielsen-unique representatives.
struct InpFoldResult {
  GraphSelfMap map;         // on the quotient metric graph
  double lambda = 1;
  PathRelabeling relabel;   // source model graph -> quotient graph
};
InpFoldResult fold_inp(const GraphSelfMap& metric_map, double lambda, const NielsenPath& rho);
InpFoldResult collapse_inp(const GraphSelfMap& metric_map, double lambda,
                           const NielsenPath& rho);

struct Classification {
  enum class Verdict {
    no_periodic_nielsen_path,
    geometric_candidate,
    parageometric_candidate,
    indeterminate,
  };
  Verdict verdict = Verdict::indeterminate;
  std::string reason;  // populated for indeterminate verdicts
  std::vector<std::string> notes;
  std::optional<InpCandidate> inp;
  std::map<std::string, int> edge_counts;  // traversals of rho per model edge
  int power_bound_used = 0;
  double lambda = 0;
  std::optional<EliminationResult> elimination;
};

const char* verdict_name(Classification::Verdict v);

Classification classify(const GraphSelfMap& m, int power_bound = 0, int max_back = 64,
                        double length_tol = 1e-6);

// Searches powers of the map for indivisible Nielsen paths and collapses
// them one at a time until a representative with a unique Nielsen path of
// length 2 Length(G) remains.
struct DerivedRepresentative {
  GraphSelfMap map;  // Nielsen-unique representative (metric graph)
  double lambda = 1;
  int power = 1;  // the representative is a model of the power-th iterate
  NielsenPath rho;
  std::vector<std::string> log;
};
std::optional<DerivedRepresentative> derive_nielsen_unique(const GraphSelfMap& m,
                                                           int power_bound = 12);

}  // namespace ttk
