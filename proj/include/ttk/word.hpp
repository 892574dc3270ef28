#pragma once

#include "ttk/graph_map.hpp"

namespace ttk {

// A free-group word over a rank-r basis: nonzero symbols, generator i in
// 1..r, inverse -i.
using FreeWord = std::vector<int>;

FreeWord reduce(const FreeWord& w);
FreeWord cyclic_reduce(const FreeWord& w);
FreeWord inverse_word(const FreeWord& w);
FreeWord concat_reduce(const FreeWord& a, const FreeWord& b);

std::string format_word(const FreeWord& w, const std::vector<std::string>& basis);
FreeWord parse_word(const std::string& tokens, const std::vector<std::string>& basis);

// True when m is a self-map of a rose (single vertex).
bool is_rose_map(const GraphSelfMap& m);
int rose_rank(const GraphSelfMap& m);

// Substitutes generator images of a rose self-map and reduces.
FreeWord apply_automorphism(const GraphSelfMap& phi, const FreeWord& w);

FreeWord word_of_path(const EdgePath& p);
EdgePath path_of_word(const MarkedGraph& rose, const FreeWord& w);

struct GrowthDiagnostics {
  std::vector<double> root_estimates;   // ||phi^n(c)||^{1/n} for the best seed
  std::vector<std::int64_t> lengths;    // ||phi^n(c)|| for the best seed
  bool monotone = true;                 // root estimates eventually monotone
  int best_seed = 0;
  int truncated_at = 0;  // nonzero when the word length guard stopped iteration early
};

struct GrowthEstimate {
  double estimate = 0;  // max over seeds of ||phi^N(c)|| / ||phi^{N-1}(c)||
  GrowthDiagnostics diagnostics;
};

// Expansion-factor estimate by iterating seeds and measuring cyclic word
// length. Seeds must be nontrivial and cyclically reduced. Iteration stops
// early when words outgrow `max_letters`; the ratio then uses the last
// completed step and the diagnostics record the truncation.
GrowthEstimate growth_rate(const GraphSelfMap& phi, const std::vector<FreeWord>& seeds, int N,
                           std::int64_t max_letters = 50000000);

// All basis letters plus products of two distinct basis letters.
std::vector<FreeWord> default_growth_seeds(int rank);

}  // namespace ttk
