#pragma once

#include <json.hpp>

#include "ttk/nielsen.hpp"
#include "ttk/spectral.hpp"
#include "ttk/wedge.hpp"

namespace ttk {

using json = nlohmann::json;

// A parsed input: either a full graph + map pair or a rose automorphism
// given by generator image words.
struct Fixture {
  std::string name;
  GraphSelfMap map;
  std::optional<GraphSelfMap> inverse;  // optional companion automorphism
  std::optional<EdgePath> rho;          // optional precomputed Nielsen path
  std::optional<int> rho_power;
};

Fixture parse_fixture(const json& j, const std::string& name = "fixture");
Fixture load_fixture(const std::string& path);

json graph_to_json(const MarkedGraph& g);
json map_to_json(const GraphSelfMap& m);
json matrix_to_json(const TransitionMatrix& M);
json pf_to_json(const PFData& pf);
json validation_to_json(const ValidationReport& g, const MapValidationReport& m);
json gates_to_json(const GraphSelfMap& m, const GateStructure& gs);
json fold_sequence_to_json(const FoldSequence& seq);
json elimination_to_json(const EliminationResult& res);
json classification_to_json(const Classification& c);
json gap_to_json(const GapReport& rep);

std::string format_double(double x);  // 10 significant digits

}  // namespace ttk
