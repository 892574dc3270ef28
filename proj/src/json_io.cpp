#include "ttk/json_io.hpp"

#include <fstream>
#include <sstream>

namespace ttk {

std::string format_double(double x) {
  std::ostringstream out;
  out.precision(10);
  out << x;
  return out.str();
}

namespace {

std::shared_ptr<const MarkedGraph> graph_from_json(const json& j) {
  std::vector<std::string> vertices;
  for (const auto& v : j.at("vertices")) vertices.push_back(v.get<std::string>());
  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  for (const auto& e : j.at("edges"))
    edges.emplace_back(e.at("name").get<std::string>(), e.at("from").get<std::string>(),
                       e.at("to").get<std::string>());
  std::optional<std::vector<double>> metric;
  if (j.contains("metric")) {
    std::vector<double> lengths;
    for (const auto& e : j.at("edges"))
      lengths.push_back(j.at("metric").at(e.at("name").get<std::string>()).get<double>());
    metric = lengths;
  }
  return std::make_shared<MarkedGraph>(vertices, edges, metric);
}

GraphSelfMap map_from_json(std::shared_ptr<const MarkedGraph> g, const json& j) {
  std::map<std::string, std::string> vimg, eimg;
  if (j.contains("vertices"))
    for (auto it = j.at("vertices").begin(); it != j.at("vertices").end(); ++it)
      vimg[it.key()] = it.value().get<std::string>();
  for (auto it = j.at("edges").begin(); it != j.at("edges").end(); ++it)
    eimg[it.key()] = it.value().get<std::string>();
  return make_self_map(std::move(g), vimg, eimg);
}

GraphSelfMap rose_map_from_images(const json& images) {
  std::vector<std::string> names;
  for (auto it = images.begin(); it != images.end(); ++it) names.push_back(it.key());
  std::sort(names.begin(), names.end());
  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  for (const auto& n : names) edges.emplace_back(n, "v", "v");
  auto rose = std::make_shared<MarkedGraph>(std::vector<std::string>{"v"}, edges);
  std::map<std::string, std::string> eimg;
  for (const auto& n : names) eimg[n] = images.at(n).get<std::string>();
  return make_self_map(rose, {{"v", "v"}}, eimg);
}

}  // namespace

Fixture parse_fixture(const json& j, const std::string& name) {
  Fixture f{name, GraphSelfMap{}, std::nullopt, std::nullopt, std::nullopt};
  if (j.contains("rank") || (j.contains("images") && !j.contains("graph"))) {
    f.map = rose_map_from_images(j.at("images"));
    if (j.contains("rank") &&
        j.at("rank").get<int>() != f.map.graph().num_edges())
      throw error(errc::parse_error, "rank does not match the number of image words");
  } else if (j.contains("graph") && j.contains("map")) {
    auto g = graph_from_json(j.at("graph"));
    f.map = map_from_json(g, j.at("map"));
  } else {
    throw error(errc::parse_error,
                "fixture needs either graph+map or a rose automorphism (rank/images)");
  }
  if (j.contains("inverse")) {
    const json& inv = j.at("inverse");
    if (inv.contains("images"))
      f.inverse = rose_map_from_images(inv.at("images"));
    else
      f.inverse = rose_map_from_images(inv);
  }
  if (j.contains("rho")) {
    f.rho = parse_path(f.map.graph(), j.at("rho").get<std::string>());
    f.rho_power = j.value("rho_power", 1);
  }
  auto chk = check_map(f.map);
  if (!chk.valid)
    throw error(errc::parse_error,
                "fixture map is invalid: " + (chk.problems.empty() ? "" : chk.problems[0]));
  return f;
}

Fixture load_fixture(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error(errc::parse_error, "cannot open fixture file: " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw error(errc::parse_error, "invalid JSON in " + path + ": " + e.what());
  }
  std::string name = path;
  if (auto slash = name.find_last_of('/'); slash != std::string::npos) name = name.substr(slash + 1);
  if (auto dot = name.find_last_of('.'); dot != std::string::npos) name = name.substr(0, dot);
  return parse_fixture(j, name);
}

json graph_to_json(const MarkedGraph& g) {
  json edges = json::array();
  for (int e = 0; e < g.num_edges(); ++e)
    edges.push_back({{"name", g.edge_name(e)},
                     {"from", g.vertex_name(g.edge(e).from)},
                     {"to", g.vertex_name(g.edge(e).to)}});
  json vertices = json::array();
  for (int v = 0; v < g.num_vertices(); ++v) vertices.push_back(g.vertex_name(v));
  json out{{"vertices", vertices}, {"edges", edges}};
  if (g.has_metric()) {
    json metric;
    for (int e = 0; e < g.num_edges(); ++e) metric[g.edge_name(e)] = g.edge_length(e);
    out["metric"] = metric;
  }
  return out;
}

json map_to_json(const GraphSelfMap& m) {
  const MarkedGraph& g = m.graph();
  json vertices, edges;
  for (int v = 0; v < g.num_vertices(); ++v)
    vertices[g.vertex_name(v)] = g.vertex_name(m.vertex_image(v));
  for (int e = 0; e < g.num_edges(); ++e)
    edges[g.edge_name(e)] = format_path(g, m.edge_image(e));
  return json{{"vertices", vertices}, {"edges", edges}};
}

json matrix_to_json(const TransitionMatrix& M) {
  json rows = json::array(), trows = json::array();
  for (int i = 0; i < M.dim(); ++i) {
    json r = json::array(), t = json::array();
    for (int j = 0; j < M.dim(); ++j) {
      r.push_back(M.entry(i, j));
      t.push_back(M.entry(j, i));
    }
    rows.push_back(r);
    trows.push_back(t);
  }
  return json{{"index", M.index()},
              {"rows", rows},
              {"transposed_rows", trows},
              {"convention",
               "entry[e][e'] counts traversals of e by the image of e'; the transposed "
               "orientation is printed alongside"}};
}

json pf_to_json(const PFData& pf) {
  json vec;
  for (const auto& [name, x] : pf.eigenvector) vec[name] = format_double(x);
  return json{{"lambda", format_double(pf.lambda)},
              {"eigenvector", vec},
              {"tolerance", pf.tolerance},
              {"irreducible", pf.irreducible},
              {"primitive", pf.primitive},
              {"bracket", {format_double(pf.bracket_lo), format_double(pf.bracket_hi)}},
              {"iterations", pf.iterations}};
}

json validation_to_json(const ValidationReport& g, const MapValidationReport& m) {
  return json{{"graph",
               {{"valid", g.valid},
                {"connected", g.connected},
                {"rank", g.rank},
                {"valences", g.valence_table},
                {"metric_present", g.metric_present},
                {"problems", g.problems}}},
              {"map", {{"valid", m.valid}, {"problems", m.problems}}}};
}

json gates_to_json(const GraphSelfMap& m, const GateStructure& gs) {
  const MarkedGraph& g = m.graph();
  auto dart_name = [&](OrientedEdge d) {
    return (d.forward ? "" : "~") + g.edge_name(d.edge);
  };
  json gates_j;
  for (int v = 0; v < g.num_vertices(); ++v) {
    json list = json::array();
    for (const auto& gate : gs.gates_per_vertex[v]) {
      json one = json::array();
      for (const auto& d : gate) one.push_back(dart_name(d));
      list.push_back(one);
    }
    gates_j[g.vertex_name(v)] = list;
  }
  json illegal = json::array();
  for (const auto& t : gs.illegal_turns) illegal.push_back(format_turn(g, t));
  json periods;
  for (int i = 0; i < 2 * g.num_edges(); ++i)
    if (gs.direction_period[i] > 0)
      periods[dart_name(dart_from_id(i))] = gs.direction_period[i];
  return json{{"gates", gates_j},
              {"illegal_turns", illegal},
              {"periodic_direction_periods", periods},
              {"period_lcm", gs.period_lcm}};
}

json fold_sequence_to_json(const FoldSequence& seq) {
  json stages = json::array();
  for (const auto& st : seq.stages) {
    if (st.kind == FoldStage::Kind::fold) {
      const MarkedGraph& src = *st.source;
      auto dart_name = [&](OrientedEdge d) {
        return (d.forward ? "" : "~") + src.edge_name(d.edge);
      };
      stages.push_back({{"type", "fold"},
                        {"data",
                         {{"darts", {dart_name(st.fold.folded_a), dart_name(st.fold.folded_b)}},
                          {"kept", st.target->edge_name(st.fold.kept.edge)}}}});
    } else {
      stages.push_back({{"type", "subdivide"},
                        {"data", {{"edge", st.subdivide.edge}, {"parts", st.subdivide.parts}}}});
    }
  }
  json terminal;
  const MarkedGraph& last = seq.terminal.source();
  for (int e = 0; e < last.num_edges(); ++e) {
    EdgePath img = seq.terminal.apply(OrientedEdge(e, true));
    terminal[last.edge_name(e)] = format_path(seq.terminal.target(), img);
  }
  return json{{"stages", stages},
              {"terminal", terminal},
              {"fold_count", seq.fold_count},
              {"subdivision_count", seq.subdivision_count}};
}

json elimination_to_json(const EliminationResult& res) {
  json out{{"cycle_length", res.cycle_length},
           {"steps", res.steps},
           {"set_sizes", res.set_sizes}};
  switch (res.kind) {
    case EliminationResult::Kind::empty:
      out["result"] = "empty";
      break;
    case EliminationResult::Kind::survivors:
      out["result"] = "survivors";
      out["first_repeat"] = res.first_repeat;
      out["period"] = res.period;
      out["survivor_count"] = res.survivors.size();
      break;
    case EliminationResult::Kind::exhausted:
      out["result"] = "exhausted";
      break;
  }
  return out;
}

json classification_to_json(const Classification& c) {
  json out{{"verdict", verdict_name(c.verdict)}, {"evidence", {{"notes", c.notes}}}};
  if (!c.reason.empty()) out["reason"] = c.reason;
  if (c.lambda > 0) out["lambda"] = format_double(c.lambda);
  out["power_bound"] = c.power_bound_used;
  if (c.elimination) out["elimination"] = elimination_to_json(*c.elimination);
  if (c.inp) {
    const auto& cand = *c.inp;
    out["inp"] = {{"path", format_path(cand.model->map.graph(), cand.path.path)},
                  {"power", cand.path.power},
                  {"closed", cand.path.endpoints_coincide},
                  {"edge_counts", c.edge_counts}};
  }
  return out;
}

json gap_to_json(const GapReport& rep) {
  return json{{"verdict", rep.verdict},
              {"power", rep.power},
              {"lambda", format_double(rep.lambda_phi)},
              {"lambda_prime", format_double(rep.lambda_prime)},
              {"lambda_inverse", format_double(rep.lambda_inverse)},
              {"lambda_power", format_double(rep.lambda_phi_power)},
              {"lambda_prime_power", format_double(rep.lambda_prime_power)},
              {"lambda_inverse_power", format_double(rep.lambda_inverse_power)},
              {"provenance", rep.provenance}};
}

}  // namespace ttk
