#include "ttk/graph.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace ttk {

const char* errc_name(errc c) {
  switch (c) {
    case errc::disconnected_graph: return "DisconnectedGraph";
    case errc::duplicate_edge_name: return "DuplicateEdgeName";
    case errc::dangling_endpoint: return "DanglingEndpoint";
    case errc::incompatible_path: return "IncompatiblePath";
    case errc::no_metric: return "NoMetric";
    case errc::unknown_edge: return "UnknownEdge";
    case errc::graph_mismatch: return "GraphMismatch";
    case errc::rank_mismatch: return "RankMismatch";
    case errc::trivial_seed: return "TrivialSeed";
    case errc::not_irreducible: return "NotIrreducible";
    case errc::no_convergence: return "NoConvergence";
    case errc::not_train_track: return "NotTrainTrack";
    case errc::not_primitive: return "NotPrimitive";
    case errc::not_homotopy_equivalence: return "NotHomotopyEquivalence";
    case errc::illegal_turn_count_violation: return "IllegalTurnCountViolation";
    case errc::not_automorphism: return "NotAutomorphism";
    case errc::not_verified_nielsen: return "NotVerifiedNielsen";
    case errc::no_factorization: return "NoFactorization";
    case errc::not_nielsen_unique: return "NotNielsenUnique";
    case errc::empty_subgraph: return "EmptySubgraph";
    case errc::edge_not_in_subgraph: return "EdgeNotInSubgraph";
    case errc::position_out_of_range: return "PositionOutOfRange";
    case errc::not_parageometric: return "NotParageometric";
    case errc::missing_inverse_evidence: return "MissingInverseEvidence";
    case errc::parse_error: return "ParseError";
  }
  return "UnknownError";
}

MarkedGraph::MarkedGraph(std::vector<std::string> vertices,
                         std::vector<std::tuple<std::string, std::string, std::string>> edges,
                         std::optional<std::vector<double>> metric)
    : vertex_names_(std::move(vertices)), metric_(std::move(metric)) {
  for (int i = 0; i < static_cast<int>(vertex_names_.size()); ++i) {
    auto [it, fresh] = vertex_index_.emplace(vertex_names_[i], i);
    if (!fresh) throw error(errc::parse_error, "duplicate vertex name: " + vertex_names_[i]);
  }
  edges_.reserve(edges.size());
  for (auto& [name, from, to] : edges) {
    Edge e;
    e.name = name;
    auto fi = vertex_index_.find(from);
    auto ti = vertex_index_.find(to);
    if (fi == vertex_index_.end() || ti == vertex_index_.end())
      throw error(errc::dangling_endpoint,
                  "edge " + name + " has endpoint not in the vertex set");
    e.from = fi->second;
    e.to = ti->second;
    auto [it, fresh] = edge_index_.emplace(name, static_cast<int>(edges_.size()));
    if (!fresh) throw error(errc::duplicate_edge_name, "duplicate edge name: " + name);
    edges_.push_back(std::move(e));
  }
  if (metric_ && metric_->size() != edges_.size())
    throw error(errc::parse_error, "metric length list does not match edge count");
}

int MarkedGraph::vertex_index(const std::string& name) const {
  auto it = vertex_index_.find(name);
  return it == vertex_index_.end() ? -1 : it->second;
}

int MarkedGraph::edge_index(const std::string& name) const {
  auto it = edge_index_.find(name);
  return it == edge_index_.end() ? -1 : it->second;
}

double MarkedGraph::edge_length(int e) const {
  if (!metric_) throw error(errc::no_metric, "graph has no metric");
  return (*metric_)[e];
}

double MarkedGraph::total_length() const {
  if (!metric_) throw error(errc::no_metric, "graph has no metric");
  return std::accumulate(metric_->begin(), metric_->end(), 0.0);
}

MarkedGraph MarkedGraph::with_metric(std::vector<double> lengths) const {
  MarkedGraph g = *this;
  if (lengths.size() != edges_.size())
    throw error(errc::parse_error, "metric length list does not match edge count");
  g.metric_ = std::move(lengths);
  return g;
}

bool MarkedGraph::connected() const {
  if (vertex_names_.empty()) return false;
  std::vector<char> seen(vertex_names_.size(), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    for (const auto& e : edges_) {
      for (int w : {e.from == v ? e.to : -1, e.to == v ? e.from : -1}) {
        if (w >= 0 && !seen[w]) {
          seen[w] = 1;
          stack.push_back(w);
        }
      }
    }
  }
  return std::all_of(seen.begin(), seen.end(), [](char c) { return c != 0; });
}

int MarkedGraph::rank() const { return num_edges() - num_vertices() + 1; }

std::vector<int> MarkedGraph::valences() const {
  std::vector<int> val(vertex_names_.size(), 0);
  for (const auto& e : edges_) {
    val[e.from]++;
    val[e.to]++;
  }
  return val;
}

EdgePath reverse_path(const EdgePath& p) {
  EdgePath r(p.rbegin(), p.rend());
  for (auto& d : r) d = d.reversed();
  return r;
}

bool endpoint_compatible(const MarkedGraph& g, const EdgePath& p) {
  for (size_t i = 0; i + 1 < p.size(); ++i)
    if (terminal_vertex(g, p[i]) != initial_vertex(g, p[i + 1])) return false;
  return true;
}

bool is_tight(const EdgePath& p) {
  for (size_t i = 0; i + 1 < p.size(); ++i)
    if (p[i + 1] == p[i].reversed()) return false;
  return true;
}

EdgePath tighten(const MarkedGraph& g, const EdgePath& p) {
  if (!endpoint_compatible(g, p))
    throw error(errc::incompatible_path, "path steps are not endpoint-compatible");
  EdgePath out;
  out.reserve(p.size());
  for (const auto& d : p) {
    if (!out.empty() && out.back() == d.reversed())
      out.pop_back();
    else
      out.push_back(d);
  }
  return out;
}

double path_length(const MarkedGraph& g, const EdgePath& p) {
  double total = 0;
  for (const auto& d : p) total += g.edge_length(d.edge);
  return total;
}

std::string format_path(const MarkedGraph& g, const EdgePath& p) {
  std::string out;
  for (const auto& d : p) {
    if (!out.empty()) out += ' ';
    if (!d.forward) out += '~';
    out += g.edge_name(d.edge);
  }
  return out;
}

EdgePath parse_path(const MarkedGraph& g, const std::string& tokens) {
  EdgePath p;
  std::istringstream in(tokens);
  std::string tok;
  while (in >> tok) {
    bool forward = true;
    if (tok.front() == '~') {
      forward = false;
      tok.erase(tok.begin());
    }
    int e = g.edge_index(tok);
    if (e < 0) throw error(errc::unknown_edge, "unknown edge in path: " + tok);
    p.emplace_back(e, forward);
  }
  if (!endpoint_compatible(g, p))
    throw error(errc::incompatible_path, "parsed path is not endpoint-compatible: " + tokens);
  return p;
}

PathRelabeling::PathRelabeling(std::shared_ptr<const MarkedGraph> source,
                               std::shared_ptr<const MarkedGraph> target,
                               std::vector<EdgePath> forward_images,
                               std::vector<int> vertex_images)
    : source_(std::move(source)),
      target_(std::move(target)),
      forward_images_(std::move(forward_images)),
      vertex_images_(std::move(vertex_images)) {}

EdgePath PathRelabeling::apply(OrientedEdge d) const {
  const EdgePath& img = forward_images_.at(d.edge);
  return d.forward ? img : reverse_path(img);
}

EdgePath PathRelabeling::apply(const EdgePath& p) const {
  EdgePath out;
  for (const auto& d : p) {
    EdgePath step = apply(d);
    out.insert(out.end(), step.begin(), step.end());
  }
  return tighten(*target_, out);
}

SubdivisionResult subdivide(const MarkedGraph& g, const std::string& edge, int parts,
                            const std::vector<double>& fractions) {
  int e = g.edge_index(edge);
  if (e < 0) throw error(errc::unknown_edge, "unknown edge: " + edge);
  if (parts < 2) throw error(errc::parse_error, "subdivision needs at least 2 parts");
  if (!fractions.empty() && static_cast<int>(fractions.size()) != parts)
    throw error(errc::parse_error, "fraction list does not match part count");

  auto fresh_name = [&](const std::string& base) {
    std::string name = base;
    while (g.edge_index(name) >= 0) name += "'";
    return name;
  };
  auto fresh_vertex = [&](const std::string& base) {
    std::string name = base;
    while (g.vertex_index(name) >= 0) name += "'";
    return name;
  };

  std::vector<std::string> vertices;
  for (int v = 0; v < g.num_vertices(); ++v) vertices.push_back(g.vertex_name(v));
  std::vector<std::string> mid_names;
  for (int i = 1; i < parts; ++i) {
    std::string mv = fresh_vertex(edge + ".v" + std::to_string(i));
    mid_names.push_back(mv);
    vertices.push_back(mv);
  }

  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  std::vector<double> lengths;
  std::vector<std::string> part_names;
  bool metric = g.has_metric();
  for (int i = 0; i < g.num_edges(); ++i) {
    const auto& ed = g.edge(i);
    if (i != e) {
      edges.emplace_back(ed.name, g.vertex_name(ed.from), g.vertex_name(ed.to));
      if (metric) lengths.push_back(g.edge_length(i));
      continue;
    }
    for (int k = 0; k < parts; ++k) {
      std::string from = k == 0 ? g.vertex_name(ed.from) : mid_names[k - 1];
      std::string to = k == parts - 1 ? g.vertex_name(ed.to) : mid_names[k];
      std::string name = fresh_name(edge + "." + std::to_string(k + 1));
      part_names.push_back(name);
      edges.emplace_back(name, from, to);
      if (metric) {
        double frac = fractions.empty() ? 1.0 / parts : fractions[k];
        lengths.push_back(g.edge_length(i) * frac);
      }
    }
  }

  auto out = std::make_shared<MarkedGraph>(
      vertices, edges, metric ? std::optional(lengths) : std::nullopt);

  std::vector<EdgePath> images(g.num_edges());
  std::vector<int> vimages(g.num_vertices());
  for (int v = 0; v < g.num_vertices(); ++v) vimages[v] = out->vertex_index(g.vertex_name(v));
  for (int i = 0; i < g.num_edges(); ++i) {
    if (i != e) {
      images[i] = {OrientedEdge(out->edge_index(g.edge_name(i)), true)};
    } else {
      for (const auto& pn : part_names) images[i].emplace_back(out->edge_index(pn), true);
    }
  }

  SubdivisionResult res;
  res.graph = out;
  res.relabel = PathRelabeling(std::make_shared<MarkedGraph>(g), out,
                               std::move(images), std::move(vimages));
  res.part_names = part_names;
  return res;
}

ValidationReport validate_graph(const MarkedGraph& g) {
  ValidationReport r;
  r.connected = g.connected();
  if (!r.connected) {
    r.valid = false;
    r.problems.push_back("graph is not connected");
  }
  r.rank = g.rank();
  auto val = g.valences();
  for (int v = 0; v < g.num_vertices(); ++v) r.valence_table[g.vertex_name(v)] = val[v];
  r.metric_present = g.has_metric();
  if (r.metric_present) {
    for (int e = 0; e < g.num_edges(); ++e) {
      if (!(g.edge_length(e) > 0)) {
        r.metric_positive = false;
        r.valid = false;
        r.problems.push_back("edge " + g.edge_name(e) + " has nonpositive length");
      }
    }
  }
  return r;
}

}  // namespace ttk
