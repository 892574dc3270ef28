#include "ttk/wedge.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace ttk {

namespace {

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(10);
  out << x;
  return out.str();
}

}  // namespace

WedgeModel build_wedge(const GraphSelfMap& metric_map, double lambda, const NielsenPath& rho,
                       double length_tol) {
  const MarkedGraph& g = metric_map.graph();
  if (!is_nielsen_path(metric_map, rho.path, 1))
    throw error(errc::not_nielsen_unique, "path is not a fixed Nielsen path of the map");

  GateStructure gs = gates(metric_map);
  std::vector<int> illegal;
  auto ts = turns_taken(rho.path);
  for (size_t i = 0; i < ts.size(); ++i)
    if (gs.turn_illegal(g, ts[i])) illegal.push_back(static_cast<int>(i) + 1);
  if (illegal.size() != 1)
    throw error(errc::not_nielsen_unique, "Nielsen path must have exactly one illegal turn");

  double L = g.total_length();
  double rho_len = path_length(g, rho.path);
  if (std::abs(rho_len - 2 * L) > length_tol * 2 * L)
    throw error(errc::not_nielsen_unique,
                "Nielsen path has length " + fmt(rho_len) + ", not 2 Length(G)");

  WedgeModel w;
  w.map = metric_map;
  w.lambda = lambda;
  w.rho = rho;
  w.rho.illegal_index = illegal[0];
  w.alpha = EdgePath(rho.path.begin(), rho.path.begin() + illegal[0]);
  w.beta = reverse_path(EdgePath(rho.path.begin() + illegal[0], rho.path.end()));
  w.closed = initial_vertex(g, rho.path.front()) == terminal_vertex(g, rho.path.back());

  for (int e = 0; e < g.num_edges(); ++e) w.dihedral_valence[g.edge_name(e)] = 0;
  for (const auto& d : rho.path) w.dihedral_valence[g.edge_name(d.edge)]++;
  for (const auto& [name, count] : w.dihedral_valence) {
    if (count == 0)
      throw error(errc::not_nielsen_unique, "Nielsen path misses edge " + name);
    if (count == 1) w.free_edges.push_back(name);
  }
  return w;
}

NonfreeSubgraph nonfree_subgraph(const WedgeModel& w, double tol) {
  const MarkedGraph& g = w.map.graph();
  NonfreeSubgraph sub;
  std::vector<int> keep;
  for (int e = 0; e < g.num_edges(); ++e) {
    if (w.dihedral_valence.at(g.edge_name(e)) > 1) {
      keep.push_back(e);
      sub.edges.push_back(g.edge_name(e));
    }
  }
  if (keep.empty())
    throw error(errc::empty_subgraph, "every edge of the wedge model is free");

  TransitionMatrix M = transition_matrix(w.map);
  std::vector<std::int64_t> entries;
  for (int a : keep)
    for (int b : keep) entries.push_back(M.entry(a, b));
  sub.m1 = TransitionMatrix(sub.edges, std::move(entries));
  sub.lambda_prime = spectral_radius(sub.m1, tol);
  return sub;
}

std::int64_t i1_preimage_count(const WedgeModel&, const NonfreeSubgraph& sub,
                               const std::string& edge, int n) {
  auto it = std::find(sub.edges.begin(), sub.edges.end(), edge);
  if (it == sub.edges.end())
    throw error(errc::edge_not_in_subgraph, "edge " + edge + " has dihedral valence 1");
  int row = static_cast<int>(it - sub.edges.begin());
  TransitionMatrix P = sub.m1.pow(n);
  std::int64_t total = 0;
  for (int j = 0; j < sub.m1.dim(); ++j) total += P.entry(row, j);
  return total;
}

bool LeafPoint::operator<(const LeafPoint& o) const {
  if (edge != o.edge) return edge < o.edge;
  return position < o.position;
}

LeafGraph leaf_graph(const WedgeModel& w, const LeafPoint& x, int depth) {
  const MarkedGraph& g = w.map.graph();
  if (x.edge < 0 || x.edge >= g.num_edges())
    throw error(errc::position_out_of_range, "no such edge");
  double elen = g.edge_length(x.edge);
  double scale = std::max(1.0, g.total_length());
  double snap = 1e-9 * scale;
  if (x.position <= snap || x.position >= elen - snap)
    throw error(errc::position_out_of_range, "position must be interior to the edge");

  double L2 = path_length(g, w.rho.path);  // 2 Length(G)
  // arclength table of rho
  std::vector<double> cum{0};
  for (const auto& d : w.rho.path) cum.push_back(cum.back() + g.edge_length(d.edge));

  auto point_at = [&](double t) -> LeafPoint {
    auto it = std::upper_bound(cum.begin(), cum.end(), t);
    int i = std::max(0, static_cast<int>(it - cum.begin()) - 1);
    if (i >= static_cast<int>(w.rho.path.size())) i = static_cast<int>(w.rho.path.size()) - 1;
    OrientedEdge d = w.rho.path[i];
    double off = t - cum[i];
    double len = g.edge_length(d.edge);
    return {d.edge, d.forward ? off : len - off};
  };
  auto times_over = [&](const LeafPoint& p) {
    std::vector<double> out;
    for (size_t i = 0; i < w.rho.path.size(); ++i) {
      OrientedEdge d = w.rho.path[i];
      if (d.edge != p.edge) continue;
      double off = d.forward ? p.position : g.edge_length(d.edge) - p.position;
      double t = cum[i] + off;
      if (t > snap && t < L2 - snap && std::abs(t - L2 / 2) > snap) out.push_back(t);
    }
    return out;
  };

  LeafGraph lg;
  lg.depth = depth;
  auto key = [&](const LeafPoint& p) {
    return std::make_pair(p.edge, std::llround(p.position / scale * 1e9));
  };
  std::map<std::pair<int, long long>, int> index;
  auto add_point = [&](const LeafPoint& p) {
    auto [it, fresh] = index.emplace(key(p), lg.points.size());
    if (fresh) lg.points.push_back(p);
    return it->second;
  };
  add_point(x);

  std::set<long long> segment_seen;  // by rounded min(t, L2 - t)
  std::vector<int> frontier{0};
  for (int level = 0; level < depth && !frontier.empty(); ++level) {
    size_t before = lg.points.size();
    for (int pi : frontier) {
      LeafPoint p = lg.points[pi];
      for (double t : times_over(p)) {
        double tmate = L2 - t;
        long long seg_key = std::llround(std::min(t, tmate) / scale * 1e9);
        if (!segment_seen.insert(seg_key).second) continue;
        int qi = add_point(point_at(tmate));
        lg.segments.emplace_back(pi, qi);
      }
    }
    frontier.clear();
    for (size_t i = before; i < lg.points.size(); ++i) frontier.push_back(static_cast<int>(i));
  }

  std::vector<int> comp(lg.points.size());
  std::iota(comp.begin(), comp.end(), 0);
  auto find = [&](int a) {
    while (comp[a] != a) a = comp[a] = comp[comp[a]];
    return a;
  };
  lg.valence.assign(lg.points.size(), 0);
  lg.acyclic = true;
  for (auto [a, b] : lg.segments) {
    lg.valence[a]++;
    lg.valence[b]++;
    int ra = find(a), rb = find(b);
    if (ra == rb)
      lg.acyclic = false;
    else
      comp[ra] = rb;
  }
  return lg;
}

std::string leaf_graph_dot(const WedgeModel& w, const LeafGraph& lg) {
  const MarkedGraph& g = w.map.graph();
  std::ostringstream out;
  out.precision(6);
  out << "graph leaf {\n";
  for (size_t i = 0; i < lg.points.size(); ++i)
    out << "  p" << i << " [label=\"" << g.edge_name(lg.points[i].edge) << "@"
        << lg.points[i].position << "\"];\n";
  for (auto [a, b] : lg.segments) out << "  p" << a << " -- p" << b << ";\n";
  out << "}\n";
  return out.str();
}

GapReport verify_gap(const Classification& classification, int power,
                     const InverseEvidence& inverse, double tol) {
  if (classification.verdict != Classification::Verdict::parageometric_candidate)
    throw error(errc::not_parageometric,
                "gap verification needs a parageometric candidate, got " +
                    std::string(verdict_name(classification.verdict)));
  if (!classification.inp)
    throw error(errc::not_parageometric, "classification carries no Nielsen path");
  if (!inverse.representative && !inverse.growth_estimate)
    throw error(errc::missing_inverse_evidence,
                "supply a representative of the inverse or a growth estimate");

  const InpCandidate& cand = *classification.inp;
  GapReport rep;
  rep.power = power;
  rep.lambda_phi_power = cand.model->lambda;
  rep.provenance.push_back("lambda: PF eigenvalue of the representative, which models the "
                           "power-" + std::to_string(power) + " iterate");

  WedgeModel w = build_wedge(cand.model->map, cand.model->lambda, cand.path);
  NonfreeSubgraph sub = nonfree_subgraph(w);
  rep.lambda_prime_power = sub.lambda_prime;
  rep.provenance.push_back(
      "lambda': spectral radius of the transition matrix pruned to the " +
      std::to_string(sub.edges.size()) + " edges of dihedral valence > 1");

  double inv_base;
  if (inverse.representative) {
    auto tt = is_train_track(*inverse.representative);
    if (!tt.is_train_track)
      throw error(errc::not_train_track, "inverse representative is not a train track map");
    inv_base = pf_eigen(transition_matrix(*inverse.representative), tol).lambda;
    rep.provenance.push_back("lambda(inverse): PF eigenvalue of the supplied representative" +
                             (inverse.description.empty() ? "" : " (" + inverse.description + ")"));
    if (inverse.growth_estimate)
      rep.provenance.push_back("growth estimate for the inverse: " +
                               fmt(*inverse.growth_estimate) + " (cross-check)");
  } else {
    inv_base = *inverse.growth_estimate;
    rep.provenance.push_back("lambda(inverse): growth estimate" +
                             (inverse.description.empty() ? "" : " (" + inverse.description + ")"));
  }
  rep.lambda_inverse_power = std::pow(inv_base, power);

  rep.lambda_phi = std::pow(rep.lambda_phi_power, 1.0 / power);
  rep.lambda_prime = std::pow(rep.lambda_prime_power, 1.0 / power);
  rep.lambda_inverse = inv_base;

  rep.verdict = rep.lambda_inverse_power <= rep.lambda_prime_power + tol &&
                rep.lambda_prime_power < rep.lambda_phi_power - tol;
  if (rep.verdict) {
    rep.provenance.push_back("lambda(inverse) <= lambda' < lambda holds; the expansion "
                             "factor of the class strictly exceeds that of its inverse");
    rep.provenance.push_back("consequently the inverse class is neither geometric nor "
                             "parageometric");
  }
  return rep;
}

}  // namespace ttk
