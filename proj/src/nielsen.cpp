#include "ttk/nielsen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

namespace ttk {

namespace {

EdgePath canonical_path(const EdgePath& p) { return std::min(p, reverse_path(p)); }

PathRelabeling combine(const PathRelabeling& first, const PathRelabeling& second) {
  std::vector<EdgePath> images(first.source().num_edges());
  for (int e = 0; e < first.source().num_edges(); ++e)
    images[e] = second.apply(first.apply(OrientedEdge(e, true)));
  std::vector<int> vimages(first.source().num_vertices());
  for (int v = 0; v < first.source().num_vertices(); ++v)
    vimages[v] = second.apply_vertex(first.apply_vertex(v));
  return PathRelabeling(first.source_ptr(), second.target_ptr(), std::move(images),
                        std::move(vimages));
}

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(10);
  out << x;
  return out.str();
}

}  // namespace

bool is_nielsen_path(const GraphSelfMap& m, const EdgePath& p, int power) {
  if (!is_tight(p) || !endpoint_compatible(m.graph(), p)) return false;
  if (p.empty()) return true;  // constant path at a point; degenerate case
  int a = initial_vertex(m.graph(), p.front());
  int b = terminal_vertex(m.graph(), p.back());
  int ia = a, ib = b;
  EdgePath q = p;
  for (int i = 0; i < power; ++i) {
    ia = m.vertex_image(ia);
    ib = m.vertex_image(ib);
    q = m.apply(q);
  }
  return ia == a && ib == b && q == p;
}

SubdividedSelfMap subdivide_self_map(const GraphSelfMap& m, double lambda,
                                     std::vector<std::vector<double>> cuts_per_edge) {
  const MarkedGraph& g = m.graph();
  if (!g.has_metric()) throw error(errc::no_metric, "subdivision positions need a metric");
  double scale = std::max(1.0, g.total_length());
  double snap = 1e-7 * scale;

  cuts_per_edge.resize(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    auto& c = cuts_per_edge[e];
    std::sort(c.begin(), c.end());
    std::vector<double> clean;
    for (double x : c) {
      if (x < snap || x > g.edge_length(e) - snap) continue;
      if (!clean.empty() && x - clean.back() < snap) continue;
      clean.push_back(x);
    }
    c = std::move(clean);
  }

  // the refined graph, built in one pass
  std::vector<std::string> vertices;
  for (int v = 0; v < g.num_vertices(); ++v) vertices.push_back(g.vertex_name(v));
  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  std::vector<double> lengths;
  std::vector<int> orig_edge;
  std::vector<double> orig_lo, orig_hi;
  std::vector<std::vector<std::string>> chains(g.num_edges());
  std::vector<std::vector<std::string>> cut_vertex_names(g.num_edges());

  auto fresh_edge = [&](const std::string& base) {
    std::string n = base;
    while (g.edge_index(n) >= 0) n += "'";
    return n;
  };
  for (int e = 0; e < g.num_edges(); ++e) {
    const auto& ed = g.edge(e);
    const auto& c = cuts_per_edge[e];
    if (c.empty()) {
      chains[e] = {ed.name};
      edges.emplace_back(ed.name, g.vertex_name(ed.from), g.vertex_name(ed.to));
      lengths.push_back(g.edge_length(e));
      orig_edge.push_back(e);
      orig_lo.push_back(0);
      orig_hi.push_back(g.edge_length(e));
      continue;
    }
    std::string prev = g.vertex_name(ed.from);
    double prev_pos = 0;
    for (size_t k = 0; k <= c.size(); ++k) {
      bool last = k == c.size();
      std::string to = last ? g.vertex_name(ed.to) : ed.name + ".v" + std::to_string(k + 1);
      if (!last) {
        vertices.push_back(to);
        cut_vertex_names[e].push_back(to);
      }
      double pos = last ? g.edge_length(e) : c[k];
      std::string name = fresh_edge(ed.name + "." + std::to_string(k + 1));
      chains[e].push_back(name);
      edges.emplace_back(name, prev, to);
      lengths.push_back(pos - prev_pos);
      orig_edge.push_back(e);
      orig_lo.push_back(prev_pos);
      orig_hi.push_back(pos);
      prev = to;
      prev_pos = pos;
    }
  }
  auto out = std::make_shared<MarkedGraph>(vertices, edges, lengths);

  std::vector<EdgePath> rel_images(g.num_edges());
  std::vector<int> rel_vertices(g.num_vertices());
  for (int v = 0; v < g.num_vertices(); ++v) rel_vertices[v] = out->vertex_index(g.vertex_name(v));
  for (int e = 0; e < g.num_edges(); ++e)
    for (const auto& n : chains[e]) rel_images[e].emplace_back(out->edge_index(n), true);
  PathRelabeling relabel(m.graph_ptr(), out, rel_images, rel_vertices);

  // refined image paths with arclength tables; cut points must land on
  // refined vertices, which pins down both piece images and vertex images
  std::vector<EdgePath> refined(g.num_edges());
  std::vector<std::vector<double>> cum(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    refined[e] = relabel.apply(m.edge_image(e));
    cum[e].push_back(0);
    for (const auto& d : refined[e]) cum[e].push_back(cum[e].back() + out->edge_length(d.edge));
    double expect = lambda * g.edge_length(e);
    if (std::abs(cum[e].back() - expect) > 1e-5 * scale * std::max(1.0, lambda))
      throw error(errc::not_train_track,
                  "map does not stretch edge lengths by the given factor");
  }
  double img_snap = 1e-5 * scale * std::max(1.0, lambda);
  auto locate_boundary = [&](int e, double pos) -> int {
    const auto& c = cum[e];
    auto it = std::lower_bound(c.begin(), c.end(), pos - img_snap);
    if (it == c.end() || std::abs(*it - pos) > img_snap)
      throw error(errc::not_train_track,
                  "subdivision point does not map to a refined vertex");
    return static_cast<int>(it - c.begin());
  };

  int ne = out->num_edges();
  std::vector<EdgePath> new_images(ne);
  for (int piece = 0; piece < ne; ++piece) {
    int e = orig_edge[piece];
    int from = locate_boundary(e, lambda * orig_lo[piece]);
    int to = locate_boundary(e, lambda * orig_hi[piece]);
    if (to <= from)
      throw error(errc::not_train_track, "empty refined image for a subdivided piece");
    new_images[piece] = EdgePath(refined[e].begin() + from, refined[e].begin() + to);
  }

  std::vector<int> new_vimg(out->num_vertices(), -1);
  for (int v = 0; v < g.num_vertices(); ++v)
    new_vimg[rel_vertices[v]] = rel_vertices[m.vertex_image(v)];
  for (int e = 0; e < g.num_edges(); ++e) {
    for (size_t k = 0; k < cuts_per_edge[e].size(); ++k) {
      int mid = out->vertex_index(cut_vertex_names[e][k]);
      int b = locate_boundary(e, lambda * cuts_per_edge[e][k]);
      new_vimg[mid] = b < static_cast<int>(refined[e].size())
                          ? initial_vertex(*out, refined[e][b])
                          : terminal_vertex(*out, refined[e].back());
    }
  }

  SubdividedSelfMap res{GraphSelfMap(out, new_vimg, new_images), relabel,
                        std::move(orig_edge), std::move(orig_lo), std::move(orig_hi)};
  auto chk = check_map(res.map);
  if (!chk.valid)
    throw error(errc::not_train_track,
                "refined map is invalid: " + (chk.problems.empty() ? "" : chk.problems[0]));
  return res;
}

namespace {

GraphSelfMap power_with_guard(const GraphSelfMap& m, int q, long guard) {
  GraphSelfMap acc = identity_map(m.graph_ptr());
  for (int i = 0; i < q; ++i) {
    acc = compose(m, acc);
    long total = 0;
    for (int e = 0; e < acc.graph().num_edges(); ++e)
      total += static_cast<long>(acc.edge_image(e).size());
    if (total > guard)
      throw error(errc::no_convergence, "power image size exceeds the guard");
  }
  return acc;
}

}  // namespace

NielsenModel power_model(const GraphSelfMap& metric_map, double lambda, int q,
                         long image_size_guard) {
  GraphSelfMap mq = power_with_guard(metric_map, q, image_size_guard);
  double lam_q = std::pow(lambda, q);
  const MarkedGraph& g = metric_map.graph();

  // interior fixed points of the q-th power, from the affine fixed point
  // equation on each traversal of an edge by its own image
  std::vector<std::vector<double>> cuts(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) {
    double off = 0;
    for (const auto& d : mq.edge_image(e)) {
      double len = g.edge_length(d.edge);
      if (d.edge == e) {
        double x = d.forward ? off / (lam_q - 1) : (off + len) / (lam_q + 1);
        if (x > 0 && x < g.edge_length(e)) cuts[e].push_back(x);
      }
      off += len;
    }
  }

  long total_cuts = 0;
  for (const auto& c : cuts) total_cuts += static_cast<long>(c.size());
  if (g.num_edges() + total_cuts > 400)
    throw error(errc::no_convergence, "power model size exceeds the guard");

  SubdividedSelfMap sub = subdivide_self_map(mq, lam_q, std::move(cuts));
  NielsenModel model;
  model.map = sub.map;
  model.lambda = lam_q;
  model.power = q;
  model.relabel = sub.relabel;
  model.gate_structure = gates(sub.map);
  model.orig_edge = std::move(sub.orig_edge);
  model.orig_lo = std::move(sub.orig_lo);
  model.orig_hi = std::move(sub.orig_hi);
  return model;
}

namespace {

struct Arrival {
  double length;
  int vertex;
  int prefix_darts;
};

// Indivisible fixed Nielsen paths of the model map: two eigenrays growing
// from fixed directions at fixed points, meeting at equal length in an
// illegal turn, verified exactly.
std::vector<NielsenPath> search_fixed_inps(const NielsenModel& model) {
  const GraphSelfMap& m = model.map;
  const MarkedGraph& g = m.graph();
  double L = g.total_length();
  double half_max = L + 1e-6 * std::max(1.0, L);
  double len_tol = 1e-6 * std::max(1.0, L);

  auto dm = direction_map(m);
  std::vector<OrientedEdge> fixed_darts;
  for (int i = 0; i < 2 * g.num_edges(); ++i)
    if (dm[i] == dart_from_id(i)) fixed_darts.push_back(dart_from_id(i));

  std::vector<EdgePath> rays(fixed_darts.size());
  std::vector<std::vector<Arrival>> arrivals(fixed_darts.size());
  for (size_t i = 0; i < fixed_darts.size(); ++i) {
    EdgePath ray{fixed_darts[i]};
    for (int it = 0; it < 256 && path_length(g, ray) < half_max; ++it) {
      EdgePath next = m.apply(ray);
      if (next.size() < ray.size() || !std::equal(ray.begin(), ray.end(), next.begin()))
        throw error(errc::not_train_track, "eigenray is not nested under iteration");
      ray = std::move(next);
    }
    double cumlen = 0;
    for (size_t k = 0; k < ray.size(); ++k) {
      cumlen += g.edge_length(ray[k].edge);
      if (cumlen > half_max + len_tol) break;
      arrivals[i].push_back({cumlen, terminal_vertex(g, ray[k]), static_cast<int>(k) + 1});
    }
    rays[i] = std::move(ray);
  }

  std::vector<NielsenPath> found;
  std::set<EdgePath> seen;
  for (size_t i = 0; i < fixed_darts.size(); ++i) {
    for (size_t j = i + 1; j < fixed_darts.size(); ++j) {
      for (const auto& a : arrivals[i]) {
        for (const auto& b : arrivals[j]) {
          if (std::abs(a.length - b.length) > len_tol) continue;
          if (a.vertex != b.vertex) continue;
          OrientedEdge la = rays[i][a.prefix_darts - 1];
          OrientedEdge lb = rays[j][b.prefix_darts - 1];
          if (la == lb) continue;  // degenerate junction
          if (!model.gate_structure.turn_illegal(g, Turn(la.reversed(), lb.reversed())))
            continue;
          EdgePath rho(rays[i].begin(), rays[i].begin() + a.prefix_darts);
          EdgePath back(rays[j].begin(), rays[j].begin() + b.prefix_darts);
          EdgePath rev = reverse_path(back);
          rho.insert(rho.end(), rev.begin(), rev.end());
          if (!is_nielsen_path(m, rho, 1)) continue;
          if (!seen.insert(canonical_path(rho)).second) continue;
          NielsenPath np;
          np.path = rho;
          np.power = model.power;
          np.illegal_index = a.prefix_darts;
          np.endpoints_coincide =
              initial_vertex(g, rho.front()) == terminal_vertex(g, rho.back());
          found.push_back(std::move(np));
        }
      }
    }
  }
  return found;
}

// Footprint of a model path in the base graph, for deduplication across
// powers: per dart, the traversed interval of the original edge.
using Footprint = std::vector<std::array<long long, 3>>;

Footprint footprint_of(const NielsenModel& model, const EdgePath& p) {
  double scale = std::max(1.0, model.relabel.source().total_length());
  auto round_pos = [&](double x) { return std::llround(x / scale * 1e7); };
  Footprint fp;
  for (const auto& d : p) {
    long long lo = round_pos(model.orig_lo[d.edge]);
    long long hi = round_pos(model.orig_hi[d.edge]);
    if (!d.forward) std::swap(lo, hi);
    long long e = static_cast<long long>(model.orig_edge[d.edge]);
    // merge contiguous intervals so footprints are independent of the
    // subdivision granularity of the model
    if (!fp.empty() && fp.back()[0] == e && fp.back()[2] == lo &&
        (fp.back()[1] < fp.back()[2]) == (lo < hi))
      fp.back()[2] = hi;
    else
      fp.push_back({e, lo, hi});
  }
  Footprint rev(fp.rbegin(), fp.rend());
  for (auto& t : rev) std::swap(t[1], t[2]);
  return std::min(fp, rev);
}

}  // namespace

InpResult find_inp_metric(const GraphSelfMap& metric_map, double lambda, int power_bound) {
  InpResult res;
  res.base_lambda = lambda;
  // Direction periods alone can miss Nielsen paths whose endpoints are
  // interior periodic points (their periods need not divide the direction
  // period lcm), so the default bound covers small powers regardless.
  if (power_bound <= 0) power_bound = std::max(gates(metric_map).period_lcm, 8);
  std::set<Footprint> seen;
  for (int q = 1; q <= power_bound; ++q) {
    std::shared_ptr<const NielsenModel> model;
    try {
      model = std::make_shared<NielsenModel>(power_model(metric_map, lambda, q));
    } catch (const error& e) {
      if (e.code == errc::no_convergence) {
        res.notes.push_back("power " + std::to_string(q) +
                            " skipped: image size guard reached");
        break;
      }
      throw;
    }
    res.powers_searched.push_back(q);
    for (auto& np : search_fixed_inps(*model)) {
      if (!seen.insert(footprint_of(*model, np.path)).second) continue;
      res.paths.push_back({model, np});
    }
  }
  return res;
}

InpResult find_inp(const GraphSelfMap& m, int power_bound) {
  auto tt = is_train_track(m);
  if (!tt.is_train_track)
    throw error(errc::not_train_track, "Nielsen path search requires a train track map");
  auto em = eigen_metric(m);
  return find_inp_metric(em.map, em.lambda, power_bound);
}

EliminationResult nielsen_elimination(const GraphSelfMap& m, int max_back) {
  auto tt = is_train_track(m);
  if (!tt.is_train_track)
    throw error(errc::not_train_track, "elimination requires a train track map");
  auto em = eigen_metric(m);
  FoldSequence seq;
  try {
    seq = fold_factorization(em.map);
  } catch (const error& e) {
    throw error(errc::no_factorization, std::string("factorization failed: ") + e.what());
  }
  FoldCycle cycle = build_fold_cycle(em.map, std::move(seq), em.lambda);
  int n = cycle.length();

  EliminationResult res;
  res.cycle_length = n;

  // E_0: all tight length-2 edge paths with an illegal turn, up to reversal
  const CyclePosition& base = cycle.positions[0];
  const MarkedGraph& g0 = *base.graph;
  std::set<EdgePath> level_set;
  for (int e1 = 0; e1 < g0.num_edges(); ++e1)
    for (bool f1 : {true, false})
      for (int e2 = 0; e2 < g0.num_edges(); ++e2)
        for (bool f2 : {true, false}) {
          OrientedEdge a(e1, f1), b(e2, f2);
          if (terminal_vertex(g0, a) != initial_vertex(g0, b)) continue;
          if (b == a.reversed()) continue;
          if (!base.gate_structure.turn_illegal(g0, Turn(a.reversed(), b))) continue;
          level_set.insert(canonical_path({a, b}));
        }
  std::vector<EdgePath> level(level_set.begin(), level_set.end());

  if (level.empty()) {
    res.kind = EliminationResult::Kind::empty;
    res.steps = 0;
    return res;
  }

  std::map<std::vector<EdgePath>, int> seen_at_base{{level, 0}};
  for (int k = 1; k <= max_back; ++k) {
    int pos = ((-k) % n + n) % n;  // position holding E_{-k}
    double cap = 2 * cycle.positions[pos].total_length +
                 1e-8 * std::max(1.0, cycle.positions[pos].total_length);
    level = pullback_one_illegal(cycle, pos, level, cap);
    res.set_sizes.push_back(level.size());
    if (level.empty()) {
      res.kind = EliminationResult::Kind::empty;
      res.steps = k;
      return res;
    }
    if (pos == 0) {
      auto [it, fresh] = seen_at_base.emplace(level, k);
      if (!fresh) {
        res.kind = EliminationResult::Kind::survivors;
        res.steps = k;
        res.first_repeat = it->second;
        res.period = k - it->second;
        res.survivors = level;
        return res;
      }
    }
  }
  res.kind = EliminationResult::Kind::exhausted;
  res.steps = max_back;
  return res;
}

// ---------------------------------------------------------------------------
// Nielsen path folding and collapsing.

namespace {

// Quotients the graph along the identification alpha(t) ~ beta(t) of the two
// legal halves of rho, for t in [t_lo, half]. With t_lo = half/lambda this is
// the fold of the maximal equal-image initial segments at the illegal turn;
// with t_lo = 0 the whole path collapses and is eliminated.
InpFoldResult quotient_along_rho(const GraphSelfMap& metric_map, double lambda,
                                 const NielsenPath& rho, bool collapse_all) {
  const MarkedGraph& g = metric_map.graph();
  double scale = std::max(1.0, g.total_length());
  double snap = 1e-7 * scale;

  if (!is_nielsen_path(metric_map, rho.path, 1))
    throw error(errc::not_verified_nielsen, "path is not a fixed Nielsen path of the map");
  GateStructure gs = gates(metric_map);
  std::vector<int> illegal;
  auto ts = turns_taken(rho.path);
  for (size_t i = 0; i < ts.size(); ++i)
    if (gs.turn_illegal(g, ts[i])) illegal.push_back(static_cast<int>(i) + 1);
  if (illegal.size() != 1)
    throw error(errc::not_verified_nielsen,
                "Nielsen path must have exactly one illegal turn to fold");
  int split = illegal[0];

  EdgePath alpha(rho.path.begin(), rho.path.begin() + split);
  EdgePath beta = reverse_path(EdgePath(rho.path.begin() + split, rho.path.end()));
  double la = path_length(g, alpha), lb = path_length(g, beta);
  if (std::abs(la - lb) > 1e-6 * scale)
    throw error(errc::not_verified_nielsen, "legal halves have different lengths");
  double half = (la + lb) / 2;
  double t_lo = collapse_all ? 0.0 : half / lambda;

  // Cut parameters on [0, half]: the region boundary t_lo plus every dart
  // boundary of either half, closed under two rules so that the refined
  // halves align piece by piece and the map descends to the refinement:
  //  - transfers: a cut inside an edge induces cuts at the same edge
  //    position under every traversal of that edge by either half;
  //  - expansion: the point at parameter t maps to the point at parameter
  //    lambda t while that stays within the halves.
  struct Traversal {
    int edge;
    bool fwd;
    double start;
  };
  std::vector<Traversal> travs;
  for (const EdgePath* h : {&alpha, &beta}) {
    double cum = 0;
    for (const auto& d : *h) {
      travs.push_back({d.edge, d.forward, cum});
      cum += g.edge_length(d.edge);
    }
  }
  std::vector<double> T;
  auto add_t = [&](double t) {
    if (t < snap || t > half - snap) return false;
    for (double x : T)
      if (std::abs(x - t) < snap) return false;
    T.push_back(t);
    return true;
  };
  add_t(t_lo);
  for (const auto& tr : travs) add_t(tr.start);
  for (int round = 0;; ++round) {
    if (round > 64 || T.size() > 5000)
      throw error(errc::not_verified_nielsen, "identification closure did not stabilize");
    bool changed = false;
    std::vector<double> cur = T;
    for (double t : cur) {
      for (const auto& a : travs) {
        double len = g.edge_length(a.edge);
        if (t < a.start - snap || t > a.start + len + snap) continue;
        double pos = a.fwd ? t - a.start : len - (t - a.start);
        for (const auto& b : travs) {
          if (b.edge != a.edge) continue;
          double lenb = g.edge_length(b.edge);
          changed |= add_t(b.start + (b.fwd ? pos : lenb - pos));
        }
      }
      if (lambda * t <= half + snap) changed |= add_t(lambda * t);
    }
    if (!changed) break;
  }
  std::sort(T.begin(), T.end());

  std::vector<std::vector<double>> cuts(g.num_edges());
  for (double t : T) {
    for (const auto& a : travs) {
      double len = g.edge_length(a.edge);
      if (t < a.start + snap || t > a.start + len - snap) continue;  // at a vertex
      cuts[a.edge].push_back(a.fwd ? t - a.start : len - (t - a.start));
    }
  }

  SubdividedSelfMap sub = subdivide_self_map(metric_map, lambda, std::move(cuts));
  const MarkedGraph& gg = sub.map.graph();

  EdgePath alpha2 = sub.relabel.apply(alpha);
  EdgePath beta2 = sub.relabel.apply(beta);

  auto region_pieces = [&](const EdgePath& h) {
    std::vector<OrientedEdge> pieces;
    double cum = 0;
    for (const auto& d : h) {
      if (cum >= t_lo - snap) pieces.push_back(d);
      cum += gg.edge_length(d.edge);
    }
    return pieces;
  };
  std::vector<OrientedEdge> A = region_pieces(alpha2), B = region_pieces(beta2);
  if (A.size() != B.size())
    throw error(errc::not_verified_nielsen, "half refinements do not align");
  for (size_t i = 0; i < A.size(); ++i)
    if (std::abs(gg.edge_length(A[i].edge) - gg.edge_length(B[i].edge)) > 1e-6 * scale)
      throw error(errc::not_verified_nielsen, "identified pieces have different lengths");

  // union-find over edges with orientation parity, and over vertices
  int ne = gg.num_edges(), nv = gg.num_vertices();
  std::vector<int> eparent(ne), eparity(ne, 0), vparent(nv);
  std::iota(eparent.begin(), eparent.end(), 0);
  std::iota(vparent.begin(), vparent.end(), 0);
  std::function<std::pair<int, int>(int)> efind = [&](int x) -> std::pair<int, int> {
    if (eparent[x] == x) return {x, 0};
    auto [r, p] = efind(eparent[x]);
    eparent[x] = r;
    eparity[x] ^= p;
    return {r, eparity[x]};
  };
  std::function<int(int)> vfind = [&](int x) {
    while (vparent[x] != x) x = vparent[x] = vparent[vparent[x]];
    return x;
  };
  auto vunion = [&](int a, int b) { vparent[vfind(a)] = vfind(b); };
  auto eunion = [&](OrientedEdge a, OrientedEdge b) {
    auto [ra, pa] = efind(a.edge);
    auto [rb, pb] = efind(b.edge);
    int rel = (a.forward == b.forward ? 0 : 1) ^ pa ^ pb;
    if (ra == rb) {
      if (rel != 0)
        throw error(errc::not_verified_nielsen, "fold identifies an edge with its reverse");
      return;
    }
    eparent[ra] = rb;
    eparity[ra] = rel;
  };
  for (size_t i = 0; i < A.size(); ++i) {
    eunion(A[i], B[i]);
    vunion(initial_vertex(gg, A[i]), initial_vertex(gg, B[i]));
    vunion(terminal_vertex(gg, A[i]), terminal_vertex(gg, B[i]));
  }

  // class representatives: the smallest name in each class
  std::vector<int> erep(ne, -1), vrep(nv, -1);
  for (int v = 0; v < nv; ++v) {
    int r = vfind(v);
    if (vrep[r] < 0 || gg.vertex_name(v) < gg.vertex_name(vrep[r])) vrep[r] = v;
  }
  for (int e = 0; e < ne; ++e) {
    int r = efind(e).first;
    if (erep[r] < 0 || gg.edge_name(e) < gg.edge_name(erep[r])) erep[r] = e;
  }

  std::vector<std::string> qvertices;
  std::vector<int> vclass(nv, -1);
  for (int v = 0; v < nv; ++v) {
    int rep = vrep[vfind(v)];
    if (vclass[rep] < 0) {
      vclass[rep] = static_cast<int>(qvertices.size());
      qvertices.push_back(gg.vertex_name(rep));
    }
  }
  for (int v = 0; v < nv; ++v) vclass[v] = vclass[vrep[vfind(v)]];

  // orientation of every edge relative to its class representative
  std::vector<int> eflip(ne, 0);
  for (int e = 0; e < ne; ++e) {
    auto [r, p] = efind(e);
    eflip[e] = p ^ efind(erep[r]).second;
  }
  std::vector<std::tuple<std::string, std::string, std::string>> qedges;
  std::vector<double> qlengths;
  std::vector<int> eclass(ne, -1);
  for (int e = 0; e < ne; ++e) {
    int rep = erep[efind(e).first];
    if (e != rep) continue;
    eclass[e] = static_cast<int>(qedges.size());
    qedges.emplace_back(gg.edge_name(e), qvertices[vclass[gg.edge(e).from]],
                        qvertices[vclass[gg.edge(e).to]]);
    qlengths.push_back(gg.edge_length(e));
  }
  for (int e = 0; e < ne; ++e) eclass[e] = eclass[erep[efind(e).first]];
  for (int e = 0; e < ne; ++e)
    if (std::abs(gg.edge_length(e) - qlengths[eclass[e]]) > 1e-6 * scale)
      throw error(errc::not_verified_nielsen, "identified edges have different lengths");

  auto qgraph = std::make_shared<MarkedGraph>(qvertices, qedges, qlengths);
  std::vector<EdgePath> qimages(ne);
  std::vector<int> qvimages(nv);
  for (int e = 0; e < ne; ++e) qimages[e] = {OrientedEdge(eclass[e], eflip[e] == 0)};
  for (int v = 0; v < nv; ++v) qvimages[v] = vclass[v];
  PathRelabeling quotient(sub.map.graph_ptr(), qgraph, qimages, qvimages);

  // induced self-map: substitute and check tightness plus well-definedness
  auto substitute = [&](const EdgePath& p) {
    EdgePath out;
    for (const auto& d : p)
      out.emplace_back(eclass[d.edge], d.forward == (eflip[d.edge] == 0));
    return out;
  };
  std::vector<EdgePath> new_images(qgraph->num_edges());
  std::vector<char> have(qgraph->num_edges(), 0);
  for (int e = 0; e < ne; ++e) {
    EdgePath img = substitute(sub.map.edge_image(e));
    if (eflip[e] != 0) img = reverse_path(img);
    if (!is_tight(img))
      throw error(errc::not_verified_nielsen, "quotient map is not an immersion");
    int cl = eclass[e];
    if (!have[cl]) {
      new_images[cl] = img;
      have[cl] = 1;
    } else if (new_images[cl] != img) {
      throw error(errc::not_verified_nielsen, "quotient map is not well defined");
    }
  }
  std::vector<int> new_vimg(qgraph->num_vertices(), -1);
  for (int v = 0; v < nv; ++v) {
    int cl = vclass[v];
    int img = vclass[sub.map.vertex_image(v)];
    if (new_vimg[cl] >= 0 && new_vimg[cl] != img)
      throw error(errc::not_verified_nielsen, "quotient vertex map is not well defined");
    new_vimg[cl] = img;
  }

  InpFoldResult res;
  res.map = GraphSelfMap(qgraph, new_vimg, new_images);
  res.lambda = lambda;
  res.relabel = combine(sub.relabel, quotient);
  auto chk = check_map(res.map);
  if (!chk.valid)
    throw error(errc::not_verified_nielsen,
                "quotient map is invalid: " + (chk.problems.empty() ? "" : chk.problems[0]));
  return res;
}

}  // namespace

InpFoldResult fold_inp(const GraphSelfMap& metric_map, double lambda, const NielsenPath& rho) {
  return quotient_along_rho(metric_map, lambda, rho, false);
}

InpFoldResult collapse_inp(const GraphSelfMap& metric_map, double lambda,
                           const NielsenPath& rho) {
  return quotient_along_rho(metric_map, lambda, rho, true);
}

// ---------------------------------------------------------------------------
// Classification.

const char* verdict_name(Classification::Verdict v) {
  switch (v) {
    case Classification::Verdict::no_periodic_nielsen_path: return "NoPeriodicNielsenPath";
    case Classification::Verdict::geometric_candidate: return "GeometricCandidate";
    case Classification::Verdict::parageometric_candidate: return "ParageometricCandidate";
    case Classification::Verdict::indeterminate: return "Indeterminate";
  }
  return "Indeterminate";
}

Classification classify(const GraphSelfMap& m, int power_bound, int max_back,
                        double length_tol) {
  Classification c;
  auto indeterminate = [&](const std::string& why) {
    c.verdict = Classification::Verdict::indeterminate;
    c.reason = why;
    return c;
  };

  auto chk = check_map(m);
  if (!chk.valid)
    return indeterminate("invalid map: " + (chk.problems.empty() ? "" : chk.problems[0]));
  auto tt = is_train_track(m);
  if (!tt.is_train_track) {
    std::string why = "NotTrainTrack";
    if (tt.witness)
      why += ": image of " + m.graph().edge_name(tt.witness->edge) + " crosses " +
             format_turn(m.graph(), tt.witness->turn);
    return indeterminate(why);
  }
  TransitionMatrix M = transition_matrix(m);
  int expo = 0;
  if (!is_primitive(M, &expo)) return indeterminate("transition matrix is not primitive");
  bool has_zero = false;
  for (int i = 0; i < M.dim(); ++i)
    for (int j = 0; j < M.dim(); ++j) has_zero |= M.entry(i, j) == 0;
  if (has_zero)
    c.notes.push_back(
        "transition matrix is not entrywise positive; primitivity holds with exponent " +
        std::to_string(expo));
  for (int v = 0; v < m.graph().num_vertices(); ++v) {
    auto w = local_whitehead_graph(m, v);
    if (!w.connected)
      return indeterminate("turn graph is disconnected at vertex " + m.graph().vertex_name(v));
  }
  c.notes.push_back("turn graph connected at every vertex");

  auto em = eigen_metric(m);
  c.lambda = em.lambda;

  c.elimination = nielsen_elimination(m, max_back);
  const auto& elim = *c.elimination;
  switch (elim.kind) {
    case EliminationResult::Kind::empty:
      c.notes.push_back("elimination emptied after " + std::to_string(elim.steps) + " steps");
      break;
    case EliminationResult::Kind::survivors:
      c.notes.push_back("elimination found a repeating family after " +
                        std::to_string(elim.steps) +
                        " steps; candidates passed to the Nielsen path search");
      break;
    case EliminationResult::Kind::exhausted:
      c.notes.push_back("elimination exhausted its step budget");
      break;
  }

  // The search is the authority: elimination works at whole-edge resolution
  // and cannot see Nielsen paths whose endpoints are interior periodic
  // points, so its empty verdict counts only when the search also comes up
  // empty within the power bound.
  InpResult inp = find_inp_metric(em.map, em.lambda, power_bound);
  c.power_bound_used = inp.powers_searched.empty() ? 0 : inp.powers_searched.back();
  for (const auto& n : inp.notes) c.notes.push_back(n);
  c.notes.push_back("periodic Nielsen paths searched for powers up to " +
                    std::to_string(c.power_bound_used));
  if (inp.paths.empty()) {
    if (elim.kind == EliminationResult::Kind::empty) {
      c.verdict = Classification::Verdict::no_periodic_nielsen_path;
      c.notes.push_back("no periodic Nielsen paths (emptied after " +
                        std::to_string(elim.steps) + " steps)");
      c.notes.push_back("the attracting tree T+ is nongeometric");
      c.notes.push_back("the class is neither geometric nor parageometric");
      c.notes.push_back(
          "fully irreducible and nongeometric by the sufficient conditions: primitive "
          "transition matrix, connected turn graphs, no periodic Nielsen paths");
      return c;
    }
    return indeterminate(
        "elimination did not terminate empty, and no indivisible periodic Nielsen path "
        "was found within the caps");
  }
  if (elim.kind == EliminationResult::Kind::empty)
    c.notes.push_back(
        "elimination emptied at whole-edge resolution, but the search found Nielsen "
        "paths with interior endpoints; the search takes precedence");
  if (inp.paths.size() > 1) {
    c.inp = inp.paths.front();
    return indeterminate("found " + std::to_string(inp.paths.size()) +
                         " indivisible periodic Nielsen paths; not Nielsen-unique");
  }

  const InpCandidate& cand = inp.paths.front();
  c.inp = cand;
  const MarkedGraph& mg = cand.model->map.graph();
  double L = mg.total_length();
  double rho_len = path_length(mg, cand.path.path);
  if (std::abs(rho_len - 2 * L) > length_tol * 2 * L)
    return indeterminate("unique Nielsen path has length " + fmt(rho_len) +
                         ", not 2 Length(G) = " + fmt(2 * L));
  if (cand.model->gate_structure.illegal_turns.size() != 1)
    return indeterminate(
        "representative has " +
        std::to_string(cand.model->gate_structure.illegal_turns.size()) +
        " illegal turns; a Nielsen-unique representative has exactly one");

  for (const auto& d : cand.path.path) c.edge_counts[mg.edge_name(d.edge)]++;
  for (int e = 0; e < mg.num_edges(); ++e)
    if (!c.edge_counts.count(mg.edge_name(e))) c.edge_counts[mg.edge_name(e)] = 0;

  if (cand.path.endpoints_coincide) {
    for (const auto& [name, count] : c.edge_counts)
      if (count != 2)
        return indeterminate("closed Nielsen path traverses " + name + " " +
                             std::to_string(count) + " times, expected exactly twice");
    c.verdict = Classification::Verdict::geometric_candidate;
    c.notes.push_back("Nielsen path is closed and covers every edge exactly twice");
    c.notes.push_back("the attracting tree T+ is geometric");
    return c;
  }
  std::string once, thrice;
  for (const auto& [name, count] : c.edge_counts) {
    if (count == 1 && once.empty()) once = name;
    if (count >= 3 && thrice.empty()) thrice = name;
  }
  if (once.empty() || thrice.empty())
    return indeterminate(
        "Nielsen path is not closed but lacks the expected traversal pattern "
        "(an edge covered once and an edge covered at least three times)");
  c.verdict = Classification::Verdict::parageometric_candidate;
  c.notes.push_back("Nielsen path is not closed; edge " + once +
                    " is traversed exactly once and edge " + thrice + " at least thrice");
  c.notes.push_back("the attracting tree T+ is geometric");
  return c;
}

std::optional<DerivedRepresentative> derive_nielsen_unique(const GraphSelfMap& m,
                                                           int power_bound) {
  auto tt = is_train_track(m);
  if (!tt.is_train_track) return std::nullopt;
  auto em = eigen_metric(m);

  for (int q = 1; q <= power_bound; ++q) {
    std::shared_ptr<const NielsenModel> model;
    try {
      model = std::make_shared<NielsenModel>(power_model(em.map, em.lambda, q));
    } catch (const error&) {
      break;
    }
    auto paths = search_fixed_inps(*model);
    if (paths.empty()) continue;

    DerivedRepresentative out;
    out.power = q;
    out.log.push_back("power " + std::to_string(q) + ": " + std::to_string(paths.size()) +
                      " indivisible Nielsen path(s)");
    GraphSelfMap cur = model->map;
    double cur_lambda = model->lambda;

    for (int iter = 0; iter < 12; ++iter) {
      InpResult all = find_inp_metric(cur, cur_lambda, 0);
      if (all.paths.empty()) {
        out.log.push_back("collapse removed every Nielsen path; derivation failed");
        return std::nullopt;
      }
      std::vector<double> lens;
      for (const auto& cnd : all.paths)
        lens.push_back(path_length(cnd.model->map.graph(), cnd.path.path));
      if (all.paths.size() == 1) {
        const auto& cnd = all.paths.front();
        double L = cnd.model->map.graph().total_length();
        if (std::abs(lens[0] - 2 * L) <= 1e-6 * 2 * L) {
          out.map = cnd.model->map;
          out.lambda = cnd.model->lambda;
          out.power *= cnd.path.power;
          out.rho = cnd.path;
          out.log.push_back("unique Nielsen path of length 2 Length(G) reached");
          return out;
        }
      }
      size_t pick = std::min_element(lens.begin(), lens.end()) - lens.begin();
      const auto& cnd = all.paths[pick];
      out.log.push_back("collapsing a Nielsen path of length " + fmt(lens[pick]) +
                        " at power " + std::to_string(cnd.path.power));
      InpFoldResult folded = collapse_inp(cnd.model->map, cnd.model->lambda, cnd.path);
      out.power *= cnd.path.power;
      cur = folded.map;
      cur_lambda = folded.lambda;
    }
    out.log.push_back("collapse iteration budget exhausted");
    return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace ttk
