#include "ttk/fold.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace ttk {

namespace {

// Mutable working copy of a graph-under-folding together with the residual
// map to the fixed target.
struct LoopState {
  std::shared_ptr<const MarkedGraph> graph;
  std::vector<int> vimg;             // vertex -> target vertex
  std::vector<EdgePath> eimg;        // edge -> path in target
  int traced_vertex = 0;
};

std::vector<OrientedEdge> darts_at(const MarkedGraph& g, int v) {
  std::vector<OrientedEdge> out;
  for (int e = 0; e < g.num_edges(); ++e)
    for (bool fwd : {true, false})
      if (initial_vertex(g, {e, fwd}) == v) out.emplace_back(e, fwd);
  std::sort(out.begin(), out.end(), [&](OrientedEdge a, OrientedEdge b) {
    if (g.edge_name(a.edge) != g.edge_name(b.edge))
      return g.edge_name(a.edge) < g.edge_name(b.edge);
    return a.forward && !b.forward;
  });
  return out;
}

EdgePath dart_residual(const LoopState& s, OrientedEdge d) {
  return d.forward ? s.eimg[d.edge] : reverse_path(s.eimg[d.edge]);
}

// Finds the lexicographically first pair of darts at a common vertex whose
// residual images share a first edge.
std::optional<std::pair<OrientedEdge, OrientedEdge>> find_foldable(const LoopState& s) {
  const MarkedGraph& g = *s.graph;
  std::vector<int> vorder(g.num_vertices());
  std::iota(vorder.begin(), vorder.end(), 0);
  std::sort(vorder.begin(), vorder.end(),
            [&](int a, int b) { return g.vertex_name(a) < g.vertex_name(b); });
  for (int v : vorder) {
    auto darts = darts_at(g, v);
    for (size_t i = 0; i < darts.size(); ++i)
      for (size_t j = i + 1; j < darts.size(); ++j)
        if (dart_residual(s, darts[i]).front() == dart_residual(s, darts[j]).front())
          return std::make_pair(darts[i], darts[j]);
  }
  return std::nullopt;
}

// Cuts `edge` into `parts` so that the piece images split the residual image
// at the given letter positions. `splits` holds the image-path split points
// in increasing order (exclusive of the ends).
FoldStage subdivide_stage(LoopState& s, int edge, const std::vector<int>& splits) {
  const EdgePath& img = s.eimg[edge];
  int parts = static_cast<int>(splits.size()) + 1;
  auto sub = subdivide(*s.graph, s.graph->edge_name(edge), parts);

  FoldStage stage;
  stage.kind = FoldStage::Kind::subdivide;
  stage.source = s.graph;
  stage.target = sub.graph;
  stage.relabel = sub.relabel;
  stage.subdivide = {s.graph->edge_name(edge), sub.part_names};

  // rebuild the residual on the subdivided graph
  std::vector<int> vimg(sub.graph->num_vertices(), -1);
  for (int v = 0; v < s.graph->num_vertices(); ++v)
    vimg[sub.relabel.apply_vertex(v)] = s.vimg[v];
  std::vector<EdgePath> eimg(sub.graph->num_edges());
  for (int e = 0; e < s.graph->num_edges(); ++e) {
    if (e != edge) {
      eimg[sub.graph->edge_index(s.graph->edge_name(e))] = s.eimg[e];
    } else {
      int prev = 0;
      for (int k = 0; k < parts; ++k) {
        int next = k < parts - 1 ? splits[k] : static_cast<int>(img.size());
        EdgePath piece(img.begin() + prev, img.begin() + next);
        eimg[sub.graph->edge_index(sub.part_names[k])] = piece;
        prev = next;
      }
    }
  }
  // interior vertices keep vimg = -1 here; the caller infers them from the
  // piece images right after the stage
  s.graph = sub.graph;
  s.vimg = std::move(vimg);
  s.eimg = std::move(eimg);
  s.traced_vertex = sub.relabel.apply_vertex(s.traced_vertex);
  return stage;
}

void fix_interior_vertex_images(LoopState& s, const MarkedGraph& target) {
  for (int e = 0; e < s.graph->num_edges(); ++e) {
    const auto& ed = s.graph->edge(e);
    if (s.eimg[e].empty()) continue;
    if (s.vimg[ed.from] < 0) s.vimg[ed.from] = initial_vertex(target, s.eimg[e].front());
    if (s.vimg[ed.to] < 0) s.vimg[ed.to] = terminal_vertex(target, s.eimg[e].back());
  }
}

// Folds two darts with equal residual images into one edge.
FoldStage fold_stage(LoopState& s, OrientedEdge da, OrientedEdge db) {
  const MarkedGraph& g = *s.graph;
  // keep the edge with the smaller name
  if (g.edge_name(db.edge) < g.edge_name(da.edge)) std::swap(da, db);
  int keep = da.edge, drop = db.edge;
  int wk = terminal_vertex(g, da), wd = terminal_vertex(g, db);

  std::vector<std::string> vertices;
  std::vector<int> vmap(g.num_vertices());  // old -> new index
  for (int v = 0; v < g.num_vertices(); ++v) {
    if (v == wd && wd != wk) {
      vmap[v] = -1;  // merged, fixed after wk is placed
      continue;
    }
    vmap[v] = static_cast<int>(vertices.size());
    vertices.push_back(g.vertex_name(v));
  }
  if (wd != wk) vmap[wd] = vmap[wk];

  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  std::vector<int> emap(g.num_edges(), -1);
  for (int e = 0; e < g.num_edges(); ++e) {
    if (e == drop) continue;
    emap[e] = static_cast<int>(edges.size());
    edges.emplace_back(g.edge_name(e), vertices[vmap[g.edge(e).from]],
                       vertices[vmap[g.edge(e).to]]);
  }
  auto out = std::make_shared<MarkedGraph>(vertices, edges);

  // relabeling: the dropped edge maps onto the kept dart
  std::vector<EdgePath> images(g.num_edges());
  OrientedEdge kept_new(emap[keep], da.forward);
  for (int e = 0; e < g.num_edges(); ++e) {
    if (e != drop) {
      images[e] = {OrientedEdge(emap[e], true)};
    } else {
      // db is identified with da; express the forward dart of `drop`
      images[e] = {db.forward ? kept_new : kept_new.reversed()};
    }
  }
  std::vector<int> vimages(g.num_vertices());
  for (int v = 0; v < g.num_vertices(); ++v) vimages[v] = vmap[v];

  FoldStage stage;
  stage.kind = FoldStage::Kind::fold;
  stage.source = s.graph;
  stage.target = out;
  stage.relabel = PathRelabeling(s.graph, out, std::move(images), std::move(vimages));
  stage.fold = {da, db, kept_new};

  std::vector<int> vimg(out->num_vertices());
  for (int v = 0; v < g.num_vertices(); ++v) vimg[vmap[v]] = s.vimg[v];
  std::vector<EdgePath> eimg(out->num_edges());
  for (int e = 0; e < g.num_edges(); ++e)
    if (e != drop) eimg[emap[e]] = s.eimg[e];

  s.traced_vertex = vmap[s.traced_vertex];
  s.graph = out;
  s.vimg = std::move(vimg);
  s.eimg = std::move(eimg);
  return stage;
}

}  // namespace

GeneralFoldResult fold_map(const GraphMap& h, int traced_vertex) {
  const MarkedGraph& target = h.target();
  LoopState s;
  s.graph = h.source_ptr();
  s.traced_vertex = traced_vertex;
  s.vimg.resize(h.source().num_vertices());
  for (int v = 0; v < h.source().num_vertices(); ++v) s.vimg[v] = h.vertex_image(v);
  s.eimg.resize(h.source().num_edges());
  for (int e = 0; e < h.source().num_edges(); ++e) {
    s.eimg[e] = h.edge_image(e);
    if (s.eimg[e].empty())
      throw error(errc::parse_error, "cannot fold a map with an empty edge image");
  }

  GeneralFoldResult res;
  res.vertex_trace.push_back(traced_vertex);

  long guard = 0;
  bool more = true;
  while (more) {
  for (auto pair = find_foldable(s); pair; pair = find_foldable(s)) {
    if (++guard > 100000)
      throw error(errc::no_convergence, "fold loop exceeded its stage budget");
    auto [d1, d2] = *pair;
    if (dart_residual(s, d1) == dart_residual(s, d2)) {
      res.stages.push_back(fold_stage(s, d1, d2));
      fix_interior_vertex_images(s, target);
      res.vertex_trace.push_back(s.traced_vertex);
      continue;
    }
    // Cut whichever darts have long images so that the initial pieces map
    // onto the shared first edge, then fold the pieces. Edge indices shift
    // under subdivision, so the pair is tracked by name.
    auto push_subdivision = [&](int edge, std::vector<int> splits) {
      FoldStage st = subdivide_stage(s, edge, splits);
      res.stages.push_back(std::move(st));
      fix_interior_vertex_images(s, target);
      res.vertex_trace.push_back(s.traced_vertex);
      return res.stages.back().subdivide.parts;
    };
    if (d1.edge == d2.edge) {
      // opposite ends of one loop edge; cut both ends at once
      int len = static_cast<int>(s.eimg[d1.edge].size());
      std::vector<int> splits =
          len >= 3 ? std::vector<int>{1, len - 1} : std::vector<int>{1};
      auto parts = push_subdivision(d1.edge, splits);
      OrientedEdge a(s.graph->edge_index(parts.front()), true);
      OrientedEdge b(s.graph->edge_index(parts.back()), false);
      res.stages.push_back(fold_stage(s, a, b));
      fix_interior_vertex_images(s, target);
      res.vertex_trace.push_back(s.traced_vertex);
      continue;
    }
    std::string n1 = s.graph->edge_name(d1.edge), n2 = s.graph->edge_name(d2.edge);
    auto cut_initial = [&](const std::string& name, bool fwd) -> std::string {
      int e = s.graph->edge_index(name);
      int len = static_cast<int>(s.eimg[e].size());
      if (len == 1) return name;
      auto parts = push_subdivision(e, {fwd ? 1 : len - 1});
      return fwd ? parts.front() : parts.back();
    };
    std::string na = cut_initial(n1, d1.forward);
    std::string nb = cut_initial(n2, d2.forward);
    OrientedEdge a(s.graph->edge_index(na), d1.forward);
    OrientedEdge b(s.graph->edge_index(nb), d2.forward);
    res.stages.push_back(fold_stage(s, a, b));
    fix_interior_vertex_images(s, target);
    res.vertex_trace.push_back(s.traced_vertex);
  }

  // No foldable pair remains. Cut any long images so the terminal map sends
  // edges to edges, then require a bijection.
  bool cut_any = false;
  for (int e = 0; e < s.graph->num_edges(); ++e) {
    if (s.eimg[e].size() < 2) continue;
    std::vector<int> splits(s.eimg[e].size() - 1);
    std::iota(splits.begin(), splits.end(), 1);
    res.stages.push_back(subdivide_stage(s, e, splits));
    fix_interior_vertex_images(s, target);
    res.vertex_trace.push_back(s.traced_vertex);
    cut_any = true;
    e = -1;  // edge indices changed; restart scan
  }
  more = cut_any && find_foldable(s).has_value();
  }

  const MarkedGraph& G = *s.graph;
  if (G.num_edges() != target.num_edges() || G.num_vertices() != target.num_vertices())
    throw error(errc::not_homotopy_equivalence,
                "terminal immersion is not an isomorphism (size mismatch)");
  std::vector<char> edge_hit(target.num_edges(), 0), vertex_hit(target.num_vertices(), 0);
  for (int e = 0; e < G.num_edges(); ++e) {
    if (s.eimg[e].size() != 1 || edge_hit[s.eimg[e][0].edge])
      throw error(errc::not_homotopy_equivalence,
                  "terminal immersion is not an isomorphism (edges)");
    edge_hit[s.eimg[e][0].edge] = 1;
  }
  for (int v = 0; v < G.num_vertices(); ++v) {
    if (vertex_hit[s.vimg[v]])
      throw error(errc::not_homotopy_equivalence,
                  "terminal immersion is not an isomorphism (vertices)");
    vertex_hit[s.vimg[v]] = 1;
  }
  res.terminal = PathRelabeling(s.graph, h.target_ptr(), s.eimg, s.vimg);
  return res;
}

FoldSequence fold_factorization(const GraphSelfMap& m) {
  auto report = check_map(m);
  if (!report.valid)
    throw error(errc::not_homotopy_equivalence,
                "map fails validation: " + (report.problems.empty() ? std::string()
                                                                    : report.problems.front()));
  GeneralFoldResult r = fold_map(m, 0);
  FoldSequence seq;
  seq.base = m.graph_ptr();
  seq.stages = std::move(r.stages);
  seq.terminal = std::move(r.terminal);
  for (const auto& st : seq.stages)
    (st.kind == FoldStage::Kind::fold ? seq.fold_count : seq.subdivision_count)++;
  return seq;
}

bool verify_factorization(const FoldSequence& seq, const GraphSelfMap& m) {
  if (seq.base != m.graph_ptr() &&
      seq.base->num_edges() != m.graph().num_edges())
    return false;
  const MarkedGraph& g = m.graph();
  for (int e = 0; e < g.num_edges(); ++e) {
    EdgePath p{OrientedEdge(e, true)};
    for (const auto& st : seq.stages) p = st.relabel.apply(p);
    p = seq.terminal.apply(p);
    if (p != m.edge_image(e)) return false;
  }
  for (int v = 0; v < g.num_vertices(); ++v) {
    int w = v;
    for (const auto& st : seq.stages) w = st.relabel.apply_vertex(w);
    w = seq.terminal.apply_vertex(w);
    if (w != m.vertex_image(v)) return false;
  }
  return true;
}

namespace {

// Residual map at a cycle position: stages i+1..K followed by the terminal
// isomorphism, landing in the base graph.
EdgePath residual_path(const FoldSequence& seq, int position, OrientedEdge d) {
  EdgePath p{d};
  for (size_t k = position; k < seq.stages.size(); ++k) p = seq.stages[k].relabel.apply(p);
  return seq.terminal.apply(p);
}

int residual_vertex(const FoldSequence& seq, int position, int v) {
  for (size_t k = position; k < seq.stages.size(); ++k) v = seq.stages[k].relabel.apply_vertex(v);
  return seq.terminal.apply_vertex(v);
}

}  // namespace

FoldCycle build_fold_cycle(const GraphSelfMap& metric_map, FoldSequence seq_in, double lambda) {
  FoldCycle cycle;
  cycle.seq = std::make_shared<FoldSequence>(std::move(seq_in));
  cycle.lambda = lambda;
  const FoldSequence& seq = *cycle.seq;
  const MarkedGraph& base = metric_map.graph();
  if (!base.has_metric()) throw error(errc::no_metric, "fold cycle needs a metric base graph");

  int K = static_cast<int>(seq.stages.size());
  for (int i = 0; i <= K; ++i) {
    std::shared_ptr<const MarkedGraph> bare =
        i == 0 ? metric_map.graph_ptr()
               : (i < K ? seq.stages[i].source : seq.stages[K - 1].target);
    // stage metric: lengths of residual images, contracted once by lambda
    std::vector<double> lengths(bare->num_edges());
    for (int e = 0; e < bare->num_edges(); ++e)
      lengths[e] = path_length(base, residual_path(seq, i, {e, true})) / lambda;
    auto metric_graph = std::make_shared<MarkedGraph>(bare->with_metric(lengths));

    // conjugated representative g_i: residual into the base, then forward
    // through stages 1..i
    std::vector<EdgePath> eimg(bare->num_edges());
    for (int e = 0; e < bare->num_edges(); ++e) {
      EdgePath p = residual_path(seq, i, {e, true});
      for (int k = 0; k < i; ++k) p = seq.stages[k].relabel.apply(p);
      eimg[e] = p;
    }
    std::vector<int> vimg(bare->num_vertices());
    for (int v = 0; v < bare->num_vertices(); ++v) {
      int w = residual_vertex(seq, i, v);
      for (int k = 0; k < i; ++k) w = seq.stages[k].relabel.apply_vertex(w);
      vimg[v] = w;
    }
    CyclePosition pos;
    pos.graph = metric_graph;
    pos.self_map = GraphSelfMap(metric_graph, std::move(vimg), std::move(eimg));
    pos.gate_structure = gates(pos.self_map);
    pos.total_length = metric_graph->total_length();
    cycle.positions.push_back(std::move(pos));
  }
  return cycle;
}

namespace {

struct ArrowView {
  const PathRelabeling* relabel;
  const MarkedGraph* src;  // metric graph at the arrow's source position
  const MarkedGraph* tgt;  // metric graph at the arrow's target position
};

}  // namespace

std::vector<EdgePath> pullback_one_illegal(const FoldCycle& cycle, int arrow,
                                           const std::vector<EdgePath>& paths,
                                           double length_cap) {
  int n = cycle.length();
  int src_pos = arrow % n;
  int tgt_pos = (arrow + 1) % n;
  const CyclePosition& src = cycle.positions[src_pos];
  const CyclePosition& tgt = cycle.positions[tgt_pos];
  const PathRelabeling& relabel = arrow % n == n - 1
                                      ? cycle.seq->terminal
                                      : cycle.seq->stages[arrow % n].relabel;
  const MarkedGraph& sg = *src.graph;
  const MarkedGraph& tg = *tgt.graph;

  for (const auto& p : paths)
    if (count_illegal_turns(tg, tgt.gate_structure, p) != 1)
      throw error(errc::illegal_turn_count_violation,
                  "pullback input must have exactly one illegal turn");

  double tol = 1e-9 * std::max(1.0, length_cap);
  std::vector<EdgePath> found;

  // Darts of the source graph grouped by initial vertex.
  std::vector<std::vector<OrientedEdge>> darts(sg.num_vertices());
  for (int e = 0; e < sg.num_edges(); ++e)
    for (bool fwd : {true, false}) darts[initial_vertex(sg, {e, fwd})].push_back({e, fwd});

  for (const auto& gamma : paths) {
    if (gamma.empty()) continue;
    int gamma_init = initial_vertex(tg, gamma.front());

    // Depth-first search over tight upstairs paths, tracking the reduced
    // downstairs image as a stack. Accept when the image equals gamma and
    // exactly one illegal turn was crossed.
    struct Node {
      EdgePath path;
      std::vector<OrientedEdge> residual;
      int vertex;
      int illegal = 0;
      double length = 0;
    };
    long budget = 4000000;

    auto feasible = [&](const Node& nd) {
      size_t cp = 0;
      while (cp < nd.residual.size() && cp < gamma.size() && nd.residual[cp] == gamma[cp]) ++cp;
      double need = 0;
      for (size_t i = cp; i < nd.residual.size(); ++i) need += tg.edge_length(nd.residual[i].edge);
      for (size_t i = cp; i < gamma.size(); ++i) need += tg.edge_length(gamma[i].edge);
      return nd.length + need <= length_cap + tol;
    };

    std::vector<Node> stack;
    for (int u = 0; u < sg.num_vertices(); ++u) {
      if (relabel.apply_vertex(u) != gamma_init) continue;
      stack.push_back(Node{{}, {}, u});
    }
    while (!stack.empty()) {
      Node nd = std::move(stack.back());
      stack.pop_back();
      if (--budget < 0)
        throw error(errc::no_convergence, "pullback search exceeded its node budget");
      if (nd.residual == gamma && nd.illegal == 1 && !nd.path.empty()) found.push_back(nd.path);
      for (OrientedEdge d : darts[nd.vertex]) {
        if (!nd.path.empty() && d == nd.path.back().reversed()) continue;
        Node next = nd;
        if (!next.path.empty()) {
          Turn t(next.path.back().reversed(), d);
          if (src.gate_structure.turn_illegal(sg, t) && ++next.illegal > 1) continue;
        }
        next.length += sg.edge_length(d.edge);
        if (next.length > length_cap + tol) continue;
        next.path.push_back(d);
        next.vertex = terminal_vertex(sg, d);
        for (OrientedEdge x : relabel.apply(d)) {
          if (!next.residual.empty() && next.residual.back() == x.reversed())
            next.residual.pop_back();
          else
            next.residual.push_back(x);
        }
        if (!feasible(next)) continue;
        stack.push_back(std::move(next));
      }
    }
  }

  // canonicalize up to reversal and deduplicate
  std::vector<EdgePath> out;
  std::set<EdgePath> seen;
  for (auto& p : found) {
    EdgePath r = reverse_path(p);
    EdgePath canon = std::min(p, r);
    if (seen.insert(canon).second) out.push_back(canon);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------
// Automorphism inversion by folding the labeled rose.

namespace {

// Lifts a loop backward through one fold stage. `base_src` is the vertex of
// the stage source that maps to the loop's basepoint.
EdgePath lift_loop_through_stage(const FoldStage& st, const EdgePath& loop, int base_src) {
  const MarkedGraph& src = *st.source;

  if (st.kind == FoldStage::Kind::subdivide) {
    // piece -> (source edge, index within the chain)
    std::map<int, std::pair<int, int>> piece_of;
    int cut_edge = src.edge_index(st.subdivide.edge);
    for (size_t k = 0; k < st.subdivide.parts.size(); ++k)
      piece_of[st.target->edge_index(st.subdivide.parts[k])] = {cut_edge, static_cast<int>(k)};
    std::map<int, int> plain;  // target edge -> source edge
    for (int e = 0; e < src.num_edges(); ++e)
      if (e != cut_edge) plain[st.target->edge_index(src.edge_name(e))] = e;

    EdgePath out;
    size_t i = 0;
    int nparts = static_cast<int>(st.subdivide.parts.size());
    while (i < loop.size()) {
      auto it = plain.find(loop[i].edge);
      if (it != plain.end()) {
        out.emplace_back(it->second, loop[i].forward);
        ++i;
        continue;
      }
      // a full run of pieces; tight loops based at an original vertex cross
      // the chain completely
      auto [e, k] = piece_of.at(loop[i].edge);
      bool fwd = loop[i].forward;
      int expect = fwd ? 0 : nparts - 1;
      if (k != expect)
        throw error(errc::parse_error, "loop enters a subdivided edge mid-chain");
      for (int step = 0; step < nparts; ++step, ++i) {
        if (i >= loop.size())
          throw error(errc::parse_error, "loop leaves a subdivided edge mid-chain");
        auto [e2, k2] = piece_of.at(loop[i].edge);
        int want = fwd ? step : nparts - 1 - step;
        if (e2 != e || k2 != want || loop[i].forward != fwd)
          throw error(errc::parse_error, "loop leaves a subdivided edge mid-chain");
      }
      out.emplace_back(e, fwd);
    }
    (void)base_src;
    return out;
  }

  // fold stage: substitute the kept preimage and repair junctions with the
  // collapsing connector between the two identified terminal vertices.
  OrientedEdge da = st.fold.folded_a, db = st.fold.folded_b;
  int wa = terminal_vertex(src, da), wb = terminal_vertex(src, db);
  int merged_edge = st.fold.kept.edge;

  auto preferred = [&](OrientedEdge d) -> OrientedEdge {
    // lift along the kept edge, never the dropped one
    for (int e = 0; e < src.num_edges(); ++e) {
      if (e == db.edge) continue;
      EdgePath img = st.relabel.apply(OrientedEdge(e, true));
      if (img.size() == 1 && img[0].edge == d.edge)
        return img[0].forward == d.forward ? OrientedEdge(e, true) : OrientedEdge(e, false);
    }
    throw error(errc::parse_error, "no preimage dart under fold");
  };
  (void)merged_edge;

  auto connector = [&](int from, int to) -> EdgePath {
    if (from == to) return {};
    if (from == wa && to == wb) return {da.reversed(), db};
    if (from == wb && to == wa) return {db.reversed(), da};
    throw error(errc::parse_error, "fold lift hit an unrepairable junction");
  };

  EdgePath out;
  int at = base_src;
  for (const auto& d : loop) {
    OrientedEdge up = preferred(d);
    EdgePath c = connector(at, initial_vertex(src, up));
    out.insert(out.end(), c.begin(), c.end());
    out.push_back(up);
    at = terminal_vertex(src, up);
  }
  EdgePath c = connector(at, base_src);
  out.insert(out.end(), c.begin(), c.end());
  return tighten(src, out);
}

}  // namespace

GraphSelfMap invert_automorphism(const GraphSelfMap& m) {
  int r = rose_rank(m);
  auto rose = m.graph_ptr();

  // the letter-labeled rose: one subdivided petal per generator, each little
  // edge mapping onto one letter of the image word
  std::vector<std::string> vertices{"o"};
  std::vector<std::tuple<std::string, std::string, std::string>> edges;
  std::vector<EdgePath> eimg;
  std::vector<std::pair<int, int>> petal_edge;  // (generator, index) per little edge
  for (int i = 0; i < r; ++i) {
    const EdgePath& w = m.edge_image(i);
    if (w.empty()) throw error(errc::not_automorphism, "empty image word");
    std::string prev = "o";
    for (size_t k = 0; k < w.size(); ++k) {
      std::string next =
          k + 1 == w.size() ? "o" : "p" + std::to_string(i) + "." + std::to_string(k + 1);
      if (next != "o") vertices.push_back(next);
      edges.emplace_back("g" + std::to_string(i) + "." + std::to_string(k + 1), prev, next);
      eimg.push_back({w[k]});
      petal_edge.emplace_back(i, static_cast<int>(k));
      prev = next;
    }
  }
  auto labeled = std::make_shared<MarkedGraph>(vertices, edges);
  std::vector<int> vimg(labeled->num_vertices(), 0);
  GraphMap h(labeled, rose, std::move(vimg), std::move(eimg));

  GeneralFoldResult folds;
  try {
    folds = fold_map(h, 0);
  } catch (const error& e) {
    if (e.code == errc::not_homotopy_equivalence)
      throw error(errc::not_automorphism, "image words do not form a basis");
    throw;
  }

  // petal chains per generator, for decoding loops in the labeled rose
  std::vector<std::vector<int>> petal(r);
  for (size_t e = 0; e < petal_edge.size(); ++e) petal[petal_edge[e].first].push_back(e);

  std::vector<EdgePath> psi_images(r);
  for (int j = 0; j < r; ++j) {
    // the loop of generator j upstairs in the terminal graph
    const PathRelabeling& term = folds.terminal;
    EdgePath loop;
    for (int e = 0; e < term.source().num_edges(); ++e) {
      EdgePath img = term.apply(OrientedEdge(e, true));
      if (img.size() == 1 && img[0].edge == j) {
        loop = {img[0].forward ? OrientedEdge(e, true) : OrientedEdge(e, false)};
        break;
      }
    }
    if (loop.empty()) throw error(errc::not_automorphism, "folded graph misses a generator");

    for (int k = static_cast<int>(folds.stages.size()) - 1; k >= 0; --k)
      loop = lift_loop_through_stage(folds.stages[k], loop, folds.vertex_trace[k]);

    // decode the loop as a word in the petals
    FreeWord word;
    size_t i = 0;
    while (i < loop.size()) {
      auto [gen, idx] = petal_edge[loop[i].edge];
      int n = static_cast<int>(petal[gen].size());
      bool fwd = loop[i].forward;
      if (idx != (fwd ? 0 : n - 1))
        throw error(errc::not_automorphism, "lifted loop is not a petal word");
      for (int step = 0; step < n; ++step, ++i) {
        int want = fwd ? step : n - 1 - step;
        if (i >= loop.size() || loop[i].edge != petal[gen][want] || loop[i].forward != fwd)
          throw error(errc::not_automorphism, "lifted loop is not a petal word");
      }
      word.push_back(fwd ? gen + 1 : -(gen + 1));
    }
    psi_images[j] = path_of_word(*rose, reduce(word));
    if (psi_images[j].empty())
      throw error(errc::not_automorphism, "inverse image of a generator is trivial");
  }

  GraphSelfMap psi(rose, std::vector<int>{0}, std::move(psi_images));
  if (!is_inverse_pair(m, psi).is_inverse)
    throw error(errc::not_automorphism, "inverse verification failed");
  return psi;
}

InversePairResult is_inner_automorphism(const GraphSelfMap& h) {
  int r = rose_rank(h);
  std::vector<FreeWord> u(r);
  for (int x = 0; x < r; ++x) u[x] = word_of_path(h.edge_image(x));

  std::vector<FreeWord> candidates{{}};
  for (int x = 0; x < r; ++x) {
    const FreeWord& w = u[x];
    if (w.size() % 2 == 0) continue;
    size_t half = w.size() / 2;
    if (w[half] != x + 1) continue;
    FreeWord v(w.begin(), w.begin() + half);
    FreeWord tail(w.begin() + half + 1, w.end());
    if (tail == inverse_word(v)) candidates.push_back(v);
  }
  for (const auto& w : candidates) {
    bool ok = true;
    for (int x = 0; x < r && ok; ++x) {
      FreeWord conj = concat_reduce(concat_reduce(w, {x + 1}), inverse_word(w));
      ok = conj == u[x];
    }
    if (ok) return {true, w};
  }
  return {false, {}};
}

// Rebuilds a rose map over another rose with the same edge names.
static GraphSelfMap transplant_rose_map(const GraphSelfMap& m,
                                        std::shared_ptr<const MarkedGraph> rose) {
  if (m.graph().num_edges() != rose->num_edges())
    throw error(errc::rank_mismatch, "roses have different ranks");
  std::vector<EdgePath> imgs(rose->num_edges());
  for (int e = 0; e < rose->num_edges(); ++e) {
    int se = m.graph().edge_index(rose->edge_name(e));
    if (se < 0) throw error(errc::rank_mismatch, "roses use different edge names");
    EdgePath q;
    for (const auto& d : m.edge_image(se)) {
      int te = rose->edge_index(m.graph().edge_name(d.edge));
      q.emplace_back(te, d.forward);
    }
    imgs[e] = q;
  }
  return GraphSelfMap(std::move(rose), std::vector<int>{0}, std::move(imgs));
}

InversePairResult is_inverse_pair(const GraphSelfMap& phi, const GraphSelfMap& psi) {
  if (rose_rank(phi) != rose_rank(psi)) return {false, {}};
  GraphSelfMap p =
      psi.graph_ptr() == phi.graph_ptr() ? psi : transplant_rose_map(psi, phi.graph_ptr());
  return is_inner_automorphism(compose(phi, p));
}

bool outer_equal(const GraphSelfMap& phi, const GraphSelfMap& psi) {
  return is_inverse_pair(phi, invert_automorphism(psi)).is_inverse;
}

}  // namespace ttk
