#include "ttk/graph_map.hpp"

#include <algorithm>
#include <numeric>

namespace ttk {

GraphMap::GraphMap(std::shared_ptr<const MarkedGraph> source,
                   std::shared_ptr<const MarkedGraph> target,
                   std::vector<int> vertex_image, std::vector<EdgePath> edge_image)
    : source_(std::move(source)),
      target_(std::move(target)),
      vertex_image_(std::move(vertex_image)),
      edge_image_(std::move(edge_image)) {
  if (static_cast<int>(vertex_image_.size()) != source_->num_vertices() ||
      static_cast<int>(edge_image_.size()) != source_->num_edges())
    throw error(errc::parse_error, "graph map image tables have wrong size");
}

EdgePath GraphMap::apply(const EdgePath& p) const {
  EdgePath out;
  for (const auto& d : p) {
    EdgePath step = dart_image(d);
    out.insert(out.end(), step.begin(), step.end());
  }
  return tighten(*target_, out);
}

bool GraphMap::same_graphs(const GraphMap& other) const {
  return source_ == other.source_ && target_ == other.target_;
}

GraphSelfMap identity_map(std::shared_ptr<const MarkedGraph> g) {
  std::vector<int> v(g->num_vertices());
  std::iota(v.begin(), v.end(), 0);
  std::vector<EdgePath> e;
  for (int i = 0; i < g->num_edges(); ++i) e.push_back({OrientedEdge(i, true)});
  return GraphSelfMap(std::move(g), std::move(v), std::move(e));
}

GraphSelfMap make_self_map(std::shared_ptr<const MarkedGraph> g,
                           const std::map<std::string, std::string>& vertex_images,
                           const std::map<std::string, std::string>& edge_images) {
  std::vector<int> vimg(g->num_vertices(), -1);
  for (const auto& [from, to] : vertex_images) {
    int a = g->vertex_index(from), b = g->vertex_index(to);
    if (a < 0 || b < 0) throw error(errc::parse_error, "unknown vertex in map: " + from);
    vimg[a] = b;
  }
  std::vector<EdgePath> eimg(g->num_edges());
  for (const auto& [name, tokens] : edge_images) {
    int e = g->edge_index(name);
    if (e < 0) throw error(errc::unknown_edge, "unknown edge in map: " + name);
    eimg[e] = parse_path(*g, tokens);
  }
  // Vertex images may be omitted; infer them from edge images where possible.
  for (int e = 0; e < g->num_edges(); ++e) {
    if (eimg[e].empty()) continue;
    const auto& ed = g->edge(e);
    if (vimg[ed.from] < 0) vimg[ed.from] = initial_vertex(*g, eimg[e].front());
    if (vimg[ed.to] < 0) vimg[ed.to] = terminal_vertex(*g, eimg[e].back());
  }
  for (int v = 0; v < g->num_vertices(); ++v)
    if (vimg[v] < 0)
      throw error(errc::parse_error,
                  "no image for vertex " + g->vertex_name(v) + " and none inferable");
  return GraphSelfMap(std::move(g), std::move(vimg), std::move(eimg));
}

MapValidationReport check_map(const GraphSelfMap& m) {
  MapValidationReport r;
  const MarkedGraph& g = m.graph();
  for (int e = 0; e < g.num_edges(); ++e) {
    const EdgePath& img = m.edge_image(e);
    if (img.empty()) {
      r.valid = false;
      r.problems.push_back("image of edge " + g.edge_name(e) + " is empty");
      continue;
    }
    if (!endpoint_compatible(g, img)) {
      r.valid = false;
      r.problems.push_back("image of edge " + g.edge_name(e) + " is not a path");
      continue;
    }
    if (!is_tight(img)) {
      r.valid = false;
      r.problems.push_back("image of edge " + g.edge_name(e) + " is not tight");
    }
    const auto& ed = g.edge(e);
    if (initial_vertex(g, img.front()) != m.vertex_image(ed.from) ||
        terminal_vertex(g, img.back()) != m.vertex_image(ed.to)) {
      r.valid = false;
      r.problems.push_back("image of edge " + g.edge_name(e) +
                           " does not match the vertex images at its endpoints");
    }
  }
  return r;
}

GraphSelfMap compose(const GraphSelfMap& m1, const GraphSelfMap& m2) {
  if (m1.graph_ptr() != m2.graph_ptr())
    throw error(errc::graph_mismatch, "compose requires maps on the same graph");
  std::vector<int> vimg(m1.graph().num_vertices());
  for (int v = 0; v < m1.graph().num_vertices(); ++v)
    vimg[v] = m1.vertex_image(m2.vertex_image(v));
  std::vector<EdgePath> eimg(m1.graph().num_edges());
  for (int e = 0; e < m1.graph().num_edges(); ++e) eimg[e] = m1.apply(m2.edge_image(e));
  return GraphSelfMap(m1.graph_ptr(), std::move(vimg), std::move(eimg));
}

GraphSelfMap power(const GraphSelfMap& m, int n) {
  GraphSelfMap acc = identity_map(m.graph_ptr());
  for (int i = 0; i < n; ++i) acc = compose(m, acc);
  return acc;
}

EdgePath iterate_edge(const GraphSelfMap& m, int edge, int n, bool* cancellation_seen) {
  if (cancellation_seen) *cancellation_seen = false;
  EdgePath p{OrientedEdge(edge, true)};
  for (int i = 0; i < n; ++i) {
    size_t raw = 0;
    for (const auto& d : p) raw += m.edge_image(d.edge).size();
    p = m.apply(p);
    if (cancellation_seen && p.size() != raw) *cancellation_seen = true;
  }
  return p;
}

std::vector<OrientedEdge> direction_map(const GraphSelfMap& m) {
  int n = m.graph().num_edges();
  std::vector<OrientedEdge> dm(2 * n);
  for (int e = 0; e < n; ++e) {
    dm[dart_id({e, true})] = m.edge_image(e).front();
    dm[dart_id({e, false})] = m.edge_image(e).back().reversed();
  }
  return dm;
}

std::string format_turn(const MarkedGraph& g, const Turn& t) {
  auto fmt = [&](OrientedEdge d) {
    return (d.forward ? "" : "~") + g.edge_name(d.edge);
  };
  return "{" + fmt(t.a) + ", " + fmt(t.b) + "}";
}

GateStructure gates(const GraphSelfMap& m) {
  const MarkedGraph& g = m.graph();
  int nd = 2 * g.num_edges();
  auto dm = direction_map(m);

  // Iterate the direction map; directions fall into one gate when some
  // iterate identifies them. The kernel partitions coarsen monotonically,
  // so nd iterations suffice.
  std::vector<int> cls(nd);
  for (int i = 0; i < nd; ++i) cls[i] = i;
  std::vector<OrientedEdge> it(nd);
  for (int i = 0; i < nd; ++i) it[i] = dart_from_id(i);
  auto find = [&](int x) {
    while (cls[x] != x) x = cls[x] = cls[cls[x]];
    return x;
  };
  for (int step = 0; step < nd; ++step) {
    for (int i = 0; i < nd; ++i) it[i] = dm[dart_id(it[i])];
    // same value after `step+1` iterations -> same gate
    std::map<int, int> by_value;
    for (int i = 0; i < nd; ++i) {
      auto [pos, fresh] = by_value.emplace(dart_id(it[i]), i);
      if (!fresh) {
        int a = find(i), b = find(pos->second);
        if (a != b) cls[a] = b;
      }
    }
  }

  GateStructure gs;
  gs.gate_of_dart.resize(nd);
  for (int i = 0; i < nd; ++i) gs.gate_of_dart[i] = find(i);

  gs.gates_per_vertex.resize(g.num_vertices());
  std::map<std::pair<int, int>, int> gate_slot;  // (vertex, class) -> slot
  for (int i = 0; i < nd; ++i) {
    OrientedEdge d = dart_from_id(i);
    int v = initial_vertex(g, d);
    auto key = std::make_pair(v, gs.gate_of_dart[i]);
    auto [pos, fresh] = gate_slot.emplace(key, gs.gates_per_vertex[v].size());
    if (fresh) gs.gates_per_vertex[v].emplace_back();
    gs.gates_per_vertex[v][pos->second].push_back(d);
  }

  for (int v = 0; v < g.num_vertices(); ++v) {
    for (const auto& gate : gs.gates_per_vertex[v]) {
      for (size_t i = 0; i < gate.size(); ++i)
        for (size_t j = i + 1; j < gate.size(); ++j)
          gs.illegal_turns.emplace_back(gate[i], gate[j]);
    }
  }
  std::sort(gs.illegal_turns.begin(), gs.illegal_turns.end());

  // Periodic directions: cycles of the direction map, found by orbit walking.
  gs.direction_period.assign(nd, 0);
  for (int i = 0; i < nd; ++i) {
    OrientedEdge x = dart_from_id(i);
    std::map<int, int> seen{{i, 0}};
    for (int step = 1; step <= nd + 1; ++step) {
      x = dm[dart_id(x)];
      auto pos = seen.find(dart_id(x));
      if (pos != seen.end()) {
        if (pos->first == i) gs.direction_period[i] = step - pos->second;
        break;
      }
      seen[dart_id(x)] = step;
    }
  }
  long long l = 1;
  for (int i = 0; i < nd; ++i)
    if (gs.direction_period[i] > 0) l = std::lcm(l, (long long)gs.direction_period[i]);
  gs.period_lcm = static_cast<int>(l);
  return gs;
}

std::vector<Turn> turns_taken(const EdgePath& p) {
  std::vector<Turn> ts;
  for (size_t i = 0; i + 1 < p.size(); ++i) ts.emplace_back(p[i].reversed(), p[i + 1]);
  return ts;
}

int count_illegal_turns(const MarkedGraph& g, const GateStructure& gs, const EdgePath& p) {
  int n = 0;
  for (const auto& t : turns_taken(p))
    if (gs.turn_illegal(g, t)) ++n;
  return n;
}

TrainTrackResult is_train_track(const GraphSelfMap& m) {
  TrainTrackResult res;
  auto gs = gates(m);
  const MarkedGraph& g = m.graph();
  for (int e = 0; e < g.num_edges(); ++e) {
    const EdgePath& img = m.edge_image(e);
    auto ts = turns_taken(img);
    for (size_t i = 0; i < ts.size(); ++i) {
      if (gs.turn_illegal(g, ts[i])) {
        res.is_train_track = false;
        res.witness = TrainTrackWitness{e, static_cast<int>(i) + 1, ts[i]};
        return res;
      }
    }
  }
  res.is_train_track = true;
  return res;
}

WhiteheadGraph local_whitehead_graph(const GraphSelfMap& m, int v, int iterate_bound) {
  const MarkedGraph& g = m.graph();
  WhiteheadGraph w;
  for (int e = 0; e < g.num_edges(); ++e) {
    for (bool fwd : {true, false}) {
      OrientedEdge d(e, fwd);
      if (initial_vertex(g, d) == v) w.directions.push_back(d);
    }
  }
  std::map<OrientedEdge, int> index;
  for (size_t i = 0; i < w.directions.size(); ++i) index[w.directions[i]] = i;

  if (iterate_bound <= 0) {
    // Enough iterations that every edge image crosses every edge: bounded by
    // the Wielandt primitivity exponent, capped for safety.
    int n = g.num_edges();
    iterate_bound = std::min((n - 1) * (n - 1) + 2, 12);
  }
  w.iterate_bound = iterate_bound;

  for (int e = 0; e < g.num_edges(); ++e) {
    EdgePath p{OrientedEdge(e, true)};
    for (int k = 1; k <= iterate_bound; ++k) {
      p = m.apply(p);
      for (const auto& t : turns_taken(p)) {
        if (initial_vertex(g, t.a) != v || t.degenerate()) continue;
        auto ia = index.find(t.a), ib = index.find(t.b);
        if (ia == index.end() || ib == index.end()) continue;
        w.edges.emplace(std::min(ia->second, ib->second), std::max(ia->second, ib->second));
      }
    }
  }

  // Connectivity over the direction vertices.
  int n = static_cast<int>(w.directions.size());
  if (n == 0) {
    w.connected = true;
    return w;
  }
  std::vector<int> comp(n, -1);
  std::vector<int> stack{0};
  comp[0] = 0;
  while (!stack.empty()) {
    int x = stack.back();
    stack.pop_back();
    for (const auto& [a, b] : w.edges) {
      int y = a == x ? b : (b == x ? a : -1);
      if (y >= 0 && comp[y] < 0) {
        comp[y] = 0;
        stack.push_back(y);
      }
    }
  }
  w.connected = std::all_of(comp.begin(), comp.end(), [](int c) { return c == 0; });
  return w;
}

}  // namespace ttk
