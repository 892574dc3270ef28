#include "ttk/spectral.hpp"

#include <algorithm>
#include <cmath>

namespace ttk {

TransitionMatrix::TransitionMatrix(std::vector<std::string> index,
                                   std::vector<std::int64_t> entries)
    : index_(std::move(index)), entries_(std::move(entries)) {
  if (entries_.size() != index_.size() * index_.size())
    throw error(errc::parse_error, "matrix entry count does not match index");
  for (auto v : entries_)
    if (v < 0) throw error(errc::parse_error, "transition matrices are nonnegative");
}

TransitionMatrix TransitionMatrix::transposed() const {
  TransitionMatrix t(index_, entries_);
  for (int i = 0; i < dim(); ++i)
    for (int j = 0; j < i; ++j) std::swap(t.entry(i, j), t.entry(j, i));
  return t;
}

TransitionMatrix TransitionMatrix::times(const TransitionMatrix& other) const {
  int n = dim();
  if (other.dim() != n) throw error(errc::parse_error, "matrix dimension mismatch");
  std::vector<std::int64_t> out(n * n, 0);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      std::int64_t a = entry(i, k);
      if (a == 0) continue;
      for (int j = 0; j < n; ++j) out[i * n + j] += a * other.entry(k, j);
    }
  return TransitionMatrix(index_, std::move(out));
}

TransitionMatrix TransitionMatrix::pow(int n) const {
  int d = dim();
  std::vector<std::int64_t> id(d * d, 0);
  for (int i = 0; i < d; ++i) id[i * d + i] = 1;
  TransitionMatrix acc(index_, std::move(id));
  for (int i = 0; i < n; ++i) acc = acc.times(*this);
  return acc;
}

TransitionMatrix transition_matrix(const GraphSelfMap& m) {
  const MarkedGraph& g = m.graph();
  int n = g.num_edges();
  std::vector<std::string> index;
  for (int e = 0; e < n; ++e) index.push_back(g.edge_name(e));
  std::vector<std::int64_t> entries(n * n, 0);
  for (int col = 0; col < n; ++col)
    for (const auto& d : m.edge_image(col)) entries[d.edge * n + col]++;
  return TransitionMatrix(std::move(index), std::move(entries));
}

namespace {

// Strongly connected components of the digraph with arc i -> j when
// entry(i, j) != 0 (orientation is irrelevant for SCC spectra).
std::vector<std::vector<int>> scc_partition(const TransitionMatrix& M) {
  int n = M.dim();
  std::vector<int> idx(n, -1), low(n, 0), on(n, 0), stk;
  std::vector<std::vector<int>> comps;
  int counter = 0;
  // iterative Tarjan
  struct Frame {
    int v;
    int next = 0;
  };
  for (int s = 0; s < n; ++s) {
    if (idx[s] >= 0) continue;
    std::vector<Frame> frames{{s}};
    idx[s] = low[s] = counter++;
    stk.push_back(s);
    on[s] = 1;
    while (!frames.empty()) {
      Frame& f = frames.back();
      if (f.next < n) {
        int w = f.next++;
        if (M.entry(f.v, w) == 0) continue;
        if (idx[w] < 0) {
          idx[w] = low[w] = counter++;
          stk.push_back(w);
          on[w] = 1;
          frames.push_back({w});
        } else if (on[w]) {
          low[f.v] = std::min(low[f.v], idx[w]);
        }
      } else {
        int v = f.v;
        frames.pop_back();
        if (!frames.empty()) low[frames.back().v] = std::min(low[frames.back().v], low[v]);
        if (low[v] == idx[v]) {
          comps.emplace_back();
          while (true) {
            int w = stk.back();
            stk.pop_back();
            on[w] = 0;
            comps.back().push_back(w);
            if (w == v) break;
          }
        }
      }
    }
  }
  return comps;
}

TransitionMatrix submatrix(const TransitionMatrix& M, const std::vector<int>& rows) {
  std::vector<std::string> index;
  for (int r : rows) index.push_back(M.index()[r]);
  std::vector<std::int64_t> entries;
  for (int r : rows)
    for (int c : rows) entries.push_back(M.entry(r, c));
  return TransitionMatrix(std::move(index), std::move(entries));
}

}  // namespace

bool is_irreducible(const TransitionMatrix& M) {
  if (M.dim() == 0) return false;
  return scc_partition(M).size() == 1;
}

bool is_primitive(const TransitionMatrix& M, int* exponent) {
  int n = M.dim();
  if (n == 0) return false;
  long long cap = static_cast<long long>(n - 1) * (n - 1) + 1;
  // boolean powers with saturation
  std::vector<char> acc(n * n), base(n * n);
  for (int i = 0; i < n * n; ++i) base[i] = M.entry(i / n, i % n) != 0;
  acc = base;
  for (long long k = 1; k <= cap; ++k) {
    if (std::all_of(acc.begin(), acc.end(), [](char c) { return c != 0; })) {
      if (exponent) *exponent = static_cast<int>(k);
      return true;
    }
    std::vector<char> next(n * n, 0);
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l)
        if (acc[i * n + l])
          for (int j = 0; j < n; ++j)
            if (base[l * n + j]) next[i * n + j] = 1;
    acc = std::move(next);
  }
  return false;
}

PFData pf_eigen(const TransitionMatrix& M, double tol, long max_iter) {
  int n = M.dim();
  if (n == 0 || !is_irreducible(M))
    throw error(errc::not_irreducible, "pf_eigen requires an irreducible matrix");
  PFData pf;
  pf.irreducible = true;
  pf.primitive = is_primitive(M);
  pf.tolerance = tol;

  // Iterate with M + I so that imprimitive (periodic) matrices converge;
  // the Collatz-Wielandt bracket is evaluated on M itself.
  std::vector<double> v(n, 1.0 / n), mv(n), mv1(n);
  double lo = 0, hi = 0;
  long it = 0;
  for (; it < max_iter; ++it) {
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int j = 0; j < n; ++j) s += static_cast<double>(M.entry(i, j)) * v[j];
      mv[i] = s;
      mv1[i] = s + v[i];
    }
    lo = std::numeric_limits<double>::infinity();
    hi = 0;
    for (int i = 0; i < n; ++i) {
      double r = mv[i] / v[i];
      lo = std::min(lo, r);
      hi = std::max(hi, r);
    }
    if (hi - lo < tol) break;
    double norm = 0;
    for (double x : mv1) norm += x;
    for (int i = 0; i < n; ++i) v[i] = mv1[i] / norm;
  }
  if (hi - lo >= tol)
    throw error(errc::no_convergence, "power iteration hit the iteration cap");
  pf.iterations = it;
  pf.bracket_lo = lo;
  pf.bracket_hi = hi;
  pf.lambda = (lo + hi) / 2;
  double norm = 0;
  for (double x : v) norm += x;
  for (int i = 0; i < n; ++i) pf.eigenvector[M.index()[i]] = v[i] / norm;
  return pf;
}

double spectral_radius(const TransitionMatrix& M, double tol) {
  if (M.dim() == 0) return 0;
  double best = 0;
  for (const auto& comp : scc_partition(M)) {
    TransitionMatrix sub = submatrix(M, comp);
    if (sub.dim() == 1 && sub.entry(0, 0) == 0) continue;  // nilpotent piece
    best = std::max(best, pf_eigen(sub, tol).lambda);
  }
  return best;
}

EigenMetricResult eigen_metric(const GraphSelfMap& m, double tol) {
  auto tt = is_train_track(m);
  if (!tt.is_train_track)
    throw error(errc::not_train_track, "eigen metric requires a train track map");
  TransitionMatrix M = transition_matrix(m);
  if (!is_primitive(M))
    throw error(errc::not_primitive, "eigen metric requires a primitive transition matrix");

  // Edge lengths come from the PF eigenvector of the transpose: with the
  // entry convention entry(e, e') = count of e in the image of e', the
  // stretch condition Length(g(e)) = lambda Length(e) reads M^T len = lambda len.
  PFData pf = pf_eigen(M.transposed(), tol);
  const MarkedGraph& g = m.graph();
  std::vector<double> lengths(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) lengths[e] = pf.eigenvector.at(g.edge_name(e));

  EigenMetricResult res;
  auto metric_graph = std::make_shared<MarkedGraph>(g.with_metric(lengths));
  res.graph = metric_graph;
  std::vector<int> vimg(g.num_vertices());
  for (int v = 0; v < g.num_vertices(); ++v) vimg[v] = m.vertex_image(v);
  std::vector<EdgePath> eimg(g.num_edges());
  for (int e = 0; e < g.num_edges(); ++e) eimg[e] = m.edge_image(e);
  res.map = GraphSelfMap(metric_graph, std::move(vimg), std::move(eimg));
  res.lambda = pf.lambda;
  for (int e = 0; e < g.num_edges(); ++e) {
    double img_len = path_length(*metric_graph, res.map.edge_image(e));
    res.max_stretch_error =
        std::max(res.max_stretch_error,
                 std::abs(img_len - res.lambda * metric_graph->edge_length(e)));
  }
  return res;
}

std::int64_t preimage_count(const TransitionMatrix& M, int edge_row, int n) {
  // Directed n-paths in TG ending at the edge: with TG adjacency = M^T this
  // is the row sum of M^n at that edge.
  TransitionMatrix P = M.pow(n);
  std::int64_t total = 0;
  for (int j = 0; j < M.dim(); ++j) total += P.entry(edge_row, j);
  return total;
}

std::int64_t preimage_count(const GraphSelfMap& m, int edge, int n) {
  return preimage_count(transition_matrix(m), edge, n);
}

}  // namespace ttk
