#include <cmath>

#include "doctest.h"
#include "fixtures_common.hpp"
#include "ttk/spectral.hpp"

using namespace ttk;
using namespace ttk::testing;

namespace {

// Characteristic polynomial of an integer matrix by the Faddeev-LeVerrier
// recurrence; exact in double for the small fixture matrices.
std::vector<double> char_poly(const TransitionMatrix& M) {
  int n = M.dim();
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;
  std::vector<double> Mk(n * n, 0.0), A(n * n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A[i * n + j] = static_cast<double>(M.entry(i, j));
  // Mk starts as the identity
  for (int i = 0; i < n; ++i) Mk[i * n + i] = 1.0;
  for (int k = 1; k <= n; ++k) {
    // Mk <- A * Mk
    std::vector<double> next(n * n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int l = 0; l < n; ++l)
        for (int j = 0; j < n; ++j) next[i * n + j] += A[i * n + l] * Mk[l * n + j];
    double tr = 0;
    for (int i = 0; i < n; ++i) tr += next[i * n + i];
    c[n - k] = -tr / k;
    for (int i = 0; i < n; ++i) next[i * n + i] += c[n - k];
    Mk = std::move(next);
  }
  return c;  // coefficients of x^0 .. x^n
}

double eval_poly(const std::vector<double>& c, double x) {
  double v = 0;
  for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i) v = v * x + c[i];
  return v;
}

// Largest real root by bisection on [1, hi]; the oracle the PF values are
// frozen against.
double largest_root(const std::vector<double>& c, double hi) {
  double lo = 1.0;
  // walk down from hi to find a sign change bracket
  while (eval_poly(c, hi) <= 0) hi *= 2;
  double x = hi;
  double step = (hi - lo) / 4096;
  while (x > lo && eval_poly(c, x) > 0) x -= step;
  lo = x;
  hi = x + step;
  for (int i = 0; i < 200; ++i) {
    double mid = (lo + hi) / 2;
    (eval_poly(c, mid) > 0 ? hi : lo) = mid;
  }
  return (lo + hi) / 2;
}

}  // namespace

TEST_CASE("transition matrix of phi matches the displayed transpose") {
  auto g = rose3();
  auto M = transition_matrix(phi_map(g));
  // convention: entry(e, e') counts e in the image of e'
  std::vector<std::int64_t> expect{1, 1, 0, 0, 0, 1, 1, 0, 0};  // rows A,B,C
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(M.entry(i, j) == expect[i * 3 + j]);
  // its transpose is the matrix printed in the classical account
  auto T = M.transposed();
  std::vector<std::int64_t> displayed{1, 0, 1, 1, 0, 0, 0, 1, 0};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(T.entry(i, j) == displayed[i * 3 + j]);
}

TEST_CASE("char polys of the rank-3 pair: x^3-x^2-1 and x^3-x-1") {
  auto cp = char_poly(transition_matrix(phi_map()));
  CHECK(cp[3] == doctest::Approx(1));
  CHECK(cp[2] == doctest::Approx(-1));
  CHECK(cp[1] == doctest::Approx(0));
  CHECK(cp[0] == doctest::Approx(-1));
  auto ci = char_poly(transition_matrix(phi_inverse_map()));
  CHECK(ci[3] == doctest::Approx(1));
  CHECK(ci[2] == doctest::Approx(0));
  CHECK(ci[1] == doctest::Approx(-1));
  CHECK(ci[0] == doctest::Approx(-1));
}

TEST_CASE("identity map gives the identity matrix, which is reducible") {
  auto g = rose3();
  auto M = transition_matrix(identity_map(g));
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(M.entry(i, j) == (i == j ? 1 : 0));
  CHECK(!is_irreducible(M));
}

TEST_CASE("phi matrix is irreducible and primitive") {
  auto M = transition_matrix(phi_map());
  CHECK(is_irreducible(M));
  int k = 0;
  CHECK(is_primitive(M, &k));
  CHECK(k <= 5);
}

TEST_CASE("two-vertex matrix is primitive despite zero entries") {
  auto M = transition_matrix(two_vertex_map());
  bool has_zero = false;
  for (int i = 0; i < M.dim(); ++i)
    for (int j = 0; j < M.dim(); ++j) has_zero |= M.entry(i, j) == 0;
  CHECK(has_zero);  // the literal matrix is not positive
  CHECK(is_primitive(M));
}

TEST_CASE("PF eigenvalues of the rank-3 pair to 1e-9, against the bisection oracle") {
  auto Mp = transition_matrix(phi_map());
  auto Mi = transition_matrix(phi_inverse_map());
  double oracle_p = largest_root(char_poly(Mp), 4);
  double oracle_i = largest_root(char_poly(Mi), 4);
  CHECK(oracle_p == doctest::Approx(1.465571232).epsilon(1e-8));
  CHECK(oracle_i == doctest::Approx(1.324717957).epsilon(1e-8));

  auto pf_p = pf_eigen(Mp, 1e-12);
  auto pf_i = pf_eigen(Mi, 1e-12);
  CHECK(std::abs(pf_p.lambda - oracle_p) < 1e-9);
  CHECK(std::abs(pf_i.lambda - oracle_i) < 1e-9);
  CHECK(pf_p.lambda > 1.4);
  CHECK(pf_i.lambda < 1.4);
  CHECK(pf_p.primitive);
  // Collatz-Wielandt bracket contains the returned value
  CHECK(pf_p.bracket_lo <= pf_p.lambda);
  CHECK(pf_p.lambda <= pf_p.bracket_hi);
}

TEST_CASE("two-vertex example: lambda = 3.199158087 to 1e-8") {
  auto M = transition_matrix(two_vertex_map());
  double oracle = largest_root(char_poly(M), 8);
  auto pf = pf_eigen(M, 1e-12);
  CHECK(std::abs(pf.lambda - oracle) < 1e-9);
  CHECK(pf.lambda == doctest::Approx(3.199158087).epsilon(1e-8));
}

TEST_CASE("PF eigenvalue is invariant under transposition") {
  for (auto m : {phi_map(), two_vertex_map()}) {
    auto M = transition_matrix(m);
    CHECK(std::abs(pf_eigen(M).lambda - pf_eigen(M.transposed()).lambda) < 1e-9);
  }
}

TEST_CASE("lambda(M^n) = lambda(M)^n for n <= 4") {
  auto M = transition_matrix(phi_map());
  double l = pf_eigen(M).lambda;
  for (int n = 1; n <= 4; ++n) {
    double ln = pf_eigen(M.pow(n)).lambda;
    CHECK(std::abs(ln - std::pow(l, n)) < n * 1e-8);
  }
}

TEST_CASE("spectral radius: zero matrix, irreducible case, block diagonal") {
  TransitionMatrix Z({"x", "y"}, {0, 0, 0, 0});
  CHECK(spectral_radius(Z) == 0.0);

  auto Mp = transition_matrix(phi_map());
  CHECK(std::abs(spectral_radius(Mp) - pf_eigen(Mp).lambda) < 1e-9);

  // block diagonal of the two rank-3 matrices
  auto Mi = transition_matrix(phi_inverse_map());
  std::vector<std::string> index{"A1", "B1", "C1", "A2", "B2", "C2"};
  std::vector<std::int64_t> entries(36, 0);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      entries[i * 6 + j] = Mp.entry(i, j);
      entries[(i + 3) * 6 + (j + 3)] = Mi.entry(i, j);
    }
  TransitionMatrix B(index, entries);
  CHECK(!is_irreducible(B));
  CHECK(spectral_radius(B) == doctest::Approx(1.465571232).epsilon(1e-8));
}

TEST_CASE("eigen metric stretches every edge length by lambda") {
  for (auto m : {phi_map(), two_vertex_map()}) {
    auto em = eigen_metric(m, 1e-12);
    CHECK(em.max_stretch_error <= 1e-8 * em.graph->total_length());
    double sum = 0;
    for (int e = 0; e < em.graph->num_edges(); ++e) sum += em.graph->edge_length(e);
    CHECK(sum == doctest::Approx(1.0));  // eigenvector normalized to total length 1
  }
}

TEST_CASE("identity map is rejected by eigen_metric") {
  CHECK_THROWS_AS(eigen_metric(identity_map(rose3())), error);
}

TEST_CASE("preimage counts: n = 0 and the phi example") {
  auto g = rose3();
  auto m = phi_map(g);
  CHECK(preimage_count(m, g->edge_index("A"), 0) == 1);
  CHECK(preimage_count(m, g->edge_index("A"), 1) == 2);  // A occurs in images of A and B
}

namespace {

// Explicit enumeration of directed n-paths in the transition digraph ending
// at a given edge. Arc lists are read straight off the edge images, one arc
// e -> e' per traversal of e' by the image of e.
std::int64_t count_tg_paths_ending_at(const GraphSelfMap& m, int target, int n) {
  int dim = m.graph().num_edges();
  std::vector<std::vector<int>> arcs(dim);
  for (int e = 0; e < dim; ++e)
    for (const auto& d : m.edge_image(e)) arcs[e].push_back(d.edge);
  std::int64_t count = 0;
  // walk every path of length n from every start vertex
  std::vector<std::pair<int, int>> stack;  // (edge, depth)
  for (int s = 0; s < dim; ++s) stack.emplace_back(s, 0);
  while (!stack.empty()) {
    auto [e, depth] = stack.back();
    stack.pop_back();
    if (depth == n) {
      if (e == target) ++count;
      continue;
    }
    for (int nx : arcs[e]) stack.emplace_back(nx, depth + 1);
  }
  return count;
}

}  // namespace

TEST_CASE("preimage counts match brute-force path enumeration in TG for n <= 8") {
  for (auto m : {phi_map(), two_vertex_map()}) {
    int dim = m.graph().num_edges();
    for (int n = 0; n <= 8; ++n)
      for (int e = 0; e < dim; ++e)
        CHECK(preimage_count(m, e, n) == count_tg_paths_ending_at(m, e, n));
  }
}

TEST_CASE("transition matrix of a composed train track map is the square") {
  for (auto m : {phi_map(), two_vertex_map()}) {
    auto M = transition_matrix(m);
    auto M2 = transition_matrix(compose(m, m));
    CHECK(M2 == M.times(M));
  }
}
