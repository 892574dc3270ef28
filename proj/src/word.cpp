#include "ttk/word.hpp"

#include <cmath>
#include <sstream>

namespace ttk {

FreeWord reduce(const FreeWord& w) {
  FreeWord out;
  out.reserve(w.size());
  for (int s : w) {
    if (s == 0) throw error(errc::parse_error, "zero symbol in word");
    if (!out.empty() && out.back() == -s)
      out.pop_back();
    else
      out.push_back(s);
  }
  return out;
}

FreeWord cyclic_reduce(const FreeWord& w) {
  FreeWord r = reduce(w);
  size_t lo = 0, hi = r.size();
  while (hi - lo >= 2 && r[lo] == -r[hi - 1]) {
    ++lo;
    --hi;
  }
  return FreeWord(r.begin() + lo, r.begin() + hi);
}

FreeWord inverse_word(const FreeWord& w) {
  FreeWord out(w.rbegin(), w.rend());
  for (int& s : out) s = -s;
  return out;
}

FreeWord concat_reduce(const FreeWord& a, const FreeWord& b) {
  FreeWord out = a;
  out.insert(out.end(), b.begin(), b.end());
  return reduce(out);
}

std::string format_word(const FreeWord& w, const std::vector<std::string>& basis) {
  std::string out;
  for (int s : w) {
    if (!out.empty()) out += ' ';
    if (s < 0) out += '~';
    out += basis.at(std::abs(s) - 1);
  }
  return out;
}

FreeWord parse_word(const std::string& tokens, const std::vector<std::string>& basis) {
  FreeWord w;
  std::istringstream in(tokens);
  std::string tok;
  while (in >> tok) {
    int sign = 1;
    if (tok.front() == '~') {
      sign = -1;
      tok.erase(tok.begin());
    }
    int idx = -1;
    for (size_t i = 0; i < basis.size(); ++i)
      if (basis[i] == tok) idx = static_cast<int>(i);
    if (idx < 0) throw error(errc::parse_error, "unknown generator: " + tok);
    w.push_back(sign * (idx + 1));
  }
  return w;
}

bool is_rose_map(const GraphSelfMap& m) { return m.graph().num_vertices() == 1; }

int rose_rank(const GraphSelfMap& m) {
  if (!is_rose_map(m)) throw error(errc::rank_mismatch, "map is not defined on a rose");
  return m.graph().num_edges();
}

FreeWord word_of_path(const EdgePath& p) {
  FreeWord w;
  for (const auto& d : p) w.push_back(d.forward ? d.edge + 1 : -(d.edge + 1));
  return w;
}

EdgePath path_of_word(const MarkedGraph& rose, const FreeWord& w) {
  EdgePath p;
  for (int s : w) {
    int e = std::abs(s) - 1;
    if (e >= rose.num_edges()) throw error(errc::rank_mismatch, "word symbol out of range");
    p.emplace_back(e, s > 0);
  }
  return p;
}

FreeWord apply_automorphism(const GraphSelfMap& phi, const FreeWord& w) {
  int r = rose_rank(phi);
  std::vector<FreeWord> images(r);
  for (int e = 0; e < r; ++e) images[e] = word_of_path(phi.edge_image(e));
  FreeWord out;
  out.reserve(w.size() * 2);
  auto push = [&out](int s) {
    if (!out.empty() && out.back() == -s)
      out.pop_back();
    else
      out.push_back(s);
  };
  for (int s : w) {
    int e = std::abs(s) - 1;
    if (e >= r) throw error(errc::rank_mismatch, "word uses a generator beyond the rose rank");
    const FreeWord& img = images[e];
    if (s > 0)
      for (int x : img) push(x);
    else
      for (auto it = img.rbegin(); it != img.rend(); ++it) push(-*it);
  }
  return out;
}

std::vector<FreeWord> default_growth_seeds(int rank) {
  std::vector<FreeWord> seeds;
  for (int i = 1; i <= rank; ++i) seeds.push_back({i});
  for (int i = 1; i <= rank; ++i)
    for (int j = 1; j <= rank; ++j)
      if (i != j) seeds.push_back({i, j});
  return seeds;
}

GrowthEstimate growth_rate(const GraphSelfMap& phi, const std::vector<FreeWord>& seeds, int N,
                           std::int64_t max_letters) {
  if (N < 2) throw error(errc::parse_error, "growth_rate needs N >= 2");
  if (seeds.empty()) throw error(errc::trivial_seed, "no seeds supplied");
  rose_rank(phi);

  GrowthEstimate best;
  best.estimate = 0;
  for (size_t s = 0; s < seeds.size(); ++s) {
    FreeWord w = cyclic_reduce(seeds[s]);
    if (w.empty()) throw error(errc::trivial_seed, "seed reduces to the trivial word");
    if (w != seeds[s]) throw error(errc::trivial_seed, "seed is not cyclically reduced");

    std::vector<std::int64_t> lengths{static_cast<std::int64_t>(w.size())};
    int truncated = 0;
    for (int n = 1; n <= N; ++n) {
      w = cyclic_reduce(apply_automorphism(phi, w));
      if (w.empty()) throw error(errc::trivial_seed, "seed dies under the automorphism");
      lengths.push_back(static_cast<std::int64_t>(w.size()));
      if (static_cast<std::int64_t>(w.size()) > max_letters && n < N) {
        truncated = n;
        break;
      }
    }
    int last = static_cast<int>(lengths.size()) - 1;
    if (last < 2) throw error(errc::trivial_seed, "word length guard hit immediately");
    double ratio =
        static_cast<double>(lengths[last]) / static_cast<double>(lengths[last - 1]);
    if (ratio > best.estimate) {
      best.estimate = ratio;
      GrowthDiagnostics d;
      d.best_seed = static_cast<int>(s);
      d.truncated_at = truncated;
      d.lengths = lengths;
      for (int n = 1; n <= last; ++n)
        d.root_estimates.push_back(
            std::pow(static_cast<double>(lengths[n]), 1.0 / n));
      // flag non-monotone convergence over the second half of the run
      d.monotone = true;
      for (size_t i = d.root_estimates.size() / 2; i + 1 < d.root_estimates.size(); ++i) {
        if ((d.root_estimates[i + 1] - d.root_estimates[i]) *
                (d.root_estimates.back() - d.root_estimates.front()) < 0 &&
            std::abs(d.root_estimates[i + 1] - d.root_estimates[i]) > 1e-6)
          d.monotone = false;
      }
      best.diagnostics = std::move(d);
    }
  }
  return best;
}

}  // namespace ttk
