// ttk: train track toolkit for free group outer automorphisms.
//
// Subcommands analyze fixtures (graph + self-map JSON, or rose automorphism
// image words): expansion factors, gate structures, Stallings fold
// factorizations, Nielsen path elimination and search, classification, wedge
// model combinatorics, automorphism inversion, growth estimates, and the
// expansion factor gap check against an inverse.

#include <CLI11.hpp>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include "ttk/json_io.hpp"
#include "ttk/word.hpp"

using namespace ttk;

namespace {

struct Options {
  double tol = 1e-10;
  int max_power = 24;
  int max_back = 64;
  int depth = 6;
  bool emit_json = false;
  bool emit_dot = false;
  bool strict = false;
  bool derive = false;
  int jobs = 1;
  std::string inverse_file;
};

struct Report {
  int exit_code = 0;
  std::string text;
};

void emit_json_report(std::ostream& out, json j) {
  j["ttk_schema"] = 1;
  out << j.dump(2) << "\n";
}

Report run_check(const Fixture& f, const Options& opt) {
  auto g = validate_graph(f.map.graph());
  auto m = check_map(f.map);
  std::ostringstream out;
  if (opt.emit_json) {
    emit_json_report(out, validation_to_json(g, m));
  } else {
    out << "graph: " << (g.valid ? "valid" : "INVALID") << ", connected "
        << (g.connected ? "yes" : "no") << ", rank " << g.rank << "\n";
    for (const auto& [v, val] : g.valence_table) out << "  valence(" << v << ") = " << val << "\n";
    out << "map: " << (m.valid ? "valid" : "INVALID") << "\n";
    for (const auto& p : g.problems) out << "  problem: " << p << "\n";
    for (const auto& p : m.problems) out << "  problem: " << p << "\n";
  }
  return {g.valid && m.valid ? 0 : 2, out.str()};
}

Report run_lambda(const Fixture& f, const Options& opt) {
  TransitionMatrix M = transition_matrix(f.map);
  PFData pf = is_irreducible(M) ? pf_eigen(M, opt.tol) : PFData{};
  double radius = is_irreducible(M) ? pf.lambda : spectral_radius(M, opt.tol);
  std::ostringstream out;
  if (opt.emit_json) {
    json j{{"matrix", matrix_to_json(M)}};
    if (is_irreducible(M))
      j["pf"] = pf_to_json(pf);
    else
      j["spectral_radius"] = format_double(radius);
    emit_json_report(out, j);
  } else {
    out << "lambda = " << format_double(radius) << "\n";
    if (is_irreducible(M))
      out << (pf.primitive ? "transition matrix is primitive\n"
                           : "transition matrix is irreducible but imprimitive\n");
    else
      out << "transition matrix is reducible; spectral radius over components\n";
  }
  return {0, out.str()};
}

Report run_turns(const Fixture& f, const Options& opt) {
  auto gs = gates(f.map);
  auto tt = is_train_track(f.map);
  std::ostringstream out;
  json wj;
  for (int v = 0; v < f.map.graph().num_vertices(); ++v) {
    auto w = local_whitehead_graph(f.map, v);
    wj[f.map.graph().vertex_name(v)] = {{"connected", w.connected},
                                        {"edges", w.edges.size()},
                                        {"iterate_bound", w.iterate_bound}};
  }
  if (opt.emit_json) {
    json j = gates_to_json(f.map, gs);
    j["train_track"] = tt.is_train_track;
    if (tt.witness)
      j["witness"] = {{"edge", f.map.graph().edge_name(tt.witness->edge)},
                      {"position", tt.witness->position},
                      {"turn", format_turn(f.map.graph(), tt.witness->turn)}};
    j["whitehead"] = wj;
    emit_json_report(out, j);
  } else {
    out << "train track: " << (tt.is_train_track ? "yes" : "no") << "\n";
    if (tt.witness)
      out << "  witness: image of " << f.map.graph().edge_name(tt.witness->edge)
          << " crosses " << format_turn(f.map.graph(), tt.witness->turn) << "\n";
    out << "illegal turns:";
    for (const auto& t : gs.illegal_turns) out << " " << format_turn(f.map.graph(), t);
    out << "\nperiodic direction period lcm: " << gs.period_lcm << "\n";
    for (auto it = wj.begin(); it != wj.end(); ++it)
      out << "turn graph at " << it.key() << ": "
          << (it.value()["connected"].get<bool>() ? "connected" : "DISCONNECTED") << "\n";
  }
  return {0, out.str()};
}

Report run_folds(const Fixture& f, const Options& opt) {
  FoldSequence seq = fold_factorization(f.map);
  bool ok = verify_factorization(seq, f.map);
  std::ostringstream out;
  if (opt.emit_json) {
    json j = fold_sequence_to_json(seq);
    j["verified"] = ok;
    emit_json_report(out, j);
  } else {
    out << "factorization: " << seq.fold_count << " folds, " << seq.subdivision_count
        << " subdivisions, recomposition " << (ok ? "verified" : "FAILED") << "\n";
  }
  return {ok ? 0 : 2, out.str()};
}

Report run_nielsen(const Fixture& f, const Options& opt) {
  auto elim = nielsen_elimination(f.map, opt.max_back);
  std::ostringstream out;
  json j{{"elimination", elimination_to_json(elim)}};
  std::ostringstream text;
  if (elim.kind == EliminationResult::Kind::empty) {
    text << "no periodic Nielsen paths (emptied after " << elim.steps << " steps)\n";
  } else {
    if (elim.kind == EliminationResult::Kind::survivors)
      text << "elimination cycles with " << elim.survivors.size() << " surviving paths (repeat at step "
           << elim.steps << ", period " << elim.period << ")\n";
    else
      text << "elimination exhausted " << elim.steps << " steps\n";
    auto inp = find_inp(f.map, opt.max_power);
    json pj = json::array();
    for (const auto& cand : inp.paths) {
      pj.push_back({{"path", format_path(cand.model->map.graph(), cand.path.path)},
                    {"power", cand.path.power},
                    {"length",
                     format_double(path_length(cand.model->map.graph(), cand.path.path))}});
      text << "indivisible Nielsen path (power " << cand.path.power << "): "
           << format_path(cand.model->map.graph(), cand.path.path) << "\n";
    }
    if (inp.paths.empty()) text << "no indivisible periodic Nielsen path within the caps\n";
    j["inp"] = pj;
    for (const auto& n : inp.notes) text << "note: " << n << "\n";
  }
  if (opt.emit_json)
    emit_json_report(out, j);
  else
    out << text.str();
  return {0, out.str()};
}

Classification classify_with_derivation(const Fixture& f, const Options& opt, int* power,
                                        std::vector<std::string>* log) {
  Classification c = classify(f.map, opt.max_power, opt.max_back);
  if (power) *power = 1;
  if (c.verdict != Classification::Verdict::indeterminate || !opt.derive) return c;
  auto derived = derive_nielsen_unique(f.map, std::min(opt.max_power, 12));
  if (!derived) return c;
  if (log) *log = derived->log;
  Classification cd = classify(derived->map, 0, opt.max_back);
  if (power) *power = derived->power * (cd.inp ? cd.inp->path.power : 1);
  cd.notes.insert(cd.notes.begin(),
                  "classified a derived Nielsen-unique representative of the power-" +
                      std::to_string(derived->power) + " iterate");
  return cd;
}

Report run_classify(const Fixture& f, const Options& opt) {
  std::vector<std::string> log;
  Classification c = classify_with_derivation(f, opt, nullptr, &log);
  std::ostringstream out;
  if (opt.emit_json) {
    json j = classification_to_json(c);
    if (!log.empty()) j["derivation"] = log;
    emit_json_report(out, j);
  } else {
    out << "verdict: " << verdict_name(c.verdict) << "\n";
    if (!c.reason.empty()) out << "reason: " << c.reason << "\n";
    for (const auto& n : c.notes) out << "  " << n << "\n";
  }
  int code = 0;
  if (c.verdict == Classification::Verdict::indeterminate && opt.strict) code = 3;
  return {code, out.str()};
}

Report run_wedge(const Fixture& f, const Options& opt) {
  Options dopt = opt;
  dopt.derive = true;
  int power = 1;
  Classification c = classify_with_derivation(f, dopt, &power, nullptr);
  std::ostringstream out;
  if (!c.inp || (c.verdict != Classification::Verdict::parageometric_candidate &&
                 c.verdict != Classification::Verdict::geometric_candidate)) {
    out << "verdict: " << verdict_name(c.verdict) << "\n";
    if (!c.reason.empty()) out << "reason: " << c.reason << "\n";
    return {opt.strict ? 3 : 0, out.str()};
  }
  const auto& cand = *c.inp;
  WedgeModel w = build_wedge(cand.model->map, cand.model->lambda, cand.path);
  NonfreeSubgraph sub = nonfree_subgraph(w, opt.tol);

  json leaves = json::array();
  std::ostringstream dots;
  const MarkedGraph& g = w.map.graph();
  for (int e = 0; e < g.num_edges(); ++e) {
    LeafPoint x{e, g.edge_length(e) / 2};
    LeafGraph lg = leaf_graph(w, x, opt.depth);
    leaves.push_back({{"edge", g.edge_name(e)},
                      {"points", lg.points.size()},
                      {"segments", lg.segments.size()},
                      {"acyclic", lg.acyclic},
                      {"valence_at_basepoint", lg.valence.empty() ? 0 : lg.valence[0]}});
    if (opt.emit_dot) dots << leaf_graph_dot(w, lg);
  }

  if (opt.emit_json) {
    json j{{"verdict", verdict_name(c.verdict)},
           {"power", power},
           {"dihedral_valence", w.dihedral_valence},
           {"free_edges", w.free_edges},
           {"closed", w.closed},
           {"nonfree_subgraph", sub.edges},
           {"m1", matrix_to_json(sub.m1)},
           {"lambda_prime", format_double(sub.lambda_prime)},
           {"lambda", format_double(cand.model->lambda)},
           {"leaf_graphs", leaves}};
    emit_json_report(out, j);
  } else {
    out << "verdict: " << verdict_name(c.verdict) << " (power " << power << ")\n";
    out << "dihedral valences:";
    for (const auto& [name, v] : w.dihedral_valence) out << " " << name << "=" << v;
    out << "\nfree edges:";
    for (const auto& n : w.free_edges) out << " " << n;
    out << "\nlambda' = " << format_double(sub.lambda_prime)
        << "  (lambda = " << format_double(cand.model->lambda) << ")\n";
    for (const auto& l : leaves)
      out << "leaf at mid " << l["edge"].get<std::string>() << ": " << l["points"]
          << " points, acyclic " << (l["acyclic"].get<bool>() ? "yes" : "NO") << "\n";
  }
  if (opt.emit_dot) out << dots.str();
  return {0, out.str()};
}

Report run_invert(const Fixture& f, const Options& opt) {
  GraphSelfMap psi = invert_automorphism(f.map);
  std::ostringstream out;
  if (opt.emit_json) {
    emit_json_report(out, json{{"inverse", map_to_json(psi)}});
  } else {
    const MarkedGraph& g = psi.graph();
    for (int e = 0; e < g.num_edges(); ++e)
      out << g.edge_name(e) << " -> " << format_path(g, psi.edge_image(e)) << "\n";
  }
  return {0, out.str()};
}

Report run_growth(const Fixture& f, const Options& opt) {
  int rank = rose_rank(f.map);
  auto est = growth_rate(f.map, default_growth_seeds(rank), opt.max_power);
  std::ostringstream out;
  if (opt.emit_json) {
    json roots = json::array();
    for (double r : est.diagnostics.root_estimates) roots.push_back(format_double(r));
    emit_json_report(out, json{{"estimate", format_double(est.estimate)},
                               {"lengths", est.diagnostics.lengths},
                               {"root_estimates", roots},
                               {"monotone", est.diagnostics.monotone},
                               {"truncated_at", est.diagnostics.truncated_at}});
  } else {
    out << "growth estimate = " << format_double(est.estimate) << "\n";
    if (est.diagnostics.truncated_at > 0)
      out << "note: iteration truncated at n = " << est.diagnostics.truncated_at
          << " by the word length guard\n";
    if (!est.diagnostics.monotone) out << "note: convergence was not monotone\n";
  }
  return {0, out.str()};
}

Report run_verify_gap(const Fixture& f, const Options& opt) {
  Options dopt = opt;
  dopt.derive = true;
  int power = 1;
  Classification c = classify_with_derivation(f, dopt, &power, nullptr);

  InverseEvidence ev;
  if (!opt.inverse_file.empty()) {
    Fixture inv = load_fixture(opt.inverse_file);
    ev.representative = inv.map;
    ev.description = inv.name;
  } else if (f.inverse) {
    ev.representative = f.inverse;
    ev.description = "inverse supplied with the fixture";
  } else if (is_rose_map(f.map)) {
    GraphSelfMap psi = invert_automorphism(f.map);
    auto est = growth_rate(psi, default_growth_seeds(rose_rank(f.map)), 20);
    ev.growth_estimate = est.estimate;
    ev.description = "growth of the computed inverse automorphism";
  }

  GapReport rep = verify_gap(c, power, ev, opt.tol);
  std::ostringstream out;
  if (opt.emit_json) {
    emit_json_report(out, gap_to_json(rep));
  } else {
    out << "lambda          = " << format_double(rep.lambda_phi) << "\n"
        << "lambda'         = " << format_double(rep.lambda_prime) << "\n"
        << "lambda(inverse) = " << format_double(rep.lambda_inverse) << "\n"
        << "verdict: " << (rep.verdict ? "lambda(inverse) <= lambda' < lambda" : "FAILED")
        << "  (power " << rep.power << " values: " << format_double(rep.lambda_inverse_power)
        << " <= " << format_double(rep.lambda_prime_power) << " < "
        << format_double(rep.lambda_phi_power) << ")\n";
    for (const auto& p : rep.provenance) out << "  " << p << "\n";
  }
  return {rep.verdict ? 0 : 2, out.str()};
}

Report run_command(const std::string& cmd, const std::string& path, const Options& opt) {
  try {
    Fixture f = load_fixture(path);
    if (cmd == "check") return run_check(f, opt);
    if (cmd == "lambda") return run_lambda(f, opt);
    if (cmd == "turns") return run_turns(f, opt);
    if (cmd == "folds") return run_folds(f, opt);
    if (cmd == "nielsen") return run_nielsen(f, opt);
    if (cmd == "classify") return run_classify(f, opt);
    if (cmd == "wedge") return run_wedge(f, opt);
    if (cmd == "invert") return run_invert(f, opt);
    if (cmd == "growth") return run_growth(f, opt);
    if (cmd == "verify-gap") return run_verify_gap(f, opt);
    return {2, "unknown command\n"};
  } catch (const error& e) {
    return {2, std::string(errc_name(e.code)) + ": " + e.what() + "\n"};
  } catch (const std::exception& e) {
    return {2, std::string("error: ") + e.what() + "\n"};
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"ttk: train track machinery for free group outer automorphisms"};
  app.require_subcommand(1);

  Options opt;
  std::vector<std::string> fixtures;

  for (const char* name : {"check", "lambda", "turns", "folds", "nielsen", "classify",
                           "wedge", "invert", "growth", "verify-gap"}) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("fixtures", fixtures, "fixture files")->required()->expected(-1);
    sub->add_option("--tol", opt.tol, "numeric tolerance");
    sub->add_option("--max-power", opt.max_power, "power bound / growth iterations");
    sub->add_option("--max-back", opt.max_back, "elimination step budget");
    sub->add_option("--depth", opt.depth, "leaf graph depth");
    sub->add_flag("--json", opt.emit_json, "machine readable reports");
    sub->add_flag("--dot", opt.emit_dot, "DOT output for leaf graphs");
    sub->add_flag("--strict", opt.strict, "exit 3 on indeterminate verdicts");
    sub->add_flag("--derive", opt.derive, "derive a Nielsen-unique representative if needed");
    sub->add_option("--jobs", opt.jobs, "fixtures analyzed concurrently");
    sub->add_option("--inverse", opt.inverse_file, "fixture for the inverse class");
  }

  CLI11_PARSE(app, argc, argv);
  std::string cmd = app.get_subcommands().front()->get_name();

  std::vector<Report> reports(fixtures.size());
  if (opt.jobs > 1 && fixtures.size() > 1) {
    std::vector<std::future<Report>> futs;
    for (const auto& path : fixtures)
      futs.push_back(std::async(std::launch::async, run_command, cmd, path, opt));
    for (size_t i = 0; i < futs.size(); ++i) reports[i] = futs[i].get();
  } else {
    for (size_t i = 0; i < fixtures.size(); ++i) reports[i] = run_command(cmd, fixtures[i], opt);
  }

  int exit_code = 0;
  for (size_t i = 0; i < fixtures.size(); ++i) {
    if (fixtures.size() > 1) std::cout << "== " << fixtures[i] << "\n";
    std::cout << reports[i].text;
    exit_code = std::max(exit_code, reports[i].exit_code);
  }
  return exit_code;
}
