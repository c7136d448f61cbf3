#pragma once

#include <cmath>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include "mf/bass_serre/cyclonormal.hpp"

namespace mf {

enum class ValueStatus { computed, empirical, caller_supplied, symbolic };

inline const char* status_name(ValueStatus s) {
  switch (s) {
    case ValueStatus::computed: return "computed";
    case ValueStatus::empirical: return "empirical";
    case ValueStatus::caller_supplied: return "caller_supplied";
    default: return "symbolic";
  }
}

// A budget constant: a value, or only an expression when it does not fit in 64 bits.
struct BudgetValue {
  std::optional<long long> value;
  ValueStatus status = ValueStatus::computed;
  std::string expression;  // set for symbolic values
};

struct StatureBudget {
  BudgetValue S, Q, m, L, M, B, R, T, P, h;
  std::size_t quasiline_classes = 0;
  std::vector<std::string> notes;
  // graph vertex and constants of each quasiline class, with its essential dual-edge count
  std::vector<std::tuple<std::uint32_t, QuasilineConstants, int>> quasilines;
};

struct StatureClass {
  std::string canonical;
  int first_length = 0;
  std::vector<std::uint32_t> witness_strips;
  CyclicVerdict verdict = CyclicVerdict::cyclic;
  std::size_t quotient_vertices = 0, quotient_edges = 0, quotient_squares = 0;
  int quotient_diam = 0;
};

struct StaturePathRecord {
  int length = 0;
  std::vector<std::uint32_t> strips;
  CyclicVerdict verdict = CyclicVerdict::undecided;
  std::size_t gate_size = 0;
  std::optional<std::size_t> class_index;
  bool touches_boundary = false;
};

struct StatureReport {
  std::uint32_t base_vertex = 0;
  int max_length = 0, radius = 0, coset_cap = 0, plateau = 0;
  std::vector<std::size_t> tallies;      // index L-1: classes seen on paths of length <= L
  std::vector<std::size_t> path_counts;  // index L-1
  std::vector<std::size_t> infinite_counts;
  std::vector<std::size_t> undecided_counts;
  std::vector<StatureClass> classes;
  bool stabilization = false;
  std::optional<int> stabilization_length;
  StatureBudget budget;
  std::vector<std::string> caveats;
  std::vector<StaturePathRecord> paths;  // filled when tracing
};

struct StatureOptions {
  int plateau = 3;                  // lengths the tally must stay constant over
  std::optional<long long> S;       // overrides the empirical triple-quotient bound
  int quasiline_min_periods = 4;
  bool cross_check = true;
  bool trace = false;
};

namespace detail {

inline long long ceil_half(long long x) { return x / 2 + (x % 2 != 0); }

inline int essential_vertex_count(const Quasiline& Q, const Classification& C) {
  const HyperplaneData& H = Q.metric().hyperplanes();
  const CubeComplex& X = *Q.ball->complex;
  int best = 0;
  for (const auto& c : C.classes) {
    if (c.kind != HyperplaneKind::essential) continue;
    int n = 0;
    for (Eid e : H.dual_edges[c.id])
      if (Q.window.contains(X.edges[e].tail) && Q.window.contains(X.edges[e].head)) ++n;
    best = std::max(best, n);
  }
  return best;
}

struct QuasilineRep {
  std::uint32_t root_vertex;
  Quasiline Q;
  QuasilineConstants K;
  int L = 0;
};

inline BudgetValue known(long long v, ValueStatus s) { return {v, s, {}}; }
inline BudgetValue symbolic(std::string expr) { return {std::nullopt, ValueStatus::symbolic, std::move(expr)}; }

// Constants bounding the diameter of every infinite path-stabilizer quotient, from the
// cyclic triple gates found by the edge-mode cyclonormality scan.
inline StatureBudget stature_budget(std::shared_ptr<const GraphOfComplexes> G, int radius, int coset_cap,
                                    const StatureOptions& opt, std::vector<std::string>& caveats) {
  StatureBudget b;
  CyclonormalReport cn = check_cyclonormal(G, 0, 1, radius, coset_cap);
  long long S = 0;
  std::map<std::pair<std::uint32_t, std::string>, QuasilineRep> reps;
  std::size_t failed = 0;
  for (const TripleRecord& t : cn.triples) {
    if (t.verdict == CyclicVerdict::higher || t.verdict == CyclicVerdict::undecided) continue;
    S = std::max<long long>(S, t.quotient_diam);
    if (t.verdict != CyclicVerdict::cyclic) continue;
    std::string key;
    try {
      key = canonical_form(t.quotient);
    } catch (const BudgetError&) {
      ++failed;
      continue;
    }
    if (reps.count({t.root_vertex, key})) continue;
    try {
      Quasiline Q = validate_quasiline(t.ball, t.gate.members, *t.primitive, opt.quasiline_min_periods);
      Classification C = classify_or_throw(Q);
      QuasilineRep r{t.root_vertex, Q, quasiline_constants(Q, C), essential_vertex_count(Q, C)};
      reps.emplace(std::pair{t.root_vertex, key}, std::move(r));
    } catch (const Error&) {
      ++failed;
    }
  }
  if (failed) caveats.push_back(std::to_string(failed) + " cyclic triple gates could not be analysed as quasilines");
  if (!cn.pass) caveats.push_back("a triple stabilizer is not cyclic; the budget assumes cyclonormality");
  b.quasiline_classes = reps.size();
  for (const auto& [k, r] : reps) b.quasilines.emplace_back(r.root_vertex, r.K, r.L);

  b.S = opt.S ? known(*opt.S, ValueStatus::caller_supplied) : known(S, ValueStatus::empirical);
  long long Q = 0, m = 1;
  std::vector<const QuasilineRep*> list;
  for (const auto& [k, r] : reps) list.push_back(&r);
  for (std::size_t i = 0; i < list.size(); ++i)
    for (std::size_t j = i + 1; j < list.size(); ++j) {
      if (list[i]->Q.ball != list[j]->Q.ball) continue;
      try {
        CommensurationResult c = commensurate(list[i]->Q, list[j]->Q, 0);
        if (c.related)
          m = std::lcm(m, c.m);
        else
          Q = std::max<long long>(Q, c.projection_diam);
      } catch (const BudgetError&) {
        caveats.push_back("commensurability check left the window");
      }
    }
  b.Q = known(Q, ValueStatus::empirical);
  b.m = known(m, ValueStatus::empirical);
  long long Lc = 0, M = 0, h = 0, prod = 1;
  for (const QuasilineRep* r : list) {
    Lc = std::max<long long>(Lc, r->L);
    M = std::max<long long>(M, r->K.M);
    h = std::max<long long>(h, r->K.h);
  }
  b.L = known(Lc, ValueStatus::computed);
  b.M = known(M, ValueStatus::computed);
  b.h = known(h, ValueStatus::computed);
  try {
    for (const QuasilineRep* r : list) prod = checked_mul(prod, r->K.phi_length, "the product of |phi|");
    long long B = std::max(2 * *b.S.value, 2 * Q);
    const long long inner = checked_add(checked_mul(checked_mul(2 * m, prod, "2m*prod|phi|"), Lc, "2m*prod|phi|*L"),
                                        5, "2m*prod|phi|*L+5");
    for (const QuasilineRep* r : list) {
      B = std::max(B, r->K.B0);
      B = std::max(B, ceil_half(checked_mul(checked_mul(inner, r->K.n, "(..)n"), M, "(..)nM")));
    }
    b.B = known(B, ValueStatus::computed);
    const long long R = checked_add(checked_mul(3 * B, h + 1, "3B(h+1)"), h, "R");
    b.R = known(R, ValueStatus::computed);
  } catch (const BudgetError& err) {
    b.B = symbolic(std::string("overflow: ") + err.what());
    b.R = symbolic("3B(h+1)+h");
  }
  std::size_t edges = 0;
  for (const auto& X : G->edge_spaces) edges = std::max(edges, X->edge_count());
  if (!b.R.value) {
    b.T = symbolic(std::to_string(edges) + "^R");
  } else if (edges <= 1) {
    b.T = known(static_cast<long long>(edges), ValueStatus::computed);
  } else {
    const long long R = *b.R.value;
    long long T = 1;
    bool overflow = false;
    for (long long i = 0; i < R && !overflow; ++i) overflow = __builtin_mul_overflow(T, static_cast<long long>(edges), &T);
    b.T = overflow ? symbolic(std::to_string(edges) + "^" + std::to_string(R)) : known(T, ValueStatus::computed);
  }
  if (b.T.value && b.R.value) {
    long long P;
    if (__builtin_mul_overflow(*b.T.value + 1, *b.R.value, &P))
      b.P = symbolic("(T+1)R");
    else
      b.P = known(P, ValueStatus::computed);
  } else {
    b.P = symbolic("(T+1)R");
    b.notes.push_back("P omitted: T is too large to evaluate");
  }
  if (list.empty()) b.notes.push_back("no cyclic triple gate found; B reduces to max(2S, 2Q)");
  return b;
}

}  // namespace detail

// Counts classes of infinite path stabilizers, bucketed by their labelled gate
// quotients, over outward paths of length 1..max_length from the base vertex.
inline StatureReport stature_probe(std::shared_ptr<const GraphOfComplexes> G, std::uint32_t base_vertex,
                                   int max_length, int radius, int coset_cap, const StatureOptions& opt = {}) {
  if (max_length < 0) throw InputError("maximum path length must be nonnegative");
  StatureReport rep;
  rep.base_vertex = base_vertex;
  rep.max_length = max_length;
  rep.radius = radius;
  rep.coset_cap = coset_cap;
  rep.plateau = opt.plateau;
  if (base_vertex >= G->vertex_count()) throw InputError("base vertex not in graph");
  if (max_length == 0) return rep;

  TreeWindow W = tree_window(G, base_vertex, max_length, radius, coset_cap);
  if (W.truncated()) rep.caveats.push_back("coset enumeration was capped at " + std::to_string(coset_cap));
  std::map<std::string, std::size_t> seen;
  std::size_t disagreements = 0, boundary = 0;
  for (int L = 1; L <= max_length; ++L) {
    std::size_t paths = 0, infinite = 0, undecided = 0;
    for (const TreePath& rho : paths_from(W, 0, L)) {
      ++paths;
      PathStabilizerApprox ps = path_stabilizer(W, rho, opt.cross_check, true);
      if (ps.gate.cross_check && !*ps.gate.cross_check) ++disagreements;
      if (ps.gate.touches_boundary) ++boundary;
      const CyclicVerdict v = ps.stab.verdict;
      if (v == CyclicVerdict::undecided) ++undecided;
      if (opt.trace)
        rep.paths.push_back({L, rho.strips, v, ps.gate.gate.size(), std::nullopt, ps.gate.touches_boundary});
      if (v != CyclicVerdict::cyclic && v != CyclicVerdict::higher) continue;
      ++infinite;
      std::string key = canonical_form(ps.stab.quotient);
      auto [it, fresh] = seen.emplace(key, rep.classes.size());
      if (opt.trace) rep.paths.back().class_index = it->second;
      if (!fresh) continue;
      const CubeComplex& q = ps.stab.quotient.complex;
      rep.classes.push_back({key, L, rho.strips, v, q.vertex_count(), q.edge_count(), q.squares.size(),
                             ps.stab.quotient_diam});
    }
    rep.tallies.push_back(rep.classes.size());
    rep.path_counts.push_back(paths);
    rep.infinite_counts.push_back(infinite);
    rep.undecided_counts.push_back(undecided);
  }
  if (disagreements) rep.caveats.push_back(std::to_string(disagreements) + " path gates disagreed with the glued window");
  if (boundary) rep.caveats.push_back(std::to_string(boundary) + " path gates reach a window boundary");
  std::size_t undecided = std::accumulate(rep.undecided_counts.begin(), rep.undecided_counts.end(), std::size_t{0});
  if (undecided) rep.caveats.push_back(std::to_string(undecided) + " path stabilizers were undecided");

  if (max_length >= opt.plateau) {
    int start = max_length;
    while (start > 1 && rep.tallies[start - 2] == rep.tallies[max_length - 1]) --start;
    if (max_length - start + 1 >= opt.plateau) {
      rep.stabilization = true;
      rep.stabilization_length = start;
    }
  }
  if (!rep.stabilization && rep.tallies.size() >= 2 && rep.tallies.back() > rep.tallies[rep.tallies.size() - 2])
    rep.caveats.push_back("class tally is still growing at the longest length examined");
  rep.budget = detail::stature_budget(G, radius, coset_cap, opt, rep.caveats);
  return rep;
}

}  // namespace mf
