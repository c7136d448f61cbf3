#pragma once

#include <array>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "mf/bass_serre/canonical.hpp"
#include "mf/bass_serre/tree_window.hpp"

namespace mf {

namespace detail {

inline std::vector<Vid> near_vertices_of_far(const Strip& s, const std::vector<Vid>& far_vertices) {
  std::unordered_map<Vid, Vid> back;
  for (std::size_t k = 0; k < s.far.pairs.size(); ++k)
    if (s.near_of[k] != kNone) back.emplace(s.far.pairs[k].second, s.near_of[k]);
  std::vector<Vid> out;
  for (Vid x : far_vertices) {
    auto it = back.find(x);
    if (it != back.end()) out.push_back(it->second);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace detail

struct PathGate {
  std::uint32_t chamber = 0;   // first chamber of the path
  ConvexSet gate;              // inside the first chamber's window
  bool complete_transport = true;  // no gate vertex was lost crossing a strip
  bool touches_boundary = false;   // the gate reaches the edge of the window
  std::optional<bool> cross_check; // glued-window comparison, when it could be run
  std::vector<std::string> caveats;

  bool reliable() const { return complete_transport; }
};

namespace detail {

// The chambers and strips of a path glued into one complex: every strip contributes an
// edge per matched section pair and a square per matched section edge.
struct GluedPath {
  CubeComplex complex;
  std::vector<Vid> offset;  // per path chamber
};

inline std::optional<Eid> window_edge(const CubeComplex& X, Vid u, Vid w) {
  for (EdgeEnd x : X.ends_at(u))
    if (X.far_vertex(x) == w) return x.edge;
  return std::nullopt;
}

inline GluedPath glue_path(const TreeWindow& W, const TreePath& rho, std::size_t chambers) {
  ComplexBuilder b("glued", 3);
  GluedPath g;
  std::vector<Eid> edge_offset;
  Eid edges = 0;
  std::vector<std::uint32_t> path_chambers{W.strips[rho.strips[0]].near_chamber};
  for (std::size_t j = 0; j + 1 < chambers; ++j) path_chambers.push_back(W.strips[rho.strips[j]].far_chamber);
  for (std::size_t k = 0; k < chambers; ++k) {
    const CubeComplex& C = *W.chambers[path_chambers[k]].ball->complex;
    g.offset.push_back(static_cast<Vid>(k == 0 ? 0 : g.offset.back() +
                                                         W.chambers[path_chambers[k - 1]].ball->complex->vertex_count()));
    for (Vid v = 0; v < C.vertex_count(); ++v) b.add_vertex(std::to_string(k) + ":" + std::to_string(v));
  }
  for (std::size_t k = 0; k < chambers; ++k) {
    const CubeComplex& C = *W.chambers[path_chambers[k]].ball->complex;
    edge_offset.push_back(edges);
    for (const Edge& e : C.edges) b.add_edge(g.offset[k] + e.tail, g.offset[k] + e.head);
    edges += static_cast<Eid>(C.edge_count());
  }
  for (std::size_t k = 0; k < chambers; ++k) {
    const CubeComplex& C = *W.chambers[path_chambers[k]].ball->complex;
    for (const auto* cells : {&C.squares, &C.cubes3})
      for (const Cube& q : *cells) {
        std::vector<Vid> corners;
        std::vector<EdgeRef> refs;
        for (int c = 0; c < q.corner_count(); ++c) corners.push_back(g.offset[k] + q.corners[c]);
        for (int s = 0; s < q.edge_count(); ++s) refs.push_back({edge_offset[k] + q.edges[s].edge, q.edges[s].reversed});
        b.add_cell(q.dim, corners, refs);
      }
  }
  for (std::size_t j = 0; j + 1 < chambers; ++j) {
    const Strip& s = W.strips[rho.strips[j]];
    const CubeComplex& Y = *W.gog->edge_spaces[s.gamma_edge];
    const CubeComplex& Cn = *W.chambers[path_chambers[j]].ball->complex;
    const CubeComplex& Cf = *W.chambers[path_chambers[j + 1]].ball->complex;
    std::vector<Eid> rung(s.near.pairs.size(), kNone);
    for (std::size_t i = 0; i < s.near.pairs.size(); ++i) {
      if (s.far_of[i] == kNone) continue;
      b.add_edge(g.offset[j] + s.near.pairs[i].second, g.offset[j + 1] + s.far_of[i]);
      rung[i] = edges++;
    }
    for (std::size_t i = 0; i < s.near.pairs.size(); ++i) {
      if (rung[i] == kNone) continue;
      auto [y, xn] = s.near.pairs[i];
      for (EdgeEnd e : Y.ends_at(y)) {
        if (e.end != 0) continue;
        const Ball& Bn = *W.chambers[path_chambers[j]].ball;
        Vid xn2 = Bn.port(xn, W.gog->attachment(s.gamma_edge, s.near_side).image(e));
        if (xn2 == kNone) continue;
        std::uint32_t i2 = s.near.find(Y.far_vertex(e), xn2);
        if (i2 == kNone || rung[i2] == kNone) continue;
        auto en = window_edge(Cn, xn, xn2);
        auto ef = window_edge(Cf, s.far_of[i], s.far_of[i2]);
        if (!en || !ef) continue;
        auto ref = [&](const CubeComplex& C, Eid e2, Vid from, std::size_t k) {
          return EdgeRef{edge_offset[k] + e2, C.edges[e2].tail != from};
        };
        b.add_cell(2,
                   {g.offset[j] + xn, g.offset[j] + xn2, g.offset[j + 1] + s.far_of[i], g.offset[j + 1] + s.far_of[i2]},
                   std::vector<EdgeRef>{ref(Cn, *en, xn, j), ref(Cf, *ef, s.far_of[i], j + 1), {rung[i], false},
                                        {rung[i2], false}});
      }
    }
  }
  g.complex = b.build({.normalize_edges = false, .allow_duplicate_cells = false});
  return g;
}

}  // namespace detail

inline constexpr std::size_t kGlueCheckLimit = 3000;

// Gate of the path's elevations in its first chamber: starting from the last elevation,
// project onto the far end of each strip and carry the result across it.
inline PathGate path_gate(const TreeWindow& W, const TreePath& rho, bool cross_check = true) {
  check_path(W, rho);
  const std::size_t n = rho.strips.size();
  PathGate out;
  out.chamber = W.strips[rho.strips[0]].near_chamber;
  const Strip& last = W.strips[rho.strips[n - 1]];
  std::vector<Vid> G = last.near.vertices();
  for (std::size_t j = n - 1; j-- > 0;) {
    const Strip& s = W.strips[rho.strips[j]];
    const MedianSpace& M = W.chambers[s.far_chamber].ball->metric();
    ConvexSet far_set = hull_set(M, s.far.vertices());
    ConvexSet img = pitchfork(M, far_set, hull_set(M, G));
    const Ball& F = *W.chambers[s.far_chamber].ball;
    for (Vid v : img.members)
      if (!F.interior(v)) out.touches_boundary = true;
    std::vector<Vid> carried = detail::near_vertices_of_far(s, img.members);
    if (carried.size() != img.members.size()) out.complete_transport = false;
    if (carried.empty()) throw BudgetError("path gate left the window while crossing a strip");
    G = std::move(carried);
  }
  const Ball& B0 = *W.chambers[out.chamber].ball;
  out.gate = hull_set(B0.metric(), G);
  for (Vid v : out.gate.members)
    if (!B0.interior(v)) out.touches_boundary = true;
  if (!out.complete_transport) out.caveats.push_back("gate lost vertices crossing a strip; window too small");
  if (!cross_check || n == 1) return out;

  std::size_t total = 0;
  for (std::size_t j = 0; j < n; ++j) total += W.chambers[W.strips[rho.strips[j]].near_chamber].ball->size();
  if (total > kGlueCheckLimit) {
    out.caveats.push_back("glued-window cross-check skipped: " + std::to_string(total) + " vertices");
    return out;
  }
  if (!W.gog->edge_spaces[W.strips[rho.strips[0]].gamma_edge]->squares.empty())
    out.caveats.push_back("glued window omits the 3-cubes of strips over edge-space squares");
  detail::GluedPath gp = detail::glue_path(W, rho, n);
  Cat0Result r = analyze_cat0(gp.complex);
  if (!r.ok) {
    out.caveats.push_back("glued-window cross-check skipped: glued window is not CAT(0) (" + (r.witness ? r.witness->kind : std::string("?")) + ")");
    return out;
  }
  const MedianSpace& Z = *r.space;
  std::vector<ConvexSet> chain;
  for (std::size_t j = 0; j < n; ++j) {
    std::vector<Vid> vs;
    for (Vid x : W.strips[rho.strips[j]].near.vertices()) vs.push_back(gp.offset[j] + x);
    chain.push_back(hull_set(Z, vs));
  }
  ConvexSet two_term = pitchfork(Z, chain.front(), chain.back());
  ConvexSet full = pitchfork_chain(Z, chain);
  std::vector<Vid> primary = out.gate.members;  // chamber 0 sits at offset 0
  out.cross_check = two_term.members == full.members && full.members == primary;
  if (!*out.cross_check) out.caveats.push_back("glued-window gate disagrees with the strip-by-strip gate");
  return out;
}

enum class CyclicVerdict { trivial, cyclic, higher, undecided };

inline const char* verdict_name(CyclicVerdict v) {
  switch (v) {
    case CyclicVerdict::trivial: return "trivial";
    case CyclicVerdict::cyclic: return "cyclic";
    case CyclicVerdict::higher: return "higher";
    default: return "undecided";
  }
}

// Window-bounded search for the deck transformations of one chamber that satisfy a
// constraint, together with the resulting verdict and gate quotient.
struct StabilizerApprox {
  std::uint32_t chamber = 0;
  ConvexSet gate;
  Vid anchor = kNone;                  // gate vertex nearest the window centre
  std::vector<Automorphism> elements;  // nontrivial, in candidate order
  std::optional<Automorphism> primitive;
  std::vector<long> exponents;         // elements[i] = primitive^exponents[i] when cyclic
  std::optional<std::pair<std::size_t, std::size_t>> independent;  // witnesses for `higher`
  CyclicVerdict verdict = CyclicVerdict::undecided;
  bool two_ended = false;
  LabelledComplex quotient;
  int quotient_diam = 0;
  bool complete = false;  // every gate vertex within the search radius was tried
  std::vector<std::string> caveats;
};

namespace detail {

// Deck map sends the section to itself, judged at its most central pairs.
inline bool preserves_section(const Ball& B, const Automorphism& g, const Section& S) {
  int checked = 0;
  std::vector<std::uint32_t> order(S.pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return B.level[S.pairs[a].second] < B.level[S.pairs[b].second]; });
  for (std::uint32_t i : order) {
    auto [y, x] = S.pairs[i];
    Vid gx = g.image[x];
    if (gx == kNone) continue;
    if (!S.contains(y, gx)) return false;
    if (++checked == 3) break;
  }
  return checked > 0;
}

// Carries a deck map of the near chamber that preserves the strip to the far chamber.
inline std::optional<Automorphism> carry_across(const TreeWindow& W, const Strip& s, const Automorphism& g) {
  const Ball& F = *W.chambers[s.far_chamber].ball;
  std::vector<std::uint32_t> order(s.near.pairs.size());
  std::iota(order.begin(), order.end(), 0);
  const Ball& N = *W.chambers[s.near_chamber].ball;
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return N.level[s.near.pairs[a].second] < N.level[s.near.pairs[b].second]; });
  for (std::uint32_t i : order) {
    auto [y, x] = s.near.pairs[i];
    if (s.far_of[i] == kNone || g.image[x] == kNone) continue;
    std::uint32_t j = s.near.find(y, g.image[x]);
    if (j == kNone || s.far_of[j] == kNone) continue;
    try {
      return deck_search(F, s.far_of[i], s.far_of[j]);
    } catch (const InconsistencyError&) {
      return std::nullopt;
    }
  }
  return std::nullopt;
}

inline std::vector<std::vector<Vid>> induced_components(const CubeComplex& X, const std::vector<Vid>& keep) {
  std::unordered_map<Vid, std::size_t> idx;
  for (std::size_t i = 0; i < keep.size(); ++i) idx.emplace(keep[i], i);
  std::vector<int> comp(keep.size(), -1);
  std::vector<std::vector<Vid>> out;
  for (std::size_t i = 0; i < keep.size(); ++i) {
    if (comp[i] >= 0) continue;
    out.emplace_back();
    std::deque<std::size_t> q{i};
    comp[i] = static_cast<int>(out.size() - 1);
    while (!q.empty()) {
      std::size_t a = q.front();
      q.pop_front();
      out.back().push_back(keep[a]);
      for (EdgeEnd x : X.ends_at(keep[a])) {
        auto it = idx.find(X.far_vertex(x));
        if (it == idx.end() || comp[it->second] >= 0) continue;
        comp[it->second] = comp[i];
        q.push_back(it->second);
      }
    }
  }
  return out;
}

class Dsu {
 public:
  explicit Dsu(std::size_t n) : p_(n) { std::iota(p_.begin(), p_.end(), 0); }
  std::size_t find(std::size_t a) {
    while (p_[a] != a) a = p_[a] = p_[p_[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) p_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> p_;
};

// Gate modulo the window action of the given maps, labelled by the base cells.
inline LabelledComplex gate_quotient(const Ball& B, const ConvexSet& gate, const std::vector<Automorphism>& gens) {
  const CubeComplex& C = *B.complex;
  const auto& V = gate.members;
  std::unordered_map<Vid, std::size_t> vi;
  for (std::size_t i = 0; i < V.size(); ++i) vi.emplace(V[i], i);
  std::vector<Eid> E;
  std::unordered_map<std::uint64_t, std::size_t> ei;
  auto ekey = [](Vid a, Vid b) { return (static_cast<std::uint64_t>(a) << 32) | b; };
  for (Eid e = 0; e < C.edge_count(); ++e)
    if (vi.count(C.edges[e].tail) && vi.count(C.edges[e].head)) {
      ei.emplace(ekey(C.edges[e].tail, C.edges[e].head), E.size());
      E.push_back(e);
    }
  std::vector<Cid> S;
  std::map<std::array<Vid, 4>, std::size_t> si;
  for (Cid s = 0; s < C.squares.size(); ++s) {
    const Cube& q = C.squares[s];
    if (!std::all_of(q.corners.begin(), q.corners.begin() + 4, [&](Vid v) { return vi.count(v) > 0; })) continue;
    si.emplace(std::array<Vid, 4>{q.corners[0], q.corners[1], q.corners[2], q.corners[3]}, S.size());
    S.push_back(s);
  }
  Dsu dv(V.size()), de(E.size()), ds(S.size());
  for (const Automorphism& g : gens) {
    for (std::size_t i = 0; i < V.size(); ++i) {
      auto it = vi.find(g.image[V[i]]);
      if (g.image[V[i]] != kNone && it != vi.end()) dv.unite(i, it->second);
    }
    for (std::size_t i = 0; i < E.size(); ++i) {
      Vid a = g.image[C.edges[E[i]].tail], b = g.image[C.edges[E[i]].head];
      if (a == kNone || b == kNone) continue;
      auto it = ei.find(ekey(a, b));
      if (it != ei.end()) de.unite(i, it->second);
    }
    for (std::size_t i = 0; i < S.size(); ++i) {
      const Cube& q = C.squares[S[i]];
      std::array<Vid, 4> img{};
      bool ok = true;
      for (int c = 0; c < 4; ++c) {
        img[c] = g.image[q.corners[c]];
        if (img[c] == kNone) ok = false;
      }
      if (!ok) continue;
      auto it = si.find(img);
      if (it != si.end()) ds.unite(i, it->second);
    }
  }
  LabelledComplex L;
  CubeComplex& Q = L.complex;
  Q.name = "quotient";
  std::vector<Vid> vclass(V.size(), kNone);
  for (std::size_t i = 0; i < V.size(); ++i) {
    std::size_t r = dv.find(i);
    if (vclass[r] == kNone) {
      vclass[r] = static_cast<Vid>(Q.vertex_ids.size());
      Q.vertex_ids.push_back(std::to_string(Q.vertex_ids.size()));
      L.vertex_label.push_back(B.proj_vertex[V[r]]);
    }
    vclass[i] = vclass[r];
  }
  std::vector<Eid> eclass(E.size(), kNone);
  for (std::size_t i = 0; i < E.size(); ++i) {
    std::size_t r = de.find(i);
    if (eclass[r] == kNone) {
      eclass[r] = static_cast<Eid>(Q.edges.size());
      Q.edges.push_back({vclass[vi[C.edges[E[r]].tail]], vclass[vi[C.edges[E[r]].head]]});
      L.edge_label.push_back(B.proj_edge[E[r]]);
    }
    eclass[i] = eclass[r];
  }
  std::vector<bool> seen(S.size(), false);
  for (std::size_t i = 0; i < S.size(); ++i) {
    std::size_t r = ds.find(i);
    if (seen[r]) continue;
    seen[r] = true;
    Cube q = C.squares[S[r]];
    for (int c = 0; c < 4; ++c) q.corners[c] = vclass[vi[q.corners[c]]];
    for (int k = 0; k < 4; ++k) {
      const Edge& ed = C.edges[q.edges[k].edge];
      q.edges[k].edge = eclass[ei[ekey(ed.tail, ed.head)]];
    }
    Q.squares.push_back(q);
    L.square_label.push_back(B.proj_square[S[r]]);
  }
  Q.finalize();
  return L;
}

inline int graph_diameter(const CubeComplex& X) {
  int best = 0;
  for (Vid v = 0; v < X.vertex_count(); ++v)
    for (int d : bfs_distances(X, v)) best = std::max(best, d);
  return best;
}

}  // namespace detail

// Searches deck maps of a chamber carrying the anchor to gate vertices within half the
// radius, keeps those accepted by `keep`, and classifies the group they generate:
// cyclic when every element is a verified power of the one of least displacement and
// the gate has two unbounded ends, higher when some element is not such a power.
// The gate quotient is skipped for `higher` verdicts unless asked for: it is large and
// only the class tallies need it.
inline StabilizerApprox stabilizer_search(const Ball& B, const ConvexSet& gate,
                                          const std::function<bool(const Automorphism&)>& keep,
                                          bool quotient_when_higher = false) {
  StabilizerApprox st;
  st.gate = gate;
  for (Vid v : gate.members)
    if (st.anchor == kNone || B.level[v] < B.level[st.anchor]) st.anchor = v;
  const Vid x0 = st.anchor;
  const std::vector<int> dist = bfs_distances(*B.complex, x0);
  const int reach = B.radius / 2;
  st.complete = true;
  for (Vid y : gate.members) {
    if (y == x0 || B.proj_vertex[y] != B.proj_vertex[x0]) continue;
    if (dist[y] > reach) {
      st.complete = false;
      continue;
    }
    Automorphism g;
    try {
      g = deck_search(B, x0, y);
    } catch (const InconsistencyError&) {
      continue;
    }
    if (keep(g)) st.elements.push_back(std::move(g));
  }
  const MedianSpace& M = B.metric();
  int ecc = 0;
  for (Vid v : gate.members) ecc = std::max(ecc, M.distance(x0, v));
  {
    std::vector<Vid> outer;
    for (Vid v : gate.members)
      if (2 * M.distance(x0, v) > ecc) outer.push_back(v);
    st.two_ended = detail::induced_components(*B.complex, outer).size() == 2;
  }

  if (st.elements.empty()) {
    const bool small = 2 * ecc <= B.radius;
    st.verdict = small ? CyclicVerdict::trivial : CyclicVerdict::undecided;
    if (!small) st.caveats.push_back("no stabilizing element found but the gate is not small");
  } else {
    std::size_t best = 0;
    for (std::size_t i = 1; i < st.elements.size(); ++i)
      if (dist[st.elements[i].image[x0]] < dist[st.elements[best].image[x0]]) best = i;
    const Automorphism& p = st.elements[best];
    Automorphism pinv = inverse(p);
    // orbit of the anchor under the primitive, by exponent
    std::unordered_map<Vid, long> exponent{{x0, 0}};
    for (int sign : {1, -1}) {
      Vid v = x0;
      for (long k = 1;; ++k) {
        v = (sign > 0 ? p : pinv).image[v];
        if (v == kNone || exponent.count(v)) break;
        exponent.emplace(v, sign * k);
      }
    }
    bool all_powers = true, unverified = false;
    for (std::size_t i = 0; i < st.elements.size(); ++i) {
      auto it = exponent.find(st.elements[i].image[x0]);
      bool ok = it != exponent.end();
      if (ok) {
        try {
          Automorphism pk = power(p, it->second);
          for (Vid v = 0; v < B.size() && ok; ++v)
            if (pk.image[v] != kNone && st.elements[i].image[v] != kNone && pk.image[v] != st.elements[i].image[v])
              ok = false;
        } catch (const BudgetError&) {
          unverified = true;
          st.exponents.push_back(it->second);
          continue;
        }
      }
      st.exponents.push_back(ok ? it->second : 0);
      if (!ok && all_powers) {
        all_powers = false;
        st.independent = std::pair{best, i};
      }
    }
    st.primitive = p;
    if (!all_powers)
      st.verdict = CyclicVerdict::higher;
    else if (unverified) {
      st.verdict = CyclicVerdict::undecided;
      st.caveats.push_back("a power of the primitive left the window before it could be compared");
    } else if (st.two_ended)
      st.verdict = CyclicVerdict::cyclic;
    else {
      st.verdict = CyclicVerdict::undecided;
      st.caveats.push_back("elements are powers of one primitive but the gate does not show two ends");
    }
  }
  if (st.verdict == CyclicVerdict::higher && !quotient_when_higher) return st;
  std::vector<Automorphism> gens;
  if (st.verdict == CyclicVerdict::cyclic)
    gens.push_back(*st.primitive);
  else
    gens = st.elements;
  st.quotient = detail::gate_quotient(B, gate, gens);
  st.quotient_diam = detail::graph_diameter(st.quotient.complex);
  return st;
}

// Deck maps of the path's first chamber that preserve each strip of the path, carried
// across strip by strip.
inline bool preserves_path(const TreeWindow& W, const TreePath& rho, const Automorphism& g) {
  Automorphism cur = g;
  for (std::size_t j = 0; j < rho.strips.size(); ++j) {
    const Strip& s = W.strips[rho.strips[j]];
    const Ball& B = *W.chambers[s.near_chamber].ball;
    if (!detail::preserves_section(B, cur, s.near)) return false;
    if (j + 1 == rho.strips.size()) break;
    auto next = detail::carry_across(W, s, cur);
    if (!next) return false;
    cur = std::move(*next);
  }
  return true;
}

struct PathStabilizerApprox {
  TreePath path;
  PathGate gate;
  StabilizerApprox stab;
};

inline PathStabilizerApprox path_stabilizer(const TreeWindow& W, const TreePath& rho, bool cross_check = true,
                                            bool quotient_when_higher = false) {
  PathStabilizerApprox out;
  out.path = rho;
  out.gate = path_gate(W, rho, cross_check);
  const Ball& B = *W.chambers[out.gate.chamber].ball;
  out.stab = stabilizer_search(B, out.gate.gate, [&](const Automorphism& g) { return preserves_path(W, rho, g); },
                                quotient_when_higher);
  out.stab.chamber = out.gate.chamber;
  for (const auto& c : out.gate.caveats) out.stab.caveats.push_back(c);
  return out;
}

}  // namespace mf
