#pragma once

#include <array>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mf/bass_serre/stabilizer.hpp"
#include "mf/quasiline/quasiline.hpp"

namespace mf {

// Base-edge word read along a geodesic from x to g(x); "eK" follows base edge K, "eK^-1"
// runs against it.
inline std::string deck_word(const Ball& B, Vid x, const Automorphism& g) {
  const Vid y = g.image[x];
  if (y == kNone) return "?";
  Geodesic path = B.metric().geodesic(x, y);
  std::string out;
  for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
    Vid u = path.vertices[i], w = path.vertices[i + 1];
    auto e = detail::window_edge(*B.complex, u, w);
    if (!e) continue;
    if (!out.empty()) out += '.';
    out += "e" + std::to_string(B.proj_edge[*e]);
    if (B.complex->edges[*e].tail != u) out += "^-1";
  }
  return out.empty() ? "1" : out;
}

// Section image under a deck map, restricted to pairs whose image stays in the window.
inline Section translate_section(const Section& S, const Automorphism& g) {
  Section out;
  for (auto [y, x] : S.pairs) {
    Vid gx = g.image[x];
    if (gx == kNone) continue;
    if (out.index.emplace(Section::key(y, gx), static_cast<std::uint32_t>(out.pairs.size())).second)
      out.pairs.push_back({y, gx});
  }
  return out;
}

// One coset examined at a root chamber: an edge elevation or an outward path.
struct CosetItem {
  std::vector<std::uint32_t> type;
  std::vector<std::uint32_t> strips;
  ConvexSet gate;
  std::function<bool(const Automorphism&)> keep;
  std::vector<std::string> caveats;
};

struct TripleRecord {
  std::uint32_t root_vertex = 0;
  int condition = 1;  // 1: three cosets of one type; 2: one coset and a pair of another type
  std::array<std::size_t, 3> items{};
  std::array<std::vector<std::uint32_t>, 3> item_strips;
  CyclicVerdict verdict = CyclicVerdict::undecided;
  std::size_t gate_size = 0;
  int quotient_diam = 0;
  bool complete = false;
  std::vector<std::string> witness_words;  // primitive, and the independent element when higher
  std::vector<std::string> caveats;

  // kept so the stature budget can rebuild quasilines from cyclic triples
  std::shared_ptr<const Ball> ball;
  ConvexSet gate;
  std::optional<Automorphism> primitive;
  LabelledComplex quotient;
};

struct CyclonormalReport {
  int path_length = 0;  // 0 for edge mode
  int depth = 0, radius = 0, coset_cap = 0;
  std::vector<TripleRecord> triples;
  std::array<std::size_t, 4> counts{};  // by CyclicVerdict
  bool pass = true;
  bool undecided_dominated = false;
  bool truncated = false;
  std::optional<std::size_t> witness;  // first higher triple
  std::vector<std::string> caveats;

  std::string mode() const { return path_length == 0 ? "edges" : "paths:" + std::to_string(path_length); }
};

inline constexpr std::size_t kMaxTriples = 5000;

namespace detail {

inline std::vector<CosetItem> edge_items(const TreeWindow& W) {
  std::vector<CosetItem> out;
  const Chamber& root = W.chambers[0];
  const Ball& B = *root.ball;
  for (std::uint32_t sid : root.strips) {
    const Strip& s = W.strips[sid];
    CosetItem it;
    it.type = {s.gamma_edge * 2 + static_cast<std::uint32_t>(s.near_side)};
    it.strips = {sid};
    it.gate = hull_set(B.metric(), s.near.vertices());
    it.keep = [&B, &s](const Automorphism& g) { return preserves_section(B, g, s.near); };
    out.push_back(std::move(it));
  }
  return out;
}

inline std::vector<CosetItem> path_items(const TreeWindow& W, int n) {
  std::vector<CosetItem> out;
  for (TreePath& rho : paths_from(W, 0, n)) {
    CosetItem it;
    it.type = path_type(W, rho);
    it.strips = rho.strips;
    PathGate pg = path_gate(W, rho, false);
    it.gate = std::move(pg.gate);
    it.caveats = std::move(pg.caveats);
    it.keep = [&W, rho](const Automorphism& g) { return preserves_path(W, rho, g); };
    out.push_back(std::move(it));
  }
  return out;
}

inline TripleRecord examine_triple(const TreeWindow& W, const std::vector<CosetItem>& items, int condition,
                                   std::size_t a, std::size_t b, std::size_t c) {
  const Chamber& root = W.chambers[0];
  const Ball& B = *root.ball;
  TripleRecord r;
  r.root_vertex = root.gamma_vertex;
  r.condition = condition;
  r.items = {a, b, c};
  r.item_strips = {items[a].strips, items[b].strips, items[c].strips};
  r.ball = root.ball;
  r.gate = pitchfork_chain(B.metric(), {items[a].gate, items[b].gate, items[c].gate});
  StabilizerApprox st = stabilizer_search(B, r.gate, [&](const Automorphism& g) {
    return items[a].keep(g) && items[b].keep(g) && items[c].keep(g);
  });
  r.verdict = st.verdict;
  r.gate_size = r.gate.size();
  r.quotient_diam = st.quotient_diam;
  r.complete = st.complete;
  r.caveats = st.caveats;
  for (std::size_t i : {a, b, c})
    for (const auto& cv : items[i].caveats) r.caveats.push_back(cv);
  if (st.primitive) r.witness_words.push_back(deck_word(B, st.anchor, *st.primitive));
  if (st.independent) r.witness_words.push_back(deck_word(B, st.anchor, st.elements[st.independent->second]));
  r.primitive = st.primitive;
  r.quotient = std::move(st.quotient);
  return r;
}

}  // namespace detail

// Window check that every triple intersection of coset stabilizers at a vertex is
// trivial or cyclic. Only the root chamber of a window at each graph vertex is examined:
// the conditions are invariant under the vertex group, and every chamber over a graph
// vertex is a translate of the root chamber of the window based there.
inline CyclonormalReport check_cyclonormal(std::shared_ptr<const GraphOfComplexes> G, int path_length,
                                           int depth_bound, int radius, int coset_cap,
                                           std::size_t max_triples = kMaxTriples) {
  if (path_length < 0) throw InputError("path length must be nonnegative");
  CyclonormalReport rep;
  rep.path_length = path_length;
  rep.depth = std::max({depth_bound, path_length, 1});
  rep.radius = radius;
  rep.coset_cap = coset_cap;
  bool capped = false;
  for (std::uint32_t v = 0; v < G->vertex_count() && !capped; ++v) {
    TreeWindow W = tree_window(G, v, rep.depth, radius, coset_cap);
    if (W.truncated()) rep.truncated = true;
    std::vector<CosetItem> items = path_length == 0 ? detail::edge_items(W) : detail::path_items(W, path_length);
    std::map<std::vector<std::uint32_t>, std::vector<std::size_t>> by_type;
    for (std::size_t i = 0; i < items.size(); ++i) by_type[items[i].type].push_back(i);
    auto add = [&](int cond, std::size_t a, std::size_t b, std::size_t c) {
      if (rep.triples.size() == max_triples) {
        capped = true;
        return false;
      }
      rep.triples.push_back(detail::examine_triple(W, items, cond, a, b, c));
      return true;
    };
    for (const auto& [type, ids] : by_type)
      for (std::size_t i = 0; i < ids.size(); ++i)
        for (std::size_t j = i + 1; j < ids.size(); ++j)
          for (std::size_t k = j + 1; k < ids.size(); ++k)
            if (!add(1, ids[i], ids[j], ids[k])) goto done;
    for (std::size_t r = 0; r < items.size(); ++r)
      for (const auto& [type, ids] : by_type) {
        if (type == items[r].type) continue;
        for (std::size_t i = 0; i < ids.size(); ++i)
          for (std::size_t j = i + 1; j < ids.size(); ++j)
            if (!add(2, r, ids[i], ids[j])) goto done;
      }
  done:;
  }
  if (capped) rep.caveats.push_back("stopped after " + std::to_string(max_triples) + " triples");
  if (rep.truncated) rep.caveats.push_back("coset enumeration was capped at " + std::to_string(coset_cap));
  for (std::size_t i = 0; i < rep.triples.size(); ++i) {
    const TripleRecord& t = rep.triples[i];
    ++rep.counts[static_cast<int>(t.verdict)];
    if (t.verdict == CyclicVerdict::higher && !rep.witness) rep.witness = i;
  }
  const std::size_t undecided = rep.counts[static_cast<int>(CyclicVerdict::undecided)];
  rep.pass = !rep.witness.has_value();
  rep.undecided_dominated = undecided > rep.triples.size() - undecided;
  return rep;
}

struct TripleQuasiline {
  StabilizerApprox stab;
  std::optional<Quasiline> quasiline;
  bool violation = false;  // the triple stabilizer is not cyclic
  std::vector<std::string> caveats;
};

// Gate of e, f and the translate g f in their common chamber, packaged as a quasiline
// when its stabilizer is cyclic.
inline TripleQuasiline triple_quasiline(const TreeWindow& W, std::uint32_t e, std::uint32_t f, const Automorphism& g,
                                        int min_periods = kMinPeriods) {
  if (e >= W.strips.size() || f >= W.strips.size()) throw InputError("strip not in window");
  const Strip &se = W.strips[e], &sf = W.strips[f];
  if (se.near_chamber != sf.near_chamber) throw PreconditionError("strips leave different chambers");
  std::shared_ptr<const Ball> ball = W.chambers[se.near_chamber].ball;
  const Ball& B = *ball;
  if (g.ball != ball.get()) throw PreconditionError("deck map belongs to a different chamber");
  if (detail::preserves_section(B, g, sf.near)) throw PreconditionError("translate stabilizes the second strip");
  Section gf = translate_section(sf.near, g);
  if (gf.pairs.empty()) throw BudgetError("translated strip leaves the window");
  const MedianSpace& M = B.metric();
  ConvexSet gate = pitchfork_chain(M, {hull_set(M, se.near.vertices()), hull_set(M, sf.near.vertices()),
                                       hull_set(M, gf.vertices())});
  TripleQuasiline out;
  out.stab = stabilizer_search(B, gate, [&](const Automorphism& h) {
    return detail::preserves_section(B, h, se.near) && detail::preserves_section(B, h, sf.near) &&
           detail::preserves_section(B, h, gf);
  });
  out.stab.chamber = se.near_chamber;
  out.caveats = out.stab.caveats;
  if (out.stab.verdict == CyclicVerdict::higher) out.violation = true;
  if (out.stab.verdict != CyclicVerdict::cyclic) return out;
  try {
    out.quasiline = validate_quasiline(ball, gate.members, *out.stab.primitive, min_periods);
  } catch (const PreconditionError& err) {
    out.caveats.push_back(std::string("cyclic gate did not validate as a quasiline: ") + err.what());
  }
  return out;
}

}  // namespace mf
