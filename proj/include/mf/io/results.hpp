#pragma once

#include <string>
#include <vector>

#include "mf/bass_serre/stature.hpp"
#include "mf/cubecore/special.hpp"
#include "mf/io/json_io.hpp"

// JSON payloads for command reports.
namespace mf::io {

inline json ids_json(const CubeComplex& X, const std::vector<Vid>& vs) {
  json out = json::array();
  for (Vid v : vs) out.push_back(X.vertex_ids[v]);
  return out;
}

inline json end_json(const CubeComplex& X, EdgeEnd x) {
  return {{"edge", x.edge}, {"end", x.end == 0 ? "tail" : "head"}, {"at", X.vertex_ids[X.vertex_at(x)]}};
}

inline json npc_json(const CubeComplex& X, const NpcReport& r) {
  json issues = json::array();
  for (const LinkIssue& i : r.issues) {
    json ends = json::array();
    for (EdgeEnd x : i.ends) ends.push_back(end_json(X, x));
    issues.push_back({{"vertex", X.vertex_ids[i.vertex]}, {"kind", i.kind}, {"ends", ends}, {"cells", i.cells}});
  }
  return {{"npc", r.ok}, {"issues", issues}};
}

inline json cat0_json(const CubeComplex& X, const Cat0Result& r) {
  json j{{"cat0", r.ok}};
  if (r.witness)
    j["witness"] = {{"kind", r.witness->kind},
                    {"vertices", ids_json(X, r.witness->vertices)},
                    {"edges", r.witness->edges},
                    {"cells", r.witness->cells},
                    {"detail", r.witness->detail}};
  return j;
}

inline json hyperplanes_json(const CubeComplex& X, const HyperplaneData& H) {
  json out = json::array();
  for (std::uint32_t h = 0; h < H.count(); ++h) {
    json j{{"id", h},
           {"dual_edges", H.dual_edges[h]},
           {"two_sided", static_cast<bool>(H.two_sided[h])},
           {"carrier", ids_json(X, carrier_vertices(X, H, h))}};
    if (H.self_crossing_witness[h]) j["self_crossing_square"] = *H.self_crossing_witness[h];
    if (H.one_sided_witness[h]) j["one_sided_square"] = *H.one_sided_witness[h];
    out.push_back(j);
  }
  json crossings = json::array();
  for (auto [a, b] : H.crossings) crossings.push_back({a, b});
  return {{"count", H.count()}, {"hyperplanes", out}, {"crossings", crossings}};
}

inline json special_json(const CubeComplex& X, const SpecialnessReport& r) {
  json bad = json::array();
  for (const auto& h : r.hyperplanes) {
    if (h.ok()) continue;
    json j{{"hyperplane", h.id}};
    if (h.self_intersection) j["self_intersection_square"] = *h.self_intersection;
    if (h.one_sided) j["one_sided_square"] = *h.one_sided;
    if (h.self_osculation)
      j["self_osculation"] = {{"vertex", X.vertex_ids[h.self_osculation->vertex]},
                              {"ends", {end_json(X, h.self_osculation->a), end_json(X, h.self_osculation->b)}}};
    bad.push_back(j);
  }
  json inter = json::array();
  for (const auto& o : r.inter_osculations)
    inter.push_back({{"hyperplanes", {o.h1, o.h2}},
                     {"vertex", X.vertex_ids[o.vertex]},
                     {"ends", {end_json(X, o.a), end_json(X, o.b)}}});
  return {{"special", r.special}, {"violations", bad}, {"inter_osculations", inter}};
}

inline json classification_json(const Quasiline& Q, const Classification& C) {
  json classes = json::array();
  for (const auto& c : C.classes) {
    json j{{"hyperplane", c.id}, {"kind", kind_name(c.kind)}, {"rep", c.rep}, {"offset", c.offset}};
    if (c.diam) j["diam"] = *c.diam;
    classes.push_back(j);
  }
  return {{"phi_length", Q.phi_length},
          {"periods", Q.period_count},
          {"fundamental_domain", ids_json(*Q.ball->complex, Q.fundamental_domain)},
          {"window_size", Q.window.size()},
          {"counts",
           {{"trivial", C.count(HyperplaneKind::trivial)},
            {"half_essential", C.count(HyperplaneKind::half_essential)},
            {"essential", C.count(HyperplaneKind::essential)},
            {"undecided", C.count(HyperplaneKind::undecided)}}},
          {"classes", classes}};
}

inline json constants_json(const QuasilineConstants& k) {
  return {{"D", k.D}, {"K", k.K}, {"d", k.d}, {"N", k.N}, {"M", k.M},
          {"h", k.h}, {"n", k.n}, {"B0", k.B0}, {"phi_length", k.phi_length}};
}

inline json fellow_json(const Quasiline& Q, const FellowTravelResult& r) {
  const CubeComplex& X = *Q.ball->complex;
  return {{"ok", r.ok()},
          {"n", r.n},
          {"l", r.l},
          {"p", r.p},
          {"q", r.q},
          {"hyperplane", r.H},
          {"a", r.a == kNone ? json(nullptr) : json(X.vertex_ids[r.a])},
          {"C", ids_json(X, r.C.members)},
          {"gamma_hat", ids_json(X, r.gamma_hat.vertices)},
          {"checks",
           {{"gamma_hat_covered", r.gamma_hat_covered},
            {"union_in_window", r.union_in_W},
            {"union_is_hull", r.union_is_hull},
            {"long_enough", r.long_enough},
            {"l_bound", r.l_bound}}}};
}

inline json commensurate_json(const CommensurationResult& r) {
  return {{"related", r.related}, {"decided", r.decided}, {"d1", r.d1}, {"d2", r.d2}, {"m", r.m},
          {"projection_diam", r.projection_diam}, {"checked_vertices", r.checked_vertices}};
}

inline json window_json(const TreeWindow& W) {
  const GraphOfComplexes& G = *W.gog;
  json chambers = json::array(), strips = json::array();
  for (std::size_t c = 0; c < W.chambers.size(); ++c) {
    const Chamber& ch = W.chambers[c];
    chambers.push_back({{"id", c},
                        {"vertex", G.vertex_names[ch.gamma_vertex]},
                        {"depth", ch.depth},
                        {"centre", G.vertex_spaces[ch.gamma_vertex]->vertex_ids[ch.ball->base_vertex]},
                        {"window_vertices", ch.ball->size()},
                        {"parent_strip", ch.parent_strip == kNone ? json(nullptr) : json(ch.parent_strip)},
                        {"strips", ch.strips},
                        {"truncated", ch.truncated}});
  }
  for (std::size_t s = 0; s < W.strips.size(); ++s) {
    const Strip& st = W.strips[s];
    std::size_t matched = 0;
    for (Vid x : st.far_of) matched += x != kNone;
    strips.push_back({{"id", s},
                      {"edge", G.edges[st.gamma_edge].name},
                      {"near_side", st.near_side == 0 ? "minus" : "plus"},
                      {"near_chamber", st.near_chamber},
                      {"far_chamber", st.far_chamber},
                      {"near_vertices", st.near.vertices().size()},
                      {"far_vertices", st.far.vertices().size()},
                      {"matched_pairs", matched}});
  }
  return {{"base_vertex", G.vertex_names[W.base_vertex]}, {"depth", W.depth}, {"radius", W.radius},
          {"coset_cap", W.coset_cap}, {"truncated", W.truncated()}, {"chambers", chambers}, {"strips", strips}};
}

inline json stabilizer_json(const Ball& B, const StabilizerApprox& st) {
  json elements = json::array();
  for (std::size_t i = 0; i < st.elements.size(); ++i) {
    json e{{"word", deck_word(B, st.anchor, st.elements[i])}};
    if (i < st.exponents.size() && st.verdict == CyclicVerdict::cyclic) e["exponent"] = st.exponents[i];
    elements.push_back(e);
  }
  json j{{"verdict", verdict_name(st.verdict)},
         {"gate", ids_json(*B.complex, st.gate.members)},
         {"anchor", B.complex->vertex_ids[st.anchor]},
         {"elements", elements},
         {"two_ended", st.two_ended},
         {"complete", st.complete},
         {"quotient",
          {{"vertices", st.quotient.complex.vertex_count()},
           {"edges", st.quotient.complex.edge_count()},
           {"squares", st.quotient.complex.squares.size()},
           {"diam", st.quotient_diam}}}};
  if (st.primitive) j["primitive"] = deck_word(B, st.anchor, *st.primitive);
  if (st.independent)
    j["independent"] = {deck_word(B, st.anchor, st.elements[st.independent->first]),
                        deck_word(B, st.anchor, st.elements[st.independent->second])};
  return j;
}

inline json path_stabilizer_json(const TreeWindow& W, const PathStabilizerApprox& ps) {
  const Ball& B = *W.chambers[ps.gate.chamber].ball;
  json j = stabilizer_json(B, ps.stab);
  j["path"] = ps.path.strips;
  j["touches_boundary"] = ps.gate.touches_boundary;
  j["complete_transport"] = ps.gate.complete_transport;
  j["cross_check"] = ps.gate.cross_check ? json(*ps.gate.cross_check) : json(nullptr);
  return j;
}

inline json cyclonormal_json(const GraphOfComplexes& G, const CyclonormalReport& r) {
  json triples = json::array();
  for (const TripleRecord& t : r.triples) {
    json j{{"root", G.vertex_names[t.root_vertex]},
           {"condition", t.condition},
           {"items", t.items},
           {"strips", {t.item_strips[0], t.item_strips[1], t.item_strips[2]}},
           {"verdict", verdict_name(t.verdict)},
           {"gate_size", t.gate_size},
           {"complete", t.complete}};
    if (t.verdict != CyclicVerdict::higher) j["quotient_diam"] = t.quotient_diam;
    if (!t.witness_words.empty()) j["generators"] = t.witness_words;
    triples.push_back(j);
  }
  json j{{"mode", r.mode()},
         {"depth", r.depth},
         {"radius", r.radius},
         {"coset_cap", r.coset_cap},
         {"pass", r.pass},
         {"undecided_dominated", r.undecided_dominated},
         {"truncated", r.truncated},
         {"counts",
          {{"trivial", r.counts[0]}, {"cyclic", r.counts[1]}, {"higher", r.counts[2]}, {"undecided", r.counts[3]}}},
         {"triples", triples}};
  if (r.witness) {
    const TripleRecord& t = r.triples[*r.witness];
    j["witness"] = {{"triple", *r.witness}, {"root", G.vertex_names[t.root_vertex]}, {"generators", t.witness_words}};
  }
  return j;
}

inline json budget_value_json(const BudgetValue& v) {
  json j{{"status", status_name(v.status)}};
  if (v.value) j["value"] = *v.value;
  if (!v.expression.empty()) j["expression"] = v.expression;
  return j;
}

inline json stature_json(const GraphOfComplexes& G, const StatureReport& r) {
  json classes = json::array();
  for (const StatureClass& c : r.classes)
    classes.push_back({{"canonical", c.canonical},
                       {"first_length", c.first_length},
                       {"witness_path", c.witness_strips},
                       {"verdict", verdict_name(c.verdict)},
                       {"quotient",
                        {{"vertices", c.quotient_vertices},
                         {"edges", c.quotient_edges},
                         {"squares", c.quotient_squares},
                         {"diam", c.quotient_diam}}}});
  const StatureBudget& b = r.budget;
  json budget{{"S", budget_value_json(b.S)}, {"Q", budget_value_json(b.Q)}, {"m", budget_value_json(b.m)},
              {"L", budget_value_json(b.L)}, {"M", budget_value_json(b.M)}, {"B", budget_value_json(b.B)},
              {"R", budget_value_json(b.R)}, {"T", budget_value_json(b.T)}, {"P", budget_value_json(b.P)},
              {"h", budget_value_json(b.h)}, {"quasiline_classes", b.quasiline_classes}, {"notes", b.notes}};
  json j{{"base_vertex", G.vertex_names[r.base_vertex]},
         {"max_length", r.max_length},
         {"radius", r.radius},
         {"coset_cap", r.coset_cap},
         {"plateau", r.plateau},
         {"tallies", r.tallies},
         {"path_counts", r.path_counts},
         {"infinite_counts", r.infinite_counts},
         {"undecided_counts", r.undecided_counts},
         {"classes", classes},
         {"stabilization", r.stabilization},
         {"stabilization_length", r.stabilization_length ? json(*r.stabilization_length) : json(nullptr)}};
  if (r.max_length > 0) j["budget"] = budget;
  return j;
}

// Per-path search records and the quasiline constants feeding the budget.
inline json stature_trace_json(const GraphOfComplexes& G, const StatureReport& r) {
  json paths = json::array();
  for (const StaturePathRecord& p : r.paths)
    paths.push_back({{"length", p.length},
                     {"strips", p.strips},
                     {"verdict", verdict_name(p.verdict)},
                     {"gate_size", p.gate_size},
                     {"class", p.class_index ? json(*p.class_index) : json(nullptr)},
                     {"touches_boundary", p.touches_boundary}});
  json quasilines = json::array();
  for (const auto& [v, K, L] : r.budget.quasilines) {
    json q = constants_json(K);
    q["root"] = G.vertex_names[v];
    q["essential_dual_edges"] = L;
    quasilines.push_back(q);
  }
  return {{"paths", paths}, {"quasilines", quasilines}};
}

}  // namespace mf::io
