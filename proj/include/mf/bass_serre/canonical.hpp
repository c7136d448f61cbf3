#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "mf/cubecore/complex.hpp"

namespace mf {

// Cube complex with a label on every cell, typically the cell it maps to in a base
// complex. Two labelled complexes get the same canonical form iff they are isomorphic
// by a label- and orientation-preserving isomorphism.
struct LabelledComplex {
  CubeComplex complex;
  std::vector<std::uint32_t> vertex_label, edge_label, square_label, cube_label;
};

inline constexpr std::size_t kCanonicalLeafBudget = 200'000;

namespace detail {

// Incidence graph: one node per cell, arcs from a cell to its boundary cells tagged by
// the slot they occupy.
struct IncidenceGraph {
  std::vector<std::uint64_t> base_color;
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> out;  // (tag, node)
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> in;
};

inline IncidenceGraph incidence_graph(const LabelledComplex& L) {
  const CubeComplex& X = L.complex;
  const std::uint32_t nv = static_cast<std::uint32_t>(X.vertex_count());
  const std::uint32_t ne = static_cast<std::uint32_t>(X.edge_count());
  const std::uint32_t ns = static_cast<std::uint32_t>(X.squares.size());
  IncidenceGraph g;
  const std::size_t n = X.cell_count();
  g.base_color.resize(n);
  g.out.resize(n);
  g.in.resize(n);
  auto tag = [](std::uint64_t dim, std::uint64_t label) { return (dim << 40) | label; };
  for (std::uint32_t v = 0; v < nv; ++v) g.base_color[v] = tag(0, L.vertex_label[v]);
  auto arc = [&](std::uint32_t from, std::uint32_t t, std::uint32_t to) {
    g.out[from].push_back({t, to});
    g.in[to].push_back({t, from});
  };
  for (std::uint32_t e = 0; e < ne; ++e) {
    g.base_color[nv + e] = tag(1, L.edge_label[e]);
    arc(nv + e, 0, X.edges[e].tail);
    arc(nv + e, 1, X.edges[e].head);
  }
  auto cells = [&](const std::vector<Cube>& qs, const std::vector<std::uint32_t>& labels, std::uint32_t offset,
                   std::uint64_t dim) {
    for (std::uint32_t s = 0; s < qs.size(); ++s) {
      g.base_color[offset + s] = tag(dim, labels[s]);
      for (int k = 0; k < qs[s].edge_count(); ++k)
        arc(offset + s, 2 + 2 * k + (qs[s].edges[k].reversed ? 1 : 0), nv + qs[s].edges[k].edge);
    }
  };
  cells(X.squares, L.square_label, nv + ne, 2);
  cells(X.cubes3, L.cube_label, nv + ne + ns, 3);
  return g;
}

// Re-ranks colours by (colour, multiset of tagged neighbour colours) until stable.
inline std::vector<std::uint32_t> refine(const IncidenceGraph& g, std::vector<std::uint64_t> colour) {
  const std::size_t n = colour.size();
  std::vector<std::uint64_t> values = colour;
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end()), values.end());
  for (auto& c : colour) c = static_cast<std::uint64_t>(std::lower_bound(values.begin(), values.end(), c) - values.begin());
  std::vector<std::uint32_t> rank(n);
  std::size_t classes = values.size();
  for (;;) {
    std::vector<std::pair<std::vector<std::uint64_t>, std::uint32_t>> sig(n);
    for (std::uint32_t v = 0; v < n; ++v) {
      auto& s = sig[v].first;
      s.push_back(colour[v]);
      std::vector<std::uint64_t> nb;
      for (auto [t, w] : g.out[v]) nb.push_back((static_cast<std::uint64_t>(t) << 33) | colour[w]);
      for (auto [t, w] : g.in[v]) nb.push_back((static_cast<std::uint64_t>(t) << 33) | (1ull << 32) | colour[w]);
      std::sort(nb.begin(), nb.end());
      s.insert(s.end(), nb.begin(), nb.end());
      sig[v].second = v;
    }
    std::sort(sig.begin(), sig.end());
    std::size_t count = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && sig[i].first != sig[i - 1].first) ++count;
      rank[sig[i].second] = static_cast<std::uint32_t>(count);
    }
    const std::size_t now = n == 0 ? 0 : count + 1;
    for (std::uint32_t v = 0; v < n; ++v) colour[v] = rank[v];
    if (now == classes) break;
    classes = now;
  }
  return rank;
}

inline std::vector<std::uint64_t> certificate(const IncidenceGraph& g, const std::vector<std::uint32_t>& rank) {
  const std::size_t n = rank.size();
  std::vector<std::uint32_t> order(n);
  for (std::uint32_t v = 0; v < n; ++v) order[rank[v]] = v;
  std::vector<std::uint64_t> cert;
  for (std::uint32_t r = 0; r < n; ++r) {
    std::uint32_t v = order[r];
    cert.push_back(g.base_color[v]);
    std::vector<std::uint64_t> arcs;
    for (auto [t, w] : g.out[v]) arcs.push_back((static_cast<std::uint64_t>(t) << 32) | rank[w]);
    std::sort(arcs.begin(), arcs.end());
    cert.push_back(arcs.size());
    cert.insert(cert.end(), arcs.begin(), arcs.end());
  }
  return cert;
}

}  // namespace detail

// Colour refinement with individualization, keeping the least certificate over all
// branches. Exact; exponential only for highly symmetric inputs, which the leaf budget
// turns into a BudgetError.
inline std::string canonical_form(const LabelledComplex& L, std::size_t leaf_budget = kCanonicalLeafBudget) {
  const CubeComplex& X = L.complex;
  if (L.vertex_label.size() != X.vertex_count() || L.edge_label.size() != X.edge_count() ||
      L.square_label.size() != X.squares.size() || L.cube_label.size() != X.cubes3.size())
    throw PreconditionError("labelled complex needs one label per cell");
  detail::IncidenceGraph g = detail::incidence_graph(L);
  std::vector<std::uint64_t> best;
  bool have = false;
  std::size_t leaves = 0;
  auto search = [&](auto&& self, const std::vector<std::uint32_t>& rank) -> void {
    const std::size_t n = rank.size();
    std::vector<std::uint32_t> size(n, 0);
    for (auto r : rank) ++size[r];
    std::uint32_t target = kNone;
    for (std::uint32_t r = 0; r < n; ++r)
      if (size[r] > 1) {
        target = r;
        break;
      }
    if (target == kNone) {
      if (++leaves > leaf_budget) throw BudgetError("canonical labelling exceeded its leaf budget");
      auto cert = detail::certificate(g, rank);
      if (!have || cert < best) {
        best = std::move(cert);
        have = true;
      }
      return;
    }
    for (std::uint32_t v = 0; v < n; ++v) {
      if (rank[v] != target) continue;
      std::vector<std::uint64_t> colour(n);
      for (std::uint32_t w = 0; w < n; ++w) colour[w] = 2ull * rank[w] + (w == v ? 0 : 1);
      self(self, detail::refine(g, colour));
    }
  };
  search(search, detail::refine(g, g.base_color));
  std::ostringstream os;
  os << X.vertex_count() << '/' << X.edge_count() << '/' << X.squares.size() << '/' << X.cubes3.size() << ':';
  os << std::hex;
  for (std::size_t i = 0; i < best.size(); ++i) os << (i ? "," : "") << best[i];
  return os.str();
}

}  // namespace mf
