#pragma once

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "mf/cubecore/complex.hpp"

namespace mf {

struct LinkIssue {
  Vid vertex = kNone;
  std::string kind;  // loop, bigon, empty_triangle, duplicate_triangle, k4_above_dim_cap
  std::vector<EdgeEnd> ends;
  std::vector<Cid> cells;
};

struct NpcReport {
  bool ok = true;
  std::vector<LinkIssue> issues;
};

// The link of a vertex as a simplicial graph on edge ends, with the cells that
// contribute each link edge and triangle.
struct VertexLink {
  std::vector<EdgeEnd> nodes;
  std::map<std::pair<std::uint32_t, std::uint32_t>, std::vector<std::pair<Cid, int>>> edges;  // (square, corner)
  std::map<std::array<std::uint32_t, 3>, std::vector<std::pair<Cid, int>>> triangles;       // (3-cube, corner)
  std::vector<std::pair<Cid, int>> degenerate;  // square corners whose two sides are one edge end

  bool adjacent(EdgeEnd a, EdgeEnd b) const {
    auto k = ordered_pair(a.key(), b.key());
    return edges.count({k.first, k.second}) > 0;
  }
};

inline std::vector<VertexLink> compute_links(const CubeComplex& X) {
  std::vector<VertexLink> links(X.vertex_count());
  for (Vid v = 0; v < X.vertex_count(); ++v) links[v].nodes = X.ends_at(v);
  for (Cid s = 0; s < X.squares.size(); ++s) {
    const Cube& q = X.squares[s];
    for (int c = 0; c < 4; ++c) {
      EdgeEnd a = cube_edge_end(q, c, 0), b = cube_edge_end(q, c, 1);
      VertexLink& L = links[q.corners[c]];
      if (a == b) {
        L.degenerate.emplace_back(s, c);
        continue;
      }
      auto k = ordered_pair(a.key(), b.key());
      L.edges[{k.first, k.second}].emplace_back(s, c);
    }
  }
  for (Cid s = 0; s < X.cubes3.size(); ++s) {
    const Cube& q = X.cubes3[s];
    for (int c = 0; c < 8; ++c) {
      std::array<std::uint32_t, 3> t{cube_edge_end(q, c, 0).key(), cube_edge_end(q, c, 1).key(),
                                     cube_edge_end(q, c, 2).key()};
      std::sort(t.begin(), t.end());
      links[q.corners[c]].triangles[t].emplace_back(s, c);
    }
  }
  return links;
}

inline EdgeEnd end_from_key(std::uint32_t k) { return {k / 2, static_cast<std::uint8_t>(k % 2)}; }

// Links must be simplicial (no loops, no doubled edges or triangles) and flag
// (every triangle filled; no 4-clique since cells stop at dimension 3).
inline NpcReport validate_npc(CubeComplex& X) {
  NpcReport rep;
  auto links = compute_links(X);
  for (Vid v = 0; v < X.vertex_count(); ++v) {
    const VertexLink& L = links[v];
    for (auto [s, c] : L.degenerate) rep.issues.push_back({v, "loop", {cube_edge_end(X.squares[s], c, 0)}, {s}});
    std::map<std::uint32_t, std::set<std::uint32_t>> adj;
    for (const auto& [k, cells] : L.edges) {
      if (cells.size() > 1) {
        LinkIssue is{v, "bigon", {end_from_key(k.first), end_from_key(k.second)}, {}};
        for (auto [s, c] : cells) is.cells.push_back(s);
        rep.issues.push_back(std::move(is));
      }
      adj[k.first].insert(k.second);
      adj[k.second].insert(k.first);
    }
    for (const auto& [t, cells] : L.triangles) {
      if (t[0] == t[1] || t[1] == t[2]) {
        rep.issues.push_back({v, "loop", {end_from_key(t[0])}, {cells.front().first}});
      } else if (cells.size() > 1) {
        LinkIssue is{v, "duplicate_triangle", {end_from_key(t[0]), end_from_key(t[1]), end_from_key(t[2])}, {}};
        for (auto [s, c] : cells) is.cells.push_back(s);
        rep.issues.push_back(std::move(is));
      }
    }
    for (const auto& [a, na] : adj) {
      for (std::uint32_t b : na) {
        if (b <= a) continue;
        for (std::uint32_t c : adj[b]) {
          if (c <= b || !na.count(c)) continue;
          if (!L.triangles.count({a, b, c}))
            rep.issues.push_back({v, "empty_triangle", {end_from_key(a), end_from_key(b), end_from_key(c)}, {}});
          for (std::uint32_t d : adj[c]) {
            if (d <= c || !na.count(d) || !adj[b].count(d)) continue;
            rep.issues.push_back({v,
                                  "k4_above_dim_cap",
                                  {end_from_key(a), end_from_key(b), end_from_key(c), end_from_key(d)},
                                  {}});
          }
        }
      }
    }
  }
  rep.ok = rep.issues.empty();
  if (rep.ok && X.validation == Validation::raw) X.validation = Validation::npc_checked;
  return rep;
}

}  // namespace mf
