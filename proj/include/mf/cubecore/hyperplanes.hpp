#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <numeric>
#include <optional>
#include <set>
#include <vector>

#include "mf/cubecore/complex.hpp"

namespace mf {

// Union-find that also tracks the parity of each element relative to its root.
class ParityDsu {
 public:
  explicit ParityDsu(std::size_t n) : parent_(n), parity_(n, 0) { std::iota(parent_.begin(), parent_.end(), 0u); }

  std::pair<std::uint32_t, std::uint8_t> find(std::uint32_t x) {
    std::uint8_t p = 0;
    std::uint32_t r = x;
    while (parent_[r] != r) {
      p ^= parity_[r];
      r = parent_[r];
    }
    // path compression with parity bookkeeping
    std::uint8_t acc = p;
    while (parent_[x] != r) {
      std::uint32_t next = parent_[x];
      std::uint8_t px = parity_[x];
      parent_[x] = r;
      parity_[x] = acc;
      acc ^= px;
      x = next;
    }
    return {r, p};
  }

  // Returns false when the relation contradicts what is already known.
  bool unite(std::uint32_t a, std::uint32_t b, std::uint8_t rel) {
    auto [ra, pa] = find(a);
    auto [rb, pb] = find(b);
    if (ra == rb) return (pa ^ pb) == rel;
    parent_[rb] = ra;
    parity_[rb] = pa ^ pb ^ rel;
    return true;
  }

 private:
  std::vector<std::uint32_t> parent_;
  std::vector<std::uint8_t> parity_;
};

struct HyperplaneData {
  std::vector<std::uint32_t> of_edge;            // hyperplane of each edge
  std::vector<std::vector<Eid>> dual_edges;      // ids ordered by least dual edge
  std::vector<std::uint8_t> edge_parity;         // edge direction relative to its hyperplane
  std::vector<bool> two_sided;
  std::vector<std::optional<Cid>> one_sided_witness;
  std::vector<std::optional<Cid>> self_crossing_witness;
  std::set<std::pair<std::uint32_t, std::uint32_t>> crossings;  // unordered pairs (a < b)

  std::size_t count() const { return dual_edges.size(); }
  bool cross(std::uint32_t a, std::uint32_t b) const {
    if (a == b) return false;
    return crossings.count(ordered_pair(a, b)) > 0;
  }

  // Direction in which leaving a vertex through this edge end crosses the hyperplane.
  std::uint8_t crossing_direction(EdgeEnd x) const {
    return static_cast<std::uint8_t>(edge_parity[x.edge] ^ x.end);
  }
};

inline HyperplaneData compute_hyperplanes(const CubeComplex& X) {
  const std::size_t m = X.edge_count();
  ParityDsu dsu(m);
  std::vector<std::optional<Cid>> conflict(m);
  for (Cid s = 0; s < X.squares.size(); ++s) {
    const Cube& q = X.squares[s];
    for (int axis = 0; axis < 2; ++axis) {
      const EdgeRef& a = q.edges[axis * 2];
      const EdgeRef& b = q.edges[axis * 2 + 1];
      std::uint8_t rel = static_cast<std::uint8_t>(a.reversed != b.reversed);
      if (!dsu.unite(a.edge, b.edge, rel)) conflict[a.edge] = s;
    }
  }
  HyperplaneData H;
  H.of_edge.assign(m, kNone);
  H.edge_parity.assign(m, 0);
  std::vector<std::uint32_t> root_id(m, kNone);
  for (Eid e = 0; e < m; ++e) {
    auto [r, p] = dsu.find(e);
    if (root_id[r] == kNone) {
      root_id[r] = static_cast<std::uint32_t>(H.dual_edges.size());
      H.dual_edges.emplace_back();
    }
    H.of_edge[e] = root_id[r];
    H.edge_parity[e] = p;
    H.dual_edges[root_id[r]].push_back(e);
  }
  const std::size_t n = H.dual_edges.size();
  H.two_sided.assign(n, true);
  H.one_sided_witness.assign(n, std::nullopt);
  H.self_crossing_witness.assign(n, std::nullopt);
  for (Eid e = 0; e < m; ++e) {
    if (conflict[e]) {
      std::uint32_t h = H.of_edge[e];
      H.two_sided[h] = false;
      if (!H.one_sided_witness[h]) H.one_sided_witness[h] = conflict[e];
    }
  }
  for (Cid s = 0; s < X.squares.size(); ++s) {
    std::uint32_t a = H.of_edge[X.squares[s].edges[0].edge];
    std::uint32_t b = H.of_edge[X.squares[s].edges[2].edge];
    if (a == b) {
      if (!H.self_crossing_witness[a]) H.self_crossing_witness[a] = s;
    } else {
      H.crossings.insert(ordered_pair(a, b));
    }
  }
  return H;
}

// Vertices of the carrier N(H): endpoints of dual edges (every cube meeting H has all
// of its corners on dual edges).
inline std::vector<Vid> carrier_vertices(const CubeComplex& X, const HyperplaneData& H, std::uint32_t h) {
  std::vector<Vid> out;
  for (Eid e : H.dual_edges[h]) {
    out.push_back(X.edges[e].tail);
    out.push_back(X.edges[e].head);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

// Diameter of the dual-edge graph of H: dual edges are adjacent when they are
// opposite sides of a common square. `keep` filters the dual edges considered.
// Returns nullopt when the filtered graph is disconnected.
inline std::optional<int> hyperplane_diameter(const CubeComplex& X, const HyperplaneData& H, std::uint32_t h,
                                              const std::function<bool(Eid)>& keep = {}) {
  std::vector<Eid> dual;
  for (Eid e : H.dual_edges[h])
    if (!keep || keep(e)) dual.push_back(e);
  if (dual.empty()) return 0;
  std::unordered_map<Eid, std::uint32_t> idx;
  for (std::uint32_t i = 0; i < dual.size(); ++i) idx.emplace(dual[i], i);
  std::vector<std::vector<std::uint32_t>> adj(dual.size());
  for (std::uint32_t i = 0; i < dual.size(); ++i) {
    for (auto [s, slot] : X.squares_on(dual[i])) {
      Eid other = X.squares[s].edges[slot ^ 1].edge;
      auto it = idx.find(other);
      if (it != idx.end() && it->second != i) adj[i].push_back(it->second);
    }
  }
  int best = 0;
  std::vector<int> dist(dual.size());
  for (std::uint32_t src = 0; src < dual.size(); ++src) {
    std::fill(dist.begin(), dist.end(), -1);
    std::deque<std::uint32_t> q{src};
    dist[src] = 0;
    std::size_t seen = 1;
    while (!q.empty()) {
      auto u = q.front();
      q.pop_front();
      for (auto w : adj[u])
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          best = std::max(best, dist[w]);
          ++seen;
          q.push_back(w);
        }
    }
    if (seen != dual.size()) return std::nullopt;
  }
  return best;
}

}  // namespace mf
