#pragma once

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/container_hash/hash.hpp>

#include "mf/cubecore/complex.hpp"
#include "mf/cubecore/hyperplanes.hpp"
#include "mf/cubecore/npc.hpp"

namespace mf {

// Sorted ids of the hyperplanes separating a vertex from vertex 0.
using Sig = std::vector<std::uint32_t>;

struct SigHash {
  std::size_t operator()(const Sig& s) const { return boost::hash_range(s.begin(), s.end()); }
};

inline int sym_diff_size(const Sig& a, const Sig& b) {
  int n = 0;
  auto i = a.begin(), j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i == *j) {
      ++i;
      ++j;
    } else if (*i < *j) {
      ++n;
      ++i;
    } else {
      ++n;
      ++j;
    }
  }
  return n + static_cast<int>((a.end() - i) + (b.end() - j));
}

struct Geodesic {
  std::vector<Vid> vertices;
  std::vector<std::uint32_t> crossed;  // hyperplane crossed by each step
  int length() const { return static_cast<int>(crossed.size()); }
};

struct Cat0Witness {
  std::string kind;
  std::vector<Vid> vertices;
  std::vector<Eid> edges;
  std::vector<Cid> cells;
  std::string detail;
};

class MedianSpace;

struct Cat0Result {
  bool ok = false;
  std::optional<Cat0Witness> witness;
  std::shared_ptr<MedianSpace> space;
};

// Metric and median structure of a CAT(0) cube complex, computed from halfspace
// signatures. Holds a pointer to the complex, which must outlive it.
class MedianSpace {
 public:
  // Which hyperplanes every member of a set lies beyond (all) and some member lies beyond (any).
  struct Profile {
    Sig all;
    Sig any;
  };

  const CubeComplex& complex() const { return *X_; }
  const HyperplaneData& hyperplanes() const { return H_; }
  std::size_t size() const { return sig_.size(); }
  const Sig& signature(Vid v) const { return sig_[v]; }

  bool side(Vid v, std::uint32_t h) const { return std::binary_search(sig_[v].begin(), sig_[v].end(), h); }

  int distance(Vid p, Vid q) const {
    check(p);
    check(q);
    return sym_diff_size(sig_[p], sig_[q]);
  }

  std::optional<Vid> vertex_of(const Sig& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  Vid median(Vid p, Vid q, Vid r) const {
    check(p);
    check(q);
    check(r);
    Sig pq, pr, qr, m1, m;
    std::set_intersection(sig_[p].begin(), sig_[p].end(), sig_[q].begin(), sig_[q].end(), std::back_inserter(pq));
    std::set_intersection(sig_[p].begin(), sig_[p].end(), sig_[r].begin(), sig_[r].end(), std::back_inserter(pr));
    std::set_intersection(sig_[q].begin(), sig_[q].end(), sig_[r].begin(), sig_[r].end(), std::back_inserter(qr));
    std::set_union(pq.begin(), pq.end(), pr.begin(), pr.end(), std::back_inserter(m1));
    std::set_union(m1.begin(), m1.end(), qr.begin(), qr.end(), std::back_inserter(m));
    auto v = vertex_of(m);
    if (!v) throw InconsistencyError("median signature has no vertex");
    return *v;
  }

  Profile profile(const std::vector<Vid>& S) const {
    if (S.empty()) throw PreconditionError("empty vertex set");
    Profile pr{sig_[S.front()], sig_[S.front()]};
    for (std::size_t i = 1; i < S.size(); ++i) {
      check(S[i]);
      Sig a, o;
      std::set_intersection(pr.all.begin(), pr.all.end(), sig_[S[i]].begin(), sig_[S[i]].end(),
                            std::back_inserter(a));
      std::set_union(pr.any.begin(), pr.any.end(), sig_[S[i]].begin(), sig_[S[i]].end(), std::back_inserter(o));
      pr.all.swap(a);
      pr.any.swap(o);
    }
    return pr;
  }

  // Hyperplanes with members of the set on both sides.
  static Sig crossing(const Profile& pr) {
    Sig out;
    std::set_difference(pr.any.begin(), pr.any.end(), pr.all.begin(), pr.all.end(), std::back_inserter(out));
    return out;
  }

  bool in_hull(const Profile& pr, Vid v) const {
    const Sig& s = sig_[v];
    return std::includes(s.begin(), s.end(), pr.all.begin(), pr.all.end()) &&
           std::includes(pr.any.begin(), pr.any.end(), s.begin(), s.end());
  }

  // Intersection of all halfspaces containing S.
  std::vector<Vid> hull(const std::vector<Vid>& S) const {
    Profile pr = profile(S);
    std::vector<Vid> out;
    for (Vid v = 0; v < sig_.size(); ++v)
      if (in_hull(pr, v)) out.push_back(v);
    return out;
  }

  bool is_convex(const std::vector<Vid>& S) const {
    if (S.empty()) return true;
    std::vector<Vid> s = S;
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    Profile pr = profile(s);
    std::size_t count = 0;
    for (Vid v = 0; v < sig_.size(); ++v)
      if (in_hull(pr, v)) ++count;
    return count == s.size();
  }

  std::vector<Vid> neighbors(Vid v) const {
    std::vector<Vid> out;
    for (EdgeEnd x : X_->ends_at(v)) out.push_back(X_->far_vertex(x));
    return out;
  }

  // Greedy walk: always step to the least-id neighbour closer to q.
  Geodesic geodesic(Vid p, Vid q) const {
    Geodesic g{{p}, {}};
    Vid cur = p;
    int d = distance(p, q);
    while (cur != q) {
      EdgeEnd best{};
      Vid next = kNone;
      for (EdgeEnd x : X_->ends_at(cur)) {
        Vid w = X_->far_vertex(x);
        if (distance(w, q) == d - 1 && (next == kNone || w < next)) {
          next = w;
          best = x;
        }
      }
      if (next == kNone) throw InconsistencyError("no geodesic step available");
      g.crossed.push_back(H_.of_edge[best.edge]);
      g.vertices.push_back(next);
      cur = next;
      --d;
    }
    return g;
  }

  // Vertices on the far (beyond = true) or near side of hyperplane h relative to vertex 0.
  std::vector<Vid> halfspace(std::uint32_t h, bool beyond) const {
    std::vector<Vid> out;
    for (Vid v = 0; v < sig_.size(); ++v)
      if (side(v, h) == beyond) out.push_back(v);
    return out;
  }

  int diameter(const std::vector<Vid>& S) const {
    int best = 0;
    for (std::size_t i = 0; i < S.size(); ++i)
      for (std::size_t j = i + 1; j < S.size(); ++j) best = std::max(best, distance(S[i], S[j]));
    return best;
  }

 private:
  friend Cat0Result analyze_cat0(CubeComplex& X);

  void check(Vid v) const {
    if (v >= sig_.size()) throw PreconditionError("vertex " + std::to_string(v) + " not in complex");
  }

  const CubeComplex* X_ = nullptr;
  HyperplaneData H_;
  std::vector<Sig> sig_;
  std::unordered_map<Sig, Vid, SigHash> index_;
};

namespace detail {

inline constexpr std::size_t kDenseCat0Limit = 4000;
inline constexpr std::size_t kTripleCheckLimit = 300;
inline constexpr std::size_t kPairCheckLimit = 1500;

inline Cat0Result fail(std::string kind, std::vector<Vid> vs = {}, std::vector<Eid> es = {}, std::vector<Cid> cs = {},
                       std::string detail = {}) {
  Cat0Result r;
  r.ok = false;
  r.witness = Cat0Witness{std::move(kind), std::move(vs), std::move(es), std::move(cs), std::move(detail)};
  return r;
}

inline std::vector<std::vector<Vid>> simple_adjacency(const CubeComplex& X) {
  std::vector<std::vector<Vid>> adj(X.vertex_count());
  for (const Edge& e : X.edges) {
    adj[e.tail].push_back(e.head);
    adj[e.head].push_back(e.tail);
  }
  for (auto& a : adj) std::sort(a.begin(), a.end());
  return adj;
}

// A 4-cycle is determined by its two diagonals.
inline std::array<Vid, 4> diagonal_key(Vid a, Vid b, Vid c, Vid d) {
  std::pair<Vid, Vid> d1{std::min(a, b), std::max(a, b)}, d2{std::min(c, d), std::max(c, d)};
  if (d2 < d1) std::swap(d1, d2);
  return {d1.first, d1.second, d2.first, d2.second};
}

}  // namespace detail

// CAT(0) test through the median-graph characterisation: a connected NPC complex is
// CAT(0) iff its 1-skeleton is median with every 4-cycle filled. Median graphs are
// checked as bipartite graphs with the quadrangle condition and no induced K_{2,3};
// halfspaces then come from the Djokovic relation and are verified edge by edge.
inline Cat0Result analyze_cat0(CubeComplex& X) {
  using detail::fail;
  const std::size_t n = X.vertex_count();
  if (n == 0) return fail("empty");

  std::map<std::vector<std::uint64_t>, Cid> keys;
  for (Cid s = 0; s < X.squares.size(); ++s) {
    auto k = cube_key(normalize_cube(X.squares[s]));
    auto [it, fresh] = keys.emplace(k, s);
    if (!fresh) return fail("duplicated_cell", {}, {}, {it->second, s}, "two squares share their whole boundary");
  }
  if (X.validation == Validation::raw) {
    NpcReport npc = validate_npc(X);
    if (!npc.ok) {
      const LinkIssue& is = npc.issues.front();
      return fail("npc:" + is.kind, {is.vertex}, {}, is.cells, "vertex link is not a flag simplicial complex");
    }
  }
  for (Eid e = 0; e < X.edge_count(); ++e)
    if (X.edges[e].tail == X.edges[e].head)
      return fail("loop_edge", {X.edges[e].tail}, {e}, {}, "the hyperplane dual to a loop cannot separate");
  auto adj = detail::simple_adjacency(X);
  for (Vid v = 0; v < n; ++v)
    for (std::size_t i = 1; i < adj[v].size(); ++i)
      if (adj[v][i] == adj[v][i - 1]) return fail("multi_edge", {v, adj[v][i]});

  std::vector<int> d0(n, -1);
  std::vector<Eid> parent_edge(n, kNone);
  std::deque<Vid> q{0};
  d0[0] = 0;
  std::vector<Vid> order;
  while (!q.empty()) {
    Vid u = q.front();
    q.pop_front();
    order.push_back(u);
    for (EdgeEnd x : X.ends_at(u)) {
      Vid w = X.far_vertex(x);
      if (d0[w] < 0) {
        d0[w] = d0[u] + 1;
        parent_edge[w] = x.edge;
        q.push_back(w);
      }
    }
  }
  for (Vid v = 0; v < n; ++v)
    if (d0[v] < 0) return fail("disconnected", {0, v});

  auto space = std::make_shared<MedianSpace>();
  space->X_ = &X;
  space->H_ = compute_hyperplanes(X);
  space->sig_.assign(n, {});
  const bool tree = X.squares.empty() && X.cubes3.empty() && X.edge_count() + 1 == n;

  if (tree) {
    for (Vid u : order) {
      if (u == 0) continue;
      const Edge& e = X.edges[parent_edge[u]];
      Vid p = e.tail == u ? e.head : e.tail;
      Sig s = space->sig_[p];
      std::uint32_t h = space->H_.of_edge[parent_edge[u]];
      s.insert(std::upper_bound(s.begin(), s.end(), h), h);
      space->sig_[u] = std::move(s);
    }
  } else {
    if (n > detail::kDenseCat0Limit)
      throw BudgetError("CAT(0) verification of a non-tree complex with " + std::to_string(n) +
                        " vertices exceeds the dense limit");
    std::vector<std::uint16_t> D(n * n, 0xffff);
    for (Vid s = 0; s < n; ++s) {
      std::uint16_t* row = &D[static_cast<std::size_t>(s) * n];
      row[s] = 0;
      std::deque<Vid> bq{s};
      while (!bq.empty()) {
        Vid u = bq.front();
        bq.pop_front();
        for (Vid w : adj[u])
          if (row[w] == 0xffff) {
            row[w] = static_cast<std::uint16_t>(row[u] + 1);
            bq.push_back(w);
          }
      }
    }
    auto dist = [&](Vid a, Vid b) { return D[static_cast<std::size_t>(a) * n + b]; };
    for (const Edge& e : X.edges)
      if ((d0[e.tail] & 1) == (d0[e.head] & 1)) return fail("odd_cycle", {e.tail, e.head});

    std::map<std::array<Vid, 4>, std::vector<Cid>> filled;
    for (Cid s = 0; s < X.squares.size(); ++s) {
      const Cube& sq = X.squares[s];
      filled[detail::diagonal_key(sq.corners[0], sq.corners[3], sq.corners[1], sq.corners[2])].push_back(s);
    }
    std::vector<Vid> common;
    for (Vid u = 0; u < n; ++u) {
      for (Vid w = u + 1; w < n; ++w) {
        if (dist(u, w) != 2) continue;
        common.clear();
        std::set_intersection(adj[u].begin(), adj[u].end(), adj[w].begin(), adj[w].end(),
                              std::back_inserter(common));
        if (common.size() >= 3)
          return fail("median_not_unique", {common[0], common[1], common[2]}, {}, {},
                      "induced K_{2,3}: two medians for one triple");
        if (common.size() == 2) {
          auto it = filled.find(detail::diagonal_key(u, w, common[0], common[1]));
          if (it == filled.end()) return fail("unfilled_cube", {u, common[0], w, common[1]}, {}, {}, "empty 4-cycle");
          if (it->second.size() > 1) return fail("duplicated_cell", {}, {}, it->second);
        }
      }
    }
    for (Vid u = 0; u < n; ++u) {
      for (Vid z = 0; z < n; ++z) {
        const int dz = dist(u, z);
        if (dz < 2) continue;
        for (std::size_t i = 0; i < adj[z].size(); ++i) {
          Vid v = adj[z][i];
          if (dist(u, v) != dz - 1) continue;
          for (std::size_t j = i + 1; j < adj[z].size(); ++j) {
            Vid w = adj[z][j];
            if (dist(u, w) != dz - 1) continue;
            bool found = false;
            for (Vid x : adj[v])
              if (x != z && dist(u, x) == dz - 2 && std::binary_search(adj[w].begin(), adj[w].end(), x)) {
                found = true;
                break;
              }
            if (!found) return fail("median_failure", {u, v, w}, {}, {}, "triple without a median");
          }
        }
      }
    }
    for (std::uint32_t h = 0; h < space->H_.count(); ++h) {
      const Edge& e = X.edges[space->H_.dual_edges[h].front()];
      Vid a = e.tail, b = e.head;
      const bool zero_near_a = dist(0, a) < dist(0, b);
      for (Vid x = 0; x < n; ++x) {
        const bool near_a = dist(x, a) < dist(x, b);
        if (near_a != zero_near_a) space->sig_[x].push_back(h);
      }
    }
  }

  for (Eid e = 0; e < X.edge_count(); ++e) {
    const Sig& a = space->sig_[X.edges[e].tail];
    const Sig& b = space->sig_[X.edges[e].head];
    std::uint32_t h = space->H_.of_edge[e];
    const bool ok = sym_diff_size(a, b) == 1 &&
                    (std::binary_search(a.begin(), a.end(), h) != std::binary_search(b.begin(), b.end(), h));
    if (!ok) return fail("hyperplane_not_separating", {X.edges[e].tail, X.edges[e].head}, {e});
  }
  for (Vid v = 0; v < n; ++v) {
    auto [it, fresh] = space->index_.emplace(space->sig_[v], v);
    if (!fresh) return fail("signature_collision", {it->second, v});
  }
  if (!tree && n <= detail::kPairCheckLimit) {
    // distances must equal separating-hyperplane counts (isometric embedding in a cube)
    for (Vid s = 0; s < n; ++s) {
      std::vector<int> dd(n, -1);
      std::deque<Vid> bq{s};
      dd[s] = 0;
      while (!bq.empty()) {
        Vid u = bq.front();
        bq.pop_front();
        for (Vid w : adj[u])
          if (dd[w] < 0) {
            dd[w] = dd[u] + 1;
            bq.push_back(w);
          }
      }
      for (Vid t = s + 1; t < n; ++t)
        if (dd[t] != sym_diff_size(space->sig_[s], space->sig_[t])) return fail("not_isometric", {s, t});
    }
  }
  if (!tree && n <= detail::kTripleCheckLimit) {
    for (Vid p = 0; p < n; ++p)
      for (Vid qv = p + 1; qv < n; ++qv)
        for (Vid r = qv + 1; r < n; ++r) {
          Sig pq, pr, qr, m1, m;
          const Sig &a = space->sig_[p], &b = space->sig_[qv], &c = space->sig_[r];
          std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(pq));
          std::set_intersection(a.begin(), a.end(), c.begin(), c.end(), std::back_inserter(pr));
          std::set_intersection(b.begin(), b.end(), c.begin(), c.end(), std::back_inserter(qr));
          std::set_union(pq.begin(), pq.end(), pr.begin(), pr.end(), std::back_inserter(m1));
          std::set_union(m1.begin(), m1.end(), qr.begin(), qr.end(), std::back_inserter(m));
          if (!space->index_.count(m)) return fail("median_failure", {p, qv, r});
        }
  }
  X.validation = Validation::cat0_checked;
  Cat0Result res;
  res.ok = true;
  res.space = std::move(space);
  return res;
}

inline std::shared_ptr<MedianSpace> median_space(CubeComplex& X) {
  Cat0Result r = analyze_cat0(X);
  if (!r.ok) throw PreconditionError("complex '" + X.name + "' is not CAT(0): " + r.witness->kind);
  return r.space;
}

}  // namespace mf
