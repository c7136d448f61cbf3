#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mf/error.hpp"

namespace mf {

using Vid = std::uint32_t;
using Eid = std::uint32_t;
using Cid = std::uint32_t;
inline constexpr std::uint32_t kNone = 0xffffffffu;

// One end of an edge: end 0 is the tail, end 1 the head. A loop has two distinct
// ends sitting at the same vertex, which is what lets squares wrap around it.
struct EdgeEnd {
  Eid edge = kNone;
  std::uint8_t end = 0;

  std::uint32_t key() const { return edge * 2u + end; }
  friend auto operator<=>(const EdgeEnd&, const EdgeEnd&) = default;
};

// An edge traversed with (reversed = false) or against its stored orientation.
struct EdgeRef {
  Eid edge = kNone;
  bool reversed = false;

  friend auto operator<=>(const EdgeRef&, const EdgeRef&) = default;
};

// Unordered pair by value (std::minmax returns references, which dangle on temporaries).
inline std::pair<std::uint32_t, std::uint32_t> ordered_pair(std::uint32_t a, std::uint32_t b) {
  return a < b ? std::pair{a, b} : std::pair{b, a};
}

struct Edge {
  Vid tail = kNone;
  Vid head = kNone;
};

// A square (dim 2) or 3-cube (dim 3). Corners are indexed by bit patterns over the
// axes; for a square that is (v00, v10, v01, v11). Edge slots run along one axis from
// a corner whose bit for that axis is clear, grouped by axis. For a square the slots
// are bottom (v00-v10), top (v01-v11), left (v00-v01), right (v10-v11).
struct Cube {
  std::uint8_t dim = 2;
  std::array<Vid, 8> corners{};
  std::array<EdgeRef, 12> edges{};

  int corner_count() const { return 1 << dim; }
  int edge_count() const { return dim << (dim - 1); }
  friend bool operator==(const Cube&, const Cube&) = default;
};

inline int edge_slot(int dim, int axis, int lower_corner) {
  int rank = 0;
  for (int c = 0; c < lower_corner; ++c)
    if (!((c >> axis) & 1)) ++rank;
  return axis * (1 << (dim - 1)) + rank;
}

// Corner indices (start, end) of the side in the given slot.
inline std::pair<int, int> slot_corners(int dim, int slot) {
  const int per_axis = 1 << (dim - 1);
  const int axis = slot / per_axis;
  int rank = slot % per_axis;
  for (int c = 0; c < (1 << dim); ++c) {
    if ((c >> axis) & 1) continue;
    if (rank-- == 0) return {c, c | (1 << axis)};
  }
  return {-1, -1};
}

// The edge end of `q` sitting at `corner` along `axis`.
inline EdgeEnd cube_edge_end(const Cube& q, int corner, int axis) {
  const int lower = corner & ~(1 << axis);
  const EdgeRef& r = q.edges[edge_slot(q.dim, axis, lower)];
  const bool at_start = !((corner >> axis) & 1);
  return {r.edge, static_cast<std::uint8_t>(at_start != r.reversed ? 0 : 1)};
}

// Apply a symmetry of the cube: new axis i is old axis perm[i], then reflect by mask.
inline Cube transform_cube(const Cube& q, const std::array<int, 3>& perm, int mask) {
  Cube out;
  out.dim = q.dim;
  auto old_of = [&](int c) {
    int o = 0;
    for (int i = 0; i < q.dim; ++i)
      if ((c >> i) & 1) o |= 1 << perm[i];
    return o ^ mask;
  };
  for (int c = 0; c < q.corner_count(); ++c) out.corners[c] = q.corners[old_of(c)];
  for (int i = 0; i < q.dim; ++i) {
    for (int c = 0; c < q.corner_count(); ++c) {
      if ((c >> i) & 1) continue;
      const int o1 = old_of(c);
      const int a = perm[i];
      EdgeRef r = q.edges[edge_slot(q.dim, a, o1 & ~(1 << a))];
      if ((o1 >> a) & 1) r.reversed = !r.reversed;
      out.edges[edge_slot(q.dim, i, c)] = r;
    }
  }
  return out;
}

inline std::vector<std::uint64_t> cube_key(const Cube& q) {
  std::vector<std::uint64_t> k;
  k.reserve(static_cast<std::size_t>(q.corner_count() + q.edge_count()));
  for (int c = 0; c < q.corner_count(); ++c) k.push_back(q.corners[c]);
  for (int s = 0; s < q.edge_count(); ++s)
    k.push_back((static_cast<std::uint64_t>(q.edges[s].edge) << 1) | (q.edges[s].reversed ? 1u : 0u));
  return k;
}

// Representative of q under the cube's symmetry group with the least key.
inline Cube normalize_cube(const Cube& q) {
  std::array<int, 3> perm{0, 1, 2};
  Cube best = q;
  auto best_key = cube_key(q);
  do {
    bool valid = true;
    for (int i = q.dim; i < 3; ++i)
      if (perm[i] != i) valid = false;
    if (!valid) continue;
    for (int mask = 0; mask < q.corner_count(); ++mask) {
      Cube t = transform_cube(q, perm, mask);
      auto k = cube_key(t);
      if (k < best_key) {
        best_key = std::move(k);
        best = t;
      }
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

enum class Validation { raw, npc_checked, cat0_checked };

class CubeComplex {
 public:
  std::string name;
  std::vector<std::string> vertex_ids;
  std::vector<Edge> edges;
  std::vector<Cube> squares;
  std::vector<Cube> cubes3;
  int dim_cap = 3;
  Validation validation = Validation::raw;

  std::size_t vertex_count() const { return vertex_ids.size(); }
  std::size_t edge_count() const { return edges.size(); }
  std::size_t cell_count() const { return vertex_ids.size() + edges.size() + squares.size() + cubes3.size(); }

  int dim() const {
    if (!cubes3.empty()) return 3;
    if (!squares.empty()) return 2;
    if (!edges.empty()) return 1;
    return 0;
  }

  Vid vertex_at(EdgeEnd x) const { return x.end == 0 ? edges[x.edge].tail : edges[x.edge].head; }
  Vid far_vertex(EdgeEnd x) const { return x.end == 0 ? edges[x.edge].head : edges[x.edge].tail; }
  static EdgeEnd opposite(EdgeEnd x) { return {x.edge, static_cast<std::uint8_t>(1 - x.end)}; }

  // Edge ends at v, ordered by edge index then tail before head.
  const std::vector<EdgeEnd>& ends_at(Vid v) const { return incidence_[v]; }
  // Position of an edge end within ends_at(vertex_at(x)).
  std::uint32_t port_of(EdgeEnd x) const { return port_[x.key()]; }
  // Squares having e as a side, with the slot it occupies.
  const std::vector<std::pair<Cid, int>>& squares_on(Eid e) const { return squares_on_edge_[e]; }

  std::optional<Vid> find_vertex(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  Vid vertex(const std::string& id) const {
    auto v = find_vertex(id);
    if (!v) throw InputError("unknown vertex '" + id + "' in complex '" + name + "'");
    return *v;
  }

  // Recompute incidence tables and check that every cell closes up. Call after
  // filling the public fields directly.
  void finalize() {
    index_.clear();
    for (Vid v = 0; v < vertex_ids.size(); ++v) {
      if (!index_.emplace(vertex_ids[v], v).second)
        throw InputError("duplicate vertex id '" + vertex_ids[v] + "'");
    }
    incidence_.assign(vertex_ids.size(), {});
    port_.assign(edges.size() * 2, kNone);
    for (Eid e = 0; e < edges.size(); ++e) {
      if (edges[e].tail >= vertex_ids.size() || edges[e].head >= vertex_ids.size())
        throw InputError("edge " + std::to_string(e) + " references a missing vertex");
      for (std::uint8_t end = 0; end < 2; ++end) {
        EdgeEnd x{e, end};
        Vid v = vertex_at(x);
        port_[x.key()] = static_cast<std::uint32_t>(incidence_[v].size());
        incidence_[v].push_back(x);
      }
    }
    squares_on_edge_.assign(edges.size(), {});
    for (Cid s = 0; s < squares.size(); ++s) {
      check_closes(squares[s], "square " + std::to_string(s));
      for (int slot = 0; slot < 4; ++slot) squares_on_edge_[squares[s].edges[slot].edge].emplace_back(s, slot);
    }
    for (Cid c = 0; c < cubes3.size(); ++c) check_closes(cubes3[c], "3-cube " + std::to_string(c));
  }

 private:
  void check_closes(const Cube& q, const std::string& what) const {
    for (int c = 0; c < q.corner_count(); ++c)
      if (q.corners[c] >= vertex_ids.size()) throw InputError(what + " references a missing vertex");
    for (int slot = 0; slot < q.edge_count(); ++slot) {
      const EdgeRef r = q.edges[slot];
      if (r.edge >= edges.size()) throw InputError(what + " references a missing edge");
      auto [a, b] = slot_corners(q.dim, slot);
      Vid start = q.corners[a], end = q.corners[b];
      const Edge& e = edges[r.edge];
      const bool ok = r.reversed ? (e.tail == end && e.head == start) : (e.tail == start && e.head == end);
      if (!ok) throw InputError(what + " does not close up along edge " + std::to_string(r.edge));
    }
  }

  std::unordered_map<std::string, Vid> index_;
  std::vector<std::vector<EdgeEnd>> incidence_;
  std::vector<std::uint32_t> port_;
  std::vector<std::vector<std::pair<Cid, int>>> squares_on_edge_;
};

struct BuildOptions {
  bool normalize_edges = true;         // store every non-loop edge with its smaller endpoint first
  bool allow_duplicate_cells = false;  // keep cells with identical boundaries (for negative tests)
};

class ComplexBuilder {
 public:
  explicit ComplexBuilder(std::string name = {}, int dim_cap = 3) : name_(std::move(name)), dim_cap_(dim_cap) {}

  Vid add_vertex(const std::string& id) {
    if (index_.count(id)) throw InputError("duplicate vertex id '" + id + "'");
    Vid v = static_cast<Vid>(ids_.size());
    ids_.push_back(id);
    index_.emplace(id, v);
    return v;
  }

  Vid vertex(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) throw InputError("dangling reference to vertex '" + id + "'");
    return it->second;
  }

  Eid add_edge(Vid u, Vid v) {
    if (u >= ids_.size() || v >= ids_.size()) throw InputError("edge references a missing vertex");
    edges_.push_back({u, v});
    return static_cast<Eid>(edges_.size() - 1);
  }

  // corners has 2^dim entries; edges (if given) has dim*2^(dim-1) entries in slot order.
  void add_cell(int dim, std::vector<Vid> corners, std::optional<std::vector<EdgeRef>> edges = std::nullopt) {
    if (dim > dim_cap_) throw InputError("cell of dimension " + std::to_string(dim) + " exceeds dim_cap");
    if (dim < 2 || dim > 3) throw InputError("only squares and 3-cubes are supported as higher cells");
    if (corners.size() != static_cast<std::size_t>(1 << dim)) throw InputError("wrong corner count for cell");
    if (edges && edges->size() != static_cast<std::size_t>(dim << (dim - 1)))
      throw InputError("wrong edge count for cell");
    for (Vid c : corners)
      if (c >= ids_.size()) throw InputError("cell references a missing vertex");
    cells_.push_back({dim, std::move(corners), std::move(edges)});
  }

  void add_square(const std::array<Vid, 4>& corners, std::optional<std::array<EdgeRef, 4>> edges = std::nullopt) {
    std::optional<std::vector<EdgeRef>> e;
    if (edges) e = std::vector<EdgeRef>(edges->begin(), edges->end());
    add_cell(2, std::vector<Vid>(corners.begin(), corners.end()), std::move(e));
  }

  CubeComplex build(const BuildOptions& opt = {}) const {
    CubeComplex X;
    X.name = name_;
    X.dim_cap = dim_cap_;
    X.vertex_ids = ids_;
    X.edges = edges_;
    std::vector<bool> flipped(edges_.size(), false);
    if (opt.normalize_edges) {
      for (Eid e = 0; e < X.edges.size(); ++e) {
        if (X.edges[e].tail > X.edges[e].head) {
          std::swap(X.edges[e].tail, X.edges[e].head);
          flipped[e] = true;
        }
      }
    }
    std::map<std::vector<std::uint64_t>, Cid> seen_squares;
    std::map<std::vector<std::uint64_t>, Cid> seen_cubes;
    for (const PendingCell& pc : cells_) {
      Cube q;
      q.dim = static_cast<std::uint8_t>(pc.dim);
      for (int c = 0; c < q.corner_count(); ++c) q.corners[c] = pc.corners[c];
      for (int slot = 0; slot < q.edge_count(); ++slot) {
        auto [a, b] = slot_corners(q.dim, slot);
        if (pc.edges) {
          EdgeRef r = (*pc.edges)[slot];
          if (r.edge >= X.edges.size()) throw InputError("dangling reference to edge " + std::to_string(r.edge));
          if (flipped[r.edge]) r.reversed = !r.reversed;
          q.edges[slot] = r;
        } else {
          q.edges[slot] = resolve_side(X, q.corners[a], q.corners[b]);
        }
      }
      Cube n = normalize_cube(q);
      auto key = cube_key(n);
      auto& seen = q.dim == 2 ? seen_squares : seen_cubes;
      auto& store = q.dim == 2 ? X.squares : X.cubes3;
      if (seen.count(key) && !opt.allow_duplicate_cells)
        throw InputError("duplicate " + std::string(q.dim == 2 ? "square" : "3-cube"));
      seen.emplace(key, static_cast<Cid>(store.size()));
      store.push_back(n);
    }
    X.finalize();
    for (Cid c = 0; c < X.cubes3.size(); ++c) check_faces(X, X.cubes3[c], seen_squares);
    return X;
  }

 private:
  struct PendingCell {
    int dim;
    std::vector<Vid> corners;
    std::optional<std::vector<EdgeRef>> edges;
  };

  EdgeRef resolve_side(const CubeComplex& X, Vid start, Vid end) const {
    std::vector<EdgeRef> found;
    for (Eid e = 0; e < X.edges.size(); ++e) {
      const Edge& ed = X.edges[e];
      if (ed.tail == start && ed.head == end) found.push_back({e, false});
      if (ed.tail == end && ed.head == start && start != end) found.push_back({e, true});
    }
    if (start == end && !found.empty())
      throw InputError("cell side on loop at '" + ids_[start] + "' is ambiguous; give its edges explicitly");
    if (found.empty())
      throw InputError("dangling cell side: no edge between '" + ids_[start] + "' and '" + ids_[end] + "'");
    if (found.size() > 1)
      throw InputError("ambiguous cell side between '" + ids_[start] + "' and '" + ids_[end] +
                       "'; give its edges explicitly");
    return found.front();
  }

  static void check_faces(const CubeComplex& X, const Cube& q,
                          const std::map<std::vector<std::uint64_t>, Cid>& squares) {
    for (int axis = 0; axis < 3; ++axis) {
      for (int side = 0; side < 2; ++side) {
        int f[2], k = 0;
        for (int a = 0; a < 3; ++a)
          if (a != axis) f[k++] = a;
        Cube face;
        face.dim = 2;
        auto corner_of = [&](int fc) { return ((fc & 1) << f[0]) | (((fc >> 1) & 1) << f[1]) | (side << axis); };
        for (int fc = 0; fc < 4; ++fc) face.corners[fc] = q.corners[corner_of(fc)];
        for (int j = 0; j < 2; ++j)
          for (int fc = 0; fc < 4; ++fc) {
            if ((fc >> j) & 1) continue;
            face.edges[edge_slot(2, j, fc)] = q.edges[edge_slot(3, f[j], corner_of(fc) & ~(1 << f[j]))];
          }
        if (!squares.count(cube_key(normalize_cube(face))))
          throw InputError("3-cube face is not a square of complex '" + X.name + "'");
      }
    }
  }

  std::string name_;
  int dim_cap_;
  std::vector<std::string> ids_;
  std::unordered_map<std::string, Vid> index_;
  std::vector<Edge> edges_;
  std::vector<PendingCell> cells_;
};

}  // namespace mf
