#pragma once

#include <optional>
#include <vector>

#include "mf/cubecore/hyperplanes.hpp"
#include "mf/cubecore/npc.hpp"

namespace mf {

struct HyperplaneSpecialness {
  std::uint32_t id = 0;
  std::optional<Cid> self_intersection;  // square whose two midcubes lie in this hyperplane
  std::optional<Cid> one_sided;          // square where the orientation flips
  struct Osculation {
    Vid vertex;
    EdgeEnd a, b;
  };
  std::optional<Osculation> self_osculation;

  bool ok() const { return !self_intersection && !one_sided && !self_osculation; }
};

struct InterOsculation {
  std::uint32_t h1, h2;
  Vid vertex;
  EdgeEnd a, b;  // a dual to h1, b dual to h2, not spanning a square
};

struct SpecialnessReport {
  bool special = true;
  std::vector<HyperplaneSpecialness> hyperplanes;
  std::vector<InterOsculation> inter_osculations;
};

// Two ends at a vertex dual to one hyperplane osculate directly when they leave in
// the same direction without spanning a square. Crossing hyperplanes inter-osculate
// when they also have dual ends at a vertex that do not span a square.
inline SpecialnessReport check_special(CubeComplex& X) {
  if (X.validation == Validation::raw) {
    NpcReport npc = validate_npc(X);
    if (!npc.ok) throw PreconditionError("check_special needs an NPC complex");
  }
  HyperplaneData H = compute_hyperplanes(X);
  auto links = compute_links(X);
  SpecialnessReport rep;
  rep.hyperplanes.resize(H.count());
  for (std::uint32_t h = 0; h < H.count(); ++h) {
    rep.hyperplanes[h].id = h;
    rep.hyperplanes[h].self_intersection = H.self_crossing_witness[h];
    rep.hyperplanes[h].one_sided = H.one_sided_witness[h];
  }
  std::set<std::pair<std::uint32_t, std::uint32_t>> reported;
  for (Vid v = 0; v < X.vertex_count(); ++v) {
    const auto& ends = X.ends_at(v);
    for (std::size_t i = 0; i < ends.size(); ++i) {
      for (std::size_t j = i + 1; j < ends.size(); ++j) {
        EdgeEnd a = ends[i], b = ends[j];
        if (a.edge == b.edge || links[v].adjacent(a, b)) continue;
        std::uint32_t ha = H.of_edge[a.edge], hb = H.of_edge[b.edge];
        if (ha == hb) {
          auto& rec = rep.hyperplanes[ha];
          if (H.two_sided[ha] && H.crossing_direction(a) == H.crossing_direction(b) && !rec.self_osculation)
            rec.self_osculation = HyperplaneSpecialness::Osculation{v, a, b};
        } else if (H.cross(ha, hb) && reported.insert(ordered_pair(ha, hb)).second) {
          rep.inter_osculations.push_back({std::min(ha, hb), std::max(ha, hb), v, ha < hb ? a : b, ha < hb ? b : a});
        }
      }
    }
  }
  for (const auto& r : rep.hyperplanes)
    if (!r.ok()) rep.special = false;
  if (!rep.inter_osculations.empty()) rep.special = false;
  return rep;
}

}  // namespace mf
