#pragma once

#include <string>

#include "mf/bass_serre/gog.hpp"
#include "mf/io/fixtures.hpp"

// Small graphs of complexes used by the examples and tests.
namespace mf::fixtures {

namespace detail {

inline GogInput::EdgeInput circle_edge(std::string name, std::string minus, std::string plus, Eid minus_loop,
                                       Eid plus_loop) {
  GogInput::EdgeInput e;
  e.name = std::move(name);
  e.minus_vertex = std::move(minus);
  e.plus_vertex = std::move(plus);
  e.space = shared(line());
  e.minus_vertices = {0};
  e.plus_vertices = {0};
  e.minus_edges = {{minus_loop, false}};
  e.plus_edges = {{plus_loop, false}};
  return e;
}

}  // namespace detail

// Two tori joined by a cylinder attached along the a-loop on both sides.
inline GraphOfComplexes tori_gog() {
  GogInput in;
  in.vertex_names = {"T1", "T2"};
  in.vertex_spaces = {shared(torus()), shared(torus())};
  in.edges.push_back(detail::circle_edge("e", "T1", "T2", 0, 0));
  return build_gog(in);
}

// Three tori in a row; the middle one is entered along a and left along b, so the two
// cylinders at it cross.
inline GraphOfComplexes transverse_gog() {
  GogInput in;
  in.vertex_names = {"u", "v", "w"};
  in.vertex_spaces = {shared(torus()), shared(torus()), shared(torus())};
  in.edges.push_back(detail::circle_edge("e", "u", "v", 0, 0));
  in.edges.push_back(detail::circle_edge("f", "v", "w", 1, 0));
  return build_gog(in);
}

// A rose with two edge spaces, each its connected double cover, attached by the covering
// map on one side and by the identity onto a copy on the other.
inline GraphOfComplexes free_gog() {
  GogInput in;
  auto cover = shared(rose2_double_cover());
  in.vertex_names = {"v0", "w1", "w2"};
  in.vertex_spaces = {shared(rose2()), cover, cover};
  for (const std::string w : {"w1", "w2"}) {
    GogInput::EdgeInput e;
    e.name = w == "w1" ? "e1" : "e2";
    e.minus_vertex = "v0";
    e.plus_vertex = w;
    e.space = cover;
    e.minus_vertices = {0, 0};
    e.minus_edges = {{0, false}, {0, false}, {1, false}, {1, false}};
    e.plus_vertices = {0, 1};
    e.plus_edges = {{0, false}, {1, false}, {2, false}, {3, false}};
    in.edges.push_back(std::move(e));
  }
  return build_gog(in);
}

// A path of circles of lengths 1, 2, 4, ..., 2^(k-1); each cylinder covers the shorter
// circle twice and the longer one once.
inline GraphOfComplexes wise_gog(int k = 5) {
  if (k < 2) throw InputError("wise_gog needs at least two circles");
  GogInput in;
  for (int i = 0; i < k; ++i) {
    in.vertex_names.push_back("v" + std::to_string(i));
    in.vertex_spaces.push_back(shared(cycle(1 << i, "circle" + std::to_string(1 << i))));
  }
  for (int i = 1; i < k; ++i) {
    const int n = 1 << i, half = n / 2;
    GogInput::EdgeInput e;
    e.name = "e" + std::to_string(i);
    e.minus_vertex = in.vertex_names[i - 1];
    e.plus_vertex = in.vertex_names[i];
    e.space = in.vertex_spaces[i];
    for (int j = 0; j < n; ++j) {
      e.minus_vertices.push_back(static_cast<Vid>(j % half));
      e.minus_edges.push_back({static_cast<Eid>(j % half), false});
      e.plus_vertices.push_back(static_cast<Vid>(j));
      e.plus_edges.push_back({static_cast<Eid>(j), false});
    }
    in.edges.push_back(std::move(e));
  }
  return build_gog(in);
}

}  // namespace mf::fixtures
