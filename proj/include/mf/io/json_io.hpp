#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mf/bass_serre/gog.hpp"
#include "mf/cubecore/maps.hpp"

namespace mf::io {

using json = nlohmann::json;

// Sorted keys (nlohmann's default object type is ordered), two-space indent, LF ending.
inline std::string canonical_dump(const json& j) { return j.dump(2) + "\n"; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw InputError("cannot read '" + p.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw InputError("cannot write '" + p.string() + "'");
  out << text;
}

inline json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& err) {
    throw InputError(what + ": " + err.what());
  }
}

namespace detail {

inline const json& field(const json& j, const char* key, const std::string& what) {
  if (!j.is_object() || !j.contains(key)) throw InputError(what + ": missing \"" + key + "\"");
  return j.at(key);
}

inline std::string as_id(const json& j, const std::string& what) {
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return std::to_string(j.get<long long>());
  throw InputError(what + ": vertex ids must be strings or integers");
}

inline EdgeRef as_ref(const json& j, const std::string& what) {
  if (j.is_number_unsigned() || j.is_number_integer()) return {j.get<Eid>(), false};
  if (j.is_object()) return {field(j, "edge", what).get<Eid>(), j.value("reversed", false)};
  throw InputError(what + ": edge reference must be an index or {\"edge\", \"reversed\"}");
}

inline json ref_json(EdgeRef r) {
  if (!r.reversed) return r.edge;
  return json{{"edge", r.edge}, {"reversed", true}};
}

}  // namespace detail

// {"name", "vertices", "edges": [[u, v]], "squares": [corners | {"corners", "edges"}],
//  "cubes3": [...], "oriented"}. Without "oriented" every edge is stored smaller id first.
inline CubeComplex complex_from_json(const json& j, const std::string& what = "complex") {
  try {
    ComplexBuilder b(j.value("name", std::string()), j.value("dim_cap", 3));
    for (const json& v : detail::field(j, "vertices", what)) b.add_vertex(detail::as_id(v, what));
    for (const json& e : detail::field(j, "edges", what)) {
      if (!e.is_array() || e.size() != 2) throw InputError(what + ": an edge is a pair of vertex ids");
      b.add_edge(b.vertex(detail::as_id(e[0], what)), b.vertex(detail::as_id(e[1], what)));
    }
    auto cells = [&](const char* key, int dim) {
      if (!j.contains(key)) return;
      for (const json& c : j.at(key)) {
        const json& corners = c.is_object() ? detail::field(c, "corners", what) : c;
        std::vector<Vid> cs;
        for (const json& v : corners) cs.push_back(b.vertex(detail::as_id(v, what)));
        std::optional<std::vector<EdgeRef>> refs;
        if (c.is_object() && c.contains("edges")) {
          refs.emplace();
          for (const json& r : c.at("edges")) refs->push_back(detail::as_ref(r, what));
        }
        b.add_cell(dim, std::move(cs), std::move(refs));
      }
    };
    cells("squares", 2);
    cells("cubes3", 3);
    return b.build({.normalize_edges = !j.value("oriented", false), .allow_duplicate_cells = false});
  } catch (const json::exception& err) {
    throw InputError(what + ": " + err.what());
  }
}

// Emits every cell with explicit edge references so the file rebuilds the same complex.
inline json complex_to_json(const CubeComplex& X) {
  json j;
  j["name"] = X.name;
  j["oriented"] = true;
  j["vertices"] = X.vertex_ids;
  json edges = json::array();
  for (const Edge& e : X.edges) edges.push_back({X.vertex_ids[e.tail], X.vertex_ids[e.head]});
  j["edges"] = edges;
  auto cells = [&](const std::vector<Cube>& qs) {
    json out = json::array();
    for (const Cube& q : qs) {
      json corners = json::array(), refs = json::array();
      for (int c = 0; c < q.corner_count(); ++c) corners.push_back(X.vertex_ids[q.corners[c]]);
      for (int s = 0; s < q.edge_count(); ++s) refs.push_back(detail::ref_json(q.edges[s]));
      out.push_back({{"corners", corners}, {"edges", refs}});
    }
    return out;
  };
  j["squares"] = cells(X.squares);
  if (!X.cubes3.empty()) j["cubes3"] = cells(X.cubes3);
  if (X.dim_cap != 3) j["dim_cap"] = X.dim_cap;
  return j;
}

inline bool same_complex(const CubeComplex& a, const CubeComplex& b) {
  if (a.name != b.name || a.vertex_ids != b.vertex_ids || a.edges.size() != b.edges.size()) return false;
  for (std::size_t e = 0; e < a.edges.size(); ++e)
    if (a.edges[e].tail != b.edges[e].tail || a.edges[e].head != b.edges[e].head) return false;
  return a.squares == b.squares && a.cubes3 == b.cubes3;
}

// {"source", "target", "vertex_map": {id: id}, "edge_map": {"i": ref | null}}. Edges left
// out of edge_map are resolved from their endpoint images when that is unambiguous.
inline CombinatorialMap map_from_json(const json& j, std::shared_ptr<const CubeComplex> source,
                                      std::shared_ptr<const CubeComplex> target, const std::string& what = "map") {
  try {
    for (auto [key, X] : {std::pair{"source", source}, std::pair{"target", target}})
      if (j.contains(key) && j.at(key).get<std::string>() != X->name)
        throw InputError(what + ": " + key + " is '" + j.at(key).get<std::string>() + "' but the complex is '" +
                         X->name + "'");
    CombinatorialMap f;
    f.source = source;
    f.target = target;
    f.vertex_map.assign(source->vertex_count(), kNone);
    for (const auto& [from, to] : detail::field(j, "vertex_map", what).items())
      f.vertex_map[source->vertex(from)] = target->vertex(detail::as_id(to, what));
    for (Vid v = 0; v < source->vertex_count(); ++v)
      if (f.vertex_map[v] == kNone)
        throw InputError(what + ": vertex '" + source->vertex_ids[v] + "' has no image");
    f.edge_map.assign(source->edge_count(), {kNone, false});
    std::vector<bool> given(source->edge_count(), false);
    if (j.contains("edge_map"))
      for (const auto& [key, r] : j.at("edge_map").items()) {
        std::size_t e = std::stoul(key);
        if (e >= source->edge_count()) throw InputError(what + ": edge_map names a missing edge " + key);
        given[e] = true;
        if (!r.is_null()) f.edge_map[e] = detail::as_ref(r, what);
      }
    for (Eid e = 0; e < source->edge_count(); ++e) {
      if (given[e]) continue;
      Vid a = f.vertex_map[source->edges[e].tail], b = f.vertex_map[source->edges[e].head];
      std::vector<EdgeRef> found;
      for (Eid t = 0; t < target->edge_count(); ++t) {
        if (target->edges[t].tail == a && target->edges[t].head == b) found.push_back({t, false});
        else if (target->edges[t].tail == b && target->edges[t].head == a) found.push_back({t, true});
      }
      if (found.size() != 1)
        throw InputError(what + ": image of edge " + std::to_string(e) + " is " +
                         (found.empty() ? "missing" : "ambiguous") + "; list it in edge_map");
      f.edge_map[e] = found.front();
    }
    complete_map(f);
    return f;
  } catch (const json::exception& err) {
    throw InputError(what + ": " + err.what());
  } catch (const std::invalid_argument&) {
    throw InputError(what + ": edge_map keys must be edge indices");
  }
}

inline json map_to_json(const CombinatorialMap& f) {
  json j;
  j["source"] = f.source->name;
  j["target"] = f.target->name;
  json vm = json::object(), em = json::object();
  for (Vid v = 0; v < f.vertex_map.size(); ++v) vm[f.source->vertex_ids[v]] = f.target->vertex_ids[f.vertex_map[v]];
  for (Eid e = 0; e < f.edge_map.size(); ++e)
    em[std::to_string(e)] = f.edge_map[e].edge == kNone ? json(nullptr) : detail::ref_json(f.edge_map[e]);
  j["vertex_map"] = vm;
  j["edge_map"] = em;
  return j;
}

inline CubeComplex load_complex(const std::filesystem::path& p) {
  return complex_from_json(parse_json(read_file(p), p.string()), p.string());
}

// A graph of complexes stored as a directory (or a gog.json file) whose entries refer to
// complex and map files relative to it.
struct GogFiles {
  GraphOfComplexes gog;
  std::vector<std::filesystem::path> files;  // every file read, gog.json first
};

inline std::filesystem::path gog_manifest(const std::filesystem::path& p) {
  return std::filesystem::is_directory(p) ? p / "gog.json" : p;
}

inline GogFiles load_gog(const std::filesystem::path& p) {
  const std::filesystem::path manifest = gog_manifest(p);
  const std::filesystem::path dir = manifest.parent_path();
  GogFiles out;
  out.files.push_back(manifest);
  const json j = parse_json(read_file(manifest), manifest.string());
  const std::string what = manifest.string();
  try {
    const json& graph = detail::field(j, "graph", what);
    std::map<std::string, std::shared_ptr<const CubeComplex>> cache;
    auto complex_at = [&](const json& ref) {
      const std::string name = ref.get<std::string>();
      auto& slot = cache[name];
      if (!slot) {
        out.files.push_back(dir / name);
        slot = std::make_shared<const CubeComplex>(load_complex(dir / name));
      }
      return slot;
    };
    GogInput in;
    const json& vspaces = detail::field(j, "vertex_spaces", what);
    for (const json& v : detail::field(graph, "vertices", what)) {
      const std::string name = v.get<std::string>();
      if (!vspaces.contains(name)) throw InputError(what + ": dangling vertex space for '" + name + "'");
      in.vertex_names.push_back(name);
      in.vertex_spaces.push_back(complex_at(vspaces.at(name)));
    }
    const json& espaces = detail::field(j, "edge_spaces", what);
    const json& attachments = detail::field(j, "attachments", what);
    std::size_t index = 0;
    for (const json& e : detail::field(graph, "edges", what)) {
      if (!e.is_array() || e.size() < 2 || e.size() > 3)
        throw InputError(what + ": a graph edge is [u, v] or [u, v, name]");
      GogInput::EdgeInput ei;
      ei.minus_vertex = e[0].get<std::string>();
      ei.plus_vertex = e[1].get<std::string>();
      ei.name = e.size() == 3 ? e[2].get<std::string>() : std::to_string(index);
      ++index;
      if (!espaces.contains(ei.name)) throw InputError(what + ": dangling edge space for '" + ei.name + "'");
      ei.space = complex_at(espaces.at(ei.name));
      if (!attachments.contains(ei.name)) throw InputError(what + ": no attachments for edge '" + ei.name + "'");
      const json& att = attachments.at(ei.name);
      auto vertex_space = [&](const std::string& v) -> std::shared_ptr<const CubeComplex> {
        for (std::size_t k = 0; k < in.vertex_names.size(); ++k)
          if (in.vertex_names[k] == v) return in.vertex_spaces[k];
        throw InputError(what + ": edge '" + ei.name + "' references unknown graph vertex '" + v + "'");
      };
      for (int side = 0; side < 2; ++side) {
        const char* key = side == 0 ? "minus" : "plus";
        const std::filesystem::path mp = dir / detail::field(att, key, what).get<std::string>();
        out.files.push_back(mp);
        CombinatorialMap f = map_from_json(parse_json(read_file(mp), mp.string()), ei.space,
                                           vertex_space(side == 0 ? ei.minus_vertex : ei.plus_vertex), mp.string());
        (side == 0 ? ei.minus_vertices : ei.plus_vertices) = f.vertex_map;
        (side == 0 ? ei.minus_edges : ei.plus_edges) = f.edge_map;
      }
      in.edges.push_back(std::move(ei));
    }
    out.gog = build_gog(in);
  } catch (const json::exception& err) {
    throw InputError(what + ": " + err.what());
  }
  return out;
}

// Writes gog.json plus one file per space and attaching map. Spaces are named after the
// graph vertex or edge they sit over.
inline std::vector<std::filesystem::path> save_gog(const GraphOfComplexes& G, const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& name, const json& j) {
    for (const auto& w : written)
      if (w == dir / name) throw InputError("graph vertex and edge names collide at '" + name + "'");
    write_file(dir / name, canonical_dump(j));
    written.push_back(dir / name);
  };
  json j, vertices = json::array(), edges = json::array(), vs = json::object(), es = json::object(),
          att = json::object();
  for (std::uint32_t v = 0; v < G.vertex_count(); ++v) {
    const std::string& name = G.vertex_names[v];
    vertices.push_back(name);
    const std::string file = name + ".json";
    vs[name] = file;
    put(file, complex_to_json(*G.vertex_spaces[v]));
  }
  for (std::uint32_t e = 0; e < G.edge_count(); ++e) {
    const GogEdge& ed = G.edges[e];
    edges.push_back({G.vertex_names[ed.minus_vertex], G.vertex_names[ed.plus_vertex], ed.name});
    es[ed.name] = ed.name + ".json";
    put(ed.name + ".json", complex_to_json(*G.edge_spaces[e]));
    put(ed.name + ".minus.json", map_to_json(G.minus[e]));
    put(ed.name + ".plus.json", map_to_json(G.plus[e]));
    att[ed.name] = {{"minus", ed.name + ".minus.json"}, {"plus", ed.name + ".plus.json"}};
  }
  j["graph"] = {{"vertices", vertices}, {"edges", edges}};
  j["vertex_spaces"] = vs;
  j["edge_spaces"] = es;
  j["attachments"] = att;
  put("gog.json", j);
  return written;
}

}  // namespace mf::io
