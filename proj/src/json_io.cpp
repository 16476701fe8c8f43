#include "epgm/json_io.hpp"

#include <fstream>
#include <set>

namespace epgm {

using nlohmann::json;

json property_to_json(const PropertyValue& value) {
  return std::visit([](const auto& v) { return json(v); }, value.variant());
}

PropertyValue property_from_json(const json& j) {
  if (j.is_boolean()) return j.get<bool>();
  if (j.is_number_integer()) return j.get<int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_string()) return j.get<std::string>();
  throw TypeError("unsupported property value: " + j.dump());
}

json properties_to_json(const Properties& props) {
  json out = json::object();
  for (const auto& [k, v] : props) out[k] = property_to_json(v);
  return out;
}

Properties properties_from_json(const json& j) {
  Properties props;
  if (j.is_null()) return props;
  if (!j.is_object()) throw TypeError("properties must be a JSON object");
  for (const auto& [k, v] : j.items()) props.emplace(k, property_from_json(v));
  return props;
}

namespace {

std::vector<uint64_t> id_list(const json& j, const char* key) {
  std::vector<uint64_t> out;
  if (!j.contains(key)) return out;
  for (const auto& id : j.at(key)) out.push_back(id.get<uint64_t>());
  return out;
}

}  // namespace

EpgmDatabase database_from_json(const json& j) {
  EpgmDatabase db;
  if (j.contains("labels")) {
    for (const auto& l : j.at("labels")) db.declare_label(l.get<std::string>());
  }
  if (j.contains("vertices")) {
    for (const auto& jv : j.at("vertices")) {
      Vertex v;
      v.id = jv.at("id").get<uint64_t>();
      v.label = jv.value("label", "");
      v.properties = properties_from_json(jv.value("properties", json::object()));
      db.insert_vertex(std::move(v));
    }
  }
  // Explicit indices first so that implicit ones never collide with them.
  std::vector<const json*> implicit;
  if (j.contains("edges")) {
    for (const auto& je : j.at("edges")) {
      if (!je.contains("index")) {
        implicit.push_back(&je);
        continue;
      }
      Edge e;
      e.id = je.at("id").get<uint64_t>();
      e.source = je.at("source").get<uint64_t>();
      e.target = je.at("target").get<uint64_t>();
      e.index = je.at("index").get<uint32_t>();
      e.label = je.value("label", "");
      e.properties = properties_from_json(je.value("properties", json::object()));
      db.insert_edge(std::move(e));
    }
  }
  for (const json* je : implicit) {
    Edge e;
    e.id = je->at("id").get<uint64_t>();
    e.source = je->at("source").get<uint64_t>();
    e.target = je->at("target").get<uint64_t>();
    e.index = db.elements().find_vertex(e.source) ? db.vertex(e.source).next_edge_index : 0;
    e.label = je->value("label", "");
    e.properties = properties_from_json(je->value("properties", json::object()));
    db.insert_edge(std::move(e));
  }
  if (j.contains("graphs")) {
    for (const auto& jg : j.at("graphs")) {
      GraphHead head;
      head.id = jg.at("id").get<uint64_t>();
      head.label = jg.value("label", "");
      head.properties = properties_from_json(jg.value("properties", json::object()));
      db.insert_graph(std::move(head), id_list(jg, "vertices"), id_list(jg, "edges"));
    }
  }
  return db;
}

EpgmDatabase load_database_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw NotFoundError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw Error(path.string() + ": " + e.what());
  }
  return database_from_json(j);
}

namespace {

json vertex_to_json(const Vertex& v) {
  return json{{"id", v.id}, {"label", v.label}, {"properties", properties_to_json(v.properties)}};
}

json edge_to_json(const Edge& e) {
  return json{{"id", e.id},         {"label", e.label}, {"source", e.source},
              {"target", e.target}, {"index", e.index}, {"properties", properties_to_json(e.properties)}};
}

json head_to_json(const GraphHead& head, const IdSet& vertices, const IdSet& edges) {
  return json{{"id", head.id},
              {"label", head.label},
              {"properties", properties_to_json(head.properties)},
              {"vertices", vertices},
              {"edges", edges}};
}

}  // namespace

json database_to_json(const EpgmDatabase& db) {
  json out;
  out["labels"] = db.labels();
  out["vertices"] = json::array();
  for (const auto& [id, v] : db.elements().vertices()) out["vertices"].push_back(vertex_to_json(v));
  out["edges"] = json::array();
  for (const auto& [id, e] : db.elements().edges()) out["edges"].push_back(edge_to_json(e));
  out["graphs"] = json::array();
  for (const auto& g : db.graphs()) out["graphs"].push_back(head_to_json(g.head, g.vertex_ids, g.edge_ids));
  return out;
}

json graph_to_json(const LogicalGraph& graph) {
  return collection_to_json(GraphCollection{graph});
}

json collection_to_json(const GraphCollection& collection) {
  json out;
  out["vertices"] = json::array();
  out["edges"] = json::array();
  out["graphs"] = json::array();
  // Graphs of one collection may live in different element spaces (e.g. a
  // summary next to its input); elements are emitted once per (space, id).
  std::set<std::pair<const ElementSpace*, uint64_t>> seen_v, seen_e;
  for (const auto& g : collection) {
    for (auto id : g.vertex_ids) {
      if (seen_v.insert({g.space.get(), id}).second) out["vertices"].push_back(vertex_to_json(g.vertex(id)));
    }
    for (auto id : g.edge_ids) {
      if (seen_e.insert({g.space.get(), id}).second) out["edges"].push_back(edge_to_json(g.edge(id)));
    }
    out["graphs"].push_back(head_to_json(g.head, g.vertex_ids, g.edge_ids));
  }
  return out;
}

}  // namespace epgm
