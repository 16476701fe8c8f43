// Python module epgm._core: databases, logical graphs, the operator algebra,
// GrALa workflows, generators and the graph store.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "epgm/algorithms.hpp"
#include "epgm/json_io.hpp"
#include "epgm/operators.hpp"
#include "epgm/pattern.hpp"
#include "epgm/store/graph_store.hpp"
#include "epgm/workflow/csv_io.hpp"
#include "epgm/workflow/generators.hpp"
#include "epgm/workflow/workflow.hpp"

namespace py = pybind11;
using namespace epgm;

namespace {

py::object to_python(const PropertyValue& v) {
  if (v.is_int()) return py::int_(v.as_int());
  if (v.is_float()) return py::float_(v.as_float());
  if (v.is_bool()) return py::bool_(v.as_bool());
  return py::str(v.as_string());
}

PropertyValue from_python(const py::handle& h) {
  if (py::isinstance<py::bool_>(h)) return PropertyValue(h.cast<bool>());
  if (py::isinstance<py::int_>(h)) return PropertyValue(h.cast<int64_t>());
  if (py::isinstance<py::float_>(h)) return PropertyValue(h.cast<double>());
  if (py::isinstance<py::str>(h)) return PropertyValue(h.cast<std::string>());
  throw TypeError("property values must be int, float, bool or str");
}

py::dict to_python(const Properties& props) {
  py::dict d;
  for (const auto& [k, v] : props) d[py::str(k)] = to_python(v);
  return d;
}

algo::Params to_params(const py::dict& d) {
  algo::Params params;
  for (auto [k, v] : d) params.emplace(py::str(k), py::str(v));
  return params;
}

py::object json_to_python(const nlohmann::json& j) {
  return py::module_::import("json").attr("loads")(j.dump());
}

py::object value_to_python(const grala::Value& v) {
  if (const auto* g = v.get<grala::GraphValue>()) return py::cast(g->graph);
  if (const auto* c = v.get<grala::CollectionValue>()) return py::cast(c->graphs);
  if (const auto* p = v.get<PropertyValue>()) return to_python(*p);
  if (v.is<grala::Absent>()) return py::none();
  return py::str(grala::describe(v));
}

py::dict vertex_dict(const Vertex& v) {
  py::dict d;
  d["id"] = v.id;
  d["label"] = v.label;
  d["properties"] = to_python(v.properties);
  d["graphs"] = v.graph_ids;
  return d;
}

py::dict edge_dict(const Edge& e) {
  py::dict d;
  d["id"] = e.id;
  d["label"] = e.label;
  d["source"] = e.source;
  d["target"] = e.target;
  d["index"] = e.index;
  d["properties"] = to_python(e.properties);
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Extended property graph model engine";

  py::register_exception<Error>(m, "EpgmError");
  py::register_exception<grala::ScriptError>(m, "ScriptError", PyExc_ValueError);

  py::class_<LogicalGraph>(m, "Graph")
      .def_property_readonly("id", [](const LogicalGraph& g) { return g.head.id; })
      .def_property_readonly("label", [](const LogicalGraph& g) { return g.head.label; })
      .def_property_readonly("properties", [](const LogicalGraph& g) { return to_python(g.head.properties); })
      .def_property_readonly("vertex_ids", [](const LogicalGraph& g) { return g.vertex_ids; })
      .def_property_readonly("edge_ids", [](const LogicalGraph& g) { return g.edge_ids; })
      .def_property_readonly("is_temporary", [](const LogicalGraph& g) { return is_temporary(g.head.id); })
      .def("vertex", [](const LogicalGraph& g, VertexId id) { return vertex_dict(g.vertex(id)); })
      .def("edge", [](const LogicalGraph& g, EdgeId id) { return edge_dict(g.edge(id)); })
      .def("combine", &ops::combine)
      .def("overlap", &ops::overlap)
      .def("exclude", &ops::exclude)
      .def(
          "match",
          [](const LogicalGraph& g, const std::string& pattern) {
            return pattern::match_pattern(g, pattern::parse_pattern(pattern), {});
          },
          py::arg("pattern"))
      .def(
          "aggregate",
          [](const LogicalGraph& g, const std::string& key, const std::function<py::object(const LogicalGraph&)>& fn) {
            return ops::aggregate(g, key, [&](const LogicalGraph& x) { return from_python(fn(x)); });
          },
          py::arg("key"), py::arg("function"))
      .def(
          "summarize",
          [](const LogicalGraph& g, std::vector<std::string> vertex_keys, std::vector<std::string> edge_keys) {
            ops::SummarizationSpec spec;
            spec.vertex_keys.property_keys = std::move(vertex_keys);
            spec.edge_keys.property_keys = std::move(edge_keys);
            spec.vertex_aggregator = ops::count_vertices_into("count");
            spec.edge_aggregator = ops::count_edges_into("count");
            return ops::summarize(g, spec);
          },
          py::arg("vertex_keys"), py::arg("edge_keys") = std::vector<std::string>{},
          "Groups by the keys and stores group sizes under `count`.")
      .def(
          "call_for_graph",
          [](const LogicalGraph& g, const std::string& symbol, const py::dict& params) {
            return ops::call_for_graph(g, symbol, to_params(params));
          },
          py::arg("algorithm"), py::arg("params") = py::dict())
      .def(
          "call_for_collection",
          [](const LogicalGraph& g, const std::string& symbol, const py::dict& params) {
            return ops::call_for_collection(g, symbol, to_params(params));
          },
          py::arg("algorithm"), py::arg("params") = py::dict())
      .def("to_json", [](const LogicalGraph& g) { return json_to_python(graph_to_json(g)); })
      .def("to_dot", &workflow::graph_to_dot)
      .def("__repr__", [](const LogicalGraph& g) {
        return "<Graph " + std::to_string(g.head.id) + " " + g.head.label + " |V|=" +
               std::to_string(g.vertex_ids.size()) + " |E|=" + std::to_string(g.edge_ids.size()) + ">";
      });

  m.def("select", &ops::select, py::arg("collection"), py::arg("predicate"));
  m.def("distinct", &ops::distinct);
  m.def(
      "sort_by",
      [](const GraphCollection& c, const std::string& key, bool descending) {
        return ops::sort_by(c, key, descending ? ops::SortOrder::Descending : ops::SortOrder::Ascending);
      },
      py::arg("collection"), py::arg("key"), py::arg("descending") = false);
  m.def("top", &ops::top);
  m.def("union", &ops::union_collections);
  m.def("intersect", &ops::intersect_collections);
  m.def("difference", &ops::difference_collections);
  m.def("apply", &ops::apply);
  m.def("reduce", &ops::reduce);
  m.def("combine_all", &ops::combine_all);
  m.def("overlap_all", &ops::overlap_all);

  py::class_<EpgmDatabase>(m, "Database")
      .def(py::init<>())
      .def_static("load", &workflow::read_dataset, py::arg("path"), "Load a JSON file or a CSV dataset directory.")
      .def_static("from_json", [](const std::string& text) { return database_from_json(nlohmann::json::parse(text)); })
      .def("to_json", [](const EpgmDatabase& db) { return database_to_json(db).dump(); })
      .def("write_csv", &workflow::write_csv_database, py::arg("directory"))
      .def("add_vertex",
           [](EpgmDatabase& db, std::string label, const py::dict& props) {
             Properties p;
             for (auto [k, v] : props) p.insert_or_assign(py::str(k), from_python(v));
             return db.add_vertex(std::move(label), std::move(p));
           },
           py::arg("label"), py::arg("properties") = py::dict())
      .def("add_edge",
           [](EpgmDatabase& db, VertexId s, VertexId t, std::string label, const py::dict& props) {
             Properties p;
             for (auto [k, v] : props) p.insert_or_assign(py::str(k), from_python(v));
             return db.add_edge(s, t, std::move(label), std::move(p));
           },
           py::arg("source"), py::arg("target"), py::arg("label"), py::arg("properties") = py::dict())
      .def("create_graph",
           [](EpgmDatabase& db, std::string label, std::vector<VertexId> vs, std::vector<EdgeId> es) {
             return db.create_logical_graph(std::move(label), {}, std::move(vs), std::move(es));
           },
           py::arg("label"), py::arg("vertices"), py::arg("edges"))
      .def_property_readonly("vertex_count", &EpgmDatabase::vertex_count)
      .def_property_readonly("edge_count", &EpgmDatabase::edge_count)
      .def_property_readonly("graph_count", &EpgmDatabase::graph_count)
      .def_property_readonly("labels", &EpgmDatabase::labels)
      .def("graph", &EpgmDatabase::graph)
      .def("graphs", &EpgmDatabase::graphs)
      .def("database_graph", &EpgmDatabase::database_graph)
      .def("persist", [](EpgmDatabase& db, const LogicalGraph& g) { return db.persist(g); })
      .def("vertex", [](const EpgmDatabase& db, VertexId id) { return vertex_dict(db.vertex(id)); })
      .def("edge", [](const EpgmDatabase& db, EdgeId id) { return edge_dict(db.edge(id)); })
      .def("validate", &EpgmDatabase::validate);

  m.def(
      "run_script",
      [](const EpgmDatabase& db, const std::string& source, std::vector<std::string> inputs) {
        workflow::WorkflowOptions options;
        options.inputs = std::move(inputs);
        auto result = workflow::run_workflow(db, source, options);
        py::dict out;
        for (const auto& [name, value] : result.bindings) out[py::str(name)] = value_to_python(value);
        return out;
      },
      py::arg("database"), py::arg("source"), py::arg("inputs") = std::vector<std::string>{},
      "Run a GrALa script; returns the final bindings.");

  m.def(
      "generate_social",
      [](uint32_t scale, uint64_t seed) {
        workflow::SocialParams p;
        p.scale = scale;
        p.seed = seed;
        auto ds = workflow::generate_social(p);
        return py::make_tuple(std::move(ds.db), json_to_python(ds.metadata));
      },
      py::arg("scale") = 1, py::arg("seed") = 42);
  m.def(
      "generate_business",
      [](uint32_t scale, uint64_t seed) {
        workflow::BusinessParams p;
        p.scale = scale;
        p.seed = seed;
        auto ds = workflow::generate_business(p);
        return py::make_tuple(std::move(ds.db), json_to_python(ds.metadata));
      },
      py::arg("scale") = 1, py::arg("seed") = 42);

  py::class_<store::GraphStore>(m, "Store")
      .def(py::init([](const std::string& path, uint16_t partitions, const std::string& partitioner,
                       size_t max_versions) {
             store::StoreConfig config;
             config.path = path;
             config.partitions = partitions;
             config.strategy = store::parse_strategy(partitioner);
             config.max_versions = max_versions;
             return std::make_unique<store::GraphStore>(config);
           }),
           py::arg("path"), py::arg("partitions") = 1, py::arg("partitioner") = "hash", py::arg("max_versions") = 3)
      .def("write_database", &store::GraphStore::write_database)
      .def("load_database", [](const store::GraphStore& s) { return s.load_database(); })
      .def("get_graph", [](const store::GraphStore& s, GraphId id) { return s.get_graph(id); })
      .def("graph_ids", [](const store::GraphStore& s) { return s.graph_ids(); })
      .def("persist_graph", &store::GraphStore::persist_graph)
      .def("get_vertex",
           [](const store::GraphStore& s, VertexId id) -> py::object {
             auto v = s.get_vertex(id);
             if (!v) return py::none();
             py::dict d = vertex_dict(v->vertex);
             py::list out;
             for (const auto& e : v->out_edges) out.append(edge_dict(e));
             d["out_edges"] = out;
             d["partition"] = v->partition;
             return d;
           })
      .def("audit_mirrors", &store::GraphStore::audit_mirrors)
      .def("stats",
           [](const store::GraphStore& s) {
             auto st = s.stats();
             py::dict d;
             d["vertices"] = st.vertices;
             d["edges"] = st.edges;
             d["graphs"] = st.graphs;
             d["partition_rows"] = st.partition_rows;
             d["labels"] = st.labels;
             return d;
           })
      .def("sync", &store::GraphStore::sync)
      .def("flush", &store::GraphStore::flush);
}
