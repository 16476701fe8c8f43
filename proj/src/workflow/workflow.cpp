#include "epgm/workflow/workflow.hpp"

#include <fstream>

#include "epgm/grala/parser.hpp"
#include "epgm/json_io.hpp"
#include "epgm/workflow/csv_io.hpp"

namespace epgm::workflow {

namespace fs = std::filesystem;

namespace {

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out += c;
  }
  return out;
}

std::string render_properties(const Properties& props) {
  std::string out = "{";
  bool first = true;
  for (const auto& [key, value] : props) {
    if (!first) out += ",";
    first = false;
    out += key + "=" + value.to_string();
  }
  return out + "}";
}

}  // namespace

WorkflowResult run_workflow(const EpgmDatabase& db, std::string_view source, const WorkflowOptions& options) {
  auto script = grala::parse(source);
  grala::Interpreter interpreter(db);
  for (const auto& name : options.inputs) interpreter.bind_database_graph(name);
  WorkflowResult result;
  auto start = std::chrono::steady_clock::now();
  interpreter.run(script, source, [&](const grala::StatementTiming& t) {
    result.timings.push_back(t);
    if (options.hook) options.hook(t);
  });
  result.elapsed = std::chrono::steady_clock::now() - start;
  for (const auto& [name, value] : interpreter.bindings()) {
    bool input = std::find(options.inputs.begin(), options.inputs.end(), name) != options.inputs.end();
    if (!input && !value.is<grala::DatabaseValue>()) result.bindings.emplace(name, value);
  }
  return result;
}

EpgmDatabase read_dataset(const fs::path& path) {
  if (fs::is_directory(path)) return read_csv_database(path);
  if (!fs::exists(path)) throw ImportError(path.string() + " does not exist");
  return load_database_json(path);
}

nlohmann::json value_to_json(const grala::Value& value) {
  if (value.is<grala::GraphValue>()) return graph_to_json(value.get<grala::GraphValue>()->graph);
  if (value.is<grala::CollectionValue>()) return collection_to_json(value.get<grala::CollectionValue>()->graphs);
  if (value.is<PropertyValue>()) return property_to_json(*value.get<PropertyValue>());
  if (value.is<grala::Absent>()) return nullptr;
  return grala::describe(value);
}

std::string graph_to_dot(const LogicalGraph& graph) {
  std::string out = "digraph g" + std::to_string(graph.head.id) + " {\n";
  out += "  label=\"" + dot_escape(graph.head.label + "\n" + render_properties(graph.head.properties)) + "\";\n";
  for (const Vertex* v : graph.vertices())
    out += "  v" + std::to_string(v->id) + " [label=\"" +
           dot_escape(v->label + "\n" + render_properties(v->properties)) + "\"];\n";
  for (const Edge* e : graph.edges()) {
    std::string label = e->label;
    if (!e->properties.empty()) label += "\n" + render_properties(e->properties);
    out += "  v" + std::to_string(e->source) + " -> v" + std::to_string(e->target) + " [label=\"" +
           dot_escape(label) + "\"];\n";
  }
  return out + "}\n";
}

std::string collection_to_dot(const GraphCollection& collection) {
  std::string out;
  for (const auto& g : collection) out += graph_to_dot(g);
  return out;
}

std::string format_timing(const grala::StatementTiming& timing) {
  auto micros = std::chrono::duration_cast<std::chrono::microseconds>(timing.elapsed).count();
  return "statement " + std::to_string(timing.index) + " " + (timing.target.empty() ? "-" : timing.target) + " " +
         std::to_string(micros) + " us";
}

}  // namespace epgm::workflow
