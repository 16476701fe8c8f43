// epgm: import, generate, run, export and stats over a graph store.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "epgm/json_io.hpp"
#include "epgm/operators.hpp"
#include "epgm/store/graph_store.hpp"
#include "epgm/workflow/csv_io.hpp"
#include "epgm/workflow/generators.hpp"
#include "epgm/workflow/workflow.hpp"

namespace fs = std::filesystem;
using namespace epgm;

namespace {

constexpr int kOk = 0;
constexpr int kRuntimeError = 1;
constexpr int kUsageError = 2;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct Options {
  std::string store;
  std::string script;
  std::string format;
  std::string out;
  std::string partitioner = "hash";
  uint16_t partitions = 1;
  uint32_t scale = 1;
  uint64_t seed = 42;
  std::string positional;
  std::vector<std::string> inputs;
  std::vector<std::string> persist;
  std::optional<GraphId> graph;
  std::string binding;
};

std::string store_path(const Options& o) {
  if (!o.store.empty()) return o.store;
  if (const char* env = std::getenv("EPGM_STORE")) return env;
  throw UsageError("no store given; use --store PATH or set EPGM_STORE");
}

std::string read_script(const std::string& path) {
  if (path.empty()) throw UsageError("--script FILE is required");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read script " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const fs::path& file, const std::string& text) {
  if (file.has_parent_path()) fs::create_directories(file.parent_path());
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw Error("cannot write " + file.string());
  std::cerr << "wrote " << file.string() << "\n";
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string render(const grala::Value& value, const std::string& format) {
  if (format == "dot") {
    if (const auto* g = value.get<grala::GraphValue>()) return workflow::graph_to_dot(g->graph);
    if (const auto* c = value.get<grala::CollectionValue>()) return workflow::collection_to_dot(c->graphs);
    throw UsageError("only graphs and collections can be rendered as dot");
  }
  return workflow::value_to_json(value).dump(2) + "\n";
}

bool is_result(const grala::Value& v) { return v.is<grala::GraphValue>() || v.is<grala::CollectionValue>(); }

int cmd_generate(const Options& o) {
  if (o.positional != "social" && o.positional != "business")
    throw UsageError("generate needs a kind: social or business");
  if (o.out.empty()) throw UsageError("generate needs --out DIR");
  if (o.scale == 0) throw UsageError("--scale must be positive");
  auto start = std::chrono::steady_clock::now();
  workflow::Dataset ds;
  if (o.positional == "social") {
    workflow::SocialParams p;
    p.scale = o.scale;
    p.seed = o.seed;
    ds = workflow::generate_social(p);
  } else {
    workflow::BusinessParams p;
    p.scale = o.scale;
    p.seed = o.seed;
    ds = workflow::generate_business(p);
  }
  fs::path out(o.out);
  fs::create_directories(out);
  if (o.format == "json")
    write_file(out / "dataset.json", database_to_json(ds.db).dump(1) + "\n");
  else
    workflow::write_csv_database(ds.db, out);
  write_file(out / "metadata.json", ds.metadata.dump(1) + "\n");
  std::cout << o.positional << " scale " << o.scale << " seed " << o.seed << ": " << ds.db.vertex_count()
            << " vertices, " << ds.db.edge_count() << " edges, " << ds.db.graph_count() << " graphs in "
            << seconds_since(start) << " s\n";
  return kOk;
}

int cmd_import(const Options& o) {
  if (o.positional.empty()) throw UsageError("import needs an input path (CSV directory or JSON file)");
  auto start = std::chrono::steady_clock::now();
  fs::path input(o.positional);
  if (o.format == "json" && fs::is_directory(input)) throw UsageError(input.string() + " is a directory, not JSON");
  if (o.format == "csv" && !fs::is_directory(input)) throw UsageError(input.string() + " is not a CSV directory");
  EpgmDatabase db = workflow::read_dataset(input);

  store::StoreConfig config;
  config.path = store_path(o);
  config.partitions = o.partitions;
  config.strategy = store::parse_strategy(o.partitioner);
  config.sync = store::SyncMode::Manual;
  if (config.strategy == store::PartitionStrategy::Range && !store::read_store_config(config.path)) {
    VertexId max_id = db.vertex_count() ? db.elements().vertices().rbegin()->first : 0;
    config.boundaries = store::Partitioner::range_for(o.partitions, max_id).boundaries();
  }
  store::GraphStore gs(config);
  gs.write_database(db);
  gs.flush();
  std::cout << "imported " << db.vertex_count() << " vertices, " << db.edge_count() << " edges, "
            << db.graph_count() << " graphs in " << seconds_since(start) << " s\n";
  return kOk;
}

int cmd_run(const Options& o) {
  std::string source = read_script(o.script);
  auto gs = store::GraphStore::open_existing(store_path(o));
  auto load_start = std::chrono::steady_clock::now();
  EpgmDatabase db = gs->load_database();
  std::cerr << "loaded " << db.vertex_count() << " vertices, " << db.edge_count() << " edges in "
            << seconds_since(load_start) << " s\n";
  workflow::WorkflowOptions options;
  options.inputs = o.inputs;
  options.hook = [](const grala::StatementTiming& t) { std::cerr << workflow::format_timing(t) << "\n"; };
  auto result = workflow::run_workflow(db, source, options);
  std::cerr << "total " << std::chrono::duration_cast<std::chrono::microseconds>(result.elapsed).count() << " us\n";

  for (const auto& name : o.persist) {
    auto it = result.bindings.find(name);
    if (it == result.bindings.end()) throw Error("cannot persist '" + name + "': no such binding");
    GraphCollection graphs;
    if (const auto* g = it->second.get<grala::GraphValue>()) graphs.push_back(g->graph);
    else if (const auto* c = it->second.get<grala::CollectionValue>()) graphs = c->graphs;
    else throw Error("cannot persist '" + name + "': it is a " + grala::type_name(it->second));
    for (const auto& g : graphs) std::cerr << "persisted " << name << " as graph " << gs->persist_graph(g) << "\n";
  }
  if (!o.persist.empty()) gs->sync();

  std::string format = o.format.empty() ? "json" : o.format;
  if (format != "json" && format != "dot") throw UsageError("run writes json or dot");
  if (!o.out.empty()) {
    for (const auto& [name, value] : result.bindings)
      if (is_result(value)) write_file(fs::path(o.out) / (name + "." + format), render(value, format));
    return kOk;
  }
  if (format == "dot") {
    for (const auto& [name, value] : result.bindings)
      if (is_result(value)) std::cout << "// " << name << "\n" << render(value, format);
    return kOk;
  }
  nlohmann::json out = nlohmann::json::object();
  for (const auto& [name, value] : result.bindings)
    if (is_result(value)) out[name] = workflow::value_to_json(value);
  std::cout << out.dump(2) << "\n";
  return kOk;
}

int cmd_export(const Options& o) {
  std::string format = o.format.empty() ? "json" : o.format;
  if (format != "json" && format != "dot") throw UsageError("export writes json or dot");
  auto gs = store::GraphStore::open_existing(store_path(o));
  grala::Value value;
  std::string name;
  if (o.graph) {
    auto g = gs->get_graph(*o.graph);
    if (!g) throw NotFoundError("graph " + std::to_string(*o.graph) + " does not exist");
    value = grala::GraphValue{*g, nullptr};
    name = "graph" + std::to_string(*o.graph);
  } else if (!o.binding.empty()) {
    EpgmDatabase db = gs->load_database();
    workflow::WorkflowOptions options;
    options.inputs = o.inputs;
    auto result = workflow::run_workflow(db, read_script(o.script), options);
    auto it = result.bindings.find(o.binding);
    if (it == result.bindings.end() || !is_result(it->second))
      throw NotFoundError("script binds no graph or collection named '" + o.binding + "'");
    value = it->second;
    name = o.binding;
  } else {
    throw UsageError("export needs --graph ID or --script FILE --binding NAME");
  }
  std::string text = render(value, format);
  if (o.out.empty())
    std::cout << text;
  else
    write_file(fs::path(o.out) / (name + "." + format), text);
  return kOk;
}

int cmd_stats(const Options& o) {
  auto gs = store::GraphStore::open_existing(store_path(o));
  auto s = gs->stats();
  std::cout << "vertices " << s.vertices << "\nedges " << s.edges << "\ngraphs " << s.graphs << "\n";
  std::cout << "partitioner " << store::strategy_name(gs->config().strategy) << " " << gs->config().partitions << "\n";
  for (size_t p = 0; p < s.partition_rows.size(); ++p) std::cout << "partition " << p << " " << s.partition_rows[p] << "\n";
  for (const auto& [label, count] : s.labels) std::cout << "label " << label << " " << count << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Extended property graph store and GrALa workflow runner"};
  app.require_subcommand(1);
  Options o;
  auto store_opt = [&](CLI::App* c) { c->add_option("--store", o.store, "Store directory (default $EPGM_STORE)"); };

  auto* generate = app.add_subcommand("generate", "Write a seeded synthetic dataset");
  generate->add_option("kind", o.positional, "social or business")->required();
  generate->add_option("--scale", o.scale, "Scale factor");
  generate->add_option("--seed", o.seed, "Random seed");
  generate->add_option("--out", o.out, "Output directory")->required();
  generate->add_option("--format", o.format, "csv (default) or json")->check(CLI::IsMember({"csv", "json"}));

  auto* import = app.add_subcommand("import", "Bulk load a CSV directory or JSON file into a store");
  import->add_option("input", o.positional, "Dataset directory or JSON file")->required();
  store_opt(import);
  import->add_option("--format", o.format, "csv or json (default: detect)")->check(CLI::IsMember({"csv", "json"}));
  import->add_option("--partitions", o.partitions, "Partition count")->check(CLI::Range(1, 65535));
  import->add_option("--partitioner", o.partitioner, "range or hash")->check(CLI::IsMember({"range", "hash"}));

  auto* run = app.add_subcommand("run", "Run a GrALa script against a store");
  store_opt(run);
  run->add_option("--script", o.script, "GrALa script")->required();
  run->add_option("--bind", o.inputs, "Bind the database graph to NAME (repeatable)");
  run->add_option("--persist", o.persist, "Persist the graph(s) bound to NAME (repeatable)");
  run->add_option("--format", o.format, "json (default) or dot")->check(CLI::IsMember({"json", "dot"}));
  run->add_option("--out", o.out, "Write one file per result binding into DIR");

  auto* exp = app.add_subcommand("export", "Export a stored graph or a script result");
  store_opt(exp);
  exp->add_option("--graph", o.graph, "Stored graph id");
  exp->add_option("--script", o.script, "GrALa script producing the binding");
  exp->add_option("--binding", o.binding, "Result binding to export");
  exp->add_option("--bind", o.inputs, "Bind the database graph to NAME (repeatable)");
  exp->add_option("--format", o.format, "json (default) or dot")->check(CLI::IsMember({"json", "dot"}));
  exp->add_option("--out", o.out, "Output directory");

  auto* stats = app.add_subcommand("stats", "Report store cardinalities");
  store_opt(stats);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? kOk : kUsageError;
  }

  try {
    if (generate->parsed()) return cmd_generate(o);
    if (import->parsed()) return cmd_import(o);
    if (run->parsed()) return cmd_run(o);
    if (exp->parsed()) return cmd_export(o);
    if (stats->parsed()) return cmd_stats(o);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsageError;
  } catch (const grala::ParseError& e) {
    std::cerr << (o.script.empty() ? "script" : o.script) << ":" << e.what() << "\n";
    return kUsageError;
  } catch (const grala::ScriptError& e) {
    std::cerr << (o.script.empty() ? "script" : o.script) << ":" << e.what() << "\n";
    return kRuntimeError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << ops::describe(e) << "\n";
    return kRuntimeError;
  }
  return kUsageError;
}
