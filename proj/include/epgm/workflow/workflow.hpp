#pragma once

// Workflow execution and result emission: runs a GrALa script against a
// database, and renders bound graphs and collections as JSON or DOT.

#include <chrono>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "epgm/grala/interpreter.hpp"
#include "epgm/model.hpp"
#include "json.hpp"

namespace epgm::workflow {

struct WorkflowOptions {
  /// Names bound to the database graph before the script runs.
  std::vector<std::string> inputs;
  /// Called after every statement.
  grala::StatementHook hook;
};

struct WorkflowResult {
  std::vector<grala::StatementTiming> timings;
  /// Final global bindings, inputs excluded.
  std::map<std::string, grala::Value> bindings;
  std::chrono::nanoseconds elapsed{0};
};

/// Parses and runs `source`. Throws grala::ParseError or grala::ScriptError.
WorkflowResult run_workflow(const EpgmDatabase& db, std::string_view source, const WorkflowOptions& options = {});

/// `path` is a JSON file or a CSV dataset directory.
EpgmDatabase read_dataset(const std::filesystem::path& path);

/// Graphs and collections become the fixture JSON schema, scalars plain
/// JSON values, anything else its description string.
nlohmann::json value_to_json(const grala::Value& value);

/// One digraph; vertices are rendered as `label\n{key=value,...}` nodes.
std::string graph_to_dot(const LogicalGraph& graph);
/// One digraph per member graph.
std::string collection_to_dot(const GraphCollection& collection);

/// Timing line as printed by `epgm run`: index, target, microseconds.
std::string format_timing(const grala::StatementTiming& timing);

}  // namespace epgm::workflow
