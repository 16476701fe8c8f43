#pragma once

#include <chrono>
#include <functional>
#include <string>
#include <string_view>

#include "epgm/algorithms.hpp"
#include "epgm/grala/parser.hpp"
#include "epgm/grala/value.hpp"

namespace epgm::grala {

struct StatementTiming {
  size_t index = 0;
  /// Assigned variable, empty for an expression statement.
  std::string target;
  std::string source;
  std::chrono::nanoseconds elapsed{0};
};

using StatementHook = std::function<void(const StatementTiming&)>;

/// Tree-walking evaluator. Runtime failures raise ScriptError carrying the
/// position of the failing expression. Temporary graph ids come from a
/// sequence owned by the interpreter, so two interpreters running the same
/// script produce identical results.
class Interpreter {
 public:
  explicit Interpreter(const EpgmDatabase& db,
                       const algo::AlgorithmRegistry& registry = algo::AlgorithmRegistry::global());

  /// Binds a name in the global scope, e.g. the input graph of a workflow.
  void bind(const std::string& name, Value value);
  /// Binds `name` to the database graph.
  void bind_database_graph(const std::string& name);

  /// Evaluates every statement in order and returns the last value.
  Value run(const Script& script, std::string_view source = {}, const StatementHook& hook = {});
  Value run_source(std::string_view source, const StatementHook& hook = {});

  const Value* lookup(const std::string& name) const { return globals_->lookup(name); }
  const std::map<std::string, Value>& bindings() const { return globals_->bindings(); }

  /// The database graph shared by `db` and bound workflow inputs.
  const LogicalGraph& database_graph() const { return database_graph_; }

 private:
  const EpgmDatabase& db_;
  const algo::AlgorithmRegistry& registry_;
  LogicalGraph database_graph_;
  std::shared_ptr<Environment> globals_;
  uint64_t temporary_ids_ = kTemporaryIdBase;
};

}  // namespace epgm::grala
