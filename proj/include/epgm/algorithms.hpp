#pragma once

// Pluggable graph algorithms reachable from the call operators, plus the
// built-in community detection and business transaction extraction.

#include <functional>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>

#include "epgm/model.hpp"

namespace epgm::algo {

using Params = std::map<std::string, std::string, std::less<>>;
using AlgorithmValue = std::variant<LogicalGraph, GraphCollection>;
using AlgorithmFunction = std::function<AlgorithmValue(const AlgorithmValue& input, const Params& params)>;

enum class Arity { Graph, Collection };

struct RegisteredAlgorithm {
  AlgorithmFunction function;
  Arity arity;
};

class AlgorithmRegistry {
 public:
  /// Throws Error when the symbol is taken.
  void register_algorithm(std::string symbol, AlgorithmFunction function, Arity arity);
  /// Throws NotFoundError for an unknown symbol.
  const RegisteredAlgorithm& lookup(std::string_view symbol) const;
  bool contains(std::string_view symbol) const { return entries_.find(symbol) != entries_.end(); }
  std::vector<std::string> symbols() const;

  /// A registry holding LabelPropagation, CommunityDetection and
  /// BusinessTransactionGraphs.
  static AlgorithmRegistry with_builtins();
  /// Process-wide registry used when none is supplied.
  static AlgorithmRegistry& global();

 private:
  std::map<std::string, RegisteredAlgorithm, std::less<>> entries_;
};

/// Collections handed to a single-graph algorithm are combined first.
LogicalGraph as_single_graph(const AlgorithmValue& input);

struct LabelPropagationParams {
  std::string property_key = "community";
  int max_iterations = 20;

  static LabelPropagationParams from(const Params& params);
};

struct LabelPropagationResult {
  LogicalGraph graph;
  int iterations = 0;
  bool converged = false;
};

/// Synchronous label propagation on the undirected view of `graph`. Every
/// vertex starts with its own id, then adopts the most frequent label among
/// its neighbours (smallest label on ties). Loops are ignored, parallel edges
/// count once each. The result lives in a new element space.
LabelPropagationResult label_propagation_run(const LogicalGraph& graph, const LabelPropagationParams& params);
LogicalGraph label_propagation(const LogicalGraph& graph, const LabelPropagationParams& params);

/// One graph per distinct value of `vertex_key`, holding the group's vertices
/// and the edges internal to it, ordered by first appearance in vertex-id
/// order. Each graph stores the value under `graph_key`.
GraphCollection community_split(const LogicalGraph& graph, std::string_view vertex_key, const std::string& graph_key);

struct BtgParams {
  std::set<std::string, std::less<>> transactional_labels{"SalesQuotation", "SalesOrder", "SalesInvoice", "PurchOrder",
                                                          "DeliveryNote"};
  std::set<std::string, std::less<>> master_labels{"Customer", "Vendor", "Employee", "Product"};

  /// Accepts comma separated `transactional` and `master` overrides.
  static BtgParams from(const Params& params);
};

/// Connected components over transactional vertices (direction ignored), each
/// extended by its adjacent master vertices and the connecting edges. Ordered
/// by smallest transactional vertex id.
GraphCollection btg_extract(const LogicalGraph& graph, const BtgParams& params);

}  // namespace epgm::algo

namespace epgm::ops {

/// Runs a registered algorithm that yields a single graph.
LogicalGraph call_for_graph(const algo::AlgorithmValue& input, std::string_view symbol, const algo::Params& params,
                            const algo::AlgorithmRegistry& registry = algo::AlgorithmRegistry::global());
/// Runs a registered algorithm that yields a collection.
GraphCollection call_for_collection(const algo::AlgorithmValue& input, std::string_view symbol,
                                    const algo::Params& params,
                                    const algo::AlgorithmRegistry& registry = algo::AlgorithmRegistry::global());

}  // namespace epgm::ops
