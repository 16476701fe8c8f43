#pragma once

// The analytical operator algebra over logical graphs and graph collections.
// All operators are pure: inputs are never modified and results are
// unpersisted graphs carrying temporary ids (aggregate keeps its input id).

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "epgm/model.hpp"

namespace epgm::ops {

using GraphPredicate = std::function<bool(const LogicalGraph&)>;
using AggregateFunction = std::function<PropertyValue(const LogicalGraph&)>;
using UnaryGraphOperator = std::function<LogicalGraph(const LogicalGraph&)>;
using BinaryGraphOperator = std::function<LogicalGraph(const LogicalGraph&, const LogicalGraph&)>;

enum class SortOrder { Ascending, Descending };

// Collection operators ------------------------------------------------------

GraphCollection select(const GraphCollection& collection, const GraphPredicate& predicate);
/// Keeps the first occurrence of every graph id.
GraphCollection distinct(const GraphCollection& collection);
/// Stable sort on a graph property. Graphs without the property go last.
/// Mixing strings with numbers is an error.
GraphCollection sort_by(const GraphCollection& collection, std::string_view key, SortOrder order);
GraphCollection top(const GraphCollection& collection, size_t n);

// Set operators compare graphs by id; results are duplicate-free and keep
// first-operand order.
GraphCollection union_collections(const GraphCollection& a, const GraphCollection& b);
GraphCollection intersect_collections(const GraphCollection& a, const GraphCollection& b);
GraphCollection difference_collections(const GraphCollection& a, const GraphCollection& b);

// Binary graph operators ------------------------------------------------------

LogicalGraph combine(const LogicalGraph& a, const LogicalGraph& b);
LogicalGraph overlap(const LogicalGraph& a, const LogicalGraph& b);
/// Vertices of `a` not in `b`, and the edges of `a` whose endpoints both
/// survive.
LogicalGraph exclude(const LogicalGraph& a, const LogicalGraph& b);

// Aggregation -----------------------------------------------------------------

LogicalGraph aggregate(const LogicalGraph& graph, const std::string& key, const AggregateFunction& fn);

/// Values of `key` over the elements that have it, in element order.
template <class Element>
std::vector<PropertyValue> values(std::span<const Element* const> elements, std::string_view key) {
  std::vector<PropertyValue> out;
  for (const Element* e : elements) {
    if (auto it = e->properties.find(key); it != e->properties.end()) out.push_back(it->second);
  }
  return out;
}

/// int64 when every value is an integer, float64 otherwise. Empty sums to 0.
PropertyValue sum(std::span<const PropertyValue> values);
/// Throws OperatorError for an empty input.
double average(std::span<const PropertyValue> values);

template <class Element>
int64_t count(std::span<const Element* const> elements) {
  return static_cast<int64_t>(elements.size());
}

template <class Element>
PropertyValue sum(std::span<const Element* const> elements, std::string_view key) {
  auto v = values(elements, key);
  return sum(std::span<const PropertyValue>(v));
}

template <class Element>
double average(std::span<const Element* const> elements, std::string_view key) {
  auto v = values(elements, key);
  return average(std::span<const PropertyValue>(v));
}

// Projection ----------------------------------------------------------------

/// May rewrite labels and properties. Ids and endpoints must be preserved.
struct ProjectionFunctions {
  std::function<Vertex(const Vertex&)> vertex;
  std::function<Edge(const Edge&)> edge;
};

LogicalGraph project(const LogicalGraph& graph, const ProjectionFunctions& functions);

// Summarization -------------------------------------------------------------

struct GroupingKeys {
  /// Group by type label as well.
  bool by_label = false;
  std::vector<std::string> property_keys;
};

using VertexAggregator = std::function<void(Vertex& summary, std::span<const Vertex* const> members)>;
using EdgeAggregator = std::function<void(Edge& summary, std::span<const Edge* const> members)>;

struct SummarizationSpec {
  GroupingKeys vertex_keys;
  GroupingKeys edge_keys;
  VertexAggregator vertex_aggregator;
  EdgeAggregator edge_aggregator;
};

/// One summary vertex per distinct vertex grouping tuple (missing keys form
/// their own group), one summary edge per (source group, target group, edge
/// grouping tuple). Grouping values are copied onto the summary elements.
/// The result lives in a fresh element space.
LogicalGraph summarize(const LogicalGraph& graph, const SummarizationSpec& spec);

/// Aggregator storing the member count under `key`.
VertexAggregator count_vertices_into(std::string key);
EdgeAggregator count_edges_into(std::string key);

// Auxiliary -----------------------------------------------------------------

GraphCollection apply(const GraphCollection& collection, const UnaryGraphOperator& op);
/// Strict left fold. Throws OperatorError on an empty collection.
LogicalGraph reduce(const GraphCollection& collection, const BinaryGraphOperator& op);
/// Same element sets as reduce(collection, combine) in one pass.
LogicalGraph combine_all(const GraphCollection& collection);
/// Same element sets as reduce(collection, overlap) in one pass.
LogicalGraph overlap_all(const GraphCollection& collection);

/// Flattens nested exception messages into one line.
std::string describe(const std::exception& e);

}  // namespace epgm::ops
