#pragma once

// Pattern graphs written in ASCII syntax and predicate-filtered subgraph
// isomorphism over a logical graph.
//
//   pattern := vertex (edge vertex)*
//   vertex  := "(" ident ")"
//   edge    := "-" ident "->" | "<-" ident "-"

#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "epgm/model.hpp"

namespace epgm::pattern {

struct PatternEdge {
  std::string name;
  std::string source;
  std::string target;

  bool operator==(const PatternEdge&) const = default;
};

struct PatternGraph {
  /// Distinct vertex variables in order of first appearance.
  std::vector<std::string> vertices;
  std::vector<PatternEdge> edges;

  bool operator==(const PatternGraph&) const = default;
};

struct Embedding {
  std::map<std::string, VertexId, std::less<>> vertices;
  std::map<std::string, EdgeId, std::less<>> edges;
};

/// Receives the matched subgraph and the variable bindings that produced it.
using BindingPredicate = std::function<bool(const LogicalGraph& subgraph, const Embedding& embedding)>;

class PatternSyntaxError : public Error {
 public:
  PatternSyntaxError(const std::string& what, size_t position) : Error(what), position_(position) {}
  size_t position() const { return position_; }

 private:
  size_t position_;
};

PatternGraph parse_pattern(std::string_view text);

/// Renders a pattern back to its ASCII form. Chains print as one parseable
/// string; other shapes fall back to one chain per edge.
std::string to_string(const PatternGraph& pattern);

/// Every vertex- and edge-injective, non-induced embedding of `pattern` into
/// `graph`, in search order.
std::vector<Embedding> enumerate_embeddings(const LogicalGraph& graph, const PatternGraph& pattern);

/// Subgraphs spanned by embeddings that satisfy `predicate`, duplicate-free by
/// element sets and ordered by (vertex ids, edge ids). A null predicate
/// accepts everything.
GraphCollection match_pattern(const LogicalGraph& graph, const PatternGraph& pattern,
                              const BindingPredicate& predicate);

}  // namespace epgm::pattern
