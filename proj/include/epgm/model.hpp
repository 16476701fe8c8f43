#pragma once

// In-memory EPGM database: a shared vertex space, a shared edge space and a
// set of (possibly overlapping) logical graphs. Every element carries a type
// label and schema-free properties.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "epgm/property.hpp"

namespace epgm {

using VertexId = uint64_t;
using EdgeId = uint64_t;
using GraphId = uint64_t;

/// Sorted, duplicate-free id list.
using IdSet = std::vector<uint64_t>;

IdSet make_id_set(std::vector<uint64_t> ids);
bool id_set_contains(const IdSet& set, uint64_t id);
void id_set_insert(IdSet& set, uint64_t id);
void id_set_erase(IdSet& set, uint64_t id);
IdSet id_set_union(const IdSet& a, const IdSet& b);
IdSet id_set_intersection(const IdSet& a, const IdSet& b);
IdSet id_set_difference(const IdSet& a, const IdSet& b);

struct Vertex {
  VertexId id = 0;
  std::string label;
  Properties properties;
  IdSet graph_ids;
  /// Next per-source edge index (the store's `idx` column).
  uint32_t next_edge_index = 0;

  bool operator==(const Vertex&) const = default;
};

struct Edge {
  EdgeId id = 0;
  VertexId source = 0;
  VertexId target = 0;
  /// Unique per source vertex; distinguishes parallel edges.
  uint32_t index = 0;
  std::string label;
  Properties properties;
  IdSet graph_ids;

  bool operator==(const Edge&) const = default;
};

struct GraphHead {
  GraphId id = 0;
  std::string label;
  Properties properties;

  bool operator==(const GraphHead&) const = default;
};

/// Owns vertex and edge records. Logical graphs refer to one space; two
/// graphs are only combinable when they share it.
class ElementSpace {
 public:
  const Vertex* find_vertex(VertexId id) const;
  const Edge* find_edge(EdgeId id) const;
  const Vertex& vertex(VertexId id) const;
  const Edge& edge(EdgeId id) const;

  Vertex& mutable_vertex(VertexId id);
  Edge& mutable_edge(EdgeId id);

  void put_vertex(Vertex v);
  void put_edge(Edge e);

  const std::map<VertexId, Vertex>& vertices() const { return vertices_; }
  const std::map<EdgeId, Edge>& edges() const { return edges_; }

 private:
  std::map<VertexId, Vertex> vertices_;
  std::map<EdgeId, Edge> edges_;
};

/// A logical graph as an immutable value: head plus member id sets over a
/// shared element space.
struct LogicalGraph {
  GraphHead head;
  IdSet vertex_ids;
  IdSet edge_ids;
  std::shared_ptr<const ElementSpace> space;

  const Vertex& vertex(VertexId id) const { return space->vertex(id); }
  const Edge& edge(EdgeId id) const { return space->edge(id); }
  std::vector<const Vertex*> vertices() const;
  std::vector<const Edge*> edges() const;

  bool contains_vertex(VertexId id) const { return id_set_contains(vertex_ids, id); }
  bool contains_edge(EdgeId id) const { return id_set_contains(edge_ids, id); }

  /// Throws ClosureError when an edge endpoint is not a member vertex.
  void check_closure() const;
};

/// Ordered; may contain the same graph more than once.
using GraphCollection = std::vector<LogicalGraph>;

/// Ids at or above this value denote unpersisted operator results.
inline constexpr GraphId kTemporaryIdBase = GraphId{1} << 63;
inline bool is_temporary(GraphId id) { return id >= kTemporaryIdBase; }

/// Draws a fresh temporary graph id. Inside a TemporaryIdScope the sequence
/// restarts at kTemporaryIdBase, so scripted runs are reproducible.
GraphId next_temporary_graph_id();

class TemporaryIdScope {
 public:
  TemporaryIdScope();
  /// Continues an externally owned sequence, e.g. across several runs of
  /// one interpreter.
  explicit TemporaryIdScope(uint64_t& counter);
  ~TemporaryIdScope();
  TemporaryIdScope(const TemporaryIdScope&) = delete;
  TemporaryIdScope& operator=(const TemporaryIdScope&) = delete;

 private:
  uint64_t counter_ = kTemporaryIdBase;
  uint64_t* previous_;
};

class EpgmDatabase {
 public:
  EpgmDatabase();

  VertexId add_vertex(std::string label, Properties props = {});
  /// Throws NotFoundError on a dangling endpoint.
  EdgeId add_edge(VertexId source, VertexId target, std::string label, Properties props = {});
  /// Throws ClosureError naming the first edge whose endpoint is missing.
  GraphId create_logical_graph(std::string label, Properties props, std::vector<VertexId> vertex_ids,
                               std::vector<EdgeId> edge_ids);

  /// Bulk-load entry points keeping caller supplied ids. Membership sets on
  /// the elements are maintained by insert_graph.
  void insert_vertex(Vertex v);
  void insert_edge(Edge e);
  void insert_graph(GraphHead head, std::vector<VertexId> vertex_ids, std::vector<EdgeId> edge_ids);

  /// Materializes an operator result (over this database's elements) as a
  /// new logical graph and returns its id.
  GraphId persist(const LogicalGraph& graph, std::optional<std::string> label = std::nullopt);

  size_t vertex_count() const { return space_->vertices().size(); }
  size_t edge_count() const { return space_->edges().size(); }
  size_t graph_count() const { return graphs_.size(); }

  /// The graph of all vertices and edges. Not part of the graph set.
  LogicalGraph database_graph() const;
  LogicalGraph graph(GraphId id) const;
  bool has_graph(GraphId id) const { return graphs_.count(id) != 0; }
  /// All logical graphs in id order (the script's `db.G`).
  GraphCollection graphs() const;
  std::vector<GraphId> graph_ids() const;

  const Vertex& vertex(VertexId id) const { return space_->vertex(id); }
  const Edge& edge(EdgeId id) const { return space_->edge(id); }
  const ElementSpace& elements() const { return *space_; }

  /// Type-label alphabet in first-use order. Labels may be declared ahead of
  /// use to fix their order.
  const std::vector<std::string>& labels() const { return labels_; }
  void declare_label(const std::string& label);

  std::optional<PropertyValue> vertex_property(VertexId id, std::string_view key) const;
  std::optional<PropertyValue> edge_property(EdgeId id, std::string_view key) const;
  std::optional<PropertyValue> graph_property(GraphId id, std::string_view key) const;
  void set_vertex_property(VertexId id, const std::string& key, PropertyValue value);
  void set_edge_property(EdgeId id, const std::string& key, PropertyValue value);
  void set_graph_property(GraphId id, const std::string& key, PropertyValue value);

  /// Immutable view of the current element space. Later mutations copy.
  std::shared_ptr<const ElementSpace> snapshot() const { return space_; }

  /// Audits closure, membership symmetry and parallel-edge identity.
  /// Returns human readable violations; empty when consistent.
  std::vector<std::string> validate() const;

 private:
  struct StoredGraph {
    GraphHead head;
    IdSet vertex_ids;
    IdSet edge_ids;
  };

  ElementSpace& mutable_space();
  StoredGraph& stored_graph(GraphId id);

  std::shared_ptr<ElementSpace> space_;
  std::map<GraphId, StoredGraph> graphs_;
  std::vector<std::string> labels_;
  VertexId next_vertex_id_ = 0;
  EdgeId next_edge_id_ = 0;
  GraphId next_graph_id_ = 0;
};

}  // namespace epgm
