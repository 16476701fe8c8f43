#include "epgm/model.hpp"

#include <algorithm>
#include <atomic>
#include <set>

namespace epgm {

IdSet make_id_set(std::vector<uint64_t> ids) {
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

bool id_set_contains(const IdSet& set, uint64_t id) {
  return std::binary_search(set.begin(), set.end(), id);
}

void id_set_insert(IdSet& set, uint64_t id) {
  auto it = std::lower_bound(set.begin(), set.end(), id);
  if (it == set.end() || *it != id) set.insert(it, id);
}

void id_set_erase(IdSet& set, uint64_t id) {
  auto it = std::lower_bound(set.begin(), set.end(), id);
  if (it != set.end() && *it == id) set.erase(it);
}

IdSet id_set_union(const IdSet& a, const IdSet& b) {
  IdSet out;
  out.reserve(a.size() + b.size());
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IdSet id_set_intersection(const IdSet& a, const IdSet& b) {
  IdSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IdSet id_set_difference(const IdSet& a, const IdSet& b) {
  IdSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

// ElementSpace

const Vertex* ElementSpace::find_vertex(VertexId id) const {
  auto it = vertices_.find(id);
  return it == vertices_.end() ? nullptr : &it->second;
}

const Edge* ElementSpace::find_edge(EdgeId id) const {
  auto it = edges_.find(id);
  return it == edges_.end() ? nullptr : &it->second;
}

const Vertex& ElementSpace::vertex(VertexId id) const {
  if (auto* v = find_vertex(id)) return *v;
  throw NotFoundError("unknown vertex " + std::to_string(id));
}

const Edge& ElementSpace::edge(EdgeId id) const {
  if (auto* e = find_edge(id)) return *e;
  throw NotFoundError("unknown edge " + std::to_string(id));
}

Vertex& ElementSpace::mutable_vertex(VertexId id) {
  auto it = vertices_.find(id);
  if (it == vertices_.end()) throw NotFoundError("unknown vertex " + std::to_string(id));
  return it->second;
}

Edge& ElementSpace::mutable_edge(EdgeId id) {
  auto it = edges_.find(id);
  if (it == edges_.end()) throw NotFoundError("unknown edge " + std::to_string(id));
  return it->second;
}

void ElementSpace::put_vertex(Vertex v) {
  auto id = v.id;
  vertices_.insert_or_assign(id, std::move(v));
}

void ElementSpace::put_edge(Edge e) {
  auto id = e.id;
  edges_.insert_or_assign(id, std::move(e));
}

// LogicalGraph

std::vector<const Vertex*> LogicalGraph::vertices() const {
  std::vector<const Vertex*> out;
  out.reserve(vertex_ids.size());
  for (auto id : vertex_ids) out.push_back(&space->vertex(id));
  return out;
}

std::vector<const Edge*> LogicalGraph::edges() const {
  std::vector<const Edge*> out;
  out.reserve(edge_ids.size());
  for (auto id : edge_ids) out.push_back(&space->edge(id));
  return out;
}

void LogicalGraph::check_closure() const {
  for (auto id : edge_ids) {
    const Edge& e = space->edge(id);
    if (!contains_vertex(e.source) || !contains_vertex(e.target)) {
      throw ClosureError("edge " + std::to_string(id) + " has an endpoint outside the graph", id);
    }
  }
}

// Temporary ids

namespace {

std::atomic<uint64_t> g_temporary_counter{kTemporaryIdBase};
thread_local uint64_t* t_scoped_counter = nullptr;

}  // namespace

GraphId next_temporary_graph_id() {
  if (t_scoped_counter) return (*t_scoped_counter)++;
  return g_temporary_counter.fetch_add(1);
}

TemporaryIdScope::TemporaryIdScope() : previous_(t_scoped_counter) { t_scoped_counter = &counter_; }

TemporaryIdScope::TemporaryIdScope(uint64_t& counter) : previous_(t_scoped_counter) { t_scoped_counter = &counter; }

TemporaryIdScope::~TemporaryIdScope() { t_scoped_counter = previous_; }

// EpgmDatabase

EpgmDatabase::EpgmDatabase() : space_(std::make_shared<ElementSpace>()) {}

ElementSpace& EpgmDatabase::mutable_space() {
  // Outstanding snapshots keep their copy.
  if (space_.use_count() > 1) space_ = std::make_shared<ElementSpace>(*space_);
  return *space_;
}

EpgmDatabase::StoredGraph& EpgmDatabase::stored_graph(GraphId id) {
  auto it = graphs_.find(id);
  if (it == graphs_.end()) throw NotFoundError("unknown graph " + std::to_string(id));
  return it->second;
}

VertexId EpgmDatabase::add_vertex(std::string label, Properties props) {
  Vertex v;
  v.id = next_vertex_id_;
  v.label = std::move(label);
  v.properties = std::move(props);
  insert_vertex(std::move(v));
  return next_vertex_id_ - 1;
}

EdgeId EpgmDatabase::add_edge(VertexId source, VertexId target, std::string label, Properties props) {
  auto& space = mutable_space();
  if (!space.find_vertex(source)) throw NotFoundError("edge source vertex " + std::to_string(source) + " does not exist");
  if (!space.find_vertex(target)) throw NotFoundError("edge target vertex " + std::to_string(target) + " does not exist");
  Vertex& src = space.mutable_vertex(source);
  Edge e;
  e.id = next_edge_id_;
  e.source = source;
  e.target = target;
  e.index = src.next_edge_index++;
  e.label = std::move(label);
  e.properties = std::move(props);
  declare_label(e.label);
  space.put_edge(std::move(e));
  return next_edge_id_++;
}

void EpgmDatabase::insert_vertex(Vertex v) {
  auto& space = mutable_space();
  if (space.find_vertex(v.id)) throw OperatorError("duplicate vertex id " + std::to_string(v.id));
  next_vertex_id_ = std::max(next_vertex_id_, v.id + 1);
  v.graph_ids.clear();
  declare_label(v.label);
  space.put_vertex(std::move(v));
}

void EpgmDatabase::insert_edge(Edge e) {
  auto& space = mutable_space();
  if (space.find_edge(e.id)) throw OperatorError("duplicate edge id " + std::to_string(e.id));
  if (!space.find_vertex(e.source)) throw NotFoundError("edge source vertex " + std::to_string(e.source) + " does not exist");
  if (!space.find_vertex(e.target)) throw NotFoundError("edge target vertex " + std::to_string(e.target) + " does not exist");
  Vertex& src = space.mutable_vertex(e.source);
  src.next_edge_index = std::max(src.next_edge_index, e.index + 1);
  next_edge_id_ = std::max(next_edge_id_, e.id + 1);
  e.graph_ids.clear();
  declare_label(e.label);
  space.put_edge(std::move(e));
}

void EpgmDatabase::insert_graph(GraphHead head, std::vector<VertexId> vertex_ids, std::vector<EdgeId> edge_ids) {
  if (graphs_.count(head.id)) throw OperatorError("duplicate graph id " + std::to_string(head.id));
  StoredGraph g{std::move(head), make_id_set(std::move(vertex_ids)), make_id_set(std::move(edge_ids))};
  const ElementSpace& space = *space_;
  for (auto v : g.vertex_ids) space.vertex(v);
  for (auto eid : g.edge_ids) {
    const Edge& e = space.edge(eid);
    if (!id_set_contains(g.vertex_ids, e.source) || !id_set_contains(g.vertex_ids, e.target)) {
      throw ClosureError("edge " + std::to_string(eid) + " has an endpoint outside the graph's vertex set", eid);
    }
  }
  auto& mspace = mutable_space();
  GraphId gid = g.head.id;
  for (auto v : g.vertex_ids) id_set_insert(mspace.mutable_vertex(v).graph_ids, gid);
  for (auto e : g.edge_ids) id_set_insert(mspace.mutable_edge(e).graph_ids, gid);
  next_graph_id_ = std::max(next_graph_id_, gid + 1);
  declare_label(g.head.label);
  graphs_.emplace(gid, std::move(g));
}

GraphId EpgmDatabase::create_logical_graph(std::string label, Properties props, std::vector<VertexId> vertex_ids,
                                           std::vector<EdgeId> edge_ids) {
  GraphId id = next_graph_id_;
  insert_graph(GraphHead{id, std::move(label), std::move(props)}, std::move(vertex_ids), std::move(edge_ids));
  return id;
}

GraphId EpgmDatabase::persist(const LogicalGraph& graph, std::optional<std::string> label) {
  for (auto v : graph.vertex_ids) {
    if (!space_->find_vertex(v)) throw NotFoundError("cannot persist: vertex " + std::to_string(v) + " is not in the database");
  }
  for (auto e : graph.edge_ids) {
    if (!space_->find_edge(e)) throw NotFoundError("cannot persist: edge " + std::to_string(e) + " is not in the database");
  }
  return create_logical_graph(label.value_or(graph.head.label), graph.head.properties,
                              graph.vertex_ids, graph.edge_ids);
}

LogicalGraph EpgmDatabase::database_graph() const {
  LogicalGraph g;
  g.head.id = next_temporary_graph_id();
  g.head.label = "Database";
  g.space = space_;
  g.vertex_ids.reserve(space_->vertices().size());
  for (const auto& [id, _] : space_->vertices()) g.vertex_ids.push_back(id);
  g.edge_ids.reserve(space_->edges().size());
  for (const auto& [id, _] : space_->edges()) g.edge_ids.push_back(id);
  return g;
}

LogicalGraph EpgmDatabase::graph(GraphId id) const {
  auto it = graphs_.find(id);
  if (it == graphs_.end()) throw NotFoundError("unknown graph " + std::to_string(id));
  return LogicalGraph{it->second.head, it->second.vertex_ids, it->second.edge_ids, space_};
}

GraphCollection EpgmDatabase::graphs() const {
  GraphCollection out;
  out.reserve(graphs_.size());
  for (const auto& [id, _] : graphs_) out.push_back(graph(id));
  return out;
}

std::vector<GraphId> EpgmDatabase::graph_ids() const {
  std::vector<GraphId> out;
  for (const auto& [id, _] : graphs_) out.push_back(id);
  return out;
}

void EpgmDatabase::declare_label(const std::string& label) {
  if (std::find(labels_.begin(), labels_.end(), label) == labels_.end()) labels_.push_back(label);
}

std::optional<PropertyValue> EpgmDatabase::vertex_property(VertexId id, std::string_view key) const {
  return find_property(space_->vertex(id).properties, key);
}

std::optional<PropertyValue> EpgmDatabase::edge_property(EdgeId id, std::string_view key) const {
  return find_property(space_->edge(id).properties, key);
}

std::optional<PropertyValue> EpgmDatabase::graph_property(GraphId id, std::string_view key) const {
  auto it = graphs_.find(id);
  if (it == graphs_.end()) throw NotFoundError("unknown graph " + std::to_string(id));
  return find_property(it->second.head.properties, key);
}

void EpgmDatabase::set_vertex_property(VertexId id, const std::string& key, PropertyValue value) {
  mutable_space().mutable_vertex(id).properties.insert_or_assign(key, std::move(value));
}

void EpgmDatabase::set_edge_property(EdgeId id, const std::string& key, PropertyValue value) {
  mutable_space().mutable_edge(id).properties.insert_or_assign(key, std::move(value));
}

void EpgmDatabase::set_graph_property(GraphId id, const std::string& key, PropertyValue value) {
  stored_graph(id).head.properties.insert_or_assign(key, std::move(value));
}

std::vector<std::string> EpgmDatabase::validate() const {
  std::vector<std::string> problems;
  const auto& space = *space_;
  std::set<std::pair<VertexId, uint32_t>> seen_index;
  for (const auto& [id, e] : space.edges()) {
    if (!space.find_vertex(e.source) || !space.find_vertex(e.target)) {
      problems.push_back("edge " + std::to_string(id) + " has a dangling endpoint");
      continue;
    }
    if (!seen_index.insert({e.source, e.index}).second) {
      problems.push_back("edge " + std::to_string(id) + " repeats index " + std::to_string(e.index) +
                         " at vertex " + std::to_string(e.source));
    }
    if (e.index >= space.vertex(e.source).next_edge_index) {
      problems.push_back("edge " + std::to_string(id) + " index is not below the source counter");
    }
  }
  for (const auto& [gid, g] : graphs_) {
    for (auto eid : g.edge_ids) {
      const Edge* e = space.find_edge(eid);
      if (!e) {
        problems.push_back("graph " + std::to_string(gid) + " references missing edge " + std::to_string(eid));
        continue;
      }
      if (!id_set_contains(g.vertex_ids, e->source) || !id_set_contains(g.vertex_ids, e->target)) {
        problems.push_back("graph " + std::to_string(gid) + " is not closed over edge " + std::to_string(eid));
      }
      if (!id_set_contains(e->graph_ids, gid)) {
        problems.push_back("edge " + std::to_string(eid) + " does not list graph " + std::to_string(gid));
      }
    }
    for (auto vid : g.vertex_ids) {
      const Vertex* v = space.find_vertex(vid);
      if (!v) {
        problems.push_back("graph " + std::to_string(gid) + " references missing vertex " + std::to_string(vid));
      } else if (!id_set_contains(v->graph_ids, gid)) {
        problems.push_back("vertex " + std::to_string(vid) + " does not list graph " + std::to_string(gid));
      }
    }
  }
  for (const auto& [vid, v] : space.vertices()) {
    for (auto gid : v.graph_ids) {
      auto it = graphs_.find(gid);
      if (it == graphs_.end() || !id_set_contains(it->second.vertex_ids, vid)) {
        problems.push_back("vertex " + std::to_string(vid) + " claims membership in graph " + std::to_string(gid));
      }
    }
  }
  for (const auto& [eid, e] : space.edges()) {
    for (auto gid : e.graph_ids) {
      auto it = graphs_.find(gid);
      if (it == graphs_.end() || !id_set_contains(it->second.edge_ids, eid)) {
        problems.push_back("edge " + std::to_string(eid) + " claims membership in graph " + std::to_string(gid));
      }
    }
  }
  return problems;
}

}  // namespace epgm
