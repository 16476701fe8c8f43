#include "epgm/operators.hpp"

#include <algorithm>
#include <exception>
#include <map>
#include <optional>
#include <unordered_set>

namespace epgm::ops {

namespace {

void require_same_space(const LogicalGraph& a, const LogicalGraph& b, const char* op) {
  if (a.space != b.space) {
    throw OperatorError(std::string(op) + ": graphs " + std::to_string(a.head.id) + " and " +
                        std::to_string(b.head.id) + " belong to different databases");
  }
}

LogicalGraph fresh_graph(const std::shared_ptr<const ElementSpace>& space, IdSet vertices, IdSet edges) {
  LogicalGraph g;
  g.head.id = next_temporary_graph_id();
  g.vertex_ids = std::move(vertices);
  g.edge_ids = std::move(edges);
  g.space = space;
  return g;
}

}  // namespace

std::string describe(const std::exception& e) {
  std::string out = e.what();
  try {
    std::rethrow_if_nested(e);
  } catch (const std::exception& inner) {
    out += ": " + describe(inner);
  } catch (...) {
  }
  return out;
}

GraphCollection select(const GraphCollection& collection, const GraphPredicate& predicate) {
  GraphCollection out;
  for (const auto& g : collection) {
    bool keep = false;
    try {
      keep = predicate(g);
    } catch (...) {
      std::throw_with_nested(OperatorError("select: predicate failed on graph " + std::to_string(g.head.id)));
    }
    if (keep) out.push_back(g);
  }
  return out;
}

GraphCollection distinct(const GraphCollection& collection) {
  GraphCollection out;
  std::unordered_set<GraphId> seen;
  for (const auto& g : collection) {
    if (seen.insert(g.head.id).second) out.push_back(g);
  }
  return out;
}

GraphCollection sort_by(const GraphCollection& collection, std::string_view key, SortOrder order) {
  struct Keyed {
    std::optional<PropertyValue> key;
    size_t position;
  };
  std::vector<Keyed> keyed;
  keyed.reserve(collection.size());
  for (size_t i = 0; i < collection.size(); ++i) {
    keyed.push_back({find_property(collection[i].head.properties, key), i});
  }
  // Check comparability up front so the comparator itself never throws.
  const Keyed* first_present = nullptr;
  for (const auto& k : keyed) {
    if (!k.key) continue;
    if (!first_present) {
      first_present = &k;
      continue;
    }
    try {
      compare_values(*first_present->key, *k.key);
    } catch (const TypeError&) {
      throw OperatorError("sortBy: property '" + std::string(key) + "' of graph " +
                          std::to_string(collection[first_present->position].head.id) +
                          " is not comparable with that of graph " + std::to_string(collection[k.position].head.id));
    }
  }
  std::stable_sort(keyed.begin(), keyed.end(), [order](const Keyed& a, const Keyed& b) {
    if (!a.key || !b.key) return a.key.has_value() && !b.key.has_value();
    auto c = compare_values(*a.key, *b.key);
    return order == SortOrder::Ascending ? c < 0 : c > 0;
  });
  GraphCollection out;
  out.reserve(collection.size());
  for (const auto& k : keyed) out.push_back(collection[k.position]);
  return out;
}

GraphCollection top(const GraphCollection& collection, size_t n) {
  n = std::min(n, collection.size());
  return GraphCollection(collection.begin(), collection.begin() + static_cast<std::ptrdiff_t>(n));
}

GraphCollection union_collections(const GraphCollection& a, const GraphCollection& b) {
  GraphCollection out = distinct(a);
  std::unordered_set<GraphId> seen;
  for (const auto& g : out) seen.insert(g.head.id);
  for (const auto& g : b) {
    if (seen.insert(g.head.id).second) out.push_back(g);
  }
  return out;
}

GraphCollection intersect_collections(const GraphCollection& a, const GraphCollection& b) {
  std::unordered_set<GraphId> in_b;
  for (const auto& g : b) in_b.insert(g.head.id);
  GraphCollection out;
  for (const auto& g : distinct(a)) {
    if (in_b.count(g.head.id)) out.push_back(g);
  }
  return out;
}

GraphCollection difference_collections(const GraphCollection& a, const GraphCollection& b) {
  std::unordered_set<GraphId> in_b;
  for (const auto& g : b) in_b.insert(g.head.id);
  GraphCollection out;
  for (const auto& g : distinct(a)) {
    if (!in_b.count(g.head.id)) out.push_back(g);
  }
  return out;
}

LogicalGraph combine(const LogicalGraph& a, const LogicalGraph& b) {
  require_same_space(a, b, "combine");
  return fresh_graph(a.space, id_set_union(a.vertex_ids, b.vertex_ids), id_set_union(a.edge_ids, b.edge_ids));
}

LogicalGraph overlap(const LogicalGraph& a, const LogicalGraph& b) {
  require_same_space(a, b, "overlap");
  return fresh_graph(a.space, id_set_intersection(a.vertex_ids, b.vertex_ids),
                     id_set_intersection(a.edge_ids, b.edge_ids));
}

LogicalGraph exclude(const LogicalGraph& a, const LogicalGraph& b) {
  require_same_space(a, b, "exclude");
  IdSet vertices = id_set_difference(a.vertex_ids, b.vertex_ids);
  IdSet edges;
  for (auto id : a.edge_ids) {
    const Edge& e = a.edge(id);
    if (id_set_contains(vertices, e.source) && id_set_contains(vertices, e.target)) edges.push_back(id);
  }
  return fresh_graph(a.space, std::move(vertices), std::move(edges));
}

LogicalGraph aggregate(const LogicalGraph& graph, const std::string& key, const AggregateFunction& fn) {
  LogicalGraph out = graph;
  out.head.properties.insert_or_assign(key, fn(graph));
  return out;
}

PropertyValue sum(std::span<const PropertyValue> values) {
  bool all_int = true;
  int64_t int_sum = 0;
  double float_sum = 0;
  for (const auto& v : values) {
    if (!v.is_numeric()) throw TypeError("sum: non-numeric value " + v.to_string());
    if (v.is_int()) {
      int_sum += v.as_int();
    } else {
      all_int = false;
    }
    float_sum += v.as_number();
  }
  if (all_int) return int_sum;
  return float_sum;
}

double average(std::span<const PropertyValue> values) {
  if (values.empty()) throw OperatorError("average: no element has the requested property");
  double total = 0;
  for (const auto& v : values) {
    if (!v.is_numeric()) throw TypeError("average: non-numeric value " + v.to_string());
    total += v.as_number();
  }
  return total / static_cast<double>(values.size());
}

LogicalGraph project(const LogicalGraph& graph, const ProjectionFunctions& functions) {
  auto space = std::make_shared<ElementSpace>();
  for (const Vertex* v : graph.vertices()) {
    Vertex projected = functions.vertex ? functions.vertex(*v) : *v;
    if (projected.id != v->id) {
      throw OperatorError("project: vertex function changed the id of vertex " + std::to_string(v->id));
    }
    space->put_vertex(std::move(projected));
  }
  for (const Edge* e : graph.edges()) {
    Edge projected = functions.edge ? functions.edge(*e) : *e;
    if (projected.id != e->id || projected.source != e->source || projected.target != e->target) {
      throw OperatorError("project: edge function changed the structure of edge " + std::to_string(e->id));
    }
    space->put_edge(std::move(projected));
  }
  LogicalGraph out = fresh_graph(space, graph.vertex_ids, graph.edge_ids);
  out.head.label = graph.head.label;
  out.head.properties = graph.head.properties;
  return out;
}

namespace {

using GroupKey = std::pair<std::string, std::vector<std::optional<PropertyValue>>>;

// Total order on grouping tuples: variant index first, then payload.
struct GroupKeyLess {
  static bool less(const std::optional<PropertyValue>& a, const std::optional<PropertyValue>& b) {
    if (!a || !b) return !a && b;
    return a->variant() < b->variant();
  }
  bool operator()(const GroupKey& a, const GroupKey& b) const {
    if (a.first != b.first) return a.first < b.first;
    return std::lexicographical_compare(a.second.begin(), a.second.end(), b.second.begin(), b.second.end(), less);
  }
};

template <class Element>
GroupKey group_key(const Element& e, const GroupingKeys& keys) {
  GroupKey k;
  if (keys.by_label) k.first = e.label;
  k.second.reserve(keys.property_keys.size());
  for (const auto& p : keys.property_keys) k.second.push_back(find_property(e.properties, p));
  return k;
}

template <class Element>
void stamp_group(Element& summary, const GroupKey& key, const GroupingKeys& keys) {
  if (keys.by_label) summary.label = key.first;
  for (size_t i = 0; i < keys.property_keys.size(); ++i) {
    if (key.second[i]) summary.properties.insert_or_assign(keys.property_keys[i], *key.second[i]);
  }
}

}  // namespace

LogicalGraph summarize(const LogicalGraph& graph, const SummarizationSpec& spec) {
  // Groups are numbered by first appearance in vertex-id order.
  std::map<GroupKey, size_t, GroupKeyLess> vertex_group_index;
  std::vector<GroupKey> vertex_groups;
  std::vector<std::vector<const Vertex*>> vertex_members;
  std::unordered_map<VertexId, size_t> group_of;
  for (const Vertex* v : graph.vertices()) {
    GroupKey key = group_key(*v, spec.vertex_keys);
    auto [it, inserted] = vertex_group_index.try_emplace(key, vertex_groups.size());
    if (inserted) {
      vertex_groups.push_back(std::move(key));
      vertex_members.emplace_back();
    }
    vertex_members[it->second].push_back(v);
    group_of[v->id] = it->second;
  }

  using EdgeGroupKey = std::tuple<size_t, size_t, GroupKey>;
  struct EdgeGroupLess {
    bool operator()(const EdgeGroupKey& a, const EdgeGroupKey& b) const {
      if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) < std::get<0>(b);
      if (std::get<1>(a) != std::get<1>(b)) return std::get<1>(a) < std::get<1>(b);
      return GroupKeyLess{}(std::get<2>(a), std::get<2>(b));
    }
  };
  std::map<EdgeGroupKey, size_t, EdgeGroupLess> edge_group_index;
  std::vector<EdgeGroupKey> edge_groups;
  std::vector<std::vector<const Edge*>> edge_members;
  for (const Edge* e : graph.edges()) {
    EdgeGroupKey key{group_of.at(e->source), group_of.at(e->target), group_key(*e, spec.edge_keys)};
    auto [it, inserted] = edge_group_index.try_emplace(key, edge_groups.size());
    if (inserted) {
      edge_groups.push_back(std::move(key));
      edge_members.emplace_back();
    }
    edge_members[it->second].push_back(e);
  }

  auto space = std::make_shared<ElementSpace>();
  IdSet vertex_ids, edge_ids;
  for (size_t g = 0; g < vertex_groups.size(); ++g) {
    Vertex summary;
    summary.id = g;
    stamp_group(summary, vertex_groups[g], spec.vertex_keys);
    if (spec.vertex_aggregator) {
      spec.vertex_aggregator(summary, std::span<const Vertex* const>(vertex_members[g]));
    }
    summary.id = g;
    vertex_ids.push_back(g);
    space->put_vertex(std::move(summary));
  }
  std::vector<uint32_t> next_index(vertex_groups.size(), 0);
  for (size_t g = 0; g < edge_groups.size(); ++g) {
    const auto& [src, tgt, key] = edge_groups[g];
    Edge summary;
    summary.id = g;
    summary.source = src;
    summary.target = tgt;
    summary.index = next_index[src]++;
    stamp_group(summary, key, spec.edge_keys);
    if (spec.edge_aggregator) {
      spec.edge_aggregator(summary, std::span<const Edge* const>(edge_members[g]));
    }
    summary.id = g;
    summary.source = src;
    summary.target = tgt;
    edge_ids.push_back(g);
    space->put_edge(std::move(summary));
  }
  for (size_t g = 0; g < vertex_groups.size(); ++g) {
    space->mutable_vertex(g).next_edge_index = next_index[g];
  }
  LogicalGraph out = fresh_graph(space, std::move(vertex_ids), std::move(edge_ids));
  out.head.label = graph.head.label;
  return out;
}

VertexAggregator count_vertices_into(std::string key) {
  return [key = std::move(key)](Vertex& summary, std::span<const Vertex* const> members) {
    summary.properties.insert_or_assign(key, static_cast<int64_t>(members.size()));
  };
}

EdgeAggregator count_edges_into(std::string key) {
  return [key = std::move(key)](Edge& summary, std::span<const Edge* const> members) {
    summary.properties.insert_or_assign(key, static_cast<int64_t>(members.size()));
  };
}

GraphCollection apply(const GraphCollection& collection, const UnaryGraphOperator& op) {
  GraphCollection out;
  out.reserve(collection.size());
  for (size_t i = 0; i < collection.size(); ++i) {
    try {
      out.push_back(op(collection[i]));
    } catch (...) {
      std::throw_with_nested(OperatorError("apply: operator failed on element " + std::to_string(i)));
    }
  }
  return out;
}

LogicalGraph reduce(const GraphCollection& collection, const BinaryGraphOperator& op) {
  if (collection.empty()) throw OperatorError("reduce: empty collection");
  LogicalGraph acc = collection.front();
  for (size_t i = 1; i < collection.size(); ++i) acc = op(acc, collection[i]);
  return acc;
}

LogicalGraph combine_all(const GraphCollection& collection) {
  if (collection.empty()) throw OperatorError("reduce: empty collection");
  if (collection.size() == 1) return collection.front();
  IdSet vertices, edges;
  for (const auto& g : collection) {
    require_same_space(collection.front(), g, "combine");
    vertices.insert(vertices.end(), g.vertex_ids.begin(), g.vertex_ids.end());
    edges.insert(edges.end(), g.edge_ids.begin(), g.edge_ids.end());
  }
  return fresh_graph(collection.front().space, make_id_set(std::move(vertices)), make_id_set(std::move(edges)));
}

LogicalGraph overlap_all(const GraphCollection& collection) {
  if (collection.empty()) throw OperatorError("reduce: empty collection");
  if (collection.size() == 1) return collection.front();
  IdSet vertices = collection.front().vertex_ids;
  IdSet edges = collection.front().edge_ids;
  for (size_t i = 1; i < collection.size(); ++i) {
    require_same_space(collection.front(), collection[i], "overlap");
    vertices = id_set_intersection(vertices, collection[i].vertex_ids);
    edges = id_set_intersection(edges, collection[i].edge_ids);
  }
  return fresh_graph(collection.front().space, std::move(vertices), std::move(edges));
}

}  // namespace epgm::ops
