#include "epgm/algorithms.hpp"

#include <algorithm>
#include <charconv>
#include <numeric>
#include <unordered_map>

#include "epgm/operators.hpp"

namespace epgm::algo {

void AlgorithmRegistry::register_algorithm(std::string symbol, AlgorithmFunction function, Arity arity) {
  if (contains(symbol)) throw Error("algorithm :" + symbol + " is already registered");
  entries_.emplace(std::move(symbol), RegisteredAlgorithm{std::move(function), arity});
}

const RegisteredAlgorithm& AlgorithmRegistry::lookup(std::string_view symbol) const {
  auto it = entries_.find(symbol);
  if (it == entries_.end()) throw NotFoundError("unknown algorithm :" + std::string(symbol));
  return it->second;
}

std::vector<std::string> AlgorithmRegistry::symbols() const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) out.push_back(k);
  return out;
}

LogicalGraph as_single_graph(const AlgorithmValue& input) {
  if (const auto* g = std::get_if<LogicalGraph>(&input)) return *g;
  return ops::combine_all(std::get<GraphCollection>(input));
}

namespace {

std::string param_or(const Params& params, std::string_view key, std::string fallback) {
  auto it = params.find(key);
  return it == params.end() ? std::move(fallback) : it->second;
}

std::set<std::string, std::less<>> split_labels(const std::string& text) {
  std::set<std::string, std::less<>> out;
  size_t start = 0;
  while (start <= text.size()) {
    size_t comma = text.find(',', start);
    if (comma == std::string::npos) comma = text.size();
    std::string item = text.substr(start, comma - start);
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (!item.empty()) out.insert(item);
    start = comma + 1;
  }
  return out;
}

}  // namespace

LabelPropagationParams LabelPropagationParams::from(const Params& params) {
  LabelPropagationParams out;
  out.property_key = param_or(params, "propertyKey", out.property_key);
  if (out.property_key.empty()) throw Error("LabelPropagation: propertyKey must not be empty");
  if (auto it = params.find("maxIterations"); it != params.end()) {
    const auto& text = it->second;
    int value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || value <= 0) {
      throw Error("LabelPropagation: maxIterations must be a positive integer, got '" + text + "'");
    }
    out.max_iterations = value;
  }
  return out;
}

LabelPropagationResult label_propagation_run(const LogicalGraph& graph, const LabelPropagationParams& params) {
  const auto& ids = graph.vertex_ids;
  std::unordered_map<VertexId, size_t> dense;
  dense.reserve(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) dense.emplace(ids[i], i);
  std::vector<std::vector<size_t>> neighbors(ids.size());
  for (auto eid : graph.edge_ids) {
    const Edge& e = graph.edge(eid);
    if (e.source == e.target) continue;
    size_t s = dense.at(e.source);
    size_t t = dense.at(e.target);
    neighbors[s].push_back(t);
    neighbors[t].push_back(s);
  }

  std::vector<uint64_t> labels(ids.begin(), ids.end());
  std::vector<uint64_t> next(labels.size());
  std::vector<uint64_t> scratch;
  LabelPropagationResult result;
  while (result.iterations < params.max_iterations) {
    for (size_t v = 0; v < labels.size(); ++v) {
      if (neighbors[v].empty()) {
        next[v] = labels[v];
        continue;
      }
      scratch.clear();
      for (size_t n : neighbors[v]) scratch.push_back(labels[n]);
      std::sort(scratch.begin(), scratch.end());
      uint64_t best = scratch.front();
      size_t best_count = 0;
      for (size_t i = 0; i < scratch.size();) {
        size_t j = i;
        while (j < scratch.size() && scratch[j] == scratch[i]) ++j;
        if (j - i > best_count) {
          best_count = j - i;
          best = scratch[i];
        }
        i = j;
      }
      next[v] = best;
    }
    ++result.iterations;
    bool changed = next != labels;
    labels.swap(next);
    if (!changed) {
      result.converged = true;
      break;
    }
  }

  auto space = std::make_shared<ElementSpace>();
  for (size_t i = 0; i < ids.size(); ++i) {
    Vertex v = graph.vertex(ids[i]);
    v.properties.insert_or_assign(params.property_key, static_cast<int64_t>(labels[i]));
    space->put_vertex(std::move(v));
  }
  for (auto eid : graph.edge_ids) space->put_edge(graph.edge(eid));
  result.graph.head.id = next_temporary_graph_id();
  result.graph.head.label = graph.head.label;
  result.graph.head.properties = graph.head.properties;
  result.graph.vertex_ids = graph.vertex_ids;
  result.graph.edge_ids = graph.edge_ids;
  result.graph.space = space;
  return result;
}

LogicalGraph label_propagation(const LogicalGraph& graph, const LabelPropagationParams& params) {
  return label_propagation_run(graph, params).graph;
}

GraphCollection community_split(const LogicalGraph& graph, std::string_view vertex_key, const std::string& graph_key) {
  struct Group {
    PropertyValue value;
    IdSet vertices;
    IdSet edges;
  };
  std::vector<Group> groups;
  std::map<std::variant<int64_t, double, bool, std::string>, size_t> index;
  std::unordered_map<VertexId, size_t> group_of;
  for (const Vertex* v : graph.vertices()) {
    auto value = find_property(v->properties, vertex_key);
    if (!value) {
      throw Error("community split: vertex " + std::to_string(v->id) + " has no property '" + std::string(vertex_key) +
                  "'");
    }
    auto [it, inserted] = index.try_emplace(value->variant(), groups.size());
    if (inserted) groups.push_back({*value, {}, {}});
    groups[it->second].vertices.push_back(v->id);
    group_of[v->id] = it->second;
  }
  for (auto eid : graph.edge_ids) {
    const Edge& e = graph.edge(eid);
    size_t g = group_of.at(e.source);
    if (group_of.at(e.target) == g) groups[g].edges.push_back(eid);
  }
  GraphCollection out;
  for (auto& group : groups) {
    LogicalGraph g;
    g.head.id = next_temporary_graph_id();
    g.head.label = "Community";
    g.head.properties.insert_or_assign(graph_key, group.value);
    g.vertex_ids = std::move(group.vertices);
    g.edge_ids = std::move(group.edges);
    g.space = graph.space;
    out.push_back(std::move(g));
  }
  return out;
}

BtgParams BtgParams::from(const Params& params) {
  BtgParams out;
  if (auto it = params.find("transactional"); it != params.end()) out.transactional_labels = split_labels(it->second);
  if (auto it = params.find("master"); it != params.end()) out.master_labels = split_labels(it->second);
  for (const auto& l : out.transactional_labels) {
    if (out.master_labels.count(l)) throw Error("BusinessTransactionGraphs: label '" + l + "' is both transactional and master");
  }
  return out;
}

GraphCollection btg_extract(const LogicalGraph& graph, const BtgParams& params) {
  const auto& ids = graph.vertex_ids;
  std::unordered_map<VertexId, size_t> dense;
  std::vector<bool> transactional(ids.size());
  for (size_t i = 0; i < ids.size(); ++i) {
    dense.emplace(ids[i], i);
    const std::string& label = graph.vertex(ids[i]).label;
    if (params.transactional_labels.count(label)) {
      transactional[i] = true;
    } else if (!params.master_labels.count(label)) {
      throw Error("BusinessTransactionGraphs: vertex " + std::to_string(ids[i]) + " has unclassified label '" + label +
                  "'");
    }
  }
  std::vector<size_t> parent(ids.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  for (auto eid : graph.edge_ids) {
    const Edge& e = graph.edge(eid);
    size_t s = dense.at(e.source);
    size_t t = dense.at(e.target);
    if (!transactional[s] || !transactional[t]) continue;
    size_t rs = find(s);
    size_t rt = find(t);
    if (rs != rt) parent[std::max(rs, rt)] = std::min(rs, rt);
  }
  // Roots are the smallest member, so root order is component order.
  std::map<size_t, size_t> component_of_root;
  std::vector<size_t> component(ids.size(), SIZE_MAX);
  for (size_t i = 0; i < ids.size(); ++i) {
    if (!transactional[i]) continue;
    auto [it, inserted] = component_of_root.try_emplace(find(i), component_of_root.size());
    component[i] = it->second;
  }
  std::vector<std::vector<uint64_t>> vertices(component_of_root.size());
  std::vector<std::vector<uint64_t>> edges(component_of_root.size());
  for (size_t i = 0; i < ids.size(); ++i) {
    if (transactional[i]) vertices[component[i]].push_back(ids[i]);
  }
  for (auto eid : graph.edge_ids) {
    const Edge& e = graph.edge(eid);
    size_t s = dense.at(e.source);
    size_t t = dense.at(e.target);
    if (transactional[s] && transactional[t]) {
      edges[component[s]].push_back(eid);
    } else if (transactional[s] && !transactional[t]) {
      edges[component[s]].push_back(eid);
      vertices[component[s]].push_back(e.target);
    } else if (!transactional[s] && transactional[t]) {
      edges[component[t]].push_back(eid);
      vertices[component[t]].push_back(e.source);
    }
  }
  GraphCollection out;
  for (size_t c = 0; c < vertices.size(); ++c) {
    LogicalGraph g;
    g.head.id = next_temporary_graph_id();
    g.head.label = "BusinessTransactionGraph";
    g.vertex_ids = make_id_set(std::move(vertices[c]));
    g.edge_ids = make_id_set(std::move(edges[c]));
    g.space = graph.space;
    out.push_back(std::move(g));
  }
  return out;
}

AlgorithmRegistry AlgorithmRegistry::with_builtins() {
  AlgorithmRegistry registry;
  registry.register_algorithm(
      "LabelPropagation",
      [](const AlgorithmValue& input, const Params& params) -> AlgorithmValue {
        return label_propagation(as_single_graph(input), LabelPropagationParams::from(params));
      },
      Arity::Graph);
  registry.register_algorithm(
      "CommunityDetection",
      [](const AlgorithmValue& input, const Params& params) -> AlgorithmValue {
        std::string graph_key = param_or(params, "graphPropertyKey", "community");
        Params lp_params = params;
        lp_params.try_emplace("propertyKey", graph_key);
        auto lp = LabelPropagationParams::from(lp_params);
        return community_split(label_propagation(as_single_graph(input), lp), lp.property_key, graph_key);
      },
      Arity::Collection);
  registry.register_algorithm(
      "BusinessTransactionGraphs",
      [](const AlgorithmValue& input, const Params& params) -> AlgorithmValue {
        return btg_extract(as_single_graph(input), BtgParams::from(params));
      },
      Arity::Collection);
  return registry;
}

AlgorithmRegistry& AlgorithmRegistry::global() {
  static AlgorithmRegistry registry = with_builtins();
  return registry;
}

}  // namespace epgm::algo

namespace epgm::ops {

namespace {

algo::AlgorithmValue invoke(const algo::AlgorithmValue& input, std::string_view symbol, const algo::Params& params,
                            const algo::AlgorithmRegistry& registry, algo::Arity expected) {
  const auto& entry = registry.lookup(symbol);
  if (entry.arity != expected) {
    throw OperatorError(":" + std::string(symbol) + " returns a " +
                        (entry.arity == algo::Arity::Graph ? "graph; use callForGraph" : "collection; use callForCollection"));
  }
  auto output = entry.function(input, params);
  bool is_graph = std::holds_alternative<LogicalGraph>(output);
  if (is_graph != (expected == algo::Arity::Graph)) {
    throw OperatorError(":" + std::string(symbol) + " produced output of the wrong arity");
  }
  return output;
}

}  // namespace

LogicalGraph call_for_graph(const algo::AlgorithmValue& input, std::string_view symbol, const algo::Params& params,
                            const algo::AlgorithmRegistry& registry) {
  return std::get<LogicalGraph>(invoke(input, symbol, params, registry, algo::Arity::Graph));
}

GraphCollection call_for_collection(const algo::AlgorithmValue& input, std::string_view symbol,
                                    const algo::Params& params, const algo::AlgorithmRegistry& registry) {
  return std::get<GraphCollection>(invoke(input, symbol, params, registry, algo::Arity::Collection));
}

}  // namespace epgm::ops
