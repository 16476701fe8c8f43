#include "epgm/store/graph_store.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <unordered_map>

#include "json.hpp"

namespace epgm::store {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr size_t kBulkBatchVertices = 1024;

std::vector<RowCell> to_row_cells(const std::vector<Cell>& cells) {
  std::vector<RowCell> out;
  out.reserve(cells.size());
  for (const auto& c : cells) out.push_back({c.family, c.qualifier, c.value});
  return out;
}

bool has_type(const std::vector<Cell>& cells, uint8_t meta_family) {
  return std::any_of(cells.begin(), cells.end(),
                     [&](const Cell& c) { return c.family == meta_family && c.qualifier == "type"; });
}

std::string describe_key(VertexKey key) {
  return std::to_string(key.partition) + "-" + std::to_string(key.id);
}

// Diffs `fresh` against the live cells of a row: changed cells are written,
// vanished ones tombstoned. Returns the (family, qualifier) pairs that are
// new or removed, for mirror maintenance.
void diff_row(const std::string& row, const std::vector<RowCell>& fresh, const std::vector<Cell>& existing,
              const std::set<uint8_t>& families, std::vector<Mutation>& out, std::vector<const RowCell*>* added,
              std::vector<std::string>* removed_out_edges) {
  std::map<std::pair<uint8_t, std::string>, const std::string*> current;
  for (const auto& c : existing)
    if (families.count(c.family)) current.emplace(std::make_pair(c.family, c.qualifier), &c.value);
  for (const auto& cell : fresh) {
    auto it = current.find({cell.family, cell.qualifier});
    if (it == current.end()) {
      out.push_back({cell.family, row, cell.qualifier, cell.value});
      if (added) added->push_back(&cell);
      continue;
    }
    if (*it->second != cell.value) out.push_back({cell.family, row, cell.qualifier, cell.value});
    current.erase(it);
  }
  for (const auto& [key, _] : current) {
    out.push_back({key.first, row, key.second, std::nullopt});
    if (removed_out_edges && key.first == kOutEdges) removed_out_edges->push_back(key.second);
  }
}

}  // namespace

std::optional<StoreConfig> read_store_config(const fs::path& path) {
  fs::path file = path / "meta";
  if (!fs::exists(file)) return std::nullopt;
  std::ifstream in(file);
  json j;
  try {
    in >> j;
    StoreConfig c;
    c.path = path;
    c.partitions = j.at("partitions").get<uint16_t>();
    c.strategy = parse_strategy(j.at("partitioner").get<std::string>());
    c.boundaries = j.at("boundaries").get<std::vector<VertexId>>();
    c.max_versions = j.at("max_versions").get<size_t>();
    return c;
  } catch (const json::exception& e) {
    throw StoreError("unreadable store meta " + file.string() + ": " + e.what());
  }
}

GraphStore::GraphStore(StoreConfig config) : config_(std::move(config)) {
  if (config_.partitions == 0) throw StoreError("partition count must be positive");
  if (auto existing = read_store_config(config_.path)) {
    auto mismatch = [&](const std::string& what, const std::string& stored, const std::string& requested) {
      throw StoreError("store at " + config_.path.string() + " was created with " + what + " " + stored +
                       ", requested " + requested);
    };
    if (existing->partitions != config_.partitions)
      mismatch("partition count", std::to_string(existing->partitions), std::to_string(config_.partitions));
    if (existing->strategy != config_.strategy)
      mismatch("partitioner", std::string(strategy_name(existing->strategy)),
               std::string(strategy_name(config_.strategy)));
    if (existing->max_versions != config_.max_versions)
      mismatch("max-versions", std::to_string(existing->max_versions), std::to_string(config_.max_versions));
    if (!config_.boundaries.empty() && config_.boundaries != existing->boundaries)
      mismatch("range boundaries", "(stored)", "(different)");
    config_.boundaries = existing->boundaries;
  } else {
    fs::create_directories(config_.path);
    if (config_.strategy == PartitionStrategy::Range && config_.boundaries.empty())
      config_.boundaries = Partitioner::equal_width(config_.partitions).boundaries();
    if (config_.strategy == PartitionStrategy::Hash) config_.boundaries.clear();
  }
  partitioner_ = config_.strategy == PartitionStrategy::Hash ? Partitioner::hash(config_.partitions)
                                                             : Partitioner::range(config_.boundaries);
  if (partitioner_.count() != config_.partitions)
    throw StoreError("range boundaries define " + std::to_string(partitioner_.count()) + " partitions, expected " +
                     std::to_string(config_.partitions));
  if (!fs::exists(config_.path / "meta")) write_config();
  kv_ = std::make_unique<KvStore>(config_.path, config_.max_versions, config_.sync);
  load_state();
}

std::unique_ptr<GraphStore> GraphStore::open_existing(const fs::path& path, SyncMode sync) {
  auto config = read_store_config(path);
  if (!config) throw StoreError("no graph store at " + path.string());
  config->sync = sync;
  return std::make_unique<GraphStore>(std::move(*config));
}

void GraphStore::write_config() const {
  json j;
  j["format"] = "epgm-store";
  j["version"] = 1;
  j["partitions"] = config_.partitions;
  j["partitioner"] = std::string(strategy_name(config_.strategy));
  j["boundaries"] = config_.boundaries;
  j["max_versions"] = config_.max_versions;
  fs::path tmp = config_.path / "meta.tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    out << j.dump(2) << "\n";
    if (!out) throw StoreError("cannot write " + tmp.string());
  }
  fs::rename(tmp, config_.path / "meta");
}

void GraphStore::load_state() {
  labels_ = LabelDictionary();
  std::vector<std::pair<uint16_t, std::string>> entries;
  kv_->scan(kLabelTable, "", "", std::nullopt, [&](const std::string& row, const std::vector<Cell>& cells) {
    for (const auto& c : cells)
      if (c.family == kLabels && c.qualifier == "l") entries.emplace_back(get_u16(row), c.value);
  });
  for (const auto& [id, label] : entries) labels_.restore(id, label);
  next_graph_id_ = 0;
  for (auto id : graph_ids()) next_graph_id_ = std::max(next_graph_id_, id + 1);
}

std::string GraphStore::vertex_key(VertexId id) const { return encode_vertex_key({partitioner_.assign(id), id}); }

uint16_t GraphStore::label_id(const std::string& label, std::vector<Mutation>& out) {
  if (auto id = labels_.find(label)) return *id;
  uint16_t id = labels_.assign(label);
  out.push_back({kLabels, encode_label_key(id), "l", label});
  return id;
}

void GraphStore::vertex_mutations(const Vertex& v, const std::vector<Edge>& out_edges, std::vector<Mutation>& out) {
  std::set<uint32_t> indices;
  for (const auto& e : out_edges) {
    if (e.source != v.id)
      throw StoreError("edge " + std::to_string(e.id) + " does not leave vertex " + std::to_string(v.id));
    if (!indices.insert(e.index).second)
      throw StoreError("vertex " + std::to_string(v.id) + " has two out-edges with index " + std::to_string(e.index));
  }
  label_id(v.label, out);
  for (const auto& e : out_edges) label_id(e.label, out);
  VertexKey self{partitioner_.assign(v.id), v.id};
  std::string row = encode_vertex_key(self);
  auto fresh = encode_vertex_cells(v, out_edges, labels_, [&](VertexId t) { return partitioner_.assign(t); });
  auto existing = kv_->read_row(kVertexTable, row);
  std::vector<const RowCell*> added;
  std::vector<std::string> removed;
  diff_row(row, fresh, existing, {kVertexMeta, kVertexProperties, kOutEdges}, out, &added, &removed);
  auto mirror = [&](const std::string& qualifier, std::optional<std::string> value) {
    auto q = decode_edge_qualifier(qualifier);
    std::string target_row = encode_vertex_key(q.opposite);
    q.opposite = self;
    out.push_back({kInEdges, std::move(target_row), encode_edge_qualifier(q), std::move(value)});
  };
  for (const auto* cell : added)
    if (cell->family == kOutEdges) mirror(cell->qualifier, std::string());
  for (const auto& qualifier : removed) mirror(qualifier, std::nullopt);
}

uint64_t GraphStore::put_vertex(const Vertex& v, const std::vector<Edge>& out_edges,
                                std::optional<uint64_t> timestamp) {
  std::vector<Mutation> batch;
  vertex_mutations(v, out_edges, batch);
  return kv_->write(batch, timestamp);
}

StoredVertex GraphStore::decode_row(const std::string& row, const std::vector<Cell>& cells) const {
  auto key = decode_vertex_key(row);
  auto rec = decode_vertex_cells(key.id, to_row_cells(cells), labels_);
  return StoredVertex{std::move(rec.vertex), std::move(rec.out_edges), std::move(rec.in_edges), key.partition};
}

std::optional<StoredVertex> GraphStore::get_vertex(VertexId id, std::optional<uint64_t> as_of) const {
  std::string row = vertex_key(id);
  auto cells = kv_->read_row(kVertexTable, row, as_of);
  if (!has_type(cells, kVertexMeta)) return std::nullopt;
  return decode_row(row, cells);
}

void GraphStore::graph_mutations(const LogicalGraph& graph, std::vector<Mutation>& out) {
  std::string row = encode_graph_key(graph.head.id);
  std::vector<RowCell> fresh;
  std::string type;
  put_u16(type, label_id(graph.head.label, out));
  fresh.push_back({kGraphMeta, "type", std::move(type)});
  std::string vertices;
  for (auto id : graph.vertex_ids) {
    std::string key = vertex_key(id);
    if (!kv_->get(kVertexMeta, key, "type"))
      throw NotFoundError("graph " + std::to_string(graph.head.id) + " references vertex " + std::to_string(id) +
                          " which is not in the vertex table");
    vertices += key;
  }
  fresh.push_back({kGraphMeta, "vertices", std::move(vertices)});
  for (const auto& [key, value] : graph.head.properties) fresh.push_back({kGraphProperties, key, encode_property(value)});

  std::map<VertexId, std::vector<const Edge*>> by_source;
  for (auto eid : graph.edge_ids) {
    const Edge& e = graph.edge(eid);
    by_source[e.source].push_back(&e);
  }
  for (auto& [source, edges] : by_source) {
    std::sort(edges.begin(), edges.end(), [](const Edge* a, const Edge* b) { return a->index < b->index; });
    std::string source_row = vertex_key(source);
    auto stored = get_vertex(source);
    std::string value;
    for (const Edge* e : edges) {
      bool found = stored && std::any_of(stored->out_edges.begin(), stored->out_edges.end(), [&](const Edge& s) {
                     return s.id == e->id && s.index == e->index && s.target == e->target && s.label == e->label;
                   });
      if (!found)
        throw NotFoundError("graph " + std::to_string(graph.head.id) + " references edge " + std::to_string(e->id) +
                            " which is not in the vertex table");
      value += encode_edge_qualifier({label_id(e->label, out), {partitioner_.assign(e->target), e->target}, e->index});
    }
    fresh.push_back({kGraphEdges, source_row, std::move(value)});
  }
  std::sort(fresh.begin(), fresh.end(), [](const RowCell& a, const RowCell& b) {
    return std::tie(a.family, a.qualifier) < std::tie(b.family, b.qualifier);
  });
  auto existing = kv_->read_row(kGraphTable, row);
  diff_row(row, fresh, existing, {kGraphMeta, kGraphProperties, kGraphEdges}, out, nullptr, nullptr);
}

uint64_t GraphStore::put_graph(const LogicalGraph& graph, std::optional<uint64_t> timestamp) {
  if (is_temporary(graph.head.id))
    throw StoreError("graph " + std::to_string(graph.head.id) + " is temporary; use persist_graph");
  std::vector<Mutation> batch;
  graph_mutations(graph, batch);
  uint64_t ts = kv_->write(batch, timestamp);
  next_graph_id_ = std::max(next_graph_id_, graph.head.id + 1);
  return ts;
}

std::optional<LogicalGraph> GraphStore::get_graph(GraphId id, std::optional<uint64_t> as_of) const {
  auto cells = kv_->read_row(kGraphTable, encode_graph_key(id), as_of);
  if (!has_type(cells, kGraphMeta)) return std::nullopt;
  LogicalGraph g;
  g.head.id = id;
  auto space = std::make_shared<ElementSpace>();
  std::map<VertexId, StoredVertex> members;
  for (const auto& c : cells) {
    std::string context = "graph " + std::to_string(id) + " " + std::string(family_name(c.family)) + ":";
    if (c.family == kGraphMeta && c.qualifier == "type") {
      if (c.value.size() != 2) throw CodecError(context + "type: expected 2 bytes");
      g.head.label = labels_.label(get_u16(c.value));
    } else if (c.family == kGraphMeta && c.qualifier == "vertices") {
      if (c.value.size() % kVertexRowKeySize != 0) throw CodecError(context + "vertices: bad length");
      for (size_t p = 0; p < c.value.size(); p += kVertexRowKeySize) {
        auto key = decode_vertex_key(std::string_view(c.value).substr(p, kVertexRowKeySize));
        auto v = get_vertex(key.id, as_of);
        if (!v) throw StoreError("graph " + std::to_string(id) + " lists missing vertex " + describe_key(key));
        g.vertex_ids.push_back(key.id);
        members.emplace(key.id, std::move(*v));
      }
    } else if (c.family == kGraphProperties) {
      g.head.properties.insert_or_assign(c.qualifier, decode_property(c.value, context + c.qualifier));
    }
  }
  for (const auto& c : cells) {
    if (c.family != kGraphEdges) continue;
    auto source = decode_vertex_key(c.qualifier);
    auto it = members.find(source.id);
    if (it == members.end())
      throw StoreError("graph " + std::to_string(id) + " has edges of non-member vertex " + describe_key(source));
    if (c.value.size() % kEdgeQualifierSize != 0)
      throw CodecError("graph " + std::to_string(id) + " edges:" + describe_key(source) + ": bad length");
    for (size_t p = 0; p < c.value.size(); p += kEdgeQualifierSize) {
      auto q = decode_edge_qualifier(std::string_view(c.value).substr(p, kEdgeQualifierSize));
      const auto& label = labels_.label(q.label);
      const auto& outs = it->second.out_edges;
      auto e = std::find_if(outs.begin(), outs.end(), [&](const Edge& s) {
        return s.index == q.index && s.target == q.opposite.id && s.label == label;
      });
      if (e == outs.end())
        throw StoreError("graph " + std::to_string(id) + " lists missing edge " + describe_key(source) + " #" +
                         std::to_string(q.index));
      g.edge_ids.push_back(e->id);
      space->put_edge(*e);
    }
  }
  for (auto& [vid, v] : members) space->put_vertex(std::move(v.vertex));
  g.vertex_ids = make_id_set(std::move(g.vertex_ids));
  g.edge_ids = make_id_set(std::move(g.edge_ids));
  g.space = std::move(space);
  return g;
}

std::vector<GraphId> GraphStore::graph_ids(std::optional<uint64_t> as_of) const {
  std::vector<GraphId> ids;
  kv_->scan(kGraphTable, "", "", as_of, [&](const std::string& row, const std::vector<Cell>& cells) {
    if (has_type(cells, kGraphMeta)) ids.push_back(decode_graph_key(row));
  });
  return ids;
}

GraphId GraphStore::persist_graph(const LogicalGraph& graph) {
  LogicalGraph stored = graph;
  stored.head.id = next_graph_id_;
  std::vector<Mutation> batch;
  graph_mutations(stored, batch);
  for (auto vid : stored.vertex_ids) {
    std::string key = vertex_key(vid);
    std::string graphs = kv_->get(kVertexMeta, key, "graphs").value_or(std::string());
    IdSet ids;
    for (size_t p = 0; p + 8 <= graphs.size(); p += 8) ids.push_back(get_u64(graphs, p));
    id_set_insert(ids, stored.head.id);
    std::string value;
    for (auto g : ids) put_u64(value, g);
    batch.push_back({kVertexMeta, key, "graphs", std::move(value)});
  }
  kv_->write(batch);
  return next_graph_id_++;
}

void GraphStore::scan_vertices(std::optional<uint16_t> partition, std::optional<uint64_t> as_of,
                               const std::function<void(const StoredVertex&)>& visit) const {
  std::string begin, end;
  if (partition) {
    begin = encode_vertex_key({*partition, 0});
    if (*partition < 0xFFFF) end = encode_vertex_key({static_cast<uint16_t>(*partition + 1), 0});
  }
  std::vector<StoredVertex> rows;
  kv_->scan(kVertexTable, begin, end, as_of, [&](const std::string& row, const std::vector<Cell>& cells) {
    if (has_type(cells, kVertexMeta)) rows.push_back(decode_row(row, cells));
  });
  for (const auto& v : rows) visit(v);
}

void GraphStore::write_database(const EpgmDatabase& db) {
  std::vector<Mutation> batch;
  for (const auto& label : db.labels()) label_id(label, batch);
  std::unordered_map<VertexId, std::vector<Edge>> out_edges;
  for (const auto& [id, e] : db.elements().edges()) out_edges[e.source].push_back(e);
  size_t pending = 0;
  for (const auto& [id, v] : db.elements().vertices()) {
    auto it = out_edges.find(id);
    static const std::vector<Edge> kNone;
    vertex_mutations(v, it == out_edges.end() ? kNone : it->second, batch);
    if (++pending == kBulkBatchVertices) {
      kv_->write(batch);
      batch.clear();
      pending = 0;
    }
  }
  if (!batch.empty()) kv_->write(batch);
  for (auto gid : db.graph_ids()) put_graph(db.graph(gid));
}

EpgmDatabase GraphStore::load_database(std::optional<uint64_t> as_of) const {
  EpgmDatabase db;
  for (const auto& label : labels_.labels()) db.declare_label(label);
  std::vector<Edge> edges;
  scan_vertices(std::nullopt, as_of, [&](const StoredVertex& v) {
    db.insert_vertex(v.vertex);
    edges.insert(edges.end(), v.out_edges.begin(), v.out_edges.end());
  });
  for (auto& e : edges) db.insert_edge(std::move(e));
  for (auto gid : graph_ids(as_of)) {
    auto g = get_graph(gid, as_of);
    db.insert_graph(g->head, g->vertex_ids, g->edge_ids);
  }
  return db;
}

std::vector<std::string> GraphStore::audit_mirrors() const {
  std::set<std::pair<std::string, std::string>> expected_in;
  std::set<std::pair<std::string, std::string>> actual_in;
  std::vector<std::string> problems;
  kv_->scan(kVertexTable, "", "", std::nullopt, [&](const std::string& row, const std::vector<Cell>& cells) {
    for (const auto& c : cells) {
      if (c.family != kOutEdges && c.family != kInEdges) continue;
      auto q = decode_edge_qualifier(c.qualifier);
      if (c.family == kInEdges) {
        actual_in.emplace(row, c.qualifier);
        continue;
      }
      std::string target = encode_vertex_key(q.opposite);
      q.opposite = decode_vertex_key(row);
      expected_in.emplace(std::move(target), encode_edge_qualifier(q));
    }
  });
  auto describe = [](const std::pair<std::string, std::string>& cell) {
    auto q = decode_edge_qualifier(cell.second);
    return "row " + describe_key(decode_vertex_key(cell.first)) + " in-edge <" + std::to_string(q.label) + "," +
           describe_key(q.opposite) + "," + std::to_string(q.index) + ">";
  };
  for (const auto& cell : expected_in)
    if (!actual_in.count(cell)) problems.push_back("missing mirror: " + describe(cell));
  for (const auto& cell : actual_in)
    if (!expected_in.count(cell)) problems.push_back("orphan mirror: " + describe(cell));
  return problems;
}

StoreStats GraphStore::stats() const {
  StoreStats s;
  s.partition_rows.assign(partitioner_.count(), 0);
  kv_->scan(kVertexTable, "", "", std::nullopt, [&](const std::string& row, const std::vector<Cell>& cells) {
    if (!has_type(cells, kVertexMeta)) return;
    ++s.vertices;
    ++s.partition_rows[decode_vertex_key(row).partition];
    for (const auto& c : cells) {
      if (c.family == kVertexMeta && c.qualifier == "type") ++s.labels[labels_.label(get_u16(c.value))];
      if (c.family == kOutEdges) {
        ++s.edges;
        ++s.labels[labels_.label(decode_edge_qualifier(c.qualifier).label)];
      }
    }
  });
  kv_->scan(kGraphTable, "", "", std::nullopt, [&](const std::string&, const std::vector<Cell>& cells) {
    for (const auto& c : cells) {
      if (c.family == kGraphMeta && c.qualifier == "type") {
        ++s.graphs;
        ++s.labels[labels_.label(get_u16(c.value))];
      }
    }
  });
  return s;
}

std::vector<Cell> GraphStore::raw_row(Table table, std::string_view row, std::optional<uint64_t> as_of) const {
  return kv_->read_row(table, row, as_of);
}

void GraphStore::simulate_crash() {
  kv_->simulate_crash();
  load_state();
}

}  // namespace epgm::store
