#pragma once

// Vertex table, graph table and label dictionary on top of the KV
// substrate. One vertex row holds the vertex, its out-edges with their
// properties and mirrored in-edge cells; one graph row holds the head, the
// member vertex keys and, per source vertex, the member out-edges.

#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "epgm/model.hpp"
#include "epgm/store/codec.hpp"
#include "epgm/store/kv.hpp"
#include "epgm/store/partitioner.hpp"

namespace epgm::store {

struct StoreConfig {
  std::filesystem::path path;
  uint16_t partitions = 1;
  PartitionStrategy strategy = PartitionStrategy::Hash;
  /// Range partitioning only; empty selects equal-width intervals.
  std::vector<VertexId> boundaries;
  size_t max_versions = 3;
  SyncMode sync = SyncMode::Always;
};

/// Config stored in `<path>/meta`, or nullopt for a fresh directory.
std::optional<StoreConfig> read_store_config(const std::filesystem::path& path);

struct StoredVertex {
  Vertex vertex;
  std::vector<Edge> out_edges;
  std::vector<VertexRecord::InEdge> in_edges;
  uint16_t partition = 0;
};

struct StoreStats {
  size_t vertices = 0;
  size_t edges = 0;
  size_t graphs = 0;
  /// Vertex rows per partition.
  std::vector<size_t> partition_rows;
  /// Element count per type label over vertices, edges and graphs.
  std::map<std::string, size_t> labels;
};

class GraphStore {
 public:
  /// Creates the store or opens it, failing when the persisted config
  /// disagrees with `config`.
  explicit GraphStore(StoreConfig config);
  /// Opens an existing store with its persisted config.
  static std::unique_ptr<GraphStore> open_existing(const std::filesystem::path& path,
                                                   SyncMode sync = SyncMode::Always);

  const StoreConfig& config() const { return config_; }
  const Partitioner& partitioner() const { return partitioner_; }
  const LabelDictionary& labels() const { return labels_; }

  std::string vertex_key(VertexId id) const;

  /// Writes a vertex row and mirrors its out-edges into the targets'
  /// in-edge families. Cells no longer present become tombstones.
  uint64_t put_vertex(const Vertex& v, const std::vector<Edge>& out_edges,
                      std::optional<uint64_t> timestamp = std::nullopt);
  std::optional<StoredVertex> get_vertex(VertexId id, std::optional<uint64_t> as_of = std::nullopt) const;

  /// Writes a graph row keyed by the graph's own id. Throws NotFoundError on
  /// a member vertex or edge missing from the vertex table.
  uint64_t put_graph(const LogicalGraph& graph, std::optional<uint64_t> timestamp = std::nullopt);
  std::optional<LogicalGraph> get_graph(GraphId id, std::optional<uint64_t> as_of = std::nullopt) const;
  std::vector<GraphId> graph_ids(std::optional<uint64_t> as_of = std::nullopt) const;

  /// Stores an operator result under the next free graph id and adds that id
  /// to the members' graph sets.
  GraphId persist_graph(const LogicalGraph& graph);

  /// Visits vertices in row-key order, optionally restricted to one
  /// partition's key range.
  void scan_vertices(std::optional<uint16_t> partition, std::optional<uint64_t> as_of,
                     const std::function<void(const StoredVertex&)>& visit) const;

  /// Bulk write of a whole database; labels keep the database's order.
  void write_database(const EpgmDatabase& db);
  EpgmDatabase load_database(std::optional<uint64_t> as_of = std::nullopt) const;

  /// Out-edge/in-edge pairs lacking their counterpart; empty when consistent.
  std::vector<std::string> audit_mirrors() const;
  StoreStats stats() const;

  /// Live cells of a raw row, for layout inspection.
  std::vector<Cell> raw_row(Table table, std::string_view row, std::optional<uint64_t> as_of = std::nullopt) const;

  KvStore& kv() { return *kv_; }
  const KvStore& kv() const { return *kv_; }
  void sync() { kv_->sync(); }
  void flush() { kv_->flush(); }
  /// Drops unsynced writes and reloads state from disk.
  void simulate_crash();

 private:
  void load_state();
  void write_config() const;
  uint16_t label_id(const std::string& label, std::vector<Mutation>& out);
  void vertex_mutations(const Vertex& v, const std::vector<Edge>& out_edges, std::vector<Mutation>& out);
  void graph_mutations(const LogicalGraph& graph, std::vector<Mutation>& out);
  StoredVertex decode_row(const std::string& row, const std::vector<Cell>& cells) const;

  StoreConfig config_;
  Partitioner partitioner_;
  LabelDictionary labels_;
  std::unique_ptr<KvStore> kv_;
  GraphId next_graph_id_ = 0;
};

}  // namespace epgm::store
