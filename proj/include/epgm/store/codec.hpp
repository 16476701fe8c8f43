#pragma once

// Byte layouts of the wide-column graph store. Every multi-byte integer is
// big-endian, so lexicographic byte order equals numeric order.
//
//   vertex row key   u16 partition | u64 vertex id              (10 bytes)
//   graph row key    u64 graph id                               (8 bytes)
//   edge qualifier   u16 label | opposite vertex row key | u32 index (16 bytes)
//   property cell    u8 type code | payload
//   property list    u16 count | (u16 key length | key | u8 code | payload)*
//
// Payloads: int64 and float64 take 8 bytes, booleans one byte. A string is
// the raw UTF-8 rest of a property cell; inside a property list it carries a
// u32 length prefix.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epgm/model.hpp"

namespace epgm::store {

class CodecError : public Error {
 public:
  using Error::Error;
};

enum Family : uint8_t {
  kVertexMeta = 0,
  kVertexProperties = 1,
  kOutEdges = 2,
  kInEdges = 3,
  kGraphMeta = 4,
  kGraphProperties = 5,
  kGraphEdges = 6,
  kLabels = 7,
  kCommitMarker = 0xFF,
};

enum Table : uint8_t {
  kVertexTable = 0,
  kGraphTable = 1,
  kLabelTable = 2,
};

Table table_of(uint8_t family);
/// Row key width implied by a family; 0 for the commit marker.
size_t row_key_size(uint8_t family);
bool is_valid_family(uint8_t family);
std::string_view family_name(uint8_t family);

inline constexpr size_t kVertexRowKeySize = 10;
inline constexpr size_t kGraphRowKeySize = 8;
inline constexpr size_t kEdgeQualifierSize = 16;

void put_u16(std::string& out, uint16_t v);
void put_u32(std::string& out, uint32_t v);
void put_u64(std::string& out, uint64_t v);
uint16_t get_u16(std::string_view in, size_t offset = 0);
uint32_t get_u32(std::string_view in, size_t offset = 0);
uint64_t get_u64(std::string_view in, size_t offset = 0);

struct VertexKey {
  uint16_t partition = 0;
  VertexId id = 0;

  bool operator==(const VertexKey&) const = default;
};

std::string encode_vertex_key(VertexKey key);
VertexKey decode_vertex_key(std::string_view bytes);
std::string encode_graph_key(GraphId id);
GraphId decode_graph_key(std::string_view bytes);
std::string encode_label_key(uint16_t id);

struct EdgeQualifier {
  uint16_t label = 0;
  VertexKey opposite;
  uint32_t index = 0;

  bool operator==(const EdgeQualifier&) const = default;
};

std::string encode_edge_qualifier(const EdgeQualifier& q);
EdgeQualifier decode_edge_qualifier(std::string_view bytes);

std::string encode_property(const PropertyValue& value);
/// `context` names the cell in error messages.
PropertyValue decode_property(std::string_view bytes, std::string_view context = "property");
std::string encode_property_list(const Properties& props);
Properties decode_property_list(std::string_view bytes, std::string_view context = "property list");

/// Bidirectional label <-> u16 mapping, ids assigned in first-use order.
class LabelDictionary {
 public:
  std::optional<uint16_t> find(std::string_view label) const;
  /// Returns the id of `label`, assigning the next free one when new.
  uint16_t assign(const std::string& label);
  /// Registers a persisted entry. Throws CodecError on a conflicting entry.
  void restore(uint16_t id, const std::string& label);
  const std::string& label(uint16_t id) const;
  const std::vector<std::string>& labels() const { return labels_; }
  size_t size() const { return labels_.size(); }

 private:
  std::vector<std::string> labels_;
  std::map<std::string, uint16_t, std::less<>> ids_;
};

/// A cell of one row: family, qualifier and value bytes.
struct RowCell {
  uint8_t family = 0;
  std::string qualifier;
  std::string value;

  bool operator==(const RowCell&) const = default;
};

/// A vertex with its incident edges as kept in one vertex row.
struct VertexRecord {
  Vertex vertex;
  /// Edges leaving the vertex. Ids come from the meta `eids` column.
  std::vector<Edge> out_edges;
  struct InEdge {
    std::string label;
    VertexId source = 0;
    uint32_t index = 0;

    bool operator==(const InEdge&) const = default;
  };
  std::vector<InEdge> in_edges;
};

/// Cells of the meta, properties and out-edges families of a vertex row,
/// sorted by (family, qualifier). `partition_of` resolves edge targets.
template <class PartitionOf>
std::vector<RowCell> encode_vertex_cells(const Vertex& v, const std::vector<Edge>& out_edges, LabelDictionary& labels,
                                         PartitionOf partition_of);

std::vector<RowCell> encode_vertex_cells_resolved(const Vertex& v, const std::vector<Edge>& out_edges,
                                                  const std::vector<uint16_t>& target_partitions,
                                                  LabelDictionary& labels);

template <class PartitionOf>
std::vector<RowCell> encode_vertex_cells(const Vertex& v, const std::vector<Edge>& out_edges, LabelDictionary& labels,
                                         PartitionOf partition_of) {
  std::vector<uint16_t> partitions;
  partitions.reserve(out_edges.size());
  for (const auto& e : out_edges) partitions.push_back(partition_of(e.target));
  return encode_vertex_cells_resolved(v, out_edges, partitions, labels);
}

/// Inverse of encode_vertex_cells plus in-edge cells. Throws CodecError on
/// malformed bytes, naming the family and qualifier.
VertexRecord decode_vertex_cells(VertexId id, const std::vector<RowCell>& cells, const LabelDictionary& labels);

}  // namespace epgm::store
