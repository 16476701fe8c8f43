#include "epgm/store/codec.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <tuple>

namespace epgm::store {

namespace {

std::string hex(std::string_view bytes) {
  static constexpr char kDigits[] = "0123456789abcdef";
  std::string out;
  for (unsigned char c : bytes) {
    out += kDigits[c >> 4];
    out += kDigits[c & 0xF];
  }
  return out;
}

void require(bool ok, std::string_view context, const std::string& what) {
  if (!ok) throw CodecError(std::string(context) + ": " + what);
}

void put_payload(std::string& out, const PropertyValue& value, bool length_prefixed) {
  switch (value.type_code()) {
    case TypeCode::Int64:
      put_u64(out, static_cast<uint64_t>(value.as_int()));
      break;
    case TypeCode::Float64:
      put_u64(out, std::bit_cast<uint64_t>(value.as_float()));
      break;
    case TypeCode::Boolean:
      out += static_cast<char>(value.as_bool() ? 1 : 0);
      break;
    case TypeCode::String:
      if (length_prefixed) put_u32(out, static_cast<uint32_t>(value.as_string().size()));
      out += value.as_string();
      break;
  }
}

// Reads one payload starting at `pos`; advances `pos`. Without a length
// prefix a string consumes the rest of `bytes`.
PropertyValue read_payload(std::string_view bytes, size_t& pos, uint8_t code, bool length_prefixed,
                           std::string_view context) {
  auto need = [&](size_t n) {
    require(bytes.size() - pos >= n, context, "truncated payload at byte " + std::to_string(pos));
  };
  switch (code) {
    case static_cast<uint8_t>(TypeCode::Int64): {
      need(8);
      auto v = static_cast<int64_t>(get_u64(bytes, pos));
      pos += 8;
      return PropertyValue(v);
    }
    case static_cast<uint8_t>(TypeCode::Float64): {
      need(8);
      auto v = std::bit_cast<double>(get_u64(bytes, pos));
      pos += 8;
      return PropertyValue(v);
    }
    case static_cast<uint8_t>(TypeCode::Boolean): {
      need(1);
      auto b = static_cast<uint8_t>(bytes[pos]);
      require(b <= 1, context, "invalid boolean byte " + std::to_string(b));
      pos += 1;
      return PropertyValue(b == 1);
    }
    case static_cast<uint8_t>(TypeCode::String): {
      size_t n = bytes.size() - pos;
      if (length_prefixed) {
        need(4);
        n = get_u32(bytes, pos);
        pos += 4;
        need(n);
      }
      std::string s(bytes.substr(pos, n));
      pos += n;
      return PropertyValue(std::move(s));
    }
    default:
      throw CodecError(std::string(context) + ": unknown type code " + std::to_string(code));
  }
}

}  // namespace

Table table_of(uint8_t family) {
  switch (family) {
    case kVertexMeta:
    case kVertexProperties:
    case kOutEdges:
    case kInEdges:
      return kVertexTable;
    case kGraphMeta:
    case kGraphProperties:
    case kGraphEdges:
      return kGraphTable;
    case kLabels:
      return kLabelTable;
    default:
      throw CodecError("unknown column family " + std::to_string(family));
  }
}

size_t row_key_size(uint8_t family) {
  if (family == kCommitMarker) return 0;
  switch (table_of(family)) {
    case kVertexTable:
      return kVertexRowKeySize;
    case kGraphTable:
      return kGraphRowKeySize;
    case kLabelTable:
      return 2;
  }
  return 0;
}

bool is_valid_family(uint8_t family) { return family <= kLabels; }

std::string_view family_name(uint8_t family) {
  switch (family) {
    case kVertexMeta:
    case kGraphMeta:
      return "meta";
    case kVertexProperties:
    case kGraphProperties:
      return "properties";
    case kOutEdges:
      return "out-edges";
    case kInEdges:
      return "in-edges";
    case kGraphEdges:
      return "edges";
    case kLabels:
      return "labels";
    default:
      return "unknown";
  }
}

void put_u16(std::string& out, uint16_t v) {
  out += static_cast<char>(v >> 8);
  out += static_cast<char>(v & 0xFF);
}

void put_u32(std::string& out, uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out += static_cast<char>((v >> shift) & 0xFF);
}

void put_u64(std::string& out, uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out += static_cast<char>((v >> shift) & 0xFF);
}

uint16_t get_u16(std::string_view in, size_t offset) {
  return static_cast<uint16_t>((static_cast<uint8_t>(in[offset]) << 8) | static_cast<uint8_t>(in[offset + 1]));
}

uint32_t get_u32(std::string_view in, size_t offset) {
  uint32_t v = 0;
  for (size_t i = 0; i < 4; ++i) v = (v << 8) | static_cast<uint8_t>(in[offset + i]);
  return v;
}

uint64_t get_u64(std::string_view in, size_t offset) {
  uint64_t v = 0;
  for (size_t i = 0; i < 8; ++i) v = (v << 8) | static_cast<uint8_t>(in[offset + i]);
  return v;
}

std::string encode_vertex_key(VertexKey key) {
  std::string out;
  out.reserve(kVertexRowKeySize);
  put_u16(out, key.partition);
  put_u64(out, key.id);
  return out;
}

VertexKey decode_vertex_key(std::string_view bytes) {
  require(bytes.size() == kVertexRowKeySize, "vertex row key", "expected 10 bytes, got " + std::to_string(bytes.size()));
  return {get_u16(bytes, 0), get_u64(bytes, 2)};
}

std::string encode_graph_key(GraphId id) {
  std::string out;
  put_u64(out, id);
  return out;
}

GraphId decode_graph_key(std::string_view bytes) {
  require(bytes.size() == kGraphRowKeySize, "graph row key", "expected 8 bytes, got " + std::to_string(bytes.size()));
  return get_u64(bytes, 0);
}

std::string encode_label_key(uint16_t id) {
  std::string out;
  put_u16(out, id);
  return out;
}

std::string encode_edge_qualifier(const EdgeQualifier& q) {
  std::string out;
  out.reserve(kEdgeQualifierSize);
  put_u16(out, q.label);
  out += encode_vertex_key(q.opposite);
  put_u32(out, q.index);
  return out;
}

EdgeQualifier decode_edge_qualifier(std::string_view bytes) {
  require(bytes.size() == kEdgeQualifierSize, "edge qualifier",
          "expected 16 bytes, got " + std::to_string(bytes.size()) + " (" + hex(bytes) + ")");
  return {get_u16(bytes, 0), decode_vertex_key(bytes.substr(2, kVertexRowKeySize)), get_u32(bytes, 12)};
}

std::string encode_property(const PropertyValue& value) {
  std::string out;
  out += static_cast<char>(value.type_code());
  put_payload(out, value, false);
  return out;
}

PropertyValue decode_property(std::string_view bytes, std::string_view context) {
  require(!bytes.empty(), context, "empty property cell");
  size_t pos = 1;
  auto value = read_payload(bytes, pos, static_cast<uint8_t>(bytes[0]), false, context);
  require(pos == bytes.size(), context, "trailing bytes after payload");
  return value;
}

std::string encode_property_list(const Properties& props) {
  require(props.size() <= 0xFFFF, "property list", "too many properties");
  std::string out;
  put_u16(out, static_cast<uint16_t>(props.size()));
  for (const auto& [key, value] : props) {
    require(key.size() <= 0xFFFF, "property list", "key too long");
    put_u16(out, static_cast<uint16_t>(key.size()));
    out += key;
    out += static_cast<char>(value.type_code());
    put_payload(out, value, true);
  }
  return out;
}

Properties decode_property_list(std::string_view bytes, std::string_view context) {
  require(bytes.size() >= 2, context, "missing count");
  size_t count = get_u16(bytes, 0);
  size_t pos = 2;
  Properties props;
  for (size_t i = 0; i < count; ++i) {
    require(bytes.size() - pos >= 2, context, "truncated key length in entry " + std::to_string(i));
    size_t key_len = get_u16(bytes, pos);
    pos += 2;
    require(bytes.size() - pos >= key_len + 1, context, "truncated entry " + std::to_string(i));
    std::string key(bytes.substr(pos, key_len));
    pos += key_len;
    auto code = static_cast<uint8_t>(bytes[pos++]);
    props.insert_or_assign(std::move(key), read_payload(bytes, pos, code, true, context));
  }
  require(pos == bytes.size(), context, "trailing bytes after last entry");
  return props;
}

std::optional<uint16_t> LabelDictionary::find(std::string_view label) const {
  auto it = ids_.find(label);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

uint16_t LabelDictionary::assign(const std::string& label) {
  if (auto id = find(label)) return *id;
  if (labels_.size() > 0xFFFF) throw CodecError("label dictionary full");
  auto id = static_cast<uint16_t>(labels_.size());
  labels_.push_back(label);
  ids_.emplace(label, id);
  return id;
}

void LabelDictionary::restore(uint16_t id, const std::string& label) {
  if (id < labels_.size()) {
    if (labels_[id] != label)
      throw CodecError("label dictionary conflict at id " + std::to_string(id) + ": '" + labels_[id] + "' vs '" +
                       label + "'");
    return;
  }
  if (id != labels_.size()) throw CodecError("label dictionary gap before id " + std::to_string(id));
  if (ids_.count(label) != 0) throw CodecError("label '" + label + "' persisted twice");
  labels_.push_back(label);
  ids_.emplace(label, id);
}

const std::string& LabelDictionary::label(uint16_t id) const {
  if (id >= labels_.size()) throw CodecError("unknown label id " + std::to_string(id));
  return labels_[id];
}

std::vector<RowCell> encode_vertex_cells_resolved(const Vertex& v, const std::vector<Edge>& out_edges,
                                                  const std::vector<uint16_t>& target_partitions,
                                                  LabelDictionary& labels) {
  std::vector<RowCell> cells;
  std::string type;
  put_u16(type, labels.assign(v.label));
  cells.push_back({kVertexMeta, "type", std::move(type)});
  if (!v.graph_ids.empty()) {
    std::string graphs;
    for (auto g : v.graph_ids) put_u64(graphs, g);
    cells.push_back({kVertexMeta, "graphs", std::move(graphs)});
  }
  if (!out_edges.empty()) {
    uint32_t next = v.next_edge_index;
    std::vector<std::pair<uint32_t, EdgeId>> ids;
    for (const auto& e : out_edges) {
      next = std::max(next, e.index + 1);
      ids.emplace_back(e.index, e.id);
    }
    std::sort(ids.begin(), ids.end());
    std::string idx;
    put_u32(idx, next);
    cells.push_back({kVertexMeta, "idx", std::move(idx)});
    std::string eids;
    for (auto [index, id] : ids) {
      put_u32(eids, index);
      put_u64(eids, id);
    }
    cells.push_back({kVertexMeta, "eids", std::move(eids)});
  }
  for (const auto& [key, value] : v.properties) cells.push_back({kVertexProperties, key, encode_property(value)});
  for (size_t i = 0; i < out_edges.size(); ++i) {
    const auto& e = out_edges[i];
    EdgeQualifier q{labels.assign(e.label), {target_partitions[i], e.target}, e.index};
    cells.push_back({kOutEdges, encode_edge_qualifier(q), encode_property_list(e.properties)});
  }
  std::sort(cells.begin(), cells.end(), [](const RowCell& a, const RowCell& b) {
    return std::tie(a.family, a.qualifier) < std::tie(b.family, b.qualifier);
  });
  return cells;
}

VertexRecord decode_vertex_cells(VertexId id, const std::vector<RowCell>& cells, const LabelDictionary& labels) {
  VertexRecord rec;
  rec.vertex.id = id;
  std::map<uint32_t, EdgeId> eids;
  bool has_type = false;
  for (const auto& cell : cells) {
    std::string context = std::string(family_name(cell.family)) + ":" +
                          (cell.family == kOutEdges || cell.family == kInEdges ? hex(cell.qualifier) : cell.qualifier);
    switch (cell.family) {
      case kVertexMeta:
        if (cell.qualifier == "type") {
          require(cell.value.size() == 2, context, "expected 2 bytes");
          rec.vertex.label = labels.label(get_u16(cell.value));
          has_type = true;
        } else if (cell.qualifier == "graphs") {
          require(cell.value.size() % 8 == 0, context, "length not a multiple of 8");
          for (size_t p = 0; p < cell.value.size(); p += 8) rec.vertex.graph_ids.push_back(get_u64(cell.value, p));
          rec.vertex.graph_ids = make_id_set(std::move(rec.vertex.graph_ids));
        } else if (cell.qualifier == "idx") {
          require(cell.value.size() == 4, context, "expected 4 bytes");
          rec.vertex.next_edge_index = get_u32(cell.value);
        } else if (cell.qualifier == "eids") {
          require(cell.value.size() % 12 == 0, context, "length not a multiple of 12");
          for (size_t p = 0; p < cell.value.size(); p += 12) eids[get_u32(cell.value, p)] = get_u64(cell.value, p + 4);
        } else {
          throw CodecError(context + ": unknown meta column");
        }
        break;
      case kVertexProperties:
        rec.vertex.properties.insert_or_assign(cell.qualifier, decode_property(cell.value, context));
        break;
      case kOutEdges: {
        auto q = decode_edge_qualifier(cell.qualifier);
        Edge e;
        e.source = id;
        e.target = q.opposite.id;
        e.index = q.index;
        e.label = labels.label(q.label);
        e.properties = decode_property_list(cell.value, context);
        rec.out_edges.push_back(std::move(e));
        break;
      }
      case kInEdges: {
        auto q = decode_edge_qualifier(cell.qualifier);
        require(cell.value.empty(), context, "in-edge cell carries a value");
        rec.in_edges.push_back({labels.label(q.label), q.opposite.id, q.index});
        break;
      }
      default:
        throw CodecError(context + ": family does not belong to the vertex table");
    }
  }
  if (!has_type) throw CodecError("vertex " + std::to_string(id) + ": missing meta:type");
  for (auto& e : rec.out_edges) {
    auto it = eids.find(e.index);
    if (it == eids.end())
      throw CodecError("vertex " + std::to_string(id) + ": no edge id for index " + std::to_string(e.index));
    e.id = it->second;
  }
  return rec;
}

}  // namespace epgm::store
