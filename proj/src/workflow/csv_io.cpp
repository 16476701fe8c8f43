#include "epgm/workflow/csv_io.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <unordered_map>

namespace epgm::workflow {

namespace fs = std::filesystem;

namespace {

std::string read_text(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw ImportError("cannot read " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct Column {
  std::string key;
  TypeCode type = TypeCode::String;
};

// A table with its header split into reserved columns and typed property
// columns. Line numbers count the header as line 1.
struct Table {
  std::string file;
  std::map<std::string, size_t> reserved;
  std::vector<std::pair<size_t, Column>> properties;
  std::vector<CsvRow> rows;

  std::string where(size_t row) const { return file + " line " + std::to_string(row + 2); }

  const CsvField* field(const CsvRow& row, const std::string& name) const {
    auto it = reserved.find(name);
    if (it == reserved.end() || it->second >= row.size()) return nullptr;
    return &row[it->second];
  }
};

TypeCode parse_type(const std::string& name, const std::string& file) {
  if (name == "string") return TypeCode::String;
  if (name == "int") return TypeCode::Int64;
  if (name == "float") return TypeCode::Float64;
  if (name == "bool") return TypeCode::Boolean;
  throw ImportError(file + ": unknown column type '" + name + "'");
}

std::string_view type_suffix(TypeCode code) {
  switch (code) {
    case TypeCode::Int64:
      return "int";
    case TypeCode::Float64:
      return "float";
    case TypeCode::Boolean:
      return "bool";
    case TypeCode::String:
      return "string";
  }
  return "string";
}

Table load_table(const fs::path& path, const std::vector<std::string>& reserved_names, size_t required) {
  Table t;
  t.file = path.filename().string();
  auto rows = parse_csv(read_text(path), t.file);
  if (rows.empty()) throw ImportError(t.file + ": missing header");
  const auto& header = rows.front();
  for (size_t i = 0; i < header.size(); ++i) {
    const std::string& name = header[i].text;
    bool is_reserved = false;
    for (const auto& r : reserved_names) is_reserved |= (name == r);
    if (is_reserved) {
      t.reserved[name] = i;
      continue;
    }
    auto colon = name.rfind(':');
    Column c;
    if (colon == std::string::npos) {
      c.key = name;
    } else {
      c.key = name.substr(0, colon);
      c.type = parse_type(name.substr(colon + 1), t.file);
    }
    if (c.key.empty()) throw ImportError(t.file + ": empty column name in header");
    t.properties.emplace_back(i, c);
  }
  for (size_t i = 0; i < required; ++i)
    if (!t.reserved.count(reserved_names[i]))
      throw ImportError(t.file + ": missing column '" + reserved_names[i] + "'");
  t.rows.assign(rows.begin() + 1, rows.end());
  // A trailing blank line parses as a single empty field.
  std::erase_if(t.rows, [](const CsvRow& r) { return r.size() == 1 && r[0].text.empty() && !r[0].quoted; });
  return t;
}

uint64_t parse_id(const CsvField* f, const Table& t, size_t row, const std::string& column) {
  if (!f || f->text.empty()) throw ImportError(t.where(row) + ": missing " + column);
  uint64_t v = 0;
  auto [end, ec] = std::from_chars(f->text.data(), f->text.data() + f->text.size(), v);
  if (ec != std::errc() || end != f->text.data() + f->text.size())
    throw ImportError(t.where(row) + ": " + column + " '" + f->text + "' is not an unsigned integer");
  return v;
}

std::vector<uint64_t> parse_id_list(const CsvField* f, const Table& t, size_t row, const std::string& column) {
  std::vector<uint64_t> ids;
  if (!f) return ids;
  std::istringstream in(f->text);
  std::string token;
  while (in >> token) {
    CsvField item{token, false};
    ids.push_back(parse_id(&item, t, row, column));
  }
  return ids;
}

PropertyValue parse_typed(const CsvField& f, TypeCode type, const Table& t, size_t row, const std::string& key) {
  const std::string& s = f.text;
  auto bad = [&]() -> ImportError {
    return ImportError(t.where(row) + ": column '" + key + "' expects " + std::string(type_suffix(type)) + ", got '" +
                       s + "'");
  };
  switch (type) {
    case TypeCode::String:
      return PropertyValue(s);
    case TypeCode::Int64: {
      int64_t v = 0;
      auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || end != s.data() + s.size()) throw bad();
      return PropertyValue(v);
    }
    case TypeCode::Float64: {
      double v = 0;
      auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || end != s.data() + s.size()) throw bad();
      return PropertyValue(v);
    }
    case TypeCode::Boolean:
      if (s == "true") return PropertyValue(true);
      if (s == "false") return PropertyValue(false);
      throw bad();
  }
  throw bad();
}

Properties parse_properties(const CsvRow& r, const Table& t, size_t row) {
  Properties props;
  for (const auto& [index, column] : t.properties) {
    if (index >= r.size()) continue;
    const CsvField& f = r[index];
    if (f.text.empty() && !f.quoted) continue;
    props.insert_or_assign(column.key, parse_typed(f, column.type, t, row, column.key));
  }
  return props;
}

std::string quote(const std::string& s) {
  bool needs = s.empty() || s.find_first_of(",\"\n\r") != std::string::npos;
  if (!needs) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string render(const PropertyValue& v) {
  if (v.is_string()) return quote(v.as_string());
  if (v.is_bool()) return v.as_bool() ? "true" : "false";
  if (v.is_int()) return std::to_string(v.as_int());
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v.as_float());
  return std::string(buf, end);
}

// Property columns across a set of property maps, keys in sorted order.
template <class Range, class Get>
std::vector<Column> columns_of(const Range& items, Get get, const std::string& file) {
  std::map<std::string, TypeCode> types;
  for (const auto& item : items) {
    for (const auto& [key, value] : get(item)) {
      auto [it, inserted] = types.emplace(key, value.type_code());
      if (!inserted && it->second != value.type_code())
        throw ImportError(file + ": property '" + key + "' has values of different types");
    }
  }
  std::vector<Column> cols;
  for (const auto& [key, type] : types) cols.push_back({key, type});
  return cols;
}

std::string header_of(const std::string& reserved, const std::vector<Column>& cols) {
  std::string out = reserved;
  for (const auto& c : cols) out += "," + quote(c.key + ":" + std::string(type_suffix(c.type)));
  return out + "\n";
}

std::string cells_of(const Properties& props, const std::vector<Column>& cols) {
  std::string out;
  for (const auto& c : cols) {
    out += ",";
    auto it = props.find(c.key);
    if (it != props.end()) out += render(it->second);
  }
  return out + "\n";
}

std::string join_ids(const IdSet& ids) {
  std::string out;
  for (auto id : ids) {
    if (!out.empty()) out += ' ';
    out += std::to_string(id);
  }
  return out;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw ImportError("cannot write " + file.string());
}

}  // namespace

std::vector<CsvRow> parse_csv(std::string_view text, const std::string& file) {
  std::vector<CsvRow> rows;
  CsvRow row;
  CsvField field;
  size_t i = 0;
  size_t line = 1;
  bool at_field_start = true;
  auto end_field = [&] {
    row.push_back(std::move(field));
    field = CsvField{};
    at_field_start = true;
  };
  auto end_row = [&] {
    end_field();
    rows.push_back(std::move(row));
    row.clear();
  };
  while (i < text.size()) {
    char c = text[i];
    if (at_field_start && c == '"') {
      field.quoted = true;
      size_t start_line = line;
      ++i;
      while (true) {
        if (i >= text.size()) throw ImportError(file + " line " + std::to_string(start_line) + ": unterminated quote");
        if (text[i] == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            field.text += '"';
            i += 2;
            continue;
          }
          ++i;
          break;
        }
        if (text[i] == '\n') ++line;
        field.text += text[i++];
      }
      at_field_start = false;
      continue;
    }
    at_field_start = false;
    if (c == ',') {
      end_field();
    } else if (c == '\n' || c == '\r') {
      end_row();
      if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      ++line;
    } else {
      field.text += c;
    }
    ++i;
  }
  if (!row.empty() || !field.text.empty() || field.quoted) end_row();
  return rows;
}

EpgmDatabase read_csv_database(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw ImportError(dir.string() + " is not a directory");
  EpgmDatabase db;
  if (fs::exists(dir / "labels.csv")) {
    auto labels = load_table(dir / "labels.csv", {"label"}, 1);
    for (size_t r = 0; r < labels.rows.size(); ++r) {
      const auto* f = labels.field(labels.rows[r], "label");
      if (!f || f->text.empty()) throw ImportError(labels.where(r) + ": empty label");
      db.declare_label(f->text);
    }
  }

  auto vertices = load_table(dir / "vertices.csv", {"id", "label"}, 2);
  for (size_t r = 0; r < vertices.rows.size(); ++r) {
    const auto& row = vertices.rows[r];
    Vertex v;
    v.id = parse_id(vertices.field(row, "id"), vertices, r, "id");
    v.label = vertices.field(row, "label") ? vertices.field(row, "label")->text : "";
    if (v.label.empty()) throw ImportError(vertices.where(r) + ": missing label");
    v.properties = parse_properties(row, vertices, r);
    if (db.elements().find_vertex(v.id))
      throw ImportError(vertices.where(r) + ": duplicate vertex id " + std::to_string(v.id));
    db.insert_vertex(std::move(v));
  }

  if (fs::exists(dir / "edges.csv")) {
    auto edges = load_table(dir / "edges.csv", {"id", "source", "target", "label", "index"}, 4);
    std::unordered_map<VertexId, uint32_t> next_index;
    for (size_t r = 0; r < edges.rows.size(); ++r) {
      const auto& row = edges.rows[r];
      Edge e;
      e.id = parse_id(edges.field(row, "id"), edges, r, "id");
      e.source = parse_id(edges.field(row, "source"), edges, r, "source");
      e.target = parse_id(edges.field(row, "target"), edges, r, "target");
      e.label = edges.field(row, "label") ? edges.field(row, "label")->text : "";
      if (e.label.empty()) throw ImportError(edges.where(r) + ": missing label");
      for (auto [end, name] : {std::pair{e.source, "source"}, std::pair{e.target, "target"}})
        if (!db.elements().find_vertex(end))
          throw ImportError(edges.where(r) + ": edge " + std::to_string(e.id) + " " + name + " vertex " +
                            std::to_string(end) + " does not exist");
      if (db.elements().find_edge(e.id))
        throw ImportError(edges.where(r) + ": duplicate edge id " + std::to_string(e.id));
      const auto* index = edges.field(row, "index");
      uint32_t& next = next_index[e.source];
      if (index && !index->text.empty()) {
        uint64_t value = parse_id(index, edges, r, "index");
        if (value > UINT32_MAX) throw ImportError(edges.where(r) + ": index out of range");
        e.index = static_cast<uint32_t>(value);
      } else {
        e.index = next;
      }
      next = std::max(next, e.index + 1);
      e.properties = parse_properties(row, edges, r);
      db.insert_edge(std::move(e));
    }
  }

  if (fs::exists(dir / "graphs.csv")) {
    auto graphs = load_table(dir / "graphs.csv", {"id", "label", "vertices", "edges"}, 2);
    for (size_t r = 0; r < graphs.rows.size(); ++r) {
      const auto& row = graphs.rows[r];
      GraphHead head;
      head.id = parse_id(graphs.field(row, "id"), graphs, r, "id");
      head.label = graphs.field(row, "label") ? graphs.field(row, "label")->text : "";
      if (head.label.empty()) throw ImportError(graphs.where(r) + ": missing label");
      head.properties = parse_properties(row, graphs, r);
      auto vs = parse_id_list(graphs.field(row, "vertices"), graphs, r, "vertices");
      auto es = parse_id_list(graphs.field(row, "edges"), graphs, r, "edges");
      for (auto v : vs)
        if (!db.elements().find_vertex(v))
          throw ImportError(graphs.where(r) + ": graph vertex " + std::to_string(v) + " does not exist");
      for (auto e : es)
        if (!db.elements().find_edge(e))
          throw ImportError(graphs.where(r) + ": graph edge " + std::to_string(e) + " does not exist");
      if (db.has_graph(head.id)) throw ImportError(graphs.where(r) + ": duplicate graph id " + std::to_string(head.id));
      try {
        db.insert_graph(std::move(head), std::move(vs), std::move(es));
      } catch (const ClosureError& err) {
        throw ImportError(graphs.where(r) + ": " + err.what());
      }
    }
  }
  return db;
}

void write_csv_database(const EpgmDatabase& db, const fs::path& dir) {
  fs::create_directories(dir);
  std::string labels = "label\n";
  for (const auto& l : db.labels()) labels += quote(l) + "\n";
  write_text(dir / "labels.csv", labels);

  const auto& vs = db.elements().vertices();
  auto vcols = columns_of(vs, [](const auto& kv) -> const Properties& { return kv.second.properties; }, "vertices.csv");
  std::string out = header_of("id,label", vcols);
  for (const auto& [id, v] : vs) out += std::to_string(id) + "," + quote(v.label) + cells_of(v.properties, vcols);
  write_text(dir / "vertices.csv", out);

  const auto& es = db.elements().edges();
  auto ecols = columns_of(es, [](const auto& kv) -> const Properties& { return kv.second.properties; }, "edges.csv");
  out = header_of("id,source,target,label,index", ecols);
  for (const auto& [id, e] : es)
    out += std::to_string(id) + "," + std::to_string(e.source) + "," + std::to_string(e.target) + "," +
           quote(e.label) + "," + std::to_string(e.index) + cells_of(e.properties, ecols);
  write_text(dir / "edges.csv", out);

  auto graphs = db.graphs();
  auto gcols = columns_of(graphs, [](const LogicalGraph& g) -> const Properties& { return g.head.properties; },
                          "graphs.csv");
  out = header_of("id,label,vertices,edges", gcols);
  for (const auto& g : graphs)
    out += std::to_string(g.head.id) + "," + quote(g.head.label) + "," + join_ids(g.vertex_ids) + "," +
           join_ids(g.edge_ids) + cells_of(g.head.properties, gcols);
  write_text(dir / "graphs.csv", out);
}

}  // namespace epgm::workflow
