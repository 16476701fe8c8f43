#include <filesystem>

#include "doctest.h"
#include "epgm/json_io.hpp"
#include "epgm/operators.hpp"
#include "epgm/store/graph_store.hpp"
#include "support.hpp"

using namespace epgm;
using namespace epgm::store;
using namespace std::string_literals;
using test::bytes;
using test::u32_bytes;
using test::u64_bytes;
using test::vertex_key_bytes;

namespace {

const Cell* find_cell(const std::vector<Cell>& cells, uint8_t family, std::string_view qualifier) {
  for (const auto& c : cells)
    if (c.family == family && c.qualifier == qualifier) return &c;
  return nullptr;
}

StoreConfig config_at(const std::filesystem::path& path, uint16_t partitions = 1,
                      PartitionStrategy strategy = PartitionStrategy::Hash) {
  StoreConfig config;
  config.path = path;
  config.partitions = partitions;
  config.strategy = strategy;
  return config;
}

}  // namespace

TEST_CASE("row keys and qualifiers are fixed-width big-endian") {
  CHECK(encode_vertex_key({0, 0}) == std::string(10, '\0'));
  CHECK(encode_vertex_key({1, 258}) == vertex_key_bytes(1, 258));
  CHECK(decode_vertex_key(vertex_key_bytes(3, 0x0102030405060708ULL)) == VertexKey{3, 0x0102030405060708ULL});
  CHECK(encode_graph_key(2) == u64_bytes(2));
  CHECK(encode_label_key(5) == bytes({0, 5}));

  EdgeQualifier q{2, {0, 1}, 0};
  auto encoded = encode_edge_qualifier(q);
  CHECK(encoded.size() == 16);
  CHECK(encoded == bytes({0, 2}) + vertex_key_bytes(0, 1) + u32_bytes(0));
  CHECK(decode_edge_qualifier(encoded) == q);
  CHECK_THROWS_AS(decode_edge_qualifier(encoded.substr(0, 15)), CodecError);

  workflow::Random rng(3);
  std::vector<std::pair<VertexKey, std::string>> keys;
  for (int i = 0; i < 200; ++i) {
    VertexKey k{static_cast<uint16_t>(rng.below(4)), rng.below(1ULL << 40)};
    keys.emplace_back(k, encode_vertex_key(k));
  }
  for (const auto& [a, ka] : keys)
    for (const auto& [b, kb] : keys)
      CHECK((ka < kb) == (std::pair(a.partition, a.id) < std::pair(b.partition, b.id)));
}

TEST_CASE("property cells") {
  CHECK(encode_property(PropertyValue("Alice")) == "\x05"s + "Alice");
  CHECK(encode_property(PropertyValue(int64_t{2014})) == "\x00"s + u64_bytes(2014));
  CHECK(encode_property(PropertyValue(true)) == bytes({2, 1}));
  CHECK(encode_property(PropertyValue(1.0)) == bytes({1, 0x3F, 0xF0, 0, 0, 0, 0, 0, 0}));
  CHECK(encode_property(PropertyValue(int64_t{-1})) == "\x00"s + std::string(8, '\xFF'));

  Properties since{{"since", PropertyValue(int64_t{2014})}};
  CHECK(encode_property_list(since) == bytes({0, 1, 0, 5}) + "since" + "\x00"s + u64_bytes(2014));
  CHECK(encode_property_list({}) == bytes({0, 0}));

  CHECK_THROWS_AS(decode_property("\x09"s + u64_bytes(1)), CodecError);
  CHECK_THROWS_AS(decode_property("\x00"s + "abc"), CodecError);
  CHECK_THROWS_AS(decode_property(""), CodecError);
  CHECK_THROWS_AS(decode_property_list(bytes({0, 1, 0, 9}) + "x"), CodecError);

  workflow::Random rng(4);
  for (int i = 0; i < 300; ++i) {
    auto value = test::random_value(rng);
    CHECK(decode_property(encode_property(value)) == value);
    auto props = test::random_properties(rng, 6);
    CHECK(decode_property_list(encode_property_list(props)) == props);
  }
}

TEST_CASE("partitioners") {
  CHECK(Partitioner::hash(4).assign(10) == 2);
  auto range = Partitioner::range({0, 100, 200});
  CHECK(range.assign(150) == 1);
  CHECK(range.assign(0) == 0);
  CHECK(range.assign(99) == 0);
  CHECK(range.assign(200) == 2);
  CHECK(range.assign(~0ULL) == 2);
  CHECK(range.count() == 3);

  std::vector<size_t> counts(10, 0);
  auto hash = Partitioner::hash(10);
  for (VertexId id = 0; id < 1000; ++id) ++counts[hash.assign(id)];
  for (auto c : counts) CHECK(c == 100);

  workflow::Random rng(8);
  for (int round = 0; round < 100; ++round) {
    uint16_t p = static_cast<uint16_t>(1 + rng.below(16));
    size_t n = rng.below(5000);
    std::vector<size_t> bucket(p, 0);
    auto h = Partitioner::hash(p);
    for (VertexId id = 0; id < n; ++id) ++bucket[h.assign(id)];
    auto [lo, hi] = std::minmax_element(bucket.begin(), bucket.end());
    CHECK(*lo == n / p);
    CHECK(*hi == (n + p - 1) / p);
  }

  auto width = Partitioner::range_for(4, 1071);
  for (VertexId id = 0; id <= 1071; ++id) CHECK(width.assign(id) < 4);
  CHECK(width.assign(0) == 0);
  CHECK(width.assign(1071) == 3);
  CHECK(Partitioner::equal_width(4).assign(~0ULL) == 3);
  CHECK(parse_strategy("range") == PartitionStrategy::Range);
  CHECK(strategy_name(PartitionStrategy::Hash) == "hash");
  CHECK_THROWS(parse_strategy("zigzag"));
  CHECK_THROWS(Partitioner::range({5, 1}));
  CHECK_THROWS(Partitioner::hash(0));
}

TEST_CASE("key-value versions and as-of reads") {
  test::ScratchDir dir("kv-versions");
  KvStore kv(dir.path(), 3, SyncMode::Always);
  std::string row = encode_vertex_key({0, 0});
  std::vector<uint64_t> stamps;
  for (int i = 0; i < 5; ++i)
    stamps.push_back(kv.write({{kVertexProperties, row, "name", "\x05v" + std::to_string(i)}}));
  for (size_t i = 1; i < stamps.size(); ++i) CHECK(stamps[i] == stamps[i - 1] + 1);
  auto versions = kv.versions(kVertexProperties, row, "name");
  REQUIRE(versions.size() == 3);
  CHECK(versions[0].timestamp == stamps[4]);
  CHECK(versions[2].timestamp == stamps[2]);
  CHECK(kv.get(kVertexProperties, row, "name") == "\x05v4");
  CHECK_FALSE(kv.get(kVertexProperties, row, "name", stamps[1]).has_value());

  std::optional<uint64_t> previous;
  for (uint64_t t = stamps[2]; t <= stamps[4] + 2; ++t) {
    auto value = kv.get(kVertexProperties, row, "name", t);
    REQUIRE(value.has_value());
    uint64_t index = std::stoull(value->substr(2));
    CHECK(stamps[index] <= t);
    if (previous) CHECK(index >= *previous);
    previous = index;
  }

  auto deleted = kv.write({{kVertexProperties, row, "name", std::nullopt}});
  CHECK_FALSE(kv.get(kVertexProperties, row, "name").has_value());
  CHECK(kv.get(kVertexProperties, row, "name", deleted - 1) == "\x05v4");
  kv.write({{kVertexProperties, row, "name", "\x05x"}}, 1000);
  CHECK(kv.last_timestamp() == 1000);
  kv.write({{kVertexProperties, row, "name", "\x05y"}}, 1000);
  CHECK(kv.get(kVertexProperties, row, "name") == "\x05y");
  CHECK(kv.versions(kVertexProperties, row, "name")[0].timestamp == 1000);
}

TEST_CASE("version retention across reopen and flush") {
  test::ScratchDir dir("kv-retention");
  std::string row = encode_graph_key(1);
  {
    KvStore kv(dir.path(), 3, SyncMode::Always);
    for (int i = 0; i < 7; ++i) kv.write({{kGraphProperties, row, "k", "\x05" + std::to_string(i)}});
  }
  {
    KvStore kv(dir.path(), 3, SyncMode::Always);
    CHECK(kv.versions(kGraphProperties, row, "k").size() == 3);
    CHECK(kv.get(kGraphProperties, row, "k") == "\x05" "6");
    kv.flush();
    CHECK(kv.segment_count() == 1);
    CHECK(kv.journal_size() == 0);
    kv.write({{kGraphProperties, row, "k", "\x05" "7"}});
  }
  KvStore kv(dir.path(), 3, SyncMode::Always);
  auto versions = kv.versions(kGraphProperties, row, "k");
  REQUIRE(versions.size() == 3);
  CHECK(versions[0].value == "\x05" "7");
  CHECK(versions[2].value == "\x05" "5");
  CHECK(kv.last_timestamp() == 8);
}

TEST_CASE("journal replay, torn tails and corruption") {
  test::ScratchDir dir("kv-journal");
  std::string row = encode_vertex_key({0, 7});
  uint64_t first_batch_end = 0;
  {
    KvStore kv(dir.path(), 3, SyncMode::Manual);
    kv.write({{kVertexMeta, row, "type", bytes({0, 0})}});
    kv.simulate_crash();
    CHECK_FALSE(kv.get(kVertexMeta, row, "type").has_value());
    kv.write({{kVertexMeta, row, "type", bytes({0, 1})}});
    kv.sync();
    kv.simulate_crash();
    CHECK(kv.get(kVertexMeta, row, "type") == bytes({0, 1}));
    first_batch_end = kv.journal_size();
    kv.write({{kVertexMeta, row, "type", bytes({0, 2})}, {kVertexProperties, row, "a", "\x05" "b"}});
    kv.sync();
  }
  auto journal = dir.path() / "journal.log";
  auto full_size = std::filesystem::file_size(journal);
  REQUIRE(full_size > first_batch_end);

  std::filesystem::resize_file(journal, full_size - 3);
  {
    KvStore kv(dir.path(), 3, SyncMode::Always);
    CHECK(kv.get(kVertexMeta, row, "type") == bytes({0, 1}));
    CHECK_FALSE(kv.get(kVertexProperties, row, "a").has_value());
    CHECK(std::filesystem::file_size(journal) == first_batch_end);
    kv.write({{kVertexProperties, row, "a", "\x05" "c"}});
  }
  {
    KvStore kv(dir.path(), 3, SyncMode::Always);
    CHECK(kv.get(kVertexProperties, row, "a") == "\x05" "c");
  }

  std::string content = test::read_text(journal);
  content[first_batch_end + 13] ^= 0x40;
  {
    std::ofstream out(journal, std::ios::binary | std::ios::trunc);
    out << content;
  }
  try {
    KvStore kv(dir.path(), 3, SyncMode::Always);
    FAIL("corruption not detected");
  } catch (const CorruptionError& e) {
    CHECK(e.offset() == first_batch_end);
  }
}

TEST_CASE("scans follow row-key order") {
  test::ScratchDir dir("kv-scan");
  KvStore kv(dir.path(), 3, SyncMode::Manual);
  workflow::Random rng(12);
  std::set<std::string> rows;
  for (int i = 0; i < 100; ++i) {
    auto row = encode_vertex_key({static_cast<uint16_t>(rng.below(3)), rng.below(1000)});
    rows.insert(row);
    kv.write({{kVertexMeta, row, "type", bytes({0, 0})}});
  }
  std::vector<std::string> seen;
  kv.scan(kVertexTable, "", "", std::nullopt, [&](const std::string& row, const std::vector<Cell>&) { seen.push_back(row); });
  CHECK(seen == std::vector<std::string>(rows.begin(), rows.end()));
  std::vector<std::string> bounded;
  auto lo = encode_vertex_key({1, 0}), hi = encode_vertex_key({2, 0});
  kv.scan(kVertexTable, lo, hi, std::nullopt, [&](const std::string& row, const std::vector<Cell>&) { bounded.push_back(row); });
  for (const auto& r : bounded) CHECK((r >= lo && r < hi));
  CHECK(bounded.size() == static_cast<size_t>(std::count_if(rows.begin(), rows.end(), [&](const std::string& r) { return r >= lo && r < hi; })));
}

TEST_CASE("sample vertex row matches the documented byte layout") {
  test::ScratchDir dir("vertex-rows");
  GraphStore store(config_at(dir.path()));
  auto db = test::sample();
  store.write_database(db);
  CHECK(*store.labels().find("Person") == 0);
  CHECK(*store.labels().find("Forum") == 1);
  CHECK(*store.labels().find("knows") == 2);
  CHECK(*store.labels().find("hasMember") == 3);
  CHECK(*store.labels().find("hasModerator") == 4);
  CHECK(*store.labels().find("Community") == 5);

  auto row = store.raw_row(kVertexTable, vertex_key_bytes(0, 0));
  REQUIRE(find_cell(row, kVertexMeta, "type"));
  CHECK(find_cell(row, kVertexMeta, "type")->value == bytes({0, 0}));
  CHECK(find_cell(row, kVertexMeta, "graphs")->value == u64_bytes(0) + u64_bytes(2));
  CHECK(find_cell(row, kVertexProperties, "name")->value == "\x05"s + "Alice");
  CHECK(find_cell(row, kVertexProperties, "gender")->value == "\x05"s + "f");
  CHECK(find_cell(row, kVertexProperties, "city")->value == "\x05"s + "Leipzig");
  std::string qualifier = bytes({0, 2}) + vertex_key_bytes(0, 1) + u32_bytes(0);
  REQUIRE(find_cell(row, kOutEdges, qualifier));
  CHECK(find_cell(row, kOutEdges, qualifier)->value == bytes({0, 1, 0, 5}) + "since" + "\x00"s + u64_bytes(2014));
  size_t out = 0;
  for (const auto& c : row) out += c.family == kOutEdges;
  CHECK(out == 1);

  auto v1 = store.raw_row(kVertexTable, vertex_key_bytes(0, 1));
  auto mirror = find_cell(v1, kInEdges, bytes({0, 2}) + vertex_key_bytes(0, 0) + u32_bytes(0));
  REQUIRE(mirror);
  CHECK(mirror->value.empty());

  EpgmDatabase plain;
  plain.add_vertex("Tag", {{"name", "x"}});
  test::ScratchDir other("bare");
  GraphStore bare_store(config_at(other.path()));
  bare_store.write_database(plain);
  auto bare_row = bare_store.raw_row(kVertexTable, vertex_key_bytes(0, 0));
  CHECK(find_cell(bare_row, kVertexMeta, "type"));
  CHECK_FALSE(find_cell(bare_row, kVertexMeta, "graphs"));
  CHECK_FALSE(find_cell(bare_row, kVertexMeta, "idx"));
}

TEST_CASE("sample graph row matches the documented byte layout") {
  test::ScratchDir dir("graph-rows");
  GraphStore store(config_at(dir.path()));
  store.write_database(test::sample());
  auto row = store.raw_row(kGraphTable, u64_bytes(2));
  CHECK(find_cell(row, kGraphMeta, "type")->value == bytes({0, 5}));
  CHECK(find_cell(row, kGraphMeta, "vertices")->value ==
        vertex_key_bytes(0, 0) + vertex_key_bytes(0, 1) + vertex_key_bytes(0, 2) + vertex_key_bytes(0, 3));
  CHECK(find_cell(row, kGraphProperties, "vertexCount")->value == "\x00"s + u64_bytes(4));
  auto edges = find_cell(row, kGraphEdges, vertex_key_bytes(0, 1));
  REQUIRE(edges);
  CHECK(edges->value == bytes({0, 2}) + vertex_key_bytes(0, 0) + u32_bytes(0) + bytes({0, 2}) + vertex_key_bytes(0, 2) +
                            u32_bytes(1));
}

TEST_CASE("vertex and graph reads with history") {
  test::ScratchDir dir("history");
  GraphStore store(config_at(dir.path(), 2));
  auto db = test::sample();
  store.write_database(db);
  auto v0 = store.get_vertex(0);
  REQUIRE(v0);
  CHECK(v0->vertex == db.vertex(0));
  CHECK(v0->out_edges.size() == 1);
  CHECK(v0->partition == 0);
  CHECK(store.get_vertex(1)->partition == 1);
  CHECK_FALSE(store.get_vertex(99).has_value());
  CHECK_FALSE(store.get_graph(99).has_value());

  auto t1 = store.kv().last_timestamp();
  Vertex renamed = db.vertex(0);
  renamed.properties.insert_or_assign("name", PropertyValue("Alicia"));
  std::vector<Edge> out{db.edge(0)};
  store.put_vertex(renamed, out);
  CHECK(store.get_vertex(0)->vertex.properties.at("name") == PropertyValue("Alicia"));
  CHECK(store.get_vertex(0, t1)->vertex.properties.at("name") == PropertyValue("Alice"));

  auto g0 = db.graph(0);
  g0.vertex_ids = {0, 1};
  g0.edge_ids = {0, 1};
  auto t2 = store.put_graph(g0);
  CHECK(store.get_graph(0)->vertex_ids == IdSet{0, 1});
  CHECK(store.get_graph(0, t1)->vertex_ids == IdSet{0, 1, 4});
  CHECK(store.get_graph(0, t1)->edge_ids == IdSet{0, 1, 6, 21});
  CHECK(store.get_graph(0, t2)->edge_ids == IdSet{0, 1});

  store.put_vertex(db.vertex(0), {});
  for (const auto& in : store.get_vertex(1)->in_edges) CHECK(in.source != 0);
  CHECK(store.audit_mirrors().empty());

  auto temp = ops::combine(db.graph(0), db.graph(2));
  CHECK_THROWS_AS(store.put_graph(temp), StoreError);
}

TEST_CASE("persisting operator results") {
  test::ScratchDir dir("persist");
  GraphStore store(config_at(dir.path()));
  auto db = test::sample();
  store.write_database(db);
  auto combined = ops::combine(db.graph(0), db.graph(2));
  auto id = store.persist_graph(combined);
  CHECK(id == 3);
  auto loaded = store.get_graph(id);
  REQUIRE(loaded);
  CHECK(loaded->vertex_ids == IdSet{0, 1, 2, 3, 4});
  CHECK(loaded->edge_ids == combined.edge_ids);
  CHECK(store.get_vertex(4)->vertex.graph_ids == IdSet{0, 3});

  auto empty = db.database_graph();
  empty.vertex_ids.clear();
  empty.edge_ids.clear();
  auto empty_id = store.persist_graph(empty);
  auto row = store.raw_row(kGraphTable, u64_bytes(empty_id));
  REQUIRE(find_cell(row, kGraphMeta, "vertices"));
  CHECK(find_cell(row, kGraphMeta, "vertices")->value.empty());
  CHECK(store.get_graph(empty_id)->vertex_ids.empty());
  CHECK(store.graph_ids() == std::vector<GraphId>{0, 1, 2, 3, 4});
}

TEST_CASE("store configuration is fixed at creation") {
  test::ScratchDir dir("config");
  {
    GraphStore store(config_at(dir.path(), 2));
    store.write_database(test::sample());
  }
  auto config = read_store_config(dir.path());
  REQUIRE(config);
  CHECK(config->partitions == 2);
  CHECK_THROWS_AS(GraphStore(config_at(dir.path(), 3)), StoreError);
  CHECK_THROWS_AS(GraphStore(config_at(dir.path(), 2, PartitionStrategy::Range)), StoreError);
  auto reopened = GraphStore::open_existing(dir.path());
  CHECK(reopened->stats().vertices == 11);
  CHECK(reopened->stats().edges == 24);
  CHECK(reopened->stats().graphs == 3);
  CHECK_FALSE(read_store_config(dir.path() / "nothing").has_value());

  test::ScratchDir fresh("fresh");
  GraphStore empty(config_at(fresh.path()));
  CHECK(empty.stats().vertices == 0);
  CHECK(empty.load_database().vertex_count() == 0);
}

TEST_CASE("vertex scans per partition") {
  test::ScratchDir dir("scan");
  GraphStore store(config_at(dir.path(), 4));
  store.write_database(test::sample());
  std::vector<std::pair<uint16_t, VertexId>> full;
  store.scan_vertices(std::nullopt, std::nullopt,
                      [&](const StoredVertex& v) { full.emplace_back(v.partition, v.vertex.id); });
  CHECK(full.size() == 11);
  CHECK(std::is_sorted(full.begin(), full.end()));
  std::vector<std::pair<uint16_t, VertexId>> joined;
  for (uint16_t p = 0; p < 4; ++p)
    store.scan_vertices(p, std::nullopt, [&](const StoredVertex& v) {
      CHECK(v.partition == p);
      joined.emplace_back(v.partition, v.vertex.id);
    });
  CHECK(joined == full);
  auto stats = store.stats();
  CHECK(stats.partition_rows == std::vector<size_t>{3, 3, 3, 2});
  CHECK(stats.labels.at("Person") == 6);

  test::ScratchDir sparse_dir("sparse");
  GraphStore sparse(config_at(sparse_dir.path(), 3, PartitionStrategy::Range));
  EpgmDatabase small;
  small.add_vertex("A");
  sparse.write_database(small);
  size_t in_last = 0;
  sparse.scan_vertices(2, std::nullopt, [&](const StoredVertex&) { ++in_last; });
  CHECK(in_last == 0);
}

TEST_CASE("random databases round-trip through the store") {
  workflow::Random rng(2024);
  test::RandomDbSpec spec;
  spec.max_vertices = 12;
  spec.max_edges = 24;
  for (int round = 0; round < 100; ++round) {
    auto db = test::random_database(rng, spec);
    test::ScratchDir dir("roundtrip");
    auto config = config_at(dir.path(), static_cast<uint16_t>(1 + rng.below(4)),
                            rng.chance(0.5) ? PartitionStrategy::Hash : PartitionStrategy::Range);
    config.sync = SyncMode::Manual;
    auto expected = database_to_json(db);
    {
      GraphStore store(config);
      store.write_database(db);
      CHECK(store.audit_mirrors().empty());
      CHECK(database_to_json(store.load_database()) == expected);
      for (const auto& [id, v] : db.elements().vertices()) {
        auto stored = store.get_vertex(id);
        REQUIRE(stored);
        CHECK(stored->vertex.properties == v.properties);
        CHECK(stored->vertex.label == v.label);
      }
      if (rng.chance(0.5)) store.flush();
      else store.sync();
    }
    auto reopened = GraphStore::open_existing(dir.path());
    CHECK(database_to_json(reopened->load_database()) == expected);
    CHECK(reopened->audit_mirrors().empty());
  }
}

TEST_CASE("audit detects a missing mirror") {
  test::ScratchDir dir("audit");
  GraphStore store(config_at(dir.path()));
  store.write_database(test::sample());
  std::string qualifier = bytes({0, 2}) + vertex_key_bytes(0, 0) + u32_bytes(0);
  store.kv().write({{kInEdges, vertex_key_bytes(0, 1), qualifier, std::nullopt}});
  auto problems = store.audit_mirrors();
  REQUIRE(problems.size() == 1);
  CHECK(problems[0].rfind("missing mirror:", 0) == 0);
  store.kv().write({{kInEdges, vertex_key_bytes(0, 5), qualifier, ""}});
  CHECK(store.audit_mirrors().size() == 2);
}
