// Acceptance suite: one line per criterion, non-zero exit if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>

#include "epgm/grala/interpreter.hpp"
#include "epgm/json_io.hpp"
#include "epgm/operators.hpp"
#include "epgm/pattern.hpp"
#include "epgm/store/graph_store.hpp"
#include "epgm/workflow/generators.hpp"
#include "epgm/workflow/workflow.hpp"
#include "support.hpp"

using namespace epgm;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kFixtureSeconds = 1.0;
constexpr double kEndToEndSeconds = 60.0;
constexpr double kMinAdjustedRand = 0.9;
constexpr double kMaxGrowthPerDoubling = 3.0;
constexpr int kRandomCases = 100;
constexpr int kTimingRepeats = 5;

struct Outcome {
  bool pass = false;
  std::string detail;
};

/// Collects failed checks so a criterion reports its first problem.
class Checks {
 public:
  void expect(bool ok, const std::string& what) {
    ++count_;
    if (!ok && first_failure_.empty()) first_failure_ = what;
  }
  bool ok() const { return first_failure_.empty(); }
  Outcome outcome(const std::string& detail) const {
    if (ok()) return {true, detail + ", " + std::to_string(count_) + " checks"};
    return {false, first_failure_};
  }

 private:
  size_t count_ = 0;
  std::string first_failure_;
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::vector<GraphId> ids_of(const GraphCollection& c) {
  std::vector<GraphId> out;
  for (const auto& g : c) out.push_back(g.head.id);
  return out;
}

std::string join(const std::vector<uint64_t>& ids) {
  std::string out = "[";
  for (size_t i = 0; i < ids.size(); ++i) out += (i ? "," : "") + std::to_string(ids[i]);
  return out + "]";
}

const GraphCollection& collection_binding(const grala::Interpreter& in, const std::string& name) {
  auto c = in.lookup(name) ? in.lookup(name)->get<grala::CollectionValue>() : nullptr;
  if (!c) throw Error(name + " is not a collection");
  return c->graphs;
}

const LogicalGraph& graph_binding(const workflow::WorkflowResult& r, const std::string& name) {
  auto it = r.bindings.find(name);
  auto g = it == r.bindings.end() ? nullptr : it->second.get<grala::GraphValue>();
  if (!g) throw Error(name + " is not a graph");
  return g->graph;
}

/// Writes the dataset to a fresh store and reads it back, as `epgm import`
/// followed by `epgm run` would.
EpgmDatabase through_store(const EpgmDatabase& db, const std::string& tag) {
  test::ScratchDir dir(tag);
  store::StoreConfig config;
  config.path = dir.path();
  config.partitions = 4;
  config.sync = store::SyncMode::Manual;
  {
    store::GraphStore s(config);
    s.write_database(db);
    s.flush();
  }
  return store::GraphStore::open_existing(dir.path())->load_database();
}

const store::Cell* find_cell(const std::vector<store::Cell>& cells, uint8_t family, std::string_view qualifier) {
  for (const auto& c : cells)
    if (c.family == family && c.qualifier == qualifier) return &c;
  return nullptr;
}

// Criteria ------------------------------------------------------------------

Outcome selection_script() {
  auto db = test::sample();
  grala::Interpreter in(db);
  in.run_source(test::script("select"));
  auto r1 = ids_of(collection_binding(in, "result1"));
  auto r2 = ids_of(collection_binding(in, "result2"));
  bool ok = r1 == std::vector<GraphId>{2} && r2 == std::vector<GraphId>{1};
  return {ok, "result1=" + join(r1) + " result2=" + join(r2)};
}

Outcome collection_intersection() {
  auto db = test::sample();
  auto r = ids_of(ops::intersect_collections({db.graph(0), db.graph(1)}, {db.graph(1), db.graph(2)}));
  return {r == std::vector<GraphId>{1}, "intersection=" + join(r)};
}

Outcome binary_operators() {
  auto db = test::sample();
  auto c = ops::combine(db.graph(0), db.graph(2));
  auto o = ops::overlap(db.graph(0), db.graph(2));
  auto x = ops::exclude(db.graph(0), db.graph(2));
  Checks checks;
  checks.expect(c.vertex_ids == IdSet{0, 1, 2, 3, 4}, "combine vertices " + join(c.vertex_ids));
  checks.expect(c.edge_ids == IdSet{0, 1, 2, 3, 4, 5, 6, 21}, "combine edges " + join(c.edge_ids));
  checks.expect(o.vertex_ids == IdSet{0, 1}, "overlap vertices " + join(o.vertex_ids));
  checks.expect(o.edge_ids == IdSet{0, 1}, "overlap edges " + join(o.edge_ids));
  checks.expect(x.vertex_ids == IdSet{4}, "exclude vertices " + join(x.vertex_ids));
  checks.expect(x.edge_ids.empty(), "exclude edges " + join(x.edge_ids));
  return checks.outcome("combine/overlap/exclude element sets exact");
}

Outcome pattern_script() {
  auto db = test::sample();
  grala::Interpreter in(db);
  in.run_source(test::script("match"));
  const auto& result = collection_binding(in, "result");
  std::string detail = std::to_string(result.size()) + " subgraphs";
  for (const auto& g : result) detail += " " + join(g.vertex_ids) + "/" + join(g.edge_ids);
  bool ok = result.size() == 2 && result[0].vertex_ids == IdSet{0, 1, 9} && result[0].edge_ids == IdSet{17, 18} &&
            result[1].vertex_ids == IdSet{2, 3, 10} && result[1].edge_ids == IdSet{19, 20};
  return {ok, detail};
}

Outcome apply_aggregate() {
  auto db = test::sample();
  for (auto id : db.graph_ids()) db.set_graph_property(id, "vertexCount", PropertyValue(int64_t{0}));
  grala::Interpreter in(db);
  auto value = in.run_source(test::script("apply"));
  auto c = value.get<grala::CollectionValue>();
  if (!c) return {false, "apply did not yield a collection"};
  std::vector<uint64_t> counts;
  for (const auto& g : c->graphs) counts.push_back(g.head.properties.at("vertexCount").as_int());
  return {counts == std::vector<uint64_t>{3, 3, 4}, "vertexCount=" + join(counts)};
}

Outcome store_layout() {
  using namespace store;
  using test::bytes;
  using test::u32_bytes;
  using test::u64_bytes;
  using test::vertex_key_bytes;
  test::ScratchDir dir("acceptance-layout");
  StoreConfig config;
  config.path = dir.path();
  GraphStore s(config);
  s.write_database(test::sample());
  Checks checks;
  auto row = s.raw_row(kVertexTable, std::string(10, '\0'));
  auto cell = [&](uint8_t family, const std::string& q) -> std::string {
    auto c = find_cell(row, family, q);
    return c ? c->value : "<missing>";
  };
  checks.expect(cell(kVertexMeta, "type") == bytes({0, 0}), "row 0-0 meta.type");
  checks.expect(cell(kVertexMeta, "graphs") == u64_bytes(0) + u64_bytes(2), "row 0-0 meta.graphs");
  checks.expect(cell(kVertexProperties, "name") == "\x05" "Alice", "row 0-0 properties.name");
  std::string qualifier = bytes({0, 2}) + vertex_key_bytes(0, 1) + u32_bytes(0);
  checks.expect(cell(kOutEdges, qualifier) == bytes({0, 1, 0, 5}) + "since" + bytes({0}) + u64_bytes(2014),
                "row 0-0 out-edge <2,0-1,0> since");
  size_t out_edges = 0;
  for (const auto& c : row) out_edges += c.family == kOutEdges;
  checks.expect(out_edges == 1, "row 0-0 has one out-edge");

  auto graph = s.raw_row(kGraphTable, u64_bytes(2));
  auto gcell = [&](uint8_t family, const std::string& q) -> std::string {
    auto c = find_cell(graph, family, q);
    return c ? c->value : "<missing>";
  };
  checks.expect(gcell(kGraphMeta, "type") == bytes({0, 5}), "graph row 2 meta.type");
  checks.expect(gcell(kGraphMeta, "vertices") == vertex_key_bytes(0, 0) + vertex_key_bytes(0, 1) +
                                                     vertex_key_bytes(0, 2) + vertex_key_bytes(0, 3),
                "graph row 2 meta.vertices");
  return checks.outcome("row 0-0 and graph row 2 byte-exact");
}

Outcome matcher_oracle() {
  workflow::Random rng(7007);
  Checks checks;
  size_t results = 0;
  for (int round = 0; round < kRandomCases * 2; ++round) {
    test::RandomDbSpec spec;
    spec.max_vertices = 8;
    spec.max_edges = 14;
    auto db = test::random_database(rng, spec);
    auto g = db.database_graph();
    auto text = test::random_pattern(rng);
    auto p = pattern::parse_pattern(text);
    pattern::BindingPredicate predicate;
    if (rng.chance(0.5)) {
      std::string var = p.vertices[rng.below(p.vertices.size())];
      predicate = [var](const LogicalGraph& sub, const pattern::Embedding& m) {
        return sub.vertex(m.vertices.at(var)).label == "A";
      };
    }
    auto expected = test::brute_force_match(g, p, predicate);
    std::vector<test::Subgraph> actual;
    for (const auto& s : pattern::match_pattern(g, p, predicate)) actual.emplace_back(s.vertex_ids, s.edge_ids);
    results += actual.size();
    checks.expect(actual == expected, "case " + std::to_string(round) + " pattern " + text);
  }
  return checks.outcome(std::to_string(kRandomCases * 2) + " cases, " + std::to_string(results) + " subgraphs");
}

Outcome store_properties() {
  using namespace store;
  workflow::Random rng(8008);
  Checks checks;
  for (int round = 0; round < kRandomCases; ++round) {
    test::RandomDbSpec spec;
    spec.max_vertices = 12;
    spec.max_edges = 24;
    auto db = test::random_database(rng, spec);
    test::ScratchDir dir("acceptance-store");
    StoreConfig config;
    config.path = dir.path();
    config.partitions = static_cast<uint16_t>(1 + rng.below(4));
    config.strategy = rng.chance(0.5) ? PartitionStrategy::Hash : PartitionStrategy::Range;
    config.max_versions = 3;
    config.sync = SyncMode::Manual;
    auto expected = database_to_json(db);
    std::string tag = "case " + std::to_string(round) + ": ";
    {
      GraphStore s(config);
      s.write_database(db);
      checks.expect(s.audit_mirrors().empty(), tag + "mirror audit after import");
      checks.expect(database_to_json(s.load_database()) == expected, tag + "round-trip");

      VertexId target = rng.below(db.vertex_count());
      Vertex v = db.vertex(target);
      std::vector<Edge> out;
      for (const auto& [id, e] : db.elements().edges())
        if (e.source == target) out.push_back(e);
      std::vector<std::pair<uint64_t, int64_t>> writes;
      size_t k = 4 + rng.below(4);
      for (size_t i = 0; i < k; ++i) {
        v.properties.insert_or_assign("probe", PropertyValue(static_cast<int64_t>(i)));
        writes.emplace_back(s.put_vertex(v, out), static_cast<int64_t>(i));
      }
      auto versions = s.kv().versions(kVertexProperties, s.vertex_key(target), "probe");
      checks.expect(versions.size() == 3, tag + "retained versions " + std::to_string(versions.size()));
      for (uint64_t t = writes.front().first - 1; t <= writes.back().first + 1; ++t) {
        std::optional<int64_t> want;
        for (size_t i = k - 3; i < k; ++i)
          if (writes[i].first <= t) want = writes[i].second;
        auto got = s.get_vertex(target, t);
        std::optional<int64_t> have;
        if (got)
          if (auto probe = find_property(got->vertex.properties, "probe")) have = probe->as_int();
        checks.expect(have == want, tag + "as-of read at " + std::to_string(t));
      }
      checks.expect(s.audit_mirrors().empty(), tag + "mirror audit after updates");
      if (rng.chance(0.5)) s.flush();
      else s.sync();
    }
    auto reopened = GraphStore::open_existing(dir.path());
    checks.expect(reopened->audit_mirrors().empty(), tag + "mirror audit after reopen");
    auto loaded = reopened->load_database();
    checks.expect(loaded.vertex_count() == db.vertex_count() && loaded.edge_count() == db.edge_count(),
                  tag + "counts after reopen");
  }
  return checks.outcome(std::to_string(kRandomCases) + " databases, max-versions 3");
}

Outcome conservation_and_balance() {
  workflow::Random rng(9009);
  Checks checks;
  size_t largest = 0;
  for (int round = 0; round < kRandomCases; ++round) {
    // Log-uniform sizes up to 10^4 vertices.
    size_t n = static_cast<size_t>(std::pow(10.0, 4.0 * rng.unit())) + 1;
    if (round == 0) n = 10000;
    largest = std::max(largest, n);
    EpgmDatabase db;
    for (size_t i = 0; i < n; ++i) {
      Properties props;
      if (rng.chance(0.8)) props.insert_or_assign("city", PropertyValue(static_cast<int64_t>(rng.below(7))));
      db.add_vertex(rng.chance(0.5) ? "A" : "B", props);
    }
    size_t m = rng.below(3 * n + 1);
    for (size_t i = 0; i < m; ++i) db.add_edge(rng.below(n), rng.below(n), rng.chance(0.5) ? "x" : "y");
    ops::SummarizationSpec spec;
    spec.vertex_keys = {rng.chance(0.5), rng.chance(0.7) ? std::vector<std::string>{"city"} : std::vector<std::string>{}};
    spec.edge_keys = {rng.chance(0.5), {}};
    spec.vertex_aggregator = ops::count_vertices_into("count");
    spec.edge_aggregator = ops::count_edges_into("count");
    auto summary = ops::summarize(db.database_graph(), spec);
    int64_t vs = 0, es = 0;
    for (const Vertex* v : summary.vertices()) vs += v->properties.at("count").as_int();
    for (const Edge* e : summary.edges()) es += e->properties.at("count").as_int();
    std::string tag = "case " + std::to_string(round) + " (|V|=" + std::to_string(n) + "): ";
    checks.expect(vs == static_cast<int64_t>(n), tag + "vertex counts sum to " + std::to_string(vs));
    checks.expect(es == static_cast<int64_t>(m), tag + "edge counts sum to " + std::to_string(es));

    uint16_t p = static_cast<uint16_t>(1 + rng.below(32));
    auto hash = store::Partitioner::hash(p);
    std::vector<size_t> buckets(p, 0);
    for (VertexId id = 0; id < n; ++id) ++buckets[hash.assign(id)];
    auto [lo, hi] = std::minmax_element(buckets.begin(), buckets.end());
    size_t floor = n / p, ceil = (n + p - 1) / p;
    bool balanced = floor == 0 ? *hi <= 1 : (*hi) * floor <= ceil * (*lo);
    checks.expect(balanced, tag + "partition balance over " + std::to_string(p) + " partitions");
  }
  return checks.outcome(std::to_string(kRandomCases) + " graphs up to " + std::to_string(largest) + " vertices");
}

Outcome social_end_to_end() {
  auto start = Clock::now();
  auto data = workflow::generate_social({});
  auto db = through_store(data.db, "acceptance-social");
  workflow::WorkflowOptions options;
  options.inputs = {"sng"};
  auto first = workflow::run_workflow(db, test::script("summarized_communities"), options);
  auto second = workflow::run_workflow(db, test::script("summarized_communities"), options);
  const auto& knows = graph_binding(first, "knowsGraph");
  const auto& summary = graph_binding(first, "summarizedCommunities");

  std::vector<int64_t> found, planted;
  const auto& truth = data.metadata.at("communities");
  for (const Vertex* v : knows.vertices()) {
    found.push_back(v->properties.at("community").as_int());
    planted.push_back(truth.at(v->id).get<int64_t>());
  }
  double ari = test::adjusted_rand_index(found, planted);

  size_t knows_edges = 0;
  std::set<VertexId> participants;
  for (const auto& [id, e] : db.elements().edges())
    if (e.label == "knows") {
      ++knows_edges;
      participants.insert(e.source);
      participants.insert(e.target);
    }
  int64_t vs = 0, es = 0;
  for (const Vertex* v : summary.vertices()) vs += v->properties.at("count").as_int();
  for (const Edge* e : summary.edges()) es += e->properties.at("count").as_int();
  double elapsed = seconds_since(start);

  Checks checks;
  checks.expect(ari >= kMinAdjustedRand, "adjusted Rand " + fixed(ari) + " < " + fixed(kMinAdjustedRand));
  checks.expect(vs == static_cast<int64_t>(participants.size()), "summary vertex counts " + std::to_string(vs));
  checks.expect(es == static_cast<int64_t>(knows_edges), "summary edge counts " + std::to_string(es));
  checks.expect(graph_to_json(graph_binding(second, "summarizedCommunities")) == graph_to_json(summary),
                "second run differs");
  checks.expect(elapsed < kEndToEndSeconds, "took " + fixed(elapsed) + " s");
  return checks.outcome("ARI " + fixed(ari) + " >= " + fixed(kMinAdjustedRand, 1) + ", " +
                        std::to_string(summary.vertex_ids.size()) + " communities, " + fixed(elapsed) + " s < 60 s");
}

Outcome business_end_to_end() {
  auto start = Clock::now();
  auto data = workflow::generate_business({});
  auto db = through_store(data.db, "acceptance-business");
  workflow::WorkflowOptions options;
  options.inputs = {"iig"};
  auto run = workflow::run_workflow(db, test::script("top_revenue"), options);
  auto top = run.bindings.at("topRevBtgs").get<grala::CollectionValue>();
  auto selected = run.bindings.at("invBtgs").get<grala::CollectionValue>();
  if (!top || !selected) return {false, "missing collection bindings"};
  const auto& overlap = graph_binding(run, "topRevBtgOverlap");
  double elapsed = seconds_since(start);

  Checks checks;
  checks.expect(top->graphs.size() <= 100, "top collection has " + std::to_string(top->graphs.size()) + " graphs");
  checks.expect(top->graphs.size() == std::min<size_t>(100, selected->graphs.size()), "top size");
  for (size_t i = 1; i < top->graphs.size(); ++i)
    checks.expect(top->graphs[i - 1].head.properties.at("revenue").as_number() >=
                      top->graphs[i].head.properties.at("revenue").as_number(),
                  "revenue increases at position " + std::to_string(i));
  for (const auto& g : top->graphs) {
    bool invoice = std::any_of(g.vertex_ids.begin(), g.vertex_ids.end(),
                               [&](VertexId v) { return g.vertex(v).label == "SalesInvoice"; });
    checks.expect(invoice, "graph without SalesInvoice in top collection");
  }
  bool closed = true;
  try {
    overlap.check_closure();
  } catch (const ClosureError&) {
    closed = false;
  }
  checks.expect(closed, "overlap result violates closure");
  for (const auto& g : top->graphs) {
    checks.expect(std::includes(g.vertex_ids.begin(), g.vertex_ids.end(), overlap.vertex_ids.begin(),
                                overlap.vertex_ids.end()),
                  "overlap vertex outside a member");
    checks.expect(std::includes(g.edge_ids.begin(), g.edge_ids.end(), overlap.edge_ids.begin(), overlap.edge_ids.end()),
                  "overlap edge outside a member");
  }
  checks.expect(elapsed < kEndToEndSeconds, "took " + fixed(elapsed) + " s");
  return checks.outcome(std::to_string(top->graphs.size()) + " of " + std::to_string(selected->graphs.size()) +
                        " invoiced cases, overlap " + std::to_string(overlap.vertex_ids.size()) + "/" +
                        std::to_string(overlap.edge_ids.size()) + ", " + fixed(elapsed) + " s < 60 s");
}

Outcome scaling() {
  std::vector<double> medians;
  for (uint32_t scale : {1u, 2u, 4u}) {
    auto data = workflow::generate_social({.scale = scale});
    workflow::WorkflowOptions options;
    options.inputs = {"sng"};
    workflow::run_workflow(data.db, test::script("summarized_communities"), options);
    std::vector<double> times;
    for (int r = 0; r < kTimingRepeats; ++r) {
      auto run = workflow::run_workflow(data.db, test::script("summarized_communities"), options);
      times.push_back(std::chrono::duration<double>(run.elapsed).count());
    }
    std::sort(times.begin(), times.end());
    medians.push_back(times[times.size() / 2]);
  }
  double g1 = medians[1] / medians[0], g2 = medians[2] / medians[1];
  bool ok = g1 <= kMaxGrowthPerDoubling && g2 <= kMaxGrowthPerDoubling;
  return {ok, "median " + fixed(medians[0]) + "/" + fixed(medians[1]) + "/" + fixed(medians[2]) + " s, growth " +
                  fixed(g1, 2) + "x and " + fixed(g2, 2) + "x <= " + fixed(kMaxGrowthPerDoubling, 1) + "x"};
}

}  // namespace

int main() {
  struct Criterion {
    int number;
    std::function<Outcome()> run;
    double limit_seconds;
  };
  const double none = 0;
  std::vector<Criterion> criteria = {
      {1, selection_script, kFixtureSeconds},   {2, collection_intersection, kFixtureSeconds},
      {3, binary_operators, kFixtureSeconds},   {4, pattern_script, kFixtureSeconds},
      {5, apply_aggregate, kFixtureSeconds},    {6, store_layout, kFixtureSeconds},
      {7, matcher_oracle, none},                {8, store_properties, none},
      {9, conservation_and_balance, none},      {10, social_end_to_end, none},
      {11, business_end_to_end, none},          {12, scaling, none},
  };
  int failures = 0;
  auto suite_start = Clock::now();
  for (const auto& c : criteria) {
    auto start = Clock::now();
    Outcome outcome;
    try {
      outcome = c.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string("exception: ") + e.what()};
    }
    double elapsed = seconds_since(start);
    if (c.limit_seconds > 0) {
      if (elapsed >= c.limit_seconds) {
        outcome.pass = false;
        outcome.detail += ", took " + fixed(elapsed) + " s";
      } else {
        outcome.detail += ", " + fixed(elapsed * 1000, 1) + " ms < 1 s";
      }
    }
    if (!outcome.pass) ++failures;
    std::printf("criterion %d: %s %s\n", c.number, outcome.pass ? "PASS" : "FAIL", outcome.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed in %s s\n", static_cast<int>(criteria.size()) - failures, criteria.size(),
              fixed(seconds_since(suite_start), 1).c_str());
  return failures == 0 ? 0 : 1;
}
