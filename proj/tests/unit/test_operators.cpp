#include <numeric>

#include "doctest.h"
#include "epgm/algorithms.hpp"
#include "epgm/operators.hpp"
#include "support.hpp"

using namespace epgm;

namespace {

std::vector<GraphId> ids_of(const GraphCollection& c) {
  std::vector<GraphId> out;
  for (const auto& g : c) out.push_back(g.head.id);
  return out;
}

int64_t vertex_count_property(const LogicalGraph& g) {
  auto it = g.head.properties.find("vertexCount");
  return it == g.head.properties.end() ? -1 : it->second.as_int();
}

LogicalGraph empty_graph_of(const EpgmDatabase& db) {
  LogicalGraph g = db.database_graph();
  g.vertex_ids.clear();
  g.edge_ids.clear();
  return g;
}

/// Random closed subgraph of the database graph.
LogicalGraph random_subgraph(const EpgmDatabase& db, workflow::Random& rng) {
  LogicalGraph g = db.database_graph();
  IdSet vs;
  for (auto v : g.vertex_ids)
    if (rng.chance(0.6)) vs.push_back(v);
  IdSet es;
  for (auto e : g.edge_ids) {
    const Edge& edge = db.edge(e);
    if (id_set_contains(vs, edge.source) && id_set_contains(vs, edge.target) && rng.chance(0.7)) es.push_back(e);
  }
  g.vertex_ids = vs;
  g.edge_ids = es;
  return g;
}

}  // namespace

TEST_CASE("select on the sample collection") {
  auto db = test::sample();
  auto graphs = db.graphs();
  auto big = ops::select(graphs, [](const LogicalGraph& g) { return g.vertex_ids.size() > 3; });
  CHECK(ids_of(big) == std::vector<GraphId>{2});
  auto adults = ops::select(graphs, [](const LogicalGraph& g) {
    for (const Vertex* v : g.vertices()) {
      auto age = find_property(v->properties, "age");
      if (!age || age->as_number() <= 20) return false;
    }
    return true;
  });
  CHECK(ids_of(adults) == std::vector<GraphId>{1});
  CHECK(ids_of(ops::select(graphs, [](const LogicalGraph&) { return true; })) == std::vector<GraphId>{0, 1, 2});
}

TEST_CASE("distinct keeps first occurrences") {
  auto db = test::sample();
  GraphCollection c{db.graph(0), db.graph(1), db.graph(0)};
  CHECK(ids_of(ops::distinct(c)) == std::vector<GraphId>{0, 1});
  CHECK(ids_of(ops::distinct(db.graphs())) == std::vector<GraphId>{0, 1, 2});
  CHECK(ops::distinct({}).empty());
}

TEST_CASE("sort_by and top") {
  auto db = test::sample();
  auto sorted = ops::sort_by(db.graphs(), "vertexCount", ops::SortOrder::Descending);
  CHECK(ids_of(sorted) == std::vector<GraphId>{2, 0, 1});
  auto asc = ops::sort_by(db.graphs(), "vertexCount", ops::SortOrder::Ascending);
  CHECK(ids_of(asc) == std::vector<GraphId>{0, 1, 2});
  CHECK(ids_of(ops::top(sorted, 2)) == std::vector<GraphId>{2, 0});
  CHECK(ops::top(sorted, 0).empty());
  CHECK(ids_of(ops::top(sorted, 10)) == std::vector<GraphId>{2, 0, 1});
  GraphCollection single{db.graph(1)};
  CHECK(ids_of(ops::sort_by(single, "vertexCount", ops::SortOrder::Descending)) == std::vector<GraphId>{1});

  GraphCollection c = db.graphs();
  c[1].head.properties.erase("vertexCount");
  CHECK(ids_of(ops::sort_by(c, "vertexCount", ops::SortOrder::Ascending)) == std::vector<GraphId>{0, 2, 1});
  CHECK(ids_of(ops::sort_by(c, "vertexCount", ops::SortOrder::Descending)) == std::vector<GraphId>{2, 0, 1});

  c[0].head.properties.insert_or_assign("vertexCount", PropertyValue("three"));
  CHECK_THROWS_WITH_AS(ops::sort_by(c, "vertexCount", ops::SortOrder::Ascending),
                       doctest::Contains("graph 0"), OperatorError);
}

TEST_CASE("sort_by with distinct keys reverses between orders") {
  workflow::Random rng(5);
  auto db = test::sample();
  for (int round = 0; round < 50; ++round) {
    GraphCollection c;
    std::vector<int64_t> keys(6);
    std::iota(keys.begin(), keys.end(), 0);
    for (size_t i = keys.size(); i > 1; --i) std::swap(keys[i - 1], keys[rng.below(i)]);
    for (size_t i = 0; i < keys.size(); ++i) {
      auto g = db.graph(i % 3);
      g.head.id = i;
      g.head.properties.insert_or_assign("k", PropertyValue(keys[i]));
      c.push_back(g);
    }
    auto asc = ids_of(ops::sort_by(c, "k", ops::SortOrder::Ascending));
    auto desc = ids_of(ops::sort_by(c, "k", ops::SortOrder::Descending));
    std::reverse(desc.begin(), desc.end());
    CHECK(asc == desc);
  }
}

TEST_CASE("sort_by is a stable permutation with the maximum first") {
  workflow::Random rng(6);
  auto db = test::sample();
  for (int round = 0; round < 100; ++round) {
    GraphCollection c;
    size_t n = rng.below(8);
    for (size_t i = 0; i < n; ++i) {
      auto g = db.graph(i % 3);
      g.head.id = i;
      if (rng.chance(0.8)) g.head.properties.insert_or_assign("k", PropertyValue(rng.between(0, 3)));
      else g.head.properties.erase("k");
      c.push_back(g);
    }
    auto sorted = ops::sort_by(c, "k", ops::SortOrder::Descending);
    auto ids = ids_of(sorted);
    auto original = ids_of(c);
    std::sort(ids.begin(), ids.end());
    std::sort(original.begin(), original.end());
    CHECK(ids == original);
    for (size_t i = 1; i < sorted.size(); ++i) {
      auto a = find_property(sorted[i - 1].head.properties, "k");
      auto b = find_property(sorted[i].head.properties, "k");
      if (!a) {
        CHECK_FALSE(b);
        CHECK(sorted[i - 1].head.id < sorted[i].head.id);
      } else if (b) {
        CHECK(a->as_int() >= b->as_int());
        if (a->as_int() == b->as_int()) CHECK(sorted[i - 1].head.id < sorted[i].head.id);
      }
    }
  }
}

TEST_CASE("collection set operators") {
  auto db = test::sample();
  GraphCollection a{db.graph(0), db.graph(1)};
  GraphCollection b{db.graph(1), db.graph(2)};
  CHECK(ids_of(ops::intersect_collections(a, b)) == std::vector<GraphId>{1});
  CHECK(ids_of(ops::union_collections(a, b)) == std::vector<GraphId>{0, 1, 2});
  CHECK(ids_of(ops::difference_collections(a, b)) == std::vector<GraphId>{0});
  GraphCollection dup{db.graph(2), db.graph(2), db.graph(0)};
  CHECK(ids_of(ops::union_collections(dup, {})) == ids_of(ops::distinct(dup)));
  CHECK(ops::difference_collections(a, a).empty());
}

TEST_CASE("binary graph operators on sample") {
  auto db = test::sample();
  auto g0 = db.graph(0), g2 = db.graph(2);

  auto c = ops::combine(g0, g2);
  CHECK(c.vertex_ids == IdSet{0, 1, 2, 3, 4});
  CHECK(c.edge_ids == IdSet{0, 1, 2, 3, 4, 5, 6, 21});
  CHECK(is_temporary(c.head.id));
  CHECK(c.head.label.empty());

  auto o = ops::overlap(g0, g2);
  CHECK(o.vertex_ids == IdSet{0, 1});
  CHECK(o.edge_ids == IdSet{0, 1});

  auto x = ops::exclude(g0, g2);
  CHECK(x.vertex_ids == IdSet{4});
  CHECK(x.edge_ids.empty());

  auto empty = empty_graph_of(db);
  CHECK(ops::combine(g0, g0).vertex_ids == g0.vertex_ids);
  CHECK(ops::combine(g0, empty).edge_ids == g0.edge_ids);
  CHECK(ops::overlap(g0, g0).edge_ids == g0.edge_ids);
  CHECK(ops::overlap(g0, db.graph(1)).vertex_ids.empty());
  CHECK(ops::exclude(g0, g0).vertex_ids.empty());
  CHECK(ops::exclude(g0, empty).edge_ids == g0.edge_ids);

  auto other = test::sample();
  CHECK_THROWS_AS(ops::combine(g0, other.graph(2)), OperatorError);
}

TEST_CASE("binary operator algebra on random graphs") {
  workflow::Random rng(21);
  for (int round = 0; round < 150; ++round) {
    auto db = test::random_database(rng);
    auto a = random_subgraph(db, rng), b = random_subgraph(db, rng), c = random_subgraph(db, rng);
    auto ab = ops::combine(a, b), ba = ops::combine(b, a);
    CHECK(ab.vertex_ids == ba.vertex_ids);
    CHECK(ab.edge_ids == ba.edge_ids);
    auto left = ops::combine(ops::combine(a, b), c), right = ops::combine(a, ops::combine(b, c));
    CHECK(left.vertex_ids == right.vertex_ids);
    CHECK(left.edge_ids == right.edge_ids);
    CHECK(ab.vertex_ids == id_set_union(a.vertex_ids, b.vertex_ids));

    auto o = ops::overlap(a, b);
    CHECK(std::includes(ab.vertex_ids.begin(), ab.vertex_ids.end(), o.vertex_ids.begin(), o.vertex_ids.end()));
    CHECK(std::includes(ab.edge_ids.begin(), ab.edge_ids.end(), o.edge_ids.begin(), o.edge_ids.end()));
    CHECK(o.edge_ids == id_set_intersection(a.edge_ids, b.edge_ids));

    auto x = ops::exclude(a, b);
    CHECK(x.vertex_ids == id_set_difference(a.vertex_ids, b.vertex_ids));
    for (auto e : x.edge_ids) {
      CHECK(a.contains_edge(e));
      CHECK_FALSE(b.contains_vertex(db.edge(e).source));
      CHECK_FALSE(b.contains_vertex(db.edge(e).target));
    }
    for (auto e : a.edge_ids) {
      const Edge& edge = db.edge(e);
      bool kept = x.contains_vertex(edge.source) && x.contains_vertex(edge.target);
      CHECK(kept == x.contains_edge(e));
    }
    CHECK(ops::exclude(a, a).vertex_ids.empty());
    for (const auto* g : {&ab, &o, &x}) CHECK_NOTHROW(g->check_closure());
  }
}

TEST_CASE("aggregate and built-in aggregates") {
  auto db = test::sample();
  auto count = [](const LogicalGraph& g) { return PropertyValue(static_cast<int64_t>(g.vertex_ids.size())); };
  auto g0 = ops::aggregate(db.graph(0), "vertexCount", count);
  CHECK(g0.head.properties.at("vertexCount") == PropertyValue(int64_t{3}));
  CHECK(g0.head.id == 0);
  CHECK(g0.vertex_ids == db.graph(0).vertex_ids);

  auto zero = ops::aggregate(empty_graph_of(db), "z", [](const LogicalGraph&) { return PropertyValue(int64_t{0}); });
  CHECK(zero.head.properties.at("z") == PropertyValue(int64_t{0}));

  EpgmDatabase people;
  for (int age : {20, 25, 30}) people.add_vertex("Person", {{"age", age}});
  auto everyone = people.database_graph();
  auto sum = ops::aggregate(everyone, "total", [](const LogicalGraph& g) {
    auto vs = g.vertices();
    return ops::sum(std::span<const Vertex* const>(vs), "age");
  });
  CHECK(sum.head.properties.at("total") == PropertyValue(int64_t{75}));

  auto vs = db.graph(0).vertices();
  std::span<const Vertex* const> members(vs);
  CHECK(ops::count(members) == 3);
  std::vector<PropertyValue> ages{PropertyValue(20), PropertyValue(30)};
  CHECK(ops::average(std::span<const PropertyValue>(ages)) == doctest::Approx(25.0));
  CHECK(ops::values(members, "age").size() == 2);
  CHECK(ops::sum(members, "age") == PropertyValue(int64_t{60}));
  std::vector<PropertyValue> mixed{PropertyValue(1), PropertyValue(0.5)};
  CHECK(ops::sum(std::span<const PropertyValue>(mixed)) == PropertyValue(1.5));
  std::vector<PropertyValue> bad{PropertyValue("x")};
  CHECK_THROWS_AS(ops::sum(std::span<const PropertyValue>(bad)), TypeError);
  CHECK_THROWS_AS(ops::average(std::span<const PropertyValue>()), OperatorError);
}

TEST_CASE("apply aggregate gives the stored vertex counts") {
  auto db = test::sample();
  auto graphs = db.graphs();
  for (auto& g : graphs) g.head.properties.erase("vertexCount");
  auto counted = ops::apply(graphs, [](const LogicalGraph& g) {
    return ops::aggregate(g, "vertexCount",
                          [](const LogicalGraph& x) { return PropertyValue(static_cast<int64_t>(x.vertex_ids.size())); });
  });
  REQUIRE(counted.size() == 3);
  CHECK(vertex_count_property(counted[0]) == 3);
  CHECK(vertex_count_property(counted[1]) == 3);
  CHECK(vertex_count_property(counted[2]) == 4);
  CHECK(ops::apply({}, [](const LogicalGraph& g) { return g; }).empty());
  CHECK(ids_of(ops::apply(graphs, [](const LogicalGraph& g) { return g; })) == std::vector<GraphId>{0, 1, 2});
}

TEST_CASE("project rewrites labels and properties only") {
  auto db = test::sample();
  ops::ProjectionFunctions fns;
  fns.vertex = [](const Vertex& v) {
    Vertex out = v;
    out.label = v.properties.at("name").as_string();
    out.properties.clear();
    if (auto city = find_property(v.properties, "city")) out.properties.insert_or_assign("from", *city);
    return out;
  };
  fns.edge = [](const Edge& e) {
    Edge out = e;
    out.properties.clear();
    return out;
  };
  auto p = ops::project(db.graph(0), fns);
  CHECK(p.vertex_ids == db.graph(0).vertex_ids);
  CHECK(p.edge_ids == db.graph(0).edge_ids);
  CHECK(p.vertex(0).label == "Alice");
  CHECK(p.vertex(0).properties.at("from") == PropertyValue("Leipzig"));
  CHECK(p.vertex(4).properties.empty());
  CHECK(p.edge(0).label == "knows");
  CHECK(p.edge(0).properties.empty());
  CHECK(db.vertex(0).label == "Person");

  ops::ProjectionFunctions identity{[](const Vertex& v) { return v; }, [](const Edge& e) { return e; }};
  auto same = ops::project(db.graph(2), identity);
  for (auto v : same.vertex_ids) CHECK(same.vertex(v).properties == db.vertex(v).properties);

  ops::ProjectionFunctions rewire{[](const Vertex& v) { return v; }, [](const Edge& e) {
                                    Edge out = e;
                                    out.target = out.source;
                                    return out;
                                  }};
  CHECK_THROWS_AS(ops::project(db.graph(0), rewire), OperatorError);
}

TEST_CASE("summarize sample persons by city") {
  auto db = test::sample();
  auto persons = db.database_graph();
  IdSet vs;
  for (auto v : persons.vertex_ids)
    if (db.vertex(v).label == "Person") vs.push_back(v);
  IdSet es;
  for (auto e : persons.edge_ids)
    if (db.edge(e).label == "knows") es.push_back(e);
  persons.vertex_ids = vs;
  persons.edge_ids = es;

  ops::SummarizationSpec spec;
  spec.vertex_keys = {true, {"city"}};
  spec.edge_keys = {true, {}};
  spec.vertex_aggregator = [](Vertex& s, std::span<const Vertex* const> members) {
    auto ages = ops::values(members, "age");
    if (!ages.empty()) s.properties.insert_or_assign("avg_age", ops::average(std::span<const PropertyValue>(ages)));
    s.properties.insert_or_assign("count", ops::count(members));
  };
  spec.edge_aggregator = ops::count_edges_into("count");
  auto s = ops::summarize(persons, spec);

  std::map<std::string, const Vertex*> by_city;
  for (const Vertex* v : s.vertices()) {
    auto city = find_property(v->properties, "city");
    by_city[city ? city->as_string() : "-"] = v;
    CHECK(v->label == "Person");
  }
  REQUIRE(by_city.size() == 4);
  CHECK(by_city["Leipzig"]->properties.at("count") == PropertyValue(int64_t{2}));
  CHECK(by_city["Leipzig"]->properties.at("avg_age") == PropertyValue(25.0));
  CHECK(by_city["Dresden"]->properties.at("avg_age") == PropertyValue(36.0));
  CHECK(by_city["-"]->properties.at("count") == PropertyValue(int64_t{1}));

  int64_t total = 0;
  for (const Edge* e : s.edges()) total += e->properties.at("count").as_int();
  CHECK(total == static_cast<int64_t>(es.size()));
  auto within_leipzig = 0;
  for (const Edge* e : s.edges())
    if (e->source == by_city["Leipzig"]->id && e->target == by_city["Leipzig"]->id)
      within_leipzig = static_cast<int>(e->properties.at("count").as_int());
  CHECK(within_leipzig == 2);
}

TEST_CASE("summarize edge cases") {
  auto db = test::sample();
  auto all = db.database_graph();
  ops::SummarizationSpec by_name;
  by_name.vertex_keys = {false, {"name"}};
  by_name.edge_keys = {true, {}};
  by_name.vertex_aggregator = ops::count_vertices_into("count");
  by_name.edge_aggregator = ops::count_edges_into("count");
  auto unique = ops::summarize(db.graph(2), by_name);
  CHECK(unique.vertex_ids.size() == 4);
  CHECK(unique.edge_ids.size() == 6);
  for (const Vertex* v : unique.vertices()) CHECK(v->properties.at("count") == PropertyValue(int64_t{1}));
  for (const Edge* e : unique.edges()) CHECK(e->properties.at("count") == PropertyValue(int64_t{1}));

  ops::SummarizationSpec none;
  none.vertex_aggregator = ops::count_vertices_into("count");
  none.edge_aggregator = ops::count_edges_into("count");
  auto one = ops::summarize(all, none);
  REQUIRE(one.vertex_ids.size() == 1);
  CHECK(one.vertices()[0]->properties.at("count") == PropertyValue(int64_t{11}));
  int64_t total = 0;
  for (const Edge* e : one.edges()) total += e->properties.at("count").as_int();
  CHECK(total == 24);
}

TEST_CASE("summarize conserves counts on random graphs") {
  workflow::Random rng(33);
  test::RandomDbSpec spec;
  spec.max_vertices = 40;
  spec.max_edges = 120;
  spec.vertex_labels = {"A", "B", "C"};
  for (int round = 0; round < 100; ++round) {
    auto db = test::random_database(rng, spec);
    auto g = db.database_graph();
    ops::SummarizationSpec s;
    s.vertex_keys = {rng.chance(0.5), {}};
    if (rng.chance(0.5)) s.vertex_keys.property_keys.push_back("city");
    if (rng.chance(0.3)) s.vertex_keys.property_keys.push_back("flag");
    s.edge_keys = {rng.chance(0.5), rng.chance(0.3) ? std::vector<std::string>{"since"} : std::vector<std::string>{}};
    s.vertex_aggregator = ops::count_vertices_into("count");
    s.edge_aggregator = ops::count_edges_into("count");
    auto out = ops::summarize(g, s);
    int64_t vertices = 0, edges = 0;
    for (const Vertex* v : out.vertices()) vertices += v->properties.at("count").as_int();
    for (const Edge* e : out.edges()) edges += e->properties.at("count").as_int();
    CHECK(vertices == static_cast<int64_t>(g.vertex_ids.size()));
    CHECK(edges == static_cast<int64_t>(g.edge_ids.size()));
    CHECK_NOTHROW(out.check_closure());
  }
}

TEST_CASE("reduce is a strict left fold") {
  auto db = test::sample();
  auto all = ops::reduce(db.graphs(), ops::combine);
  CHECK(all.vertex_ids == IdSet{0, 1, 2, 3, 4, 5});
  CHECK(ops::reduce({db.graph(1)}, ops::combine).head.id == 1);
  CHECK_THROWS_AS(ops::reduce({}, ops::combine), OperatorError);

  std::vector<std::string> calls;
  auto tracing = [&](const LogicalGraph& a, const LogicalGraph& b) {
    calls.push_back(std::to_string(a.vertex_ids.size()) + "+" + std::to_string(b.head.id));
    return ops::overlap(a, b);
  };
  auto folded = ops::reduce(db.graphs(), tracing);
  CHECK(calls == std::vector<std::string>{"3+1", "0+2"});
  CHECK(folded.vertex_ids.empty());

  workflow::Random rng(44);
  for (int round = 0; round < 100; ++round) {
    auto rdb = test::random_database(rng);
    GraphCollection c;
    for (int i = 0; i < 3; ++i) c.push_back(random_subgraph(rdb, rng));
    auto manual = ops::combine(ops::combine(c[0], c[1]), c[2]);
    auto reduced = ops::reduce(c, ops::combine);
    auto fast = ops::combine_all(c);
    CHECK(reduced.vertex_ids == manual.vertex_ids);
    CHECK(reduced.edge_ids == manual.edge_ids);
    CHECK(fast.vertex_ids == manual.vertex_ids);
    CHECK(fast.edge_ids == manual.edge_ids);
    auto inter = ops::overlap(ops::overlap(c[0], c[1]), c[2]);
    CHECK(ops::overlap_all(c).vertex_ids == inter.vertex_ids);
    CHECK(ops::overlap_all(c).edge_ids == inter.edge_ids);
  }
}

TEST_CASE("call operators delegate to the registry") {
  auto db = test::sample();
  auto annotated = ops::call_for_graph(db.database_graph(), "LabelPropagation", {{"propertyKey", "community"}});
  for (auto v : annotated.vertex_ids) CHECK(annotated.vertex(v).properties.count("community") == 1);
  auto communities =
      ops::call_for_collection(db.database_graph(), "CommunityDetection", {{"graphPropertyKey", "community"}});
  CHECK_FALSE(communities.empty());
  size_t members = 0;
  for (const auto& g : communities) members += g.vertex_ids.size();
  CHECK(members == 11);
  CHECK_THROWS_AS(ops::call_for_graph(db.database_graph(), "NoSuchAlgorithm", {}), NotFoundError);
  CHECK_THROWS(ops::call_for_graph(db.database_graph(), "CommunityDetection", {}));
}
