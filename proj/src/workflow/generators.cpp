#include "epgm/workflow/generators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace epgm::workflow {

namespace {

const std::vector<std::string> kCities = {"Leipzig", "Dresden", "Berlin",  "Hamburg",   "Munich",
                                          "Cologne", "Halle",   "Potsdam", "Frankfurt", "Bremen"};
const std::vector<std::string> kFirstNames = {"Alice", "Bob",  "Carol", "Dave",  "Eve",  "Frank", "Grace",
                                              "Heidi", "Ivan", "Judy",  "Mallory", "Niaj", "Olivia", "Peggy"};
const std::vector<std::string> kTopics = {"Databases", "Hadoop", "Graphs", "Streams", "Cloud", "Storage",
                                          "Analytics", "Search", "Privacy", "Networks"};

double round_cents(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

uint64_t Random::below(uint64_t n) {
  if (n == 0) throw Error("Random::below(0)");
  uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

int64_t Random::between(int64_t lo, int64_t hi) {
  return lo + static_cast<int64_t>(below(static_cast<uint64_t>(hi - lo) + 1));
}

double Random::unit() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

Dataset generate_social(const SocialParams& p) {
  if (p.scale == 0) throw Error("scale must be positive");
  if (p.community_size < 2) throw Error("community size must be at least 2");
  Random rng(p.seed);
  Dataset out;
  EpgmDatabase& db = out.db;
  for (const char* label : {"Person", "Forum", "Tag", "knows", "hasMember", "hasModerator", "hasInterest", "hasTag"})
    db.declare_label(label);

  uint32_t persons = p.persons_per_scale * p.scale;
  uint32_t communities = (persons + p.community_size - 1) / p.community_size;
  // Community membership is a shuffled block assignment, so ids carry no
  // community information.
  std::vector<uint32_t> community(persons);
  for (uint32_t i = 0; i < persons; ++i) community[i] = i / p.community_size;
  for (uint32_t i = persons; i > 1; --i) std::swap(community[i - 1], community[rng.below(i)]);
  std::vector<std::vector<VertexId>> members(communities);
  for (uint32_t i = 0; i < persons; ++i) members[community[i]].push_back(i);

  std::vector<std::string> home(communities);
  for (auto& h : home) h = kCities[rng.below(kCities.size())];
  for (uint32_t i = 0; i < persons; ++i) {
    const auto& city = rng.chance(p.home_city_probability) ? home[community[i]] : kCities[rng.below(kCities.size())];
    Properties props{{"name", kFirstNames[rng.below(kFirstNames.size())] + " " + std::to_string(i)},
                     {"gender", rng.chance(0.5) ? "f" : "m"},
                     {"city", city},
                     {"age", rng.between(18, 70)}};
    db.add_vertex("Person", std::move(props));
  }

  for (uint32_t i = 0; i < persons; ++i) {
    const auto& own = members[community[i]];
    uint32_t degree = std::min<uint32_t>(p.intra_out_degree, static_cast<uint32_t>(own.size() - 1));
    std::vector<VertexId> chosen;
    while (chosen.size() < degree) {
      VertexId t = own[rng.below(own.size())];
      if (t == i || std::find(chosen.begin(), chosen.end(), t) != chosen.end()) continue;
      chosen.push_back(t);
    }
    for (auto t : chosen) db.add_edge(i, t, "knows", {{"since", rng.between(2005, 2015)}});
    if (communities > 1 && rng.chance(p.inter_probability)) {
      VertexId t;
      do {
        t = rng.below(persons);
      } while (community[t] == community[i]);
      db.add_edge(i, t, "knows", {{"since", rng.between(2005, 2015)}});
    }
  }

  std::vector<VertexId> tags;
  for (uint32_t i = 0; i < p.tags; ++i)
    tags.push_back(db.add_vertex("Tag", {{"name", kTopics[i % kTopics.size()] + "-" + std::to_string(i)}}));

  uint32_t forums = p.forums_per_scale * p.scale;
  for (uint32_t f = 0; f < forums; ++f) {
    uint32_t c = static_cast<uint32_t>(rng.below(communities));
    VertexId forum = db.add_vertex("Forum", {{"title", "Forum " + std::to_string(f)}});
    const auto& own = members[c];
    db.add_edge(forum, own[rng.below(own.size())], "hasModerator");
    uint32_t size = static_cast<uint32_t>(rng.between(5, static_cast<int64_t>(std::min<size_t>(20, own.size()))));
    std::vector<VertexId> pool = own;
    for (uint32_t k = 0; k < size; ++k) {
      size_t pick = k + rng.below(pool.size() - k);
      std::swap(pool[k], pool[pick]);
      db.add_edge(forum, pool[k], "hasMember", {{"joined", rng.between(2008, 2015)}});
    }
    for (int64_t k = rng.between(1, 3); k > 0; --k) db.add_edge(forum, tags[rng.below(tags.size())], "hasTag");
  }
  for (uint32_t i = 0; i < persons; ++i)
    for (int64_t k = rng.between(0, 2); k > 0; --k) db.add_edge(i, tags[rng.below(tags.size())], "hasInterest");

  nlohmann::json truth = nlohmann::json::array();
  for (auto c : community) truth.push_back(c);
  out.metadata = {{"kind", "social"},
                  {"scale", p.scale},
                  {"seed", p.seed},
                  {"persons", persons},
                  {"community_count", communities},
                  {"community_size", p.community_size},
                  {"intra_out_degree", p.intra_out_degree},
                  {"inter_probability", p.inter_probability},
                  {"forums", forums},
                  {"tags", p.tags},
                  {"vertices", db.vertex_count()},
                  {"edges", db.edge_count()},
                  {"communities", truth}};
  return out;
}

Dataset generate_business(const BusinessParams& p) {
  if (p.scale == 0) throw Error("scale must be positive");
  Random rng(p.seed);
  Dataset out;
  EpgmDatabase& db = out.db;
  for (const char* label : {"Customer", "Vendor", "Employee", "Product", "SalesQuotation", "SalesOrder", "PurchOrder",
                            "DeliveryNote", "SalesInvoice", "sentBy", "sentTo", "contains", "basedOn", "receivedFrom",
                            "processedBy", "serves", "placedAt", "operatedBy", "createdFor", "approvedBy"})
    db.declare_label(label);

  auto make = [&](const char* label, uint32_t count, auto props) {
    std::vector<VertexId> ids;
    for (uint32_t i = 0; i < count; ++i) ids.push_back(db.add_vertex(label, props(i)));
    return ids;
  };
  auto customers = make("Customer", p.customers_per_scale * p.scale, [&](uint32_t i) {
    return Properties{{"name", "Customer " + std::to_string(i)}, {"city", kCities[rng.below(kCities.size())]}};
  });
  auto vendors = make("Vendor", p.vendors_per_scale * p.scale, [&](uint32_t i) {
    return Properties{{"name", "Vendor " + std::to_string(i)}, {"city", kCities[rng.below(kCities.size())]}};
  });
  VertexId head_of_sales = db.add_vertex("Employee", {{"name", "Head of Sales"}, {"role", "head"}});
  auto employees = make("Employee", p.employees_per_scale * p.scale, [&](uint32_t i) {
    return Properties{{"name", kFirstNames[i % kFirstNames.size()] + " " + std::to_string(i)}, {"role", "sales"}};
  });
  std::vector<double> price;
  auto products = make("Product", p.products_per_scale * p.scale, [&](uint32_t i) {
    price.push_back(round_cents(1.0 + rng.unit() * 99.0));
    return Properties{{"name", "Product " + std::to_string(i)}, {"price", price.back()}};
  });

  auto pick = [&](const std::vector<VertexId>& from) { return from[rng.below(from.size())]; };
  uint32_t cases = p.cases_per_scale * p.scale;
  uint32_t orders = 0, invoices = 0;
  for (uint32_t c = 0; c < cases; ++c) {
    VertexId customer = pick(customers);
    VertexId clerk = pick(employees);
    VertexId quotation = db.add_vertex("SalesQuotation", {{"case", int64_t{c}}});
    db.add_edge(quotation, clerk, "sentBy");
    db.add_edge(quotation, customer, "sentTo");
    double total = 0;
    for (int64_t lines = rng.between(1, 4); lines > 0; --lines) {
      size_t product = rng.below(products.size());
      int64_t quantity = rng.between(1, 20);
      total += price[product] * static_cast<double>(quantity);
      db.add_edge(quotation, products[product], "contains", {{"quantity", quantity}});
    }
    if (!rng.chance(p.order_probability)) continue;
    ++orders;
    VertexId order = db.add_vertex("SalesOrder", {{"case", int64_t{c}}});
    db.add_edge(order, quotation, "basedOn");
    db.add_edge(order, customer, "receivedFrom");
    db.add_edge(order, pick(employees), "processedBy");
    for (int64_t k = rng.between(1, 2); k > 0; --k) {
      VertexId purchase = db.add_vertex("PurchOrder", {{"case", int64_t{c}}});
      db.add_edge(purchase, order, "serves");
      db.add_edge(purchase, pick(vendors), "placedAt");
    }
    VertexId delivery = db.add_vertex("DeliveryNote", {{"case", int64_t{c}}});
    db.add_edge(delivery, order, "contains");
    db.add_edge(delivery, pick(vendors), "operatedBy");
    if (!rng.chance(p.invoice_probability)) continue;
    ++invoices;
    VertexId invoice = db.add_vertex("SalesInvoice", {{"case", int64_t{c}}, {"revenue", round_cents(total)}});
    db.add_edge(invoice, order, "createdFor");
    db.add_edge(invoice, head_of_sales, "approvedBy");
  }

  out.metadata = {{"kind", "business"}, {"scale", p.scale},         {"seed", p.seed},
                  {"cases", cases},     {"orders", orders},         {"invoices", invoices},
                  {"head_of_sales", head_of_sales},                 {"vertices", db.vertex_count()},
                  {"edges", db.edge_count()}};
  return out;
}

}  // namespace epgm::workflow
