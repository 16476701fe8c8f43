#pragma once

// Seeded synthetic datasets. The same (kind, scale, seed) always yields the
// same database, byte for byte once written.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "epgm/model.hpp"
#include "json.hpp"

namespace epgm::workflow {

/// Portable draws on top of mt19937_64; the standard distributions are
/// implementation defined, these are not.
class Random {
 public:
  explicit Random(uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, n).
  uint64_t below(uint64_t n);
  /// Uniform in [lo, hi].
  int64_t between(int64_t lo, int64_t hi);
  /// Uniform in [0, 1).
  double unit();
  bool chance(double p) { return unit() < p; }

 private:
  std::mt19937_64 engine_;
};

struct SocialParams {
  uint32_t scale = 1;
  uint64_t seed = 42;
  uint32_t persons_per_scale = 1000;
  uint32_t community_size = 50;
  /// Outgoing knows edges per person inside its community.
  uint32_t intra_out_degree = 4;
  /// Chance that a person also knows somebody outside its community.
  double inter_probability = 0.1;
  /// Chance that a person lives in its community's home city.
  double home_city_probability = 0.8;
  uint32_t forums_per_scale = 20;
  uint32_t tags = 50;
};

struct BusinessParams {
  uint32_t scale = 1;
  uint64_t seed = 42;
  uint32_t cases_per_scale = 200;
  uint32_t customers_per_scale = 30;
  uint32_t vendors_per_scale = 10;
  uint32_t employees_per_scale = 15;
  uint32_t products_per_scale = 40;
  double order_probability = 0.85;
  double invoice_probability = 0.9;
};

struct Dataset {
  EpgmDatabase db;
  /// Parameters and planted ground truth.
  nlohmann::json metadata;
};

/// Persons with city, age and gender in planted communities (knows edges
/// mostly inside a community), plus forums and tags. Ground truth maps each
/// person id to its community under `metadata["communities"]`.
Dataset generate_social(const SocialParams& params);

/// Business cases around master data: quotation, order, purchase orders,
/// delivery note and invoice with a positive `revenue`. Every invoice is
/// approved by the same head-of-sales employee.
Dataset generate_business(const BusinessParams& params);

}  // namespace epgm::workflow
