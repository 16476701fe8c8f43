#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "epgm/model.hpp"

namespace epgm::store {

enum class PartitionStrategy { Range, Hash };

std::string_view strategy_name(PartitionStrategy s);
/// Parses "range" or "hash"; throws Error otherwise.
PartitionStrategy parse_strategy(std::string_view name);

/// Maps every vertex id to exactly one partition below `count()`.
class Partitioner {
 public:
  /// Hash partitioning: id mod count.
  static Partitioner hash(uint16_t count);
  /// Range partitioning. `boundaries` holds the first id of each partition;
  /// it must start at 0 and be strictly increasing.
  static Partitioner range(std::vector<VertexId> boundaries);
  /// Equal-width intervals over the whole 64-bit id space.
  static Partitioner equal_width(uint16_t count);
  /// Equal-width intervals over [0, max_id].
  static Partitioner range_for(uint16_t count, VertexId max_id);

  uint16_t assign(VertexId id) const;
  uint16_t count() const { return count_; }
  PartitionStrategy strategy() const { return strategy_; }
  const std::vector<VertexId>& boundaries() const { return boundaries_; }

  bool operator==(const Partitioner&) const = default;

 private:
  PartitionStrategy strategy_ = PartitionStrategy::Hash;
  uint16_t count_ = 1;
  std::vector<VertexId> boundaries_;
};

}  // namespace epgm::store
