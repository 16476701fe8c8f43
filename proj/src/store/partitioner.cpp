#include "epgm/store/partitioner.hpp"

#include <algorithm>
#include <limits>

namespace epgm::store {

std::string_view strategy_name(PartitionStrategy s) { return s == PartitionStrategy::Range ? "range" : "hash"; }

PartitionStrategy parse_strategy(std::string_view name) {
  if (name == "range") return PartitionStrategy::Range;
  if (name == "hash") return PartitionStrategy::Hash;
  throw Error("unknown partitioner '" + std::string(name) + "' (expected range or hash)");
}

Partitioner Partitioner::hash(uint16_t count) {
  if (count == 0) throw Error("partition count must be positive");
  Partitioner p;
  p.strategy_ = PartitionStrategy::Hash;
  p.count_ = count;
  return p;
}

Partitioner Partitioner::range(std::vector<VertexId> boundaries) {
  if (boundaries.empty() || boundaries.size() > 0xFFFF) throw Error("range partitioner needs 1..65535 boundaries");
  if (boundaries.front() != 0) throw Error("first range boundary must be 0");
  for (size_t i = 1; i < boundaries.size(); ++i)
    if (boundaries[i] <= boundaries[i - 1]) throw Error("range boundaries must be strictly increasing");
  Partitioner p;
  p.strategy_ = PartitionStrategy::Range;
  p.count_ = static_cast<uint16_t>(boundaries.size());
  p.boundaries_ = std::move(boundaries);
  return p;
}

Partitioner Partitioner::equal_width(uint16_t count) {
  return range_for(count, std::numeric_limits<VertexId>::max());
}

Partitioner Partitioner::range_for(uint16_t count, VertexId max_id) {
  if (count == 0) throw Error("partition count must be positive");
  // Width rounds up so that the last interval ends at or after max_id.
  unsigned __int128 span = static_cast<unsigned __int128>(max_id) + 1;
  unsigned __int128 width = (span + count - 1) / count;
  if (width == 0) width = 1;
  std::vector<VertexId> boundaries;
  for (uint16_t i = 0; i < count; ++i) {
    unsigned __int128 start = width * i;
    if (i > 0 && start <= boundaries.back()) start = static_cast<unsigned __int128>(boundaries.back()) + 1;
    boundaries.push_back(static_cast<VertexId>(start));
  }
  return range(std::move(boundaries));
}

uint16_t Partitioner::assign(VertexId id) const {
  if (strategy_ == PartitionStrategy::Hash) return static_cast<uint16_t>(id % count_);
  auto it = std::upper_bound(boundaries_.begin(), boundaries_.end(), id);
  return static_cast<uint16_t>(it - boundaries_.begin() - 1);
}

}  // namespace epgm::store
