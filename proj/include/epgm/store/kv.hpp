#pragma once

// Embedded sorted key-value substrate. Cells are addressed by
// (row, family, qualifier) and keep up to `max_versions` timestamped
// versions. Writes go to an append-only journal in batches terminated by a
// commit marker; `flush` folds everything into one sorted segment file.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "epgm/store/codec.hpp"

namespace epgm::store {

class StoreError : public Error {
 public:
  using Error::Error;
};

/// A journal or segment file failed validation.
class CorruptionError : public StoreError {
 public:
  CorruptionError(const std::string& file, uint64_t offset, const std::string& what)
      : StoreError(file + " corrupt at offset " + std::to_string(offset) + ": " + what), offset_(offset) {}
  uint64_t offset() const { return offset_; }

 private:
  uint64_t offset_;
};

enum class SyncMode {
  /// Every batch reaches the journal file (and fsync) before write returns.
  Always,
  /// Batches are buffered until sync() or flush().
  Manual,
};

struct Mutation {
  uint8_t family = 0;
  std::string row;
  std::string qualifier;
  /// nullopt writes a tombstone.
  std::optional<std::string> value;
};

struct Cell {
  uint8_t family = 0;
  std::string qualifier;
  std::string value;
  uint64_t timestamp = 0;

  bool operator==(const Cell&) const = default;
};

struct CellVersion {
  uint64_t timestamp = 0;
  std::optional<std::string> value;

  bool operator==(const CellVersion&) const = default;
};

class KvStore {
 public:
  /// Opens or creates the substrate under `dir`, loading segments and
  /// replaying the journal. Incomplete trailing batches are discarded.
  KvStore(std::filesystem::path dir, size_t max_versions, SyncMode sync);
  ~KvStore();
  KvStore(const KvStore&) = delete;
  KvStore& operator=(const KvStore&) = delete;

  /// Applies `batch` atomically at one timestamp and returns it. Without an
  /// explicit timestamp the next logical one is issued.
  uint64_t write(const std::vector<Mutation>& batch, std::optional<uint64_t> timestamp = std::nullopt);

  /// Newest live value at or before `as_of`.
  std::optional<std::string> get(uint8_t family, std::string_view row, std::string_view qualifier,
                                 std::optional<uint64_t> as_of = std::nullopt) const;
  /// Live cells of one row as of a timestamp, ordered by (family, qualifier).
  std::vector<Cell> read_row(Table table, std::string_view row, std::optional<uint64_t> as_of = std::nullopt) const;
  /// Every retained version of a cell, newest first.
  std::vector<CellVersion> versions(uint8_t family, std::string_view row, std::string_view qualifier) const;

  /// Visits rows of `table` with keys in [begin, end) in byte order. An
  /// empty `end` means unbounded. Rows without live cells are skipped.
  void scan(Table table, std::string_view begin, std::string_view end, std::optional<uint64_t> as_of,
            const std::function<void(const std::string& row, const std::vector<Cell>& cells)>& visit) const;

  /// Writes buffered batches to the journal and fsyncs it.
  void sync();
  /// Syncs, then merges all state into a single new segment and truncates
  /// the journal. Cells whose newest version is a tombstone are dropped.
  void flush();
  /// Drops unsynced batches and rebuilds memory from disk.
  void simulate_crash();

  uint64_t last_timestamp() const;
  size_t max_versions() const { return max_versions_; }
  size_t segment_count() const;
  uint64_t journal_size() const;

 private:
  using CellKey = std::pair<uint8_t, std::string>;
  using Versions = std::vector<CellVersion>;
  using Row = std::map<CellKey, Versions>;
  using TableMap = std::map<std::string, Row, std::less<>>;

  void load();
  void load_segment(const std::filesystem::path& file);
  void replay_journal();
  void apply(const Mutation& m, uint64_t timestamp);
  void append_batch(const std::vector<Mutation>& batch, uint64_t timestamp);
  void write_pending();

  std::filesystem::path dir_;
  size_t max_versions_;
  SyncMode sync_mode_;
  std::FILE* journal_ = nullptr;
  std::string pending_;
  std::map<uint8_t, TableMap> tables_;
  uint64_t last_timestamp_ = 0;
  uint64_t next_segment_ = 0;
  mutable std::shared_mutex mutex_;
};

}  // namespace epgm::store
