#include "epgm/store/kv.hpp"

#include <fcntl.h>
#include <unistd.h>
#include <zlib.h>

#include <algorithm>
#include <fstream>
#include <mutex>
#include <sstream>

namespace epgm::store {

namespace fs = std::filesystem;

namespace {

constexpr uint32_t kTombstoneLength = 0xFFFFFFFF;
constexpr std::string_view kSegmentMagic = "EPGMSEG1";

uint32_t crc32_of(std::string_view bytes) {
  return static_cast<uint32_t>(
      ::crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

void encode_record(std::string& out, const Mutation& m, uint64_t timestamp) {
  size_t start = out.size();
  out += static_cast<char>(m.family);
  out += m.row;
  put_u16(out, static_cast<uint16_t>(m.qualifier.size()));
  out += m.qualifier;
  put_u64(out, timestamp);
  if (m.value) {
    put_u32(out, static_cast<uint32_t>(m.value->size()));
    out += *m.value;
  } else {
    put_u32(out, kTombstoneLength);
  }
  put_u32(out, crc32_of(std::string_view(out).substr(start)));
}

void encode_commit(std::string& out, uint32_t count, uint64_t timestamp) {
  size_t start = out.size();
  out += static_cast<char>(kCommitMarker);
  put_u32(out, count);
  put_u64(out, timestamp);
  put_u32(out, crc32_of(std::string_view(out).substr(start)));
}

struct Record {
  bool commit = false;
  uint32_t count = 0;
  Mutation mutation;
  uint64_t timestamp = 0;
};

enum class ParseStatus { Ok, Incomplete };

// Decodes the record at `pos`. Incomplete means the bytes end mid-record; a
// complete record that fails validation throws.
ParseStatus parse_record(std::string_view bytes, size_t& pos, Record& rec, const std::string& file) {
  size_t start = pos;
  auto remaining = [&] { return bytes.size() - pos; };
  if (remaining() < 1) return ParseStatus::Incomplete;
  auto family = static_cast<uint8_t>(bytes[pos]);
  if (family == kCommitMarker) {
    if (remaining() < 17) return ParseStatus::Incomplete;
    uint32_t stored = get_u32(bytes, pos + 13);
    if (crc32_of(bytes.substr(start, 13)) != stored) throw CorruptionError(file, start, "commit checksum mismatch");
    rec.commit = true;
    rec.count = get_u32(bytes, pos + 1);
    rec.timestamp = get_u64(bytes, pos + 5);
    pos += 17;
    return ParseStatus::Ok;
  }
  if (!is_valid_family(family)) throw CorruptionError(file, start, "unknown family " + std::to_string(family));
  size_t key_size = row_key_size(family);
  if (remaining() < 1 + key_size + 2) return ParseStatus::Incomplete;
  pos += 1;
  std::string row(bytes.substr(pos, key_size));
  pos += key_size;
  size_t qual_len = get_u16(bytes, pos);
  pos += 2;
  if (remaining() < qual_len + 12) return ParseStatus::Incomplete;
  std::string qualifier(bytes.substr(pos, qual_len));
  pos += qual_len;
  uint64_t timestamp = get_u64(bytes, pos);
  pos += 8;
  uint32_t value_len = get_u32(bytes, pos);
  pos += 4;
  std::optional<std::string> value;
  if (value_len != kTombstoneLength) {
    if (remaining() < value_len) return ParseStatus::Incomplete;
    value = std::string(bytes.substr(pos, value_len));
    pos += value_len;
  }
  if (remaining() < 4) return ParseStatus::Incomplete;
  uint32_t stored = get_u32(bytes, pos);
  if (crc32_of(bytes.substr(start, pos - start)) != stored) throw CorruptionError(file, start, "record checksum mismatch");
  pos += 4;
  rec.commit = false;
  rec.mutation = Mutation{family, std::move(row), std::move(qualifier), std::move(value)};
  rec.timestamp = timestamp;
  return ParseStatus::Ok;
}

std::string read_file(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw StoreError("cannot read " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void fsync_path(const fs::path& path) {
  int fd = ::open(path.c_str(), O_RDONLY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

std::vector<fs::path> list_segments(const fs::path& dir) {
  std::vector<fs::path> files;
  if (!fs::exists(dir)) return files;
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".seg") files.push_back(entry.path());
  std::sort(files.begin(), files.end());
  return files;
}

const CellVersion* version_at(const std::vector<CellVersion>& versions, std::optional<uint64_t> as_of) {
  for (const auto& v : versions)
    if (!as_of || v.timestamp <= *as_of) return &v;
  return nullptr;
}

}  // namespace

KvStore::KvStore(fs::path dir, size_t max_versions, SyncMode sync)
    : dir_(std::move(dir)), max_versions_(max_versions), sync_mode_(sync) {
  if (max_versions_ == 0) throw StoreError("max-versions must be positive");
  fs::create_directories(dir_ / "segments");
  load();
}

KvStore::~KvStore() {
  try {
    std::unique_lock lock(mutex_);
    write_pending();
  } catch (...) {
  }
  if (journal_) std::fclose(journal_);
}

void KvStore::load() {
  tables_.clear();
  last_timestamp_ = 0;
  next_segment_ = 0;
  for (const auto& file : list_segments(dir_ / "segments")) {
    load_segment(file);
    auto stem = file.stem().string();
    next_segment_ = std::max<uint64_t>(next_segment_, std::stoull(stem) + 1);
  }
  replay_journal();
}

void KvStore::load_segment(const fs::path& file) {
  std::string bytes = read_file(file);
  std::string name = file.string();
  if (bytes.substr(0, kSegmentMagic.size()) != kSegmentMagic) throw CorruptionError(name, 0, "bad segment magic");
  size_t pos = kSegmentMagic.size();
  size_t count = 0;
  while (true) {
    Record rec;
    size_t start = pos;
    if (parse_record(bytes, pos, rec, name) == ParseStatus::Incomplete)
      throw CorruptionError(name, start, "truncated segment");
    if (rec.commit) {
      if (rec.count != count) throw CorruptionError(name, start, "segment record count mismatch");
      if (pos != bytes.size()) throw CorruptionError(name, pos, "bytes after segment footer");
      last_timestamp_ = std::max(last_timestamp_, rec.timestamp);
      return;
    }
    apply(rec.mutation, rec.timestamp);
    ++count;
  }
}

void KvStore::replay_journal() {
  fs::path file = dir_ / "journal.log";
  std::string bytes = fs::exists(file) ? read_file(file) : std::string();
  std::vector<Record> batch;
  size_t pos = 0;
  size_t committed = 0;
  while (pos < bytes.size()) {
    Record rec;
    if (parse_record(bytes, pos, rec, file.string()) == ParseStatus::Incomplete) break;
    if (!rec.commit) {
      batch.push_back(std::move(rec));
      continue;
    }
    if (rec.count != batch.size()) throw CorruptionError(file.string(), pos - 17, "commit count mismatch");
    for (const auto& r : batch) apply(r.mutation, r.timestamp);
    last_timestamp_ = std::max(last_timestamp_, rec.timestamp);
    batch.clear();
    committed = pos;
  }
  if (journal_) std::fclose(journal_);
  journal_ = nullptr;
  if (committed < bytes.size()) fs::resize_file(file, committed);
  journal_ = std::fopen(file.c_str(), "ab");
  if (!journal_) throw StoreError("cannot open " + file.string());
}

void KvStore::apply(const Mutation& m, uint64_t timestamp) {
  auto& row = tables_[table_of(m.family)][m.row];
  auto& versions = row[CellKey{m.family, m.qualifier}];
  auto it = std::find_if(versions.begin(), versions.end(),
                         [&](const CellVersion& v) { return v.timestamp <= timestamp; });
  if (it != versions.end() && it->timestamp == timestamp)
    it->value = m.value;
  else
    versions.insert(it, CellVersion{timestamp, m.value});
  if (versions.size() > max_versions_) versions.resize(max_versions_);
}

uint64_t KvStore::write(const std::vector<Mutation>& batch, std::optional<uint64_t> timestamp) {
  std::unique_lock lock(mutex_);
  for (const auto& m : batch) {
    if (!is_valid_family(m.family)) throw StoreError("invalid family " + std::to_string(m.family));
    if (m.row.size() != row_key_size(m.family))
      throw StoreError("row key of " + std::to_string(m.row.size()) + " bytes for family " +
                       std::string(family_name(m.family)));
    if (m.qualifier.size() > 0xFFFF) throw StoreError("qualifier too long");
    if (m.value && m.value->size() >= kTombstoneLength) throw StoreError("value too long");
  }
  uint64_t ts = timestamp ? *timestamp : last_timestamp_ + 1;
  append_batch(batch, ts);
  for (const auto& m : batch) apply(m, ts);
  last_timestamp_ = std::max(last_timestamp_, ts);
  return ts;
}

void KvStore::append_batch(const std::vector<Mutation>& batch, uint64_t timestamp) {
  for (const auto& m : batch) encode_record(pending_, m, timestamp);
  encode_commit(pending_, static_cast<uint32_t>(batch.size()), timestamp);
  if (sync_mode_ == SyncMode::Always) write_pending();
}

void KvStore::write_pending() {
  if (pending_.empty() || !journal_) return;
  if (std::fwrite(pending_.data(), 1, pending_.size(), journal_) != pending_.size())
    throw StoreError("journal write failed");
  if (std::fflush(journal_) != 0) throw StoreError("journal flush failed");
  ::fsync(::fileno(journal_));
  pending_.clear();
}

void KvStore::sync() {
  std::unique_lock lock(mutex_);
  write_pending();
}

void KvStore::flush() {
  std::unique_lock lock(mutex_);
  write_pending();
  std::string out(kSegmentMagic);
  uint32_t count = 0;
  for (const auto& [table, rows] : tables_) {
    for (const auto& [row, cells] : rows) {
      for (const auto& [key, versions] : cells) {
        if (versions.empty() || !versions.front().value) continue;
        for (auto it = versions.rbegin(); it != versions.rend(); ++it) {
          encode_record(out, Mutation{key.first, row, key.second, it->value}, it->timestamp);
          ++count;
        }
      }
    }
  }
  encode_commit(out, count, last_timestamp_);

  fs::path segments = dir_ / "segments";
  auto old_segments = list_segments(segments);
  char name[32];
  std::snprintf(name, sizeof name, "%012llu.seg", static_cast<unsigned long long>(next_segment_++));
  fs::path target = segments / name;
  fs::path tmp = segments / (std::string(name) + ".tmp");
  {
    std::ofstream file(tmp, std::ios::binary | std::ios::trunc);
    file.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!file) throw StoreError("cannot write " + tmp.string());
  }
  fsync_path(tmp);
  fs::rename(tmp, target);
  fsync_path(segments);
  for (const auto& old : old_segments) fs::remove(old);

  std::fclose(journal_);
  journal_ = nullptr;
  fs::path journal = dir_ / "journal.log";
  fs::resize_file(journal, 0);
  journal_ = std::fopen(journal.c_str(), "ab");
  if (!journal_) throw StoreError("cannot open " + journal.string());

  // Mirror the on-disk state: fully deleted cells disappear from memory too.
  for (auto& [table, rows] : tables_) {
    for (auto row = rows.begin(); row != rows.end();) {
      std::erase_if(row->second, [](const auto& cell) { return cell.second.empty() || !cell.second.front().value; });
      row = row->second.empty() ? rows.erase(row) : std::next(row);
    }
  }
}

void KvStore::simulate_crash() {
  std::unique_lock lock(mutex_);
  pending_.clear();
  load();
}

std::optional<std::string> KvStore::get(uint8_t family, std::string_view row, std::string_view qualifier,
                                        std::optional<uint64_t> as_of) const {
  std::shared_lock lock(mutex_);
  auto t = tables_.find(table_of(family));
  if (t == tables_.end()) return std::nullopt;
  auto r = t->second.find(row);
  if (r == t->second.end()) return std::nullopt;
  auto c = r->second.find(CellKey{family, std::string(qualifier)});
  if (c == r->second.end()) return std::nullopt;
  const auto* v = version_at(c->second, as_of);
  if (!v || !v->value) return std::nullopt;
  return v->value;
}

std::vector<Cell> KvStore::read_row(Table table, std::string_view row, std::optional<uint64_t> as_of) const {
  std::shared_lock lock(mutex_);
  std::vector<Cell> cells;
  auto t = tables_.find(table);
  if (t == tables_.end()) return cells;
  auto r = t->second.find(row);
  if (r == t->second.end()) return cells;
  for (const auto& [key, versions] : r->second) {
    const auto* v = version_at(versions, as_of);
    if (v && v->value) cells.push_back(Cell{key.first, key.second, *v->value, v->timestamp});
  }
  return cells;
}

std::vector<CellVersion> KvStore::versions(uint8_t family, std::string_view row, std::string_view qualifier) const {
  std::shared_lock lock(mutex_);
  auto t = tables_.find(table_of(family));
  if (t == tables_.end()) return {};
  auto r = t->second.find(row);
  if (r == t->second.end()) return {};
  auto c = r->second.find(CellKey{family, std::string(qualifier)});
  if (c == r->second.end()) return {};
  return c->second;
}

void KvStore::scan(Table table, std::string_view begin, std::string_view end, std::optional<uint64_t> as_of,
                   const std::function<void(const std::string&, const std::vector<Cell>&)>& visit) const {
  std::shared_lock lock(mutex_);
  auto t = tables_.find(table);
  if (t == tables_.end()) return;
  std::vector<Cell> cells;
  for (auto r = t->second.lower_bound(begin); r != t->second.end(); ++r) {
    if (!end.empty() && r->first >= end) break;
    cells.clear();
    for (const auto& [key, versions] : r->second) {
      const auto* v = version_at(versions, as_of);
      if (v && v->value) cells.push_back(Cell{key.first, key.second, *v->value, v->timestamp});
    }
    if (!cells.empty()) visit(r->first, cells);
  }
}

uint64_t KvStore::last_timestamp() const {
  std::shared_lock lock(mutex_);
  return last_timestamp_;
}

size_t KvStore::segment_count() const {
  std::shared_lock lock(mutex_);
  return list_segments(dir_ / "segments").size();
}

uint64_t KvStore::journal_size() const {
  std::shared_lock lock(mutex_);
  fs::path journal = dir_ / "journal.log";
  return (fs::exists(journal) ? fs::file_size(journal) : 0) + pending_.size();
}

}  // namespace epgm::store
