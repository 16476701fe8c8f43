#pragma once

// Shared helpers for the unit and acceptance tests: fixture paths, scratch
// directories, random databases and small independent oracles.

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <functional>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "epgm/json_io.hpp"
#include "epgm/model.hpp"
#include "epgm/pattern.hpp"
#include "epgm/workflow/generators.hpp"

namespace epgm::test {

inline std::filesystem::path data_dir() { return EPGM_DATA_DIR; }
inline std::filesystem::path scripts_dir() { return EPGM_SCRIPTS_DIR; }

inline EpgmDatabase sample() { return load_database_json(data_dir() / "sample.json"); }

inline std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline std::string script(const std::string& name) { return read_text(scripts_dir() / (name + ".grala")); }

/// A fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("epgm-test-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

inline PropertyValue random_value(workflow::Random& rng) {
  switch (rng.below(4)) {
    case 0:
      return PropertyValue(rng.between(-1'000'000, 1'000'000));
    case 1:
      return PropertyValue(static_cast<double>(rng.between(-100000, 100000)) / 64.0);
    case 2:
      return PropertyValue(rng.chance(0.5));
    default: {
      static const std::vector<std::string> words = {"", "Alice", "Leipzig", "a,b", "quote\"d", "Zürich", "x y"};
      return PropertyValue(words[rng.below(words.size())]);
    }
  }
}

inline Properties random_properties(workflow::Random& rng, size_t max_keys) {
  static const std::vector<std::string> keys = {"name", "age", "city", "since", "score", "flag"};
  Properties props;
  for (size_t n = rng.below(max_keys + 1); n > 0; --n) props.insert_or_assign(keys[rng.below(keys.size())], random_value(rng));
  return props;
}

struct RandomDbSpec {
  size_t max_vertices = 8;
  size_t max_edges = 16;
  size_t max_graphs = 3;
  std::vector<std::string> vertex_labels = {"A", "B"};
  std::vector<std::string> edge_labels = {"x", "y"};
  size_t max_keys = 3;
  bool loops = true;
};

/// Random database with loops, parallel edges and closed random graphs.
inline EpgmDatabase random_database(workflow::Random& rng, const RandomDbSpec& spec = {}) {
  EpgmDatabase db;
  size_t n = 1 + rng.below(spec.max_vertices);
  for (size_t i = 0; i < n; ++i)
    db.add_vertex(spec.vertex_labels[rng.below(spec.vertex_labels.size())], random_properties(rng, spec.max_keys));
  size_t m = rng.below(spec.max_edges + 1);
  for (size_t i = 0; i < m; ++i) {
    VertexId s = rng.below(n);
    VertexId t = rng.below(n);
    if (s == t && !spec.loops) continue;
    db.add_edge(s, t, spec.edge_labels[rng.below(spec.edge_labels.size())], random_properties(rng, spec.max_keys));
  }
  for (size_t g = rng.below(spec.max_graphs + 1); g > 0; --g) {
    std::vector<VertexId> vs;
    for (VertexId v = 0; v < n; ++v)
      if (rng.chance(0.5)) vs.push_back(v);
    std::vector<EdgeId> es;
    for (const auto& [id, e] : db.elements().edges())
      if (std::binary_search(vs.begin(), vs.end(), e.source) && std::binary_search(vs.begin(), vs.end(), e.target) &&
          rng.chance(0.7))
        es.push_back(id);
    db.create_logical_graph("G", random_properties(rng, 2), vs, es);
  }
  return db;
}

/// Adjusted Rand index of two labelings of the same items.
inline double adjusted_rand_index(const std::vector<int64_t>& a, const std::vector<int64_t>& b) {
  std::map<std::pair<int64_t, int64_t>, double> cells;
  std::map<int64_t, double> rows, cols;
  for (size_t i = 0; i < a.size(); ++i) {
    cells[{a[i], b[i]}] += 1;
    rows[a[i]] += 1;
    cols[b[i]] += 1;
  }
  auto pairs = [](double x) { return x * (x - 1) / 2; };
  double index = 0, sum_rows = 0, sum_cols = 0;
  for (const auto& [_, v] : cells) index += pairs(v);
  for (const auto& [_, v] : rows) sum_rows += pairs(v);
  for (const auto& [_, v] : cols) sum_cols += pairs(v);
  double expected = sum_rows * sum_cols / pairs(static_cast<double>(a.size()));
  double maximum = (sum_rows + sum_cols) / 2;
  if (maximum == expected) return 1.0;
  return (index - expected) / (maximum - expected);
}

using Subgraph = std::pair<IdSet, IdSet>;

/// Plain enumeration over every injective vertex assignment and every choice
/// of distinct, direction-compatible edges. Shares no code with the matcher.
inline std::vector<Subgraph> brute_force_match(const LogicalGraph& g, const pattern::PatternGraph& p,
                                  const pattern::BindingPredicate& predicate) {
  std::set<Subgraph> found;
  std::vector<VertexId> vs = g.vertex_ids;
  size_t k = p.vertices.size();
  if (vs.size() < k) return {};
  std::vector<VertexId> assignment(k);
  std::vector<bool> used(vs.size(), false);
  std::vector<EdgeId> edge_choice(p.edges.size());

  std::function<void(size_t)> pick_edges = [&](size_t j) {
    if (j == p.edges.size()) {
      pattern::Embedding emb;
      for (size_t i = 0; i < k; ++i) emb.vertices[p.vertices[i]] = assignment[i];
      for (size_t i = 0; i < p.edges.size(); ++i) emb.edges[p.edges[i].name] = edge_choice[i];
      LogicalGraph sub = g;
      sub.vertex_ids = make_id_set(assignment);
      sub.edge_ids = make_id_set(edge_choice);
      if (!predicate || predicate(sub, emb)) found.emplace(sub.vertex_ids, sub.edge_ids);
      return;
    }
    auto index_of = [&](const std::string& name) {
      return static_cast<size_t>(std::find(p.vertices.begin(), p.vertices.end(), name) - p.vertices.begin());
    };
    VertexId s = assignment[index_of(p.edges[j].source)];
    VertexId t = assignment[index_of(p.edges[j].target)];
    for (EdgeId e : g.edge_ids) {
      const Edge& edge = g.edge(e);
      if (edge.source != s || edge.target != t) continue;
      if (std::find(edge_choice.begin(), edge_choice.begin() + j, e) != edge_choice.begin() + j) continue;
      edge_choice[j] = e;
      pick_edges(j + 1);
    }
  };
  std::function<void(size_t)> pick_vertices = [&](size_t i) {
    if (i == k) {
      pick_edges(0);
      return;
    }
    for (size_t c = 0; c < vs.size(); ++c) {
      if (used[c]) continue;
      used[c] = true;
      assignment[i] = vs[c];
      pick_vertices(i + 1);
      used[c] = false;
    }
  };
  pick_vertices(0);
  return {found.begin(), found.end()};
}


/// Chain pattern of one to three edges over at most four variables.
inline std::string random_pattern(workflow::Random& rng) {
  static const std::vector<std::string> vars = {"a", "b", "c", "d"};
  size_t edges = 1 + rng.below(3);
  std::string text = "(" + vars[rng.below(vars.size())] + ")";
  for (size_t i = 0; i < edges; ++i) {
    std::string name = "e" + std::to_string(i);
    text += rng.chance(0.5) ? "-" + name + "->" : "<-" + name + "-";
    text += "(" + vars[rng.below(vars.size())] + ")";
  }
  return text;
}

/// Big-endian row key bytes written out by hand.
inline std::string vertex_key_bytes(uint16_t partition, uint64_t id) {
  std::string out;
  out.push_back(static_cast<char>(partition >> 8));
  out.push_back(static_cast<char>(partition & 0xFF));
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<char>((id >> shift) & 0xFF));
  return out;
}

inline std::string u64_bytes(uint64_t v) { return vertex_key_bytes(0, v).substr(2); }

inline std::string u32_bytes(uint32_t v) { return u64_bytes(v).substr(4); }

inline std::string bytes(std::initializer_list<int> values) {
  std::string out;
  for (int v : values) out.push_back(static_cast<char>(v));
  return out;
}

}  // namespace epgm::test
