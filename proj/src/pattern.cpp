#include "epgm/pattern.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace epgm::pattern {

namespace {

class PatternParser {
 public:
  explicit PatternParser(std::string_view text) : text_(text) {}

  PatternGraph parse() {
    PatternGraph out;
    std::string previous = vertex(out);
    skip_space();
    while (pos_ < text_.size()) {
      bool leftward = false;
      if (consume("<-")) {
        leftward = true;
      } else if (!consume("-")) {
        fail("expected '-' or '<-'");
      }
      std::string edge_name = ident();
      if (leftward) {
        expect("-");
      } else {
        expect("->");
      }
      size_t edge_position = pos_;
      std::string next = vertex(out);
      for (const auto& e : out.edges) {
        if (e.name == edge_name) throw PatternSyntaxError("duplicate edge variable '" + edge_name + "'", edge_position);
      }
      if (leftward) {
        out.edges.push_back({edge_name, next, previous});
      } else {
        out.edges.push_back({edge_name, previous, next});
      }
      previous = next;
      skip_space();
    }
    return out;
  }

 private:
  std::string vertex(PatternGraph& out) {
    expect("(");
    std::string name = ident();
    expect(")");
    if (std::find(out.vertices.begin(), out.vertices.end(), name) == out.vertices.end()) out.vertices.push_back(name);
    return name;
  }

  std::string ident() {
    skip_space();
    if (pos_ >= text_.size() || !std::isalpha(static_cast<unsigned char>(text_[pos_]))) fail("expected identifier");
    size_t start = pos_;
    while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return std::string(text_.substr(start, pos_ - start));
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool consume(std::string_view token) {
    skip_space();
    if (text_.substr(pos_, token.size()) != token) return false;
    pos_ += token.size();
    return true;
  }

  void expect(std::string_view token) {
    if (!consume(token)) fail("expected '" + std::string(token) + "'");
  }

  [[noreturn]] void fail(const std::string& message) const {
    throw PatternSyntaxError("pattern syntax error at position " + std::to_string(pos_) + ": " + message, pos_);
  }

  std::string_view text_;
  size_t pos_ = 0;
};

struct Neighbor {
  EdgeId edge;
  VertexId vertex;
};

struct Adjacency {
  std::unordered_map<VertexId, std::vector<Neighbor>> out;
  std::unordered_map<VertexId, std::vector<Neighbor>> in;

  explicit Adjacency(const LogicalGraph& g) {
    for (auto id : g.edge_ids) {
      const Edge& e = g.edge(id);
      out[e.source].push_back({id, e.target});
      in[e.target].push_back({id, e.source});
    }
  }

  const std::vector<Neighbor>& outgoing(VertexId v) const {
    static const std::vector<Neighbor> none;
    auto it = out.find(v);
    return it == out.end() ? none : it->second;
  }
  const std::vector<Neighbor>& incoming(VertexId v) const {
    static const std::vector<Neighbor> none;
    auto it = in.find(v);
    return it == in.end() ? none : it->second;
  }
};

// Backtracking over pattern vertices in a connectivity-first order. After a
// vertex is bound, every pattern edge whose endpoints are now both bound is
// bound to a distinct data edge.
class Matcher {
 public:
  using Callback = std::function<void(const std::vector<VertexId>&, const std::vector<EdgeId>&)>;

  Matcher(const LogicalGraph& graph, const PatternGraph& pattern)
      : graph_(graph), pattern_(pattern), adjacency_(graph) {
    const size_t n = pattern.vertices.size();
    std::unordered_map<std::string, size_t> index;
    for (size_t i = 0; i < n; ++i) index[pattern.vertices[i]] = i;
    for (const auto& e : pattern.edges) edges_.push_back({index.at(e.source), index.at(e.target)});

    std::vector<size_t> degree(n, 0);
    for (const auto& [s, t] : edges_) {
      ++degree[s];
      ++degree[t];
    }
    std::vector<bool> placed(n, false);
    position_.assign(n, 0);
    while (order_.size() < n) {
      size_t best = n;
      size_t best_links = 0;
      for (size_t v = 0; v < n; ++v) {
        if (placed[v]) continue;
        size_t links = 0;
        for (const auto& [s, t] : edges_) {
          if ((s == v && placed[t]) || (t == v && placed[s])) ++links;
        }
        if (best == n || links > best_links || (links == best_links && best_links == 0 && degree[v] > degree[best])) {
          best = v;
          best_links = links;
        }
      }
      placed[best] = true;
      position_[best] = order_.size();
      order_.push_back(best);
    }
    edges_at_step_.resize(n);
    for (size_t e = 0; e < edges_.size(); ++e) {
      auto [s, t] = edges_[e];
      edges_at_step_[std::max(position_[s], position_[t])].push_back(e);
    }
    vertex_binding_.assign(n, 0);
    edge_binding_.assign(edges_.size(), 0);
  }

  void run(const Callback& callback) {
    callback_ = &callback;
    if (order_.empty()) return;
    bind_vertex(0);
  }

 private:
  void bind_vertex(size_t step) {
    if (step == order_.size()) {
      (*callback_)(vertex_binding_, edge_binding_);
      return;
    }
    const size_t pv = order_[step];
    for (VertexId candidate : candidates(step, pv)) {
      if (used_vertices_.count(candidate)) continue;
      vertex_binding_[pv] = candidate;
      used_vertices_.insert(candidate);
      bind_edges(step, 0);
      used_vertices_.erase(candidate);
    }
  }

  void bind_edges(size_t step, size_t k) {
    const auto& pending = edges_at_step_[step];
    if (k == pending.size()) {
      bind_vertex(step + 1);
      return;
    }
    const size_t pe = pending[k];
    const VertexId source = vertex_binding_[edges_[pe].first];
    const VertexId target = vertex_binding_[edges_[pe].second];
    for (const auto& n : adjacency_.outgoing(source)) {
      if (n.vertex != target || used_edges_.count(n.edge)) continue;
      edge_binding_[pe] = n.edge;
      used_edges_.insert(n.edge);
      bind_edges(step, k + 1);
      used_edges_.erase(n.edge);
    }
  }

  std::vector<VertexId> candidates(size_t step, size_t pv) const {
    std::vector<VertexId> out;
    for (const auto& [s, t] : edges_) {
      if (s == pv && t != pv && position_[t] < step) {
        for (const auto& n : adjacency_.incoming(vertex_binding_[t])) out.push_back(n.vertex);
        break;
      }
      if (t == pv && s != pv && position_[s] < step) {
        for (const auto& n : adjacency_.outgoing(vertex_binding_[s])) out.push_back(n.vertex);
        break;
      }
    }
    if (out.empty()) {
      bool constrained = false;
      for (const auto& [s, t] : edges_) {
        if ((s == pv && t != pv && position_[t] < step) || (t == pv && s != pv && position_[s] < step)) constrained = true;
      }
      if (constrained) return out;
      return graph_.vertex_ids;
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

  const LogicalGraph& graph_;
  const PatternGraph& pattern_;
  Adjacency adjacency_;
  std::vector<std::pair<size_t, size_t>> edges_;
  std::vector<size_t> order_;
  std::vector<size_t> position_;
  std::vector<std::vector<size_t>> edges_at_step_;
  std::vector<VertexId> vertex_binding_;
  std::vector<EdgeId> edge_binding_;
  std::unordered_set<VertexId> used_vertices_;
  std::unordered_set<EdgeId> used_edges_;
  const Callback* callback_ = nullptr;
};

Embedding make_embedding(const PatternGraph& pattern, const std::vector<VertexId>& vertices,
                         const std::vector<EdgeId>& edges) {
  Embedding e;
  for (size_t i = 0; i < pattern.vertices.size(); ++i) e.vertices.emplace(pattern.vertices[i], vertices[i]);
  for (size_t i = 0; i < pattern.edges.size(); ++i) e.edges.emplace(pattern.edges[i].name, edges[i]);
  return e;
}

}  // namespace

PatternGraph parse_pattern(std::string_view text) { return PatternParser(text).parse(); }

std::string to_string(const PatternGraph& pattern) {
  // Parsed patterns are chains, so each edge continues from the vertex the
  // previous one ended at.
  if (!pattern.vertices.empty()) {
    std::string current = pattern.vertices.front();
    std::string out = "(" + current + ")";
    bool chain = true;
    std::set<std::string> visited{current};
    for (const auto& e : pattern.edges) {
      if (e.source == current) {
        out += "-" + e.name + "->(" + e.target + ")";
        current = e.target;
      } else if (e.target == current) {
        out += "<-" + e.name + "-(" + e.source + ")";
        current = e.source;
      } else {
        chain = false;
        break;
      }
      visited.insert(current);
    }
    if (chain && visited.size() == pattern.vertices.size()) return out;
  }
  std::string out;
  std::set<std::string> covered;
  for (const auto& e : pattern.edges) {
    if (!out.empty()) out += ' ';
    out += "(" + e.source + ")-" + e.name + "->(" + e.target + ")";
    covered.insert(e.source);
    covered.insert(e.target);
  }
  for (const auto& v : pattern.vertices) {
    if (covered.count(v)) continue;
    if (!out.empty()) out += ' ';
    out += "(" + v + ")";
  }
  return out;
}

std::vector<Embedding> enumerate_embeddings(const LogicalGraph& graph, const PatternGraph& pattern) {
  std::vector<Embedding> out;
  Matcher matcher(graph, pattern);
  matcher.run([&](const std::vector<VertexId>& vs, const std::vector<EdgeId>& es) {
    out.push_back(make_embedding(pattern, vs, es));
  });
  return out;
}

GraphCollection match_pattern(const LogicalGraph& graph, const PatternGraph& pattern,
                              const BindingPredicate& predicate) {
  using Key = std::pair<IdSet, IdSet>;
  std::map<Key, bool> seen;
  Matcher matcher(graph, pattern);
  matcher.run([&](const std::vector<VertexId>& vs, const std::vector<EdgeId>& es) {
    Key key{make_id_set(vs), make_id_set(es)};
    auto it = seen.find(key);
    if (it != seen.end() && it->second) return;
    bool accepted = true;
    if (predicate) {
      LogicalGraph sub;
      sub.head.id = kTemporaryIdBase;
      sub.vertex_ids = key.first;
      sub.edge_ids = key.second;
      sub.space = graph.space;
      accepted = predicate(sub, make_embedding(pattern, vs, es));
    }
    if (it == seen.end()) {
      seen.emplace(std::move(key), accepted);
    } else {
      it->second = accepted;
    }
  });
  GraphCollection out;
  for (auto& [key, accepted] : seen) {
    if (!accepted) continue;
    LogicalGraph g;
    g.head.id = next_temporary_graph_id();
    g.vertex_ids = key.first;
    g.edge_ids = key.second;
    g.space = graph.space;
    out.push_back(std::move(g));
  }
  return out;
}

}  // namespace epgm::pattern
