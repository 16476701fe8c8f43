#pragma once

#include <map>
#include <memory>
#include <string>
#include <type_traits>
#include <variant>
#include <vector>

#include "epgm/grala/ast.hpp"
#include "epgm/model.hpp"
#include "epgm/pattern.hpp"

namespace epgm::grala {

struct Value;
class Environment;

struct Absent {};

struct SymbolValue {
  std::string name;
};

/// The implicit `db` object.
struct DatabaseValue {};

struct GraphValue {
  LogicalGraph graph;
  /// Pattern variable bindings, present while a match predicate runs.
  std::shared_ptr<const pattern::Embedding> bindings;
};

struct CollectionValue {
  GraphCollection graphs;
};

struct VertexValue {
  const Vertex* vertex = nullptr;
  /// Keeps the referenced vertex alive.
  std::shared_ptr<const void> owner;
  /// Non-null for the summary vertex inside a summarize callback, the only
  /// element a script may modify.
  Vertex* summary = nullptr;
};

struct EdgeValue {
  const Edge* edge = nullptr;
  std::shared_ptr<const void> owner;
  Edge* summary = nullptr;
};

/// `g.V`, `g.E` and the member sets handed to summarize callbacks.
struct ElementSetValue {
  bool edges = false;
  std::shared_ptr<const ElementSpace> space;
  std::vector<uint64_t> ids;
  std::shared_ptr<const pattern::Embedding> bindings;
};

/// Result of `values(key)`.
struct ValueListValue {
  std::vector<PropertyValue> values;
};

struct MapValue {
  std::shared_ptr<const std::vector<std::pair<std::string, Value>>> entries;
};

struct SetValue {
  std::shared_ptr<const std::vector<Value>> items;
};

struct LambdaValue {
  ExprPtr node;
  std::shared_ptr<Environment> closure;
};

struct PatternValue {
  std::shared_ptr<const pattern::PatternGraph> pattern;
};

/// What `$name` evaluates to; only meaningful as an element-set index.
struct BindingName {
  std::string name;
};

struct Value {
  using Variant = std::variant<Absent, PropertyValue, SymbolValue, DatabaseValue, GraphValue, CollectionValue,
                               VertexValue, EdgeValue, ElementSetValue, ValueListValue, MapValue, SetValue, LambdaValue,
                               PatternValue, BindingName>;
  Variant v;

  Value() = default;
  template <class T>
    requires(!std::is_same_v<std::remove_cvref_t<T>, Value>)
  Value(T&& x) : v(std::forward<T>(x)) {}

  template <class T>
  bool is() const {
    return std::holds_alternative<T>(v);
  }
  template <class T>
  const T* get() const {
    return std::get_if<T>(&v);
  }
};

/// Short human readable type name, e.g. "graph" or "collection".
std::string type_name(const Value& value);
/// One-line rendering for diagnostics and the CLI summary.
std::string describe(const Value& value);

class Environment {
 public:
  explicit Environment(std::shared_ptr<Environment> parent = nullptr) : parent_(std::move(parent)) {}

  const Value* lookup(const std::string& name) const;
  void define(const std::string& name, Value value);
  const std::map<std::string, Value>& bindings() const { return vars_; }

 private:
  std::shared_ptr<Environment> parent_;
  std::map<std::string, Value> vars_;
};

}  // namespace epgm::grala
