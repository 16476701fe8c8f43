#include "epgm/grala/interpreter.hpp"

#include <algorithm>
#include <cmath>

#include "epgm/operators.hpp"

namespace epgm::grala {

namespace {

[[noreturn]] void runtime_error(const std::string& message, const Position& p) { throw ScriptError(message, p); }

bool is_number(const PropertyValue& p) { return p.is_int() || p.is_float(); }

class Evaluator {
 public:
  Evaluator(const EpgmDatabase& db, const algo::AlgorithmRegistry& registry, const LogicalGraph& database_graph)
      : db_(db), registry_(registry), database_graph_(database_graph) {}

  Value eval(const Expr& e, const std::shared_ptr<Environment>& env) {
    switch (e.kind) {
      case ExprKind::Integer: return PropertyValue(e.int_value);
      case ExprKind::Float: return PropertyValue(e.float_value);
      case ExprKind::String: return PropertyValue(e.text);
      case ExprKind::Boolean: return PropertyValue(e.int_value != 0);
      case ExprKind::Symbol: return SymbolValue{e.text};
      case ExprKind::Binding: return BindingName{e.text};
      case ExprKind::Variable: {
        const Value* v = env->lookup(e.text);
        if (!v) runtime_error("unknown variable '" + e.text + "'", e.position);
        return *v;
      }
      case ExprKind::Collection: {
        CollectionValue out;
        for (const auto& child : e.children) out.graphs.push_back(as_graph(eval(*child, env), child->position));
        return out;
      }
      case ExprKind::Set: {
        auto items = std::make_shared<std::vector<Value>>();
        for (const auto& child : e.children) items->push_back(eval(*child, env));
        return SetValue{items};
      }
      case ExprKind::Map: {
        auto entries = std::make_shared<std::vector<std::pair<std::string, Value>>>();
        for (size_t i = 0; i + 1 < e.children.size(); i += 2) {
          Value key = eval(*e.children[i], env);
          const auto* k = key.get<PropertyValue>();
          if (!k || !k->is_string()) runtime_error("map keys must be strings, got " + type_name(key), e.children[i]->position);
          entries->emplace_back(k->as_string(), eval(*e.children[i + 1], env));
        }
        return MapValue{entries};
      }
      case ExprKind::Lambda: return LambdaValue{std::make_shared<Expr>(e), env};
      case ExprKind::Member: return member(e, eval(*e.children[0], env));
      case ExprKind::Call: return call(e, env);
      case ExprKind::Index: return index(eval(*e.children[0], env), eval(*e.children[1], env), e.position);
      case ExprKind::New: return construct(e, env);
      case ExprKind::Binary: return binary(e, env);
      case ExprKind::Unary: {
        Value operand = eval(*e.children[0], env);
        const auto* p = operand.get<PropertyValue>();
        if (e.text == "!") {
          if (!p || !p->is_bool()) runtime_error("'!' expects a boolean, got " + type_name(operand), e.position);
          return PropertyValue(!p->as_bool());
        }
        if (!p || !is_number(*p)) runtime_error("unary '-' expects a number, got " + type_name(operand), e.position);
        if (p->is_int()) return PropertyValue(-p->as_int());
        return PropertyValue(-p->as_float());
      }
      case ExprKind::IndexAssign: return assign(e, env);
    }
    runtime_error("unsupported expression", e.position);
  }

  Value call_lambda(const LambdaValue& lambda, std::vector<Value> args, const Position& call_site) {
    const Expr& node = *lambda.node;
    if (args.size() != node.params.size()) {
      runtime_error("lambda expects " + std::to_string(node.params.size()) + " argument(s), got " +
                        std::to_string(args.size()),
                    call_site);
    }
    auto env = std::make_shared<Environment>(lambda.closure);
    for (size_t i = 0; i < args.size(); ++i) {
      const Parameter& p = node.params[i];
      if (p.type == "Graph" && args[i].is<DatabaseValue>()) args[i] = GraphValue{database_graph_, nullptr};
      bool ok = (p.type == "Graph" && args[i].is<GraphValue>()) || (p.type == "Vertex" && args[i].is<VertexValue>()) ||
                (p.type == "Edge" && args[i].is<EdgeValue>()) || (p.type == "Set" && args[i].is<ElementSetValue>()) ||
                (p.type == "Collection" && args[i].is<CollectionValue>());
      if (!ok) {
        runtime_error("parameter '" + p.name + "' expects " + p.type + ", got " + type_name(args[i]), node.position);
      }
      env->define(p.name, std::move(args[i]));
    }
    return eval(*node.children[0], env);
  }

 private:
  // Conversions -------------------------------------------------------------

  LogicalGraph as_graph(const Value& v, const Position& p) {
    if (const auto* g = v.get<GraphValue>()) return g->graph;
    if (v.is<DatabaseValue>()) return database_graph_;
    runtime_error("expected a graph, got " + type_name(v), p);
  }

  const LambdaValue& as_lambda(const Value& v, const Position& p) {
    if (const auto* l = v.get<LambdaValue>()) return *l;
    runtime_error("expected a lambda, got " + type_name(v), p);
  }

  std::string as_string(const Value& v, const Position& p) {
    const auto* s = v.get<PropertyValue>();
    if (!s || !s->is_string()) runtime_error("expected a string, got " + type_name(v), p);
    return s->as_string();
  }

  bool as_bool(const Value& v, const Position& p) {
    const auto* b = v.get<PropertyValue>();
    if (!b || !b->is_bool()) runtime_error("expected a boolean, got " + type_name(v), p);
    return b->as_bool();
  }

  PropertyValue as_scalar(const Value& v, const Position& p) {
    if (const auto* s = v.get<PropertyValue>()) return *s;
    runtime_error("expected a property value, got " + type_name(v), p);
  }

  algo::Params as_params(const Value& v, const Position& p) {
    algo::Params out;
    if (const auto* s = v.get<SetValue>(); s && s->items->empty()) return out;
    const auto* m = v.get<MapValue>();
    if (!m) runtime_error("expected a parameter map, got " + type_name(v), p);
    for (const auto& [k, value] : *m->entries) out[k] = as_scalar(value, p).to_string();
    return out;
  }

  ops::GroupingKeys as_grouping_keys(const Value& v, const Position& p) {
    ops::GroupingKeys keys;
    const auto* s = v.get<SetValue>();
    if (!s) runtime_error("grouping keys must be a set, got " + type_name(v), p);
    for (const auto& item : *s->items) {
      if (const auto* sym = item.get<SymbolValue>()) {
        if (sym->name != "type") runtime_error("unknown grouping symbol :" + sym->name, p);
        keys.by_label = true;
      } else {
        keys.property_keys.push_back(as_string(item, p));
      }
    }
    return keys;
  }

  ElementSetValue element_set(const LogicalGraph& g, bool edges, std::shared_ptr<const pattern::Embedding> bindings) {
    return ElementSetValue{edges, g.space, edges ? g.edge_ids : g.vertex_ids, std::move(bindings)};
  }

  // Expressions ---------------------------------------------------------------

  Value member(const Expr& e, const Value& target) {
    if (target.is<DatabaseValue>()) {
      if (e.text == "G") return CollectionValue{db_.graphs()};
      if (e.text == "V") return element_set(database_graph_, false, nullptr);
      if (e.text == "E") return element_set(database_graph_, true, nullptr);
    }
    if (const auto* g = target.get<GraphValue>()) {
      if (e.text == "V") return element_set(g->graph, false, g->bindings);
      if (e.text == "E") return element_set(g->graph, true, g->bindings);
    }
    runtime_error("unknown member '" + e.text + "' on " + type_name(target), e.position);
  }

  static Value property_or_absent(const Properties& props, const std::string& key) {
    auto it = props.find(key);
    if (it == props.end()) return Absent{};
    return it->second;
  }

  Value element_index(const std::string& label, const Properties& props, const Value& key, const Position& p) {
    if (const auto* sym = key.get<SymbolValue>()) {
      if (sym->name == "type") return PropertyValue(label);
      runtime_error("unknown element symbol :" + sym->name, p);
    }
    return property_or_absent(props, as_string(key, p));
  }

  Value index(const Value& target, const Value& key, const Position& p) {
    if (target.is<DatabaseValue>()) return element_index(database_graph_.head.label, {}, key, p);
    if (const auto* g = target.get<GraphValue>()) return element_index(g->graph.head.label, g->graph.head.properties, key, p);
    if (const auto* v = target.get<VertexValue>()) return element_index(v->vertex->label, v->vertex->properties, key, p);
    if (const auto* ed = target.get<EdgeValue>()) return element_index(ed->edge->label, ed->edge->properties, key, p);
    if (const auto* c = target.get<CollectionValue>()) {
      const auto* i = key.get<PropertyValue>();
      if (!i || !i->is_int()) runtime_error("collection index must be an integer, got " + type_name(key), p);
      if (i->as_int() < 0 || static_cast<size_t>(i->as_int()) >= c->graphs.size()) {
        runtime_error("collection index " + i->to_string() + " out of range (size " + std::to_string(c->graphs.size()) + ")",
                      p);
      }
      return GraphValue{c->graphs[static_cast<size_t>(i->as_int())], nullptr};
    }
    if (const auto* s = target.get<ElementSetValue>()) {
      const auto* b = key.get<BindingName>();
      if (!b) runtime_error("element sets are indexed by pattern bindings, got " + type_name(key), p);
      if (!s->bindings) runtime_error("binding $" + b->name + " is only available inside a match predicate", p);
      if (s->edges) {
        auto it = s->bindings->edges.find(b->name);
        if (it == s->bindings->edges.end()) runtime_error("no edge variable $" + b->name + " in the pattern", p);
        return EdgeValue{&s->space->edge(it->second), s->space, nullptr};
      }
      auto it = s->bindings->vertices.find(b->name);
      if (it == s->bindings->vertices.end()) runtime_error("no vertex variable $" + b->name + " in the pattern", p);
      return VertexValue{&s->space->vertex(it->second), s->space, nullptr};
    }
    if (const auto* m = target.get<MapValue>()) {
      std::string k = as_string(key, p);
      for (const auto& [name, value] : *m->entries) {
        if (name == k) return value;
      }
      return Absent{};
    }
    if (const auto* l = target.get<ValueListValue>()) {
      const auto* i = key.get<PropertyValue>();
      if (!i || !i->is_int()) runtime_error("list index must be an integer, got " + type_name(key), p);
      if (i->as_int() < 0 || static_cast<size_t>(i->as_int()) >= l->values.size()) runtime_error("list index out of range", p);
      return l->values[static_cast<size_t>(i->as_int())];
    }
    runtime_error("cannot index " + type_name(target), p);
  }

  Value assign(const Expr& e, const std::shared_ptr<Environment>& env) {
    Value target = eval(*e.children[0], env);
    std::string key = as_string(eval(*e.children[1], env), e.children[1]->position);
    Value value = eval(*e.children[2], env);
    PropertyValue scalar = as_scalar(value, e.children[2]->position);
    if (const auto* v = target.get<VertexValue>(); v && v->summary) {
      v->summary->properties.insert_or_assign(key, scalar);
    } else if (const auto* ed = target.get<EdgeValue>(); ed && ed->summary) {
      ed->summary->properties.insert_or_assign(key, scalar);
    } else {
      runtime_error("only summary elements inside summarize callbacks can be assigned to, got " + type_name(target),
                    e.position);
    }
    return value;
  }

  Value construct(const Expr& e, const std::shared_ptr<Environment>& env) {
    std::vector<Value> args;
    for (const auto& child : e.children) args.push_back(eval(*child, env));
    if (e.text == "Graph") {
      if (args.size() != 1) runtime_error("new Graph expects a pattern string", e.position);
      try {
        return PatternValue{std::make_shared<pattern::PatternGraph>(pattern::parse_pattern(as_string(args[0], e.position)))};
      } catch (const pattern::PatternSyntaxError& err) {
        runtime_error(err.what(), e.children[0]->position);
      }
    }
    if (args.size() != 2) runtime_error("new " + e.text + " expects a label and a property map", e.position);
    std::string label = as_string(args[0], e.children[0]->position);
    Properties props;
    if (const auto* m = args[1].get<MapValue>()) {
      for (const auto& [k, v] : *m->entries) {
        if (v.is<Absent>()) continue;
        props.insert_or_assign(k, as_scalar(v, e.children[1]->position));
      }
    } else if (const auto* s = args[1].get<SetValue>(); !s || !s->items->empty()) {
      runtime_error("expected a property map, got " + type_name(args[1]), e.children[1]->position);
    }
    if (e.text == "Vertex") {
      auto v = std::make_shared<Vertex>();
      v->label = std::move(label);
      v->properties = std::move(props);
      return VertexValue{v.get(), v, nullptr};
    }
    auto ed = std::make_shared<Edge>();
    ed->label = std::move(label);
    ed->properties = std::move(props);
    return EdgeValue{ed.get(), ed, nullptr};
  }

  static bool is_relational(const std::string& op) { return op == "<" || op == ">" || op == "<=" || op == ">="; }

  Value binary(const Expr& e, const std::shared_ptr<Environment>& env) {
    const std::string& op = e.text;
    if (op == "&&" || op == "||") {
      bool lhs = as_bool(eval(*e.children[0], env), e.children[0]->position);
      if (op == "&&" && !lhs) return PropertyValue(false);
      if (op == "||" && lhs) return PropertyValue(true);
      return PropertyValue(as_bool(eval(*e.children[1], env), e.children[1]->position));
    }
    Value lhs = eval(*e.children[0], env);
    Value rhs = eval(*e.children[1], env);
    if (op == "==" || op == "!=") {
      bool eq = equals(lhs, rhs, e.position);
      return PropertyValue(op == "==" ? eq : !eq);
    }
    if (is_relational(op)) {
      if (lhs.is<Absent>() || rhs.is<Absent>()) return PropertyValue(false);
      auto a = as_scalar(lhs, e.children[0]->position);
      auto b = as_scalar(rhs, e.children[1]->position);
      std::partial_ordering c = std::partial_ordering::unordered;
      try {
        c = compare_values(a, b);
      } catch (const TypeError& err) {
        runtime_error(err.what(), e.position);
      }
      if (op == "<") return PropertyValue(c < 0);
      if (op == ">") return PropertyValue(c > 0);
      if (op == "<=") return PropertyValue(c <= 0);
      return PropertyValue(c >= 0);
    }
    return arithmetic(op, lhs, rhs, e.position);
  }

  bool equals(const Value& a, const Value& b, const Position& p) {
    if (a.is<Absent>() || b.is<Absent>()) return a.is<Absent>() && b.is<Absent>();
    if (const auto* sa = a.get<SymbolValue>()) {
      if (const auto* sb = b.get<SymbolValue>()) return sa->name == sb->name;
    }
    if (const auto* ga = a.get<GraphValue>()) {
      if (const auto* gb = b.get<GraphValue>()) return ga->graph.head.id == gb->graph.head.id;
    }
    const auto* pa = a.get<PropertyValue>();
    const auto* pb = b.get<PropertyValue>();
    if (!pa || !pb) runtime_error("cannot compare " + type_name(a) + " with " + type_name(b), p);
    if (is_number(*pa) && is_number(*pb)) return pa->as_number() == pb->as_number();
    if (pa->type_code() != pb->type_code()) runtime_error("cannot compare " + type_name(a) + " with " + type_name(b), p);
    return *pa == *pb;
  }

  Value arithmetic(const std::string& op, const Value& lhs, const Value& rhs, const Position& p) {
    const auto* a = lhs.get<PropertyValue>();
    const auto* b = rhs.get<PropertyValue>();
    if (op == "+" && a && b && a->is_string() && b->is_string()) return PropertyValue(a->as_string() + b->as_string());
    if (!a || !b || !is_number(*a) || !is_number(*b)) {
      runtime_error("operator '" + op + "' expects numbers, got " + type_name(lhs) + " and " + type_name(rhs), p);
    }
    if (a->is_int() && b->is_int()) {
      int64_t x = a->as_int();
      int64_t y = b->as_int();
      if ((op == "/" || op == "%") && y == 0) runtime_error("division by zero", p);
      if (op == "+") return PropertyValue(x + y);
      if (op == "-") return PropertyValue(x - y);
      if (op == "*") return PropertyValue(x * y);
      if (op == "/") return PropertyValue(x / y);
      return PropertyValue(x % y);
    }
    double x = a->as_number();
    double y = b->as_number();
    if (op == "+") return PropertyValue(x + y);
    if (op == "-") return PropertyValue(x - y);
    if (op == "*") return PropertyValue(x * y);
    if (op == "/") {
      if (y == 0) runtime_error("division by zero", p);
      return PropertyValue(x / y);
    }
    runtime_error("operator '%' expects integers", p);
  }

  // Method calls --------------------------------------------------------------

  Value call(const Expr& e, const std::shared_ptr<Environment>& env) {
    Value target = eval(*e.children[0], env);
    std::vector<Value> args;
    std::vector<Position> positions;
    for (size_t i = 1; i < e.children.size(); ++i) {
      args.push_back(eval(*e.children[i], env));
      positions.push_back(e.children[i]->position);
    }
    try {
      return dispatch(e, target, args, positions);
    } catch (const ScriptError&) {
      throw;
    } catch (const std::exception& err) {
      runtime_error(e.text + ": " + ops::describe(err), e.position);
    }
  }

  void arity(const Expr& e, const std::vector<Value>& args, size_t min, size_t max) {
    if (args.size() < min || args.size() > max) {
      std::string expected = min == max ? std::to_string(min) : std::to_string(min) + " to " + std::to_string(max);
      runtime_error(e.text + " expects " + expected + " argument(s), got " + std::to_string(args.size()), e.position);
    }
  }

  [[noreturn]] void unknown_method(const Expr& e, const Value& target) {
    runtime_error("unknown method '" + e.text + "' on " + type_name(target), e.position);
  }

  Value dispatch(const Expr& e, const Value& target, const std::vector<Value>& args, const std::vector<Position>& pos) {
    if (const auto* c = target.get<CollectionValue>()) return collection_method(e, *c, args, pos);
    if (target.is<GraphValue>() || target.is<DatabaseValue>()) {
      const GraphValue* gv = target.get<GraphValue>();
      return graph_method(e, gv ? gv->graph : database_graph_, args, pos);
    }
    if (const auto* s = target.get<ElementSetValue>()) return element_set_method(e, *s, args, pos);
    if (const auto* l = target.get<ValueListValue>()) return value_list_method(e, *l, args);
    unknown_method(e, target);
  }

  ops::GraphPredicate graph_predicate(const LambdaValue& lambda, const Position& p) {
    return [this, lambda, p](const LogicalGraph& g) {
      return as_bool(call_lambda(lambda, {GraphValue{g, nullptr}}, p), lambda.node->position);
    };
  }

  algo::AlgorithmValue algorithm_input(const Value& target) {
    if (const auto* c = target.get<CollectionValue>()) return c->graphs;
    if (const auto* g = target.get<GraphValue>()) return g->graph;
    return database_graph_;
  }

  Value call_algorithm(const Expr& e, const algo::AlgorithmValue& input, const std::vector<Value>& args,
                       const std::vector<Position>& pos) {
    arity(e, args, 1, 2);
    const auto* sym = args[0].get<SymbolValue>();
    if (!sym) runtime_error(e.text + " expects an algorithm symbol, got " + type_name(args[0]), pos[0]);
    algo::Params params = args.size() > 1 ? as_params(args[1], pos[1]) : algo::Params{};
    if (e.text == "callForGraph") return GraphValue{ops::call_for_graph(input, sym->name, params, registry_), nullptr};
    return CollectionValue{ops::call_for_collection(input, sym->name, params, registry_)};
  }

  // `(Graph g, Graph f => g.combine(f))` and the overlap analogue fold in one
  // pass with identical element sets.
  static const char* reduce_shortcut(const LambdaValue& lambda) {
    const Expr& node = *lambda.node;
    if (node.params.size() != 2 || node.params[0].type != "Graph" || node.params[1].type != "Graph") return nullptr;
    const Expr& body = *node.children[0];
    if (body.kind != ExprKind::Call || body.children.size() != 2) return nullptr;
    if (body.text != "combine" && body.text != "overlap") return nullptr;
    const Expr& lhs = *body.children[0];
    const Expr& rhs = *body.children[1];
    if (lhs.kind != ExprKind::Variable || lhs.text != node.params[0].name) return nullptr;
    if (rhs.kind != ExprKind::Variable || rhs.text != node.params[1].name) return nullptr;
    return body.text == "combine" ? "combine" : "overlap";
  }

  Value collection_method(const Expr& e, const CollectionValue& c, const std::vector<Value>& args,
                          const std::vector<Position>& pos) {
    const std::string& m = e.text;
    if (m == "select") {
      arity(e, args, 1, 1);
      return CollectionValue{ops::select(c.graphs, graph_predicate(as_lambda(args[0], pos[0]), e.position))};
    }
    if (m == "distinct") {
      arity(e, args, 0, 0);
      return CollectionValue{ops::distinct(c.graphs)};
    }
    if (m == "sortBy") {
      arity(e, args, 1, 2);
      ops::SortOrder order = ops::SortOrder::Ascending;
      if (args.size() == 2) {
        const auto* sym = args[1].get<SymbolValue>();
        if (!sym || (sym->name != "asc" && sym->name != "desc")) runtime_error("sort order must be :asc or :desc", pos[1]);
        if (sym->name == "desc") order = ops::SortOrder::Descending;
      }
      return CollectionValue{ops::sort_by(c.graphs, as_string(args[0], pos[0]), order)};
    }
    if (m == "top") {
      arity(e, args, 1, 1);
      const auto* n = args[0].get<PropertyValue>();
      if (!n || !n->is_int() || n->as_int() < 0) runtime_error("top expects a non-negative integer", pos[0]);
      return CollectionValue{ops::top(c.graphs, static_cast<size_t>(n->as_int()))};
    }
    if (m == "union" || m == "intersect" || m == "difference") {
      arity(e, args, 1, 1);
      const auto* other = args[0].get<CollectionValue>();
      if (!other) runtime_error(m + " expects a collection, got " + type_name(args[0]), pos[0]);
      if (m == "union") return CollectionValue{ops::union_collections(c.graphs, other->graphs)};
      if (m == "intersect") return CollectionValue{ops::intersect_collections(c.graphs, other->graphs)};
      return CollectionValue{ops::difference_collections(c.graphs, other->graphs)};
    }
    if (m == "apply") {
      arity(e, args, 1, 1);
      const LambdaValue& lambda = as_lambda(args[0], pos[0]);
      return CollectionValue{ops::apply(c.graphs, [&](const LogicalGraph& g) {
        return as_graph(call_lambda(lambda, {GraphValue{g, nullptr}}, e.position), lambda.node->position);
      })};
    }
    if (m == "reduce") {
      arity(e, args, 1, 1);
      const LambdaValue& lambda = as_lambda(args[0], pos[0]);
      if (const char* shortcut = reduce_shortcut(lambda)) {
        if (std::string_view(shortcut) == "combine") return GraphValue{ops::combine_all(c.graphs), nullptr};
        return GraphValue{ops::overlap_all(c.graphs), nullptr};
      }
      return GraphValue{ops::reduce(c.graphs,
                                    [&](const LogicalGraph& a, const LogicalGraph& b) {
                                      return as_graph(call_lambda(lambda, {GraphValue{a, nullptr}, GraphValue{b, nullptr}},
                                                                  e.position),
                                                      lambda.node->position);
                                    }),
                        nullptr};
    }
    if (m == "callForGraph" || m == "callForCollection") return call_algorithm(e, c.graphs, args, pos);
    if (m == "count") {
      arity(e, args, 0, 0);
      return PropertyValue(static_cast<int64_t>(c.graphs.size()));
    }
    unknown_method(e, Value{c});
  }

  Value graph_method(const Expr& e, const LogicalGraph& g, const std::vector<Value>& args,
                     const std::vector<Position>& pos) {
    const std::string& m = e.text;
    if (m == "combine" || m == "overlap" || m == "exclude") {
      arity(e, args, 1, 1);
      LogicalGraph other = as_graph(args[0], pos[0]);
      if (m == "combine") return GraphValue{ops::combine(g, other), nullptr};
      if (m == "overlap") return GraphValue{ops::overlap(g, other), nullptr};
      return GraphValue{ops::exclude(g, other), nullptr};
    }
    if (m == "match") {
      arity(e, args, 1, 2);
      const auto* p = args[0].get<PatternValue>();
      if (!p) runtime_error("match expects a pattern graph, got " + type_name(args[0]), pos[0]);
      pattern::BindingPredicate predicate;
      if (args.size() == 2) {
        const LambdaValue& lambda = as_lambda(args[1], pos[1]);
        predicate = [this, lambda, &e](const LogicalGraph& sub, const pattern::Embedding& embedding) {
          auto bindings = std::make_shared<pattern::Embedding>(embedding);
          return as_bool(call_lambda(lambda, {GraphValue{sub, bindings}}, e.position), lambda.node->position);
        };
      }
      return CollectionValue{pattern::match_pattern(g, *p->pattern, predicate)};
    }
    if (m == "aggregate") {
      arity(e, args, 2, 2);
      std::string key = as_string(args[0], pos[0]);
      const LambdaValue& lambda = as_lambda(args[1], pos[1]);
      return GraphValue{ops::aggregate(g, key,
                                       [&](const LogicalGraph& in) {
                                         Value v = call_lambda(lambda, {GraphValue{in, nullptr}}, e.position);
                                         return as_scalar(v, lambda.node->position);
                                       }),
                        nullptr};
    }
    if (m == "project") {
      arity(e, args, 2, 2);
      const LambdaValue& vf = as_lambda(args[0], pos[0]);
      const LambdaValue& ef = as_lambda(args[1], pos[1]);
      ops::ProjectionFunctions fns;
      fns.vertex = [&](const Vertex& v) {
        Value out = call_lambda(vf, {VertexValue{&v, g.space, nullptr}}, e.position);
        const auto* pv = out.get<VertexValue>();
        if (!pv) runtime_error("vertex function must return a vertex, got " + type_name(out), vf.node->position);
        Vertex projected = v;
        projected.label = pv->vertex->label;
        projected.properties = pv->vertex->properties;
        return projected;
      };
      fns.edge = [&](const Edge& ed) {
        Value out = call_lambda(ef, {EdgeValue{&ed, g.space, nullptr}}, e.position);
        const auto* pe = out.get<EdgeValue>();
        if (!pe) runtime_error("edge function must return an edge, got " + type_name(out), ef.node->position);
        Edge projected = ed;
        projected.label = pe->edge->label;
        projected.properties = pe->edge->properties;
        return projected;
      };
      return GraphValue{ops::project(g, fns), nullptr};
    }
    if (m == "summarize") {
      if (args.size() != 2 && args.size() != 4) {
        runtime_error("summarize expects (vertexKeys, edgeKeys) or (vertexKeys, vertexAgg, edgeKeys, edgeAgg)",
                      e.position);
      }
      const bool with_aggregates = args.size() == 4;
      ops::SummarizationSpec spec;
      spec.vertex_keys = as_grouping_keys(args[0], pos[0]);
      spec.edge_keys = as_grouping_keys(args[with_aggregates ? 2 : 1], pos[with_aggregates ? 2 : 1]);
      if (with_aggregates) {
        const LambdaValue& va = as_lambda(args[1], pos[1]);
        const LambdaValue& ea = as_lambda(args[3], pos[3]);
        spec.vertex_aggregator = [&](Vertex& summary, std::span<const Vertex* const> members) {
          ElementSetValue set{false, g.space, {}, nullptr};
          for (const Vertex* v : members) set.ids.push_back(v->id);
          call_lambda(va, {VertexValue{&summary, nullptr, &summary}, std::move(set)}, e.position);
        };
        spec.edge_aggregator = [&](Edge& summary, std::span<const Edge* const> members) {
          ElementSetValue set{true, g.space, {}, nullptr};
          for (const Edge* ed : members) set.ids.push_back(ed->id);
          call_lambda(ea, {EdgeValue{&summary, nullptr, &summary}, std::move(set)}, e.position);
        };
      }
      return GraphValue{ops::summarize(g, spec), nullptr};
    }
    if (m == "callForGraph" || m == "callForCollection") return call_algorithm(e, g, args, pos);
    unknown_method(e, GraphValue{g, nullptr});
  }

  Value element_set_method(const Expr& e, const ElementSetValue& s, const std::vector<Value>& args,
                           const std::vector<Position>& pos) {
    const std::string& m = e.text;
    if (m == "count") {
      arity(e, args, 0, 0);
      return PropertyValue(static_cast<int64_t>(s.ids.size()));
    }
    if (m == "select") {
      arity(e, args, 1, 1);
      const LambdaValue& lambda = as_lambda(args[0], pos[0]);
      ElementSetValue out{s.edges, s.space, {}, s.bindings};
      for (auto id : s.ids) {
        Value element = s.edges ? Value(EdgeValue{&s.space->edge(id), s.space, nullptr})
                                : Value(VertexValue{&s.space->vertex(id), s.space, nullptr});
        if (as_bool(call_lambda(lambda, {std::move(element)}, e.position), lambda.node->position)) out.ids.push_back(id);
      }
      return out;
    }
    if (m == "values" || m == "sum" || m == "average") {
      arity(e, args, 1, 1);
      std::string key = as_string(args[0], pos[0]);
      ValueListValue list;
      for (auto id : s.ids) {
        const Properties& props = s.edges ? s.space->edge(id).properties : s.space->vertex(id).properties;
        if (auto it = props.find(key); it != props.end()) list.values.push_back(it->second);
      }
      if (m == "values") return list;
      return value_list_method(e, list, {});
    }
    unknown_method(e, Value{s});
  }

  Value value_list_method(const Expr& e, const ValueListValue& l, const std::vector<Value>& args) {
    arity(e, args, 0, 0);
    if (e.text == "count") return PropertyValue(static_cast<int64_t>(l.values.size()));
    if (e.text == "sum") return ops::sum(std::span<const PropertyValue>(l.values));
    if (e.text == "average") return PropertyValue(ops::average(std::span<const PropertyValue>(l.values)));
    unknown_method(e, Value{l});
  }

  const EpgmDatabase& db_;
  const algo::AlgorithmRegistry& registry_;
  const LogicalGraph& database_graph_;
};

}  // namespace

Interpreter::Interpreter(const EpgmDatabase& db, const algo::AlgorithmRegistry& registry)
    : db_(db), registry_(registry), globals_(std::make_shared<Environment>()) {
  TemporaryIdScope ids(temporary_ids_);
  database_graph_ = db.database_graph();
  globals_->define("db", DatabaseValue{});
}

void Interpreter::bind(const std::string& name, Value value) { globals_->define(name, std::move(value)); }

void Interpreter::bind_database_graph(const std::string& name) { bind(name, GraphValue{database_graph_, nullptr}); }

Value Interpreter::run(const Script& script, std::string_view source, const StatementHook& hook) {
  TemporaryIdScope ids(temporary_ids_);
  Evaluator evaluator(db_, registry_, database_graph_);
  Value last;
  for (size_t i = 0; i < script.statements.size(); ++i) {
    const Statement& s = script.statements[i];
    auto start = std::chrono::steady_clock::now();
    last = evaluator.eval(*s.expr, globals_);
    if (!s.target.empty()) globals_->define(s.target, last);
    auto elapsed = std::chrono::steady_clock::now() - start;
    if (hook) {
      StatementTiming t;
      t.index = i;
      t.target = s.target;
      if (s.end <= source.size()) t.source = std::string(source.substr(s.begin, s.end - s.begin));
      t.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(elapsed);
      hook(t);
    }
  }
  return last;
}

Value Interpreter::run_source(std::string_view source, const StatementHook& hook) {
  return run(parse(source), source, hook);
}

}  // namespace epgm::grala
