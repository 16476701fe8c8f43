#include "epgm/grala/value.hpp"

namespace epgm::grala {

namespace {

template <class... Fs>
struct Overloaded : Fs... {
  using Fs::operator()...;
};
template <class... Fs>
Overloaded(Fs...) -> Overloaded<Fs...>;

std::string id_list(const std::vector<uint64_t>& ids, size_t limit = 8) {
  std::string out = "[";
  for (size_t i = 0; i < ids.size() && i < limit; ++i) {
    if (i) out += ", ";
    out += is_temporary(ids[i]) ? "t" + std::to_string(ids[i] - kTemporaryIdBase) : std::to_string(ids[i]);
  }
  if (ids.size() > limit) out += ", ...";
  return out + "]";
}

}  // namespace

std::string type_name(const Value& value) {
  return std::visit(Overloaded{
                        [](const Absent&) -> std::string { return "absent"; },
                        [](const PropertyValue& p) -> std::string { return std::string(epgm::type_name(p.type_code())); },
                        [](const SymbolValue&) -> std::string { return "symbol"; },
                        [](const DatabaseValue&) -> std::string { return "database"; },
                        [](const GraphValue&) -> std::string { return "graph"; },
                        [](const CollectionValue&) -> std::string { return "collection"; },
                        [](const VertexValue&) -> std::string { return "vertex"; },
                        [](const EdgeValue&) -> std::string { return "edge"; },
                        [](const ElementSetValue& s) -> std::string { return s.edges ? "edge set" : "vertex set"; },
                        [](const ValueListValue&) -> std::string { return "value list"; },
                        [](const MapValue&) -> std::string { return "map"; },
                        [](const SetValue&) -> std::string { return "set"; },
                        [](const LambdaValue&) -> std::string { return "lambda"; },
                        [](const PatternValue&) -> std::string { return "pattern"; },
                        [](const BindingName&) -> std::string { return "binding"; },
                    },
                    value.v);
}

std::string describe(const Value& value) {
  return std::visit(
      Overloaded{
          [](const Absent&) -> std::string { return "absent"; },
          [](const PropertyValue& p) -> std::string { return p.is_string() ? "\"" + p.to_string() + "\"" : p.to_string(); },
          [](const SymbolValue& s) -> std::string { return ":" + s.name; },
          [](const DatabaseValue&) -> std::string { return "db"; },
          [](const GraphValue& g) -> std::string {
            std::vector<uint64_t> id{g.graph.head.id};
            return "graph " + id_list(id).substr(1, id_list(id).size() - 2) + " (" +
                   std::to_string(g.graph.vertex_ids.size()) + " vertices, " + std::to_string(g.graph.edge_ids.size()) +
                   " edges)";
          },
          [](const CollectionValue& c) -> std::string {
            std::vector<uint64_t> ids;
            for (const auto& g : c.graphs) ids.push_back(g.head.id);
            return "collection of " + std::to_string(ids.size()) + " graphs " + id_list(ids);
          },
          [](const VertexValue& v) -> std::string { return "vertex " + std::to_string(v.vertex->id); },
          [](const EdgeValue& e) -> std::string { return "edge " + std::to_string(e.edge->id); },
          [](const ElementSetValue& s) -> std::string {
            return std::string(s.edges ? "edge set " : "vertex set ") + id_list(s.ids);
          },
          [](const ValueListValue& l) -> std::string { return "list of " + std::to_string(l.values.size()) + " values"; },
          [](const MapValue& m) -> std::string {
            std::string out = "{";
            for (size_t i = 0; i < m.entries->size(); ++i) {
              if (i) out += ", ";
              out += "\"" + (*m.entries)[i].first + "\": " + describe((*m.entries)[i].second);
            }
            return out + "}";
          },
          [](const SetValue& s) -> std::string {
            std::string out = "{";
            for (size_t i = 0; i < s.items->size(); ++i) {
              if (i) out += ", ";
              out += describe((*s.items)[i]);
            }
            return out + "}";
          },
          [](const LambdaValue& l) -> std::string { return "lambda " + print(*l.node); },
          [](const PatternValue& p) -> std::string { return "pattern " + pattern::to_string(*p.pattern); },
          [](const BindingName& b) -> std::string { return "$" + b.name; },
      },
      value.v);
}

const Value* Environment::lookup(const std::string& name) const {
  for (const Environment* env = this; env; env = env->parent_.get()) {
    auto it = env->vars_.find(name);
    if (it != env->vars_.end()) return &it->second;
  }
  return nullptr;
}

void Environment::define(const std::string& name, Value value) { vars_.insert_or_assign(name, std::move(value)); }

}  // namespace epgm::grala
