#include "epgm/grala/ast.hpp"

#include <charconv>

namespace epgm::grala {

namespace {

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out + "\"";
}

std::string format_float(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed);
  std::string out(buf, ptr);
  if (out.find('.') == std::string::npos) out += ".0";
  return out;
}

std::string join(const std::vector<ExprPtr>& items, size_t from = 0) {
  std::string out;
  for (size_t i = from; i < items.size(); ++i) {
    if (i > from) out += ", ";
    out += print(*items[i]);
  }
  return out;
}

}  // namespace

std::string print(const Expr& e) {
  switch (e.kind) {
    case ExprKind::Integer: return std::to_string(e.int_value);
    case ExprKind::Float: return format_float(e.float_value);
    case ExprKind::String: return quote(e.text);
    case ExprKind::Boolean: return e.int_value ? "true" : "false";
    case ExprKind::Symbol: return ":" + e.text;
    case ExprKind::Binding: return "$" + e.text;
    case ExprKind::Variable: return e.text;
    case ExprKind::Collection: return "<" + join(e.children) + ">";
    case ExprKind::Set: return "{" + join(e.children) + "}";
    case ExprKind::Map: {
      std::string out = "{";
      for (size_t i = 0; i + 1 < e.children.size(); i += 2) {
        if (i) out += ", ";
        out += print(*e.children[i]) + ": " + print(*e.children[i + 1]);
      }
      return out + "}";
    }
    case ExprKind::Lambda: {
      std::string out = "(";
      for (size_t i = 0; i < e.params.size(); ++i) {
        if (i) out += ", ";
        out += e.params[i].type + " " + e.params[i].name;
      }
      return out + " => " + print(*e.children[0]) + ")";
    }
    case ExprKind::Member: return print(*e.children[0]) + "." + e.text;
    case ExprKind::Call: return print(*e.children[0]) + "." + e.text + "(" + join(e.children, 1) + ")";
    case ExprKind::Index: return print(*e.children[0]) + "[" + print(*e.children[1]) + "]";
    case ExprKind::New: return "new " + e.text + "(" + join(e.children) + ")";
    case ExprKind::Binary: return "(" + print(*e.children[0]) + " " + e.text + " " + print(*e.children[1]) + ")";
    case ExprKind::Unary: return "(" + e.text + print(*e.children[0]) + ")";
    case ExprKind::IndexAssign:
      return print(*e.children[0]) + "[" + print(*e.children[1]) + "] = " + print(*e.children[2]);
  }
  return "";
}

std::string print(const Script& script) {
  std::string out;
  for (const auto& s : script.statements) {
    if (!s.target.empty()) out += s.target + " = ";
    out += print(*s.expr) + ";\n";
  }
  return out;
}

bool equal(const Expr& a, const Expr& b) {
  if (a.kind != b.kind || a.text != b.text || a.int_value != b.int_value || a.params != b.params ||
      a.children.size() != b.children.size()) {
    return false;
  }
  if (a.kind == ExprKind::Float && a.float_value != b.float_value) return false;
  for (size_t i = 0; i < a.children.size(); ++i) {
    if (!equal(*a.children[i], *b.children[i])) return false;
  }
  return true;
}

bool equal(const Script& a, const Script& b) {
  if (a.statements.size() != b.statements.size()) return false;
  for (size_t i = 0; i < a.statements.size(); ++i) {
    if (a.statements[i].target != b.statements[i].target) return false;
    if (!equal(*a.statements[i].expr, *b.statements[i].expr)) return false;
  }
  return true;
}

}  // namespace epgm::grala
