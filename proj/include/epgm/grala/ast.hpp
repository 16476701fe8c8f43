#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "epgm/grala/lexer.hpp"

namespace epgm::grala {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Parameter {
  std::string type;
  std::string name;

  bool operator==(const Parameter&) const = default;
};

enum class ExprKind {
  Integer,     // int_value
  Float,       // float_value
  String,      // text
  Boolean,     // int_value != 0
  Symbol,      // text
  Binding,     // text
  Variable,    // text
  Collection,  // children = elements
  Set,         // children = elements; empty braces parse as an empty Set
  Map,         // children = key0, value0, key1, value1, ...
  Lambda,      // params, children[0] = body
  Member,      // children[0] = target, text = member name
  Call,        // children[0] = target, children[1..] = args, text = method name
  Index,       // children = {target, index}
  New,         // text = type name, children = args
  Binary,      // text = operator, children = {lhs, rhs}
  Unary,       // text = operator, children = {operand}
  IndexAssign, // children = {target, index, value}; lambda bodies only
};

struct Expr {
  ExprKind kind;
  Position position;
  std::string text;
  int64_t int_value = 0;
  double float_value = 0;
  std::vector<ExprPtr> children;
  std::vector<Parameter> params;
};

struct Statement {
  /// Empty for a bare expression statement.
  std::string target;
  ExprPtr expr;
  Position position;
  /// Source range of the statement, used for reporting.
  size_t begin = 0;
  size_t end = 0;
};

struct Script {
  std::vector<Statement> statements;
};

/// Canonical source form. Parsing the output yields an equal tree.
std::string print(const Expr& expr);
std::string print(const Script& script);

/// Structural equality ignoring source positions.
bool equal(const Expr& a, const Expr& b);
bool equal(const Script& a, const Script& b);

}  // namespace epgm::grala
