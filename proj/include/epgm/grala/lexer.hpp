#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "epgm/error.hpp"

namespace epgm::grala {

struct Position {
  size_t offset = 0;
  size_t line = 1;
  size_t column = 1;
};

std::string to_string(const Position& p);

/// A diagnostic tied to a source location.
class ScriptError : public Error {
 public:
  ScriptError(const std::string& message, Position position)
      : Error(to_string(position) + ": " + message), message_(message), position_(position) {}
  const std::string& message() const { return message_; }
  const Position& position() const { return position_; }

 private:
  std::string message_;
  Position position_;
};

/// Lexical or syntactic error.
class ParseError : public ScriptError {
 public:
  using ScriptError::ScriptError;
};

enum class TokenKind {
  Identifier,
  Integer,
  Float,
  String,
  Symbol,   // :name
  Binding,  // $name
  New,
  LParen,
  RParen,
  LBracket,
  RBracket,
  LBrace,
  RBrace,
  Comma,
  Dot,
  Colon,
  Semicolon,
  Assign,
  Arrow,  // =>
  Eq,
  Ne,
  Lt,
  Gt,
  Le,
  Ge,
  And,
  Or,
  Not,
  Plus,
  Minus,
  Star,
  Slash,
  Percent,
  End,
};

std::string_view token_kind_name(TokenKind kind);

struct Token {
  TokenKind kind;
  /// Identifier/symbol/binding name, decoded string contents or literal text.
  std::string text;
  Position position;
  /// Offset just past the token in the source.
  size_t end = 0;
};

/// Drops whitespace and `//` comments. A `:` directly followed by an
/// identifier is a symbol unless the previous token closes a value, where it
/// is the key/value separator of a map literal.
std::vector<Token> tokenize(std::string_view source);

}  // namespace epgm::grala
