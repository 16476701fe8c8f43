#include "epgm/grala/lexer.hpp"

#include <cctype>

namespace epgm::grala {

std::string to_string(const Position& p) { return std::to_string(p.line) + ":" + std::to_string(p.column); }

std::string_view token_kind_name(TokenKind kind) {
  switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Integer: return "integer";
    case TokenKind::Float: return "float";
    case TokenKind::String: return "string";
    case TokenKind::Symbol: return "symbol";
    case TokenKind::Binding: return "binding";
    case TokenKind::New: return "'new'";
    case TokenKind::LParen: return "'('";
    case TokenKind::RParen: return "')'";
    case TokenKind::LBracket: return "'['";
    case TokenKind::RBracket: return "']'";
    case TokenKind::LBrace: return "'{'";
    case TokenKind::RBrace: return "'}'";
    case TokenKind::Comma: return "','";
    case TokenKind::Dot: return "'.'";
    case TokenKind::Colon: return "':'";
    case TokenKind::Semicolon: return "';'";
    case TokenKind::Assign: return "'='";
    case TokenKind::Arrow: return "'=>'";
    case TokenKind::Eq: return "'=='";
    case TokenKind::Ne: return "'!='";
    case TokenKind::Lt: return "'<'";
    case TokenKind::Gt: return "'>'";
    case TokenKind::Le: return "'<='";
    case TokenKind::Ge: return "'>='";
    case TokenKind::And: return "'&&'";
    case TokenKind::Or: return "'||'";
    case TokenKind::Not: return "'!'";
    case TokenKind::Plus: return "'+'";
    case TokenKind::Minus: return "'-'";
    case TokenKind::Star: return "'*'";
    case TokenKind::Slash: return "'/'";
    case TokenKind::Percent: return "'%'";
    case TokenKind::End: return "end of input";
  }
  return "?";
}

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

bool closes_value(TokenKind kind) {
  return kind == TokenKind::String || kind == TokenKind::Identifier || kind == TokenKind::Integer ||
         kind == TokenKind::Float || kind == TokenKind::RBracket || kind == TokenKind::RParen;
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      Position start = here();
      if (pos_ >= src_.size()) {
        out.push_back({TokenKind::End, "", start, pos_});
        return out;
      }
      char c = src_[pos_];
      Token t{TokenKind::End, "", start, 0};
      if (ident_start(c)) {
        t.text = take_while(ident_char);
        t.kind = t.text == "new" ? TokenKind::New : TokenKind::Identifier;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        t.text = take_while([](char ch) { return std::isdigit(static_cast<unsigned char>(ch)) != 0; });
        t.kind = TokenKind::Integer;
        if (peek() == '.' && std::isdigit(static_cast<unsigned char>(peek(1)))) {
          advance();
          t.text += "." + take_while([](char ch) { return std::isdigit(static_cast<unsigned char>(ch)) != 0; });
          t.kind = TokenKind::Float;
        }
      } else if (c == '"') {
        t.kind = TokenKind::String;
        t.text = string_literal(start);
      } else if (c == '$') {
        advance();
        if (!ident_start(peek())) throw ParseError("expected binding name after '$'", start);
        t.kind = TokenKind::Binding;
        t.text = take_while(ident_char);
      } else if (c == ':' && ident_start(peek(1)) && !(out.size() && closes_value(out.back().kind))) {
        advance();
        t.kind = TokenKind::Symbol;
        t.text = take_while(ident_char);
      } else {
        t.kind = punctuation(start);
      }
      t.end = pos_;
      out.push_back(std::move(t));
    }
  }

 private:
  char peek(size_t ahead = 0) const { return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0'; }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  Position here() const { return {pos_, line_, column_}; }

  template <class Pred>
  std::string take_while(Pred pred) {
    size_t start = pos_;
    while (pos_ < src_.size() && pred(src_[pos_])) advance();
    return std::string(src_.substr(start, pos_ - start));
  }

  void skip_trivia() {
    while (pos_ < src_.size()) {
      if (std::isspace(static_cast<unsigned char>(src_[pos_]))) {
        advance();
      } else if (src_[pos_] == '/' && peek(1) == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string string_literal(Position start) {
    advance();
    std::string out;
    while (true) {
      if (pos_ >= src_.size() || src_[pos_] == '\n') throw ParseError("unterminated string literal", start);
      char c = src_[pos_];
      if (c == '"') {
        advance();
        return out;
      }
      if (c == '\\') {
        advance();
        char e = peek();
        switch (e) {
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          default: throw ParseError(std::string("unknown escape '\\") + e + "'", here());
        }
        advance();
        continue;
      }
      out += c;
      advance();
    }
  }

  TokenKind punctuation(Position start) {
    char c = src_[pos_];
    char n = peek(1);
    auto two = [&](TokenKind k) {
      advance();
      advance();
      return k;
    };
    auto one = [&](TokenKind k) {
      advance();
      return k;
    };
    switch (c) {
      case '(': return one(TokenKind::LParen);
      case ')': return one(TokenKind::RParen);
      case '[': return one(TokenKind::LBracket);
      case ']': return one(TokenKind::RBracket);
      case '{': return one(TokenKind::LBrace);
      case '}': return one(TokenKind::RBrace);
      case ',': return one(TokenKind::Comma);
      case '.': return one(TokenKind::Dot);
      case ':': return one(TokenKind::Colon);
      case ';': return one(TokenKind::Semicolon);
      case '+': return one(TokenKind::Plus);
      case '-': return one(TokenKind::Minus);
      case '*': return one(TokenKind::Star);
      case '/': return one(TokenKind::Slash);
      case '%': return one(TokenKind::Percent);
      case '=':
        if (n == '=') return two(TokenKind::Eq);
        if (n == '>') return two(TokenKind::Arrow);
        return one(TokenKind::Assign);
      case '!':
        if (n == '=') return two(TokenKind::Ne);
        return one(TokenKind::Not);
      case '<':
        if (n == '=') return two(TokenKind::Le);
        return one(TokenKind::Lt);
      case '>':
        if (n == '=') return two(TokenKind::Ge);
        return one(TokenKind::Gt);
      case '&':
        if (n == '&') return two(TokenKind::And);
        break;
      case '|':
        if (n == '|') return two(TokenKind::Or);
        break;
      default: break;
    }
    throw ParseError(std::string("illegal character '") + c + "'", start);
  }

  std::string_view src_;
  size_t pos_ = 0;
  size_t line_ = 1;
  size_t column_ = 1;
};

}  // namespace

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

}  // namespace epgm::grala
