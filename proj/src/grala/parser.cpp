#include "epgm/grala/parser.hpp"

#include <charconv>
#include <set>

namespace epgm::grala {

namespace {

const std::set<std::string, std::less<>> kParameterTypes{"Graph", "Vertex", "Edge", "Set", "Collection"};
const std::set<std::string, std::less<>> kConstructors{"Graph", "Vertex", "Edge"};

class Parser {
 public:
  explicit Parser(const std::vector<Token>& tokens) : tokens_(tokens) {}

  Script script() {
    Script out;
    while (true) {
      while (accept(TokenKind::Semicolon)) {
      }
      if (at(TokenKind::End)) return out;
      Statement s;
      s.position = peek().position;
      s.begin = peek().position.offset;
      if (at(TokenKind::Identifier) && peek(1).kind == TokenKind::Assign) {
        s.target = next().text;
        next();
      }
      s.expr = expression();
      s.end = tokens_[index_ - 1].end;
      out.statements.push_back(std::move(s));
    }
  }

 private:
  using Node = std::shared_ptr<Expr>;

  const Token& peek(size_t ahead = 0) const {
    size_t i = std::min(index_ + ahead, tokens_.size() - 1);
    return tokens_[i];
  }
  bool at(TokenKind k) const { return peek().kind == k; }
  const Token& next() {
    const Token& t = tokens_[index_];
    if (index_ + 1 < tokens_.size()) ++index_;
    return t;
  }
  bool accept(TokenKind k) {
    if (!at(k)) return false;
    next();
    return true;
  }
  const Token& expect(TokenKind k, std::string_view context) {
    if (!at(k)) fail("expected " + std::string(token_kind_name(k)) + " " + std::string(context));
    return next();
  }
  [[noreturn]] void fail(const std::string& message) const {
    const Token& t = peek();
    std::string found = t.kind == TokenKind::End ? "end of input" : "'" + describe(t) + "'";
    throw ParseError(message + ", found " + found, t.position);
  }
  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::String: return "\"" + t.text + "\"";
      case TokenKind::Symbol: return ":" + t.text;
      case TokenKind::Binding: return "$" + t.text;
      case TokenKind::Identifier:
      case TokenKind::Integer:
      case TokenKind::Float: return t.text;
      default: {
        auto name = token_kind_name(t.kind);
        return std::string(name.substr(1, name.size() - 2));
      }
    }
  }

  static Node make(ExprKind kind, Position position) {
    auto e = std::make_shared<Expr>();
    e->kind = kind;
    e->position = position;
    return e;
  }

  ExprPtr expression() {
    bool saved = no_relational_;
    no_relational_ = false;
    ExprPtr e = logical_or();
    no_relational_ = saved;
    return e;
  }

  ExprPtr binary(Position p, std::string op, ExprPtr lhs, ExprPtr rhs) {
    Node e = make(ExprKind::Binary, p);
    e->text = std::move(op);
    e->children = {std::move(lhs), std::move(rhs)};
    return e;
  }

  ExprPtr logical_or() {
    ExprPtr lhs = logical_and();
    while (at(TokenKind::Or)) {
      Position p = next().position;
      lhs = binary(p, "||", lhs, logical_and());
    }
    return lhs;
  }

  ExprPtr logical_and() {
    ExprPtr lhs = comparison();
    while (at(TokenKind::And)) {
      Position p = next().position;
      lhs = binary(p, "&&", lhs, comparison());
    }
    return lhs;
  }

  ExprPtr comparison() {
    ExprPtr lhs = additive();
    while (true) {
      TokenKind k = peek().kind;
      bool relational = k == TokenKind::Lt || k == TokenKind::Gt || k == TokenKind::Le || k == TokenKind::Ge;
      if (!(k == TokenKind::Eq || k == TokenKind::Ne || (relational && !no_relational_))) return lhs;
      const Token& op = next();
      lhs = binary(op.position, describe(op), lhs, additive());
    }
  }

  ExprPtr additive() {
    ExprPtr lhs = multiplicative();
    while (at(TokenKind::Plus) || at(TokenKind::Minus)) {
      const Token& op = next();
      lhs = binary(op.position, describe(op), lhs, multiplicative());
    }
    return lhs;
  }

  ExprPtr multiplicative() {
    ExprPtr lhs = unary();
    while (at(TokenKind::Star) || at(TokenKind::Slash) || at(TokenKind::Percent)) {
      const Token& op = next();
      lhs = binary(op.position, describe(op), lhs, unary());
    }
    return lhs;
  }

  ExprPtr unary() {
    if (at(TokenKind::Not) || at(TokenKind::Minus)) {
      const Token& op = next();
      Node e = make(ExprKind::Unary, op.position);
      e->text = describe(op);
      e->children = {unary()};
      return e;
    }
    return postfix();
  }

  ExprPtr postfix() {
    ExprPtr e = primary();
    while (true) {
      if (at(TokenKind::Dot)) {
        next();
        const Token& name = expect(TokenKind::Identifier, "after '.'");
        if (at(TokenKind::LParen)) {
          Node call = make(ExprKind::Call, name.position);
          call->text = name.text;
          call->children.push_back(e);
          for (auto& a : arguments()) call->children.push_back(std::move(a));
          e = call;
        } else {
          Node member = make(ExprKind::Member, name.position);
          member->text = name.text;
          member->children = {e};
          e = member;
        }
      } else if (at(TokenKind::LBracket)) {
        Position p = next().position;
        Node idx = make(ExprKind::Index, p);
        idx->children = {e, expression()};
        expect(TokenKind::RBracket, "to close index");
        e = idx;
      } else {
        return e;
      }
    }
  }

  std::vector<ExprPtr> arguments() {
    expect(TokenKind::LParen, "to open argument list");
    std::vector<ExprPtr> out;
    if (accept(TokenKind::RParen)) return out;
    do {
      out.push_back(expression());
    } while (accept(TokenKind::Comma));
    expect(TokenKind::RParen, "to close argument list");
    return out;
  }

  // Recognizes `T x (, T y)* =>` or `T x (, T y)* ) =>` starting at `from`.
  // Returns the number of parameters, or 0 when the tokens are no lambda.
  size_t lambda_parameters_at(size_t from, bool* parenthesized_arrow) const {
    size_t i = from;
    size_t count = 0;
    while (true) {
      if (kind_at(i) != TokenKind::Identifier || kind_at(i + 1) != TokenKind::Identifier) return 0;
      i += 2;
      ++count;
      if (kind_at(i) == TokenKind::Comma) {
        ++i;
        continue;
      }
      if (kind_at(i) == TokenKind::Arrow) {
        *parenthesized_arrow = false;
        return count;
      }
      if (kind_at(i) == TokenKind::RParen && kind_at(i + 1) == TokenKind::Arrow) {
        *parenthesized_arrow = true;
        return count;
      }
      return 0;
    }
  }

  TokenKind kind_at(size_t i) const { return i < tokens_.size() ? tokens_[i].kind : TokenKind::End; }

  bool lambda_ahead(size_t from, bool* parenthesized_arrow) const {
    return lambda_parameters_at(from, parenthesized_arrow) > 0;
  }

  std::vector<Parameter> parameters() {
    std::vector<Parameter> out;
    do {
      const Token& type = expect(TokenKind::Identifier, "as parameter type");
      if (!kParameterTypes.count(type.text)) {
        throw ParseError("unknown parameter type '" + type.text + "'", type.position);
      }
      const Token& name = expect(TokenKind::Identifier, "as parameter name");
      for (const auto& p : out) {
        if (p.name == name.text) throw ParseError("duplicate parameter '" + name.text + "'", name.position);
      }
      out.push_back({type.text, name.text});
    } while (accept(TokenKind::Comma));
    return out;
  }

  ExprPtr lambda_body() {
    ++lambda_depth_;
    ExprPtr body = expression();
    if (at(TokenKind::Assign)) {
      Position p = next().position;
      if (body->kind != ExprKind::Index) throw ParseError("only an index expression can be assigned to", p);
      Node assign = make(ExprKind::IndexAssign, p);
      assign->children = {body->children[0], body->children[1], expression()};
      body = assign;
    }
    --lambda_depth_;
    return body;
  }

  ExprPtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Integer: {
        next();
        Node e = make(ExprKind::Integer, t.position);
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), e->int_value);
        if (ec != std::errc()) throw ParseError("integer literal out of range", t.position);
        return e;
      }
      case TokenKind::Float: {
        next();
        Node e = make(ExprKind::Float, t.position);
        std::from_chars(t.text.data(), t.text.data() + t.text.size(), e->float_value);
        return e;
      }
      case TokenKind::String: {
        next();
        Node e = make(ExprKind::String, t.position);
        e->text = t.text;
        return e;
      }
      case TokenKind::Symbol: {
        next();
        Node e = make(ExprKind::Symbol, t.position);
        e->text = t.text;
        return e;
      }
      case TokenKind::Binding: {
        if (lambda_depth_ == 0) throw ParseError("binding $" + t.text + " is only valid inside a lambda", t.position);
        next();
        Node e = make(ExprKind::Binding, t.position);
        e->text = t.text;
        return e;
      }
      case TokenKind::New: {
        next();
        const Token& type = expect(TokenKind::Identifier, "after 'new'");
        if (!kConstructors.count(type.text)) throw ParseError("cannot construct '" + type.text + "'", type.position);
        Node e = make(ExprKind::New, t.position);
        e->text = type.text;
        e->children = arguments();
        return e;
      }
      case TokenKind::Identifier: {
        bool parenthesized_arrow = false;
        if (lambda_ahead(index_, &parenthesized_arrow) && !parenthesized_arrow) {
          Node e = make(ExprKind::Lambda, t.position);
          e->params = parameters();
          expect(TokenKind::Arrow, "after lambda parameters");
          e->children = {lambda_body()};
          return e;
        }
        next();
        if (t.text == "true" || t.text == "false") {
          Node e = make(ExprKind::Boolean, t.position);
          e->int_value = t.text == "true";
          return e;
        }
        Node e = make(ExprKind::Variable, t.position);
        e->text = t.text;
        return e;
      }
      case TokenKind::Lt: {
        next();
        Node e = make(ExprKind::Collection, t.position);
        if (accept(TokenKind::Gt)) return e;
        do {
          bool saved = no_relational_;
          no_relational_ = true;
          e->children.push_back(logical_or());
          no_relational_ = saved;
        } while (accept(TokenKind::Comma));
        expect(TokenKind::Gt, "to close collection literal");
        return e;
      }
      case TokenKind::LBrace: {
        next();
        if (accept(TokenKind::RBrace)) return make(ExprKind::Set, t.position);
        ExprPtr first = expression();
        if (accept(TokenKind::Colon)) {
          Node e = make(ExprKind::Map, t.position);
          e->children = {first, expression()};
          while (accept(TokenKind::Comma)) {
            e->children.push_back(expression());
            expect(TokenKind::Colon, "between map key and value");
            e->children.push_back(expression());
          }
          expect(TokenKind::RBrace, "to close map literal");
          return e;
        }
        Node e = make(ExprKind::Set, t.position);
        e->children.push_back(first);
        while (accept(TokenKind::Comma)) e->children.push_back(expression());
        expect(TokenKind::RBrace, "to close set literal");
        return e;
      }
      case TokenKind::LParen: {
        bool parenthesized_arrow = false;
        if (lambda_ahead(index_ + 1, &parenthesized_arrow)) {
          next();
          Node e = make(ExprKind::Lambda, t.position);
          e->params = parameters();
          if (parenthesized_arrow) {
            expect(TokenKind::RParen, "after lambda parameters");
            expect(TokenKind::Arrow, "after lambda parameters");
            e->children = {lambda_body()};
          } else {
            expect(TokenKind::Arrow, "after lambda parameters");
            e->children = {lambda_body()};
            expect(TokenKind::RParen, "to close lambda");
          }
          return e;
        }
        next();
        ExprPtr inner = expression();
        expect(TokenKind::RParen, "to close parenthesized expression");
        return inner;
      }
      default: fail("expected an expression");
    }
  }

  const std::vector<Token>& tokens_;
  size_t index_ = 0;
  int lambda_depth_ = 0;
  bool no_relational_ = false;
};

}  // namespace

Script parse(const std::vector<Token>& tokens) { return Parser(tokens).script(); }

Script parse(std::string_view source) { return parse(tokenize(source)); }

}  // namespace epgm::grala
