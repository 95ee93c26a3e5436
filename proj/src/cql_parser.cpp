// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <set>

#include "caseforge/cql.hpp"
#include "cql_lexer.hpp"

namespace caseforge::cql {

namespace {

constexpr int kMaxDepth = 200;

class Parser {
 public:
  explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

  Block program() {
    scopes_.emplace_back();
    Block body;
    const bool returns = statements_until_end(body, /*top_level=*/true);
    if (!returns) {
      throw ParseError("program must end with 'return' on every path", peek().pos);
    }
    return body;
  }

 private:
  // -- token helpers --------------------------------------------------------
  const Token& peek(std::size_t ahead = 0) const {
    const std::size_t i = std::min(pos_ + ahead, toks_.size() - 1);
    return toks_[i];
  }
  const Token& next() {
    const Token& t = toks_[pos_];
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    const Token& t = peek(ahead);
    return t.kind == TokenKind::Punct && t.text == p;
  }
  bool is_keyword(std::string_view k) const {
    return peek().kind == TokenKind::Keyword && peek().text == k;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string found = t.kind == TokenKind::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(msg + ", found " + found, t.pos);
  }
  void expect_punct(std::string_view p) {
    if (!is_punct(p)) fail("expected '" + std::string(p) + "'");
    next();
  }
  void expect_keyword(std::string_view k) {
    if (!is_keyword(k)) fail("expected '" + std::string(k) + "'");
    next();
  }
  std::string expect_identifier(const char* what) {
    if (peek().kind != TokenKind::Identifier) fail(std::string("expected ") + what);
    return next().text;
  }

  // -- scopes ---------------------------------------------------------------
  bool bound(const std::string& name) const {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      if (it->count(name)) return true;
    }
    return false;
  }
  void declare(const std::string& name, SourcePos pos) {
    if (!scopes_.back().insert(name).second) {
      throw ParseError("variable '" + name + "' is already declared in this scope", pos);
    }
  }

  struct DepthGuard {
    explicit DepthGuard(Parser& p) : p(p) {
      if (++p.depth_ > kMaxDepth) throw ParseError("nesting too deep", p.peek().pos);
    }
    ~DepthGuard() { --p.depth_; }
    Parser& p;
  };

  // -- statements -----------------------------------------------------------

  // Parses statements up to the end of input (top level) or a closing brace.
  // Returns true when the sequence returns on every path.
  bool statements_until_end(Block& out, bool top_level) {
    bool returns = false;
    while (true) {
      if (top_level ? peek().kind == TokenKind::End : is_punct("}")) break;
      if (peek().kind == TokenKind::End) fail("expected '}'");
      if (returns) throw ParseError("unreachable statement after return", peek().pos);
      bool r = false;
      out.push_back(statement(r));
      returns = r;
    }
    return returns;
  }

  std::shared_ptr<const Block> block(bool& returns) {
    DepthGuard guard(*this);
    expect_punct("{");
    scopes_.emplace_back();
    auto body = std::make_shared<Block>();
    returns = statements_until_end(*body, false);
    scopes_.pop_back();
    expect_punct("}");
    return body;
  }

  Stmt statement(bool& returns) {
    const SourcePos at = peek().pos;
    returns = false;
    if (is_keyword("var")) {
      next();
      const SourcePos name_pos = peek().pos;
      std::string name = expect_identifier("variable name");
      expect_punct("=");
      ExprPtr value = expression();
      expect_punct(";");
      declare(name, name_pos);
      return {at, VarDecl{std::move(name), std::move(value)}};
    }
    if (is_keyword("for")) {
      next();
      expect_punct("(");
      const SourcePos var_pos = peek().pos;
      std::string var = expect_identifier("loop variable");
      expect_keyword("in");
      ExprPtr iterable = expression();
      expect_punct(")");
      scopes_.emplace_back();
      declare(var, var_pos);
      bool ignored = false;
      auto body = block(ignored);
      scopes_.pop_back();
      return {at, ForLoop{std::move(var), std::move(iterable), std::move(body)}};
    }
    if (is_keyword("if")) {
      return if_statement(returns);
    }
    if (is_keyword("return")) {
      next();
      if (is_punct(";")) fail("expected an expression after 'return'");
      ExprPtr value = expression();
      expect_punct(";");
      returns = true;
      return {at, Return{std::move(value)}};
    }
    if (peek().kind == TokenKind::Identifier) {
      const std::string name = peek().text;
      AssignOp op;
      if (is_punct("=", 1)) {
        op = AssignOp::Set;
      } else if (is_punct("+=", 1)) {
        op = AssignOp::AddTo;
      } else if (is_punct("-=", 1)) {
        op = AssignOp::SubFrom;
      } else {
        next();
        fail("expected an assignment");
      }
      if (!bound(name)) throw ParseError("assignment to unbound variable '" + name + "'", at);
      next();
      next();
      ExprPtr value = expression();
      expect_punct(";");
      return {at, Assign{name, op, std::move(value)}};
    }
    fail("expected a statement");
  }

  Stmt if_statement(bool& returns) {
    const SourcePos at = peek().pos;
    expect_keyword("if");
    expect_punct("(");
    ExprPtr cond = expression();
    expect_punct(")");
    bool then_returns = false;
    auto then_block = block(then_returns);
    std::shared_ptr<const Block> else_block = std::make_shared<Block>();
    bool else_returns = false;
    if (is_keyword("else")) {
      next();
      if (is_keyword("if")) {
        auto nested = std::make_shared<Block>();
        nested->push_back(if_statement(else_returns));
        else_block = std::move(nested);
      } else {
        else_block = block(else_returns);
      }
    }
    returns = then_returns && else_returns;
    return {at, IfElse{std::move(cond), std::move(then_block), std::move(else_block)}};
  }

  // -- expressions ----------------------------------------------------------

  static ExprPtr make(SourcePos pos, auto node) {
    return std::make_shared<const Expr>(Expr{pos, std::move(node)});
  }

  ExprPtr expression() {
    DepthGuard guard(*this);
    return or_expr();
  }

  ExprPtr or_expr() {
    ExprPtr lhs = and_expr();
    while (is_keyword("or")) {
      const SourcePos at = next().pos;
      lhs = make(at, Binary{BinaryOp::Or, lhs, and_expr()});
    }
    return lhs;
  }

  ExprPtr and_expr() {
    ExprPtr lhs = not_expr();
    while (is_keyword("and")) {
      const SourcePos at = next().pos;
      lhs = make(at, Binary{BinaryOp::And, lhs, not_expr()});
    }
    return lhs;
  }

  ExprPtr not_expr() {
    if (is_keyword("not")) {
      DepthGuard guard(*this);
      const SourcePos at = next().pos;
      return make(at, Unary{UnaryOp::Not, not_expr()});
    }
    return comparison();
  }

  ExprPtr comparison() {
    ExprPtr lhs = additive();
    static const std::pair<std::string_view, BinaryOp> kOps[] = {
        {"=", BinaryOp::Eq}, {"<>", BinaryOp::Ne}, {"<=", BinaryOp::Le},
        {">=", BinaryOp::Ge}, {"<", BinaryOp::Lt},  {">", BinaryOp::Gt}};
    for (const auto& [spelling, op] : kOps) {
      if (is_punct(spelling)) {
        const SourcePos at = next().pos;
        return make(at, Binary{op, lhs, additive()});
      }
    }
    return lhs;
  }

  ExprPtr additive() {
    ExprPtr lhs = multiplicative();
    while (is_punct("+") || is_punct("-")) {
      const Token& t = next();
      const BinaryOp op = t.text == "+" ? BinaryOp::Add : BinaryOp::Sub;
      lhs = make(t.pos, Binary{op, lhs, multiplicative()});
    }
    return lhs;
  }

  ExprPtr multiplicative() {
    ExprPtr lhs = unary();
    while (is_punct("*") || is_punct("/")) {
      const Token& t = next();
      const BinaryOp op = t.text == "*" ? BinaryOp::Mul : BinaryOp::Div;
      lhs = make(t.pos, Binary{op, lhs, unary()});
    }
    return lhs;
  }

  ExprPtr unary() {
    if (is_punct("-")) {
      DepthGuard guard(*this);
      const SourcePos at = next().pos;
      return make(at, Unary{UnaryOp::Neg, unary()});
    }
    return postfix(primary());
  }

  // Accepts `.all` or `.all()` after a type name.
  void type_all_suffix() {
    expect_punct(".");
    if (!(peek().kind == TokenKind::Identifier && peek().text == "all")) fail("expected 'all'");
    next();
    optional_empty_parens();
  }

  void optional_empty_parens() {
    if (is_punct("(")) {
      next();
      expect_punct(")");
    }
  }

  ExprPtr primary() {
    const Token& t = peek();
    switch (t.kind) {
      case TokenKind::Number:
        next();
        return make(t.pos, Literal{t.number});
      case TokenKind::String:
        next();
        return make(t.pos, Literal{t.text});
      case TokenKind::Keyword:
        if (t.text == "true" || t.text == "false") {
          next();
          return make(t.pos, Literal{t.text == "true"});
        }
        fail("expected an expression");
      case TokenKind::Punct:
        if (t.text == "(") {
          next();
          ExprPtr inner = expression();
          expect_punct(")");
          return inner;
        }
        fail("expected an expression");
      case TokenKind::Identifier: {
        const SourcePos at = t.pos;
        const std::string name = next().text;
        if (is_punct("!")) {
          // Model-qualified type: M!Type.all()
          next();
          std::string type = expect_identifier("type name");
          type_all_suffix();
          return make(at, AllOfType{std::move(type)});
        }
        if (name == "all" && is_punct("(") && !bound(name)) {
          next();
          if (peek().kind != TokenKind::String) fail("all() expects a type name string");
          std::string type = next().text;
          expect_punct(")");
          return make(at, AllOfType{std::move(type)});
        }
        if (bound(name)) return make(at, VarRef{name});
        if (is_punct(".") && peek(1).kind == TokenKind::Identifier && peek(1).text == "all") {
          type_all_suffix();
          return make(at, AllOfType{name});
        }
        throw ParseError("unbound variable '" + name + "'", at);
      }
      case TokenKind::End:
        fail("expected an expression");
    }
    fail("expected an expression");
  }

  ExprPtr postfix(ExprPtr object) {
    while (is_punct(".")) {
      next();
      const SourcePos at = peek().pos;
      const std::string name = expect_identifier("member name");
      if (name == "first" || name == "count" || name == "asReal") {
        optional_empty_parens();
        const Method m = name == "first" ? Method::First
                         : name == "count" ? Method::Count
                                           : Method::AsReal;
        object = make(at, MethodCall{object, m, {}, {}, nullptr});
      } else if (name == "isTypeOf") {
        expect_punct("(");
        std::string type = expect_identifier("type name");
        expect_punct(")");
        object = make(at, MethodCall{object, Method::IsTypeOf, std::move(type), {}, nullptr});
      } else if (name == "select" || name == "selectOne") {
        expect_punct("(");
        const SourcePos var_pos = peek().pos;
        std::string var = expect_identifier("lambda parameter");
        expect_punct("|");
        scopes_.emplace_back();
        declare(var, var_pos);
        ExprPtr pred = expression();
        scopes_.pop_back();
        expect_punct(")");
        const Method m = name == "select" ? Method::Select : Method::SelectOne;
        object = make(at, MethodCall{object, m, {}, std::move(var), std::move(pred)});
      } else if (name == "all") {
        throw ParseError("'all' applies to type names only", at);
      } else {
        if (is_punct("(")) fail("unknown operation '" + name + "'");
        object = make(at, Member{object, name});
      }
    }
    return object;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::set<std::string>> scopes_;
  int depth_ = 0;
};

}  // namespace

QueryProgram parse_query(std::string_view text) {
  Parser parser(tokenize(text));
  QueryProgram program;
  program.statements = parser.program();
  program.source_text = std::string(text);
  return program;
}

}  // namespace caseforge::cql
