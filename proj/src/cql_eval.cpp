// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "caseforge/cql.hpp"

namespace caseforge::cql {

namespace {

struct RuntimeFault {
  std::string message;
  SourcePos pos;
};

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Value from_scalar(const Scalar& s) {
  return std::visit([](const auto& v) -> Value { return v; }, s);
}

std::string_view op_spelling(BinaryOp op) {
  switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "<>";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "and";
    case BinaryOp::Or: return "or";
  }
  return "?";
}

class Interpreter {
 public:
  explicit Interpreter(const ArtifactView& view) : view_(view) {}

  Value run(const Block& program) {
    scopes_.emplace_back();
    std::optional<Value> result = exec_block(program, /*new_scope=*/false);
    // The parser guarantees a return on every path.
    if (!result) throw RuntimeFault{"program finished without returning", {1, 1}};
    return *result;
  }

 private:
  // -- statements -----------------------------------------------------------

  std::optional<Value> exec_block(const Block& block, bool new_scope) {
    if (new_scope) scopes_.emplace_back();
    std::optional<Value> out;
    for (const Stmt& s : block) {
      out = exec(s);
      if (out) break;
    }
    if (new_scope) scopes_.pop_back();
    return out;
  }

  std::optional<Value> exec(const Stmt& stmt) {
    return std::visit(
        Overloaded{
            [&](const VarDecl& d) -> std::optional<Value> {
              scopes_.back()[d.name] = eval(*d.value);
              return std::nullopt;
            },
            [&](const Assign& a) -> std::optional<Value> {
              Value& slot = lookup(a.name, stmt.pos);
              Value rhs = eval(*a.value);
              if (a.op == AssignOp::Set) {
                slot = std::move(rhs);
              } else {
                const double l = as_real(slot, stmt.pos, a.op == AssignOp::AddTo ? "+=" : "-=");
                const double r = as_real(rhs, a.value->pos, a.op == AssignOp::AddTo ? "+=" : "-=");
                slot = a.op == AssignOp::AddTo ? l + r : l - r;
              }
              return std::nullopt;
            },
            [&](const ForLoop& f) -> std::optional<Value> {
              Value seq = eval(*f.iterable);
              const auto* items = std::get_if<ElementList>(&seq);
              if (!items) {
                throw RuntimeFault{"for-loop expects an ElementList, got " + type_name_of(seq),
                                   f.iterable->pos};
              }
              for (const ElementPtr& e : *items) {
                scopes_.emplace_back();
                scopes_.back()[f.var] = e;
                std::optional<Value> r = exec_block(*f.body, true);
                scopes_.pop_back();
                if (r) return r;
              }
              return std::nullopt;
            },
            [&](const IfElse& i) -> std::optional<Value> {
              if (as_bool(eval(*i.condition), i.condition->pos, "if")) {
                return exec_block(*i.then_block, true);
              }
              return exec_block(*i.else_block, true);
            },
            [&](const Return& r) -> std::optional<Value> { return eval(*r.value); },
        },
        stmt.node);
  }

  Value& lookup(const std::string& name, SourcePos pos) {
    for (auto it = scopes_.rbegin(); it != scopes_.rend(); ++it) {
      if (auto found = it->find(name); found != it->end()) return found->second;
    }
    throw RuntimeFault{"unbound variable '" + name + "'", pos};
  }

  // -- expressions ----------------------------------------------------------

  static double as_real(const Value& v, SourcePos pos, std::string_view context) {
    if (const auto* d = std::get_if<double>(&v)) return *d;
    throw RuntimeFault{"'" + std::string(context) + "' expects Real, got " + type_name_of(v), pos};
  }
  static bool as_bool(const Value& v, SourcePos pos, std::string_view context) {
    if (const auto* b = std::get_if<bool>(&v)) return *b;
    throw RuntimeFault{"'" + std::string(context) + "' expects Boolean, got " + type_name_of(v),
                       pos};
  }
  static const ElementList& as_list(const Value& v, SourcePos pos, std::string_view context) {
    if (const auto* l = std::get_if<ElementList>(&v)) return *l;
    throw RuntimeFault{"'" + std::string(context) + "' expects ElementList, got " + type_name_of(v),
                       pos};
  }

  Value eval(const Expr& e) {
    return std::visit(
        Overloaded{
            [&](const Literal& l) -> Value {
              return std::visit([](const auto& v) -> Value { return v; }, l.value);
            },
            [&](const VarRef& r) -> Value { return lookup(r.name, e.pos); },
            [&](const AllOfType& a) -> Value { return view_.all_of_type(a.type_name); },
            [&](const Member& m) -> Value { return member(eval(*m.object), m.name, e.pos); },
            [&](const MethodCall& c) -> Value { return call(c, e.pos); },
            [&](const Unary& u) -> Value {
              Value v = eval(*u.operand);
              if (u.op == UnaryOp::Not) return !as_bool(v, e.pos, "not");
              return -as_real(v, e.pos, "-");
            },
            [&](const Binary& b) -> Value { return binary(b, e.pos); },
        },
        e.node);
  }

  static Value member(const Value& object, const std::string& name, SourcePos pos) {
    const auto* el = std::get_if<ElementPtr>(&object);
    if (!el) {
      throw RuntimeFault{"cannot access '" + name + "' on " + type_name_of(object), pos};
    }
    const Element& element = **el;
    if (auto it = element.attributes.find(name); it != element.attributes.end()) {
      return from_scalar(it->second);
    }
    if (auto it = element.children.find(name); it != element.children.end()) {
      if (it->second.is_list) return it->second.items;
      return it->second.items.front();
    }
    const std::string type = element.type_name.empty() ? "element" : element.type_name;
    throw RuntimeFault{type + " has no member '" + name + "'", pos};
  }

  Value call(const MethodCall& c, SourcePos pos) {
    Value object = eval(*c.object);
    switch (c.method) {
      case Method::First: {
        const ElementList& items = as_list(object, pos, "first");
        if (items.empty()) throw RuntimeFault{"first() on an empty list", pos};
        return items.front();
      }
      case Method::Count:
        return static_cast<double>(as_list(object, pos, "count").size());
      case Method::AsReal: {
        if (const auto* d = std::get_if<double>(&object)) return *d;
        const auto* s = std::get_if<std::string>(&object);
        if (!s) throw RuntimeFault{"asReal() expects Text, got " + type_name_of(object), pos};
        std::optional<double> parsed = parse_decimal(*s);
        if (!parsed) throw RuntimeFault{"asReal(): '" + *s + "' is not a decimal number", pos};
        return *parsed;
      }
      case Method::IsTypeOf: {
        const auto* el = std::get_if<ElementPtr>(&object);
        if (!el) throw RuntimeFault{"isTypeOf() expects an Element, got " + type_name_of(object), pos};
        return (*el)->type_name == c.type_arg;
      }
      case Method::Select:
      case Method::SelectOne: {
        const bool one = c.method == Method::SelectOne;
        const ElementList& items = as_list(object, pos, one ? "selectOne" : "select");
        ElementList matches;
        for (const ElementPtr& item : items) {
          scopes_.emplace_back();
          scopes_.back()[c.lambda_var] = item;
          const bool keep = as_bool(eval(*c.predicate), c.predicate->pos, "predicate");
          scopes_.pop_back();
          if (keep) {
            if (one) return item;
            matches.push_back(item);
          }
        }
        if (one) throw RuntimeFault{"selectOne() found no matching element", pos};
        return matches;
      }
    }
    throw RuntimeFault{"unknown operation", pos};
  }

  Value binary(const Binary& b, SourcePos pos) {
    const std::string_view op = op_spelling(b.op);
    if (b.op == BinaryOp::And || b.op == BinaryOp::Or) {
      const bool lhs = as_bool(eval(*b.lhs), b.lhs->pos, op);
      if (b.op == BinaryOp::And && !lhs) return false;
      if (b.op == BinaryOp::Or && lhs) return true;
      return as_bool(eval(*b.rhs), b.rhs->pos, op);
    }
    Value lhs = eval(*b.lhs);
    Value rhs = eval(*b.rhs);
    if (b.op == BinaryOp::Eq || b.op == BinaryOp::Ne) {
      const bool scalar = std::holds_alternative<bool>(lhs) || std::holds_alternative<double>(lhs) ||
                          std::holds_alternative<std::string>(lhs);
      if (!scalar || lhs.index() != rhs.index()) {
        throw RuntimeFault{"cannot compare " + type_name_of(lhs) + " with " + type_name_of(rhs) +
                               " using '" + std::string(op) + "'",
                           pos};
      }
      const bool equal = lhs == rhs;
      return b.op == BinaryOp::Eq ? equal : !equal;
    }
    const double l = as_real(lhs, b.lhs->pos, op);
    const double r = as_real(rhs, b.rhs->pos, op);
    switch (b.op) {
      case BinaryOp::Add: return l + r;
      case BinaryOp::Sub: return l - r;
      case BinaryOp::Mul: return l * r;
      case BinaryOp::Div:
        if (r == 0) throw RuntimeFault{"division by zero", pos};
        return l / r;
      case BinaryOp::Lt: return l < r;
      case BinaryOp::Le: return l <= r;
      case BinaryOp::Gt: return l > r;
      case BinaryOp::Ge: return l >= r;
      default: break;
    }
    throw RuntimeFault{"unknown operator", pos};
  }

  const ArtifactView& view_;
  std::vector<std::map<std::string, Value>> scopes_;
};

}  // namespace

std::string type_name_of(const Value& v) {
  return std::visit(Overloaded{
                        [](bool) -> std::string { return "Boolean"; },
                        [](double) -> std::string { return "Real"; },
                        [](const std::string&) -> std::string { return "Text"; },
                        [](const ElementPtr&) -> std::string { return "Element"; },
                        [](const ElementList&) -> std::string { return "ElementList"; },
                    },
                    v);
}

std::string to_display(const Value& v) {
  return std::visit(Overloaded{
                        [](bool b) -> std::string { return b ? "true" : "false"; },
                        [](double d) -> std::string {
                          std::ostringstream out;
                          out.precision(17);
                          out << d;
                          return out.str();
                        },
                        [](const std::string& s) -> std::string { return "\"" + s + "\""; },
                        [](const ElementPtr& e) -> std::string {
                          return e->type_name.empty() ? "<element>" : "<" + e->type_name + ">";
                        },
                        [](const ElementList& l) -> std::string {
                          return "[" + std::to_string(l.size()) + " elements]";
                        },
                    },
                    v);
}

std::optional<double> parse_decimal(std::string_view text) {
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
  const std::size_t int_start = i;
  while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
  std::size_t digits = i - int_start;
  if (i < text.size() && text[i] == '.') {
    ++i;
    const std::size_t frac_start = i;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') ++i;
    if (i == frac_start) return std::nullopt;
    digits += i - frac_start;
  }
  if (digits == 0 || i != text.size()) return std::nullopt;
  // from_chars rejects a leading '+'.
  std::string_view body = text;
  if (body.front() == '+') body.remove_prefix(1);
  double out = 0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), out);
  if (ec != std::errc() || ptr != body.data() + body.size()) return std::nullopt;
  return out;
}

EvalResult eval_query(const QueryProgram& program, const ArtifactView& view) {
  EvalResult result;
  try {
    Interpreter interp(view);
    result.value = interp.run(program.statements);
  } catch (const RuntimeFault& fault) {
    result.diagnostics = {false, fault.message, fault.pos};
  }
  return result;
}

EvalResult eval_constraint(const QueryProgram& program, const ArtifactView& view) {
  EvalResult result = eval_query(program, view);
  if (result.value && !std::holds_alternative<bool>(*result.value)) {
    SourcePos pos{1, 1};
    // Point at the last top-level statement, which is where the value came from.
    if (!program.statements.empty()) pos = program.statements.back().pos;
    result.diagnostics = {false, "constraint must return Boolean, got " + type_name_of(*result.value),
                          pos};
    result.value.reset();
  }
  return result;
}

}  // namespace caseforge::cql
