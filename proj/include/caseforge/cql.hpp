// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

// Constraint Query Language: a small EOL subset for validation rules
// attached to artifact records. See docs/cql.md for the grammar.

#pragma once

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "caseforge/artifact_store.hpp"
#include "caseforge/util.hpp"

namespace caseforge::cql {

using ElementList = std::vector<ElementPtr>;

/// Boolean, Real, Text, Element or ElementList.
using Value = std::variant<bool, double, std::string, ElementPtr, ElementList>;

std::string type_name_of(const Value& v);
std::string to_display(const Value& v);

// ---------------------------------------------------------------------------
// Syntax tree

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Literal {
  std::variant<bool, double, std::string> value;
};
struct VarRef {
  std::string name;
};
/// `T.all`, `T.all()`, `M!T.all()` or `all("T")`.
struct AllOfType {
  std::string type_name;
};
/// `e.name`: attribute or child access.
struct Member {
  ExprPtr object;
  std::string name;
};
enum class Method { First, Count, AsReal, IsTypeOf, Select, SelectOne };
struct MethodCall {
  ExprPtr object;
  Method method;
  std::string type_arg;     // isTypeOf
  std::string lambda_var;   // select / selectOne
  ExprPtr predicate;        // select / selectOne
};
enum class UnaryOp { Neg, Not };
struct Unary {
  UnaryOp op;
  ExprPtr operand;
};
enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };
struct Binary {
  BinaryOp op;
  ExprPtr lhs;
  ExprPtr rhs;
};

struct Expr {
  SourcePos pos;
  std::variant<Literal, VarRef, AllOfType, Member, MethodCall, Unary, Binary> node;
};

struct Stmt;
using Block = std::vector<Stmt>;

struct VarDecl {
  std::string name;
  ExprPtr value;
};
enum class AssignOp { Set, AddTo, SubFrom };
struct Assign {
  std::string name;
  AssignOp op;
  ExprPtr value;
};
struct ForLoop {
  std::string var;
  ExprPtr iterable;
  std::shared_ptr<const Block> body;
};
struct IfElse {
  ExprPtr condition;
  std::shared_ptr<const Block> then_block;
  std::shared_ptr<const Block> else_block;  // may be empty
};
struct Return {
  ExprPtr value;
};

struct Stmt {
  SourcePos pos;
  std::variant<VarDecl, Assign, ForLoop, IfElse, Return> node;
};

struct QueryProgram {
  Block statements;
  std::string source_text;
};

// ---------------------------------------------------------------------------

struct Diagnostics {
  bool ok = true;
  std::string message;
  std::optional<SourcePos> position;  // present iff !ok
};

struct EvalResult {
  std::optional<Value> value;
  Diagnostics diagnostics;
};

/// Throws ParseError for syntax errors, unbound variables and programs that
/// do not return on every path.
QueryProgram parse_query(std::string_view text);

/// Never throws for runtime faults; they come back as diagnostics.
EvalResult eval_query(const QueryProgram& program, const ArtifactView& view);

/// Runs a program as a constraint: the result must be Boolean.
EvalResult eval_constraint(const QueryProgram& program, const ArtifactView& view);

/// Strict decimal conversion used by asReal(): optional sign, digits,
/// optional fraction.
std::optional<double> parse_decimal(std::string_view text);

}  // namespace caseforge::cql
