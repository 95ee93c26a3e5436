// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "caseforge/cql.hpp"
#include "caseforge/lre.hpp"
#include "doctest.h"

using namespace caseforge;
using namespace caseforge::cql;

namespace {

ArtifactView tree_view(std::string_view json) {
  ArtifactView v;
  v.artifact_id = "A";
  v.kind = ArtifactKind::Tree;
  v.elements = parse_tree_elements(json);
  return v;
}

ArtifactView fmeda_view() {
  ArtifactView v;
  v.artifact_id = "FMEDA";
  v.kind = ArtifactKind::Tabular;
  v.elements = parse_csv_elements(lre::fmeda_csv(), "FMEDA", {"ComponentID"});
  return v;
}

double real_of(const EvalResult& r) {
  REQUIRE(r.diagnostics.ok);
  REQUIRE(r.value.has_value());
  return std::get<double>(*r.value);
}

bool bool_of(const EvalResult& r) {
  INFO(r.diagnostics.message);
  REQUIRE(r.diagnostics.ok);
  REQUIRE(r.value.has_value());
  return std::get<bool>(*r.value);
}

EvalResult run(std::string_view program, const ArtifactView& v) { return eval_query(parse_query(program), v); }

const ArtifactView kEmpty = tree_view(R"({"$type": "Root"})");

}  // namespace

TEST_CASE("arithmetic and precedence") {
  CHECK(real_of(run("return 1 + 2 * 3;", kEmpty)) == 7);
  CHECK(real_of(run("return (1 + 2) * 3;", kEmpty)) == 9);
  CHECK(real_of(run("return 1 - 8 / 4;", kEmpty)) == -1);
  CHECK(real_of(run("return -2 * 3;", kEmpty)) == -6);
  CHECK(bool_of(run("return not (1 > 2) and 2 >= 2;", kEmpty)));
  CHECK(bool_of(run("return \"a\" <> \"b\";", kEmpty)));
}

TEST_CASE("variables, loops and conditionals") {
  const char* program = R"(
var total = 0;
for (x in Item.all()) {
  if (x.flag) {
    total += x.value;
  } else {
    total -= 1;
  }
}
return total;)";
  const ArtifactView v = tree_view(R"({"$type": "Root", "items": [
      {"$type": "Item", "value": 2, "flag": true},
      {"$type": "Item", "value": 5, "flag": false},
      {"$type": "Item", "value": 3, "flag": true}]})");
  CHECK(real_of(run(program, v)) == 4);
}

TEST_CASE("collection operations") {
  const ArtifactView v = tree_view(R"({"$type": "Root", "items": [
      {"$type": "Item", "name": "a", "value": 1},
      {"$type": "Item", "name": "b", "value": 2},
      {"$type": "Item", "name": "c", "value": 3}]})");
  CHECK(real_of(run("return Item.all.count;", v)) == 3);
  CHECK(real_of(run("return all(\"Item\").select(i | i.value > 1).count();", v)) == 2);
  CHECK(real_of(run("return Item.all.selectOne(i | i.name = \"c\").value;", v)) == 3);
  CHECK(real_of(run("return Item.all.first.value;", v)) == 1);
  CHECK(bool_of(run("return Root.all.first.items.first.isTypeOf(Item);", v)));
  CHECK(real_of(run("return M!Item.all().count();", v)) == 3);
}

TEST_CASE("SPFM program over the FMEDA table") {
  // Safety-related failure rates: D1 10, C1 2, C2 2, L1 15, U1 100 = 129.
  // SPF/RF of rows with a safety-goal violation: 3 + 4.5 + 1 = 8.5.
  const double expected = 1.0 - 8.5 / 129.0;
  std::string program = lre::spfm_constraint();
  const std::string tail = "return spfm > 0.9;";
  program.replace(program.find(tail), tail.size(), "return spfm;");
  CHECK(std::fabs(real_of(run(program, fmeda_view())) - expected) < 1e-12);
  CHECK(bool_of(eval_constraint(parse_query(lre::spfm_constraint()), fmeda_view())));
}

TEST_CASE("static errors are parse errors with positions") {
  auto line_of = [](std::string_view program) {
    try {
      parse_query(program);
    } catch (const ParseError& e) {
      return static_cast<int>(e.position().line);
    }
    return -1;
  };
  CHECK(line_of("var x = 1;\nreturn y;") == 2);
  CHECK(line_of("var x = 1;\nvar x = 2;\nreturn x;") == 2);
  CHECK(line_of("var x = 1;\nif (x > 0) { return 1; }") >= 1);
  CHECK(line_of("return 1;\nreturn 2;") == 2);
  CHECK(line_of("return 1 +;") == 1);
  CHECK(line_of("return 1 < 2 < 3;") == 1);
  CHECK(line_of("return \"abc;") == 1);
  // Both branches return: well-formed.
  CHECK(line_of("if (true) { return 1; } else { return 2; }") == -1);
}

TEST_CASE("runtime faults become positioned diagnostics") {
  const ArtifactView v = tree_view(R"({"$type": "Root", "items": []})");
  SUBCASE("division by zero") {
    const EvalResult r = run("var a = 0;\nreturn 1 / a;", v);
    CHECK_FALSE(r.diagnostics.ok);
    REQUIRE(r.diagnostics.position.has_value());
    CHECK(r.diagnostics.position->line == 2);
  }
  SUBCASE("first of an empty collection") {
    CHECK_FALSE(run("return Item.all.first.value;", v).diagnostics.ok);
  }
  SUBCASE("missing member") {
    const EvalResult r = run("return Root.all.first.nothing;", v);
    CHECK_FALSE(r.diagnostics.ok);
    CHECK(r.diagnostics.message.find("nothing") != std::string::npos);
  }
  SUBCASE("type mismatch") {
    CHECK_FALSE(run("return 1 + \"a\";", v).diagnostics.ok);
    CHECK_FALSE(run("return 1 = \"1\";", v).diagnostics.ok);
    CHECK_FALSE(run("if (1) { return true; } return false;", v).diagnostics.ok);
  }
  SUBCASE("selectOne without a match") {
    CHECK_FALSE(run("return Item.all.selectOne(i | true);", v).diagnostics.ok);
  }
  SUBCASE("asReal on non-numeric text") {
    const ArtifactView t = tree_view(R"({"$type": "Root", "s": "12abc"})");
    CHECK_FALSE(run("return Root.all.first.s.asReal();", t).diagnostics.ok);
  }
}

TEST_CASE("a constraint must produce a Boolean") {
  const EvalResult r = eval_constraint(parse_query("var x = 1;\nreturn x;"), kEmpty);
  CHECK_FALSE(r.diagnostics.ok);
  CHECK(r.diagnostics.position.has_value());
}

TEST_CASE("strict decimal parsing") {
  CHECK(parse_decimal("42") == 42.0);
  CHECK(parse_decimal("-0.5") == -0.5);
  CHECK(parse_decimal("+3.25") == 3.25);
  CHECK_FALSE(parse_decimal("").has_value());
  CHECK_FALSE(parse_decimal("1e3").has_value());
  CHECK_FALSE(parse_decimal("1.").has_value());
  CHECK_FALSE(parse_decimal(" 1").has_value());
  CHECK_FALSE(parse_decimal("30%").has_value());
}

TEST_CASE("deep nesting is rejected instead of overflowing the stack") {
  std::string program = "return ";
  for (int i = 0; i < 5000; ++i) program += "(";
  program += "1";
  for (int i = 0; i < 5000; ++i) program += ")";
  program += ";";
  CHECK_THROWS_AS(parse_query(program), ParseError);
}
