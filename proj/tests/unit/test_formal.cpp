// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <random>
#include <set>

#include "case_builder.hpp"
#include "caseforge/formal.hpp"
#include "caseforge/lre.hpp"
#include "doctest.h"
#include "formal_gen.hpp"
#include "test_support.hpp"

using namespace caseforge;
using namespace caseforge::formal;
using namespace caseforge::testing;

namespace {

AssuranceCase auv() {
  TempDir dir;
  lre::generate_bundle(dir.path());
  return load_case(dir / "case.json");
}

std::vector<std::string> messages(const BackendDiagnostics& d, Severity s) {
  std::vector<std::string> out;
  for (const auto& e : d.entries) {
    if (e.severity == s) out.push_back(e.message);
  }
  return out;
}

}  // namespace

TEST_CASE("every node and connector of a module appears exactly once") {
  const AssuranceCase c = auv();
  for (const auto& m : c.modules) {
    CAPTURE(m.id);
    const ExportResult r = export_module(c, m.id);
    std::multiset<std::string> names;
    for (const auto& s : r.document.statements) names.insert(s.name());
    for (const auto& n : m.nodes) CHECK(names.count(n.id) == 1);
    for (const auto& k : m.connectors) {
      // A strategy's connectors are folded into the strategy's inference.
      const auto* src = m.find_node(k.source);
      const auto* tgt = m.find_node(k.target);
      const bool folded = k.kind == ConnectorKind::SupportedBy &&
                          (src->kind == NodeKind::Strategy || tgt->kind == NodeKind::Strategy);
      CHECK(names.count(k.id) == (folded ? 0u : 1u));
    }
    CHECK(names.size() == r.document.statements.size());
  }
}

TEST_CASE("export is deterministic and parse inverts render") {
  const AssuranceCase c = auv();
  const ExportResult a = export_module(c, "LRE_Argument");
  const ExportResult b = export_module(c, "LRE_Argument");
  CHECK(a.text == b.text);
  CHECK(render(a.document) == a.text);
  CHECK(parse_formal(a.text) == a.document);
}

TEST_CASE("strategy rendering and support inference lines") {
  const AssuranceCase c = auv();
  const std::string text = export_module(c, "LRE_Argument").text;
  CHECK(text.find("Inference I1 src <{@{ArtifactReference Sn3}}> tgt <{@{Claim C7_c}}>") != std::string::npos);
  CHECK(text.find("Inference LRE_S1 src <{@{Claim C7_a}, @{Claim C7_b}, @{Claim C7_c}, @{Claim LRE.Validation}}> "
                  "tgt <{@{Claim C6_a}}>") != std::string::npos);
  CHECK(text.find("Claim LRE.Validation needsSupport <<") != std::string::npos);
}

TEST_CASE("export errors") {
  const AssuranceCase c = auv();
  CHECK_THROWS_AS(export_module(c, "NoSuchModule"), ExportError);
  const AssuranceCase orphan = single_module({make_node("St", NodeKind::Strategy)}, {});
  CHECK_THROWS_AS(export_module(orphan, "M"), ExportError);
}

TEST_CASE("integrity of the exported LRE module: ok with needsSupport warnings only") {
  const BackendDiagnostics d = check_text(export_module(auv(), "LRE_Argument").text);
  CHECK(d.ok);
  CHECK(messages(d, Severity::Error).empty());
  const auto warnings = messages(d, Severity::Warning);
  REQUIRE(warnings.size() == 1);
  CHECK(warnings[0].find("LRE.Validation") != std::string::npos);
}

TEST_CASE("integrity errors") {
  SUBCASE("dangling reference") {
    const auto d = check_text("Claim a <<x>>\nInference i src <{@{Claim b}}> tgt <{@{Claim a}}> <<y>>\n");
    CHECK_FALSE(d.ok);
    REQUIRE(messages(d, Severity::Error).size() == 1);
    CHECK(d.entries[0].id == "i");
    CHECK(d.entries[0].line == 2u);
  }
  SUBCASE("kind mismatch") {
    const auto d = check_text("Claim a <<x>>\nClaim b <<y>>\nInference i src <{@{ArtifactReference b}}> tgt "
                              "<{@{Claim a}}> <<z>>\n");
    CHECK_FALSE(d.ok);
  }
  SUBCASE("duplicate names") {
    CHECK_FALSE(check_text("Claim a <<x>>\nClaim a <<y>>\n").ok);
  }
  SUBCASE("cycle") {
    const auto d = check_text(
        "Claim a <<x>>\nClaim b <<y>>\n"
        "Inference i src <{@{Claim a}}> tgt <{@{Claim b}}> <<1>>\n"
        "Inference j src <{@{Claim b}}> tgt <{@{Claim a}}> <<2>>\n");
    CHECK_FALSE(d.ok);
    const auto errors = messages(d, Severity::Error);
    REQUIRE(errors.size() == 1);
    CHECK(errors[0].find("cycle") != std::string::npos);
  }
  SUBCASE("failing verdict") {
    const auto d = check_text("Verdict v fail <<deadlock>>\n");
    CHECK_FALSE(d.ok);
    CHECK(check_text("Verdict v pass <<fine>>\n").ok);
    CHECK(check_text("Verdict v pass <<fine>>\n").entries.empty());
  }
  SUBCASE("syntax error") {
    const auto d = check_text("Claim a <<x>>\nClaim <<y>>\n");
    CHECK_FALSE(d.ok);
    REQUIRE(d.entries.size() == 1);
    CHECK(d.entries[0].id == "syntax");
    CHECK(d.entries[0].line == 2u);
  }
}

TEST_CASE("parser details") {
  const FormalDocument doc = parse_formal(
      "(* header\n   comment *)\nClaim a axiomatic <<escaped \\> and \\\\ here>>\n"
      "Inference i src <{}> tgt <{@{Claim a}}> <<@{Claim a} stands alone.>>\n");
  REQUIRE(doc.statements.size() == 2);
  CHECK(doc.statements[0].line == 3);
  const auto& claim = std::get<ClaimStmt>(doc.statements[0].body);
  CHECK(claim.declaration == Declaration::Axiomatic);
  CHECK(claim.description == "escaped > and \\ here");
  CHECK_THROWS_AS(parse_formal("Claim a <<unterminated"), ParseError);
  CHECK_THROWS_AS(parse_formal("Claim a <<bare > inside>>"), ParseError);
  CHECK_THROWS_AS(parse_formal("Claim a <<two\nlines>>"), ParseError);
  CHECK_THROWS_AS(parse_formal("Lemma a <<x>>"), ParseError);
}

TEST_CASE("property: render/parse round trip on random documents") {
  std::mt19937 rng(99);
  for (int i = 0; i < 200; ++i) {
    const FormalDocument doc = random_formal(rng);
    const std::string text = render(doc);
    CHECK(parse_formal(text) == doc);
  }
}

TEST_CASE("diagnostics wire format") {
  std::mt19937 rng(5);
  for (int i = 0; i < 100; ++i) {
    const std::string text = corrupt(render(random_formal(rng)), rng);
    const BackendDiagnostics d = check_text(text);
    CHECK(diagnostics_from_json(diagnostics_to_json(d)) == d);
  }
  CHECK_THROWS_AS(diagnostics_from_json("{\"ok\": true}"), ParseError);
  CHECK_THROWS_AS(diagnostics_from_json("{\"ok\": true, \"entries\": [{\"id\": \"a\", \"severity\": \"error\", "
                                        "\"message\": \"m\"}]}"),
                  ParseError);
  CHECK_THROWS_AS(diagnostics_from_json("{\"ok\": true, \"entries\": [{\"id\": \"a\", \"severity\": \"fatal\", "
                                        "\"message\": \"m\"}]}"),
                  ParseError);
  CHECK_THROWS_AS(diagnostics_from_json("not json"), ParseError);
}

TEST_CASE("bind address parsing") {
  CHECK(parse_bind_address("127.0.0.1:8080").port == 8080);
  CHECK(parse_bind_address(":0").host == "127.0.0.1");
  CHECK(parse_bind_address("9000").port == 9000);
  CHECK_THROWS_AS(parse_bind_address("host:99999"), std::invalid_argument);
  CHECK_THROWS_AS(parse_bind_address("host:x"), std::invalid_argument);
}
