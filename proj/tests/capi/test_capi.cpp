// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

// Exercises the shared library through its C interface only.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <string>

#include "caseforge/caseforge.h"
#include "doctest.h"
#include "json.hpp"
#include "schema_check.hpp"
#include "test_support.hpp"

using caseforge::testing::schema_errors;
using caseforge::testing::slurp;
using caseforge::testing::source_dir;
using caseforge::testing::spit;
using caseforge::testing::TempDir;
using nlohmann::json;

namespace {

// Takes ownership of a library string.
std::string take(char* s) {
  std::string out = s ? s : "";
  cf_string_free(s);
  return out;
}

json schema(const std::string& name) {
  return json::parse(slurp(source_dir() / "docs/schemas" / (name + ".schema.json")));
}

void check_schema(const std::string& name, const std::string& doc) {
  const auto errors = schema_errors(schema(name), json::parse(doc));
  CHECK_MESSAGE(errors.empty(), name << ": " << (errors.empty() ? "" : errors.front()));
}

struct Example {
  TempDir dir;
  cf_case* c = nullptr;
  Example() {
    REQUIRE(cf_generate_example("auv", dir.path().c_str()) == CF_OK);
    REQUIRE(cf_case_load((dir / "case.json").c_str(), &c) == CF_OK);
  }
  ~Example() { cf_case_free(c); }
  std::string root() const { return dir.path().string(); }
};

}  // namespace

TEST_CASE("version and argument checking") {
  CHECK(std::string(cf_version()).size() > 0);
  cf_case* c = nullptr;
  CHECK(cf_case_load(nullptr, &c) == CF_ERR_INVALID_ARGUMENT);
  CHECK(std::string(cf_last_error()).size() > 0);
  CHECK(cf_case_load("/nonexistent/case.json", &c) == CF_ERR_IO);
  CHECK(c == nullptr);
  CHECK(cf_generate_example("other", "/tmp") == CF_ERR_INVALID_ARGUMENT);
  cf_string_free(nullptr);
  cf_case_free(nullptr);
}

TEST_CASE("parse errors carry a location") {
  cf_case* c = nullptr;
  const std::string text = "{\n  \"caseId\": ";
  CHECK(cf_case_parse(text.data(), text.size(), &c) == CF_ERR_PARSE);
  CHECK(std::string(cf_last_error()).find("2:") != std::string::npos);
  const std::string wrong = "{\"caseId\": 3}";
  CHECK(cf_case_parse(wrong.data(), wrong.size(), &c) == CF_ERR_PARSE);
}

TEST_CASE("dangling references map to the reference code") {
  Example ex;
  std::string text = slurp(ex.dir / "case.json");
  const std::string from = "\"target\": \"Op_Sn1\"";
  REQUIRE(text.find(from) != std::string::npos);
  text.replace(text.find(from), from.size(), "\"target\": \"Nowhere\"");
  cf_case* c = nullptr;
  CHECK(cf_case_parse(text.data(), text.size(), &c) == CF_ERR_REFERENCE);
}

TEST_CASE("full pipeline through the C interface") {
  Example ex;
  CHECK(std::string(cf_case_id(ex.c)) == "AUV");

  char* out = nullptr;
  int flag = -1;
  REQUIRE(cf_case_check_wellformed(ex.c, &out, &flag) == CF_OK);
  const std::string findings = take(out);
  CHECK(flag == 0);
  check_schema("findings", findings);

  REQUIRE(cf_case_serialize(ex.c, &out) == CF_OK);
  const std::string serialized = take(out);
  cf_case* again = nullptr;
  REQUIRE(cf_case_parse(serialized.data(), serialized.size(), &again) == CF_OK);
  REQUIRE(cf_case_serialize(again, &out) == CF_OK);
  CHECK(take(out) == serialized);
  cf_case_free(again);

  REQUIRE(cf_case_evaluate(ex.c, ex.root().c_str(), nullptr, &out, &flag) == CF_OK);
  const std::string report = take(out);
  CHECK(flag == 0);
  check_schema("evaluation_report", report);
  CHECK(json::parse(report)["verdicts"]["LRE.Validation"]["status"] == "needsSupport");

  REQUIRE(cf_case_export_formal(ex.c, "LRE_Argument", &out) == CF_OK);
  const std::string formal = take(out);
  CHECK(cf_case_export_formal(ex.c, "Missing", &out) == CF_ERR_EXPORT);

  REQUIRE(cf_formal_check(formal.data(), formal.size(), nullptr, &out, &flag) == CF_OK);
  check_schema("diagnostics", take(out));
  CHECK(flag == 1);

  REQUIRE(cf_impact_snapshot(ex.c, ex.root().c_str(), &out) == CF_OK);
  const std::string baseline = take(out);
  check_schema("baseline", baseline);
  REQUIRE(cf_impact_analyze(ex.c, ex.root().c_str(), baseline.c_str(), &out, &flag) == CF_OK);
  check_schema("impact_report", take(out));
  CHECK(flag == 0);
  spit(ex.dir / "artifacts/fmeda.csv", slurp(ex.dir / "artifacts/fmeda.csv") + "\n");
  REQUIRE(cf_impact_analyze(ex.c, ex.root().c_str(), baseline.c_str(), &out, &flag) == CF_OK);
  const json impact = json::parse(take(out));
  CHECK(flag == 1);
  CHECK(impact["changedArtifacts"] == json::array({"FMEDA"}));
}

TEST_CASE("remote checking through a library-hosted backend") {
  cf_backend* b = nullptr;
  REQUIRE(cf_backend_start("127.0.0.1:0", 1 << 20, &b) == CF_OK);
  const std::string endpoint = "http://127.0.0.1:" + std::to_string(cf_backend_port(b));
  const std::string doc = "Claim a <<x>>\nInference i src <{@{Claim z}}> tgt <{@{Claim a}}> <<y>>\n";
  char* local = nullptr;
  char* remote = nullptr;
  int ok_local = -1;
  int ok_remote = -1;
  REQUIRE(cf_formal_check(doc.data(), doc.size(), nullptr, &local, &ok_local) == CF_OK);
  REQUIRE(cf_formal_check(doc.data(), doc.size(), endpoint.c_str(), &remote, &ok_remote) == CF_OK);
  CHECK(take(local) == take(remote));
  CHECK(ok_local == 0);
  CHECK(ok_remote == 0);
  cf_backend_stop(b);

  char* out = nullptr;
  CHECK(cf_formal_check(doc.data(), doc.size(), endpoint.c_str(), &out, &ok_remote) == CF_ERR_TRANSPORT);
  CHECK(cf_backend_start("not-a-port:x", 0, &b) == CF_ERR_INVALID_ARGUMENT);
}

TEST_CASE("monitor lifecycle") {
  Example ex;
  const std::string status = (ex.dir / "status.json").string();
  const std::string root = ex.root();
  cf_monitor_config config{10, "tcp:0", status.c_str(), root.c_str(), nullptr};
  cf_monitor* m = nullptr;
  REQUIRE(cf_monitor_start(ex.c, &config, &m) == CF_OK);
  CHECK(cf_monitor_tcp_port(m) > 0);
  char* out = nullptr;
  REQUIRE(cf_monitor_status(m, &out) == CF_OK);
  const std::string snapshot = take(out);
  check_schema("status", snapshot);
  CHECK(json::parse(snapshot)["caseValid"] == true);
  CHECK(json::parse(snapshot)["degraded"] == false);
  cf_monitor_stop(m);
  check_schema("status", slurp(status));

  config.interval_ms = 0;
  CHECK(cf_monitor_start(ex.c, &config, &m) == CF_ERR_INVALID_ARGUMENT);
}
