// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <future>
#include <random>

#include "caseforge/formal.hpp"
#include "caseforge/lre.hpp"
#include "doctest.h"
#include "formal_gen.hpp"
#include "httplib.h"
#include "test_support.hpp"

using namespace caseforge;
using namespace caseforge::formal;
using namespace caseforge::testing;

namespace {

struct RunningService {
  BackendService service;
  std::string endpoint;

  explicit RunningService(ServiceConfig config = {}) : service(config) {
    service.start();
    endpoint = "http://127.0.0.1:" + std::to_string(service.port());
  }
  ~RunningService() { service.stop(); }
};

}  // namespace

TEST_CASE("health route") {
  RunningService s;
  httplib::Client client("127.0.0.1", s.service.port());
  const auto res = client.Get("/health");
  REQUIRE(res);
  CHECK(res->status == 200);
  CHECK(res->body == "ok");
}

TEST_CASE("responses equal the local check") {
  RunningService s;
  TempDir dir;
  lre::generate_bundle(dir.path());
  const std::string lre = export_module(load_case(dir / "case.json"), "LRE_Argument").text;
  CHECK(submit_to_backend(s.endpoint, lre) == check_text(lre));

  const std::string dangling = "Claim a <<x>>\nInference i src <{@{Claim b}}> tgt <{@{Claim a}}> <<y>>\n";
  const BackendDiagnostics d = submit_to_backend(s.endpoint, dangling);
  CHECK_FALSE(d.ok);
  CHECK(d.entries.size() == 1);
  CHECK(d == check_text(dangling));
}

TEST_CASE("unparseable body is a checking failure, not a transport failure") {
  RunningService s;
  const BackendDiagnostics d = submit_to_backend(s.endpoint, "this is not a document");
  CHECK_FALSE(d.ok);
  REQUIRE(d.entries.size() == 1);
  CHECK(d.entries[0].id == "syntax");
}

TEST_CASE("oversized body is rejected with 413") {
  RunningService s;
  httplib::Client client("127.0.0.1", s.service.port());
  const std::string body(10u << 20, 'x');
  const auto res = client.Post("/check", body, "text/plain");
  REQUIRE(res);
  CHECK(res->status == 413);
  CHECK_THROWS_AS(submit_to_backend(s.endpoint, body), TransportError);
}

TEST_CASE("concurrent requests are independent") {
  RunningService s;
  std::mt19937 rng(3);
  std::vector<std::string> texts;
  for (int i = 0; i < 16; ++i) texts.push_back(corrupt(render(random_formal(rng)), rng));
  std::vector<std::future<BackendDiagnostics>> futures;
  for (const auto& t : texts) {
    futures.push_back(std::async(std::launch::async, [&s, t] { return submit_to_backend(s.endpoint, t); }));
  }
  for (std::size_t i = 0; i < texts.size(); ++i) CHECK(futures[i].get() == check_text(texts[i]));
}

TEST_CASE("transport failures") {
  CHECK_THROWS_AS(submit_to_backend("ftp://127.0.0.1:1", "Claim a <<x>>"), TransportError);
  CHECK_THROWS_AS(submit_to_backend("http://127.0.0.1:1", "Claim a <<x>>", 500), TransportError);
  RunningService s;
  // A path that is not served answers 404.
  CHECK_THROWS_AS(submit_to_backend(s.endpoint + "/elsewhere/x", "Claim a <<x>>"), TransportError);
}

TEST_CASE("binding an occupied port fails") {
  RunningService s;
  ServiceConfig config;
  config.port = s.service.port();
  BackendService second(config);
  CHECK_THROWS_AS(second.start(), IoError);
}
