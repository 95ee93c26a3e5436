// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

// Acceptance suite. Prints one [PASS]/[FAIL] line per criterion and exits
// non-zero if any criterion fails.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <mutex>
#include <random>
#include <regex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "case_builder.hpp"
#include "caseforge/artifact_store.hpp"
#include "caseforge/case_model.hpp"
#include "caseforge/cql.hpp"
#include "caseforge/dsms.hpp"
#include "caseforge/evaluator.hpp"
#include "caseforge/formal.hpp"
#include "caseforge/impact.hpp"
#include "caseforge/lre.hpp"
#include "caseforge/util.hpp"
#include "formal_gen.hpp"
#include "json.hpp"
#include "test_support.hpp"

using namespace caseforge;
using namespace caseforge::testing;
using nlohmann::json;
using SteadyClock = std::chrono::steady_clock;

namespace {

// Collects failed expectations for one criterion.
class Check {
 public:
  void expect(bool ok, const std::string& what) {
    if (!ok && failures_.size() < 8) failures_.push_back(what);
    if (!ok) ++count_;
  }
  bool ok() const { return count_ == 0; }
  std::string summary() const {
    std::string s;
    for (const auto& f : failures_) s += "\n    - " + f;
    if (count_ > failures_.size()) s += "\n    - (" + std::to_string(count_ - failures_.size()) + " more)";
    return s;
  }

 private:
  std::vector<std::string> failures_;
  std::size_t count_ = 0;
};

double seconds_since(SteadyClock::time_point start) {
  return std::chrono::duration<double>(SteadyClock::now() - start).count();
}

std::string fmt(double v, int precision = 6) {
  std::ostringstream ss;
  ss.precision(precision);
  ss << std::fixed << v;
  return ss.str();
}

struct Bundle {
  TempDir dir;
  AssuranceCase c;
  Bundle() {
    lre::generate_bundle(dir.path());
    c = load_case(dir / "case.json");
  }
  EvaluationReport evaluate() const {
    EvalOptions o;
    o.root = dir.path();
    return evaluate_case(c, o);
  }
};

std::map<std::string, Status> statuses(const EvaluationReport& r) {
  std::map<std::string, Status> out;
  for (const auto& [id, v] : r.verdicts) out[id] = v.status;
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  for (char ch : line) {
    if (ch == ',') {
      cells.push_back(cell);
      cell.clear();
    } else if (ch != '\r') {
      cell += ch;
    }
  }
  cells.push_back(cell);
  return cells;
}

// 1. SPFM over the FMEDA table.
bool criterion_spfm(std::string& detail) {
  Check check;
  const auto start = SteadyClock::now();
  Bundle b;

  // Oracle: sum the columns directly from the CSV text.
  std::istringstream csv(slurp(b.dir / "artifacts/fmeda.csv"));
  std::string line;
  std::getline(csv, line);
  const auto header = split_csv_line(line);
  auto col = [&](const std::string& name) {
    return static_cast<std::size_t>(std::find(header.begin(), header.end(), name) - header.begin());
  };
  double sr = 0;
  double spf_rf = 0;
  int rows = 0;
  while (std::getline(csv, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    ++rows;
    if (cells[col("SafetyRelated")] == "Yes") sr += std::stod(cells[col("FailureRate")]);
    if (cells[col("SafetyGoalViolation")] == "Yes") spf_rf += std::stod(cells[col("SPF_RF")]);
  }
  const double oracle = 1.0 - spf_rf / sr;
  check.expect(rows == 12, "FMEDA has " + std::to_string(rows) + " rows, expected 12");
  check.expect(std::fabs(oracle - 0.934109) <= 1e-6, "oracle SPFM " + fmt(oracle, 9));

  // The shipped rule, with its threshold test swapped for a tight window
  // around the expected value.
  const ArtifactRecord* fmeda = b.c.find_artifact("FMEDA");
  const ArtifactView view = load_artifact(*fmeda, b.dir.path());
  std::string rule = fmeda->constraints.at(0).body;
  const std::string threshold = "return spfm > 0.9;";
  check.expect(rule.find(threshold) != std::string::npos, "rule has no 0.9 threshold");
  rule.replace(rule.find(threshold), threshold.size(), "return spfm > 0.934108 and spfm < 0.934110;");
  const auto windowed = cql::eval_constraint(cql::parse_query(rule), view);
  check.expect(windowed.diagnostics.ok && windowed.value && std::get<bool>(*windowed.value),
               "computed SPFM is outside 0.934109 +- 1e-6");

  const ArtifactResult r = evaluate_artifact(*fmeda, EvalOptions{b.dir.path(), std::nullopt});
  check.expect(r.passed, "SPFM constraint does not pass");
  const double elapsed = seconds_since(start);
  check.expect(elapsed < 1.0, "took " + fmt(elapsed, 3) + " s");
  detail = "SPFM=" + fmt(oracle) + ", passes threshold 0.9, " + fmt(elapsed, 3) + " s" + check.summary();
  return check.ok();
}

// 2. Obstacle reading range rule.
bool criterion_reading_ranges(std::string& detail) {
  Check check;
  const auto start = SteadyClock::now();
  Bundle b;
  const ArtifactRecord* rec = b.c.find_artifact("Obstacle_reading");
  const auto program = cql::parse_query(rec->constraints.at(0).body);
  auto run = [&](const std::map<std::string, double>& fields) {
    const ArtifactView view = view_from_bytes(*rec, lre::obstacle_reading_document(fields, 1));
    const auto r = cql::eval_constraint(program, view);
    return r.diagnostics.ok && r.value && std::get<bool>(*r.value);
  };
  std::map<std::string, double> zero;
  for (const char* f : lre::kObstacleFields) zero[f] = 0;
  check.expect(run(zero), "all-zero reading fails");

  const std::map<std::string, std::pair<double, double>> ranges = {
      {"ns_rel_dist", {-50, 50}}, {"ew_rel_dist", {-50, 50}}, {"obs_depth", {-10, 0}},
      {"obs_ns_vel", {-5, 5}},    {"obs_ew_vel", {-5, 5}},    {"obs_roc", {-5, 5}},
  };
  int boundary_tests = 0;
  for (const auto& [field, range] : ranges) {
    for (double v : {range.first, range.second}) {
      auto in = zero;
      in[field] = v;
      check.expect(run(in), field + " = " + fmt(v, 3) + " (boundary) fails");
    }
    for (double v : {range.first - 0.001, range.second + 0.001}) {
      auto out = zero;
      out[field] = v;
      check.expect(!run(out), field + " = " + fmt(v, 3) + " passes");
    }
    ++boundary_tests;
  }
  const double elapsed = seconds_since(start);
  check.expect(elapsed < 1.0, "took " + fmt(elapsed, 3) + " s");
  detail = std::to_string(boundary_tests) + " fields, 24 boundary probes, " + fmt(elapsed, 3) + " s" +
           check.summary();
  return check.ok();
}

// Nodes whose status depends on `id`: SupportedBy parents and away nodes
// that reference it, closed transitively.
std::set<std::string> ancestors_of(const AssuranceCase& c, const std::string& id) {
  std::multimap<std::string, std::string> up;
  for (const auto& m : c.modules) {
    for (const auto& k : m.connectors) {
      if (k.kind == ConnectorKind::SupportedBy) up.insert({k.target, k.source});
    }
    for (const auto& n : m.nodes) {
      if (n.away_target) up.insert({n.away_target->node, n.id});
    }
  }
  std::set<std::string> seen;
  std::vector<std::string> stack{id};
  while (!stack.empty()) {
    const std::string cur = stack.back();
    stack.pop_back();
    for (auto [it, end] = up.equal_range(cur); it != end; ++it) {
      if (seen.insert(it->second).second) stack.push_back(it->second);
    }
  }
  return seen;
}

// 3. Verdict propagation over the bundle.
bool criterion_propagation(std::string& detail) {
  Check check;
  const auto start = SteadyClock::now();
  Bundle b;
  const auto nominal = statuses(b.evaluate());

  std::set<std::string> needs;
  for (const auto& [id, s] : nominal) {
    if (s == Status::NeedsSupport) needs.insert(id);
  }
  check.expect(needs == std::set<std::string>{"LRE.Validation"}, "needsSupport set differs");
  const auto anc = ancestors_of(b.c, "LRE.Validation");
  check.expect(anc.count("AUV_G1") == 1, "AUV_G1 is not an ancestor of LRE.Validation");
  for (const auto& a : anc) {
    check.expect(nominal.at(a) != Status::Valid, "ancestor " + a + " is valid");
  }

  const auto machine_path = b.dir / "artifacts/lre_machine.json";
  const std::string original = slurp(machine_path);
  json machine = json::parse(original);
  auto& ts = machine["transitions"];
  const auto before = ts.size();
  ts.erase(std::remove_if(ts.begin(), ts.end(), [](const json& t) { return t["name"] == "t4"; }), ts.end());
  check.expect(ts.size() + 1 == before, "t4 not found in the machine document");
  spit(machine_path, machine.dump(2));
  const auto mutated = statuses(b.evaluate());
  for (const char* id : {"Sn1", "C7_a", "C6_a", "AUV_G1"}) {
    check.expect(mutated.at(id) == Status::Invalid, std::string(id) + " not invalid after deleting t4");
  }
  check.expect(nominal.at("Sn1") == Status::Valid && nominal.at("C7_a") == Status::Valid,
               "Sn1/C7_a not valid before the edit");

  spit(machine_path, original);
  const auto restored = statuses(b.evaluate());
  check.expect(restored == nominal, "restoring the file does not restore every verdict");
  const double elapsed = seconds_since(start);
  check.expect(elapsed < 2.0, "took " + fmt(elapsed, 3) + " s");
  detail = std::to_string(anc.size()) + " ancestors non-valid, t4 deletion flags Sn1/C7_a/C6_a/AUV_G1, " +
           fmt(elapsed, 3) + " s" + check.summary();
  return check.ok();
}

// 4. Formal export of the LRE module.
bool criterion_golden(std::string& detail) {
  Check check;
  Bundle b;
  const formal::ExportResult r = formal::export_module(b.c, "LRE_Argument");
  const std::string golden = slurp(source_dir() / "tests/golden/lre_module.formal");
  check.expect(r.text == golden, "export differs from the golden document");
  check.expect(golden.find("Inference I1 src <{@{ArtifactReference Sn3}}> tgt <{@{Claim C7_c}}>") !=
                   std::string::npos,
               "golden lacks the I1 inference");
  const formal::FormalDocument parsed = formal::parse_formal(golden);
  check.expect(parsed == r.document, "parse does not invert render");
  check.expect(formal::render(parsed) == golden, "render(parse(golden)) differs");

  const formal::BackendDiagnostics d = formal::check_integrity(parsed);
  check.expect(d.ok, "integrity check not ok");
  std::set<std::string> needs_support;
  for (const auto& s : parsed.statements) {
    if (const auto* claim = std::get_if<formal::ClaimStmt>(&s.body)) {
      if (claim->declaration == Declaration::NeedsSupport) needs_support.insert(claim->name);
    }
  }
  std::size_t warnings = 0;
  for (const auto& e : d.entries) {
    check.expect(e.severity == formal::Severity::Warning, "non-warning entry for " + e.id);
    check.expect(needs_support.count(e.id) == 1, "warning for " + e.id + ", which is not needsSupport");
    ++warnings;
  }
  check.expect(warnings == needs_support.size(), "not every needsSupport claim is warned about");
  detail = std::to_string(golden.size()) + " bytes, " + std::to_string(parsed.statements.size()) +
           " statements, " + std::to_string(warnings) + " needsSupport warning(s)" + check.summary();
  return check.ok();
}

// Mutations used by the impact property. Each changes one artifact file.
std::string mutate(const std::string& path, const std::string& bytes, std::mt19937& rng) {
  std::string out = bytes;
  const int choice = static_cast<int>(rng() % 6);
  if (choice == 0 && !out.empty()) {
    out[rng() % out.size()] ^= static_cast<char>(1 + rng() % 127);
  } else if (choice == 1) {
    out += "\n";
  } else if (choice == 2 && path.find("fmeda") != std::string::npos) {
    // Rewrite one numeric cell.
    std::vector<std::size_t> digits;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (out[i] >= '0' && out[i] <= '9') digits.push_back(i);
    }
    out[digits[rng() % digits.size()]] = static_cast<char>('0' + rng() % 10);
  } else if (choice == 3 && path.find("lre_machine") != std::string::npos) {
    json m = json::parse(out);
    auto& ts = m["transitions"];
    ts.erase(ts.begin() + static_cast<long>(rng() % ts.size()));
    out = m.dump(2);
  } else if (choice == 4 && path.find("obstacle_reading") != std::string::npos) {
    std::map<std::string, double> fields;
    for (const char* f : lre::kObstacleFields) fields[f] = 0;
    fields[lre::kObstacleFields[rng() % 6]] = (rng() % 2 ? 1 : -1) * 60.0;
    out = lre::obstacle_reading_document(fields, 2);
  } else if (choice == 5 && path.find(".thy") != std::string::npos) {
    const auto at = out.find(" pass ");
    if (at != std::string::npos) out.replace(at, 6, " fail ");
  } else if (!out.empty()) {
    out.erase(rng() % out.size(), 1);
  }
  return out;
}

// 5. Impact soundness against the evaluator.
bool criterion_impact(std::string& detail) {
  Check check;
  const auto start = SteadyClock::now();
  Bundle b;
  const Baseline base = snapshot(b.c, b.dir.path());
  const auto nominal = statuses(b.evaluate());
  std::vector<std::string> files;
  for (const auto* a : b.c.all_artifacts()) {
    if (std::find(files.begin(), files.end(), a->document_path) == files.end()) files.push_back(a->document_path);
  }
  std::mt19937 rng(2026);
  int changed_trials = 0;
  std::size_t verdict_changes = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::string rel = files[rng() % files.size()];
    const auto path = b.dir / rel;
    const std::string original = slurp(path);
    const std::string edited = mutate(rel, original, rng);
    spit(path, edited);
    const auto after = statuses(b.evaluate());
    const ImpactReport report = impact_of(b.c, base, b.dir.path());
    const std::set<std::string> impacted(report.impacted_nodes.begin(), report.impacted_nodes.end());
    bool any = false;
    for (const auto& [id, s] : after) {
      if (s == nominal.at(id)) continue;
      any = true;
      ++verdict_changes;
      check.expect(impacted.count(id) == 1, "trial " + std::to_string(trial) + " (" + rel + "): " + id +
                                                " changed verdict but is not impacted");
    }
    changed_trials += any ? 1 : 0;
    check.expect(edited == original || !report.changed_artifacts.empty(),
                 "trial " + std::to_string(trial) + ": edit to " + rel + " not detected");
    spit(path, original);
  }
  const double elapsed = seconds_since(start);
  check.expect(changed_trials > 20, "only " + std::to_string(changed_trials) + " trials changed a verdict");
  check.expect(elapsed < 60.0, "took " + fmt(elapsed, 1) + " s");
  detail = "200 mutations, " + std::to_string(changed_trials) + " changed verdicts (" +
           std::to_string(verdict_changes) + " node changes, all impacted), " + fmt(elapsed, 2) + " s" +
           check.summary();
  return check.ok();
}

// 6. Runtime monitoring latency.
bool criterion_dsms(std::string& detail) {
  Check check;
  Bundle b;
  const auto feed = b.dir / "feed.ndjson";
  spit(feed, "");
  dsms::MonitorConfig config;
  config.interval_ms = 50;
  config.ingest = "file:" + feed.string();
  config.status_path = b.dir / "status.json";
  config.root = b.dir.path();
  dsms::Monitor monitor(b.c, config);

  struct Seen {
    SteadyClock::time_point at;
    dsms::StatusSnapshot s;
  };
  std::mutex mu;
  std::vector<Seen> seen;
  monitor.set_observer([&](const dsms::StatusSnapshot& s) {
    std::lock_guard<std::mutex> lock(mu);
    seen.push_back({SteadyClock::now(), s});
  });
  monitor.start();

  SteadyClock::time_point bad_written{};
  {
    std::ofstream out(feed, std::ios::app);
    auto next = SteadyClock::now();
    for (int seq = 1; seq <= 1000; ++seq) {
      const double roc = seq == 500 ? 7.5 : 0.0;
      out << "{\"seq\": " << seq << ", \"ns_rel_dist\": 1, \"ew_rel_dist\": -1, \"obs_depth\": -2, "
          << "\"obs_ns_vel\": 0.5, \"obs_ew_vel\": 0, \"obs_roc\": " << roc << "}\n";
      out.flush();
      if (seq == 500) bad_written = SteadyClock::now();
      next += std::chrono::milliseconds(5);
      std::this_thread::sleep_until(next);
    }
  }
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  monitor.stop();

  std::lock_guard<std::mutex> lock(mu);
  std::optional<Seen> first_failure;
  bool restored_after = false;
  bool any_failure_before = false;
  for (const auto& v : seen) {
    const bool flags = !v.s.case_valid && std::find(v.s.failed_nodes.begin(), v.s.failed_nodes.end(),
                                                    "Sensor.Sn2") != v.s.failed_nodes.end();
    if (v.s.last_seq < 500 && !v.s.case_valid) any_failure_before = true;
    if (!first_failure && v.s.last_seq >= 500 && flags) first_failure = v;
    if (first_failure && v.s.last_seq > 500 && v.s.case_valid) restored_after = true;
  }
  check.expect(!any_failure_before, "failure reported before record 500");
  check.expect(first_failure.has_value(), "no snapshot with lastSeq >= 500 reports the failure");
  double latency_ms = -1;
  if (first_failure) {
    latency_ms = std::chrono::duration<double, std::milli>(first_failure->at - bad_written).count();
    // Two evaluation periods, with a 3x allowance for a loaded machine.
    check.expect(latency_ms <= 3 * 2 * config.interval_ms, "latency " + fmt(latency_ms, 1) + " ms");
  }
  check.expect(restored_after, "validity not restored by later in-range records");
  check.expect(!seen.empty() && seen.back().s.case_valid && seen.back().s.last_seq == 1000,
               "final snapshot is not valid at lastSeq 1000");
  check.expect(!seen.empty() && seen.back().s.rejected_records == 0, "records were rejected");
  detail = "failure reported " + fmt(latency_ms, 1) + " ms after ingestion (limit " +
           std::to_string(3 * 2 * config.interval_ms) + " ms), " + std::to_string(seen.size()) +
           " snapshots" + check.summary();
  return check.ok();
}

// Reference explorer for criterion 7: fixpoint over control states with its
// own guard interpreter.
double oracle_value(const lre::Guard& g, const lre::Machine& m, const lre::Environment& env) {
  using Op = lre::Guard::Op;
  switch (g.op) {
    case Op::Const:
      return g.value;
    case Op::Ref:
      if (g.ref_type == lre::Guard::RefType::Constant) return m.constants.at(g.name);
      return env.values.at(g.name);
    case Op::CallExp:
      return env.values.at(lre::call_key(g.function, g.args));
    default:
      throw std::logic_error("not a value");
  }
}

bool oracle_holds(const lre::Guard& g, const lre::Machine& m, const lre::Environment& env) {
  using Op = lre::Guard::Op;
  switch (g.op) {
    case Op::And:
      return oracle_holds(*g.left, m, env) && oracle_holds(*g.right, m, env);
    case Op::Or:
      return oracle_holds(*g.left, m, env) || oracle_holds(*g.right, m, env);
    case Op::Not:
      return !oracle_holds(*g.left, m, env);
    case Op::GreaterOrEqual:
      return oracle_value(*g.left, m, env) >= oracle_value(*g.right, m, env);
    case Op::LessOrEqual:
      return oracle_value(*g.left, m, env) <= oracle_value(*g.right, m, env);
    case Op::Greater:
      return oracle_value(*g.left, m, env) > oracle_value(*g.right, m, env);
    case Op::Less:
      return oracle_value(*g.left, m, env) < oracle_value(*g.right, m, env);
    default:
      throw std::logic_error("not a condition");
  }
}

struct OracleResult {
  std::set<std::string> reachable;
  std::set<std::string> stuck;
};

OracleResult oracle_explore(const lre::Machine& m, const std::vector<lre::Environment>& envs) {
  auto enabled = [&](const lre::Transition& t, const lre::Environment& env) {
    return !t.guard || oracle_holds(*t.guard, m, env);
  };
  // successors[s] = states reachable in one step from s under some
  // environment and offered event.
  std::map<std::string, std::set<std::string>> successors;
  for (const auto& s : m.states) {
    for (const auto& env : envs) {
      bool spontaneous = false;
      for (const auto& t : m.transitions) {
        if (t.source == s && !t.trigger && enabled(t, env)) {
          successors[s].insert(t.target);
          spontaneous = true;
        }
      }
      if (spontaneous) continue;
      for (const auto& t : m.transitions) {
        if (t.source == s && t.trigger && enabled(t, env)) successors[s].insert(t.target);
      }
    }
  }
  OracleResult r;
  r.reachable = {m.initial};
  for (bool grew = true; grew;) {
    grew = false;
    for (const auto& s : std::vector<std::string>(r.reachable.begin(), r.reachable.end())) {
      for (const auto& t : successors[s]) grew |= r.reachable.insert(t).second;
    }
  }
  for (const auto& s : r.reachable) {
    if (successors[s].empty()) r.stuck.insert(s);
  }
  return r;
}

lre::GuardPtr random_guard(std::mt19937& rng, const std::vector<std::string>& vars, int depth) {
  using G = lre::Guard;
  using Op = G::Op;
  const int pick = static_cast<int>(rng() % (depth > 0 ? 6 : 4));
  if (pick < 4) {
    const Op ops[] = {Op::GreaterOrEqual, Op::LessOrEqual, Op::Greater, Op::Less};
    return G::binary(ops[pick], G::variable(vars[rng() % vars.size()]), G::number(static_cast<double>(rng() % 3)));
  }
  if (pick == 4) return G::negate(random_guard(rng, vars, depth - 1));
  return G::binary(rng() % 2 ? Op::And : Op::Or, random_guard(rng, vars, depth - 1),
                   random_guard(rng, vars, depth - 1));
}

// 7. Deadlock search.
bool criterion_deadlock(std::string& detail) {
  Check check;
  const auto start = SteadyClock::now();
  const lre::Machine nominal = lre::nominal_machine();
  const lre::DeadlockResult good = lre::check_deadlock(nominal, lre::default_grid(nominal));
  const double nominal_s = seconds_since(start);
  check.expect(good.deadlock_free, "nominal machine deadlocks");
  check.expect(good.states_explored > 0 && good.states_explored < 100000,
               "statesExplored = " + std::to_string(good.states_explored));
  check.expect(nominal_s < 5.0, "nominal search took " + fmt(nominal_s, 2) + " s");

  const lre::Machine sink = lre::cam_sink_machine();
  const lre::DeadlockResult bad = lre::check_deadlock(sink, lre::default_grid(sink));
  check.expect(!bad.deadlock_free, "CAM sink reported deadlock free");
  check.expect(bad.witness && !bad.witness->empty() && bad.witness->back().state == "CAM",
               "CAM sink witness does not end in CAM");

  std::mt19937 rng(404);
  int machines = 0;
  int deadlocking = 0;
  for (int trial = 0; trial < 400; ++trial) {
    lre::Machine m;
    const int n_states = 1 + static_cast<int>(rng() % 4);
    for (int i = 0; i < n_states; ++i) m.states.push_back("S" + std::to_string(i));
    m.initial = "S0";
    m.events = {"a", "b"};
    lre::EnvGrid grid;
    // At most 8 environment points.
    const int shape = static_cast<int>(rng() % 4);
    if (shape == 0) grid.dims = {{"x", {0, 1, 2}}, {"y", {0, 2}}};
    if (shape == 1) grid.dims = {{"x", {0, 1}}, {"y", {0, 1}}, {"z", {0, 2}}};
    if (shape == 2) grid.dims = {{"x", {1}}, {"y", {0, 1, 2}}};
    if (shape == 3) grid.dims = {{"x", {0, 1, 2, 3, 4, 5, 6, 7}}};
    std::vector<std::string> vars;
    for (const auto& [name, _] : grid.dims) vars.push_back(name);
    const int n_transitions = static_cast<int>(rng() % 7);
    for (int i = 0; i < n_transitions; ++i) {
      lre::Transition t;
      t.id = "t" + std::to_string(i);
      t.source = m.states[rng() % m.states.size()];
      t.target = m.states[rng() % m.states.size()];
      const int trig = static_cast<int>(rng() % 3);
      if (trig == 1) t.trigger = "a";
      if (trig == 2) t.trigger = "b";
      if (rng() % 4 != 0) t.guard = random_guard(rng, vars, 2);
      m.transitions.push_back(t);
    }
    std::vector<lre::Environment> envs;
    for (std::size_t i = 0; i < grid.size(); ++i) envs.push_back(grid.at(i));
    const OracleResult expect = oracle_explore(m, envs);
    const lre::DeadlockResult got = lre::check_deadlock(m, grid);
    ++machines;
    const std::string tag = "machine " + std::to_string(trial);
    check.expect(got.outcome != lre::DeadlockResult::Outcome::Inconclusive, tag + " inconclusive");
    check.expect(got.deadlock_free == expect.stuck.empty(), tag + " verdict differs from the oracle");
    if (!expect.stuck.empty()) {
      ++deadlocking;
      check.expect(got.witness && expect.stuck.count(got.witness->back().state) == 1,
                   tag + " witness does not end in a stuck state");
      check.expect(got.witness && got.witness->front().state == m.initial, tag + " witness not from initial");
    }
  }
  const double elapsed = seconds_since(start);
  detail = "nominal: " + std::to_string(good.states_explored) + " states in " + fmt(nominal_s, 3) +
           " s; CAM sink deadlocks in CAM; " + std::to_string(machines) + " random machines (" +
           std::to_string(deadlocking) + " deadlocking) agree with the reference explorer; " + fmt(elapsed, 2) +
           " s" + check.summary();
  return check.ok();
}

// Reads the two connector tables from docs/wellformedness.md.
std::map<std::tuple<ConnectorKind, NodeKind, NodeKind>, bool> documented_matrix(Check& check) {
  std::map<std::tuple<ConnectorKind, NodeKind, NodeKind>, bool> out;
  std::istringstream doc(slurp(source_dir() / "docs/wellformedness.md"));
  std::string line;
  std::optional<ConnectorKind> section;
  std::vector<NodeKind> columns;
  auto cells_of = [](const std::string& row) {
    std::vector<std::string> cells;
    std::stringstream ss(row.substr(1));
    std::string cell;
    while (std::getline(ss, cell, '|')) {
      const auto b = cell.find_first_not_of(' ');
      const auto e = cell.find_last_not_of(' ');
      cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    return cells;
  };
  while (std::getline(doc, line)) {
    if (line.rfind("### ", 0) == 0) {
      section = parse_connector_kind(line.substr(4));
      columns.clear();
      continue;
    }
    if (line.rfind("## ", 0) == 0) {
      section.reset();
      continue;
    }
    if (!section || line.empty() || line[0] != '|' || line.rfind("|---", 0) == 0) continue;
    const auto cells = cells_of(line);
    if (cells.empty()) continue;
    if (cells[0].find('\\') != std::string::npos) {
      for (std::size_t i = 1; i < cells.size(); ++i) {
        const auto k = parse_node_kind(cells[i]);
        check.expect(k.has_value(), "unknown column " + cells[i]);
        if (k) columns.push_back(*k);
      }
      continue;
    }
    const auto source = parse_node_kind(cells[0]);
    check.expect(source.has_value(), "unknown row " + cells[0]);
    if (!source) continue;
    for (std::size_t i = 1; i < cells.size() && i - 1 < columns.size(); ++i) {
      check.expect(cells[i] == "yes" || cells[i] == "no", "bad cell " + cells[i]);
      out[{*section, *source, columns[i - 1]}] = cells[i] == "yes";
    }
  }
  return out;
}

AssuranceCase connector_case(ConnectorKind kind, NodeKind s, NodeKind t) {
  auto node = [](std::string id, NodeKind k) {
    ArgumentNode n = make_node(std::move(id), k);
    if (k == NodeKind::AwayGoal) n.away_target = NodeRef{"R", "RG"};
    if (k == NodeKind::AwayContext) n.away_target = NodeRef{"R", "RC"};
    if (k == NodeKind::AwaySolution) n.away_target = NodeRef{"R", "RS"};
    return n;
  };
  AssuranceCase c = single_module({node("A", s), node("B", t)}, {Connector{"K", kind, "A", "B"}});
  ArgumentModule r;
  r.id = "R";
  for (auto [id, k] : {std::pair{"RG", NodeKind::Goal}, std::pair{"RC", NodeKind::Context},
                       std::pair{"RS", NodeKind::Solution}}) {
    ArgumentNode n = make_node(id, k);
    n.is_public = true;
    r.nodes.push_back(n);
  }
  c.modules.push_back(r);
  return c;
}

// 8. Well-formedness matrix and cycle detection.
bool criterion_wellformedness(std::string& detail) {
  Check check;
  const auto table = documented_matrix(check);
  check.expect(table.size() == 2 * 9 * 9, "documented tables have " + std::to_string(table.size()) + " cells");
  int permitted = 0;
  for (ConnectorKind kind : {ConnectorKind::SupportedBy, ConnectorKind::InContextOf}) {
    for (NodeKind s : kAllNodeKinds) {
      for (NodeKind t : kAllNodeKinds) {
        const std::string tag = std::string(to_string(kind)) + " " + std::string(to_string(s)) + " -> " +
                                std::string(to_string(t));
        const auto it = table.find({kind, s, t});
        if (it == table.end()) {
          check.expect(false, tag + " missing from the documentation");
          continue;
        }
        permitted += it->second ? 1 : 0;
        check.expect(connector_permitted(kind, s, t) == it->second, tag + ": connector_permitted disagrees");
        const auto findings = check_wellformed(connector_case(kind, s, t));
        bool flagged = false;
        for (const auto& f : findings) {
          flagged |= f.code == FindingCode::E_CONN_TYPE && f.subject_id == "K";
          check.expect(f.code == FindingCode::E_CONN_TYPE || !f.is_error(),
                       tag + ": unexpected " + std::string(to_string(f.code)));
        }
        check.expect(flagged == !it->second, tag + ": check_wellformed disagrees");
      }
    }
  }

  std::mt19937 rng(808);
  int cycles = 0;
  for (int trial = 0; trial < 300; ++trial) {
    AssuranceCase c = random_dag(rng, 2 + static_cast<int>(rng() % 30));
    auto& m = c.modules[0];
    if (m.connectors.empty()) continue;
    check.expect(!has_errors(check_wellformed(c)), "random DAG " + std::to_string(trial) + " is not well formed");
    // Walk down from the source of a random connector and link back to it.
    const Connector start = m.connectors[rng() % m.connectors.size()];
    std::string cur = start.target;
    for (;;) {
      std::vector<std::string> kids;
      for (const auto& k : m.connectors) {
        if (k.source == cur) kids.push_back(k.target);
      }
      if (kids.empty() || rng() % 3 == 0) break;
      cur = kids[rng() % kids.size()];
    }
    m.connectors.push_back(supports("BACK", cur, start.source));
    bool cyclic = false;
    for (const auto& f : check_wellformed(c)) cyclic |= f.code == FindingCode::E_CYCLE;
    check.expect(cyclic, "back edge " + cur + " -> " + start.source + " in DAG " + std::to_string(trial) +
                             " not reported as E_CYCLE");
    ++cycles;
  }
  detail = "162 connector triples (" + std::to_string(permitted) + " permitted) match the documented tables; " +
           std::to_string(cycles) + " back edges all reported as E_CYCLE" + check.summary();
  return check.ok();
}

// 9. Client/server equivalence.
bool criterion_backend(std::string& detail) {
  Check check;
  formal::ServiceConfig config;
  config.port = 0;
  formal::BackendService service(config);
  service.start();
  const std::string endpoint = "http://127.0.0.1:" + std::to_string(service.port());
  std::mt19937 rng(909);
  int corrupted = 0;
  for (int i = 0; i < 50; ++i) {
    std::string text = formal::render(random_formal(rng));
    if (i % 2 == 1) {
      text = corrupt(text, rng);
      ++corrupted;
    }
    formal::BackendDiagnostics local;
    try {
      local = formal::check_integrity(formal::parse_formal(text));
    } catch (const ParseError&) {
      local = formal::check_text(text);
    }
    const formal::BackendDiagnostics remote = formal::submit_to_backend(endpoint, text);
    check.expect(remote == local, "document " + std::to_string(i) + " diagnostics differ");
    check.expect(formal::diagnostics_to_json(remote) == formal::diagnostics_to_json(local),
                 "document " + std::to_string(i) + " wire form differs");
  }
  service.stop();
  detail = "50 documents (" + std::to_string(corrupted) + " corrupted) match the local check" + check.summary();
  return check.ok();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<bool(std::string&)>>> criteria = {
      {"SPFM over the FMEDA table", criterion_spfm},
      {"obstacle reading range rule", criterion_reading_ranges},
      {"verdict propagation on the AUV bundle", criterion_propagation},
      {"golden formal export of the LRE module", criterion_golden},
      {"impact soundness under random artifact mutations", criterion_impact},
      {"runtime monitor latency", criterion_dsms},
      {"deadlock search", criterion_deadlock},
      {"well-formedness matrix and cycles", criterion_wellformedness},
      {"client/server checking equivalence", criterion_backend},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    std::string detail;
    bool ok = false;
    try {
      ok = criteria[i].second(detail);
    } catch (const std::exception& e) {
      detail = std::string("exception: ") + e.what();
    }
    failed += ok ? 0 : 1;
    std::cout << (ok ? "[PASS] " : "[FAIL] ") << (i + 1) << ": " << criteria[i].first << ": " << detail
              << std::endl;
  }
  return failed == 0 ? 0 : 1;
}
