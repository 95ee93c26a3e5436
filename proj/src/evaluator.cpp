// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "caseforge/evaluator.hpp"

#include <functional>
#include <set>

#include "caseforge/cql.hpp"
#include "caseforge/formal.hpp"
#include "json.hpp"

namespace caseforge {

namespace {

using ojson = nlohmann::ordered_json;

std::string position_suffix(SourcePos p) {
  return " (at " + std::to_string(p.line) + ":" + std::to_string(p.column) + ")";
}

void fail(ArtifactResult& r, ReasonCode code, std::string message) {
  // Missing beats error beats failed.
  auto rank = [](ReasonCode c) {
    return c == ReasonCode::R_ARTIFACT_MISSING ? 0 : c == ReasonCode::R_CONSTRAINT_ERROR ? 1 : 2;
  };
  r.passed = false;
  if (!r.failure || rank(code) < rank(*r.failure)) {
    r.failure = code;
    r.message = std::move(message);
  }
}

void run_theory_check(const ArtifactRecord& record, const ArtifactView& view,
                      const std::optional<std::string>& backend, ArtifactResult& r) {
  formal::BackendDiagnostics diags;
  try {
    diags = backend ? formal::submit_to_backend(*backend, view.raw_bytes)
                    : formal::check_text(view.raw_bytes);
  } catch (const formal::TransportError& e) {
    r.constraints["$check"] = {false, e.what()};
    fail(r, ReasonCode::R_CONSTRAINT_ERROR, e.what());
    return;
  }
  r.constraints["$check"] = {diags.ok, std::nullopt};
  if (!diags.ok) {
    std::string msg = "theory '" + record.document_path + "' failed the integrity check";
    for (const auto& e : diags.entries) {
      if (e.severity == formal::Severity::Error) msg += "; " + e.message;
    }
    fail(r, ReasonCode::R_CONSTRAINT_FAILED, msg);
  }
}

bool terminates_support(Declaration d) {
  return d == Declaration::Assumed || d == Declaration::Axiomatic;
}

}  // namespace

std::string_view to_string(Status s) {
  switch (s) {
    case Status::Valid: return "valid";
    case Status::Invalid: return "invalid";
    case Status::NeedsSupport: return "needsSupport";
    case Status::NotEvaluated: return "notEvaluated";
  }
  return "?";
}

std::string_view to_string(ReasonCode code) {
  switch (code) {
    case ReasonCode::R_CONSTRAINT_FAILED: return "R_CONSTRAINT_FAILED";
    case ReasonCode::R_CONSTRAINT_ERROR: return "R_CONSTRAINT_ERROR";
    case ReasonCode::R_ARTIFACT_MISSING: return "R_ARTIFACT_MISSING";
    case ReasonCode::R_CHILD_INVALID: return "R_CHILD_INVALID";
    case ReasonCode::R_UNDEVELOPED: return "R_UNDEVELOPED";
    case ReasonCode::R_AWAY_INVALID: return "R_AWAY_INVALID";
    case ReasonCode::R_NO_SUPPORT: return "R_NO_SUPPORT";
  }
  return "?";
}

ArtifactResult evaluate_view(const ArtifactRecord& record, const ArtifactView& view,
                             const std::optional<std::string>& backend) {
  ArtifactResult r;
  r.artifact_id = record.id;
  r.passed = true;
  if (record.kind == ArtifactKind::Theory) {
    run_theory_check(record, view, backend, r);
  }
  for (const ConstraintRecord& cr : record.constraints) {
    if (cr.language != "cql") {
      const std::string msg = "constraint '" + cr.id + "': unsupported language '" + cr.language + "'";
      r.constraints[cr.id] = {false, msg};
      fail(r, ReasonCode::R_CONSTRAINT_ERROR, msg);
      continue;
    }
    cql::QueryProgram program;
    try {
      program = cql::parse_query(cr.body);
    } catch (const ParseError& e) {
      const std::string msg = "constraint '" + cr.id + "': " + e.what() + position_suffix(e.position());
      r.constraints[cr.id] = {false, msg};
      fail(r, ReasonCode::R_CONSTRAINT_ERROR, msg);
      continue;
    }
    const cql::EvalResult result = cql::eval_constraint(program, view);
    if (!result.diagnostics.ok) {
      const std::string msg = "constraint '" + cr.id + "': " + result.diagnostics.message +
                              position_suffix(*result.diagnostics.position);
      r.constraints[cr.id] = {false, msg};
      fail(r, ReasonCode::R_CONSTRAINT_ERROR, msg);
      continue;
    }
    const bool passed = std::get<bool>(*result.value);
    r.constraints[cr.id] = {passed, std::nullopt};
    if (!passed) fail(r, ReasonCode::R_CONSTRAINT_FAILED, "constraint '" + cr.id + "' returned false");
  }
  return r;
}

ArtifactResult evaluate_artifact(const ArtifactRecord& record, const EvalOptions& options) {
  ArtifactView view;
  try {
    view = load_artifact(record, options.root);
  } catch (const ArtifactError& e) {
    ArtifactResult r;
    r.artifact_id = record.id;
    r.constraints["$load"] = {false, e.what()};
    fail(r,
         e.kind() == ArtifactError::Kind::Malformed ? ReasonCode::R_CONSTRAINT_ERROR
                                                    : ReasonCode::R_ARTIFACT_MISSING,
         e.what());
    return r;
  }
  return evaluate_view(record, view, options.backend);
}

EvaluationReport propagate(const AssuranceCase& c, std::map<std::string, ArtifactResult> results) {
  EvaluationReport report;
  report.case_id = c.case_id;
  report.evaluated_at = utc_now();

  // Outgoing edges per node id, in connector order.
  std::map<std::string, std::vector<const Connector*>> outgoing;
  for (const ArgumentModule& m : c.modules) {
    for (const Connector& k : m.connectors) outgoing[k.source].push_back(&k);
  }

  std::set<std::string> in_progress;
  std::function<const NodeVerdict&(const ArgumentNode&)> verdict_of;
  verdict_of = [&](const ArgumentNode& node) -> const NodeVerdict& {
    if (auto it = report.verdicts.find(node.id); it != report.verdicts.end()) return it->second;
    NodeVerdict v;
    v.node_id = node.id;
    if (!in_progress.insert(node.id).second) {
      // Only reachable on cyclic input, which check_wellformed rejects.
      v.status = Status::Invalid;
      v.reasons.push_back({ReasonCode::R_CHILD_INVALID, "argument cycle through '" + node.id + "'"});
      return report.verdicts[node.id] = std::move(v);
    }

    for (const std::string& cited : node.citations) {
      auto it = results.find(cited);
      if (it == results.end()) {
        v.reasons.push_back({ReasonCode::R_ARTIFACT_MISSING, "cited artifact '" + cited + "' not evaluated"});
      } else if (!it->second.passed) {
        v.reasons.push_back({*it->second.failure, "artifact '" + cited + "': " + it->second.message});
      }
    }

    if (node.declaration == Declaration::NeedsSupport) {
      v.reasons.push_back({ReasonCode::R_NO_SUPPORT, "declared needsSupport"});
    }

    if (is_away(node.kind)) {
      try {
        const NodeRef ref = resolve_away(c, node.id);
        const ArgumentNode* target = c.find_module(ref.module)->find_node(ref.node);
        const NodeVerdict& tv = verdict_of(*target);
        if (tv.status != Status::Valid) {
          v.reasons.push_back({ReasonCode::R_AWAY_INVALID, "referenced node " + ref.module + "/" +
                                                               ref.node + " is " +
                                                               std::string(to_string(tv.status))});
        }
      } catch (const CaseError& e) {
        v.reasons.push_back({ReasonCode::R_AWAY_INVALID, e.what()});
      }
    } else if (node.kind == NodeKind::Goal || node.kind == NodeKind::Strategy) {
      std::size_t supports = 0;
      for (const Connector* k : outgoing[node.id]) {
        auto found = c.find_node(k->target);
        if (!found) continue;
        if (k->kind == ConnectorKind::SupportedBy) ++supports;
        const NodeVerdict& child = verdict_of(*found->second);
        if (child.status != Status::Valid) {
          v.reasons.push_back({ReasonCode::R_CHILD_INVALID,
                               std::string(k->kind == ConnectorKind::SupportedBy ? "supporting"
                                                                                 : "context")
                                   + " node '" + k->target + "' is " + std::string(to_string(child.status))});
        }
      }
      // Declaring an undeveloped goal assumed or axiomatic discharges it.
      if (node.undeveloped && !terminates_support(node.declaration)) {
        v.reasons.push_back({ReasonCode::R_UNDEVELOPED, "'" + node.id + "' is undeveloped"});
      } else if (supports == 0 &&
                 (node.kind == NodeKind::Strategy || !terminates_support(node.declaration))) {
        v.reasons.push_back({ReasonCode::R_NO_SUPPORT, "'" + node.id + "' has no supporting node"});
      }
    } else if (node.citations.empty() && node.declaration == Declaration::None) {
      v.reasons.push_back({ReasonCode::R_NO_SUPPORT, "'" + node.id + "' cites no artifact"});
    }

    v.status = Status::Valid;
    for (const Reason& r : v.reasons) {
      const bool soft = r.code == ReasonCode::R_UNDEVELOPED || r.code == ReasonCode::R_NO_SUPPORT;
      if (!soft) {
        v.status = Status::Invalid;
        break;
      }
      v.status = Status::NeedsSupport;
    }
    in_progress.erase(node.id);
    return report.verdicts[node.id] = std::move(v);
  };

  report.case_valid = true;
  for (const ArgumentModule& m : c.modules) {
    bool module_valid = true;
    for (const ArgumentNode& n : m.nodes) {
      const NodeVerdict& v = verdict_of(n);
      if (n.is_public && n.kind == NodeKind::Goal && v.status != Status::Valid) module_valid = false;
    }
    report.modules[m.id] = module_valid;
    report.case_valid = report.case_valid && module_valid;
  }
  report.artifact_results = std::move(results);
  return report;
}

EvaluationReport evaluate_case(const AssuranceCase& c, const EvalOptions& options) {
  std::map<std::string, ArtifactResult> results;
  for (const ArtifactRecord* record : c.all_artifacts()) {
    results[record->id] = evaluate_artifact(*record, options);
  }
  return propagate(c, std::move(results));
}

std::string report_to_json(const EvaluationReport& report) {
  ojson j;
  j["caseId"] = report.case_id;
  j["caseValid"] = report.case_valid;
  j["evaluatedAt"] = report.evaluated_at;
  ojson verdicts = ojson::object();
  for (const auto& [id, v] : report.verdicts) {
    ojson reasons = ojson::array();
    for (const Reason& r : v.reasons) {
      reasons.push_back({{"code", to_string(r.code)}, {"message", r.message}});
    }
    verdicts[id] = {{"status", to_string(v.status)}, {"reasons", std::move(reasons)}};
  }
  j["verdicts"] = std::move(verdicts);
  ojson artifacts = ojson::object();
  for (const auto& [id, r] : report.artifact_results) {
    ojson constraints = ojson::object();
    for (const auto& [cid, outcome] : r.constraints) {
      if (outcome.error) {
        constraints[cid] = {{"error", *outcome.error}};
      } else {
        constraints[cid] = outcome.passed;
      }
    }
    artifacts[id] = std::move(constraints);
  }
  j["artifactResults"] = std::move(artifacts);
  ojson modules = ojson::object();
  for (const auto& [id, valid] : report.modules) modules[id] = valid;
  j["modules"] = std::move(modules);
  return j.dump(2) + "\n";
}

}  // namespace caseforge
