// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "caseforge/artifact_store.hpp"
#include "caseforge/case_model.hpp"

namespace caseforge {

enum class Status { Valid, Invalid, NeedsSupport, NotEvaluated };

enum class ReasonCode {
  R_CONSTRAINT_FAILED,
  R_CONSTRAINT_ERROR,
  R_ARTIFACT_MISSING,
  R_CHILD_INVALID,
  R_UNDEVELOPED,
  R_AWAY_INVALID,
  R_NO_SUPPORT,
};

std::string_view to_string(Status s);
std::string_view to_string(ReasonCode code);

struct Reason {
  ReasonCode code;
  std::string message;

  bool operator==(const Reason&) const = default;
};

struct NodeVerdict {
  std::string node_id;
  Status status = Status::NotEvaluated;
  std::vector<Reason> reasons;

  bool operator==(const NodeVerdict&) const = default;
};

/// One constraint's outcome: passed, failed, or errored.
struct ConstraintOutcome {
  bool passed = false;
  std::optional<std::string> error;

  bool operator==(const ConstraintOutcome&) const = default;
};

struct ArtifactResult {
  std::string artifact_id;
  bool passed = false;
  /// Set iff !passed: R_ARTIFACT_MISSING, R_CONSTRAINT_ERROR or R_CONSTRAINT_FAILED.
  std::optional<ReasonCode> failure;
  std::string message;
  /// Keyed by constraint id. A document that fails to load is recorded under
  /// "$load"; the backend check of a theory artifact under "$check".
  std::map<std::string, ConstraintOutcome> constraints;

  bool operator==(const ArtifactResult&) const = default;
};

struct EvaluationReport {
  std::string case_id;
  bool case_valid = false;
  std::string evaluated_at;
  std::map<std::string, NodeVerdict> verdicts;
  std::map<std::string, ArtifactResult> artifact_results;
  std::map<std::string, bool> modules;
};

struct EvalOptions {
  std::filesystem::path root = ".";
  /// Checking backend for theory artifacts; local integrity check if unset.
  std::optional<std::string> backend;
};

ArtifactResult evaluate_artifact(const ArtifactRecord& record, const EvalOptions& options);

/// Same, over a view that is already in memory.
ArtifactResult evaluate_view(const ArtifactRecord& record, const ArtifactView& view,
                             const std::optional<std::string>& backend);

/// Evaluates every artifact, then propagates validity through the argument.
EvaluationReport evaluate_case(const AssuranceCase& c, const EvalOptions& options);

/// Propagation only. Artifacts absent from `results` count as missing.
EvaluationReport propagate(const AssuranceCase& c, std::map<std::string, ArtifactResult> results);

/// {"caseId", "caseValid", "evaluatedAt", "verdicts", "artifactResults", "modules"}
std::string report_to_json(const EvaluationReport& report);

}  // namespace caseforge
