// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "caseforge/case_model.hpp"

namespace caseforge {

struct Baseline {
  std::string case_id;
  std::string created_at;
  std::map<std::string, std::string> fingerprints;  // artifact id -> SHA-256 hex

  bool operator==(const Baseline&) const = default;
};

struct ImpactReport {
  std::vector<std::string> changed_artifacts;
  std::vector<std::string> added_artifacts;
  std::vector<std::string> removed_artifacts;
  /// Child before parent.
  std::vector<std::string> impacted_nodes;

  bool empty() const {
    return changed_artifacts.empty() && added_artifacts.empty() && removed_artifacts.empty();
  }
};

/// Some artifacts could not be fingerprinted.
class SnapshotError : public std::runtime_error {
 public:
  SnapshotError(std::vector<std::string> offenders, const std::string& message)
      : std::runtime_error(message), offenders_(std::move(offenders)) {}

  const std::vector<std::string>& offenders() const { return offenders_; }

 private:
  std::vector<std::string> offenders_;
};

Baseline snapshot(const AssuranceCase& c, const std::filesystem::path& root);

/// Throws std::invalid_argument when the baseline belongs to another case.
ImpactReport impact_of(const AssuranceCase& c, const Baseline& baseline,
                       const std::filesystem::path& root);

/// Nodes affected by the given artifacts, closed upward, child before parent.
std::vector<std::string> impacted_by(const AssuranceCase& c, const std::vector<std::string>& artifact_ids);

std::string baseline_to_json(const Baseline& b);
/// Throws ParseError or SchemaError.
Baseline baseline_from_json(std::string_view text);

std::string impact_to_json(const ImpactReport& r);

}  // namespace caseforge
