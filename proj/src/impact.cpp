// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "caseforge/impact.hpp"

#include <set>

#include "caseforge/artifact_store.hpp"
#include "json.hpp"

namespace caseforge {

namespace {

using ojson = nlohmann::ordered_json;

}  // namespace

Baseline snapshot(const AssuranceCase& c, const std::filesystem::path& root) {
  Baseline b;
  b.case_id = c.case_id;
  b.created_at = utc_now();
  std::vector<std::string> offenders;
  std::string detail;
  for (const ArtifactRecord* record : c.all_artifacts()) {
    try {
      b.fingerprints[record->id] = fingerprint(*record, root).digest;
    } catch (const ArtifactError& e) {
      offenders.push_back(record->id);
      detail += std::string("\n  ") + e.what();
    }
  }
  if (!offenders.empty()) {
    std::string names;
    for (const auto& o : offenders) names += (names.empty() ? "" : ", ") + o;
    throw SnapshotError(offenders, "cannot fingerprint " + names + detail);
  }
  return b;
}

std::vector<std::string> impacted_by(const AssuranceCase& c,
                                     const std::vector<std::string>& artifact_ids) {
  const std::set<std::string> artifacts(artifact_ids.begin(), artifact_ids.end());

  // parents[x] = nodes whose verdict depends on x.
  std::map<std::string, std::set<std::string>> parents;
  for (const ArgumentModule& m : c.modules) {
    for (const Connector& k : m.connectors) parents[k.target].insert(k.source);
    for (const ArgumentNode& n : m.nodes) {
      if (!is_away(n.kind)) continue;
      try {
        parents[resolve_away(c, n.id).node].insert(n.id);
      } catch (const CaseError&) {
        // Unresolved away nodes depend on nothing that can change.
      }
    }
  }

  std::set<std::string> impacted;
  std::vector<std::string> work;
  for (const ArgumentModule& m : c.modules) {
    for (const ArgumentNode& n : m.nodes) {
      for (const std::string& cited : n.citations) {
        if (artifacts.count(cited) && impacted.insert(n.id).second) work.push_back(n.id);
      }
    }
  }
  while (!work.empty()) {
    const std::string node = work.back();
    work.pop_back();
    for (const std::string& p : parents[node]) {
      if (impacted.insert(p).second) work.push_back(p);
    }
  }

  // Kahn's algorithm over the impacted subgraph, smallest id first.
  std::map<std::string, int> pending;  // impacted children not yet emitted
  for (const std::string& n : impacted) pending[n];
  for (const std::string& n : impacted) {
    for (const std::string& p : parents[n]) {
      if (impacted.count(p)) ++pending[p];
    }
  }
  std::set<std::string> ready;
  for (const auto& [n, count] : pending) {
    if (count == 0) ready.insert(n);
  }
  std::vector<std::string> order;
  while (!ready.empty()) {
    const std::string n = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(n);
    pending.erase(n);
    for (const std::string& p : parents[n]) {
      auto it = pending.find(p);
      if (it != pending.end() && --it->second == 0) ready.insert(p);
    }
  }
  // Cyclic leftovers (ill-formed cases only) in id order.
  for (const auto& [n, _] : pending) order.push_back(n);
  return order;
}

ImpactReport impact_of(const AssuranceCase& c, const Baseline& baseline,
                       const std::filesystem::path& root) {
  if (baseline.case_id != c.case_id) {
    throw std::invalid_argument("baseline belongs to case '" + baseline.case_id + "', not '" +
                                c.case_id + "'");
  }
  ImpactReport report;
  std::set<std::string> current;
  for (const ArtifactRecord* record : c.all_artifacts()) {
    current.insert(record->id);
    auto it = baseline.fingerprints.find(record->id);
    if (it == baseline.fingerprints.end()) {
      report.added_artifacts.push_back(record->id);
      continue;
    }
    std::string digest;
    try {
      digest = fingerprint(*record, root).digest;
    } catch (const ArtifactError&) {
      // An unreadable document counts as changed.
    }
    if (digest != it->second) report.changed_artifacts.push_back(record->id);
  }
  for (const auto& [id, _] : baseline.fingerprints) {
    if (!current.count(id)) report.removed_artifacts.push_back(id);
  }
  std::sort(report.changed_artifacts.begin(), report.changed_artifacts.end());
  std::sort(report.added_artifacts.begin(), report.added_artifacts.end());

  std::vector<std::string> touched = report.changed_artifacts;
  touched.insert(touched.end(), report.added_artifacts.begin(), report.added_artifacts.end());
  touched.insert(touched.end(), report.removed_artifacts.begin(), report.removed_artifacts.end());
  report.impacted_nodes = impacted_by(c, touched);
  return report;
}

std::string baseline_to_json(const Baseline& b) {
  ojson j;
  j["caseId"] = b.case_id;
  j["createdAt"] = b.created_at;
  j["fingerprints"] = ojson::object();
  for (const auto& [id, digest] : b.fingerprints) j["fingerprints"][id] = digest;
  return j.dump(2) + "\n";
}

Baseline baseline_from_json(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text.begin(), text.end());
  } catch (const ojson::parse_error& e) {
    throw ParseError(e.what(), pos_from_offset(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  if (!j.is_object()) throw SchemaError("$", "baseline must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "caseId" && key != "createdAt" && key != "fingerprints") {
      throw SchemaError("$." + key, "unknown key");
    }
  }
  Baseline b;
  if (!j.contains("caseId") || !j["caseId"].is_string()) throw SchemaError("$.caseId", "must be a string");
  if (!j.contains("createdAt") || !j["createdAt"].is_string()) {
    throw SchemaError("$.createdAt", "must be a string");
  }
  if (!j.contains("fingerprints") || !j["fingerprints"].is_object()) {
    throw SchemaError("$.fingerprints", "must be an object");
  }
  b.case_id = j["caseId"].get<std::string>();
  b.created_at = j["createdAt"].get<std::string>();
  for (const auto& [id, digest] : j["fingerprints"].items()) {
    if (!digest.is_string() || digest.get<std::string>().size() != 64) {
      throw SchemaError("$.fingerprints." + id, "must be a 64-character hex digest");
    }
    b.fingerprints[id] = digest.get<std::string>();
  }
  return b;
}

std::string impact_to_json(const ImpactReport& r) {
  ojson j;
  j["changedArtifacts"] = r.changed_artifacts;
  j["addedArtifacts"] = r.added_artifacts;
  j["removedArtifacts"] = r.removed_artifacts;
  j["impactedNodes"] = r.impacted_nodes;
  return j.dump(2) + "\n";
}

}  // namespace caseforge
