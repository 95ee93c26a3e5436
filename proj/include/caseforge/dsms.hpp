// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

// Runtime monitor: ingests NDJSON obstacle readings, writes them into the
// runtime model document, and periodically re-evaluates the part of the case
// that depends on dynamic artifacts.

#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "caseforge/case_model.hpp"

namespace caseforge::dsms {

struct MonitorConfig {
  int interval_ms = 50;
  /// "file:PATH" (tail an NDJSON file) or "tcp:PORT" (0 picks a free port).
  std::string ingest;
  std::filesystem::path status_path;
  std::filesystem::path root = ".";
  /// Empty: every artifact whose metadata has dynamic=true.
  std::vector<std::string> dynamic_artifact_ids;
  std::optional<std::string> backend;
};

struct RuntimeRecord {
  long long seq = 0;
  std::string received_at;
  std::map<std::string, double> payload;
};

struct StatusSnapshot {
  std::string timestamp;
  bool case_valid = true;
  std::vector<std::string> failed_nodes;
  long long last_seq = 0;
  std::uint64_t evaluation_count = 0;
  bool degraded = false;
  std::uint64_t rejected_records = 0;
};

std::string status_to_json(const StatusSnapshot& s);

/// Parses one NDJSON line: {"seq": int, "ns_rel_dist": num, ..., "obs_roc": num}.
/// Returns nullopt when the line is malformed or a field is missing.
std::optional<RuntimeRecord> parse_record(std::string_view line);

class Monitor {
 public:
  /// Throws std::invalid_argument for a bad configuration (no dynamic
  /// artifacts, no driver target, interval < 1, unknown ingest scheme).
  Monitor(AssuranceCase c, MonitorConfig config);
  ~Monitor();

  Monitor(const Monitor&) = delete;
  Monitor& operator=(const Monitor&) = delete;

  /// Runs the first evaluation synchronously, then starts the ingest and
  /// tick threads. Throws IoError if the TCP port cannot be bound.
  void start();
  void stop();

  StatusSnapshot current_status() const;
  /// Called on the tick thread after every published snapshot.
  void set_observer(std::function<void(const StatusSnapshot&)> observer);
  /// Bound TCP port for "tcp:" ingestion, else -1.
  int tcp_port() const;

  /// Applies one NDJSON record as if it had arrived on the ingest channel.
  /// Returns false when the record is rejected.
  bool ingest_line(std::string_view line);

  /// Nodes re-evaluated each tick.
  const std::vector<std::string>& dynamic_subset() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace caseforge::dsms
