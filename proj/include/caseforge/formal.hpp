// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

// Formal rendering of argument modules (Claim / ArtifactReference /
// Inference / Context statements), its parser, the integrity checker, and the
// HTTP client and server for the checking backend.

#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "caseforge/case_model.hpp"
#include "caseforge/util.hpp"

namespace caseforge::formal {

enum class RefKind { Claim, ArtifactReference, Inference };

std::string_view to_string(RefKind kind);

struct Reference {
  RefKind kind = RefKind::Claim;
  std::string name;

  bool operator==(const Reference&) const = default;
};

struct ClaimStmt {
  std::string name;
  Declaration declaration = Declaration::None;
  std::string description;

  bool operator==(const ClaimStmt&) const = default;
};

struct ArtifactReferenceStmt {
  std::string name;
  std::string description;

  bool operator==(const ArtifactReferenceStmt&) const = default;
};

/// Each target is supported by the sources.
struct InferenceStmt {
  std::string name;
  std::vector<Reference> sources;
  std::vector<Reference> targets;
  std::string description;

  bool operator==(const InferenceStmt&) const = default;
};

/// The sources are context for the targets.
struct ContextStmt {
  std::string name;
  std::vector<Reference> sources;
  std::vector<Reference> targets;
  std::string description;

  bool operator==(const ContextStmt&) const = default;
};

/// Outcome attached by an external checker (the deadlock search, for one).
struct VerdictStmt {
  std::string name;
  bool pass = true;
  std::string description;

  bool operator==(const VerdictStmt&) const = default;
};

struct Statement {
  std::size_t line = 0;
  std::variant<ClaimStmt, ArtifactReferenceStmt, InferenceStmt, ContextStmt, VerdictStmt> body;

  const std::string& name() const;
  bool operator==(const Statement&) const = default;
};

struct FormalDocument {
  std::vector<Statement> statements;

  bool operator==(const FormalDocument&) const = default;
};

class ExportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ExportResult {
  FormalDocument document;
  std::string text;
};

/// Renders one module. Throws ExportError for an unknown module or a
/// strategy with no incoming SupportedBy.
ExportResult export_module(const AssuranceCase& c, std::string_view module_id);

/// One statement per line, in document order.
std::string render(const FormalDocument& doc);

/// Throws ParseError with the position of the first syntax error.
FormalDocument parse_formal(std::string_view text);

// ---------------------------------------------------------------------------
// Diagnostics

enum class Severity { Error, Warning };

struct DiagnosticEntry {
  std::string id;  // statement or referenced name; "syntax" for parse failures
  Severity severity = Severity::Error;
  std::string message;
  std::optional<std::size_t> line;

  bool operator==(const DiagnosticEntry&) const = default;
};

struct BackendDiagnostics {
  bool ok = true;
  std::vector<DiagnosticEntry> entries;

  bool operator==(const BackendDiagnostics&) const = default;
};

BackendDiagnostics check_integrity(const FormalDocument& doc);

/// Parses and checks; a syntax error becomes a single error entry.
BackendDiagnostics check_text(std::string_view text);

/// Wire format: {"ok": bool, "entries": [{"id", "severity", "message", "line"?}]}
std::string diagnostics_to_json(const BackendDiagnostics& d);
/// Throws ParseError when the body does not follow the wire format.
BackendDiagnostics diagnostics_from_json(std::string_view body);

// ---------------------------------------------------------------------------
// Transport

/// Network failure or non-conforming response; distinct from a failed check.
class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// POSTs `text` to `<endpoint>/check`. `endpoint` is "http://host:port" with
/// an optional path prefix.
BackendDiagnostics submit_to_backend(const std::string& endpoint, std::string_view text,
                                     int timeout_ms = 10000);

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks a free port
  std::size_t max_body_bytes = 4u << 20;
};

/// Parses "host:port" (or ":port", "port").
ServiceConfig parse_bind_address(std::string_view address);

/// The bundled checking service. Stateless across requests.
class BackendService {
 public:
  explicit BackendService(ServiceConfig config);
  ~BackendService();

  BackendService(const BackendService&) = delete;
  BackendService& operator=(const BackendService&) = delete;

  /// Binds and starts serving on a background thread. Throws IoError when
  /// the address cannot be bound.
  void start();
  /// Binds and serves on the calling thread until stop() is called.
  void serve();
  void stop();
  /// Bound port, valid after start().
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace caseforge::formal
