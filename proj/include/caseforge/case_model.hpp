// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

// Assurance-case data model: GSN argument modules over SACM-style artifact
// packages, plus the case-file reader/writer and well-formedness rules.

#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "caseforge/util.hpp"

namespace caseforge {

enum class NodeKind {
  Goal,
  Strategy,
  Solution,
  Context,
  Assumption,
  Justification,
  AwayGoal,
  AwayContext,
  AwaySolution,
};

inline constexpr NodeKind kAllNodeKinds[] = {
    NodeKind::Goal,          NodeKind::Strategy,   NodeKind::Solution,
    NodeKind::Context,       NodeKind::Assumption, NodeKind::Justification,
    NodeKind::AwayGoal,      NodeKind::AwayContext, NodeKind::AwaySolution,
};

enum class Declaration { None, Axiomatic, Assumed, NeedsSupport, Asserted };

enum class ConnectorKind { SupportedBy, InContextOf };

enum class ArtifactKind { Tabular, Tree, Text, Theory };

std::string_view to_string(NodeKind kind);
std::string_view to_string(Declaration decl);
std::string_view to_string(ConnectorKind kind);
std::string_view to_string(ArtifactKind kind);

std::optional<NodeKind> parse_node_kind(std::string_view text);
std::optional<Declaration> parse_declaration(std::string_view text);
std::optional<ConnectorKind> parse_connector_kind(std::string_view text);
std::optional<ArtifactKind> parse_artifact_kind(std::string_view text);

bool is_away(NodeKind kind);
bool is_contextual(NodeKind kind);  // Context, Assumption, Justification
/// The kind an away node must resolve to (AwayGoal -> Goal, ...).
std::optional<NodeKind> away_referent_kind(NodeKind kind);

struct NodeRef {
  std::string module;
  std::string node;

  bool operator==(const NodeRef&) const = default;
  auto operator<=>(const NodeRef&) const = default;
};

struct ArgumentNode {
  std::string id;
  NodeKind kind = NodeKind::Goal;
  std::string description;
  bool undeveloped = false;
  bool is_public = false;
  Declaration declaration = Declaration::None;
  std::vector<std::string> citations;  // ArtifactRecord ids
  std::optional<NodeRef> away_target;

  bool operator==(const ArgumentNode&) const = default;
};

struct Connector {
  std::string id;
  ConnectorKind kind = ConnectorKind::SupportedBy;
  std::string source;  // supported / contextualised element
  std::string target;  // supporting / contextual element

  bool operator==(const Connector&) const = default;
};

struct ArgumentModule {
  std::string id;
  std::vector<ArgumentNode> nodes;
  std::vector<Connector> connectors;

  const ArgumentNode* find_node(std::string_view node_id) const;

  bool operator==(const ArgumentModule&) const = default;
};

struct ConstraintRecord {
  std::string id;
  std::string language = "cql";
  std::string body;

  bool operator==(const ConstraintRecord&) const = default;
};

struct ArtifactRecord {
  std::string id;
  ArtifactKind kind = ArtifactKind::Text;
  std::string document_path;
  std::map<std::string, std::string> metadata;
  std::vector<ConstraintRecord> constraints;

  bool operator==(const ArtifactRecord&) const = default;
};

struct ArtifactPackage {
  std::string id;
  std::vector<ArtifactRecord> artifacts;

  bool operator==(const ArtifactPackage&) const = default;
};

/// Module-level support: `source` is supported by `target`.
struct ModuleSupport {
  std::string source;
  std::string target;

  bool operator==(const ModuleSupport&) const = default;
  auto operator<=>(const ModuleSupport&) const = default;
};

struct AssuranceCase {
  std::string case_id;
  std::vector<ArgumentModule> modules;
  std::vector<ArtifactPackage> artifact_packages;
  std::vector<ModuleSupport> inter_module_supports;

  const ArgumentModule* find_module(std::string_view module_id) const;
  /// Case-wide node lookup; returns the owning module too.
  std::optional<std::pair<const ArgumentModule*, const ArgumentNode*>> find_node(
      std::string_view node_id) const;
  const ArtifactRecord* find_artifact(std::string_view artifact_id) const;
  std::vector<const ArtifactRecord*> all_artifacts() const;

  bool operator==(const AssuranceCase&) const = default;
};

/// Case-structure error: dangling or duplicate ids, unresolved away nodes.
class CaseError : public std::runtime_error {
 public:
  CaseError(std::string code, std::string subject, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)), subject_(std::move(subject)) {}

  const std::string& code() const { return code_; }
  const std::string& subject() const { return subject_; }

 private:
  std::string code_;
  std::string subject_;
};

/// Document is valid JSON but violates the case-file schema.
class SchemaError : public std::runtime_error {
 public:
  SchemaError(std::string path, const std::string& message)
      : std::runtime_error(path + ": " + message), path_(std::move(path)) {}

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

enum class FindingCode {
  E_CONN_TYPE,
  E_CYCLE,
  E_DANGLING_REF,
  E_AWAY_UNRESOLVED,
  E_DUP_ID,
  W_UNDEVELOPED,
};

std::string_view to_string(FindingCode code);

struct WellformednessFinding {
  FindingCode code;
  std::string subject_id;
  std::string message;

  bool is_error() const { return code != FindingCode::W_UNDEVELOPED; }
  bool operator==(const WellformednessFinding&) const = default;
};

/// Parses a UTF-8 case document. Throws ParseError (syntax), SchemaError
/// (shape, unknown keys) or CaseError (E_DUP_ID / E_DANGLING_REF).
AssuranceCase parse_case(std::string_view text);
AssuranceCase load_case(const std::filesystem::path& path);

/// Canonical, deterministic rendering (modules, nodes, connectors, packages
/// and artifacts sorted by id).
std::string serialize_case(const AssuranceCase& c);

/// Returns a copy with every id-keyed collection sorted.
AssuranceCase canonicalize(AssuranceCase c);

/// The connector type matrix.
bool connector_permitted(ConnectorKind kind, NodeKind source, NodeKind target);

std::vector<WellformednessFinding> check_wellformed(const AssuranceCase& c);
bool has_errors(const std::vector<WellformednessFinding>& findings);

/// Resolves an away node to the public node it references. Throws CaseError
/// with code E_AWAY_UNRESOLVED.
NodeRef resolve_away(const AssuranceCase& c, std::string_view node_id);

}  // namespace caseforge
