// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "caseforge/case_model.hpp"

namespace caseforge {

/// Attribute value of a loaded element. Tabular cells are always text.
using Scalar = std::variant<bool, double, std::string>;

struct Element;
using ElementPtr = std::shared_ptr<const Element>;

struct ChildSlot {
  bool is_list = false;
  std::vector<ElementPtr> items;
};

/// One typed node of a loaded artifact.
struct Element {
  std::string type_name;  // empty for untyped nested objects
  std::map<std::string, Scalar> attributes;
  std::map<std::string, ChildSlot> children;
};

/// Uniform, read-only view over a loaded artifact. `elements` lists every
/// typed element in document order; it is empty for text and theory kinds.
struct ArtifactView {
  std::string artifact_id;
  ArtifactKind kind = ArtifactKind::Text;
  std::vector<ElementPtr> elements;
  std::string raw_bytes;

  std::vector<ElementPtr> all_of_type(std::string_view type_name) const;
};

struct Fingerprint {
  std::string artifact_id;
  std::string digest;  // lowercase hex SHA-256

  bool operator==(const Fingerprint&) const = default;
};

class ArtifactError : public std::runtime_error {
 public:
  enum class Kind { Missing, PathEscape, Malformed };

  ArtifactError(Kind kind, std::string artifact_id, const std::string& message)
      : std::runtime_error(message), kind_(kind), artifact_id_(std::move(artifact_id)) {}

  Kind kind() const { return kind_; }
  const std::string& artifact_id() const { return artifact_id_; }

 private:
  Kind kind_;
  std::string artifact_id_;
};

/// Resolves `record.document_path` under `root`, rejecting absolute paths and
/// anything that escapes the root.
std::filesystem::path resolve_document(const ArtifactRecord& record,
                                       const std::filesystem::path& root);

ArtifactView load_artifact(const ArtifactRecord& record, const std::filesystem::path& root);

/// Builds a view from bytes already in memory (used by the runtime monitor).
ArtifactView view_from_bytes(const ArtifactRecord& record, std::string bytes);

/// CSV: first row is the header; every data row becomes one element.
std::vector<ElementPtr> parse_csv_elements(std::string_view text, const std::string& type_name,
                                           const std::vector<std::string>& fill_down);

/// JSON tree: objects with a "$type" key become typed elements.
std::vector<ElementPtr> parse_tree_elements(std::string_view text);

std::string sha256_hex(std::string_view bytes);

Fingerprint fingerprint(const ArtifactRecord& record, const std::filesystem::path& root);

}  // namespace caseforge
