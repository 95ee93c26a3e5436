// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "caseforge/artifact_store.hpp"

#include <algorithm>
#include <sstream>

#include <openssl/evp.h>

#include "json.hpp"

namespace caseforge {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::vector<std::vector<std::string>> parse_csv_rows(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool in_quotes = false;
  bool field_started = false;
  std::size_t i = 0;

  // Skip a UTF-8 byte order mark.
  if (text.substr(0, 3) == "\xEF\xBB\xBF") i = 3;

  auto end_row = [&]() {
    row.push_back(std::move(field));
    field.clear();
    // A lone empty field on a line is a blank line, not a row.
    if (!(row.size() == 1 && row[0].empty() && !field_started)) rows.push_back(std::move(row));
    row.clear();
    field_started = false;
  };

  for (; i < text.size(); ++i) {
    const char ch = text[i];
    if (in_quotes) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          in_quotes = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    switch (ch) {
      case '"':
        if (!field.empty()) {
          throw ParseError("quote inside unquoted field", pos_from_offset(text, i));
        }
        in_quotes = true;
        field_started = true;
        break;
      case ',':
        row.push_back(std::move(field));
        field.clear();
        field_started = true;
        break;
      case '\r':
        if (i + 1 < text.size() && text[i + 1] == '\n') ++i;
        end_row();
        break;
      case '\n':
        end_row();
        break;
      default:
        field += ch;
        field_started = true;
    }
  }
  if (in_quotes) throw ParseError("unterminated quoted field", pos_from_offset(text, text.size()));
  if (field_started || !field.empty() || !row.empty()) end_row();
  return rows;
}

void walk_tree(const json& j, std::vector<std::shared_ptr<Element>>& typed,
               const std::shared_ptr<Element>& self);

std::shared_ptr<Element> build_element(const json& obj, std::vector<std::shared_ptr<Element>>& typed) {
  auto el = std::make_shared<Element>();
  if (auto it = obj.find("$type"); it != obj.end()) {
    if (!it->is_string() || it->get<std::string>().empty()) {
      throw ParseError("\"$type\" must be a non-empty string", {});
    }
    el->type_name = it->get<std::string>();
    typed.push_back(el);
  }
  walk_tree(obj, typed, el);
  return el;
}

void walk_tree(const json& obj, std::vector<std::shared_ptr<Element>>& typed,
               const std::shared_ptr<Element>& self) {
  for (const auto& [key, value] : obj.items()) {
    if (key == "$type") continue;
    if (value.is_null()) continue;
    if (value.is_boolean()) {
      self->attributes.emplace(key, value.get<bool>());
    } else if (value.is_number()) {
      self->attributes.emplace(key, value.get<double>());
    } else if (value.is_string()) {
      self->attributes.emplace(key, value.get<std::string>());
    } else if (value.is_object()) {
      ChildSlot slot;
      slot.items.push_back(build_element(value, typed));
      self->children.emplace(key, std::move(slot));
    } else {
      ChildSlot slot;
      slot.is_list = true;
      for (const auto& item : value) {
        if (!item.is_object()) {
          throw ParseError("array '" + key + "' must contain only objects", {});
        }
        slot.items.push_back(build_element(item, typed));
      }
      self->children.emplace(key, std::move(slot));
    }
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> out;
  std::stringstream in(text);
  std::string item;
  while (std::getline(in, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

}  // namespace

std::vector<ElementPtr> ArtifactView::all_of_type(std::string_view type_name) const {
  std::vector<ElementPtr> out;
  for (const auto& e : elements) {
    if (e->type_name == type_name) out.push_back(e);
  }
  return out;
}

std::vector<ElementPtr> parse_csv_elements(std::string_view text, const std::string& type_name,
                                           const std::vector<std::string>& fill_down) {
  auto rows = parse_csv_rows(text);
  std::vector<ElementPtr> out;
  if (rows.empty()) return out;
  const std::vector<std::string>& header = rows.front();
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].size() != header.size()) {
      throw ParseError("row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                           " cells, header has " + std::to_string(header.size()),
                       {i + 1, 1});
    }
  }
  std::map<std::string, std::string> previous;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    auto el = std::make_shared<Element>();
    el->type_name = type_name;
    for (std::size_t c = 0; c < header.size(); ++c) {
      std::string cell = rows[i][c];
      const bool fill = std::find(fill_down.begin(), fill_down.end(), header[c]) != fill_down.end();
      if (fill && cell.empty()) cell = previous[header[c]];
      if (fill) previous[header[c]] = cell;
      el->attributes.emplace(header[c], std::move(cell));
    }
    out.push_back(std::move(el));
  }
  return out;
}

std::vector<ElementPtr> parse_tree_elements(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(e.what(), pos_from_offset(text, e.byte > 0 ? e.byte - 1 : 0));
  }
  std::vector<std::shared_ptr<Element>> typed;
  if (doc.is_object()) {
    build_element(doc, typed);
  } else if (doc.is_array()) {
    for (const auto& item : doc) {
      if (!item.is_object()) throw ParseError("top-level array must contain objects", {1, 1});
      build_element(item, typed);
    }
  } else {
    throw ParseError("tree document must be an object or array", {1, 1});
  }
  return {typed.begin(), typed.end()};
}

fs::path resolve_document(const ArtifactRecord& record, const fs::path& root) {
  const fs::path rel(record.document_path);
  if (rel.empty() || rel.is_absolute() || rel.has_root_name()) {
    throw ArtifactError(ArtifactError::Kind::PathEscape, record.id,
                        "document path '" + record.document_path + "' must be relative");
  }
  const fs::path base = fs::weakly_canonical(fs::absolute(root));
  const fs::path full = fs::weakly_canonical(base / rel);
  auto [mismatch, _] = std::mismatch(base.begin(), base.end(), full.begin(), full.end());
  if (mismatch != base.end()) {
    throw ArtifactError(ArtifactError::Kind::PathEscape, record.id,
                        "document path '" + record.document_path + "' escapes the case root");
  }
  return full;
}

ArtifactView view_from_bytes(const ArtifactRecord& record, std::string bytes) {
  ArtifactView view;
  view.artifact_id = record.id;
  view.kind = record.kind;
  try {
    if (record.kind == ArtifactKind::Tabular) {
      std::string type_name;
      if (auto it = record.metadata.find("rowType"); it != record.metadata.end()) {
        type_name = it->second;
      } else {
        type_name = fs::path(record.document_path).stem().string();
      }
      std::vector<std::string> fill;
      if (auto it = record.metadata.find("fillDown"); it != record.metadata.end()) {
        fill = split_list(it->second);
      }
      view.elements = parse_csv_elements(bytes, type_name, fill);
    } else if (record.kind == ArtifactKind::Tree) {
      view.elements = parse_tree_elements(bytes);
    }
  } catch (const ParseError& e) {
    std::string where;
    if (e.position().line > 0) {
      where = " at " + std::to_string(e.position().line) + ":" + std::to_string(e.position().column);
    }
    throw ArtifactError(ArtifactError::Kind::Malformed, record.id,
                        "malformed " + std::string(to_string(record.kind)) + " document '" +
                            record.document_path + "'" + where + ": " + e.what());
  }
  view.raw_bytes = std::move(bytes);
  return view;
}

ArtifactView load_artifact(const ArtifactRecord& record, const fs::path& root) {
  const fs::path path = resolve_document(record, root);
  std::string bytes;
  try {
    if (!fs::is_regular_file(path)) throw IoError("not a file");
    bytes = read_file(path);
  } catch (const IoError&) {
    throw ArtifactError(ArtifactError::Kind::Missing, record.id,
                        "document '" + record.document_path + "' of artifact '" + record.id +
                            "' is missing or unreadable");
  }
  return view_from_bytes(record, std::move(bytes));
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(len * 2);
  for (unsigned int i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 0xF];
  }
  return out;
}

Fingerprint fingerprint(const ArtifactRecord& record, const fs::path& root) {
  const fs::path path = resolve_document(record, root);
  std::string bytes;
  try {
    if (!fs::is_regular_file(path)) throw IoError("not a file");
    bytes = read_file(path);
  } catch (const IoError&) {
    throw ArtifactError(ArtifactError::Kind::Missing, record.id,
                        "document '" + record.document_path + "' of artifact '" + record.id +
                            "' is missing or unreadable");
  }
  return {record.id, sha256_hex(bytes)};
}

}  // namespace caseforge
