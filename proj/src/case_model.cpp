// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "caseforge/case_model.hpp"

#include <algorithm>
#include <functional>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "json.hpp"

namespace caseforge {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::pair<NodeKind, std::string_view> kNodeKindNames[] = {
    {NodeKind::Goal, "Goal"},
    {NodeKind::Strategy, "Strategy"},
    {NodeKind::Solution, "Solution"},
    {NodeKind::Context, "Context"},
    {NodeKind::Assumption, "Assumption"},
    {NodeKind::Justification, "Justification"},
    {NodeKind::AwayGoal, "AwayGoal"},
    {NodeKind::AwayContext, "AwayContext"},
    {NodeKind::AwaySolution, "AwaySolution"},
};

constexpr std::pair<Declaration, std::string_view> kDeclarationNames[] = {
    {Declaration::None, "none"},
    {Declaration::Axiomatic, "axiomatic"},
    {Declaration::Assumed, "assumed"},
    {Declaration::NeedsSupport, "needsSupport"},
    {Declaration::Asserted, "asserted"},
};

constexpr std::pair<ArtifactKind, std::string_view> kArtifactKindNames[] = {
    {ArtifactKind::Tabular, "tabular"},
    {ArtifactKind::Tree, "tree"},
    {ArtifactKind::Text, "text"},
    {ArtifactKind::Theory, "theory"},
};

template <typename E, std::size_t N>
std::string_view name_of(const std::pair<E, std::string_view> (&table)[N], E value) {
  for (const auto& [v, name] : table) {
    if (v == value) return name;
  }
  return "?";
}

template <typename E, std::size_t N>
std::optional<E> value_of(const std::pair<E, std::string_view> (&table)[N], std::string_view text) {
  for (const auto& [v, name] : table) {
    if (name == text) return v;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Schema helpers

void expect_object(const json& j, const std::string& path) {
  if (!j.is_object()) throw SchemaError(path, "expected an object");
}

void check_keys(const json& j, const std::string& path, std::initializer_list<std::string_view> allowed) {
  for (const auto& [key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw SchemaError(path, "unknown key '" + key + "'");
    }
  }
}

const json& require(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(path, std::string("missing key '") + key + "'");
  return *it;
}

std::string require_string(const json& j, const std::string& path, const char* key) {
  const json& v = require(j, path, key);
  if (!v.is_string()) throw SchemaError(path + "/" + key, "expected a string");
  return v.get<std::string>();
}

std::string require_id(const json& j, const std::string& path, const char* key) {
  std::string id = require_string(j, path, key);
  if (id.empty()) throw SchemaError(path + "/" + key, "identifier must not be empty");
  return id;
}

const json& require_array(const json& j, const std::string& path, const char* key) {
  const json& v = require(j, path, key);
  if (!v.is_array()) throw SchemaError(path + "/" + key, "expected an array");
  return v;
}

bool optional_bool(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) return false;
  if (!it->is_boolean()) throw SchemaError(path + "/" + key, "expected a boolean");
  return it->get<bool>();
}

ArgumentNode parse_node(const json& j, const std::string& path, const std::string& module_id) {
  expect_object(j, path);
  check_keys(j, path,
             {"id", "kind", "description", "undeveloped", "public", "declaration", "citations",
              "awayTarget"});
  ArgumentNode n;
  n.id = require_id(j, path, "id");
  const std::string kind = require_string(j, path, "kind");
  auto k = parse_node_kind(kind);
  if (!k) throw SchemaError(path + "/kind", "unknown node kind '" + kind + "'");
  n.kind = *k;
  n.description = require_string(j, path, "description");
  n.undeveloped = optional_bool(j, path, "undeveloped");
  n.is_public = optional_bool(j, path, "public");
  if (auto it = j.find("declaration"); it != j.end()) {
    if (!it->is_string()) throw SchemaError(path + "/declaration", "expected a string");
    auto d = parse_declaration(it->get<std::string>());
    if (!d) throw SchemaError(path + "/declaration", "unknown declaration '" + it->get<std::string>() + "'");
    n.declaration = *d;
  }
  if (auto it = j.find("citations"); it != j.end()) {
    if (!it->is_array()) throw SchemaError(path + "/citations", "expected an array");
    for (const auto& c : *it) {
      if (!c.is_string() || c.get<std::string>().empty()) {
        throw SchemaError(path + "/citations", "expected artifact id strings");
      }
      n.citations.push_back(c.get<std::string>());
    }
  }
  if (auto it = j.find("awayTarget"); it != j.end()) {
    const std::string apath = path + "/awayTarget";
    expect_object(*it, apath);
    check_keys(*it, apath, {"module", "node"});
    n.away_target = NodeRef{require_id(*it, apath, "module"), require_id(*it, apath, "node")};
  }

  if (n.undeveloped && n.kind != NodeKind::Goal && n.kind != NodeKind::Strategy) {
    throw SchemaError(path + "/undeveloped", "only goals and strategies can be undeveloped");
  }
  if (is_away(n.kind) && !n.away_target) {
    throw SchemaError(path, "away node requires awayTarget");
  }
  if (!is_away(n.kind) && n.away_target) {
    throw SchemaError(path + "/awayTarget", "only away nodes carry awayTarget");
  }
  if (n.away_target && n.away_target->module == module_id) {
    throw SchemaError(path + "/awayTarget", "away target must be in another module");
  }
  return n;
}

Connector parse_connector(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path, {"id", "kind", "source", "target"});
  Connector c;
  c.id = require_id(j, path, "id");
  const std::string kind = require_string(j, path, "kind");
  auto k = parse_connector_kind(kind);
  if (!k) throw SchemaError(path + "/kind", "unknown connector kind '" + kind + "'");
  c.kind = *k;
  c.source = require_id(j, path, "source");
  c.target = require_id(j, path, "target");
  return c;
}

ArtifactRecord parse_artifact(const json& j, const std::string& path) {
  expect_object(j, path);
  check_keys(j, path, {"id", "kind", "documentPath", "metadata", "constraints"});
  ArtifactRecord a;
  a.id = require_id(j, path, "id");
  const std::string kind = require_string(j, path, "kind");
  auto k = parse_artifact_kind(kind);
  if (!k) throw SchemaError(path + "/kind", "unknown artifact kind '" + kind + "'");
  a.kind = *k;
  a.document_path = require_string(j, path, "documentPath");
  if (a.document_path.empty()) throw SchemaError(path + "/documentPath", "must not be empty");
  if (auto it = j.find("metadata"); it != j.end()) {
    expect_object(*it, path + "/metadata");
    for (const auto& [key, value] : it->items()) {
      if (!value.is_string()) throw SchemaError(path + "/metadata/" + key, "expected a string");
      a.metadata.emplace(key, value.get<std::string>());
    }
  }
  if (auto it = j.find("constraints"); it != j.end()) {
    if (!it->is_array()) throw SchemaError(path + "/constraints", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string cpath = path + "/constraints/" + std::to_string(i);
      const json& cj = (*it)[i];
      expect_object(cj, cpath);
      check_keys(cj, cpath, {"id", "language", "body"});
      ConstraintRecord cr;
      cr.id = require_id(cj, cpath, "id");
      cr.language = require_string(cj, cpath, "language");
      if (cr.language != "cql") throw SchemaError(cpath + "/language", "only 'cql' is supported");
      cr.body = require_string(cj, cpath, "body");
      a.constraints.push_back(std::move(cr));
    }
  }
  return a;
}

ordered_json node_to_json(const ArgumentNode& n) {
  ordered_json j;
  j["id"] = n.id;
  j["kind"] = std::string(to_string(n.kind));
  j["description"] = n.description;
  if (n.undeveloped) j["undeveloped"] = true;
  if (n.is_public) j["public"] = true;
  if (n.declaration != Declaration::None) j["declaration"] = std::string(to_string(n.declaration));
  if (!n.citations.empty()) j["citations"] = n.citations;
  if (n.away_target) {
    ordered_json t;
    t["module"] = n.away_target->module;
    t["node"] = n.away_target->node;
    j["awayTarget"] = std::move(t);
  }
  return j;
}

template <typename T>
void sort_by_id(std::vector<T>& items) {
  std::sort(items.begin(), items.end(), [](const T& a, const T& b) { return a.id < b.id; });
}

// Depth-first search for back edges. Reports the node each back edge lands on.
std::vector<std::string> find_cycle_entries(
    const std::map<std::string, std::vector<std::string>>& graph) {
  enum class Color { White, Grey, Black };
  std::map<std::string, Color> color;
  for (const auto& [n, _] : graph) color[n] = Color::White;
  std::set<std::string> entries;

  for (const auto& [root, _] : graph) {
    if (color[root] != Color::White) continue;
    std::vector<std::pair<std::string, std::size_t>> stack{{root, 0}};
    color[root] = Color::Grey;
    while (!stack.empty()) {
      auto& [node, next] = stack.back();
      auto it = graph.find(node);
      if (it == graph.end() || next >= it->second.size()) {
        color[node] = Color::Black;
        stack.pop_back();
        continue;
      }
      const std::string& succ = it->second[next++];
      auto cit = color.find(succ);
      if (cit == color.end()) continue;
      if (cit->second == Color::Grey) {
        entries.insert(succ);
      } else if (cit->second == Color::White) {
        cit->second = Color::Grey;
        stack.emplace_back(succ, 0);
      }
    }
  }
  return {entries.begin(), entries.end()};
}

std::optional<NodeRef> try_resolve(const AssuranceCase& c, const ArgumentModule& owner,
                                   const ArgumentNode& n, std::string* why) {
  auto fail = [&](std::string msg) -> std::optional<NodeRef> {
    if (why) *why = std::move(msg);
    return std::nullopt;
  };
  if (!is_away(n.kind)) return fail("node '" + n.id + "' is not an away node");
  if (!n.away_target) return fail("away node '" + n.id + "' has no target");
  const NodeRef& t = *n.away_target;
  if (t.module == owner.id) return fail("away node '" + n.id + "' targets its own module");
  const ArgumentModule* m = c.find_module(t.module);
  if (!m) return fail("away node '" + n.id + "' targets unknown module '" + t.module + "'");
  const ArgumentNode* target = m->find_node(t.node);
  if (!target) {
    return fail("away node '" + n.id + "' targets unknown node '" + t.node + "' in module '" +
                t.module + "'");
  }
  if (target->kind != away_referent_kind(n.kind)) {
    return fail("away node '" + n.id + "' (" + std::string(to_string(n.kind)) + ") targets a " +
                std::string(to_string(target->kind)));
  }
  if (!target->is_public) {
    return fail("away node '" + n.id + "' targets non-public node '" + t.node + "'");
  }
  return t;
}

}  // namespace

// ---------------------------------------------------------------------------
// Enum names

std::string_view to_string(NodeKind kind) { return name_of(kNodeKindNames, kind); }
std::string_view to_string(Declaration decl) { return name_of(kDeclarationNames, decl); }
std::string_view to_string(ArtifactKind kind) { return name_of(kArtifactKindNames, kind); }

std::string_view to_string(ConnectorKind kind) {
  return kind == ConnectorKind::SupportedBy ? "SupportedBy" : "InContextOf";
}

std::string_view to_string(FindingCode code) {
  switch (code) {
    case FindingCode::E_CONN_TYPE: return "E_CONN_TYPE";
    case FindingCode::E_CYCLE: return "E_CYCLE";
    case FindingCode::E_DANGLING_REF: return "E_DANGLING_REF";
    case FindingCode::E_AWAY_UNRESOLVED: return "E_AWAY_UNRESOLVED";
    case FindingCode::E_DUP_ID: return "E_DUP_ID";
    case FindingCode::W_UNDEVELOPED: return "W_UNDEVELOPED";
  }
  return "?";
}

std::optional<NodeKind> parse_node_kind(std::string_view text) {
  return value_of(kNodeKindNames, text);
}
std::optional<Declaration> parse_declaration(std::string_view text) {
  return value_of(kDeclarationNames, text);
}
std::optional<ArtifactKind> parse_artifact_kind(std::string_view text) {
  return value_of(kArtifactKindNames, text);
}
std::optional<ConnectorKind> parse_connector_kind(std::string_view text) {
  if (text == "SupportedBy") return ConnectorKind::SupportedBy;
  if (text == "InContextOf") return ConnectorKind::InContextOf;
  return std::nullopt;
}

bool is_away(NodeKind kind) {
  return kind == NodeKind::AwayGoal || kind == NodeKind::AwayContext ||
         kind == NodeKind::AwaySolution;
}

bool is_contextual(NodeKind kind) {
  return kind == NodeKind::Context || kind == NodeKind::Assumption ||
         kind == NodeKind::Justification;
}

std::optional<NodeKind> away_referent_kind(NodeKind kind) {
  switch (kind) {
    case NodeKind::AwayGoal: return NodeKind::Goal;
    case NodeKind::AwayContext: return NodeKind::Context;
    case NodeKind::AwaySolution: return NodeKind::Solution;
    default: return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Lookups

const ArgumentNode* ArgumentModule::find_node(std::string_view node_id) const {
  for (const auto& n : nodes) {
    if (n.id == node_id) return &n;
  }
  return nullptr;
}

const ArgumentModule* AssuranceCase::find_module(std::string_view module_id) const {
  for (const auto& m : modules) {
    if (m.id == module_id) return &m;
  }
  return nullptr;
}

std::optional<std::pair<const ArgumentModule*, const ArgumentNode*>> AssuranceCase::find_node(
    std::string_view node_id) const {
  for (const auto& m : modules) {
    if (const ArgumentNode* n = m.find_node(node_id)) return std::make_pair(&m, n);
  }
  return std::nullopt;
}

const ArtifactRecord* AssuranceCase::find_artifact(std::string_view artifact_id) const {
  for (const auto& p : artifact_packages) {
    for (const auto& a : p.artifacts) {
      if (a.id == artifact_id) return &a;
    }
  }
  return nullptr;
}

std::vector<const ArtifactRecord*> AssuranceCase::all_artifacts() const {
  std::vector<const ArtifactRecord*> out;
  for (const auto& p : artifact_packages) {
    for (const auto& a : p.artifacts) out.push_back(&a);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Parse / serialize

AssuranceCase parse_case(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t offset = e.byte > 0 ? e.byte - 1 : 0;
    throw ParseError(e.what(), pos_from_offset(text, offset));
  }

  expect_object(doc, "");
  check_keys(doc, "", {"caseId", "modules", "artifactPackages", "interModuleSupports", "terminologyPackages"});
  AssuranceCase c;
  c.case_id = require_id(doc, "", "caseId");

  const json& modules = require_array(doc, "", "modules");
  for (std::size_t i = 0; i < modules.size(); ++i) {
    const std::string path = "/modules/" + std::to_string(i);
    const json& mj = modules[i];
    expect_object(mj, path);
    check_keys(mj, path, {"id", "nodes", "connectors"});
    ArgumentModule m;
    m.id = require_id(mj, path, "id");
    const json& nodes = require_array(mj, path, "nodes");
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      m.nodes.push_back(parse_node(nodes[k], path + "/nodes/" + std::to_string(k), m.id));
    }
    if (auto it = mj.find("connectors"); it != mj.end()) {
      if (!it->is_array()) throw SchemaError(path + "/connectors", "expected an array");
      for (std::size_t k = 0; k < it->size(); ++k) {
        m.connectors.push_back(parse_connector((*it)[k], path + "/connectors/" + std::to_string(k)));
      }
    }
    c.modules.push_back(std::move(m));
  }

  if (auto it = doc.find("artifactPackages"); it != doc.end()) {
    if (!it->is_array()) throw SchemaError("/artifactPackages", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "/artifactPackages/" + std::to_string(i);
      const json& pj = (*it)[i];
      expect_object(pj, path);
      check_keys(pj, path, {"id", "artifacts"});
      ArtifactPackage p;
      p.id = require_id(pj, path, "id");
      const json& arts = require_array(pj, path, "artifacts");
      for (std::size_t k = 0; k < arts.size(); ++k) {
        p.artifacts.push_back(parse_artifact(arts[k], path + "/artifacts/" + std::to_string(k)));
      }
      c.artifact_packages.push_back(std::move(p));
    }
  }

  if (auto it = doc.find("interModuleSupports"); it != doc.end()) {
    if (!it->is_array()) throw SchemaError("/interModuleSupports", "expected an array");
    for (std::size_t i = 0; i < it->size(); ++i) {
      const std::string path = "/interModuleSupports/" + std::to_string(i);
      const json& sj = (*it)[i];
      expect_object(sj, path);
      check_keys(sj, path, {"source", "target"});
      c.inter_module_supports.push_back({require_id(sj, path, "source"), require_id(sj, path, "target")});
    }
  }

  // TerminologyPackage ids are accepted and ignored.
  if (auto it = doc.find("terminologyPackages"); it != doc.end() && !it->is_array()) {
    throw SchemaError("/terminologyPackages", "expected an array");
  }

  for (const auto& f : check_wellformed(c)) {
    if (f.code == FindingCode::E_DUP_ID || f.code == FindingCode::E_DANGLING_REF) {
      throw CaseError(std::string(to_string(f.code)), f.subject_id, f.message);
    }
  }
  return c;
}

AssuranceCase load_case(const std::filesystem::path& path) { return parse_case(read_file(path)); }

AssuranceCase canonicalize(AssuranceCase c) {
  sort_by_id(c.modules);
  for (auto& m : c.modules) {
    sort_by_id(m.nodes);
    sort_by_id(m.connectors);
    for (auto& n : m.nodes) std::sort(n.citations.begin(), n.citations.end());
  }
  sort_by_id(c.artifact_packages);
  for (auto& p : c.artifact_packages) sort_by_id(p.artifacts);
  std::sort(c.inter_module_supports.begin(), c.inter_module_supports.end());
  return c;
}

std::string serialize_case(const AssuranceCase& input) {
  const AssuranceCase c = canonicalize(input);
  ordered_json doc;
  doc["caseId"] = c.case_id;
  doc["modules"] = ordered_json::array();
  for (const auto& m : c.modules) {
    ordered_json mj;
    mj["id"] = m.id;
    mj["nodes"] = ordered_json::array();
    for (const auto& n : m.nodes) mj["nodes"].push_back(node_to_json(n));
    mj["connectors"] = ordered_json::array();
    for (const auto& k : m.connectors) {
      ordered_json kj;
      kj["id"] = k.id;
      kj["kind"] = std::string(to_string(k.kind));
      kj["source"] = k.source;
      kj["target"] = k.target;
      mj["connectors"].push_back(std::move(kj));
    }
    doc["modules"].push_back(std::move(mj));
  }
  doc["artifactPackages"] = ordered_json::array();
  for (const auto& p : c.artifact_packages) {
    ordered_json pj;
    pj["id"] = p.id;
    pj["artifacts"] = ordered_json::array();
    for (const auto& a : p.artifacts) {
      ordered_json aj;
      aj["id"] = a.id;
      aj["kind"] = std::string(to_string(a.kind));
      aj["documentPath"] = a.document_path;
      if (!a.metadata.empty()) {
        ordered_json meta = ordered_json::object();
        for (const auto& [k, v] : a.metadata) meta[k] = v;
        aj["metadata"] = std::move(meta);
      }
      if (!a.constraints.empty()) {
        aj["constraints"] = ordered_json::array();
        for (const auto& cr : a.constraints) {
          ordered_json cj;
          cj["id"] = cr.id;
          cj["language"] = cr.language;
          cj["body"] = cr.body;
          aj["constraints"].push_back(std::move(cj));
        }
      }
      pj["artifacts"].push_back(std::move(aj));
    }
    doc["artifactPackages"].push_back(std::move(pj));
  }
  doc["interModuleSupports"] = ordered_json::array();
  for (const auto& s : c.inter_module_supports) {
    ordered_json sj;
    sj["source"] = s.source;
    sj["target"] = s.target;
    doc["interModuleSupports"].push_back(std::move(sj));
  }
  return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Well-formedness

bool connector_permitted(ConnectorKind kind, NodeKind source, NodeKind target) {
  using K = NodeKind;
  if (kind == ConnectorKind::SupportedBy) {
    switch (source) {
      case K::Goal:
      case K::AwayGoal:
        return target == K::Goal || target == K::Strategy || target == K::Solution ||
               target == K::AwayGoal || target == K::AwaySolution;
      case K::Strategy:
        return target == K::Goal || target == K::AwayGoal || target == K::Solution ||
               target == K::AwaySolution;
      default:
        return false;
    }
  }
  const bool source_ok = source == K::Goal || source == K::AwayGoal || source == K::Strategy;
  const bool target_ok = target == K::Context || target == K::Assumption ||
                         target == K::Justification || target == K::AwayContext;
  return source_ok && target_ok;
}

std::vector<WellformednessFinding> check_wellformed(const AssuranceCase& c) {
  std::vector<WellformednessFinding> out;
  auto add = [&](FindingCode code, std::string subject, std::string message) {
    out.push_back({code, std::move(subject), std::move(message)});
  };

  // Duplicate identifiers.
  {
    std::set<std::string> modules, packages, nodes, connectors, artifacts;
    auto dup = [&](std::set<std::string>& seen, const std::string& id, const char* what) {
      if (!seen.insert(id).second) {
        add(FindingCode::E_DUP_ID, id, std::string("duplicate ") + what + " id '" + id + "'");
      }
    };
    for (const auto& m : c.modules) {
      dup(modules, m.id, "module");
      for (const auto& n : m.nodes) dup(nodes, n.id, "node");
      for (const auto& k : m.connectors) dup(connectors, k.id, "connector");
    }
    for (const auto& p : c.artifact_packages) {
      dup(packages, p.id, "artifact package");
      for (const auto& a : p.artifacts) {
        dup(artifacts, a.id, "artifact");
        std::set<std::string> constraint_ids;
        for (const auto& cr : a.constraints) dup(constraint_ids, cr.id, "constraint");
      }
    }
  }

  // Dangling references and the connector type matrix.
  for (const auto& m : c.modules) {
    for (const auto& k : m.connectors) {
      const ArgumentNode* src = m.find_node(k.source);
      const ArgumentNode* tgt = m.find_node(k.target);
      if (!src) {
        add(FindingCode::E_DANGLING_REF, k.id,
            "connector '" + k.id + "' source '" + k.source + "' is not in module '" + m.id + "'");
      }
      if (!tgt) {
        add(FindingCode::E_DANGLING_REF, k.id,
            "connector '" + k.id + "' target '" + k.target + "' is not in module '" + m.id + "'");
      }
      if (src && tgt && !connector_permitted(k.kind, src->kind, tgt->kind)) {
        add(FindingCode::E_CONN_TYPE, k.id,
            std::string(to_string(k.kind)) + " from " + std::string(to_string(src->kind)) +
                " to " + std::string(to_string(tgt->kind)) + " is not permitted");
      }
    }
    for (const auto& n : m.nodes) {
      for (const auto& a : n.citations) {
        if (!c.find_artifact(a)) {
          add(FindingCode::E_DANGLING_REF, n.id,
              "node '" + n.id + "' cites unknown artifact '" + a + "'");
        }
      }
    }
  }
  for (const auto& s : c.inter_module_supports) {
    for (const std::string* end : {&s.source, &s.target}) {
      if (!c.find_module(*end)) {
        add(FindingCode::E_DANGLING_REF, s.source + "->" + s.target,
            "inter-module support names unknown module '" + *end + "'");
      }
    }
  }

  // Away nodes.
  for (const auto& m : c.modules) {
    for (const auto& n : m.nodes) {
      if (!is_away(n.kind) && !n.away_target) continue;
      std::string why;
      if (!try_resolve(c, m, n, &why)) add(FindingCode::E_AWAY_UNRESOLVED, n.id, why);
    }
  }

  // SupportedBy cycles, following away references across modules.
  {
    std::map<std::string, std::vector<std::string>> graph;
    for (const auto& m : c.modules) {
      for (const auto& n : m.nodes) {
        graph[n.id];
        if (is_away(n.kind)) {
          if (auto r = try_resolve(c, m, n, nullptr)) graph[n.id].push_back(r->node);
        }
      }
      for (const auto& k : m.connectors) {
        if (k.kind == ConnectorKind::SupportedBy && m.find_node(k.source) && m.find_node(k.target)) {
          graph[k.source].push_back(k.target);
        }
      }
    }
    for (auto& [_, succ] : graph) std::sort(succ.begin(), succ.end());
    for (const auto& id : find_cycle_entries(graph)) {
      add(FindingCode::E_CYCLE, id, "SupportedBy cycle through '" + id + "'");
    }
  }
  {
    std::map<std::string, std::vector<std::string>> graph;
    for (const auto& m : c.modules) graph[m.id];
    for (const auto& s : c.inter_module_supports) {
      if (c.find_module(s.source) && c.find_module(s.target)) graph[s.source].push_back(s.target);
    }
    for (auto& [_, succ] : graph) std::sort(succ.begin(), succ.end());
    for (const auto& id : find_cycle_entries(graph)) {
      add(FindingCode::E_CYCLE, id, "inter-module support cycle through module '" + id + "'");
    }
  }

  for (const auto& m : c.modules) {
    for (const auto& n : m.nodes) {
      if (n.undeveloped) {
        add(FindingCode::W_UNDEVELOPED, n.id, "'" + n.id + "' is undeveloped");
      }
    }
  }
  return out;
}

bool has_errors(const std::vector<WellformednessFinding>& findings) {
  return std::any_of(findings.begin(), findings.end(),
                     [](const WellformednessFinding& f) { return f.is_error(); });
}

NodeRef resolve_away(const AssuranceCase& c, std::string_view node_id) {
  auto found = c.find_node(node_id);
  if (!found) {
    throw CaseError("E_AWAY_UNRESOLVED", std::string(node_id),
                    "unknown node '" + std::string(node_id) + "'");
  }
  std::string why;
  auto r = try_resolve(c, *found->first, *found->second, &why);
  if (!r) throw CaseError("E_AWAY_UNRESOLVED", std::string(node_id), why);
  return *r;
}

}  // namespace caseforge
