// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <set>

#include "caseforge/formal.hpp"

namespace caseforge::formal {

namespace {

bool valid_name(std::string_view name) {
  if (name.empty()) return false;
  return std::all_of(name.begin(), name.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
  });
}

std::string escape_description(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '>': out += "\\>"; break;
      case '\n': out += "\\n"; break;
      case '\r': break;
      default: out += c;
    }
  }
  return out;
}

std::string render_ref(const Reference& r) {
  return "@{" + std::string(to_string(r.kind)) + " " + r.name + "}";
}

std::string render_refs(const std::vector<Reference>& refs) {
  std::string out = "<{";
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (i > 0) out += ", ";
    out += render_ref(refs[i]);
  }
  return out + "}>";
}

std::string join_refs(const std::vector<Reference>& refs) {
  std::string out;
  for (std::size_t i = 0; i < refs.size(); ++i) {
    if (i > 0) out += ", ";
    out += render_ref(refs[i]);
  }
  return out;
}

RefKind ref_kind_of(NodeKind kind) {
  switch (kind) {
    case NodeKind::Solution: return RefKind::ArtifactReference;
    case NodeKind::Strategy: return RefKind::Inference;
    default: return RefKind::Claim;
  }
}

std::string render_statement(const Statement& s) {
  struct Visitor {
    std::string operator()(const ClaimStmt& c) const {
      std::string out = "Claim " + c.name;
      if (c.declaration != Declaration::None) out += " " + std::string(to_string(c.declaration));
      return out + " <<" + escape_description(c.description) + ">>";
    }
    std::string operator()(const ArtifactReferenceStmt& a) const {
      return "ArtifactReference " + a.name + " <<" + escape_description(a.description) + ">>";
    }
    std::string operator()(const InferenceStmt& i) const {
      return "Inference " + i.name + " src " + render_refs(i.sources) + " tgt " +
             render_refs(i.targets) + " <<" + escape_description(i.description) + ">>";
    }
    std::string operator()(const ContextStmt& c) const {
      return "Context " + c.name + " src " + render_refs(c.sources) + " tgt " +
             render_refs(c.targets) + " <<" + escape_description(c.description) + ">>";
    }
    std::string operator()(const VerdictStmt& v) const {
      return "Verdict " + v.name + (v.pass ? " pass" : " fail") + " <<" +
             escape_description(v.description) + ">>";
    }
  };
  return std::visit(Visitor{}, s.body);
}

}  // namespace

std::string_view to_string(RefKind kind) {
  switch (kind) {
    case RefKind::Claim: return "Claim";
    case RefKind::ArtifactReference: return "ArtifactReference";
    case RefKind::Inference: return "Inference";
  }
  return "?";
}

const std::string& Statement::name() const {
  return std::visit([](const auto& b) -> const std::string& { return b.name; }, body);
}

std::string render(const FormalDocument& doc) {
  std::string out;
  for (const Statement& s : doc.statements) {
    out += render_statement(s);
    out += '\n';
  }
  return out;
}

ExportResult export_module(const AssuranceCase& c, std::string_view module_id) {
  const ArgumentModule* module = c.find_module(module_id);
  if (!module) throw ExportError("no module named '" + std::string(module_id) + "'");

  std::vector<const ArgumentNode*> nodes;
  for (const ArgumentNode& n : module->nodes) {
    if (!valid_name(n.id)) {
      throw ExportError("node id '" + n.id + "' cannot be used as a statement name");
    }
    nodes.push_back(&n);
  }
  std::sort(nodes.begin(), nodes.end(),
            [](const ArgumentNode* a, const ArgumentNode* b) { return a->id < b->id; });

  std::vector<const Connector*> connectors;
  for (const Connector& k : module->connectors) {
    if (!valid_name(k.id)) {
      throw ExportError("connector id '" + k.id + "' cannot be used as a statement name");
    }
    if (!module->find_node(k.source) || !module->find_node(k.target)) {
      throw ExportError("connector '" + k.id + "' references a node outside module '" +
                        module->id + "'");
    }
    connectors.push_back(&k);
  }
  std::sort(connectors.begin(), connectors.end(),
            [](const Connector* a, const Connector* b) { return a->id < b->id; });

  auto ref_to = [&](const std::string& node_id) {
    return Reference{ref_kind_of(module->find_node(node_id)->kind), node_id};
  };

  FormalDocument doc;
  auto emit = [&](auto body) { doc.statements.push_back({doc.statements.size() + 1, std::move(body)}); };

  // Claims: goals, contextual elements, away nodes.
  for (const ArgumentNode* n : nodes) {
    if (n->kind != NodeKind::Goal && !is_contextual(n->kind) && !is_away(n->kind)) continue;
    ClaimStmt claim{n->id, n->declaration, n->description};
    if (n->undeveloped) {
      claim.declaration = Declaration::NeedsSupport;
    } else if (is_away(n->kind)) {
      claim.declaration = Declaration::Assumed;
      const std::string origin =
          "(from module " + (n->away_target ? n->away_target->module : std::string("?")) + ")";
      claim.description = claim.description.empty() ? origin : claim.description + " " + origin;
    }
    emit(std::move(claim));
  }

  for (const ArgumentNode* n : nodes) {
    if (n->kind == NodeKind::Solution) emit(ArtifactReferenceStmt{n->id, n->description});
  }

  std::set<std::string> consumed;
  for (const ArgumentNode* n : nodes) {
    if (n->kind != NodeKind::Strategy) continue;
    InferenceStmt inf;
    inf.name = n->id;
    for (const Connector* k : connectors) {
      if (k->kind != ConnectorKind::SupportedBy) continue;
      if (k->target == n->id) {
        inf.targets.push_back(ref_to(k->source));
        consumed.insert(k->id);
      } else if (k->source == n->id) {
        inf.sources.push_back(ref_to(k->target));
        consumed.insert(k->id);
      }
    }
    if (inf.targets.empty()) {
      throw ExportError("strategy '" + n->id + "' has no incoming SupportedBy");
    }
    inf.description = join_refs(inf.targets) + " is supported by " + join_refs(inf.sources) + ".";
    emit(std::move(inf));
  }

  for (const Connector* k : connectors) {
    if (consumed.count(k->id)) continue;
    const Reference supported = ref_to(k->source);
    const Reference supporting = ref_to(k->target);
    if (k->kind == ConnectorKind::SupportedBy) {
      emit(InferenceStmt{k->id, {supporting}, {supported},
                         render_ref(supported) + " is supported by " + render_ref(supporting) + "."});
    } else {
      emit(ContextStmt{k->id, {supporting}, {supported},
                       render_ref(supported) + " is context for " + render_ref(supporting) + "."});
    }
  }

  ExportResult result;
  result.text = render(doc);
  result.document = std::move(doc);
  return result;
}

}  // namespace caseforge::formal
