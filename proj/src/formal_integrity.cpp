// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <map>
#include <set>

#include "caseforge/formal.hpp"
#include "json.hpp"

namespace caseforge::formal {

namespace {

using ojson = nlohmann::ordered_json;

std::optional<RefKind> kind_of(const Statement& s) {
  if (std::holds_alternative<ClaimStmt>(s.body)) return RefKind::Claim;
  if (std::holds_alternative<ArtifactReferenceStmt>(s.body)) return RefKind::ArtifactReference;
  if (std::holds_alternative<InferenceStmt>(s.body)) return RefKind::Inference;
  return std::nullopt;
}

struct Edge {
  std::string to;
  const Statement* via;
};

class CycleFinder {
 public:
  CycleFinder(const std::map<std::string, std::vector<Edge>>& graph,
              std::vector<DiagnosticEntry>& out)
      : graph_(graph), out_(out) {}

  void visit(const std::string& node) {
    if (state_[node] != 0) return;
    state_[node] = 1;
    path_.push_back(node);
    if (auto it = graph_.find(node); it != graph_.end()) {
      for (const Edge& e : it->second) {
        const int s = state_[e.to];
        if (s == 1) {
          report(e);
        } else if (s == 0) {
          visit(e.to);
        }
      }
    }
    path_.pop_back();
    state_[node] = 2;
  }

 private:
  void report(const Edge& e) {
    std::string cycle;
    bool in_cycle = false;
    for (const std::string& n : path_) {
      in_cycle = in_cycle || n == e.to;
      if (in_cycle) cycle += n + " -> ";
    }
    cycle += e.to;
    out_.push_back({e.via->name(), Severity::Error, "inference cycle: " + cycle, e.via->line});
  }

  const std::map<std::string, std::vector<Edge>>& graph_;
  std::vector<DiagnosticEntry>& out_;
  std::map<std::string, int> state_;
  std::vector<std::string> path_;
};

}  // namespace

BackendDiagnostics check_integrity(const FormalDocument& doc) {
  std::vector<DiagnosticEntry> entries;
  std::map<std::string, const Statement*> by_name;

  for (const Statement& s : doc.statements) {
    auto [it, inserted] = by_name.emplace(s.name(), &s);
    if (!inserted) {
      entries.push_back({s.name(), Severity::Error,
                         "duplicate statement name '" + s.name() + "' (first defined on line " +
                             std::to_string(it->second->line) + ")",
                         s.line});
    }
  }

  auto resolves = [&](const Statement& owner, const Reference& r) {
    auto it = by_name.find(r.name);
    if (it == by_name.end()) {
      entries.push_back({owner.name(), Severity::Error,
                         "reference to undefined " + std::string(to_string(r.kind)) + " '" + r.name + "'",
                         owner.line});
      return false;
    }
    const auto actual = kind_of(*it->second);
    if (actual != r.kind) {
      entries.push_back({owner.name(), Severity::Error,
                         "'" + r.name + "' is referenced as " + std::string(to_string(r.kind)) +
                             " but is not one",
                         owner.line});
      return false;
    }
    return true;
  };

  std::set<std::string> inference_targets;
  std::set<std::string> context_sources;
  std::map<std::string, std::vector<Edge>> support;  // claim -> claims supporting it

  for (const Statement& s : doc.statements) {
    if (const auto* inf = std::get_if<InferenceStmt>(&s.body)) {
      std::vector<const Reference*> good_sources;
      for (const Reference& r : inf->sources) {
        if (resolves(s, r) && r.kind == RefKind::Claim) good_sources.push_back(&r);
      }
      for (const Reference& t : inf->targets) {
        if (!resolves(s, t)) continue;
        inference_targets.insert(t.name);
        if (t.kind != RefKind::Claim) continue;
        for (const Reference* src : good_sources) support[t.name].push_back({src->name, &s});
      }
    } else if (const auto* ctx = std::get_if<ContextStmt>(&s.body)) {
      for (const Reference& r : ctx->sources) {
        if (resolves(s, r)) context_sources.insert(r.name);
      }
      for (const Reference& r : ctx->targets) resolves(s, r);
    }
  }

  CycleFinder cycles(support, entries);
  for (const Statement& s : doc.statements) {
    if (std::holds_alternative<ClaimStmt>(s.body)) cycles.visit(s.name());
  }

  for (const Statement& s : doc.statements) {
    if (const auto* v = std::get_if<VerdictStmt>(&s.body); v && !v->pass) {
      entries.push_back({v->name, Severity::Error,
                         "verdict '" + v->name + "' failed" +
                             (v->description.empty() ? std::string() : ": " + v->description),
                         s.line});
    }
  }

  for (const Statement& s : doc.statements) {
    const auto* c = std::get_if<ClaimStmt>(&s.body);
    if (!c) continue;
    if (c->declaration == Declaration::NeedsSupport) {
      entries.push_back({c->name, Severity::Warning, "claim '" + c->name + "' needs support", s.line});
      continue;
    }
    if (c->declaration == Declaration::Axiomatic || c->declaration == Declaration::Assumed) continue;
    if (inference_targets.count(c->name) || context_sources.count(c->name)) continue;
    entries.push_back({c->name, Severity::Warning,
                       "claim '" + c->name + "' is never supported by an inference", s.line});
  }

  BackendDiagnostics out;
  out.entries = std::move(entries);
  for (const auto& e : out.entries) out.ok = out.ok && e.severity != Severity::Error;
  return out;
}

BackendDiagnostics check_text(std::string_view text) {
  FormalDocument doc;
  try {
    doc = parse_formal(text);
  } catch (const ParseError& e) {
    BackendDiagnostics d;
    d.ok = false;
    const SourcePos p = e.position();
    d.entries.push_back({"syntax", Severity::Error,
                         "syntax error at " + std::to_string(p.line) + ":" + std::to_string(p.column) +
                             ": " + e.what(),
                         p.line});
    return d;
  }
  return check_integrity(doc);
}

std::string diagnostics_to_json(const BackendDiagnostics& d) {
  ojson j;
  j["ok"] = d.ok;
  j["entries"] = ojson::array();
  for (const DiagnosticEntry& e : d.entries) {
    ojson entry;
    entry["id"] = e.id;
    entry["severity"] = e.severity == Severity::Error ? "error" : "warning";
    entry["message"] = e.message;
    if (e.line) entry["line"] = *e.line;
    j["entries"].push_back(std::move(entry));
  }
  return j.dump();
}

BackendDiagnostics diagnostics_from_json(std::string_view body) {
  ojson j;
  try {
    j = ojson::parse(body.begin(), body.end());
  } catch (const ojson::parse_error& e) {
    throw ParseError(std::string("response is not valid JSON: ") + e.what(), {});
  }
  auto bad = [](const std::string& msg) { return ParseError("non-conforming response: " + msg, {}); };
  if (!j.is_object()) throw bad("not an object");
  if (!j.contains("ok") || !j["ok"].is_boolean()) throw bad("'ok' must be a boolean");
  if (!j.contains("entries") || !j["entries"].is_array()) throw bad("'entries' must be an array");
  BackendDiagnostics d;
  d.ok = j["ok"].get<bool>();
  bool any_error = false;
  for (const auto& e : j["entries"]) {
    if (!e.is_object()) throw bad("entry is not an object");
    DiagnosticEntry entry;
    if (!e.contains("id") || !e["id"].is_string()) throw bad("entry 'id' must be a string");
    if (!e.contains("message") || !e["message"].is_string()) throw bad("entry 'message' must be a string");
    if (!e.contains("severity") || !e["severity"].is_string()) throw bad("entry 'severity' must be a string");
    entry.id = e["id"].get<std::string>();
    entry.message = e["message"].get<std::string>();
    const std::string sev = e["severity"].get<std::string>();
    if (sev == "error") {
      entry.severity = Severity::Error;
      any_error = true;
    } else if (sev == "warning") {
      entry.severity = Severity::Warning;
    } else {
      throw bad("unknown severity '" + sev + "'");
    }
    if (e.contains("line")) {
      if (!e["line"].is_number_unsigned()) throw bad("entry 'line' must be a non-negative integer");
      entry.line = e["line"].get<std::size_t>();
    }
    d.entries.push_back(std::move(entry));
  }
  if (d.ok == any_error) throw bad("'ok' disagrees with the entries");
  return d;
}

}  // namespace caseforge::formal
