// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "caseforge/caseforge.h"

#include <cstdlib>
#include <cstring>
#include <memory>
#include <string>

#include "caseforge/case_model.hpp"
#include "caseforge/dsms.hpp"
#include "caseforge/evaluator.hpp"
#include "caseforge/formal.hpp"
#include "caseforge/impact.hpp"
#include "caseforge/lre.hpp"
#include "json.hpp"

struct cf_case {
  caseforge::AssuranceCase c;
};

struct cf_monitor {
  std::unique_ptr<caseforge::dsms::Monitor> monitor;
};

struct cf_backend {
  std::unique_ptr<caseforge::formal::BackendService> service;
};

namespace {

using namespace caseforge;

thread_local std::string g_last_error;

cf_status fail(cf_status code, std::string message) {
  g_last_error = std::move(message);
  return code;
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.data(), s.size());
  out[s.size()] = '\0';
  return out;
}

std::string located(const ParseError& e) {
  const SourcePos p = e.position();
  if (p.line == 0) return e.what();
  return std::to_string(p.line) + ":" + std::to_string(p.column) + ": " + e.what();
}

// Maps the core's exceptions onto status codes. Every entry point funnels
// through here so no exception crosses the C boundary.
template <typename F>
cf_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const ParseError& e) {
    return fail(CF_ERR_PARSE, located(e));
  } catch (const SchemaError& e) {
    return fail(CF_ERR_PARSE, e.path().empty() ? std::string(e.what()) : e.path() + ": " + e.what());
  } catch (const CaseError& e) {
    return fail(CF_ERR_REFERENCE, e.code() + " " + e.subject() + ": " + e.what());
  } catch (const formal::ExportError& e) {
    return fail(CF_ERR_EXPORT, e.what());
  } catch (const formal::TransportError& e) {
    return fail(CF_ERR_TRANSPORT, e.what());
  } catch (const IoError& e) {
    return fail(CF_ERR_IO, e.what());
  } catch (const SnapshotError& e) {
    return fail(CF_ERR_IO, e.what());
  } catch (const ArtifactError& e) {
    return fail(CF_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(CF_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(CF_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CF_ERR_INTERNAL, "unknown error");
  }
}

std::optional<std::string> opt(const char* s) {
  if (!s || !*s) return std::nullopt;
  return std::string(s);
}

std::filesystem::path root_or_cwd(const char* root) { return root && *root ? root : "."; }

}  // namespace

extern "C" {

const char* cf_version(void) { return "0.1.0"; }

const char* cf_last_error(void) { return g_last_error.c_str(); }

void cf_string_free(char* s) { std::free(s); }

cf_status cf_case_load(const char* path, cf_case** out) {
  if (!path || !out) return fail(CF_ERR_INVALID_ARGUMENT, "path and out are required");
  return guarded([&] {
    *out = new cf_case{load_case(path)};
    return CF_OK;
  });
}

cf_status cf_case_parse(const char* text, size_t len, cf_case** out) {
  if (!text || !out) return fail(CF_ERR_INVALID_ARGUMENT, "text and out are required");
  return guarded([&] {
    *out = new cf_case{parse_case(std::string_view(text, len))};
    return CF_OK;
  });
}

void cf_case_free(cf_case* c) { delete c; }

const char* cf_case_id(const cf_case* c) { return c ? c->c.case_id.c_str() : ""; }

cf_status cf_case_check_wellformed(const cf_case* c, char** findings_json, int* has_errors) {
  if (!c || !findings_json) return fail(CF_ERR_INVALID_ARGUMENT, "case and output are required");
  return guarded([&] {
    const auto findings = check_wellformed(c->c);
    nlohmann::ordered_json j;
    j["caseId"] = c->c.case_id;
    j["valid"] = !caseforge::has_errors(findings);
    j["findings"] = nlohmann::ordered_json::array();
    for (const auto& f : findings) {
      j["findings"].push_back({{"code", to_string(f.code)},
                               {"severity", f.is_error() ? "error" : "warning"},
                               {"subject", f.subject_id},
                               {"message", f.message}});
    }
    *findings_json = dup(j.dump(2) + "\n");
    if (has_errors) *has_errors = caseforge::has_errors(findings) ? 1 : 0;
    return CF_OK;
  });
}

cf_status cf_case_serialize(const cf_case* c, char** out) {
  if (!c || !out) return fail(CF_ERR_INVALID_ARGUMENT, "case and output are required");
  return guarded([&] {
    *out = dup(serialize_case(c->c));
    return CF_OK;
  });
}

cf_status cf_case_evaluate(const cf_case* c, const char* root, const char* backend, char** report_json,
                           int* case_valid) {
  if (!c || !report_json) return fail(CF_ERR_INVALID_ARGUMENT, "case and output are required");
  return guarded([&] {
    const EvaluationReport report = evaluate_case(c->c, {root_or_cwd(root), opt(backend)});
    *report_json = dup(report_to_json(report));
    if (case_valid) *case_valid = report.case_valid ? 1 : 0;
    return CF_OK;
  });
}

cf_status cf_case_export_formal(const cf_case* c, const char* module_id, char** text) {
  if (!c || !module_id || !text) return fail(CF_ERR_INVALID_ARGUMENT, "case, module and output are required");
  return guarded([&] {
    *text = dup(formal::export_module(c->c, module_id).text);
    return CF_OK;
  });
}

cf_status cf_formal_check(const char* text, size_t len, const char* backend, char** diagnostics_json,
                          int* ok) {
  if (!text || !diagnostics_json) return fail(CF_ERR_INVALID_ARGUMENT, "text and output are required");
  return guarded([&] {
    const std::string_view body(text, len);
    const formal::BackendDiagnostics d =
        backend && *backend ? formal::submit_to_backend(backend, body) : formal::check_text(body);
    *diagnostics_json = dup(formal::diagnostics_to_json(d));
    if (ok) *ok = d.ok ? 1 : 0;
    return CF_OK;
  });
}

cf_status cf_impact_snapshot(const cf_case* c, const char* root, char** baseline_json) {
  if (!c || !baseline_json) return fail(CF_ERR_INVALID_ARGUMENT, "case and output are required");
  return guarded([&] {
    *baseline_json = dup(baseline_to_json(snapshot(c->c, root_or_cwd(root))));
    return CF_OK;
  });
}

cf_status cf_impact_analyze(const cf_case* c, const char* root, const char* baseline_json, char** report_json,
                            int* has_impact) {
  if (!c || !baseline_json || !report_json) {
    return fail(CF_ERR_INVALID_ARGUMENT, "case, baseline and output are required");
  }
  return guarded([&] {
    const ImpactReport r = impact_of(c->c, baseline_from_json(baseline_json), root_or_cwd(root));
    *report_json = dup(impact_to_json(r));
    if (has_impact) *has_impact = r.empty() ? 0 : 1;
    return CF_OK;
  });
}

cf_status cf_monitor_start(const cf_case* c, const cf_monitor_config* config, cf_monitor** out) {
  if (!c || !config || !out || !config->ingest || !config->status_path) {
    return fail(CF_ERR_INVALID_ARGUMENT, "case, config (ingest, status path) and out are required");
  }
  return guarded([&] {
    dsms::MonitorConfig mc;
    mc.interval_ms = config->interval_ms;
    mc.ingest = config->ingest;
    mc.status_path = config->status_path;
    mc.root = root_or_cwd(config->root);
    mc.backend = opt(config->backend);
    auto handle = std::make_unique<cf_monitor>();
    handle->monitor = std::make_unique<dsms::Monitor>(c->c, std::move(mc));
    handle->monitor->start();
    *out = handle.release();
    return CF_OK;
  });
}

cf_status cf_monitor_status(const cf_monitor* m, char** status_json) {
  if (!m || !status_json) return fail(CF_ERR_INVALID_ARGUMENT, "monitor and output are required");
  return guarded([&] {
    *status_json = dup(dsms::status_to_json(m->monitor->current_status()));
    return CF_OK;
  });
}

int cf_monitor_tcp_port(const cf_monitor* m) { return m ? m->monitor->tcp_port() : -1; }

void cf_monitor_stop(cf_monitor* m) {
  if (!m) return;
  m->monitor->stop();
  delete m;
}

cf_status cf_backend_start(const char* bind, size_t max_body_bytes, cf_backend** out) {
  if (!bind || !out) return fail(CF_ERR_INVALID_ARGUMENT, "bind address and out are required");
  return guarded([&] {
    formal::ServiceConfig config = formal::parse_bind_address(bind);
    if (max_body_bytes > 0) config.max_body_bytes = max_body_bytes;
    auto handle = std::make_unique<cf_backend>();
    handle->service = std::make_unique<formal::BackendService>(config);
    handle->service->start();
    *out = handle.release();
    return CF_OK;
  });
}

int cf_backend_port(const cf_backend* b) { return b ? b->service->port() : -1; }

void cf_backend_stop(cf_backend* b) {
  if (!b) return;
  b->service->stop();
  delete b;
}

cf_status cf_generate_example(const char* name, const char* dir) {
  if (!name || !dir) return fail(CF_ERR_INVALID_ARGUMENT, "name and directory are required");
  if (std::string_view(name) != "auv") {
    return fail(CF_ERR_INVALID_ARGUMENT, std::string("unknown example '") + name + "' (available: auv)");
  }
  return guarded([&] {
    lre::generate_bundle(dir);
    return CF_OK;
  });
}

}  // extern "C"
