/* Copyright 2026 The caseforge Authors
 * SPDX-License-Identifier: Apache-2.0
 *
 * Stable C interface to libcaseforge. Handles are opaque. Every function
 * that can fail returns a cf_status; on failure cf_last_error() describes the
 * problem for the calling thread. Strings returned through char** out
 * parameters are owned by the caller and released with cf_string_free().
 */

#ifndef CASEFORGE_CASEFORGE_H_
#define CASEFORGE_CASEFORGE_H_

#include <stddef.h>

#if defined(CASEFORGE_BUILDING_LIBRARY)
#define CF_API __attribute__((visibility("default")))
#else
#define CF_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cf_status {
  CF_OK = 0,
  CF_ERR_INVALID_ARGUMENT = 1,
  CF_ERR_PARSE = 2,      /* syntax or schema error in an input document */
  CF_ERR_IO = 3,         /* unreadable/unwritable file, bind failure */
  CF_ERR_REFERENCE = 4,  /* duplicate or dangling ids, unresolved away nodes */
  CF_ERR_EXPORT = 5,     /* module cannot be rendered as a formal document */
  CF_ERR_TRANSPORT = 6,  /* backend unreachable or answered off-protocol */
  CF_ERR_INTERNAL = 7
} cf_status;

typedef struct cf_case cf_case;
typedef struct cf_monitor cf_monitor;
typedef struct cf_backend cf_backend;

CF_API const char* cf_version(void);
CF_API const char* cf_last_error(void);
CF_API void cf_string_free(char* s);

/* Cases. */
CF_API cf_status cf_case_load(const char* path, cf_case** out);
CF_API cf_status cf_case_parse(const char* text, size_t len, cf_case** out);
CF_API void cf_case_free(cf_case* c);
CF_API const char* cf_case_id(const cf_case* c);

/* Findings document: {"caseId", "valid", "findings": [{code, severity,
 * subject, message}]}. *has_errors is set when any finding is an error. */
CF_API cf_status cf_case_check_wellformed(const cf_case* c, char** findings_json, int* has_errors);
CF_API cf_status cf_case_serialize(const cf_case* c, char** out);

/* root: directory artifact document paths resolve against.
 * backend: "http://host:port" or NULL for the in-process checker. */
CF_API cf_status cf_case_evaluate(const cf_case* c, const char* root, const char* backend,
                                  char** report_json, int* case_valid);
CF_API cf_status cf_case_export_formal(const cf_case* c, const char* module_id, char** text);

/* Checks a formal document locally or against a backend. */
CF_API cf_status cf_formal_check(const char* text, size_t len, const char* backend,
                                 char** diagnostics_json, int* ok);

/* Impact analysis. *has_impact is set when any list in the report is nonempty. */
CF_API cf_status cf_impact_snapshot(const cf_case* c, const char* root, char** baseline_json);
CF_API cf_status cf_impact_analyze(const cf_case* c, const char* root, const char* baseline_json,
                                   char** report_json, int* has_impact);

/* Runtime monitor. */
typedef struct cf_monitor_config {
  int interval_ms;         /* >= 1 */
  const char* ingest;      /* "file:PATH" or "tcp:PORT" */
  const char* status_path;
  const char* root;        /* NULL: current directory */
  const char* backend;     /* NULL: in-process checker */
} cf_monitor_config;

CF_API cf_status cf_monitor_start(const cf_case* c, const cf_monitor_config* config, cf_monitor** out);
CF_API cf_status cf_monitor_status(const cf_monitor* m, char** status_json);
/* Bound TCP port for "tcp:" ingestion, else -1. */
CF_API int cf_monitor_tcp_port(const cf_monitor* m);
/* Stops the monitor and releases the handle. */
CF_API void cf_monitor_stop(cf_monitor* m);

/* Checking service. bind: "host:port", ":port" or "port"; port 0 picks a
 * free port. max_body_bytes 0 keeps the default (4 MiB). */
CF_API cf_status cf_backend_start(const char* bind, size_t max_body_bytes, cf_backend** out);
CF_API int cf_backend_port(const cf_backend* b);
/* Stops the service and releases the handle. */
CF_API void cf_backend_stop(cf_backend* b);

/* Writes a bundled example ("auv") into dir. */
CF_API cf_status cf_generate_example(const char* name, const char* dir);

#ifdef __cplusplus
}
#endif

#endif /* CASEFORGE_CASEFORGE_H_ */
