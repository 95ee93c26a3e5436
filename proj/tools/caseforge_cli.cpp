// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end. Links only the C API.
//
// Exit codes: 0 success/valid, 1 case invalid or findings present,
// 2 usage, I/O or transport error.

#include <pthread.h>
#include <signal.h>

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "caseforge/caseforge.h"
#include "json.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kFindings = 1;
constexpr int kError = 2;

struct CString {
  char* p = nullptr;
  ~CString() { cf_string_free(p); }
  std::string str() const { return p ? p : ""; }
};

struct CaseHandle {
  cf_case* p = nullptr;
  ~CaseHandle() { cf_case_free(p); }
};

int report_error(const std::string& what) {
  std::cerr << "caseforge: " << what << ": " << cf_last_error() << "\n";
  return kError;
}

bool write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  out.close();
  if (!out) {
    std::cerr << "caseforge: cannot write " << path << "\n";
    return false;
  }
  return true;
}

std::optional<std::string> read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "caseforge: cannot read " << path << "\n";
    return std::nullopt;
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// --root, then CASEFORGE_ROOT, then the directory holding the case file.
std::string resolve_root(const std::string& flag, const std::string& case_path) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("CASEFORGE_ROOT"); env && *env) return env;
  const fs::path parent = fs::path(case_path).parent_path();
  return parent.empty() ? "." : parent.string();
}

// Loads a case. A reference error (duplicate or dangling id) is a finding.
int load(const std::string& path, CaseHandle& out) {
  const cf_status st = cf_case_load(path.c_str(), &out.p);
  if (st == CF_OK) return kOk;
  std::cerr << "caseforge: " << path << ": " << cf_last_error() << "\n";
  return st == CF_ERR_REFERENCE ? kFindings : kError;
}

// Blocks SIGINT/SIGTERM in every thread so sigtimedwait can pick them up.
void block_termination_signals() {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
}

// Waits for SIGINT/SIGTERM, or for duration_ms when positive.
void wait_for_termination(long duration_ms) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  if (duration_ms <= 0) {
    int sig = 0;
    sigwait(&set, &sig);
    return;
  }
  timespec remaining{duration_ms / 1000, (duration_ms % 1000) * 1000000L};
  timespec deadline{};
  clock_gettime(CLOCK_MONOTONIC, &deadline);
  deadline.tv_sec += remaining.tv_sec;
  deadline.tv_nsec += remaining.tv_nsec;
  if (deadline.tv_nsec >= 1000000000L) {
    ++deadline.tv_sec;
    deadline.tv_nsec -= 1000000000L;
  }
  while (true) {
    if (sigtimedwait(&set, nullptr, &remaining) >= 0) return;
    if (errno != EINTR) return;  // EAGAIN: timed out
    timespec now{};
    clock_gettime(CLOCK_MONOTONIC, &now);
    long long left = (deadline.tv_sec - now.tv_sec) * 1000000000LL + (deadline.tv_nsec - now.tv_nsec);
    if (left <= 0) return;
    remaining = {static_cast<time_t>(left / 1000000000LL), static_cast<long>(left % 1000000000LL)};
  }
}

// -- subcommands --------------------------------------------------------------

int cmd_validate(const std::string& case_path, const std::string& report) {
  CaseHandle c;
  if (int rc = load(case_path, c); rc != kOk) return rc;
  CString findings;
  int errors = 0;
  if (cf_case_check_wellformed(c.p, &findings.p, &errors) != CF_OK) return report_error("validate");
  const json j = json::parse(findings.str());
  for (const auto& f : j["findings"]) {
    std::cout << f["code"].get<std::string>() << " " << f["subject"].get<std::string>() << ": "
              << f["message"].get<std::string>() << "\n";
  }
  std::cout << "case " << cf_case_id(c.p) << ": " << (errors ? "not well-formed" : "well-formed") << " ("
            << j["findings"].size() << " finding" << (j["findings"].size() == 1 ? "" : "s") << ")\n";
  if (!report.empty() && !write_text(report, findings.str())) return kError;
  return errors ? kFindings : kOk;
}

int cmd_evaluate(const std::string& case_path, const std::string& root_flag, const std::string& backend,
                 const std::string& report) {
  CaseHandle c;
  if (int rc = load(case_path, c); rc != kOk) return rc;
  CString findings;
  int errors = 0;
  if (cf_case_check_wellformed(c.p, &findings.p, &errors) != CF_OK) return report_error("evaluate");
  if (errors) {
    std::cerr << "caseforge: case is not well-formed; run 'validate' for details\n";
    return kFindings;
  }
  const std::string root = resolve_root(root_flag, case_path);
  CString out;
  int valid = 0;
  if (cf_case_evaluate(c.p, root.c_str(), backend.empty() ? nullptr : backend.c_str(), &out.p, &valid) !=
      CF_OK) {
    return report_error("evaluate");
  }
  const json j = json::parse(out.str());
  for (const auto& [id, v] : j["verdicts"].items()) {
    if (v["status"] == "valid") continue;
    std::cout << "  " << id << ": " << v["status"].get<std::string>();
    const char* sep = " (";
    for (const auto& r : v["reasons"]) {
      std::cout << sep << r["code"].get<std::string>();
      sep = ", ";
    }
    std::cout << (v["reasons"].empty() ? "" : ")") << "\n";
  }
  std::cout << "case " << cf_case_id(c.p) << ": " << (valid ? "valid" : "invalid") << "\n";
  if (!report.empty() && !write_text(report, out.str())) return kError;
  return valid ? kOk : kFindings;
}

int cmd_export(const std::string& case_path, const std::string& module, const std::string& output) {
  CaseHandle c;
  if (int rc = load(case_path, c); rc != kOk) return rc;
  CString text;
  const cf_status st = cf_case_export_formal(c.p, module.c_str(), &text.p);
  if (st == CF_ERR_EXPORT) {
    std::cerr << "caseforge: export-formal: " << cf_last_error() << "\n";
    return kFindings;
  }
  if (st != CF_OK) return report_error("export-formal");
  return write_text(output, text.str()) ? kOk : kError;
}

int cmd_check_formal(const std::string& path, const std::string& backend, const std::string& report) {
  const auto text = read_text(path);
  if (!text) return kError;
  CString out;
  int ok = 0;
  if (cf_formal_check(text->data(), text->size(), backend.empty() ? nullptr : backend.c_str(), &out.p, &ok) !=
      CF_OK) {
    return report_error("check-formal");
  }
  const json j = json::parse(out.str());
  for (const auto& e : j["entries"]) {
    std::cout << path;
    if (e.contains("line")) std::cout << ":" << e["line"].get<int>();
    std::cout << ": " << e["severity"].get<std::string>() << ": " << e["message"].get<std::string>() << "\n";
  }
  std::cout << path << ": " << (ok ? "ok" : "failed") << "\n";
  if (!report.empty() && !write_text(report, out.str())) return kError;
  return ok ? kOk : kFindings;
}

int cmd_snapshot(const std::string& case_path, const std::string& root_flag, const std::string& output) {
  CaseHandle c;
  if (int rc = load(case_path, c); rc != kOk) return rc;
  const std::string root = resolve_root(root_flag, case_path);
  CString out;
  if (cf_impact_snapshot(c.p, root.c_str(), &out.p) != CF_OK) return report_error("snapshot");
  return write_text(output, out.str()) ? kOk : kError;
}

int cmd_impact(const std::string& case_path, const std::string& root_flag, const std::string& baseline,
               const std::string& report) {
  CaseHandle c;
  if (int rc = load(case_path, c); rc != kOk) return rc;
  const auto base = read_text(baseline);
  if (!base) return kError;
  const std::string root = resolve_root(root_flag, case_path);
  CString out;
  int impacted = 0;
  if (cf_impact_analyze(c.p, root.c_str(), base->c_str(), &out.p, &impacted) != CF_OK) {
    return report_error("impact");
  }
  const json j = json::parse(out.str());
  for (const char* key : {"changedArtifacts", "addedArtifacts", "removedArtifacts", "impactedNodes"}) {
    std::cout << key << ":";
    for (const auto& id : j[key]) std::cout << " " << id.get<std::string>();
    std::cout << "\n";
  }
  if (!report.empty() && !write_text(report, out.str())) return kError;
  return impacted ? kFindings : kOk;
}

int cmd_monitor(const std::string& case_path, const std::string& root_flag, const std::string& backend,
                int interval_ms, const std::string& ingest, const std::string& status, long duration_ms) {
  CaseHandle c;
  if (int rc = load(case_path, c); rc != kOk) return rc;
  const std::string root = resolve_root(root_flag, case_path);
  cf_monitor_config config{interval_ms, ingest.c_str(), status.c_str(), root.c_str(),
                           backend.empty() ? nullptr : backend.c_str()};
  block_termination_signals();
  cf_monitor* m = nullptr;
  if (cf_monitor_start(c.p, &config, &m) != CF_OK) return report_error("monitor");
  if (const int port = cf_monitor_tcp_port(m); port >= 0) {
    std::cout << "ingesting on 127.0.0.1:" << port << std::endl;
  }
  wait_for_termination(duration_ms);
  CString final_status;
  const bool have_status = cf_monitor_status(m, &final_status.p) == CF_OK;
  cf_monitor_stop(m);
  if (!have_status) return report_error("monitor");
  const json j = json::parse(final_status.str());
  std::cout << "evaluations: " << j["evaluationCount"] << ", lastSeq: " << j["lastSeq"]
            << ", caseValid: " << j["caseValid"] << "\n";
  return kOk;
}

int cmd_serve(const std::string& bind, std::size_t max_body, long duration_ms) {
  block_termination_signals();
  cf_backend* b = nullptr;
  if (cf_backend_start(bind.c_str(), max_body, &b) != CF_OK) return report_error("serve-backend");
  std::cout << "listening on port " << cf_backend_port(b) << std::endl;
  wait_for_termination(duration_ms);
  cf_backend_stop(b);
  return kOk;
}

int cmd_gen_example(const std::string& name, const std::string& dir) {
  if (cf_generate_example(name.c_str(), dir.c_str()) != CF_OK) {
    return report_error("gen-example");
  }
  std::cout << "wrote example '" << name << "' to " << dir << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"caseforge: assurance case modelling, evaluation and monitoring"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(cf_version()));

  std::string case_path, root, backend, report, output, module, baseline, ingest, status, bind, example, dir;
  int interval_ms = 50;
  long duration_ms = 0;
  std::size_t max_body = 0;

  auto* validate = app.add_subcommand("validate", "Check a case for well-formedness");
  validate->add_option("case", case_path, "Case document")->required();
  validate->add_option("--report", report, "Write the findings document here");

  auto* evaluate = app.add_subcommand("evaluate", "Evaluate a case against its artifacts");
  evaluate->add_option("case", case_path, "Case document")->required();
  evaluate->add_option("--root", root, "Artifact root (default: $CASEFORGE_ROOT, else the case's directory)");
  evaluate->add_option("--backend", backend, "Checking backend URL for theory artifacts");
  evaluate->add_option("--report", report, "Write the evaluation report here");

  auto* exportf = app.add_subcommand("export-formal", "Render one module as a formal document");
  exportf->add_option("case", case_path, "Case document")->required();
  exportf->add_option("--module", module, "Module id")->required();
  exportf->add_option("-o,--output", output, "Output path")->required();

  auto* check = app.add_subcommand("check-formal", "Check a formal document");
  check->add_option("document", case_path, "Formal document")->required();
  check->add_option("--backend", backend, "Checking backend URL (default: in-process)");
  check->add_option("--report", report, "Write the diagnostics here");

  auto* snap = app.add_subcommand("snapshot", "Fingerprint every artifact of a case");
  snap->add_option("case", case_path, "Case document")->required();
  snap->add_option("--root", root, "Artifact root");
  snap->add_option("-o,--output", output, "Baseline path")->required();

  auto* impact = app.add_subcommand("impact", "Compare artifacts against a baseline");
  impact->add_option("case", case_path, "Case document")->required();
  impact->add_option("--root", root, "Artifact root");
  impact->add_option("--baseline", baseline, "Baseline path")->required();
  impact->add_option("--report", report, "Write the impact report here");

  auto* monitor = app.add_subcommand("monitor", "Re-evaluate the dynamic part of a case at runtime");
  monitor->add_option("case", case_path, "Case document")->required();
  monitor->add_option("--root", root, "Artifact root");
  monitor->add_option("--backend", backend, "Checking backend URL");
  monitor->add_option("--interval-ms", interval_ms, "Evaluation period")->check(CLI::PositiveNumber);
  monitor->add_option("--ingest", ingest, "file:PATH or tcp:PORT")->required();
  monitor->add_option("--status", status, "Status file")->required();
  monitor->add_option("--duration-ms", duration_ms, "Stop after this long (default: until signalled)")
      ->check(CLI::NonNegativeNumber);

  auto* serve = app.add_subcommand("serve-backend", "Run the formal document checking service");
  serve->add_option("--bind", bind, "host:port (port 0 picks a free port)")->required();
  serve->add_option("--max-body-bytes", max_body, "Request size limit (default 4 MiB)");
  serve->add_option("--duration-ms", duration_ms, "Stop after this long (default: until signalled)")
      ->check(CLI::NonNegativeNumber);

  auto* gen = app.add_subcommand("gen-example", "Write a bundled example case");
  gen->add_option("name", example, "Example name (auv)")->required();
  gen->add_option("dir", dir, "Output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "caseforge: " << e.what() << "\n\n" << app.help();
    return kError;
  }

  if (*validate) return cmd_validate(case_path, report);
  if (*evaluate) return cmd_evaluate(case_path, root, backend, report);
  if (*exportf) return cmd_export(case_path, module, output);
  if (*check) return cmd_check_formal(case_path, backend, report);
  if (*snap) return cmd_snapshot(case_path, root, output);
  if (*impact) return cmd_impact(case_path, root, baseline, report);
  if (*monitor) return cmd_monitor(case_path, root, backend, interval_ms, ingest, status, duration_ms);
  if (*serve) return cmd_serve(bind, max_body, duration_ms);
  if (*gen) return cmd_gen_example(example, dir);
  return kError;
}
