// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "caseforge/dsms.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <atomic>
#include <cerrno>
#include <condition_variable>
#include <cstring>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "caseforge/artifact_store.hpp"
#include "caseforge/evaluator.hpp"
#include "caseforge/impact.hpp"
#include "caseforge/lre.hpp"
#include "json.hpp"

namespace caseforge::dsms {

namespace {

using json = nlohmann::json;
using ojson = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr auto kTailPoll = std::chrono::milliseconds(1);

struct Version {
  long long seq;
  std::string bytes;
};

}  // namespace

std::string status_to_json(const StatusSnapshot& s) {
  ojson j;
  j["timestamp"] = s.timestamp;
  j["caseValid"] = s.case_valid;
  j["failedNodes"] = s.failed_nodes;
  j["lastSeq"] = s.last_seq;
  j["evaluationCount"] = s.evaluation_count;
  j["degraded"] = s.degraded;
  j["rejectedRecords"] = s.rejected_records;
  return j.dump(2) + "\n";
}

std::optional<RuntimeRecord> parse_record(std::string_view line) {
  json j;
  try {
    j = json::parse(line.begin(), line.end());
  } catch (const json::parse_error&) {
    return std::nullopt;
  }
  if (!j.is_object() || !j.contains("seq") || !j["seq"].is_number_integer()) return std::nullopt;
  RuntimeRecord r;
  r.seq = j["seq"].get<long long>();
  r.received_at = utc_now();
  for (const char* field : lre::kObstacleFields) {
    if (!j.contains(field) || !j[field].is_number()) return std::nullopt;
    r.payload[field] = j[field].get<double>();
  }
  // Unknown keys mean the record does not match the runtime model.
  if (j.size() != r.payload.size() + 1) return std::nullopt;
  return r;
}

struct Monitor::Impl {
  AssuranceCase c;
  MonitorConfig config;
  std::vector<const ArtifactRecord*> dynamic;
  const ArtifactRecord* driver_target = nullptr;
  fs::path runtime_path;
  std::vector<std::string> subset;
  std::map<std::string, ArtifactResult> static_results;
  std::set<std::string> valid_in_reference;

  // Ingestion.
  std::mutex ingest_mu;
  long long last_accepted = std::numeric_limits<long long>::min();
  std::atomic<std::uint64_t> rejected{0};
  std::atomic<bool> degraded{false};

  std::mutex pending_mu;
  std::vector<Version> pending;

  // Evaluation.
  std::string current_bytes;
  long long current_seq = 0;
  std::uint64_t evaluations = 0;

  mutable std::mutex status_mu;
  StatusSnapshot status;
  std::function<void(const StatusSnapshot&)> observer;

  std::atomic<bool> running{false};
  std::mutex wake_mu;
  std::condition_variable wake;
  std::thread ticker;
  std::thread ingester;
  int listen_fd = -1;
  int bound_port = -1;

  static long long seq_of(const std::string& bytes, long long fallback) {
    try {
      const json j = json::parse(bytes);
      if (j.contains("seq") && j["seq"].is_number_integer()) return j["seq"].get<long long>();
    } catch (const json::exception&) {
    }
    return fallback;
  }

  // Returns every dynamic-subset node whose verdict is non-valid, restricted to
  // nodes that are valid when the dynamic artifacts pass.
  std::vector<std::string> evaluate_version(const std::string& bytes) {
    std::map<std::string, ArtifactResult> results = static_results;
    for (const ArtifactRecord* record : dynamic) {
      if (record == driver_target) {
        try {
          results[record->id] = evaluate_view(*record, view_from_bytes(*record, bytes), config.backend);
        } catch (const ArtifactError& e) {
          ArtifactResult r;
          r.artifact_id = record->id;
          r.failure = ReasonCode::R_CONSTRAINT_ERROR;
          r.message = e.what();
          r.constraints["$load"] = {false, e.what()};
          results[record->id] = std::move(r);
        }
      } else {
        results[record->id] = evaluate_artifact(*record, {config.root, config.backend});
      }
    }
    const EvaluationReport report = propagate(c, std::move(results));
    std::vector<std::string> failed;
    for (const std::string& id : subset) {
      auto it = report.verdicts.find(id);
      if (it != report.verdicts.end() && it->second.status != Status::Valid &&
          valid_in_reference.count(id)) {
        failed.push_back(id);
      }
    }
    return failed;
  }

  void tick() {
    std::vector<Version> versions;
    {
      std::lock_guard<std::mutex> lock(pending_mu);
      versions.swap(pending);
    }
    if (versions.empty()) {
      try {
        current_bytes = read_file(runtime_path);
        current_seq = seq_of(current_bytes, current_seq);
      } catch (const IoError&) {
        degraded = true;
      }
      versions.push_back({current_seq, current_bytes});
    }
    std::set<std::string> failed;
    for (const Version& v : versions) {
      for (auto& id : evaluate_version(v.bytes)) failed.insert(std::move(id));
      current_seq = std::max(current_seq, v.seq);
      current_bytes = v.bytes;
    }

    StatusSnapshot s;
    s.timestamp = utc_now();
    for (const std::string& id : subset) {
      if (failed.count(id)) s.failed_nodes.push_back(id);
    }
    s.case_valid = s.failed_nodes.empty();
    s.last_seq = current_seq;
    s.evaluation_count = ++evaluations;
    s.degraded = degraded;
    s.rejected_records = rejected;
    try {
      write_file_atomic(config.status_path, status_to_json(s));
    } catch (const IoError&) {
      s.degraded = true;
    }
    std::function<void(const StatusSnapshot&)> notify;
    {
      std::lock_guard<std::mutex> lock(status_mu);
      status = s;
      notify = observer;
    }
    if (notify) notify(s);
  }

  bool ingest(std::string_view line) {
    std::optional<RuntimeRecord> record = parse_record(line);
    std::lock_guard<std::mutex> lock(ingest_mu);
    if (!record || record->seq <= last_accepted) {
      ++rejected;
      return false;
    }
    std::string doc = lre::obstacle_reading_document(record->payload, record->seq);
    try {
      write_file_atomic(runtime_path, doc);
    } catch (const IoError&) {
      degraded = true;
      ++rejected;
      return false;
    }
    last_accepted = record->seq;
    std::lock_guard<std::mutex> plock(pending_mu);
    pending.push_back({record->seq, std::move(doc)});
    return true;
  }

  void consume_lines(std::string& buffer) {
    std::size_t start = 0;
    for (std::size_t nl; (nl = buffer.find('\n', start)) != std::string::npos; start = nl + 1) {
      std::string_view line(buffer.data() + start, nl - start);
      while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
      if (!line.empty()) ingest(line);
    }
    buffer.erase(0, start);
  }

  void tail_file(const fs::path& path) {
    std::uintmax_t offset = 0;
    std::string buffer;
    while (running) {
      std::ifstream in(path, std::ios::binary);
      if (!in) {
        degraded = true;
      } else {
        degraded = false;
        in.seekg(0, std::ios::end);
        const std::uintmax_t size = static_cast<std::uintmax_t>(in.tellg());
        if (size < offset) {
          // Truncated or replaced: start over.
          offset = 0;
          buffer.clear();
        }
        if (size > offset) {
          in.seekg(static_cast<std::streamoff>(offset));
          std::string chunk(size - offset, '\0');
          in.read(chunk.data(), static_cast<std::streamsize>(chunk.size()));
          chunk.resize(static_cast<std::size_t>(in.gcount()));
          offset += chunk.size();
          buffer += chunk;
          consume_lines(buffer);
        }
      }
      std::this_thread::sleep_for(kTailPoll);
    }
  }

  void bind_tcp(int port) {
    listen_fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (listen_fd < 0) throw IoError(std::string("socket: ") + std::strerror(errno));
    int one = 1;
    ::setsockopt(listen_fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
    addr.sin_port = htons(static_cast<std::uint16_t>(port));
    if (::bind(listen_fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
        ::listen(listen_fd, 8) != 0) {
      const std::string err = std::strerror(errno);
      ::close(listen_fd);
      listen_fd = -1;
      throw IoError("cannot listen on port " + std::to_string(port) + ": " + err);
    }
    socklen_t len = sizeof addr;
    ::getsockname(listen_fd, reinterpret_cast<sockaddr*>(&addr), &len);
    bound_port = ntohs(addr.sin_port);
  }

  void serve_tcp() {
    struct Client {
      int fd;
      std::string buffer;
    };
    std::vector<Client> clients;
    while (running) {
      std::vector<pollfd> fds{{listen_fd, POLLIN, 0}};
      for (const Client& cl : clients) fds.push_back({cl.fd, POLLIN, 0});
      const int ready = ::poll(fds.data(), fds.size(), 20);
      if (ready < 0) {
        if (errno == EINTR) continue;
        degraded = true;
        continue;
      }
      if (fds[0].revents & POLLIN) {
        const int fd = ::accept(listen_fd, nullptr, nullptr);
        if (fd >= 0) {
          clients.push_back({fd, {}});
        } else {
          degraded = true;
        }
      }
      for (std::size_t i = 1; i < fds.size(); ++i) {
        if (!(fds[i].revents & (POLLIN | POLLHUP | POLLERR))) continue;
        Client& cl = clients[i - 1];
        char chunk[4096];
        const ssize_t n = ::recv(cl.fd, chunk, sizeof chunk, 0);
        if (n > 0) {
          cl.buffer.append(chunk, static_cast<std::size_t>(n));
          consume_lines(cl.buffer);
        } else {
          if (!cl.buffer.empty()) {
            cl.buffer += '\n';
            consume_lines(cl.buffer);
          }
          ::close(cl.fd);
          cl.fd = -1;
        }
      }
      std::erase_if(clients, [](const Client& cl) { return cl.fd < 0; });
    }
    for (const Client& cl : clients) ::close(cl.fd);
  }

  void run_ticks() {
    const auto period = std::chrono::milliseconds(config.interval_ms);
    auto next = std::chrono::steady_clock::now() + period;
    while (true) {
      {
        std::unique_lock<std::mutex> lock(wake_mu);
        if (wake.wait_until(lock, next, [this] { return !running; })) return;
      }
      tick();
      next += period;
      const auto now = std::chrono::steady_clock::now();
      // After a long stall, resume the cadence from now instead of bursting.
      if (next < now) next = now + period;
    }
  }
};

Monitor::Monitor(AssuranceCase c, MonitorConfig config) : impl_(std::make_unique<Impl>()) {
  Impl& s = *impl_;
  s.c = std::move(c);
  s.config = std::move(config);
  if (s.config.interval_ms < 1) throw std::invalid_argument("interval must be at least 1 ms");
  if (s.config.ingest.rfind("file:", 0) != 0 && s.config.ingest.rfind("tcp:", 0) != 0) {
    throw std::invalid_argument("ingest must be file:PATH or tcp:PORT, got '" + s.config.ingest + "'");
  }
  if (s.config.status_path.empty()) throw std::invalid_argument("status path is required");

  std::vector<std::string> ids = s.config.dynamic_artifact_ids;
  if (ids.empty()) {
    for (const ArtifactRecord* r : s.c.all_artifacts()) {
      if (auto it = r->metadata.find("dynamic"); it != r->metadata.end() && it->second == "true") {
        ids.push_back(r->id);
      }
    }
  }
  for (const std::string& id : ids) {
    const ArtifactRecord* r = s.c.find_artifact(id);
    if (!r) throw std::invalid_argument("no artifact named '" + id + "'");
    s.dynamic.push_back(r);
    if (auto it = r->metadata.find("driver"); it != r->metadata.end() && it->second == "ObstacleReading") {
      s.driver_target = r;
    }
  }
  if (s.dynamic.empty()) throw std::invalid_argument("the case has no dynamic artifacts");
  if (!s.driver_target) throw std::invalid_argument("no dynamic artifact has driver=ObstacleReading");
  s.runtime_path = resolve_document(*s.driver_target, s.config.root);

  s.subset = impacted_by(s.c, ids);
  if (s.subset.empty()) throw std::invalid_argument("no node cites a dynamic artifact");

  const std::set<std::string> dynamic_ids(ids.begin(), ids.end());
  for (const ArtifactRecord* r : s.c.all_artifacts()) {
    if (!dynamic_ids.count(r->id)) {
      s.static_results[r->id] = evaluate_artifact(*r, {s.config.root, s.config.backend});
    }
  }
  std::map<std::string, ArtifactResult> assumed = s.static_results;
  for (const std::string& id : ids) assumed[id] = {id, true, std::nullopt, "", {}};
  const EvaluationReport reference = propagate(s.c, std::move(assumed));
  for (const auto& [id, v] : reference.verdicts) {
    if (v.status == Status::Valid) s.valid_in_reference.insert(id);
  }
}

Monitor::~Monitor() { stop(); }

void Monitor::start() {
  Impl& s = *impl_;
  if (s.running) return;
  if (s.config.ingest.rfind("tcp:", 0) == 0) {
    int port = -1;
    try {
      port = std::stoi(s.config.ingest.substr(4));
    } catch (const std::exception&) {
    }
    if (port < 0 || port > 65535) throw std::invalid_argument("bad TCP port in '" + s.config.ingest + "'");
    s.bind_tcp(port);
  }
  s.degraded = false;
  try {
    s.current_bytes = read_file(s.runtime_path);
    s.current_seq = Impl::seq_of(s.current_bytes, 0);
  } catch (const IoError&) {
    s.degraded = true;
  }
  {
    std::lock_guard<std::mutex> lock(s.ingest_mu);
    s.last_accepted = s.current_seq;
  }
  {
    std::lock_guard<std::mutex> lock(s.pending_mu);
    s.pending.clear();
  }
  s.evaluations = 0;
  s.rejected = 0;
  s.running = true;
  s.tick();
  if (s.listen_fd >= 0) {
    s.ingester = std::thread([&s] { s.serve_tcp(); });
  } else {
    const fs::path path = s.config.ingest.substr(5);
    s.ingester = std::thread([&s, path] { s.tail_file(path); });
  }
  s.ticker = std::thread([&s] { s.run_ticks(); });
}

void Monitor::stop() {
  Impl& s = *impl_;
  {
    std::lock_guard<std::mutex> lock(s.wake_mu);
    s.running = false;
  }
  s.wake.notify_all();
  if (s.ticker.joinable()) s.ticker.join();
  if (s.ingester.joinable()) s.ingester.join();
  if (s.listen_fd >= 0) {
    ::close(s.listen_fd);
    s.listen_fd = -1;
  }
}

StatusSnapshot Monitor::current_status() const {
  std::lock_guard<std::mutex> lock(impl_->status_mu);
  return impl_->status;
}

void Monitor::set_observer(std::function<void(const StatusSnapshot&)> observer) {
  std::lock_guard<std::mutex> lock(impl_->status_mu);
  impl_->observer = std::move(observer);
}

int Monitor::tcp_port() const { return impl_->bound_port; }

bool Monitor::ingest_line(std::string_view line) { return impl_->ingest(line); }

const std::vector<std::string>& Monitor::dynamic_subset() const { return impl_->subset; }

}  // namespace caseforge::dsms
