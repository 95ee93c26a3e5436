// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "caseforge/formal.hpp"
#include "httplib.h"

namespace caseforge::formal {

BackendDiagnostics submit_to_backend(const std::string& endpoint, std::string_view text,
                                     int timeout_ms) {
  constexpr std::string_view kScheme = "http://";
  if (endpoint.rfind(kScheme, 0) != 0) {
    throw TransportError("backend endpoint '" + endpoint + "' must start with http://");
  }
  const std::size_t slash = endpoint.find('/', kScheme.size());
  const std::string base = endpoint.substr(0, slash);
  std::string path = slash == std::string::npos ? "" : endpoint.substr(slash);
  while (!path.empty() && path.back() == '/') path.pop_back();
  if (path.size() < 6 || path.compare(path.size() - 6, 6, "/check") != 0) path += "/check";

  httplib::Client client(base);
  if (!client.is_valid()) throw TransportError("invalid backend endpoint '" + endpoint + "'");
  const auto secs = timeout_ms / 1000;
  const auto usecs = (timeout_ms % 1000) * 1000;
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);

  auto res = client.Post(path, std::string(text), "text/plain; charset=utf-8");
  if (!res) {
    throw TransportError("backend " + endpoint + " unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw TransportError("backend " + endpoint + " answered HTTP " + std::to_string(res->status));
  }
  try {
    return diagnostics_from_json(res->body);
  } catch (const ParseError& e) {
    throw TransportError("backend " + endpoint + ": " + e.what());
  }
}

}  // namespace caseforge::formal
