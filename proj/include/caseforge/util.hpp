// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

namespace caseforge {

/// Position inside a text document, 1-based.
struct SourcePos {
  std::size_t line = 0;
  std::size_t column = 0;

  bool operator==(const SourcePos&) const = default;
};

/// Malformed input text: bad JSON, bad query program, bad formal document.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, SourcePos pos)
      : std::runtime_error(message), pos_(pos) {}

  SourcePos position() const { return pos_; }

 private:
  SourcePos pos_;
};

/// File-system failure (missing file, unwritable directory, ...).
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Clock = std::chrono::system_clock;

/// "2026-10-16T12:00:00.000Z"
std::string format_utc(Clock::time_point tp);
std::string utc_now();

std::string read_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file and renames it over `path`, so readers
/// observe either the old or the new content.
void write_file_atomic(const std::filesystem::path& path, std::string_view bytes);

/// Maps a byte offset to a 1-based line/column.
SourcePos pos_from_offset(std::string_view text, std::size_t offset);

}  // namespace caseforge
