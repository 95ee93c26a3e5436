// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "caseforge/util.hpp"

namespace caseforge::cql {

enum class TokenKind { Identifier, Keyword, Number, String, Punct, End };

struct Token {
  TokenKind kind;
  std::string text;  // identifier/keyword/punct spelling, decoded string body
  double number = 0;
  SourcePos pos;
};

std::vector<Token> tokenize(std::string_view source);

}  // namespace caseforge::cql
