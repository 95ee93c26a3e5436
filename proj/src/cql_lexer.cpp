// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include "cql_lexer.hpp"

#include <array>
#include <cctype>
#include <charconv>

namespace caseforge::cql {

namespace {

constexpr std::array<std::string_view, 11> kKeywords = {
    "var", "for", "in", "if", "else", "return", "and", "or", "not", "true", "false"};

// Longest match first.
constexpr std::array<std::string_view, 20> kPuncts = {
    "<>", "<=", ">=", "+=", "-=", "(", ")", "{", "}", ".", ",", ";",
    "|", "!", "=", "<", ">", "+", "-", "*"};

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

}  // namespace

std::vector<Token> tokenize(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  SourcePos pos{1, 1};

  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n && i < src.size(); ++k, ++i) {
      if (src[i] == '\n') {
        ++pos.line;
        pos.column = 1;
      } else {
        ++pos.column;
      }
    }
  };

  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (src.compare(i, 2, "//") == 0) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (src.compare(i, 2, "/*") == 0) {
      const SourcePos start = pos;
      advance(2);
      while (i < src.size() && src.compare(i, 2, "*/") != 0) advance(1);
      if (i >= src.size()) throw ParseError("unterminated comment", start);
      advance(2);
      continue;
    }

    const SourcePos start = pos;
    if (is_ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && is_ident_char(src[j])) ++j;
      std::string word(src.substr(i, j - i));
      bool keyword = false;
      for (auto k : kKeywords) keyword = keyword || (k == word);
      out.push_back({keyword ? TokenKind::Keyword : TokenKind::Identifier, word, 0, start});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          while (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) ++k;
          j = k;
        }
      }
      Token t{TokenKind::Number, std::string(src.substr(i, j - i)), 0, start};
      auto [ptr, ec] = std::from_chars(src.data() + i, src.data() + j, t.number);
      if (ec != std::errc() || ptr != src.data() + j) throw ParseError("bad number literal", start);
      out.push_back(std::move(t));
      advance(j - i);
      continue;
    }
    if (c == '"' || c == '\'') {
      const char quote = c;
      advance(1);
      std::string body;
      while (true) {
        if (i >= src.size() || src[i] == '\n') throw ParseError("unterminated string literal", start);
        const char d = src[i];
        if (d == quote) {
          advance(1);
          break;
        }
        if (d == '\\') {
          if (i + 1 >= src.size()) throw ParseError("unterminated string literal", start);
          const char e = src[i + 1];
          switch (e) {
            case 'n': body += '\n'; break;
            case 't': body += '\t'; break;
            case '\\': body += '\\'; break;
            case '"': body += '"'; break;
            case '\'': body += '\''; break;
            default: throw ParseError(std::string("unknown escape \\") + e, pos);
          }
          advance(2);
          continue;
        }
        body += d;
        advance(1);
      }
      out.push_back({TokenKind::String, std::move(body), 0, start});
      continue;
    }
    if (c == '/') {
      out.push_back({TokenKind::Punct, "/", 0, start});
      advance(1);
      continue;
    }
    bool matched = false;
    for (auto p : kPuncts) {
      if (src.compare(i, p.size(), p) == 0) {
        out.push_back({TokenKind::Punct, std::string(p), 0, start});
        advance(p.size());
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(std::string("unexpected character '") + c + "'", start);
  }
  out.push_back({TokenKind::End, "", 0, pos});
  return out;
}

}  // namespace caseforge::cql
