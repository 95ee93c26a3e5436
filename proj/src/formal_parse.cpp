// Copyright 2026 The caseforge Authors
// SPDX-License-Identifier: Apache-2.0

#include <cctype>

#include "caseforge/formal.hpp"

namespace caseforge::formal {

namespace {

bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '-';
}

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  FormalDocument document() {
    FormalDocument doc;
    skip_space();
    while (i_ < text_.size()) {
      doc.statements.push_back(statement());
      skip_space();
    }
    return doc;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, pos_from_offset(text_, i_));
  }

  void skip_space() {
    while (i_ < text_.size()) {
      if (std::isspace(static_cast<unsigned char>(text_[i_]))) {
        ++i_;
      } else if (text_.compare(i_, 2, "(*") == 0) {
        const std::size_t start = i_;
        const std::size_t end = text_.find("*)", i_ + 2);
        if (end == std::string_view::npos) {
          i_ = start;
          fail("unterminated comment");
        }
        i_ = end + 2;
      } else {
        break;
      }
    }
  }

  bool at(std::string_view s) const { return text_.compare(i_, s.size(), s) == 0; }

  void expect(std::string_view s) {
    skip_space();
    if (!at(s)) fail("expected '" + std::string(s) + "'");
    i_ += s.size();
  }

  std::string word(const char* what) {
    skip_space();
    const std::size_t start = i_;
    while (i_ < text_.size() && is_name_char(text_[i_])) ++i_;
    if (i_ == start) fail(std::string("expected ") + what);
    return std::string(text_.substr(start, i_ - start));
  }

  std::string description() {
    expect("<<");
    std::string out;
    while (true) {
      if (i_ >= text_.size()) fail("unterminated description");
      const char c = text_[i_];
      if (c == '\\') {
        if (i_ + 1 >= text_.size()) fail("unterminated description");
        const char e = text_[i_ + 1];
        if (e == 'n') {
          out += '\n';
        } else if (e == '\\' || e == '>') {
          out += e;
        } else {
          fail(std::string("unknown escape \\") + e);
        }
        i_ += 2;
        continue;
      }
      if (c == '>') {
        if (at(">>")) {
          i_ += 2;
          return out;
        }
        fail("unescaped '>' in description");
      }
      if (c == '\n') fail("line break in description");
      out += c;
      ++i_;
    }
  }

  Reference reference() {
    expect("@{");
    const std::string kind = word("reference kind");
    Reference r;
    if (kind == "Claim") {
      r.kind = RefKind::Claim;
    } else if (kind == "ArtifactReference") {
      r.kind = RefKind::ArtifactReference;
    } else if (kind == "Inference") {
      r.kind = RefKind::Inference;
    } else {
      fail("unknown reference kind '" + kind + "'");
    }
    r.name = word("referenced name");
    expect("}");
    return r;
  }

  std::vector<Reference> reference_list() {
    expect("<{");
    std::vector<Reference> out;
    skip_space();
    if (at("}>")) {
      i_ += 2;
      return out;
    }
    while (true) {
      out.push_back(reference());
      skip_space();
      if (at(",")) {
        ++i_;
        continue;
      }
      expect("}>");
      return out;
    }
  }

  Statement statement() {
    const std::size_t line = pos_from_offset(text_, i_).line;
    const std::size_t keyword_at = i_;
    const std::string keyword = word("statement keyword");
    Statement s;
    s.line = line;
    if (keyword == "Claim") {
      ClaimStmt c;
      c.name = word("claim name");
      skip_space();
      if (!at("<<")) {
        const std::size_t decl_at = i_;
        const std::string decl = word("declaration or description");
        auto parsed = parse_declaration(decl);
        if (!parsed || *parsed == Declaration::None) {
          i_ = decl_at;
          fail("unknown declaration '" + decl + "'");
        }
        c.declaration = *parsed;
      }
      c.description = description();
      s.body = std::move(c);
    } else if (keyword == "ArtifactReference") {
      ArtifactReferenceStmt a;
      a.name = word("artifact reference name");
      a.description = description();
      s.body = std::move(a);
    } else if (keyword == "Inference" || keyword == "Context") {
      std::string name = word("statement name");
      expect("src");
      auto sources = reference_list();
      expect("tgt");
      auto targets = reference_list();
      std::string desc = description();
      if (keyword == "Inference") {
        s.body = InferenceStmt{std::move(name), std::move(sources), std::move(targets), std::move(desc)};
      } else {
        s.body = ContextStmt{std::move(name), std::move(sources), std::move(targets), std::move(desc)};
      }
    } else if (keyword == "Verdict") {
      VerdictStmt v;
      v.name = word("verdict name");
      const std::size_t outcome_at = i_;
      const std::string outcome = word("'pass' or 'fail'");
      if (outcome != "pass" && outcome != "fail") {
        i_ = outcome_at;
        skip_space();
        fail("expected 'pass' or 'fail'");
      }
      v.pass = outcome == "pass";
      v.description = description();
      s.body = std::move(v);
    } else {
      i_ = keyword_at;
      fail("unknown statement '" + keyword + "'");
    }
    return s;
  }

  std::string_view text_;
  std::size_t i_ = 0;
};

}  // namespace

FormalDocument parse_formal(std::string_view text) { return Reader(text).document(); }

}  // namespace caseforge::formal
