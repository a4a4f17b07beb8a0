// Copyright 2026 The Skeletal Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "skeletal/sexpr.hpp"

#include <cctype>
#include <charconv>

namespace skeletal {

ParseError::ParseError(SourceLocation where, const std::string& message)
    : std::runtime_error(std::to_string(where.line) + ":" +
                         std::to_string(where.column) + ": " + message),
      where_(where),
      detail_(message) {}

namespace {

class Reader {
 public:
  explicit Reader(std::string_view src) : src_(src) {}

  std::vector<SExpr> read_all() {
    std::vector<SExpr> out;
    skip_space();
    while (pos_ < src_.size()) {
      out.push_back(read());
      skip_space();
    }
    return out;
  }

 private:
  SExpr read() {
    skip_space();
    if (pos_ >= src_.size()) throw ParseError(here(), "unexpected end of input");
    SourceLocation start = here();
    char c = src_[pos_];
    if (c == '(') {
      advance();
      SExpr list;
      list.kind = SExpr::Kind::list;
      list.where = start;
      for (;;) {
        skip_space();
        if (pos_ >= src_.size()) {
          throw ParseError(start, "unbalanced '(' opened here");
        }
        if (src_[pos_] == ')') {
          advance();
          return list;
        }
        list.items.push_back(read());
      }
    }
    if (c == ')') throw ParseError(start, "unexpected ')'");
    if (c == '"') return read_string(start);
    return read_atom(start);
  }

  SExpr read_string(SourceLocation start) {
    advance();
    SExpr e;
    e.kind = SExpr::Kind::string;
    e.where = start;
    while (pos_ < src_.size() && src_[pos_] != '"') {
      if (src_[pos_] == '\n') throw ParseError(start, "unterminated string");
      e.text.push_back(src_[pos_]);
      advance();
    }
    if (pos_ >= src_.size()) throw ParseError(start, "unterminated string");
    advance();
    return e;
  }

  SExpr read_atom(SourceLocation start) {
    std::size_t begin = pos_;
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (std::isspace(static_cast<unsigned char>(c)) || c == '(' ||
          c == ')' || c == '"' || c == ';') {
        break;
      }
      advance();
    }
    SExpr e;
    e.where = start;
    e.text = std::string(src_.substr(begin, pos_ - begin));
    long long value = 0;
    auto [ptr, ec] =
        std::from_chars(e.text.data(), e.text.data() + e.text.size(), value);
    if (ec == std::errc() && ptr == e.text.data() + e.text.size()) {
      e.kind = SExpr::Kind::number;
      e.number = value;
    } else {
      e.kind = SExpr::Kind::symbol;
    }
    return e;
  }

  void skip_space() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ';') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  SourceLocation here() const { return {line_, col_}; }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

void render(std::string& out, const SExpr& e) {
  switch (e.kind) {
    case SExpr::Kind::symbol: out += e.text; return;
    case SExpr::Kind::number: out += std::to_string(e.number); return;
    case SExpr::Kind::string: out += '"' + e.text + '"'; return;
    case SExpr::Kind::list:
      out += '(';
      for (std::size_t i = 0; i < e.items.size(); ++i) {
        if (i) out += ' ';
        render(out, e.items[i]);
      }
      out += ')';
      return;
  }
}

}  // namespace

std::vector<SExpr> read_sexprs(std::string_view source) {
  return Reader(source).read_all();
}

std::string to_string(const SExpr& e) {
  std::string out;
  render(out, e);
  return out;
}

}  // namespace skeletal
