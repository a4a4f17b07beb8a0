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

#ifndef SKELETAL_SEXPR_HPP
#define SKELETAL_SEXPR_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace skeletal {

struct SourceLocation {
  int line = 1;
  int column = 1;
};

/// Syntax or validation failure in a protocol or goal file.
class ParseError : public std::runtime_error {
 public:
  ParseError(SourceLocation where, const std::string& message);

  SourceLocation where() const { return where_; }
  const std::string& detail() const { return detail_; }

 private:
  SourceLocation where_;
  std::string detail_;
};

/// Minimal S-expression tree: symbols, integers, quoted strings, lists.
/// `;` starts a comment that runs to end of line.
struct SExpr {
  enum class Kind { symbol, number, string, list };

  Kind kind = Kind::list;
  std::string text;
  long long number = 0;
  std::vector<SExpr> items;
  SourceLocation where;

  bool is_symbol() const { return kind == Kind::symbol; }
  bool is_symbol(std::string_view s) const {
    return kind == Kind::symbol && text == s;
  }
  bool is_list() const { return kind == Kind::list; }
  /// True for a list whose first element is the symbol `head`.
  bool is_form(std::string_view head) const {
    return is_list() && !items.empty() && items[0].is_symbol(head);
  }
};

/// Parses every top-level form of `source`.
std::vector<SExpr> read_sexprs(std::string_view source);

std::string to_string(const SExpr& e);

}  // namespace skeletal

#endif  // SKELETAL_SEXPR_HPP
