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

#ifndef SKELETAL_PROTOCOL_HPP
#define SKELETAL_PROTOCOL_HPP

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "skeletal/sexpr.hpp"
#include "skeletal/term.hpp"

namespace skeletal {

enum class Direction { transmit, receive };

std::string_view to_string(Direction d);

struct Event {
  Direction direction;
  Term message;

  friend bool operator==(const Event&, const Event&) = default;
};

/// Signed rendering, `+msg` for transmissions and `-msg` for receptions.
std::string to_string(const Event& e);

/// Role parameter. A missing sort declares an indeterminate (`mesg`).
struct Param {
  std::string id;
  std::optional<Sort> sort;

  Term variable() const;
};

/// A parameterized strand: the trace is written over the params only.
class Role {
 public:
  Role(std::string name, std::vector<Param> params, std::vector<Event> trace);

  const std::string& name() const { return name_; }
  const std::vector<Param>& params() const { return params_; }
  const std::vector<Event>& trace() const { return trace_; }
  int length() const { return static_cast<int>(trace_.size()); }

  const Param* find_param(std::string_view id) const;
  /// Params occurring in the first `j` events, in declaration order.
  /// These are the arguments of the role predicate for node j.
  std::vector<Param> params_through(int j) const;

 private:
  std::string name_;
  std::vector<Param> params_;
  std::vector<Event> trace_;
};

inline constexpr std::string_view kListenerRole = "lsn";

/// A named set of roles. The listener role `lsn` (one reception of an
/// indeterminate `x`) is always present as the last role.
class Protocol {
 public:
  Protocol(std::string name, std::vector<Role> roles);

  const std::string& name() const { return name_; }
  const std::vector<Role>& roles() const { return roles_; }
  const Role* find_role(std::string_view name) const;
  const Role& listener() const { return roles_.back(); }

 private:
  std::string name_;
  std::vector<Role> roles_;
};

/// Parses `(defprotocol name (defrole ...)+)`. Throws ParseError.
Protocol parse_protocol(std::string_view source);

/// Parses a message form against a scope of declared identifiers.
Term parse_message(const SExpr& e, const std::map<std::string, Term>& scope);

/// Inverse of parse_protocol, up to whitespace.
std::string to_source(const Protocol& p);

/// A role prefix under a binding of its params.
struct StrandInstance {
  const Role* role = nullptr;
  int length = 0;
  Substitution binding;
  std::vector<Event> events;
};

/// Throws std::invalid_argument for an out-of-range length or a binding that
/// leaves a param of the first `length` events unbound.
StrandInstance instantiate(const Role& role, const Substitution& binding,
                           int length);

/// Finds the binding under which the first j events of `role` become
/// `events`, matching role params against the concrete messages.
std::optional<Substitution> instance_of(std::span<const Event> events,
                                        const Role& role, int j);

}  // namespace skeletal

#endif  // SKELETAL_PROTOCOL_HPP
