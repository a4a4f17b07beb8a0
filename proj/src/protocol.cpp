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

#include "skeletal/protocol.hpp"

#include <set>
#include <sstream>
#include <stdexcept>

namespace skeletal {

std::string_view to_string(Direction d) {
  return d == Direction::transmit ? "send" : "recv";
}

std::string to_string(const Event& e) {
  return (e.direction == Direction::transmit ? "+" : "-") +
         to_string(e.message);
}

Term Param::variable() const {
  return sort ? Term::atom(id, *sort) : Term::indeterminate(id);
}

Role::Role(std::string name, std::vector<Param> params,
           std::vector<Event> trace)
    : name_(std::move(name)), params_(std::move(params)),
      trace_(std::move(trace)) {
  if (trace_.empty()) {
    throw std::invalid_argument("role " + name_ + " has an empty trace");
  }
}

const Param* Role::find_param(std::string_view id) const {
  for (const Param& p : params_) {
    if (p.id == id) return &p;
  }
  return nullptr;
}

std::vector<Param> Role::params_through(int j) const {
  std::set<Term> used;
  for (int i = 0; i < j && i < length(); ++i) {
    collect_variables(trace_[i].message, used);
  }
  std::vector<Param> out;
  for (const Param& p : params_) {
    if (used.contains(p.variable())) out.push_back(p);
  }
  return out;
}

namespace {

Role make_listener() {
  Param x{"x", std::nullopt};
  return Role(std::string(kListenerRole), {x},
              {Event{Direction::receive, x.variable()}});
}

}  // namespace

Protocol::Protocol(std::string name, std::vector<Role> roles)
    : name_(std::move(name)), roles_(std::move(roles)) {
  std::set<std::string> seen;
  for (const Role& r : roles_) {
    if (r.name() == kListenerRole) {
      throw std::invalid_argument("role name lsn is reserved for the listener");
    }
    if (!seen.insert(r.name()).second) {
      throw std::invalid_argument("duplicate role name " + r.name());
    }
  }
  roles_.push_back(make_listener());
}

const Role* Protocol::find_role(std::string_view name) const {
  for (const Role& r : roles_) {
    if (r.name() == name) return &r;
  }
  return nullptr;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

const SExpr& expect_list(const SExpr& e, std::string_view what) {
  if (!e.is_list()) throw ParseError(e.where, "expected " + std::string(what));
  return e;
}

const std::string& expect_symbol(const SExpr& e, std::string_view what) {
  if (!e.is_symbol()) {
    throw ParseError(e.where, "expected " + std::string(what) + ", got " +
                                  to_string(e));
  }
  return e.text;
}

Term require_key_atom(const SExpr& e, const Term& t) {
  if (!t.is_atom()) {
    throw ParseError(e.where, "invk expects an atomic key, got " + to_string(t));
  }
  if (t.sort() != Sort::akey && t.sort() != Sort::skey) {
    throw ParseError(e.where, "invk expects a key, got " + to_string(t) +
                                  " of sort " + std::string(to_string(*t.sort())));
  }
  return Term::inverse(t);
}

Term require_name(const SExpr& e, const Term& t, std::string_view fn) {
  if (!t.is_base_atom() || t.sort() != Sort::name) {
    throw ParseError(e.where, std::string(fn) + " expects a name, got " +
                                  to_string(t));
  }
  return t;
}

std::vector<Param> parse_vars(const SExpr& form) {
  std::vector<Param> params;
  std::set<std::string> seen;
  for (std::size_t i = 1; i < form.items.size(); ++i) {
    const SExpr& group = expect_list(form.items[i], "(<id>+ <sort>)");
    if (group.items.size() < 2) {
      throw ParseError(group.where, "variable group needs ids and a sort");
    }
    const std::string& sort_name =
        expect_symbol(group.items.back(), "sort");
    std::optional<Sort> sort;
    if (sort_name != "mesg") {
      sort = sort_from_string(sort_name);
      if (!sort) {
        throw ParseError(group.items.back().where, "unknown sort " + sort_name);
      }
    }
    for (std::size_t k = 0; k + 1 < group.items.size(); ++k) {
      const std::string& id = expect_symbol(group.items[k], "identifier");
      if (!seen.insert(id).second) {
        throw ParseError(group.items[k].where, "duplicate parameter " + id);
      }
      params.push_back(Param{id, sort});
    }
  }
  return params;
}

Role parse_role(const SExpr& form) {
  if (form.items.size() < 2) {
    throw ParseError(form.where, "defrole needs a name");
  }
  const std::string& name = expect_symbol(form.items[1], "role name");
  std::vector<Param> params;
  std::vector<Event> trace;
  bool have_vars = false;
  bool have_trace = false;
  std::map<std::string, Term> scope;
  for (std::size_t i = 2; i < form.items.size(); ++i) {
    const SExpr& clause = form.items[i];
    if (clause.is_form("vars")) {
      if (have_vars) throw ParseError(clause.where, "duplicate vars clause");
      have_vars = true;
      params = parse_vars(clause);
      for (const Param& p : params) scope.emplace(p.id, p.variable());
    } else if (clause.is_form("trace")) {
      if (have_trace) throw ParseError(clause.where, "duplicate trace clause");
      have_trace = true;
      for (std::size_t k = 1; k < clause.items.size(); ++k) {
        const SExpr& ev = clause.items[k];
        if (!ev.is_list() || ev.items.size() != 2 ||
            !(ev.is_form("send") || ev.is_form("recv"))) {
          throw ParseError(ev.where, "expected (send <msg>) or (recv <msg>)");
        }
        Direction d = ev.is_form("send") ? Direction::transmit
                                          : Direction::receive;
        trace.push_back(Event{d, parse_message(ev.items[1], scope)});
      }
    } else {
      throw ParseError(clause.where,
                       "unexpected clause in defrole " + name + ": " +
                           to_string(clause));
    }
  }
  if (trace.empty()) {
    throw ParseError(form.where, "role " + name + " has an empty trace");
  }
  return Role(name, std::move(params), std::move(trace));
}

}  // namespace

Term parse_message(const SExpr& e, const std::map<std::string, Term>& scope) {
  switch (e.kind) {
    case SExpr::Kind::symbol: {
      auto it = scope.find(e.text);
      if (it == scope.end()) {
        throw ParseError(e.where, "undeclared identifier " + e.text);
      }
      return it->second;
    }
    case SExpr::Kind::number:
    case SExpr::Kind::string:
      throw ParseError(e.where, "expected a message, got " + to_string(e));
    case SExpr::Kind::list:
      break;
  }
  if (e.items.empty() || !e.items[0].is_symbol()) {
    throw ParseError(e.where, "expected a message form");
  }
  const std::string& head = e.items[0].text;
  const auto arity = [&](std::size_t n) {
    if (e.items.size() != n + 1) {
      throw ParseError(e.where, head + " takes " + std::to_string(n) +
                                    " argument(s)");
    }
  };
  if (head == "enc") {
    arity(2);
    return Term::encryption(parse_message(e.items[1], scope),
                            parse_message(e.items[2], scope));
  }
  if (head == "cat") {
    if (e.items.size() < 3) throw ParseError(e.where, "cat needs two or more arguments");
    Term acc = parse_message(e.items.back(), scope);
    for (std::size_t i = e.items.size() - 2; i >= 1; --i) {
      acc = Term::pair(parse_message(e.items[i], scope), acc);
    }
    return acc;
  }
  if (head == "tag") {
    arity(3);
    if (e.items[1].kind != SExpr::Kind::string) {
      throw ParseError(e.items[1].where, "tag expects a quoted string");
    }
    return Term::pair(parse_message(e.items[2], scope),
                      parse_message(e.items[3], scope), e.items[1].text);
  }
  if (head == "sk" || head == "pk") {
    arity(1);
    Term a = require_name(e, parse_message(e.items[1], scope), head);
    return head == "sk" ? Term::sign_key(a) : Term::public_key(a);
  }
  if (head == "invk" || head == "inv") {
    arity(1);
    return require_key_atom(e, parse_message(e.items[1], scope));
  }
  throw ParseError(e.where, "unknown message constructor " + head);
}

Protocol parse_protocol(std::string_view source) {
  std::vector<SExpr> forms = read_sexprs(source);
  if (forms.size() != 1) {
    throw ParseError(forms.empty() ? SourceLocation{} : forms[1].where,
                     "expected exactly one defprotocol form");
  }
  const SExpr& top = forms[0];
  if (!top.is_form("defprotocol") || top.items.size() < 3) {
    throw ParseError(top.where, "expected (defprotocol <name> (defrole ...)+)");
  }
  const std::string& name = expect_symbol(top.items[1], "protocol name");
  std::vector<Role> roles;
  std::set<std::string> names;
  for (std::size_t i = 2; i < top.items.size(); ++i) {
    const SExpr& r = top.items[i];
    if (!r.is_form("defrole")) {
      throw ParseError(r.where, "expected (defrole ...)");
    }
    Role role = parse_role(r);
    if (role.name() == kListenerRole) {
      throw ParseError(r.where, "role name lsn is reserved for the listener");
    }
    if (!names.insert(role.name()).second) {
      throw ParseError(r.where, "duplicate role name " + role.name());
    }
    roles.push_back(std::move(role));
  }
  return Protocol(name, std::move(roles));
}

std::string to_source(const Protocol& p) {
  std::ostringstream os;
  os << "(defprotocol " << p.name();
  for (const Role& r : p.roles()) {
    if (r.name() == kListenerRole) continue;
    os << "\n  (defrole " << r.name() << "\n    (vars";
    // Consecutive params of one sort share a group.
    std::size_t i = 0;
    while (i < r.params().size()) {
      std::size_t j = i;
      os << " (";
      while (j < r.params().size() && r.params()[j].sort == r.params()[i].sort) {
        os << r.params()[j].id << " ";
        ++j;
      }
      const auto& s = r.params()[i].sort;
      os << (s ? to_string(*s) : std::string_view("mesg")) << ")";
      i = j;
    }
    os << ")\n    (trace";
    for (const Event& e : r.trace()) {
      os << "\n      (" << to_string(e.direction) << " " << e.message << ")";
    }
    os << "))";
  }
  os << ")\n";
  return os.str();
}

// ---------------------------------------------------------------------------

StrandInstance instantiate(const Role& role, const Substitution& binding,
                           int length) {
  if (length < 1 || length > role.length()) {
    throw std::invalid_argument("instance length " + std::to_string(length) +
                                " out of range for role " + role.name());
  }
  for (const Param& p : role.params_through(length)) {
    auto value = binding.lookup(p.variable());
    if (!value) {
      throw std::invalid_argument("parameter " + p.id + " of role " +
                                  role.name() + " is unbound");
    }
  }
  StrandInstance inst;
  inst.role = &role;
  inst.length = length;
  inst.binding = binding;
  for (int i = 0; i < length; ++i) {
    const Event& e = role.trace()[i];
    inst.events.push_back(Event{e.direction, binding.apply(e.message)});
  }
  return inst;
}

std::optional<Substitution> instance_of(std::span<const Event> events,
                                        const Role& role, int j) {
  if (j < 1 || j > role.length() || static_cast<int>(events.size()) < j) {
    return std::nullopt;
  }
  Substitution s;
  for (int i = 0; i < j; ++i) {
    const Event& tmpl = role.trace()[i];
    if (tmpl.direction != events[i].direction) return std::nullopt;
    auto next = match(tmpl.message, events[i].message, s);
    if (!next) return std::nullopt;
    s = std::move(*next);
  }
  return s;
}

}  // namespace skeletal
