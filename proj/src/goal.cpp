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

#include "skeletal/goal.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>

namespace skeletal {

std::string_view to_string(VarType t) {
  switch (t) {
    case VarType::name: return "name";
    case VarType::text: return "text";
    case VarType::nonce: return "nonce";
    case VarType::skey: return "skey";
    case VarType::akey: return "akey";
    case VarType::mesg: return "mesg";
    case VarType::node: return "node";
  }
  return "?";
}

std::optional<VarType> var_type_from_string(std::string_view s) {
  if (s == "mesg") return VarType::mesg;
  if (s == "node") return VarType::node;
  if (auto sort = sort_from_string(s)) {
    switch (*sort) {
      case Sort::name: return VarType::name;
      case Sort::text: return VarType::text;
      case Sort::nonce: return VarType::nonce;
      case Sort::skey: return VarType::skey;
      case Sort::akey: return VarType::akey;
    }
  }
  return std::nullopt;
}

std::optional<Sort> sort_of(VarType t) {
  switch (t) {
    case VarType::name: return Sort::name;
    case VarType::text: return Sort::text;
    case VarType::nonce: return Sort::nonce;
    case VarType::skey: return Sort::skey;
    case VarType::akey: return Sort::akey;
    default: return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// GoalTerm

GoalTerm GoalTerm::variable(std::string name) {
  GoalTerm t;
  t.kind_ = Kind::variable;
  t.name_ = std::move(name);
  return t;
}

GoalTerm GoalTerm::sign_key(GoalTerm arg) {
  GoalTerm t;
  t.kind_ = Kind::sign_key;
  t.arg_ = std::make_shared<const GoalTerm>(std::move(arg));
  return t;
}

GoalTerm GoalTerm::public_key(GoalTerm arg) {
  GoalTerm t;
  t.kind_ = Kind::public_key;
  t.arg_ = std::make_shared<const GoalTerm>(std::move(arg));
  return t;
}

GoalTerm GoalTerm::inverse(GoalTerm arg) {
  GoalTerm t;
  t.kind_ = Kind::inverse;
  t.arg_ = std::make_shared<const GoalTerm>(std::move(arg));
  return t;
}

void GoalTerm::collect_variables(std::set<std::string>& out) const {
  if (is_variable()) {
    out.insert(name_);
  } else {
    arg_->collect_variables(out);
  }
}

GoalTerm GoalTerm::substitute(const std::string& var,
                              const GoalTerm& replacement) const {
  switch (kind_) {
    case Kind::variable: return name_ == var ? replacement : *this;
    case Kind::sign_key: return sign_key(arg_->substitute(var, replacement));
    case Kind::public_key: return public_key(arg_->substitute(var, replacement));
    case Kind::inverse: return inverse(arg_->substitute(var, replacement));
  }
  return *this;
}

bool operator==(const GoalTerm& a, const GoalTerm& b) {
  if (a.kind_ != b.kind_) return false;
  if (a.is_variable()) return a.name_ == b.name_;
  return *a.arg_ == *b.arg_;
}

std::string to_string(const GoalTerm& t) {
  switch (t.kind()) {
    case GoalTerm::Kind::variable: return t.name();
    case GoalTerm::Kind::sign_key: return "(sk " + to_string(t.argument()) + ")";
    case GoalTerm::Kind::public_key: return "(pk " + to_string(t.argument()) + ")";
    case GoalTerm::Kind::inverse: return "(invk " + to_string(t.argument()) + ")";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Formulas

bool is_role_predicate(const AtomicFormula& f) {
  return std::holds_alternative<RolePredicate>(f) ||
         std::holds_alternative<ListenPredicate>(f);
}

std::set<std::string> free_variables(const AtomicFormula& f) {
  std::set<std::string> out;
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RolePredicate>) {
          out.insert(p.node);
          for (const auto& [param, t] : p.args) t.collect_variables(out);
        } else if constexpr (std::is_same_v<T, ListenPredicate>) {
          out.insert(p.node);
          p.value.collect_variables(out);
        } else if constexpr (std::is_same_v<T, NonPredicate> ||
                             std::is_same_v<T, UnqPredicate>) {
          p.value.collect_variables(out);
        } else if constexpr (std::is_same_v<T, ColPredicate> ||
                             std::is_same_v<T, PrecPredicate>) {
          out.insert(p.first);
          out.insert(p.second);
        } else if constexpr (std::is_same_v<T, EqPredicate>) {
          p.left.collect_variables(out);
          p.right.collect_variables(out);
        }
      },
      f);
  return out;
}

std::string to_string(const AtomicFormula& f) {
  return std::visit(
      [](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RolePredicate>) {
          std::string s = "(p \"" + p.role + "\" " + std::to_string(p.index) +
                          " " + p.node;
          for (const auto& [param, t] : p.args) {
            s += " (" + param + " " + to_string(t) + ")";
          }
          return s + ")";
        } else if constexpr (std::is_same_v<T, ListenPredicate>) {
          return "(lsn " + p.node + " " + to_string(p.value) + ")";
        } else if constexpr (std::is_same_v<T, NonPredicate>) {
          return "(non " + to_string(p.value) + ")";
        } else if constexpr (std::is_same_v<T, UnqPredicate>) {
          return "(unq " + to_string(p.value) + ")";
        } else if constexpr (std::is_same_v<T, ColPredicate>) {
          return "(col " + p.first + " " + p.second + ")";
        } else if constexpr (std::is_same_v<T, PrecPredicate>) {
          return "(prec " + p.first + " " + p.second + ")";
        } else if constexpr (std::is_same_v<T, EqPredicate>) {
          return "(= " + to_string(p.left) + " " + to_string(p.right) + ")";
        } else {
          return "(false)";
        }
      },
      f);
}

std::set<std::string> SecurityClaim::free_variables() const {
  std::set<std::string> out;
  for (const auto& f : conjuncts) {
    auto v = skeletal::free_variables(f);
    out.insert(v.begin(), v.end());
  }
  for (const auto& [var, t] : eliminated) {
    out.insert(var);
    t.collect_variables(out);
  }
  return out;
}

std::vector<VarDecl> SecurityGoal::existential_vars() const {
  std::vector<VarDecl> out;
  for (const Disjunct& d : conclusion) {
    for (const VarDecl& v : d.existentials) {
      if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
    }
  }
  return out;
}

const VarDecl* SecurityGoal::find_var(std::string_view name) const {
  for (const VarDecl& v : universals) {
    if (v.name == name) return &v;
  }
  for (const Disjunct& d : conclusion) {
    for (const VarDecl& v : d.existentials) {
      if (v.name == name) return &v;
    }
  }
  return nullptr;
}

std::string to_string(const Value& v) {
  if (const auto* n = std::get_if<NodeRef>(&v)) return "node " + to_string(*n);
  return to_string(std::get<Term>(v));
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

using Scope = std::map<std::string, VarType>;

const std::string& symbol(const SExpr& e, std::string_view what) {
  if (!e.is_symbol()) {
    throw ParseError(e.where, "expected " + std::string(what) + ", got " +
                                  to_string(e));
  }
  return e.text;
}

std::vector<VarDecl> parse_decls(const SExpr& e, Scope& scope) {
  if (!e.is_list() || e.items.empty()) {
    throw ParseError(e.where, "expected a variable declaration list");
  }
  std::vector<VarDecl> out;
  for (const SExpr& group : e.items) {
    if (!group.is_list() || group.items.size() < 2) {
      throw ParseError(group.where, "expected (<var>+ <sort|node>)");
    }
    const std::string& type_name = symbol(group.items.back(), "sort");
    auto type = var_type_from_string(type_name);
    if (!type) throw ParseError(group.items.back().where, "unknown sort " + type_name);
    for (std::size_t i = 0; i + 1 < group.items.size(); ++i) {
      const std::string& name = symbol(group.items[i], "variable");
      if (scope.contains(name)) {
        throw ParseError(group.items[i].where,
                         "variable " + name + " declared twice (clause 1: "
                         "universal and existential variables must be disjoint)");
      }
      scope.emplace(name, *type);
      out.push_back(VarDecl{name, *type});
    }
  }
  return out;
}

// Value type of a goal term; node variables yield VarType::node.
VarType term_type(const GoalTerm& t, const Scope& scope, SourceLocation where) {
  switch (t.kind()) {
    case GoalTerm::Kind::variable: {
      auto it = scope.find(t.name());
      if (it == scope.end()) throw ParseError(where, "undeclared variable " + t.name());
      return it->second;
    }
    case GoalTerm::Kind::sign_key:
    case GoalTerm::Kind::public_key:
      if (term_type(t.argument(), scope, where) != VarType::name) {
        throw ParseError(where, "sk/pk expect a name: " + to_string(t));
      }
      return VarType::akey;
    case GoalTerm::Kind::inverse: {
      VarType inner = term_type(t.argument(), scope, where);
      if (inner != VarType::akey && inner != VarType::skey) {
        throw ParseError(where, "inv expects a key: " + to_string(t));
      }
      return inner;
    }
  }
  return VarType::mesg;
}

GoalTerm parse_term(const SExpr& e, const Scope& scope) {
  if (e.is_symbol()) {
    if (!scope.contains(e.text)) {
      throw ParseError(e.where, "undeclared variable " + e.text);
    }
    return GoalTerm::variable(e.text);
  }
  if (!e.is_list() || e.items.size() != 2 || !e.items[0].is_symbol()) {
    throw ParseError(e.where, "expected a variable or key term, got " + to_string(e));
  }
  const std::string& head = e.items[0].text;
  GoalTerm arg = parse_term(e.items[1], scope);
  GoalTerm out = head == "sk"                     ? GoalTerm::sign_key(arg)
                 : head == "pk"                   ? GoalTerm::public_key(arg)
                 : (head == "inv" || head == "invk") ? GoalTerm::inverse(arg)
                                                     : throw ParseError(
                                                           e.where,
                                                           "unknown key function " + head);
  term_type(out, scope, e.where);
  return out;
}

std::string node_var(const SExpr& e, const Scope& scope) {
  const std::string& name = symbol(e, "node variable");
  auto it = scope.find(name);
  if (it == scope.end()) throw ParseError(e.where, "undeclared variable " + name);
  if (it->second != VarType::node) {
    throw ParseError(e.where, "variable " + name + " is not a node variable");
  }
  return name;
}

GoalTerm message_term(const SExpr& e, const Scope& scope) {
  GoalTerm t = parse_term(e, scope);
  if (term_type(t, scope, e.where) == VarType::node) {
    throw ParseError(e.where, "expected a message term, got node variable " +
                                  to_string(t));
  }
  return t;
}

bool param_accepts(const Param& p, VarType t) {
  if (t == VarType::node) return false;
  if (!p.sort) return true;
  return sort_of(t) == p.sort;
}

AtomicFormula parse_atomic(const SExpr& e, const Scope& scope,
                           const Protocol& protocol) {
  if (!e.is_list() || e.items.empty() || !e.items[0].is_symbol()) {
    throw ParseError(e.where, "expected an atomic formula, got " + to_string(e));
  }
  const std::string& head = e.items[0].text;
  const auto arity = [&](std::size_t n) {
    if (e.items.size() != n + 1) {
      throw ParseError(e.where, head + " takes " + std::to_string(n) +
                                    " argument(s)");
    }
  };
  if (head == "p") {
    if (e.items.size() < 4 || e.items[1].kind != SExpr::Kind::string ||
        e.items[2].kind != SExpr::Kind::number) {
      throw ParseError(e.where, "expected (p \"<role>\" <index> <node> (<param> <term>)*)");
    }
    RolePredicate rp;
    rp.role = e.items[1].text;
    const Role* role = protocol.find_role(rp.role);
    if (!role) throw ParseError(e.items[1].where, "unknown role " + rp.role);
    rp.index = static_cast<int>(e.items[2].number);
    if (rp.index < 1 || rp.index > role->length()) {
      throw ParseError(e.items[2].where, "index " + std::to_string(rp.index) +
                                             " out of range for role " + rp.role);
    }
    rp.node = node_var(e.items[3], scope);
    std::map<std::string, GoalTerm> given;
    for (std::size_t i = 4; i < e.items.size(); ++i) {
      const SExpr& a = e.items[i];
      if (!a.is_list() || a.items.size() != 2) {
        throw ParseError(a.where, "expected (<param> <term>)");
      }
      const std::string& param = symbol(a.items[0], "parameter");
      const Param* decl = role->find_param(param);
      if (!decl) {
        throw ParseError(a.items[0].where, "unknown parameter " + param +
                                               " of role " + rp.role);
      }
      GoalTerm t = parse_term(a.items[1], scope);
      if (!param_accepts(*decl, term_type(t, scope, a.where))) {
        throw ParseError(a.where, "argument " + to_string(t) +
                                      " does not fit the sort of parameter " + param);
      }
      if (!given.emplace(param, t).second) {
        throw ParseError(a.where, "parameter " + param + " given twice");
      }
    }
    for (const Param& p : role->params_through(rp.index)) {
      auto it = given.find(p.id);
      if (it == given.end()) {
        throw ParseError(e.where, "missing parameter " + p.id + " of " + rp.role +
                                      " at index " + std::to_string(rp.index));
      }
      rp.args.emplace_back(p.id, it->second);
      given.erase(it);
    }
    if (!given.empty()) {
      throw ParseError(e.where, "parameter " + given.begin()->first +
                                    " does not occur in the first " +
                                    std::to_string(rp.index) + " events of " + rp.role);
    }
    return rp;
  }
  if (head == "lsn") {
    arity(2);
    return ListenPredicate{node_var(e.items[1], scope),
                           message_term(e.items[2], scope)};
  }
  if (head == "non" || head == "unq") {
    arity(1);
    GoalTerm t = message_term(e.items[1], scope);
    if (term_type(t, scope, e.where) == VarType::mesg) {
      throw ParseError(e.where, head + " expects an atomic value");
    }
    if (head == "non") return NonPredicate{t};
    return UnqPredicate{t};
  }
  if (head == "col" || head == "prec") {
    arity(2);
    std::string a = node_var(e.items[1], scope);
    std::string b = node_var(e.items[2], scope);
    if (head == "col") return ColPredicate{a, b};
    return PrecPredicate{a, b};
  }
  if (head == "=") {
    arity(2);
    GoalTerm l = parse_term(e.items[1], scope);
    GoalTerm r = parse_term(e.items[2], scope);
    const bool ln = term_type(l, scope, e.where) == VarType::node;
    const bool rn = term_type(r, scope, e.where) == VarType::node;
    if (ln != rn) throw ParseError(e.where, "equation between a node and a message");
    return EqPredicate{l, r};
  }
  if (head == "false") {
    arity(0);
    return FalsePredicate{};
  }
  throw ParseError(e.where, "unknown predicate " + head);
}

std::vector<AtomicFormula> parse_conjunction(const SExpr& e, const Scope& scope,
                                             const Protocol& protocol) {
  std::vector<AtomicFormula> out;
  if (e.is_form("and")) {
    for (std::size_t i = 1; i < e.items.size(); ++i) {
      out.push_back(parse_atomic(e.items[i], scope, protocol));
    }
  } else {
    out.push_back(parse_atomic(e, scope, protocol));
  }
  return out;
}

void substitute_var(AtomicFormula& f, const std::string& var,
                    const GoalTerm& replacement) {
  const auto rename_node = [&](std::string& n) {
    if (n == var) n = replacement.name();
  };
  std::visit(
      [&](auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RolePredicate>) {
          rename_node(p.node);
          for (auto& [param, t] : p.args) t = t.substitute(var, replacement);
        } else if constexpr (std::is_same_v<T, ListenPredicate>) {
          rename_node(p.node);
          p.value = p.value.substitute(var, replacement);
        } else if constexpr (std::is_same_v<T, NonPredicate> ||
                             std::is_same_v<T, UnqPredicate>) {
          p.value = p.value.substitute(var, replacement);
        } else if constexpr (std::is_same_v<T, ColPredicate> ||
                             std::is_same_v<T, PrecPredicate>) {
          rename_node(p.first);
          rename_node(p.second);
        } else if constexpr (std::is_same_v<T, EqPredicate>) {
          p.left = p.left.substitute(var, replacement);
          p.right = p.right.substitute(var, replacement);
        }
      },
      f);
}

bool mentions(const GoalTerm& t, const std::string& var) {
  std::set<std::string> vs;
  t.collect_variables(vs);
  return vs.contains(var);
}

// Replaces each solvable equation by a substitution applied to the rest.
// Equations that cannot be solved (e.g. sk(a) = pk(b)) stay as conjuncts.
void eliminate_equations(SecurityClaim& claim, const Scope& scope) {
  std::vector<AtomicFormula> pending = std::move(claim.conjuncts);
  claim.conjuncts.clear();
  std::vector<std::pair<GoalTerm, GoalTerm>> eqs;
  std::vector<AtomicFormula> rest;
  for (auto& f : pending) {
    if (auto* eq = std::get_if<EqPredicate>(&f)) {
      eqs.emplace_back(eq->left, eq->right);
    } else {
      rest.push_back(std::move(f));
    }
  }
  const auto replace_everywhere = [&](const std::string& var, const GoalTerm& by) {
    for (auto& f : rest) substitute_var(f, var, by);
    for (auto& [l, r] : eqs) {
      l = l.substitute(var, by);
      r = r.substitute(var, by);
    }
    for (auto& [v, t] : claim.eliminated) t = t.substitute(var, by);
    claim.eliminated.emplace_back(var, by);
  };
  while (!eqs.empty()) {
    auto [l, r] = eqs.front();
    eqs.erase(eqs.begin());
    if (l == r) continue;
    const auto type_of = [&](const GoalTerm& t) {
      return term_type(t, scope, SourceLocation{});
    };
    if (type_of(l) != type_of(r) &&
        !(type_of(l) == VarType::mesg || type_of(r) == VarType::mesg)) {
      rest.push_back(EqPredicate{l, r});
      continue;
    }
    if (l.is_variable() && !mentions(r, l.name()) &&
        (type_of(l) == type_of(r) || type_of(l) == VarType::mesg)) {
      replace_everywhere(l.name(), r);
    } else if (r.is_variable() && !mentions(l, r.name()) &&
               (type_of(l) == type_of(r) || type_of(r) == VarType::mesg)) {
      replace_everywhere(r.name(), l);
    } else if (!l.is_variable() && !r.is_variable() && l.kind() == r.kind()) {
      eqs.emplace_back(l.argument(), r.argument());
    } else if (l.kind() == GoalTerm::Kind::inverse && !r.is_variable()) {
      eqs.emplace_back(l.argument(), GoalTerm::inverse(r));
    } else if (r.kind() == GoalTerm::Kind::inverse && !l.is_variable()) {
      eqs.emplace_back(GoalTerm::inverse(l), r.argument());
    } else {
      rest.push_back(EqPredicate{l, r});
    }
  }
  claim.conjuncts = std::move(rest);
}

}  // namespace

std::string claim_violation(const std::vector<AtomicFormula>& conjuncts) {
  std::set<std::string> role_nodes;
  std::set<std::string> anchored;
  for (const auto& f : conjuncts) {
    if (!is_role_predicate(f)) continue;
    const std::string& node = std::holds_alternative<RolePredicate>(f)
                                  ? std::get<RolePredicate>(f).node
                                  : std::get<ListenPredicate>(f).node;
    if (!role_nodes.insert(node).second) {
      return "clause (a): two role predicate conjuncts share the node variable " +
             node;
    }
    auto vs = free_variables(f);
    anchored.insert(vs.begin(), vs.end());
  }
  for (const auto& f : conjuncts) {
    if (is_role_predicate(f)) continue;
    for (const std::string& v : free_variables(f)) {
      if (!anchored.contains(v)) {
        return "clause (b): variable " + v + " of " + to_string(f) +
               " does not appear as an argument to any role predicate";
      }
    }
  }
  return {};
}

SecurityGoal parse_goal(std::string_view source, const Protocol& protocol) {
  std::vector<SExpr> forms = read_sexprs(source);
  if (forms.size() != 1 || !forms[0].is_form("defgoal") ||
      forms[0].items.size() != 3) {
    throw ParseError(forms.empty() ? SourceLocation{} : forms[0].where,
                     "expected (defgoal <protocol> (forall ...))");
  }
  const SExpr& top = forms[0];
  SecurityGoal goal;
  goal.protocol = symbol(top.items[1], "protocol name");
  const SExpr& forall = top.items[2];
  if (!forall.is_form("forall") || forall.items.size() != 3) {
    throw ParseError(forall.where, "expected (forall (<decls>) (implies ...))");
  }
  Scope scope;
  goal.universals = parse_decls(forall.items[1], scope);
  const SExpr& implies = forall.items[2];
  if (!implies.is_form("implies") || implies.items.size() != 3) {
    throw ParseError(implies.where, "expected (implies <hypothesis> <conclusion>)");
  }
  goal.hypothesis.conjuncts = parse_conjunction(implies.items[1], scope, protocol);
  for (const auto& f : goal.hypothesis.conjuncts) {
    if (std::holds_alternative<FalsePredicate>(f)) {
      throw ParseError(implies.items[1].where, "false may not occur in a hypothesis");
    }
  }
  eliminate_equations(goal.hypothesis, scope);
  if (std::string why = claim_violation(goal.hypothesis.conjuncts); !why.empty()) {
    throw ParseError(implies.items[1].where, "hypothesis is not a security claim: " + why);
  }

  // Conclusion.
  const SExpr& concl = implies.items[2];
  std::vector<const SExpr*> blocks;
  if (concl.is_form("false")) {
    if (concl.items.size() != 1) throw ParseError(concl.where, "false takes no arguments");
  } else if (concl.is_form("or")) {
    for (std::size_t i = 1; i < concl.items.size(); ++i) blocks.push_back(&concl.items[i]);
  } else {
    blocks.push_back(&concl);
  }
  for (const SExpr* b : blocks) {
    Disjunct d;
    Scope local = scope;
    const SExpr* body = b;
    if (b->is_form("exists")) {
      if (b->items.size() != 3) {
        throw ParseError(b->where, "expected (exists (<decls>) (and ...))");
      }
      d.existentials = parse_decls(b->items[1], local);
      body = &b->items[2];
    }
    d.conjuncts = parse_conjunction(*body, local, protocol);
    std::set<std::string> anchored;
    for (const auto& f : d.conjuncts) {
      if (is_role_predicate(f)) {
        auto vs = free_variables(f);
        anchored.insert(vs.begin(), vs.end());
      }
    }
    for (const VarDecl& v : d.existentials) {
      if (!anchored.contains(v.name)) {
        throw ParseError(b->where, "existential variable " + v.name +
                                       " is not an argument of any role predicate");
      }
    }
    goal.conclusion.push_back(std::move(d));
  }
  // A bare (false) disjunct is the empty disjunction.
  std::erase_if(goal.conclusion, [](const Disjunct& d) {
    return d.existentials.empty() && d.conjuncts.size() == 1 &&
           std::holds_alternative<FalsePredicate>(d.conjuncts[0]);
  });
  return goal;
}

// ---------------------------------------------------------------------------
// Satisfaction

std::optional<Term> evaluate(const GoalTerm& t, const Assignment& sigma) {
  if (t.is_variable()) {
    auto it = sigma.find(t.name());
    if (it == sigma.end()) return std::nullopt;
    if (const auto* m = std::get_if<Term>(&it->second)) return *m;
    return std::nullopt;
  }
  auto inner = evaluate(t.argument(), sigma);
  if (!inner) return std::nullopt;
  switch (t.kind()) {
    case GoalTerm::Kind::sign_key:
    case GoalTerm::Kind::public_key:
      if (!inner->is_base_atom() || inner->sort() != Sort::name) return std::nullopt;
      return t.kind() == GoalTerm::Kind::sign_key ? Term::sign_key(*inner)
                                                  : Term::public_key(*inner);
    case GoalTerm::Kind::inverse:
      if (!inner->is_atom() ||
          (inner->sort() != Sort::akey && inner->sort() != Sort::skey)) {
        return std::nullopt;
      }
      return Term::inverse(*inner);
    default:
      return std::nullopt;
  }
}

namespace {

std::optional<NodeRef> node_of(const std::string& var, const Assignment& sigma,
                               const Skeleton& sk) {
  auto it = sigma.find(var);
  if (it == sigma.end()) return std::nullopt;
  const auto* n = std::get_if<NodeRef>(&it->second);
  if (!n || !sk.contains(*n)) return std::nullopt;
  return *n;
}

std::optional<Value> evaluate_value(const GoalTerm& t, const Assignment& sigma) {
  if (t.is_variable()) {
    auto it = sigma.find(t.name());
    if (it == sigma.end()) return std::nullopt;
    return it->second;
  }
  if (auto m = evaluate(t, sigma)) return Value{*m};
  return std::nullopt;
}

// Binding of the role's params for the strand prefix ending at `n`.
std::optional<Substitution> role_binding(const Skeleton& sk, const Role& role,
                                         int index, const NodeRef& n) {
  if (n.position != index) return std::nullopt;
  const Strand& s = sk.strands[n.strand];
  return instance_of(std::span<const Event>(s.events.data(), index), role, index);
}

}  // namespace

bool satisfies_atomic(const Skeleton& sk, const Protocol& protocol,
                      const Assignment& sigma, const AtomicFormula& f) {
  return std::visit(
      [&](const auto& p) -> bool {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RolePredicate>) {
          const Role* role = protocol.find_role(p.role);
          auto n = node_of(p.node, sigma, sk);
          if (!role || !n) return false;
          auto binding = role_binding(sk, *role, p.index, *n);
          if (!binding) return false;
          for (const auto& [param, t] : p.args) {
            const Param* decl = role->find_param(param);
            auto v = evaluate(t, sigma);
            if (!decl || !v) return false;
            if (binding->apply(decl->variable()) != *v) return false;
          }
          return true;
        } else if constexpr (std::is_same_v<T, ListenPredicate>) {
          auto n = node_of(p.node, sigma, sk);
          auto v = evaluate(p.value, sigma);
          if (!n || !v) return false;
          const Role& lsn = protocol.listener();
          auto binding = role_binding(sk, lsn, 1, *n);
          return binding && binding->apply(lsn.params()[0].variable()) == *v;
        } else if constexpr (std::is_same_v<T, NonPredicate>) {
          auto v = evaluate(p.value, sigma);
          return v && sk.non.contains(*v);
        } else if constexpr (std::is_same_v<T, UnqPredicate>) {
          auto v = evaluate(p.value, sigma);
          return v && sk.unique.contains(*v);
        } else if constexpr (std::is_same_v<T, ColPredicate>) {
          auto a = node_of(p.first, sigma, sk);
          auto b = node_of(p.second, sigma, sk);
          return a && b && a->strand == b->strand;
        } else if constexpr (std::is_same_v<T, PrecPredicate>) {
          auto a = node_of(p.first, sigma, sk);
          auto b = node_of(p.second, sigma, sk);
          return a && b && OrderClosure(sk).preceq(*a, *b);
        } else if constexpr (std::is_same_v<T, EqPredicate>) {
          auto a = evaluate_value(p.left, sigma);
          auto b = evaluate_value(p.right, sigma);
          return a && b && *a == *b;
        } else {
          return false;
        }
      },
      f);
}

bool satisfies_conjunction(const Skeleton& sk, const Protocol& protocol,
                           const Assignment& sigma,
                           const std::vector<AtomicFormula>& conjuncts) {
  return std::all_of(conjuncts.begin(), conjuncts.end(), [&](const auto& f) {
    return satisfies_atomic(sk, protocol, sigma, f);
  });
}

bool satisfies_claim(const Skeleton& sk, const Protocol& protocol,
                     const Assignment& sigma, const SecurityClaim& c) {
  if (!satisfies_conjunction(sk, protocol, sigma, c.conjuncts)) return false;
  // Eliminated equations must hold as well.
  for (const auto& [var, t] : c.eliminated) {
    auto a = evaluate_value(GoalTerm::variable(var), sigma);
    auto b = evaluate_value(t, sigma);
    if (!a || !b || *a != *b) return false;
  }
  return true;
}

namespace {

class WitnessSearch {
 public:
  WitnessSearch(const Skeleton& sk, const Protocol& protocol,
                const Disjunct& disjunct, const SecurityGoal& goal)
      : sk_(sk), protocol_(protocol), goal_(goal) {
    for (const VarDecl& v : disjunct.existentials) free_.emplace(v.name, v.type);
    for (const auto& f : disjunct.conjuncts) {
      (is_role_predicate(f) ? anchors_ : checks_).push_back(&f);
    }
  }

  std::optional<Assignment> run(Assignment sigma) {
    if (search(0, sigma)) return sigma;
    return std::nullopt;
  }

 private:
  bool search(std::size_t i, Assignment& sigma) {
    if (i == anchors_.size()) {
      for (const AtomicFormula* f : checks_) {
        if (!satisfies_atomic(sk_, protocol_, sigma, *f)) return false;
      }
      return true;
    }
    const AtomicFormula& f = *anchors_[i];
    const Role* role = nullptr;
    int index = 1;
    std::string node;
    if (const auto* rp = std::get_if<RolePredicate>(&f)) {
      role = protocol_.find_role(rp->role);
      index = rp->index;
      node = rp->node;
    } else {
      role = &protocol_.listener();
      node = std::get<ListenPredicate>(f).node;
    }
    if (!role) return false;
    std::vector<NodeRef> candidates;
    if (auto it = sigma.find(node); it != sigma.end()) {
      if (const auto* n = std::get_if<NodeRef>(&it->second)) candidates.push_back(*n);
    } else if (free_.contains(node) && free_.at(node) == VarType::node) {
      for (int s = 0; s < static_cast<int>(sk_.strands.size()); ++s) {
        if (sk_.strands[s].length() >= index) candidates.push_back({s, index});
      }
    }
    for (const NodeRef& n : candidates) {
      if (!sk_.contains(n)) continue;
      auto binding = role_binding(sk_, *role, index, n);
      if (!binding) continue;
      Assignment next = sigma;
      next[node] = n;
      bool ok = true;
      if (const auto* rp = std::get_if<RolePredicate>(&f)) {
        for (const auto& [param, t] : rp->args) {
          const Param* decl = role->find_param(param);
          if (!decl || !bind(t, binding->apply(decl->variable()), next)) {
            ok = false;
            break;
          }
        }
      } else {
        const auto& lp = std::get<ListenPredicate>(f);
        ok = bind(lp.value, binding->apply(role->params()[0].variable()), next);
      }
      if (ok && search(i + 1, next)) {
        sigma = std::move(next);
        return true;
      }
    }
    return false;
  }

  // Solves `t = value` for the unbound existential variables of t.
  bool bind(const GoalTerm& t, const Term& value, Assignment& sigma) const {
    switch (t.kind()) {
      case GoalTerm::Kind::variable: {
        if (auto it = sigma.find(t.name()); it != sigma.end()) {
          const auto* m = std::get_if<Term>(&it->second);
          return m && *m == value;
        }
        auto it = free_.find(t.name());
        if (it == free_.end()) return false;
        if (it->second == VarType::node) return false;
        if (auto sort = sort_of(it->second)) {
          if (!value.is_atom() || value.sort() != *sort) return false;
        }
        sigma[t.name()] = value;
        return true;
      }
      case GoalTerm::Kind::sign_key:
        return value.kind() == TermKind::sign_key &&
               bind(t.argument(), value.argument(), sigma);
      case GoalTerm::Kind::public_key:
        return value.kind() == TermKind::public_key &&
               bind(t.argument(), value.argument(), sigma);
      case GoalTerm::Kind::inverse:
        if (!value.is_atom() ||
            (value.sort() != Sort::akey && value.sort() != Sort::skey)) {
          return false;
        }
        return bind(t.argument(), Term::inverse(value), sigma);
    }
    return false;
  }

  const Skeleton& sk_;
  const Protocol& protocol_;
  const SecurityGoal& goal_;
  std::map<std::string, VarType> free_;
  std::vector<const AtomicFormula*> anchors_;
  std::vector<const AtomicFormula*> checks_;
};

}  // namespace

std::optional<Assignment> find_witness(const Skeleton& sk,
                                       const Protocol& protocol,
                                       const Assignment& sigma,
                                       const Disjunct& disjunct,
                                       const SecurityGoal& goal) {
  return WitnessSearch(sk, protocol, disjunct, goal).run(sigma);
}

bool satisfies_conclusion(const Skeleton& sk, const Protocol& protocol,
                          const Assignment& sigma, const SecurityGoal& goal) {
  for (const Disjunct& d : goal.conclusion) {
    if (find_witness(sk, protocol, sigma, d, goal)) return true;
  }
  return false;
}

Assignment push_forward(const Homomorphism& h, const Assignment& sigma) {
  Assignment out;
  for (const auto& [var, v] : sigma) {
    if (const auto* n = std::get_if<NodeRef>(&v)) {
      out.emplace(var, h(*n));
    } else {
      out.emplace(var, h(std::get<Term>(v)));
    }
  }
  return out;
}

}  // namespace skeletal
