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

#ifndef SKELETAL_GOAL_HPP
#define SKELETAL_GOAL_HPP

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "skeletal/protocol.hpp"
#include "skeletal/skeleton.hpp"
#include "skeletal/term.hpp"

namespace skeletal {

/// Declared type of a goal variable: a message sort, `mesg`, or `node`.
enum class VarType { name, text, nonce, skey, akey, mesg, node };

std::string_view to_string(VarType t);
std::optional<VarType> var_type_from_string(std::string_view s);
std::optional<Sort> sort_of(VarType t);

struct VarDecl {
  std::string name;
  VarType type;

  friend bool operator==(const VarDecl&, const VarDecl&) = default;
};

/// A variable or a key term sk(t), pk(t), inv(t).
class GoalTerm {
 public:
  enum class Kind { variable, sign_key, public_key, inverse };

  static GoalTerm variable(std::string name);
  static GoalTerm sign_key(GoalTerm arg);
  static GoalTerm public_key(GoalTerm arg);
  static GoalTerm inverse(GoalTerm arg);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const GoalTerm& argument() const { return *arg_; }
  bool is_variable() const { return kind_ == Kind::variable; }

  void collect_variables(std::set<std::string>& out) const;
  /// Replaces variable `var` by `replacement` throughout.
  GoalTerm substitute(const std::string& var, const GoalTerm& replacement) const;

  friend bool operator==(const GoalTerm& a, const GoalTerm& b);

 private:
  Kind kind_ = Kind::variable;
  std::string name_;
  std::shared_ptr<const GoalTerm> arg_;
};

std::string to_string(const GoalTerm& t);

struct RolePredicate {
  std::string role;
  int index = 1;
  std::string node;
  /// (param id, argument) in the role's canonical param order.
  std::vector<std::pair<std::string, GoalTerm>> args;
};
struct ListenPredicate {
  std::string node;
  GoalTerm value;
};
struct NonPredicate { GoalTerm value; };
struct UnqPredicate { GoalTerm value; };
struct ColPredicate { std::string first, second; };
struct PrecPredicate { std::string first, second; };
struct EqPredicate { GoalTerm left, right; };
struct FalsePredicate {};

using AtomicFormula =
    std::variant<RolePredicate, ListenPredicate, NonPredicate, UnqPredicate,
                 ColPredicate, PrecPredicate, EqPredicate, FalsePredicate>;

bool is_role_predicate(const AtomicFormula& f);
std::set<std::string> free_variables(const AtomicFormula& f);
std::string to_string(const AtomicFormula& f);

struct SecurityClaim {
  std::vector<AtomicFormula> conjuncts;
  /// Equations removed at parse time: variable -> the term that replaced it.
  std::vector<std::pair<std::string, GoalTerm>> eliminated;

  std::set<std::string> free_variables() const;
};

struct Disjunct {
  std::vector<VarDecl> existentials;
  std::vector<AtomicFormula> conjuncts;
};

struct SecurityGoal {
  std::string protocol;
  std::vector<VarDecl> universals;
  SecurityClaim hypothesis;
  /// Empty means `false`.
  std::vector<Disjunct> conclusion;

  std::vector<VarDecl> existential_vars() const;
  const VarDecl* find_var(std::string_view name) const;
};

/// A value assigned to a goal variable: a node or a message.
using Value = std::variant<NodeRef, Term>;

std::string to_string(const Value& v);

/// Partial map from goal variables to values.
using Assignment = std::map<std::string, Value>;

/// Parses `(defgoal <protocol> (forall (...) (implies (and ...) concl)))`,
/// validates it against `protocol` (role names, params, sorts, claim
/// clauses a and b) and eliminates hypothesis equations.
/// Throws ParseError naming the violated rule.
SecurityGoal parse_goal(std::string_view source, const Protocol& protocol);

/// Validates a hypothesis for use as a security claim. Returns an empty
/// string when it is one, otherwise the violated clause.
std::string claim_violation(const std::vector<AtomicFormula>& conjuncts);

/// Evaluates a goal term; nullopt when a variable is unbound or not a
/// message, or a key function is applied to a value outside its domain.
std::optional<Term> evaluate(const GoalTerm& t, const Assignment& sigma);

bool satisfies_atomic(const Skeleton& sk, const Protocol& protocol,
                      const Assignment& sigma, const AtomicFormula& f);
bool satisfies_claim(const Skeleton& sk, const Protocol& protocol,
                     const Assignment& sigma, const SecurityClaim& c);
bool satisfies_conjunction(const Skeleton& sk, const Protocol& protocol,
                           const Assignment& sigma,
                           const std::vector<AtomicFormula>& conjuncts);

/// Searches for a witness extension of `sigma` over the existential
/// variables of `disjunct`. Node variables range over the nodes of `sk`
/// and message variables over the parameters of its role instances.
std::optional<Assignment> find_witness(const Skeleton& sk,
                                       const Protocol& protocol,
                                       const Assignment& sigma,
                                       const Disjunct& disjunct,
                                       const SecurityGoal& goal);

/// True iff some disjunct of the conclusion has a witness.
bool satisfies_conclusion(const Skeleton& sk, const Protocol& protocol,
                          const Assignment& sigma, const SecurityGoal& goal);

/// H ∘ σ: maps nodes through the node map and messages through α.
Assignment push_forward(const Homomorphism& h, const Assignment& sigma);

}  // namespace skeletal

#endif  // SKELETAL_GOAL_HPP
