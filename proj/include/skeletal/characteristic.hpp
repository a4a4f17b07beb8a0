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

#ifndef SKELETAL_CHARACTERISTIC_HPP
#define SKELETAL_CHARACTERISTIC_HPP

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skeletal/goal.hpp"
#include "skeletal/protocol.hpp"
#include "skeletal/skeleton.hpp"

namespace skeletal {

struct CsState {
  Skeleton skeleton;
  Assignment sigma;
};

enum class CsFailure {
  non_origination,   // a new strand originates an atom assumed non
  hull_undefined,    // forced identifications fail
  order_cycle,       // prec introduces a cycle
  col_unification,   // strands of col do not unify
  false_equation,    // a residual equation evaluates to false
  unbound_argument,  // an argument variable has no value (malformed claim)
};

std::string_view to_string(CsFailure f);

struct CharacteristicResult {
  std::optional<CsState> state;
  CsFailure reason = CsFailure::hull_undefined;
  /// Index of the failing conjunct in processing order.
  std::size_t conjunct = 0;
  std::string detail;

  bool ok() const { return state.has_value(); }
};

/// Role predicates and Lsn first, the rest after; each group keeps its
/// textual order.
std::vector<AtomicFormula> processing_order(
    const std::vector<AtomicFormula>& conjuncts);

/// Incremental construction: one conjunct at a time, starting from the
/// empty skeleton and empty assignment.
class CsBuilder {
 public:
  /// `types` gives declared sorts of goal variables; variables missing from
  /// it take their sort from the role parameter they instantiate.
  CsBuilder(const Protocol& protocol, std::map<std::string, VarType> types = {});

  /// Processes one conjunct. On failure the state is left unchanged.
  std::optional<CsFailure> add(const AtomicFormula& f);

  const CsState& state() const { return state_; }
  const std::string& last_detail() const { return detail_; }

 private:
  std::optional<CsFailure> add_strand_for(const Role& role, int index,
                                          const std::string& node,
                                          const std::vector<std::pair<const Param*, GoalTerm>>& args);
  std::optional<CsFailure> rehull(Skeleton next, Homomorphism step);
  std::optional<Term> value_or_fresh(const GoalTerm& t, std::optional<Sort> want);
  void commit(Skeleton next, const Homomorphism& step);

  const Protocol& protocol_;
  std::map<std::string, VarType> types_;
  FreshSupply fresh_;
  CsState state_;
  std::string detail_;
};

/// cs(φ) for a claim whose equations are already eliminated; `eliminated`
/// bindings are evaluated at the end so that σ* covers every free variable.
CharacteristicResult characteristic_skeleton(
    const SecurityClaim& claim, const Protocol& protocol,
    const std::map<std::string, VarType>& types = {});

/// cs of a goal's hypothesis, using the goal's declarations.
CharacteristicResult characteristic_skeleton(const SecurityGoal& goal,
                                             const Protocol& protocol);

}  // namespace skeletal

#endif  // SKELETAL_CHARACTERISTIC_HPP
