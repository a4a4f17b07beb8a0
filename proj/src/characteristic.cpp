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

#include "skeletal/characteristic.hpp"

#include <algorithm>
#include <stdexcept>

namespace skeletal {

std::string_view to_string(CsFailure f) {
  switch (f) {
    case CsFailure::non_origination: return "non_origination";
    case CsFailure::hull_undefined: return "hull_undefined";
    case CsFailure::order_cycle: return "order_cycle";
    case CsFailure::col_unification: return "col_unification";
    case CsFailure::false_equation: return "false_equation";
    case CsFailure::unbound_argument: return "unbound_argument";
  }
  return "?";
}

std::vector<AtomicFormula> processing_order(
    const std::vector<AtomicFormula>& conjuncts) {
  std::vector<AtomicFormula> out = conjuncts;
  std::stable_partition(out.begin(), out.end(),
                        [](const AtomicFormula& f) { return is_role_predicate(f); });
  return out;
}

CsBuilder::CsBuilder(const Protocol& protocol,
                     std::map<std::string, VarType> types)
    : protocol_(protocol), types_(std::move(types)) {}

std::optional<Term> CsBuilder::value_or_fresh(const GoalTerm& t,
                                              std::optional<Sort> want) {
  switch (t.kind()) {
    case GoalTerm::Kind::variable: {
      if (auto it = state_.sigma.find(t.name()); it != state_.sigma.end()) {
        if (const auto* m = std::get_if<Term>(&it->second)) return *m;
        return std::nullopt;
      }
      std::optional<Sort> sort = want;
      if (auto it = types_.find(t.name()); it != types_.end()) {
        if (it->second == VarType::node) return std::nullopt;
        sort = sort_of(it->second);
      }
      Term v = sort ? fresh_.atom(t.name(), *sort) : fresh_.indeterminate(t.name());
      state_.sigma[t.name()] = v;
      return v;
    }
    case GoalTerm::Kind::sign_key:
    case GoalTerm::Kind::public_key: {
      auto inner = value_or_fresh(t.argument(), Sort::name);
      if (!inner || !inner->is_base_atom() || inner->sort() != Sort::name) {
        return std::nullopt;
      }
      return t.kind() == GoalTerm::Kind::sign_key ? Term::sign_key(*inner)
                                                  : Term::public_key(*inner);
    }
    case GoalTerm::Kind::inverse: {
      auto inner = value_or_fresh(t.argument(), want ? want : Sort::akey);
      if (!inner || !inner->is_atom() ||
          (inner->sort() != Sort::akey && inner->sort() != Sort::skey)) {
        return std::nullopt;
      }
      return Term::inverse(*inner);
    }
  }
  return std::nullopt;
}

void CsBuilder::commit(Skeleton next, const Homomorphism& step) {
  if (!check_homomorphism(step, state_.skeleton, next)) {
    throw std::logic_error("characteristic skeleton step is not a homomorphism");
  }
  state_.sigma = push_forward(step, state_.sigma);
  state_.skeleton = std::move(next);
}

std::optional<CsFailure> CsBuilder::rehull(Skeleton next, Homomorphism step) {
  auto h = hull(next);
  if (!h) {
    detail_ = "hull undefined";
    return CsFailure::hull_undefined;
  }
  commit(std::move(h->skeleton), compose(h->hom, step));
  return std::nullopt;
}

std::optional<CsFailure> CsBuilder::add_strand_for(
    const Role& role, int index, const std::string& node,
    const std::vector<std::pair<const Param*, GoalTerm>>& args) {
  Substitution binding;
  for (const auto& [param, t] : args) {
    auto v = value_or_fresh(t, param->sort);
    if (!v || !binding.bind(param->variable(), *v)) {
      detail_ = "argument " + to_string(t) + " does not fit parameter " + param->id;
      return CsFailure::unbound_argument;
    }
  }
  StrandInstance inst = instantiate(role, binding, index);
  Mapped added = add_strand(state_.skeleton, Strand{role.name(), inst.events});
  if (non_originates(added.skeleton)) {
    detail_ = "new " + role.name() + " strand originates a non atom";
    return CsFailure::non_origination;
  }
  const int fresh_strand = static_cast<int>(state_.skeleton.strands.size());
  auto h = hull(added.skeleton);
  if (!h) {
    detail_ = "hull undefined after adding a " + role.name() + " strand";
    return CsFailure::hull_undefined;
  }
  commit(std::move(h->skeleton), compose(h->hom, added.hom));
  state_.sigma[node] = NodeRef{h->hom.strand_map[fresh_strand], index};
  return std::nullopt;
}

std::optional<CsFailure> CsBuilder::add(const AtomicFormula& f) {
  const CsState saved = state_;
  detail_.clear();
  const auto node_of = [&](const std::string& var) -> std::optional<NodeRef> {
    auto it = state_.sigma.find(var);
    if (it == state_.sigma.end()) return std::nullopt;
    if (const auto* n = std::get_if<NodeRef>(&it->second)) return *n;
    return std::nullopt;
  };
  auto result = std::visit(
      [&](const auto& p) -> std::optional<CsFailure> {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, RolePredicate>) {
          const Role* role = protocol_.find_role(p.role);
          if (!role) {
            detail_ = "unknown role " + p.role;
            return CsFailure::unbound_argument;
          }
          std::vector<std::pair<const Param*, GoalTerm>> args;
          for (const auto& [id, t] : p.args) {
            const Param* param = role->find_param(id);
            if (!param) {
              detail_ = "unknown parameter " + id;
              return CsFailure::unbound_argument;
            }
            args.emplace_back(param, t);
          }
          return add_strand_for(*role, p.index, p.node, args);
        } else if constexpr (std::is_same_v<T, ListenPredicate>) {
          const Role& lsn = protocol_.listener();
          return add_strand_for(lsn, 1, p.node, {{&lsn.params()[0], p.value}});
        } else if constexpr (std::is_same_v<T, NonPredicate> ||
                             std::is_same_v<T, UnqPredicate>) {
          auto v = evaluate(p.value, state_.sigma);
          if (!v || !v->is_atom()) {
            detail_ = "no atomic value for " + to_string(p.value);
            return CsFailure::unbound_argument;
          }
          Skeleton next = state_.skeleton;
          if constexpr (std::is_same_v<T, NonPredicate>) {
            next.non.insert(*v);
            if (!origination_points(*v, next).empty()) {
              detail_ = to_string(*v) + " originates";
              return CsFailure::non_origination;
            }
            commit(std::move(next), identity_homomorphism(state_.skeleton));
            return std::nullopt;
          } else {
            next.unique.insert(*v);
            return rehull(std::move(next), identity_homomorphism(state_.skeleton));
          }
        } else if constexpr (std::is_same_v<T, PrecPredicate>) {
          auto a = node_of(p.first);
          auto b = node_of(p.second);
          if (!a || !b) {
            detail_ = "unbound node variable";
            return CsFailure::unbound_argument;
          }
          if (*a == *b) return std::nullopt;
          Skeleton next = state_.skeleton;
          if (a->strand == b->strand) {
            if (a->position < b->position) return std::nullopt;
            detail_ = to_string(*b) + " precedes " + to_string(*a) + " on its strand";
            return CsFailure::order_cycle;
          }
          next.order.emplace(*a, *b);
          if (!OrderClosure(next).acyclic()) {
            detail_ = "edge " + to_string(*a) + " < " + to_string(*b) + " closes a cycle";
            return CsFailure::order_cycle;
          }
          commit(std::move(next), identity_homomorphism(state_.skeleton));
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, ColPredicate>) {
          auto a = node_of(p.first);
          auto b = node_of(p.second);
          if (!a || !b) {
            detail_ = "unbound node variable";
            return CsFailure::unbound_argument;
          }
          if (a->strand == b->strand) return std::nullopt;
          auto merged = identify_strands(state_.skeleton, a->strand, b->strand);
          if (!merged) {
            detail_ = "strands " + std::to_string(a->strand) + " and " +
                      std::to_string(b->strand) + " cannot be identified";
            return CsFailure::col_unification;
          }
          return rehull(std::move(merged->skeleton), merged->hom);
        } else if constexpr (std::is_same_v<T, EqPredicate>) {
          const auto value = [&](const GoalTerm& t) -> std::optional<Value> {
            if (t.is_variable()) {
              auto it = state_.sigma.find(t.name());
              if (it == state_.sigma.end()) return std::nullopt;
              return it->second;
            }
            if (auto m = evaluate(t, state_.sigma)) return Value{*m};
            return std::nullopt;
          };
          auto l = value(p.left);
          auto r = value(p.right);
          if (!l || !r) {
            detail_ = "unbound equation side";
            return CsFailure::unbound_argument;
          }
          if (*l == *r) return std::nullopt;
          detail_ = to_string(*l) + " differs from " + to_string(*r);
          return CsFailure::false_equation;
        } else {
          detail_ = "false";
          return CsFailure::false_equation;
        }
      },
      f);
  if (result) state_ = saved;
  return result;
}

CharacteristicResult characteristic_skeleton(
    const SecurityClaim& claim, const Protocol& protocol,
    const std::map<std::string, VarType>& types) {
  CharacteristicResult out;
  CsBuilder builder(protocol, types);
  const std::vector<AtomicFormula> ordered = processing_order(claim.conjuncts);
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    if (auto failure = builder.add(ordered[i])) {
      out.reason = *failure;
      out.conjunct = i;
      out.detail = to_string(ordered[i]) + ": " + builder.last_detail();
      return out;
    }
  }
  CsState state = builder.state();
  for (const auto& [var, t] : claim.eliminated) {
    if (t.is_variable()) {
      if (auto it = state.sigma.find(t.name()); it != state.sigma.end()) {
        state.sigma[var] = it->second;
      }
    } else if (auto v = evaluate(t, state.sigma)) {
      state.sigma[var] = *v;
    }
  }
  out.state = std::move(state);
  return out;
}

CharacteristicResult characteristic_skeleton(const SecurityGoal& goal,
                                             const Protocol& protocol) {
  std::map<std::string, VarType> types;
  for (const VarDecl& v : goal.universals) types.emplace(v.name, v.type);
  return characteristic_skeleton(goal.hypothesis, protocol, types);
}

}  // namespace skeletal
