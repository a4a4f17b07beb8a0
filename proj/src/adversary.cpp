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

#include "skeletal/adversary.hpp"

namespace skeletal {

bool AdversaryContext::creatable(const Term& t) const {
  if (t.is_indeterminate()) return true;
  if (!t.is_atom()) return false;
  return !non.contains(t) && !unique_originated.contains(t);
}

Deriver::Deriver(AdversaryContext ctx) : ctx_(std::move(ctx)) {
  analyzed_.insert(ctx_.available.begin(), ctx_.available.end());
  // Saturate: split pairs, open ciphertexts whose decryption key can be
  // built. A new element may unlock earlier ciphertexts, hence the loop.
  bool changed = true;
  while (changed) {
    changed = false;
    memo_.clear();
    std::vector<Term> current(analyzed_.begin(), analyzed_.end());
    for (const Term& t : current) {
      if (t.kind() == TermKind::pair) {
        changed |= analyzed_.insert(t.left()).second;
        changed |= analyzed_.insert(t.right()).second;
      } else if (t.kind() == TermKind::encryption &&
                 !analyzed_.contains(t.left()) &&
                 synthesize(decryption_key(t.right()))) {
        analyzed_.insert(t.left());
        changed = true;
      }
    }
  }
  memo_.clear();
}

bool Deriver::synthesize(const Term& t) {
  if (analyzed_.contains(t)) return true;
  if (auto it = memo_.find(t); it != memo_.end()) return it->second;
  bool ok = false;
  if (t.is_compound()) {
    ok = synthesize(t.left()) && synthesize(t.right());
  } else {
    ok = ctx_.creatable(t);
  }
  memo_.emplace(t, ok);
  return ok;
}

bool Deriver::derivable(const Term& target) { return synthesize(target); }

bool derivable(const AdversaryContext& ctx, const Term& target) {
  return Deriver(ctx).derivable(target);
}

namespace {

std::set<Term> unique_originating(const Skeleton& sk) {
  std::set<Term> out;
  for (const Term& a : sk.unique) {
    if (!origination_points(a, sk).empty()) out.insert(a);
  }
  return out;
}

AdversaryContext context_with(const Skeleton& sk, const OrderClosure& order,
                              const std::set<Term>& originating,
                              const NodeRef& n) {
  AdversaryContext ctx;
  ctx.non = sk.non;
  ctx.unique_originated = originating;
  for (const NodeRef& m : sk.nodes()) {
    const Event& e = sk.event(m);
    if (e.direction == Direction::transmit && order.precedes(m, n)) {
      ctx.available.push_back(e.message);
    }
  }
  return ctx;
}

}  // namespace

AdversaryContext context_at(const Skeleton& sk, const NodeRef& n) {
  return context_with(sk, OrderClosure(sk), unique_originating(sk), n);
}

std::vector<NodeRef> unrealized_nodes(const Skeleton& sk) {
  const OrderClosure order(sk);
  const std::set<Term> originating = unique_originating(sk);
  std::vector<NodeRef> out;
  for (const NodeRef& n : sk.nodes()) {
    const Event& e = sk.event(n);
    if (e.direction != Direction::receive) continue;
    if (!derivable(context_with(sk, order, originating, n), e.message)) {
      out.push_back(n);
    }
  }
  return out;
}

bool realized(const Skeleton& sk) { return unrealized_nodes(sk).empty(); }

}  // namespace skeletal
