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

#include "skeletal/shapes.hpp"

#include <algorithm>
#include <deque>
#include <tuple>
#include <unordered_map>

#include "skeletal/adversary.hpp"

namespace skeletal {

std::string_view to_string(VerdictKind v) {
  switch (v) {
    case VerdictKind::achieved: return "achieved";
    case VerdictKind::counterexample: return "counterexample";
    case VerdictKind::bound_exceeded: return "bound_exceeded";
  }
  return "?";
}

namespace {

void walk_components(const Term& t, std::vector<Term>& out) {
  if (t.kind() == TermKind::pair) {
    walk_components(t.left(), out);
    walk_components(t.right(), out);
    return;
  }
  if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
  if (t.kind() == TermKind::encryption) walk_components(t.left(), out);
}

}  // namespace

std::vector<Term> component_subterms(const Term& t) {
  std::vector<Term> out;
  walk_components(t, out);
  return out;
}

std::optional<Homomorphism> factors_through(const Homomorphism& j,
                                            const Skeleton& j_target,
                                            const Homomorphism& h,
                                            const Skeleton& h_target,
                                            const Skeleton& source) {
  for (const Homomorphism& k : find_homomorphisms(h_target, j_target)) {
    if (same_homomorphism(compose(k, h), j, source)) return k;
  }
  return std::nullopt;
}

namespace {

struct State {
  Skeleton skeleton;
  Homomorphism hom;  // from the start skeleton
  int fresh = 0;
};

class Search {
 public:
  Search(const Skeleton& start, const Protocol& protocol,
         const SearchBounds& bounds)
      : start_(start), protocol_(protocol), bounds_(bounds),
        max_strands_(static_cast<int>(start.strands.size()) +
                     bounds.max_added_strands) {
    for (const Strand& s : start.strands) {
      for (const Event& e : s.events) supply_.reserve_all(e.message);
    }
    for (const Term& a : start.non) supply_.reserve_all(a);
    for (const Term& a : start.unique) supply_.reserve_all(a);
  }

  ShapeResult run() {
    admit(State{start_, identity_homomorphism(start_), 0});
    while (!frontier_.empty() && !hit_limit_) {
      const State s = states_[frontier_.front()];
      frontier_.pop_front();
      expand(s);
    }
    ShapeResult out;
    out.exhausted = !hit_limit_;
    out.states = static_cast<int>(states_.size());
    out.shapes = minimal_shapes();
    return out;
  }

 private:
  void admit(State s) {
    if (hit_limit_) return;
    const std::size_t key = structural_hash(s.skeleton);
    auto& bucket = seen_[key];
    for (std::size_t idx : bucket) {
      const State& old = states_[idx];
      for (const Homomorphism& k : find_isomorphisms(old.skeleton, s.skeleton)) {
        if (same_homomorphism(compose(k, old.hom), s.hom, start_)) return;
      }
    }
    if (static_cast<int>(states_.size()) >= bounds_.max_states) {
      hit_limit_ = true;
      return;
    }
    bucket.push_back(states_.size());
    const bool done = realized(s.skeleton);
    states_.push_back(std::move(s));
    if (done) {
      found_.push_back(states_.size() - 1);
    } else {
      frontier_.push_back(states_.size() - 1);
    }
  }

  void finish(const State& from, Skeleton next, const Homomorphism& step,
              int fresh_added) {
    if (from.fresh + fresh_added > bounds_.max_fresh_atoms) return;
    auto h = hull(next);
    if (!h) return;
    if (static_cast<int>(h->skeleton.strands.size()) > max_strands_) return;
    Homomorphism total = compose(h->hom, compose(step, from.hom));
    admit(State{std::move(h->skeleton), std::move(total), from.fresh + fresh_added});
  }

  void expand(const State& s) {
    const std::vector<NodeRef> open = unrealized_nodes(s.skeleton);
    if (open.empty()) return;
    const NodeRef n = open.front();
    Deriver deriver(context_at(s.skeleton, n));
    std::vector<Term> targets;
    for (const Term& u : component_subterms(s.skeleton.event(n).message)) {
      if (!deriver.derivable(u)) targets.push_back(u);
    }
    for (const Term& u : targets) {
      if (static_cast<int>(s.skeleton.strands.size()) < max_strands_) {
        augment(s, n, u);
      }
      contract(s, n, u);
    }
    add_edges(s, n);
  }

  // Adds a role prefix whose last transmission carries something unifying
  // with `u`, ordered before `n`.
  void augment(const State& s, const NodeRef& n, const Term& u) {
    for (const Role& role : protocol_.roles()) {
      for (int j = 1; j <= role.length(); ++j) {
        if (role.trace()[j - 1].direction != Direction::transmit) continue;
        Substitution rename;
        std::set<Term> issued;
        for (const Param& p : role.params_through(j)) {
          Term v = p.sort ? supply_.atom(p.id, *p.sort) : supply_.indeterminate(p.id);
          rename.bind(p.variable(), v);
          issued.insert(v);
        }
        const Term tmpl = rename.apply(role.trace()[j - 1].message);
        for (const Term& v : component_subterms(tmpl)) {
          auto beta = unify(u, v);
          if (!beta) continue;
          std::vector<Event> events;
          for (int i = 0; i < j; ++i) {
            const Event& e = role.trace()[i];
            events.push_back(Event{e.direction, beta->apply(rename.apply(e.message))});
          }
          Mapped applied = apply_substitution(s.skeleton, *beta);
          const int index = static_cast<int>(applied.skeleton.strands.size());
          Mapped added = add_strand(applied.skeleton, Strand{role.name(), std::move(events)});
          added.skeleton.order.emplace(NodeRef{index, j}, n);
          int fresh = 0;
          for (const Term& x : added.skeleton.node_variables()) {
            if (issued.contains(x)) ++fresh;
          }
          finish(s, std::move(added.skeleton), compose(added.hom, applied.hom), fresh);
        }
      }
    }
  }

  // Unifies `u` with a component of an earlier-or-unordered transmission
  // and orders that transmission before `n`.
  void contract(const State& s, const NodeRef& n, const Term& u) {
    const OrderClosure order(s.skeleton);
    for (const NodeRef& m : s.skeleton.nodes()) {
      const Event& e = s.skeleton.event(m);
      if (e.direction != Direction::transmit || order.preceq(n, m)) continue;
      for (const Term& w : component_subterms(e.message)) {
        auto beta = unify(u, w);
        if (!beta) continue;
        const bool new_edge = !order.precedes(m, n);
        if (beta->empty() && !new_edge) continue;
        Mapped applied = apply_substitution(s.skeleton, *beta);
        if (new_edge) applied.skeleton.order.emplace(m, n);
        finish(s, std::move(applied.skeleton), applied.hom, 0);
      }
    }
  }

  void add_edges(const State& s, const NodeRef& n) {
    const OrderClosure order(s.skeleton);
    for (const NodeRef& m : s.skeleton.nodes()) {
      if (s.skeleton.event(m).direction != Direction::transmit) continue;
      if (order.preceq(n, m) || order.precedes(m, n)) continue;
      Skeleton next = s.skeleton;
      next.order.emplace(m, n);
      finish(s, std::move(next), identity_homomorphism(s.skeleton), 0);
    }
  }

  std::vector<Shape> minimal_shapes() const {
    std::vector<Shape> all;
    for (std::size_t idx : found_) {
      all.push_back(Shape{states_[idx].hom, states_[idx].skeleton});
    }
    const auto through = [&](const Shape& a, const Shape& b) {
      return factors_through(a.hom, a.skeleton, b.hom, b.skeleton, start_).has_value();
    };
    std::vector<Shape> out;
    for (std::size_t i = 0; i < all.size(); ++i) {
      bool minimal = true;
      for (std::size_t j = 0; j < all.size() && minimal; ++j) {
        if (i == j || !through(all[i], all[j])) continue;
        // Mutual factoring: keep the earlier one.
        if (!through(all[j], all[i]) || j < i) minimal = false;
      }
      if (minimal) out.push_back(all[i]);
    }
    std::stable_sort(out.begin(), out.end(), [](const Shape& a, const Shape& b) {
      const auto key = [](const Shape& s) {
        return std::make_tuple(s.skeleton.strands.size(), s.skeleton.node_count(),
                               structural_hash(s.skeleton));
      };
      return key(a) < key(b);
    });
    return out;
  }

  const Skeleton& start_;
  const Protocol& protocol_;
  SearchBounds bounds_;
  int max_strands_;
  FreshSupply supply_;
  std::vector<State> states_;
  std::unordered_map<std::size_t, std::vector<std::size_t>> seen_;
  std::deque<std::size_t> frontier_;
  std::vector<std::size_t> found_;
  bool hit_limit_ = false;
};

}  // namespace

ShapeResult shapes(const Skeleton& start, const Protocol& protocol,
                   const SearchBounds& bounds) {
  return Search(start, protocol, bounds).run();
}

DeadResult dead_within_bound(const Skeleton& sk, const Protocol& protocol,
                             const SearchBounds& bounds) {
  ShapeResult r = shapes(sk, protocol, bounds);
  return DeadResult{r.shapes.empty(), r.exhausted, bounds};
}

Verdict check_goal(const Protocol& protocol, const SecurityGoal& goal,
                   const SearchBounds& bounds) {
  Verdict v;
  v.bounds = bounds;
  v.characteristic = characteristic_skeleton(goal, protocol);
  if (!v.characteristic.ok()) {
    v.vacuous = true;
    v.kind = VerdictKind::achieved;
    return v;
  }
  const CsState& cs = *v.characteristic.state;
  v.search = shapes(cs.skeleton, protocol, bounds);
  for (std::size_t i = 0; i < v.search.shapes.size(); ++i) {
    const Shape& shape = v.search.shapes[i];
    if (!satisfies_conclusion(shape.skeleton, protocol,
                              push_forward(shape.hom, cs.sigma), goal)) {
      v.counterexample = i;
      v.kind = VerdictKind::counterexample;
      return v;
    }
  }
  v.kind = v.search.exhausted ? VerdictKind::achieved : VerdictKind::bound_exceeded;
  return v;
}

}  // namespace skeletal
