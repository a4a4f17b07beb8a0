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

#include "skeletal/skeleton.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>

namespace skeletal {

std::string to_string(const NodeRef& n) {
  return std::to_string(n.strand) + ":" + std::to_string(n.position);
}

bool Skeleton::contains(const NodeRef& n) const {
  return n.strand >= 0 && n.strand < static_cast<int>(strands.size()) &&
         n.position >= 1 && n.position <= strands[n.strand].length();
}

const Event& Skeleton::event(const NodeRef& n) const {
  if (!contains(n)) throw std::out_of_range("no node " + to_string(n));
  return strands[n.strand].events[n.position - 1];
}

std::vector<NodeRef> Skeleton::nodes() const {
  std::vector<NodeRef> out;
  for (int s = 0; s < static_cast<int>(strands.size()); ++s) {
    for (int i = 1; i <= strands[s].length(); ++i) out.push_back({s, i});
  }
  return out;
}

int Skeleton::node_count() const {
  int n = 0;
  for (const Strand& s : strands) n += s.length();
  return n;
}

std::set<Term> Skeleton::node_variables() const {
  std::set<Term> out;
  for (const Strand& s : strands) {
    for (const Event& e : s.events) collect_variables(e.message, out);
  }
  return out;
}

std::set<Term> Skeleton::atoms() const {
  std::set<Term> out;
  for (const Strand& s : strands) {
    for (const Event& e : s.events) collect_atoms(e.message, out);
  }
  for (const Term& a : non) collect_atoms(a, out);
  for (const Term& a : unique) collect_atoms(a, out);
  return out;
}

// ---------------------------------------------------------------------------

OrderClosure::OrderClosure(const Skeleton& sk) {
  int total = 0;
  for (const Strand& s : sk.strands) {
    offsets_.push_back(total);
    total += s.length();
  }
  reach_.assign(total, std::vector<bool>(total, false));
  for (int s = 0; s < static_cast<int>(sk.strands.size()); ++s) {
    for (int i = 1; i < sk.strands[s].length(); ++i) {
      reach_[offsets_[s] + i - 1][offsets_[s] + i] = true;
    }
  }
  for (const auto& [a, b] : sk.order) {
    if (!sk.contains(a) || !sk.contains(b)) {
      acyclic_ = false;
      continue;
    }
    reach_[index(a)][index(b)] = true;
  }
  // Floyd-Warshall style transitive closure; skeletons are small.
  for (int k = 0; k < total; ++k) {
    for (int i = 0; i < total; ++i) {
      if (!reach_[i][k]) continue;
      for (int j = 0; j < total; ++j) {
        if (reach_[k][j]) reach_[i][j] = true;
      }
    }
  }
  for (int i = 0; i < total; ++i) {
    if (reach_[i][i]) acyclic_ = false;
  }
}

int OrderClosure::index(const NodeRef& n) const {
  return offsets_.at(static_cast<std::size_t>(n.strand)) + n.position - 1;
}

bool OrderClosure::precedes(const NodeRef& a, const NodeRef& b) const {
  return reach_[index(a)][index(b)];
}

bool OrderClosure::preceq(const NodeRef& a, const NodeRef& b) const {
  return a == b || precedes(a, b);
}

int OrderClosure::pair_count() const {
  int n = 0;
  for (const auto& row : reach_) n += static_cast<int>(std::count(row.begin(), row.end(), true));
  return n;
}

// ---------------------------------------------------------------------------

bool originates_at(const Term& a, const Skeleton& sk, const NodeRef& n) {
  const Event& e = sk.event(n);
  if (e.direction != Direction::transmit) return false;
  if (!is_ingredient(a, e.message)) return false;
  const Strand& s = sk.strands[n.strand];
  for (int i = 0; i + 1 < n.position; ++i) {
    if (is_ingredient(a, s.events[i].message)) return false;
  }
  return true;
}

std::vector<NodeRef> origination_points(const Term& a, const Skeleton& sk) {
  std::vector<NodeRef> out;
  for (int s = 0; s < static_cast<int>(sk.strands.size()); ++s) {
    const Strand& strand = sk.strands[s];
    for (int i = 0; i < strand.length(); ++i) {
      if (!is_ingredient(a, strand.events[i].message)) continue;
      // The first ingredient occurrence decides; later ones never originate.
      if (strand.events[i].direction == Direction::transmit) {
        out.push_back({s, i + 1});
      }
      break;
    }
  }
  return out;
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::skeleton: return "skeleton";
    case Classification::preskeleton: return "preskeleton";
    case Classification::invalid: return "invalid";
  }
  return "?";
}

bool non_originates(const Skeleton& sk) {
  for (const Term& a : sk.non) {
    if (!origination_points(a, sk).empty()) return true;
  }
  return false;
}

Classification validate(const Skeleton& sk) {
  for (const auto& [a, b] : sk.order) {
    if (!sk.contains(a) || !sk.contains(b)) return Classification::invalid;
    if (a.strand == b.strand && a.position >= b.position) {
      return Classification::invalid;
    }
  }
  for (const Term& a : sk.non) {
    if (!a.is_atom()) return Classification::invalid;
  }
  for (const Term& a : sk.unique) {
    if (!a.is_atom()) return Classification::invalid;
  }
  if (!OrderClosure(sk).acyclic()) return Classification::invalid;
  if (non_originates(sk)) return Classification::invalid;
  for (const Term& a : sk.unique) {
    if (origination_points(a, sk).size() > 1) return Classification::preskeleton;
  }
  return Classification::skeleton;
}

// ---------------------------------------------------------------------------
// Homomorphisms

Homomorphism identity_homomorphism(const Skeleton& sk) {
  Homomorphism h;
  for (int s = 0; s < static_cast<int>(sk.strands.size()); ++s) {
    h.strand_map.push_back(s);
  }
  return h;
}

Homomorphism compose(const Homomorphism& outer, const Homomorphism& inner) {
  Homomorphism h;
  for (int t : inner.strand_map) {
    if (t < 0 || t >= static_cast<int>(outer.strand_map.size())) {
      throw std::invalid_argument("homomorphisms do not compose");
    }
    h.strand_map.push_back(outer.strand_map[t]);
  }
  h.subst = compose(outer.subst, inner.subst);
  return h;
}

namespace {

// Clauses 2 through 4b; 1a and 1b are established by the caller.
bool check_order_and_assumptions(const Homomorphism& h, const Skeleton& src,
                                 const Skeleton& dst,
                                 const OrderClosure& src_order,
                                 const OrderClosure& dst_order) {
  const std::vector<NodeRef> nodes = src.nodes();
  for (const NodeRef& a : nodes) {
    for (const NodeRef& b : nodes) {
      if (a != b && src_order.precedes(a, b) &&
          !dst_order.preceq(h(a), h(b))) {
        return false;
      }
    }
  }
  for (const Term& a : src.non) {
    if (!dst.non.contains(h(a))) return false;
  }
  for (const Term& a : src.unique) {
    Term image = h(a);
    if (!dst.unique.contains(image)) return false;
    for (const NodeRef& n : origination_points(a, src)) {
      if (!originates_at(image, dst, h(n))) return false;
    }
  }
  return true;
}

bool check_nodes(const Homomorphism& h, const Skeleton& src,
                 const Skeleton& dst) {
  if (h.strand_map.size() != src.strands.size()) return false;
  for (int s = 0; s < static_cast<int>(src.strands.size()); ++s) {
    const int t = h.strand_map[s];
    if (t < 0 || t >= static_cast<int>(dst.strands.size())) return false;
    const Strand& from = src.strands[s];
    const Strand& to = dst.strands[t];
    if (to.length() < from.length()) return false;
    for (int i = 0; i < from.length(); ++i) {
      if (from.events[i].direction != to.events[i].direction) return false;
      if (h(from.events[i].message) != to.events[i].message) return false;
    }
  }
  return true;
}

// Backtracking over strand assignments; the substitution is solved by
// matching source messages against target messages.
class HomSearch {
 public:
  HomSearch(const Skeleton& src, const Skeleton& dst, bool injective)
      : src_(src), dst_(dst), injective_(injective),
        src_order_(src), dst_order_(dst),
        used_(dst.strands.size(), false) {}

  std::vector<Homomorphism> run(bool first_only) {
    first_only_ = first_only;
    Homomorphism h;
    h.strand_map.assign(src_.strands.size(), -1);
    extend(0, h);
    return std::move(results_);
  }

 private:
  void extend(std::size_t s, Homomorphism& h) {
    if (first_only_ && !results_.empty()) return;
    if (s == src_.strands.size()) {
      if (injective_ && !renaming_ok(h)) return;
      if (check_order_and_assumptions(h, src_, dst_, src_order_, dst_order_)) {
        results_.push_back(h);
      }
      return;
    }
    const Strand& from = src_.strands[s];
    for (int t = 0; t < static_cast<int>(dst_.strands.size()); ++t) {
      if (injective_ && used_[t]) continue;
      const Strand& to = dst_.strands[t];
      if (to.length() < from.length()) continue;
      if (injective_ && to.length() != from.length()) continue;
      Substitution saved = h.subst;
      bool ok = true;
      for (int i = 0; i < from.length() && ok; ++i) {
        if (from.events[i].direction != to.events[i].direction) {
          ok = false;
          break;
        }
        auto next = match(from.events[i].message, to.events[i].message, h.subst);
        if (!next) {
          ok = false;
        } else {
          h.subst = std::move(*next);
        }
      }
      if (ok) {
        h.strand_map[s] = t;
        used_[t] = true;
        extend(s + 1, h);
        used_[t] = false;
        h.strand_map[s] = -1;
      }
      h.subst = std::move(saved);
    }
  }

  // Variables must map injectively to variables of the same kind.
  bool renaming_ok(const Homomorphism& h) const {
    std::set<Term> images;
    for (const Term& v : src_.node_variables()) {
      Term image = h(v);
      if (!image.is_variable()) return false;
      if (image.is_indeterminate() != v.is_indeterminate()) return false;
      if (!images.insert(image).second) return false;
    }
    return true;
  }

  const Skeleton& src_;
  const Skeleton& dst_;
  bool injective_;
  bool first_only_ = false;
  OrderClosure src_order_;
  OrderClosure dst_order_;
  std::vector<bool> used_;
  std::vector<Homomorphism> results_;
};

}  // namespace

bool check_homomorphism(const Homomorphism& h, const Skeleton& src,
                        const Skeleton& dst) {
  if (!check_nodes(h, src, dst)) return false;
  return check_order_and_assumptions(h, src, dst, OrderClosure(src),
                                     OrderClosure(dst));
}

bool same_homomorphism(const Homomorphism& a, const Homomorphism& b,
                       const Skeleton& src) {
  if (a.strand_map != b.strand_map) return false;
  for (const Term& v : src.node_variables()) {
    if (a(v) != b(v)) return false;
  }
  return true;
}

std::vector<Homomorphism> find_homomorphisms(const Skeleton& src,
                                             const Skeleton& dst) {
  return HomSearch(src, dst, false).run(false);
}

namespace {

bool same_counts(const Skeleton& src, const Skeleton& dst) {
  return src.strands.size() == dst.strands.size() &&
         src.node_count() == dst.node_count() &&
         src.non.size() == dst.non.size() &&
         src.unique.size() == dst.unique.size() &&
         src.node_variables().size() == dst.node_variables().size() &&
         OrderClosure(src).pair_count() == OrderClosure(dst).pair_count();
}

}  // namespace

std::vector<Homomorphism> find_isomorphisms(const Skeleton& src,
                                            const Skeleton& dst) {
  if (!same_counts(src, dst)) return {};
  return HomSearch(src, dst, true).run(false);
}

std::optional<Homomorphism> find_isomorphism(const Skeleton& src,
                                             const Skeleton& dst) {
  if (!same_counts(src, dst)) return std::nullopt;
  auto found = HomSearch(src, dst, true).run(true);
  if (found.empty()) return std::nullopt;
  return found.front();
}

bool isomorphic(const Skeleton& a, const Skeleton& b) {
  return find_isomorphism(a, b).has_value();
}

namespace {

std::size_t shape_hash(const Term& t) {
  std::size_t h = static_cast<std::size_t>(t.kind()) * 1000003u;
  if (auto s = t.sort()) h += static_cast<std::size_t>(*s) * 7919u;
  if (t.kind() == TermKind::pair) h ^= std::hash<std::string>{}(t.tag());
  if (t.is_compound()) {
    h = h * 31 + shape_hash(t.left());
    h = h * 31 + shape_hash(t.right());
  } else if (!t.is_variable()) {
    h = h * 31 + shape_hash(t.argument());
  }
  return h;
}

}  // namespace

std::size_t structural_hash(const Skeleton& sk) {
  std::vector<std::size_t> strand_hashes;
  for (const Strand& s : sk.strands) {
    std::size_t h = 17;
    for (const Event& e : s.events) {
      h = h * 131 + (e.direction == Direction::transmit ? 1 : 2);
      h = h * 131 + shape_hash(e.message);
    }
    strand_hashes.push_back(h);
  }
  std::sort(strand_hashes.begin(), strand_hashes.end());
  std::size_t h = sk.strands.size();
  for (std::size_t x : strand_hashes) h = h * 1000003u + x;
  std::vector<std::size_t> assumptions;
  for (const Term& a : sk.non) assumptions.push_back(shape_hash(a) * 3);
  for (const Term& a : sk.unique) assumptions.push_back(shape_hash(a) * 5);
  std::sort(assumptions.begin(), assumptions.end());
  for (std::size_t x : assumptions) h = h * 31 + x;
  h = h * 31 + static_cast<std::size_t>(OrderClosure(sk).pair_count());
  return h;
}

// ---------------------------------------------------------------------------

Mapped apply_substitution(const Skeleton& sk, const Substitution& s) {
  Mapped out;
  out.skeleton.order = sk.order;
  for (const Strand& strand : sk.strands) {
    Strand copy{strand.role, {}};
    for (const Event& e : strand.events) {
      copy.events.push_back(Event{e.direction, s.apply(e.message)});
    }
    out.skeleton.strands.push_back(std::move(copy));
  }
  for (const Term& a : sk.non) out.skeleton.non.insert(s.apply(a));
  for (const Term& a : sk.unique) out.skeleton.unique.insert(s.apply(a));
  out.hom = identity_homomorphism(sk);
  out.hom.subst = s;
  return out;
}

std::optional<Substitution> unify_strands(const Skeleton& sk, int s, int t) {
  const Strand& a = sk.strands.at(static_cast<std::size_t>(s));
  const Strand& b = sk.strands.at(static_cast<std::size_t>(t));
  const int common = std::min(a.length(), b.length());
  std::vector<std::pair<Term, Term>> equations;
  for (int i = 0; i < common; ++i) {
    if (a.events[i].direction != b.events[i].direction) return std::nullopt;
    equations.emplace_back(a.events[i].message, b.events[i].message);
  }
  return unify_all(equations);
}

namespace {

// Removes strand `drop`, whose events must already be a prefix of `keep`'s.
std::optional<Mapped> merge_onto(const Skeleton& sk, int keep, int drop) {
  Mapped out;
  std::vector<int> remap(sk.strands.size());
  int next = 0;
  for (int s = 0; s < static_cast<int>(sk.strands.size()); ++s) {
    if (s == drop) continue;
    remap[s] = next++;
    out.skeleton.strands.push_back(sk.strands[s]);
  }
  remap[drop] = remap[keep];
  for (const auto& [a, b] : sk.order) {
    NodeRef na{remap[a.strand], a.position};
    NodeRef nb{remap[b.strand], b.position};
    if (na.strand == nb.strand) {
      if (na.position >= nb.position) return std::nullopt;
      continue;  // implied by strand succession
    }
    out.skeleton.order.emplace(na, nb);
  }
  out.skeleton.non = sk.non;
  out.skeleton.unique = sk.unique;
  if (!OrderClosure(out.skeleton).acyclic()) return std::nullopt;
  out.hom.strand_map = std::move(remap);
  return out;
}

}  // namespace

std::optional<Mapped> identify_strands(const Skeleton& sk, int s, int t) {
  if (s == t) return Mapped{sk, identity_homomorphism(sk)};
  auto beta = unify_strands(sk, s, t);
  if (!beta) return std::nullopt;
  Mapped applied = apply_substitution(sk, *beta);
  if (non_originates(applied.skeleton)) return std::nullopt;
  const int len_s = sk.strands[s].length();
  const int len_t = sk.strands[t].length();
  int keep = s;
  int drop = t;
  if (len_t > len_s || (len_t == len_s && t < s)) std::swap(keep, drop);
  auto merged = merge_onto(applied.skeleton, keep, drop);
  if (!merged) return std::nullopt;
  merged->hom = compose(merged->hom, applied.hom);
  return merged;
}

std::optional<Mapped> hull(const Skeleton& p) {
  if (validate(p) == Classification::invalid) return std::nullopt;
  Mapped cur{p, identity_homomorphism(p)};
  for (;;) {
    std::optional<std::pair<NodeRef, NodeRef>> clash;
    for (const Term& a : cur.skeleton.unique) {
      auto points = origination_points(a, cur.skeleton);
      if (points.size() > 1) {
        clash = std::make_pair(points[0], points[1]);
        break;
      }
    }
    if (!clash) break;
    // Both origination nodes must land on one node of one strand.
    if (clash->first.position != clash->second.position) return std::nullopt;
    auto step = identify_strands(cur.skeleton, clash->first.strand,
                                 clash->second.strand);
    if (!step) return std::nullopt;
    cur.hom = compose(step->hom, cur.hom);
    cur.skeleton = std::move(step->skeleton);
  }
  if (validate(cur.skeleton) != Classification::skeleton) return std::nullopt;
  if (!check_homomorphism(cur.hom, p, cur.skeleton)) return std::nullopt;
  return cur;
}

Mapped add_strand(const Skeleton& sk, Strand strand) {
  Mapped out{sk, identity_homomorphism(sk)};
  out.skeleton.strands.push_back(std::move(strand));
  return out;
}

}  // namespace skeletal
