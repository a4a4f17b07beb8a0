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

#ifndef SKELETAL_SKELETON_HPP
#define SKELETAL_SKELETON_HPP

#include <compare>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "skeletal/protocol.hpp"
#include "skeletal/term.hpp"

namespace skeletal {

/// The `position`-th node (1-based) of strand `strand`.
struct NodeRef {
  int strand = 0;
  int position = 1;

  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

std::string to_string(const NodeRef& n);

struct Strand {
  std::string role;
  std::vector<Event> events;

  int length() const { return static_cast<int>(events.size()); }
  friend bool operator==(const Strand&, const Strand&) = default;
};

using OrderEdge = std::pair<NodeRef, NodeRef>;

/// A (pre)skeleton: regular strands, a precedence relation and the non /
/// unique assumptions. Whether it is a skeleton proper is a matter of
/// classification (see `validate`).
///
/// `order` holds cross-strand edges only; succession along a strand is
/// implicit. The transitive closure is computed on demand by OrderClosure.
struct Skeleton {
  std::vector<Strand> strands;
  std::set<OrderEdge> order;
  std::set<Term> non;
  std::set<Term> unique;

  bool contains(const NodeRef& n) const;
  const Event& event(const NodeRef& n) const;
  std::vector<NodeRef> nodes() const;
  int node_count() const;
  /// Base atoms and indeterminates occurring in node messages.
  std::set<Term> node_variables() const;
  /// Every atom in node messages and in non / unique.
  std::set<Term> atoms() const;

  friend bool operator==(const Skeleton&, const Skeleton&) = default;
};

/// Reflexive-transitive closure of strand succession plus `order`.
class OrderClosure {
 public:
  explicit OrderClosure(const Skeleton& sk);

  /// Strict precedence.
  bool precedes(const NodeRef& a, const NodeRef& b) const;
  bool preceq(const NodeRef& a, const NodeRef& b) const;
  bool acyclic() const { return acyclic_; }
  /// Number of strictly ordered pairs.
  int pair_count() const;

 private:
  int index(const NodeRef& n) const;

  std::vector<int> offsets_;
  std::vector<std::vector<bool>> reach_;  // reach_[i][j]: i strictly before j
  bool acyclic_ = true;
};

/// True iff `a` originates at `n`: n transmits, a is an ingredient of its
/// message and of no earlier message on the strand.
/// Throws std::out_of_range for a node outside `sk`.
bool originates_at(const Term& a, const Skeleton& sk, const NodeRef& n);
std::vector<NodeRef> origination_points(const Term& a, const Skeleton& sk);

enum class Classification { skeleton, preskeleton, invalid };

std::string_view to_string(Classification c);

Classification validate(const Skeleton& sk);

/// A skeleton homomorphism [ζ, α]. The node map sends each strand to one
/// target strand, positions unchanged.
struct Homomorphism {
  std::vector<int> strand_map;
  Substitution subst;

  NodeRef operator()(const NodeRef& n) const {
    return {strand_map.at(static_cast<std::size_t>(n.strand)), n.position};
  }
  Term operator()(const Term& t) const { return subst.apply(t); }
};

Homomorphism identity_homomorphism(const Skeleton& sk);

/// (outer ∘ inner). Throws std::invalid_argument when inner's target
/// strands fall outside outer's domain.
Homomorphism compose(const Homomorphism& outer, const Homomorphism& inner);

/// Checks clauses 1a, 1b, 2, 3, 4a and 4b between `src` and `dst`.
bool check_homomorphism(const Homomorphism& h, const Skeleton& src,
                        const Skeleton& dst);

/// Equality of homomorphisms out of `src`: same node map and the same
/// action on the variables of src's nodes.
bool same_homomorphism(const Homomorphism& a, const Homomorphism& b,
                       const Skeleton& src);

/// Every homomorphism from `src` to `dst`, one per equivalence class, in
/// lexicographic order of strand maps.
std::vector<Homomorphism> find_homomorphisms(const Skeleton& src,
                                             const Skeleton& dst);

/// An isomorphism src -> dst (bijective strand map, invertible renaming of
/// variables) when one exists.
std::optional<Homomorphism> find_isomorphism(const Skeleton& src,
                                             const Skeleton& dst);
/// Every isomorphism src -> dst, one per equivalence class.
std::vector<Homomorphism> find_isomorphisms(const Skeleton& src,
                                            const Skeleton& dst);
bool isomorphic(const Skeleton& a, const Skeleton& b);

/// Renaming-invariant fingerprint; isomorphic skeletons agree.
std::size_t structural_hash(const Skeleton& sk);

// ---------------------------------------------------------------------------
// Structural operations shared by the hull, the characteristic-skeleton
// fold and shape search. Each returns the result together with the
// homomorphism from its input.

struct Mapped {
  Skeleton skeleton;
  Homomorphism hom;
};

/// Applies a substitution throughout (messages, non, unique).
Mapped apply_substitution(const Skeleton& sk, const Substitution& s);

/// True iff some atom of `non` originates somewhere.
bool non_originates(const Skeleton& sk);

/// Position-wise MGU of two strands over their common length.
/// Fails on a direction conflict or a unification failure.
std::optional<Substitution> unify_strands(const Skeleton& sk, int s, int t);

/// Unifies two strands and merges the shorter onto the longer (ties keep
/// the lower index). Fails on unification failure, a non atom originating
/// after the substitution, or an order cycle.
std::optional<Mapped> identify_strands(const Skeleton& sk, int s, int t);

/// Canonical most general skeleton obtained from a preskeleton by forced
/// identifications; identity when `p` already is a skeleton.
std::optional<Mapped> hull(const Skeleton& p);

/// Adds a strand; the homomorphism is the inclusion.
Mapped add_strand(const Skeleton& sk, Strand strand);

}  // namespace skeletal

#endif  // SKELETAL_SKELETON_HPP
