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

#ifndef SKELETAL_SHAPES_HPP
#define SKELETAL_SHAPES_HPP

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "skeletal/characteristic.hpp"
#include "skeletal/goal.hpp"
#include "skeletal/protocol.hpp"
#include "skeletal/skeleton.hpp"

namespace skeletal {

struct SearchBounds {
  int max_added_strands = 3;
  int max_fresh_atoms = 4;
  int max_states = 20000;
};

/// A realized homomorphic image of the start skeleton.
struct Shape {
  Homomorphism hom;
  Skeleton skeleton;
};

struct ShapeResult {
  std::vector<Shape> shapes;
  /// True iff the bounded space was explored without hitting max_states.
  bool exhausted = true;
  int states = 0;
};

/// Non-pair ingredient subterms of `t`: encryptions, atoms and
/// indeterminates reachable without entering a key or stopping at a pair.
std::vector<Term> component_subterms(const Term& t);

/// Breadth-first search for the minimal realized images of `start`.
/// Realized states are collected and not expanded further.
ShapeResult shapes(const Skeleton& start, const Protocol& protocol,
                   const SearchBounds& bounds = {});

/// K : h_target -> j_target with j = K ∘ h on `source`, when one exists.
std::optional<Homomorphism> factors_through(const Homomorphism& j,
                                            const Skeleton& j_target,
                                            const Homomorphism& h,
                                            const Skeleton& h_target,
                                            const Skeleton& source);

struct DeadResult {
  bool dead = false;
  bool exhausted = true;
  SearchBounds bounds;
};

/// No realized image within `bounds`. Conclusive only up to the bound.
DeadResult dead_within_bound(const Skeleton& sk, const Protocol& protocol,
                             const SearchBounds& bounds = {});

enum class VerdictKind { achieved, counterexample, bound_exceeded };

std::string_view to_string(VerdictKind v);

struct Verdict {
  VerdictKind kind = VerdictKind::achieved;
  /// The hypothesis has no characteristic skeleton: nothing satisfies it.
  bool vacuous = false;
  CharacteristicResult characteristic;
  ShapeResult search;
  /// Index into search.shapes of the first shape violating the conclusion.
  std::optional<std::size_t> counterexample;
  SearchBounds bounds;
};

Verdict check_goal(const Protocol& protocol, const SecurityGoal& goal,
                   const SearchBounds& bounds = {});

}  // namespace skeletal

#endif  // SKELETAL_SHAPES_HPP
