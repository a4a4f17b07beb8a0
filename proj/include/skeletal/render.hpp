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

#ifndef SKELETAL_RENDER_HPP
#define SKELETAL_RENDER_HPP

#include <string>
#include <string_view>

#include "json.hpp"
#include "skeletal/goal.hpp"
#include "skeletal/protocol.hpp"
#include "skeletal/shapes.hpp"
#include "skeletal/skeleton.hpp"

namespace skeletal {

/// Parameter binding of a strand read back from its role, or an empty
/// substitution when the role is unknown.
Substitution strand_binding(const Strand& s, const Protocol& protocol);

/// Indented plain-text listing.
std::string to_text(const Skeleton& sk, const Protocol& protocol);

/// Graphviz rendering: one cluster per strand, bold double edges for
/// strand succession, dashed edges for cross-strand order, and a note
/// node listing non and unique.
std::string to_dot(const Skeleton& sk, const Protocol& protocol,
                   std::string_view name);

/// {strands: [{role, length, binding, events}], order, non, unique}
nlohmann::ordered_json to_json(const Skeleton& sk, const Protocol& protocol);
nlohmann::ordered_json to_json(const Assignment& sigma);
nlohmann::ordered_json to_json(const SearchBounds& b);

/// Record for `check`: verdict, shapes, counterexample, bounds, exhausted.
nlohmann::ordered_json to_json(const Verdict& v, const Protocol& protocol);

}  // namespace skeletal

#endif  // SKELETAL_RENDER_HPP
