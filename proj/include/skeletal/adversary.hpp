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

#ifndef SKELETAL_ADVERSARY_HPP
#define SKELETAL_ADVERSARY_HPP

#include <map>
#include <set>
#include <vector>

#include "skeletal/skeleton.hpp"
#include "skeletal/term.hpp"

namespace skeletal {

/// What the adversary knows before one reception.
struct AdversaryContext {
  std::vector<Term> available;
  std::set<Term> non;
  std::set<Term> unique_originated;

  /// Atoms outside non and unique_originated; indeterminates always.
  bool creatable(const Term& t) const;
};

/// Dolev-Yao derivability for one context: the available messages are
/// analyzed once, after which targets are synthesized on demand.
class Deriver {
 public:
  explicit Deriver(AdversaryContext ctx);

  bool derivable(const Term& target);
  /// The analyzed set: available messages closed under separation and
  /// decryption with derivable keys.
  const std::set<Term>& analyzed() const { return analyzed_; }

 private:
  bool synthesize(const Term& t);

  AdversaryContext ctx_;
  std::set<Term> analyzed_;
  std::map<Term, bool> memo_;
};

bool derivable(const AdversaryContext& ctx, const Term& target);

/// Context of reception `n`: transmissions strictly before it, sk's non set
/// and the unique atoms that originate in sk.
AdversaryContext context_at(const Skeleton& sk, const NodeRef& n);

/// Receptions whose message is not derivable from their context.
std::vector<NodeRef> unrealized_nodes(const Skeleton& sk);

bool realized(const Skeleton& sk);

}  // namespace skeletal

#endif  // SKELETAL_ADVERSARY_HPP
