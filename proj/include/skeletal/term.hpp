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

#ifndef SKELETAL_TERM_HPP
#define SKELETAL_TERM_HPP

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace skeletal {

/// Sorts of atomic values. Every atom carries exactly one.
enum class Sort : std::uint8_t { name, text, nonce, skey, akey };

std::string_view to_string(Sort s);
std::optional<Sort> sort_from_string(std::string_view s);

enum class TermKind : std::uint8_t {
  atom,           // base atom: identifier + sort
  sign_key,       // sk(name)
  public_key,     // pk(name)
  inverse,        // inv(akey); never wraps another inverse or an skey
  indeterminate,  // untyped variable
  encryption,     // {plain}key
  pair,           // [tag] left ^ right, empty tag is plain concatenation
};

/// An immutable message of the free algebra. Copies share structure.
///
/// Atoms (base atoms and the constructed keys sk/pk/inv) and indeterminates
/// are the leaves; encryption and tagged concatenation are the only
/// constructors a path may descend through.
class Term {
 public:
  static Term atom(std::string name, Sort sort);
  static Term indeterminate(std::string name);
  /// Throws std::invalid_argument unless `name` is a name-sorted atom.
  static Term sign_key(const Term& name);
  static Term public_key(const Term& name);
  /// Normalizing inverse: inv(inv(k)) = k, inv of an skey is itself.
  /// Throws std::invalid_argument for non-atoms.
  static Term inverse(const Term& key);
  static Term encryption(Term plain, Term key);
  static Term pair(Term left, Term right, std::string tag = {});

  TermKind kind() const { return node_->kind; }
  bool is_atom() const;
  bool is_base_atom() const { return kind() == TermKind::atom; }
  bool is_indeterminate() const { return kind() == TermKind::indeterminate; }
  /// Base atoms and indeterminates are the substitutable parameters.
  bool is_variable() const { return is_base_atom() || is_indeterminate(); }
  bool is_compound() const {
    return kind() == TermKind::encryption || kind() == TermKind::pair;
  }

  /// Sort of an atom; std::nullopt for indeterminates and compound terms.
  std::optional<Sort> sort() const;
  const std::string& name() const { return node_->name; }
  const std::string& tag() const { return node_->name; }
  /// Plaintext / left component. Argument of sk, pk, inv.
  const Term& left() const { return node_->children[0]; }
  /// Key / right component.
  const Term& right() const { return node_->children[1]; }
  const Term& argument() const { return node_->children[0]; }

  std::size_t hash() const { return node_->hash; }
  int depth() const { return node_->depth; }
  std::size_t size() const { return node_->size; }

  friend bool operator==(const Term& a, const Term& b);
  friend std::strong_ordering operator<=>(const Term& a, const Term& b);

 private:
  struct Node {
    TermKind kind;
    Sort sort;
    std::string name;
    std::vector<Term> children;
    std::size_t hash;
    int depth;
    std::size_t size;
  };
  explicit Term(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  static Term make(TermKind kind, Sort sort, std::string name,
                   std::vector<Term> children);

  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

/// S-expression rendering: atoms by name, (sk a), (pk a), (invk k),
/// (enc t k), (cat a b c), (tag "x" a b).
std::string to_string(const Term& t);
std::ostream& operator<<(std::ostream& os, const Term& t);

/// Key used to decrypt ciphertexts made with `key`. Asymmetric keys
/// invert; every other key is symmetric.
Term decryption_key(const Term& key);

/// Base atoms and indeterminates occurring in `t`, including inside keys.
void collect_variables(const Term& t, std::set<Term>& out);
std::set<Term> variables(const Term& t);
/// Every atom (base or constructed) occurring anywhere in `t`.
void collect_atoms(const Term& t, std::set<Term>& out);
/// All subterms, including `t` itself and the arguments of constructed keys.
void collect_subterms(const Term& t, std::set<Term>& out);

// ---------------------------------------------------------------------------
// Paths

enum class Step : std::uint8_t { left, right };
using Path = std::vector<Step>;

std::optional<Term> path_apply(std::span<const Step> path, const Term& t);

/// True iff some proper prefix of `path` lands on an encryption and the next
/// step is `right`. Throws std::invalid_argument when the path falls off `t`.
bool traverses_key_edge(std::span<const Step> path, const Term& t);

/// t0 is an ingredient of t: reachable without entering a key position.
bool is_ingredient(const Term& t0, const Term& t);
/// t0 appears in t: reachable along any path.
bool appears_in(const Term& t0, const Term& t);

// ---------------------------------------------------------------------------
// Substitutions

/// A message homomorphism: a sort-respecting map on base atoms plus an
/// arbitrary map on indeterminates. Kept idempotent (no variable of the
/// domain occurs in the range), so application is a single pass.
class Substitution {
 public:
  using Map = std::map<Term, Term>;

  Substitution() = default;

  /// Adds var -> value. Returns false if `var` is not a variable, the sort
  /// does not match, or `var` is already bound to something else.
  /// Does not re-normalize the range; callers building solved forms use
  /// unify/match or compose.
  bool bind(const Term& var, const Term& value);

  std::optional<Term> lookup(const Term& var) const;
  bool contains(const Term& var) const { return map_.contains(var); }
  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  const Map& bindings() const { return map_; }

  Term apply(const Term& t) const;

  /// Removes bindings for variables outside `keep`.
  Substitution restricted(const std::set<Term>& keep) const;

  friend bool operator==(const Substitution&, const Substitution&) = default;

 private:
  Map map_;
};

/// True iff a base atom of sort `var_sort` may be replaced by `value`.
bool sort_accepts(const Term& var, const Term& value);

Term apply(const Substitution& s, const Term& t);

/// (outer ∘ inner): apply inner first, then outer.
Substitution compose(const Substitution& outer, const Substitution& inner);

/// Most general unifier of u and v, extending `start` (which must be in
/// solved form). When both sides are variables, the right-hand one is bound.
std::optional<Substitution> unify(const Term& u, const Term& v,
                                  const Substitution& start = {});
std::optional<Substitution> unify_all(
    std::span<const std::pair<Term, Term>> equations,
    const Substitution& start = {});

/// One-sided matching: finds s ⊇ start with apply(s, pattern) == data,
/// binding only variables of `pattern`. `data` is treated as ground.
std::optional<Substitution> match(const Term& pattern, const Term& data,
                                  const Substitution& start = {});

std::ostream& operator<<(std::ostream& os, const Substitution& s);

// ---------------------------------------------------------------------------

/// Deterministic supply of atoms and indeterminates not yet in use.
/// One instance per analysis run.
class FreshSupply {
 public:
  FreshSupply() = default;
  explicit FreshSupply(const std::set<std::string>& taken) : taken_(taken) {}

  void reserve(const std::string& name) { taken_.insert(name); }
  void reserve_all(const Term& t);

  Term atom(std::string_view base, Sort sort);
  Term indeterminate(std::string_view base);
  /// Counter of names handed out so far.
  int issued() const { return issued_; }

 private:
  std::string next_name(std::string_view base);

  std::set<std::string> taken_;
  int counter_ = 0;
  int issued_ = 0;
};

}  // namespace skeletal

template <>
struct std::hash<skeletal::Term> {
  std::size_t operator()(const skeletal::Term& t) const { return t.hash(); }
};

#endif  // SKELETAL_TERM_HPP
