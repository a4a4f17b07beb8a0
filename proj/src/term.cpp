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

#include "skeletal/term.hpp"

#include <algorithm>
#include <functional>
#include <sstream>
#include <stdexcept>

namespace skeletal {

namespace {

std::size_t mix(std::size_t seed, std::size_t v) {
  return seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2));
}

}  // namespace

std::string_view to_string(Sort s) {
  switch (s) {
    case Sort::name: return "name";
    case Sort::text: return "text";
    case Sort::nonce: return "nonce";
    case Sort::skey: return "skey";
    case Sort::akey: return "akey";
  }
  return "?";
}

std::optional<Sort> sort_from_string(std::string_view s) {
  if (s == "name") return Sort::name;
  if (s == "text") return Sort::text;
  if (s == "nonce") return Sort::nonce;
  if (s == "skey") return Sort::skey;
  if (s == "akey") return Sort::akey;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Term

Term Term::make(TermKind kind, Sort sort, std::string name,
                std::vector<Term> children) {
  std::size_t h = mix(static_cast<std::size_t>(kind) * 31 + 7,
                      static_cast<std::size_t>(sort));
  h = mix(h, std::hash<std::string>{}(name));
  int depth = 0;
  std::size_t size = 1;
  for (const Term& c : children) {
    h = mix(h, c.hash());
    depth = std::max(depth, c.depth() + 1);
    size += c.size();
  }
  // Constructed keys are leaves of the message tree.
  if (kind == TermKind::sign_key || kind == TermKind::public_key ||
      kind == TermKind::inverse) {
    depth = 0;
  }
  return Term(std::make_shared<const Node>(
      Node{kind, sort, std::move(name), std::move(children), h, depth, size}));
}

Term Term::atom(std::string name, Sort sort) {
  return make(TermKind::atom, sort, std::move(name), {});
}

Term Term::indeterminate(std::string name) {
  return make(TermKind::indeterminate, Sort::name, std::move(name), {});
}

Term Term::sign_key(const Term& name) {
  if (name.kind() != TermKind::atom || name.sort() != Sort::name) {
    throw std::invalid_argument("sk expects a name atom, got " +
                                to_string(name));
  }
  return make(TermKind::sign_key, Sort::akey, {}, {name});
}

Term Term::public_key(const Term& name) {
  if (name.kind() != TermKind::atom || name.sort() != Sort::name) {
    throw std::invalid_argument("pk expects a name atom, got " +
                                to_string(name));
  }
  return make(TermKind::public_key, Sort::akey, {}, {name});
}

Term Term::inverse(const Term& key) {
  if (!key.is_atom()) {
    throw std::invalid_argument("inverse of non-atomic term " + to_string(key));
  }
  if (key.kind() == TermKind::inverse) return key.argument();
  if (key.sort() == Sort::skey) return key;
  if (key.sort() != Sort::akey) {
    throw std::invalid_argument("inverse of non-key atom " + to_string(key));
  }
  return make(TermKind::inverse, Sort::akey, {}, {key});
}

Term Term::encryption(Term plain, Term key) {
  return make(TermKind::encryption, Sort::name, {},
              {std::move(plain), std::move(key)});
}

Term Term::pair(Term left, Term right, std::string tag) {
  return make(TermKind::pair, Sort::name, std::move(tag),
              {std::move(left), std::move(right)});
}

bool Term::is_atom() const {
  switch (kind()) {
    case TermKind::atom:
    case TermKind::sign_key:
    case TermKind::public_key:
    case TermKind::inverse:
      return true;
    default:
      return false;
  }
}

std::optional<Sort> Term::sort() const {
  if (!is_atom()) return std::nullopt;
  return node_->sort;
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (a.hash() != b.hash()) return false;
  return (a <=> b) == std::strong_ordering::equal;
}

std::strong_ordering operator<=>(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return std::strong_ordering::equal;
  if (auto c = a.kind() <=> b.kind(); c != 0) return c;
  if (auto c = a.node_->sort <=> b.node_->sort; c != 0) return c;
  if (auto c = a.node_->name <=> b.node_->name; c != 0) return c;
  const auto& ac = a.node_->children;
  const auto& bc = b.node_->children;
  for (std::size_t i = 0; i < ac.size() && i < bc.size(); ++i) {
    if (auto c = ac[i] <=> bc[i]; c != 0) return c;
  }
  return ac.size() <=> bc.size();
}

namespace {

void render(std::ostream& os, const Term& t) {
  switch (t.kind()) {
    case TermKind::atom:
    case TermKind::indeterminate:
      os << t.name();
      return;
    case TermKind::sign_key:
      os << "(sk " << t.argument().name() << ")";
      return;
    case TermKind::public_key:
      os << "(pk " << t.argument().name() << ")";
      return;
    case TermKind::inverse:
      os << "(invk ";
      render(os, t.argument());
      os << ")";
      return;
    case TermKind::encryption:
      os << "(enc ";
      render(os, t.left());
      os << " ";
      render(os, t.right());
      os << ")";
      return;
    case TermKind::pair: {
      if (!t.tag().empty()) {
        os << "(tag \"" << t.tag() << "\" ";
        render(os, t.left());
        os << " ";
        render(os, t.right());
        os << ")";
        return;
      }
      // Right-nested untagged pairs print as one flat cat.
      os << "(cat ";
      render(os, t.left());
      Term rest = t.right();
      while (rest.kind() == TermKind::pair && rest.tag().empty()) {
        os << " ";
        render(os, rest.left());
        rest = rest.right();
      }
      os << " ";
      render(os, rest);
      os << ")";
      return;
    }
  }
}

}  // namespace

std::string to_string(const Term& t) {
  std::ostringstream os;
  render(os, t);
  return os.str();
}

std::ostream& operator<<(std::ostream& os, const Term& t) {
  render(os, t);
  return os;
}

Term decryption_key(const Term& key) {
  if (key.is_atom() && key.sort() == Sort::akey) return Term::inverse(key);
  return key;
}

void collect_variables(const Term& t, std::set<Term>& out) {
  if (t.is_variable()) {
    out.insert(t);
    return;
  }
  switch (t.kind()) {
    case TermKind::sign_key:
    case TermKind::public_key:
    case TermKind::inverse:
      collect_variables(t.argument(), out);
      return;
    case TermKind::encryption:
    case TermKind::pair:
      collect_variables(t.left(), out);
      collect_variables(t.right(), out);
      return;
    default:
      return;
  }
}

std::set<Term> variables(const Term& t) {
  std::set<Term> out;
  collect_variables(t, out);
  return out;
}

void collect_atoms(const Term& t, std::set<Term>& out) {
  if (t.is_atom()) {
    out.insert(t);
    if (t.kind() != TermKind::atom) collect_atoms(t.argument(), out);
    return;
  }
  if (t.is_compound()) {
    collect_atoms(t.left(), out);
    collect_atoms(t.right(), out);
  }
}

void collect_subterms(const Term& t, std::set<Term>& out) {
  if (!out.insert(t).second) return;
  switch (t.kind()) {
    case TermKind::sign_key:
    case TermKind::public_key:
    case TermKind::inverse:
      collect_subterms(t.argument(), out);
      return;
    case TermKind::encryption:
    case TermKind::pair:
      collect_subterms(t.left(), out);
      collect_subterms(t.right(), out);
      return;
    default:
      return;
  }
}

// ---------------------------------------------------------------------------
// Paths

std::optional<Term> path_apply(std::span<const Step> path, const Term& t) {
  Term cur = t;
  for (Step s : path) {
    if (!cur.is_compound()) return std::nullopt;
    cur = s == Step::left ? cur.left() : cur.right();
  }
  return cur;
}

bool traverses_key_edge(std::span<const Step> path, const Term& t) {
  Term cur = t;
  bool key_edge = false;
  for (Step s : path) {
    if (!cur.is_compound()) {
      throw std::invalid_argument("path is not defined on " + to_string(t));
    }
    if (s == Step::right && cur.kind() == TermKind::encryption) key_edge = true;
    cur = s == Step::left ? cur.left() : cur.right();
  }
  return key_edge;
}

bool is_ingredient(const Term& t0, const Term& t) {
  if (t0 == t) return true;
  switch (t.kind()) {
    case TermKind::encryption:
      return is_ingredient(t0, t.left());
    case TermKind::pair:
      return is_ingredient(t0, t.left()) || is_ingredient(t0, t.right());
    default:
      return false;
  }
}

bool appears_in(const Term& t0, const Term& t) {
  if (t0 == t) return true;
  if (!t.is_compound()) return false;
  return appears_in(t0, t.left()) || appears_in(t0, t.right());
}

// ---------------------------------------------------------------------------
// Substitutions

bool sort_accepts(const Term& var, const Term& value) {
  if (var.is_indeterminate()) return true;
  if (!var.is_base_atom() || !value.is_atom()) return false;
  return var.sort() == value.sort();
}

bool Substitution::bind(const Term& var, const Term& value) {
  if (!var.is_variable() || !sort_accepts(var, value)) return false;
  auto [it, inserted] = map_.emplace(var, value);
  return inserted || it->second == value;
}

std::optional<Term> Substitution::lookup(const Term& var) const {
  auto it = map_.find(var);
  if (it == map_.end()) return std::nullopt;
  return it->second;
}

Term Substitution::apply(const Term& t) const {
  if (map_.empty()) return t;
  switch (t.kind()) {
    case TermKind::atom:
    case TermKind::indeterminate: {
      auto it = map_.find(t);
      return it == map_.end() ? t : it->second;
    }
    case TermKind::sign_key: {
      Term a = apply(t.argument());
      return a == t.argument() ? t : Term::sign_key(a);
    }
    case TermKind::public_key: {
      Term a = apply(t.argument());
      return a == t.argument() ? t : Term::public_key(a);
    }
    case TermKind::inverse: {
      Term a = apply(t.argument());
      return a == t.argument() ? t : Term::inverse(a);
    }
    case TermKind::encryption: {
      Term l = apply(t.left());
      Term r = apply(t.right());
      if (l == t.left() && r == t.right()) return t;
      return Term::encryption(std::move(l), std::move(r));
    }
    case TermKind::pair: {
      Term l = apply(t.left());
      Term r = apply(t.right());
      if (l == t.left() && r == t.right()) return t;
      return Term::pair(std::move(l), std::move(r), t.tag());
    }
  }
  return t;
}

Substitution Substitution::restricted(const std::set<Term>& keep) const {
  Substitution out;
  for (const auto& [k, v] : map_) {
    if (keep.contains(k)) out.map_.emplace(k, v);
  }
  return out;
}

Term apply(const Substitution& s, const Term& t) { return s.apply(t); }

Substitution compose(const Substitution& outer, const Substitution& inner) {
  Substitution out;
  for (const auto& [k, v] : inner.bindings()) {
    Term image = outer.apply(v);
    if (image != k) out.bind(k, image);
  }
  for (const auto& [k, v] : outer.bindings()) {
    if (!inner.contains(k)) out.bind(k, v);
  }
  return out;
}

namespace {

bool occurs(const Term& var, const Term& t) {
  if (t == var) return true;
  switch (t.kind()) {
    case TermKind::sign_key:
    case TermKind::public_key:
    case TermKind::inverse:
      return occurs(var, t.argument());
    case TermKind::encryption:
    case TermKind::pair:
      return occurs(var, t.left()) || occurs(var, t.right());
    default:
      return false;
  }
}

// Adds var -> value to a solved substitution, keeping it solved.
bool extend_solved(Substitution& theta, const Term& var, const Term& value) {
  if (!sort_accepts(var, value) || occurs(var, value)) return false;
  Substitution single;
  single.bind(var, value);
  theta = compose(single, theta);
  return true;
}

class Unifier {
 public:
  explicit Unifier(Substitution start) : theta_(std::move(start)) {}

  bool solve(const Term& u, const Term& v) {
    std::vector<std::pair<Term, Term>> work{{u, v}};
    while (!work.empty()) {
      auto [a, b] = work.back();
      work.pop_back();
      a = theta_.apply(a);
      b = theta_.apply(b);
      if (a == b) continue;
      if (!step(a, b, work)) return false;
    }
    return true;
  }

  Substitution result() && { return std::move(theta_); }

 private:
  bool step(const Term& a, const Term& b,
            std::vector<std::pair<Term, Term>>& work) {
    // Indeterminates absorb anything, atoms included.
    if (b.is_indeterminate()) return extend_solved(theta_, b, a);
    if (a.is_indeterminate()) return extend_solved(theta_, a, b);
    if (b.is_base_atom()) return extend_solved(theta_, b, a);
    if (a.is_base_atom()) return extend_solved(theta_, a, b);

    const TermKind ka = a.kind();
    const TermKind kb = b.kind();
    if (ka == TermKind::inverse && kb == TermKind::inverse) {
      work.emplace_back(a.argument(), b.argument());
      return true;
    }
    if (ka == TermKind::inverse || kb == TermKind::inverse) {
      // inv(x) = y  iff  x = inv(y); only a base key variable can absorb it.
      const Term& inv_side = ka == TermKind::inverse ? a : b;
      const Term& other = ka == TermKind::inverse ? b : a;
      if (!other.is_atom()) return false;
      const Term& inner = inv_side.argument();
      if (!inner.is_base_atom()) return false;
      return extend_solved(theta_, inner, Term::inverse(other));
    }
    if (ka != kb) return false;
    switch (ka) {
      case TermKind::sign_key:
      case TermKind::public_key:
        work.emplace_back(a.argument(), b.argument());
        return true;
      case TermKind::encryption:
        work.emplace_back(a.left(), b.left());
        work.emplace_back(a.right(), b.right());
        return true;
      case TermKind::pair:
        if (a.tag() != b.tag()) return false;
        work.emplace_back(a.left(), b.left());
        work.emplace_back(a.right(), b.right());
        return true;
      default:
        return false;
    }
  }

  Substitution theta_;
};

bool match_into(const Term& pattern, const Term& data, Substitution& s) {
  if (pattern.is_variable()) {
    if (auto bound = s.lookup(pattern)) return *bound == data;
    return s.bind(pattern, data);
  }
  switch (pattern.kind()) {
    case TermKind::sign_key:
    case TermKind::public_key:
      return data.kind() == pattern.kind() &&
             match_into(pattern.argument(), data.argument(), s);
    case TermKind::inverse: {
      if (!data.is_atom() || data.sort() != Sort::akey) return false;
      const Term flipped = Term::inverse(data);
      // pattern's argument is never itself an inverse, so this shrinks.
      return match_into(pattern.argument(), flipped, s);
    }
    case TermKind::encryption:
      return data.kind() == TermKind::encryption &&
             match_into(pattern.left(), data.left(), s) &&
             match_into(pattern.right(), data.right(), s);
    case TermKind::pair:
      return data.kind() == TermKind::pair && data.tag() == pattern.tag() &&
             match_into(pattern.left(), data.left(), s) &&
             match_into(pattern.right(), data.right(), s);
    default:
      return false;
  }
}

}  // namespace

std::optional<Substitution> unify(const Term& u, const Term& v,
                                  const Substitution& start) {
  Unifier unifier(start);
  if (!unifier.solve(u, v)) return std::nullopt;
  return std::move(unifier).result();
}

std::optional<Substitution> unify_all(
    std::span<const std::pair<Term, Term>> equations,
    const Substitution& start) {
  Unifier unifier(start);
  for (const auto& [u, v] : equations) {
    if (!unifier.solve(u, v)) return std::nullopt;
  }
  return std::move(unifier).result();
}

std::optional<Substitution> match(const Term& pattern, const Term& data,
                                  const Substitution& start) {
  Substitution s = start;
  if (!match_into(pattern, data, s)) return std::nullopt;
  return s;
}

std::ostream& operator<<(std::ostream& os, const Substitution& s) {
  os << "{";
  bool first = true;
  for (const auto& [k, v] : s.bindings()) {
    if (!first) os << ", ";
    first = false;
    os << k << " -> " << v;
  }
  return os << "}";
}

// ---------------------------------------------------------------------------

void FreshSupply::reserve_all(const Term& t) {
  std::set<Term> vars;
  collect_variables(t, vars);
  for (const Term& v : vars) taken_.insert(v.name());
}

std::string FreshSupply::next_name(std::string_view base) {
  std::string stem(base);
  if (stem.empty()) stem = "x";
  if (!taken_.contains(stem)) {
    taken_.insert(stem);
    ++issued_;
    return stem;
  }
  for (;;) {
    std::string candidate = stem + "-" + std::to_string(++counter_);
    if (taken_.insert(candidate).second) {
      ++issued_;
      return candidate;
    }
  }
}

Term FreshSupply::atom(std::string_view base, Sort sort) {
  return Term::atom(next_name(base), sort);
}

Term FreshSupply::indeterminate(std::string_view base) {
  return Term::indeterminate(next_name(base));
}

}  // namespace skeletal
