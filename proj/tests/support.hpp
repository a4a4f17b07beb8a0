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

// Test-only helpers: fixture loading, hand-built skeletons and oracles that
// recompute library answers by independent, slower means.

#ifndef SKELETAL_TESTS_SUPPORT_HPP
#define SKELETAL_TESTS_SUPPORT_HPP

#include <algorithm>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "skeletal/adversary.hpp"
#include "skeletal/characteristic.hpp"
#include "skeletal/goal.hpp"
#include "skeletal/protocol.hpp"
#include "skeletal/shapes.hpp"
#include "skeletal/skeleton.hpp"
#include "skeletal/term.hpp"

namespace skeletal::testing {

// ---------------------------------------------------------------------------
// Fixtures

inline std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string fixture(const std::string& name) {
  return slurp(std::string(SKELETAL_FIXTURE_DIR) + "/" + name);
}

inline const Protocol& blanchet() {
  static const Protocol p = parse_protocol(fixture("blanchet.prot"));
  return p;
}

inline const Protocol& blanchet_fix() {
  static const Protocol p = parse_protocol(fixture("blanchet-fix.prot"));
  return p;
}

inline SecurityGoal goal(const std::string& name, const Protocol& p) {
  return parse_goal(fixture(name), p);
}

inline const std::vector<std::string>& goal_files() {
  static const std::vector<std::string> names{
      "goal-a-auth.goal", "goal-a-secrecy.goal", "goal-b-auth.goal",
      "goal-b-secrecy.goal"};
  return names;
}

inline Term name(const std::string& n) { return Term::atom(n, Sort::name); }
inline Term skey(const std::string& n) { return Term::atom(n, Sort::skey); }
inline Term text(const std::string& n) { return Term::atom(n, Sort::text); }
inline Term nonce(const std::string& n) { return Term::atom(n, Sort::nonce); }
inline Term akey(const std::string& n) { return Term::atom(n, Sort::akey); }

inline Term enc(const Term& p, const Term& k) { return Term::encryption(p, k); }
inline Term cat(const Term& l, const Term& r) { return Term::pair(l, r); }
inline Term sk(const Term& a) { return Term::sign_key(a); }
inline Term pk(const Term& a) { return Term::public_key(a); }
inline Term inv(const Term& k) { return Term::inverse(k); }

/// {{k}sk(a)}pk(b)
inline Term t0(const Term& a, const Term& b, const Term& k) {
  return enc(enc(k, sk(a)), pk(b));
}

inline Event send(const Term& t) { return Event{Direction::transmit, t}; }
inline Event recv(const Term& t) { return Event{Direction::receive, t}; }

inline Strand init_strand(const Term& a, const Term& b, const Term& k,
                          const Term& s, int length = 2) {
  Strand st{"init", {send(t0(a, b, k)), recv(enc(s, k))}};
  st.events.erase(st.events.begin() + length, st.events.end());
  return st;
}

inline Strand resp_strand(const Term& a, const Term& b, const Term& k,
                          const Term& s, int length = 2) {
  Strand st{"resp", {recv(t0(a, b, k)), send(enc(s, k))}};
  st.events.erase(st.events.begin() + length, st.events.end());
  return st;
}

inline Strand lsn_strand(const Term& x) { return Strand{"lsn", {recv(x)}}; }

// Hand-built skeletons of the worked example. Non sets follow the goal
// fixtures: {sk(A), pk(B)^-1}.
inline Skeleton A0() {
  Skeleton out;
  out.strands.push_back(init_strand(name("A"), name("B"), skey("K"), text("S")));
  out.non = {sk(name("A")), inv(pk(name("B")))};
  out.unique = {skey("K")};
  return out;
}

inline Skeleton A1() {
  Skeleton out = A0();
  out.strands.push_back(resp_strand(name("A"), name("B"), skey("K"), text("S")));
  out.order = {{NodeRef{0, 1}, NodeRef{1, 1}}, {NodeRef{1, 2}, NodeRef{0, 2}}};
  return out;
}

inline Skeleton A2() {
  Skeleton out = A0();
  out.strands.push_back(lsn_strand(text("S")));
  out.unique.insert(text("S"));
  return out;
}

inline Skeleton A3() {
  Skeleton out;
  out.strands.push_back(resp_strand(name("A"), name("B"), skey("K"), text("S")));
  out.non = {sk(name("A")), inv(pk(name("B")))};
  out.unique = {skey("K")};
  return out;
}

inline Skeleton A4() {
  Skeleton out = A3();
  out.strands.push_back(init_strand(name("A"), name("C"), skey("K"), text("S"), 1));
  out.order = {{NodeRef{1, 1}, NodeRef{0, 1}}};
  return out;
}

// ---------------------------------------------------------------------------
// Random terms

struct TermPool {
  std::vector<Term> leaves;
  std::vector<std::string> tags{"", "", "t"};
};

/// Names a b c, skeys k1 k2, nonce n1, text t1, akey q, constructed keys,
/// and indeterminates x y.
inline TermPool default_pool(bool with_indeterminates = true) {
  TermPool pool;
  pool.leaves = {name("a"),  name("b"),         name("c"),       skey("k1"),
                 skey("k2"), nonce("n1"),       text("t1"),      akey("q"),
                 sk(name("a")), pk(name("b")),  inv(pk(name("a"))), inv(akey("q"))};
  if (with_indeterminates) {
    pool.leaves.push_back(Term::indeterminate("x"));
    pool.leaves.push_back(Term::indeterminate("y"));
  }
  return pool;
}

inline Term random_term(std::mt19937& rng, int depth, const TermPool& pool) {
  std::uniform_int_distribution<int> coin(0, 2);
  if (depth <= 0 || coin(rng) == 0) {
    std::uniform_int_distribution<std::size_t> pick(0, pool.leaves.size() - 1);
    return pool.leaves[pick(rng)];
  }
  Term l = random_term(rng, depth - 1, pool);
  Term r = random_term(rng, depth - 1, pool);
  if (coin(rng) == 0) {
    std::uniform_int_distribution<std::size_t> pick(0, pool.tags.size() - 1);
    return Term::pair(l, r, pool.tags[pick(rng)]);
  }
  return Term::encryption(l, r);
}

/// Every path of `t`, by explicit tree walk.
inline void all_paths(const Term& t, Path& prefix, std::vector<Path>& out) {
  out.push_back(prefix);
  if (!t.is_compound()) return;
  prefix.push_back(Step::left);
  all_paths(t.left(), prefix, out);
  prefix.back() = Step::right;
  all_paths(t.right(), prefix, out);
  prefix.pop_back();
}

/// Ingredient by the path definition: a path reaching t0 with no key edge.
inline bool ingredient_by_paths(const Term& t0, const Term& t) {
  std::vector<Path> paths;
  Path p;
  all_paths(t, p, paths);
  for (const Path& path : paths) {
    if (path_apply(path, t) == t0 && !traverses_key_edge(path, t)) return true;
  }
  return false;
}

inline bool appears_by_paths(const Term& t0, const Term& t) {
  std::vector<Path> paths;
  Path p;
  all_paths(t, p, paths);
  for (const Path& path : paths) {
    if (path_apply(path, t) == t0) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Dolev-Yao closure oracle

/// Forward closure restricted to the subterms of the context and target
/// (plus the decryption keys of their ciphertexts): start from the
/// available messages, creatable atoms and indeterminates, then apply
/// separation, decryption, pairing and encryption until nothing changes.
inline bool dy_closure(const AdversaryContext& ctx, const Term& target) {
  std::set<Term> universe;
  for (const Term& m : ctx.available) collect_subterms(m, universe);
  collect_subterms(target, universe);
  std::set<Term> keys;
  for (const Term& u : universe) {
    if (u.kind() == TermKind::encryption) keys.insert(decryption_key(u.right()));
  }
  for (const Term& k : keys) collect_subterms(k, universe);

  std::set<Term> known(ctx.available.begin(), ctx.available.end());
  for (const Term& u : universe) {
    if (u.is_indeterminate()) known.insert(u);
    if (u.is_atom() && !ctx.non.contains(u) && !ctx.unique_originated.contains(u)) {
      known.insert(u);
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const Term& u : universe) {
      if (known.contains(u)) continue;
      if (u.is_compound() && known.contains(u.left()) && known.contains(u.right())) {
        known.insert(u);
        changed = true;
      }
    }
    std::vector<Term> snapshot(known.begin(), known.end());
    for (const Term& m : snapshot) {
      if (m.kind() == TermKind::pair) {
        changed |= known.insert(m.left()).second;
        changed |= known.insert(m.right()).second;
      } else if (m.kind() == TermKind::encryption &&
                 known.contains(decryption_key(m.right()))) {
        changed |= known.insert(m.left()).second;
      }
    }
  }
  return known.contains(target);
}

// ---------------------------------------------------------------------------
// Unifier enumeration

/// Structural compatibility with unassigned variables as wildcards.
inline bool compatible(const Term& a, const Term& b, const std::set<Term>& open) {
  if (open.contains(a) || open.contains(b)) return true;
  if (a.kind() != b.kind()) return false;
  if (a.is_compound()) {
    if (a.kind() == TermKind::pair && a.tag() != b.tag()) return false;
    return compatible(a.left(), b.left(), open) && compatible(a.right(), b.right(), open);
  }
  if (a.is_variable()) return a == b;
  return compatible(a.argument(), b.argument(), open);
}

/// Enumerates substitutions over `vars` drawn from `domain` (sort-respecting)
/// that unify u and v, up to `limit` solutions and `budget` search nodes.
inline std::vector<Substitution> enumerate_unifiers(
    const Term& u, const Term& v, const std::vector<Term>& vars,
    const std::vector<Term>& domain, std::size_t limit = 200,
    std::size_t budget = 200000) {
  std::vector<Substitution> out;
  std::size_t nodes = 0;
  Substitution g;
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (out.size() >= limit || ++nodes > budget) return;
    std::set<Term> open(vars.begin() + static_cast<long>(i), vars.end());
    if (!compatible(g.apply(u), g.apply(v), open)) return;
    if (i == vars.size()) {
      if (g.apply(u) == g.apply(v)) out.push_back(g);
      return;
    }
    for (const Term& value : domain) {
      if (!sort_accepts(vars[i], value)) continue;
      Substitution saved = g;
      if (!g.bind(vars[i], value)) continue;
      go(i + 1);
      g = std::move(saved);
    }
  };
  go(0);
  return out;
}

/// δ with δ(β(x)) = γ(x) for every x in `vars`.
inline bool factors_via(const Substitution& gamma, const Substitution& beta,
                        const std::vector<Term>& vars) {
  Substitution delta;
  for (const Term& x : vars) {
    auto next = match(beta.apply(x), gamma.apply(x), delta);
    if (!next) return false;
    delta = std::move(*next);
  }
  for (const Term& x : vars) {
    if (delta.apply(beta.apply(x)) != gamma.apply(x)) return false;
  }
  return true;
}

/// Replaces random subterms by fresh indeterminates and random base atoms by
/// fresh atoms of the same sort, all named with `prefix`.
inline Term generalize(const Term& t, std::mt19937& rng, const std::string& prefix,
                       int& counter) {
  std::uniform_int_distribution<int> roll(0, 9);
  if (t.is_compound() && roll(rng) == 0) {
    return Term::indeterminate(prefix + std::to_string(counter++));
  }
  if (t.is_base_atom()) {
    if (roll(rng) < 3) return Term::atom(prefix + std::to_string(counter++), *t.sort());
    return t;
  }
  if (t.is_indeterminate()) return t;
  if (t.kind() == TermKind::encryption) {
    return Term::encryption(generalize(t.left(), rng, prefix, counter),
                            generalize(t.right(), rng, prefix, counter));
  }
  if (t.kind() == TermKind::pair) {
    return Term::pair(generalize(t.left(), rng, prefix, counter),
                      generalize(t.right(), rng, prefix, counter), t.tag());
  }
  // Constructed keys: generalize the name or key underneath.
  Term arg = generalize(t.argument(), rng, prefix, counter);
  if (!arg.is_atom()) return t;
  switch (t.kind()) {
    case TermKind::sign_key: return Term::sign_key(arg);
    case TermKind::public_key: return Term::public_key(arg);
    case TermKind::inverse: return Term::inverse(arg);
    default: return t;
  }
}

// ---------------------------------------------------------------------------
// Bounded realizability

/// Schedules the nodes of `sk` greedily, respecting strand order and
/// `sk.order`; a reception is scheduled once the closure oracle derives it
/// from the transmissions already scheduled. Returns the schedule when every
/// node fits, which then totally orders a realized image of `sk`.
inline std::optional<std::vector<NodeRef>> greedy_schedule(const Skeleton& sk) {
  std::set<Term> originating;
  for (const Term& a : sk.unique) {
    if (!origination_points(a, sk).empty()) originating.insert(a);
  }
  std::vector<int> next(sk.strands.size(), 1);
  std::set<NodeRef> done;
  std::vector<NodeRef> schedule;
  AdversaryContext ctx;
  ctx.non = sk.non;
  ctx.unique_originated = originating;
  const auto ready = [&](const NodeRef& n) {
    for (const auto& [a, b] : sk.order) {
      if (b == n && !done.contains(a)) return false;
    }
    return true;
  };
  bool progress = true;
  while (progress) {
    progress = false;
    for (int pass = 0; pass < 2; ++pass) {
      for (int s = 0; s < static_cast<int>(sk.strands.size()); ++s) {
        while (next[s] <= sk.strands[s].length()) {
          NodeRef n{s, next[s]};
          if (!ready(n)) break;
          const Event& e = sk.event(n);
          if (e.direction == Direction::receive) {
            if (pass == 0 || !dy_closure(ctx, e.message)) break;
          } else {
            ctx.available.push_back(e.message);
          }
          done.insert(n);
          schedule.push_back(n);
          ++next[s];
          progress = true;
        }
      }
    }
  }
  if (static_cast<int>(schedule.size()) != sk.node_count()) return std::nullopt;
  return schedule;
}

/// `sk` with cross-strand edges taken from a total schedule.
inline Skeleton with_schedule(const Skeleton& sk, const std::vector<NodeRef>& order) {
  Skeleton out = sk;
  for (std::size_t i = 0; i < order.size(); ++i) {
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (order[i].strand != order[j].strand) out.order.emplace(order[i], order[j]);
    }
  }
  return out;
}

/// All instances of role prefixes over the given parameter values.
inline std::vector<Strand> role_instances(const Protocol& p,
                                          const std::vector<Term>& values,
                                          bool with_listener = false) {
  std::vector<Strand> out;
  for (const Role& role : p.roles()) {
    if (role.name() == kListenerRole && !with_listener) continue;
    for (int j = 1; j <= role.length(); ++j) {
      const std::vector<Param> params = role.params_through(j);
      std::function<void(std::size_t, Substitution&)> go =
          [&](std::size_t i, Substitution& b) {
            if (i == params.size()) {
              out.push_back(Strand{role.name(), instantiate(role, b, j).events});
              return;
            }
            for (const Term& v : values) {
              Substitution next = b;
              if (!next.bind(params[i].variable(), v)) continue;
              go(i + 1, next);
            }
          };
      Substitution b;
      go(0, b);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Brute-force witness search

/// Parameter values of every strand prefix of `sk` (the search domain for
/// message variables), plus non and unique.
inline std::set<Term> parameter_closure(const Skeleton& sk, const Protocol& p) {
  std::set<Term> out;
  for (const Strand& s : sk.strands) {
    const Role* role = p.find_role(s.role);
    if (!role) continue;
    for (int j = 1; j <= s.length(); ++j) {
      auto b = instance_of(std::span<const Event>(s.events.data(), j), *role, j);
      if (!b) continue;
      for (const auto& [var, value] : b->bindings()) out.insert(value);
    }
  }
  out.insert(sk.non.begin(), sk.non.end());
  out.insert(sk.unique.begin(), sk.unique.end());
  return out;
}

/// Tries every assignment of the disjunct's existentials over nodes and the
/// parameter closure; true when one satisfies every conjunct.
inline bool exists_witness_brute(const Skeleton& sk, const Protocol& p,
                                 const Assignment& sigma, const Disjunct& d) {
  const std::vector<NodeRef> nodes = sk.nodes();
  const std::set<Term> closure = parameter_closure(sk, p);
  std::function<bool(std::size_t, Assignment&)> go = [&](std::size_t i,
                                                         Assignment& a) {
    if (i == d.existentials.size()) return satisfies_conjunction(sk, p, a, d.conjuncts);
    const VarDecl& v = d.existentials[i];
    if (v.type == VarType::node) {
      for (const NodeRef& n : nodes) {
        a[v.name] = n;
        if (go(i + 1, a)) return true;
      }
    } else {
      const std::optional<Sort> sort = sort_of(v.type);
      for (const Term& t : closure) {
        if (sort && !(t.is_atom() && t.sort() == *sort)) continue;
        a[v.name] = t;
        if (go(i + 1, a)) return true;
      }
    }
    a.erase(v.name);
    return false;
  };
  Assignment a = sigma;
  return go(0, a);
}

inline bool conclusion_brute(const Skeleton& sk, const Protocol& p,
                             const Assignment& sigma, const SecurityGoal& g) {
  for (const Disjunct& d : g.conclusion) {
    if (exists_witness_brute(sk, p, sigma, d)) return true;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Random homomorphic images

struct Image {
  Skeleton skeleton;
  Homomorphism hom;
};

/// Applies a few random structure-adding or identifying steps to `sk`,
/// keeping the composite homomorphism. Steps that would leave the space of
/// skeletons are skipped.
inline Image random_image(const Skeleton& sk, const Protocol& p, std::mt19937& rng,
                          int steps) {
  Image img{sk, identity_homomorphism(sk)};
  FreshSupply fresh;
  for (const Term& a : sk.atoms()) {
    if (a.is_variable()) fresh.reserve(a.name());
  }
  std::uniform_int_distribution<int> op(0, 4);
  for (int step = 0; step < steps; ++step) {
    std::vector<Term> vars;
    for (const Term& v : img.skeleton.node_variables()) vars.push_back(v);
    std::vector<Term> values = vars;
    values.push_back(fresh.atom("c", Sort::name));
    values.push_back(fresh.atom("kk", Sort::skey));
    values.push_back(fresh.atom("ss", Sort::text));
    std::optional<Mapped> next;
    switch (op(rng)) {
      case 0: {  // identify or rename one variable
        if (vars.empty()) break;
        std::uniform_int_distribution<std::size_t> pv(0, vars.size() - 1);
        std::uniform_int_distribution<std::size_t> pw(0, values.size() - 1);
        Substitution s;
        if (!s.bind(vars[pv(rng)], values[pw(rng)])) break;
        Mapped m = apply_substitution(img.skeleton, s);
        if (validate(m.skeleton) == Classification::invalid) break;
        auto h = hull(m.skeleton);
        if (!h) break;
        next = Mapped{h->skeleton, compose(h->hom, m.hom)};
        break;
      }
      case 1: {  // add a role instance
        std::vector<Strand> all = role_instances(p, values, true);
        if (all.empty()) break;
        std::uniform_int_distribution<std::size_t> ps(0, all.size() - 1);
        Mapped m = add_strand(img.skeleton, all[ps(rng)]);
        auto h = hull(m.skeleton);
        if (!h) break;
        next = Mapped{h->skeleton, compose(h->hom, m.hom)};
        break;
      }
      case 2: {  // add an order edge
        std::vector<NodeRef> nodes = img.skeleton.nodes();
        if (nodes.size() < 2) break;
        std::uniform_int_distribution<std::size_t> pn(0, nodes.size() - 1);
        NodeRef a = nodes[pn(rng)];
        NodeRef b = nodes[pn(rng)];
        if (a.strand == b.strand) break;
        Skeleton s = img.skeleton;
        s.order.emplace(a, b);
        if (!OrderClosure(s).acyclic()) break;
        next = Mapped{s, identity_homomorphism(img.skeleton)};
        break;
      }
      case 3: {  // extend a strand by one event of its role
        if (img.skeleton.strands.empty()) break;
        std::uniform_int_distribution<std::size_t> ps(0, img.skeleton.strands.size() - 1);
        const std::size_t si = ps(rng);
        const Strand& st = img.skeleton.strands[si];
        const Role* role = p.find_role(st.role);
        if (!role || st.length() >= role->length()) break;
        auto b = instance_of(st.events, *role, st.length());
        if (!b) break;
        Substitution full = *b;
        for (const Param& prm : role->params_through(st.length() + 1)) {
          if (full.contains(prm.variable())) continue;
          full.bind(prm.variable(), prm.sort ? fresh.atom(prm.id, *prm.sort)
                                             : fresh.indeterminate(prm.id));
        }
        Skeleton s = img.skeleton;
        s.strands[si].events = instantiate(*role, full, st.length() + 1).events;
        auto h = hull(s);
        if (!h) break;
        next = Mapped{h->skeleton, compose(h->hom, identity_homomorphism(img.skeleton))};
        break;
      }
      case 4: {  // extra assumption
        std::set<Term> atoms = img.skeleton.atoms();
        std::vector<Term> pool(atoms.begin(), atoms.end());
        if (pool.empty()) break;
        std::uniform_int_distribution<std::size_t> pa(0, pool.size() - 1);
        Term a = pool[pa(rng)];
        Skeleton s = img.skeleton;
        if (std::uniform_int_distribution<int>(0, 1)(rng) == 0) {
          s.non.insert(a);
        } else {
          s.unique.insert(a);
        }
        if (validate(s) != Classification::skeleton) break;
        next = Mapped{s, identity_homomorphism(img.skeleton)};
        break;
      }
    }
    if (!next) continue;
    if (!check_homomorphism(next->hom, img.skeleton, next->skeleton)) continue;
    img.hom = compose(next->hom, img.hom);
    img.skeleton = std::move(next->skeleton);
  }
  return img;
}

inline bool agree_on(const Assignment& a, const Assignment& b,
                     const std::set<std::string>& vars) {
  for (const std::string& v : vars) {
    auto ia = a.find(v);
    auto ib = b.find(v);
    if (ia == a.end() || ib == b.end() || ia->second != ib->second) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Property harnesses shared by unit tests and the acceptance binary

struct Tally {
  long checked = 0;
  long violations = 0;
  std::string first;

  void fail(const std::string& why) {
    if (violations++ == 0) first = why;
  }
  void add(const Tally& other) {
    checked += other.checked;
    if (other.violations > 0 && violations == 0) first = other.first;
    violations += other.violations;
  }
};

/// Parameter closure plus the keys built from its names.
inline std::vector<Term> value_closure(const Skeleton& skel, const Protocol& p) {
  std::set<Term> out = parameter_closure(skel, p);
  std::vector<Term> names;
  for (const Term& t : out) {
    if (t.is_base_atom() && t.sort() == Sort::name) names.push_back(t);
  }
  for (const Term& n : names) {
    out.insert(sk(n));
    out.insert(pk(n));
    out.insert(inv(pk(n)));
  }
  return {out.begin(), out.end()};
}

/// One atomic formula of every predicate shape over fixed variable names.
/// Role-predicate arguments are the variables "p:<param>".
inline std::vector<AtomicFormula> atomic_formulas(const Protocol& p) {
  std::vector<AtomicFormula> out;
  for (const Role& role : p.roles()) {
    if (role.name() == kListenerRole) continue;
    for (int j = 1; j <= role.length(); ++j) {
      RolePredicate rp{role.name(), j, "n", {}};
      for (const Param& prm : role.params_through(j)) {
        rp.args.emplace_back(prm.id, GoalTerm::variable("p:" + prm.id));
      }
      out.push_back(rp);
    }
  }
  out.push_back(ListenPredicate{"n", GoalTerm::variable("x")});
  out.push_back(NonPredicate{GoalTerm::variable("x")});
  out.push_back(UnqPredicate{GoalTerm::variable("x")});
  out.push_back(ColPredicate{"n", "m"});
  out.push_back(PrecPredicate{"n", "m"});
  out.push_back(EqPredicate{GoalTerm::variable("x"), GoalTerm::variable("y")});
  return out;
}

/// Every assignment of the free variables of `f` over nodes and values.
inline void for_each_assignment(const Skeleton& sk, const Protocol& p,
                                const AtomicFormula& f,
                                const std::vector<Term>& values,
                                const std::function<void(const Assignment&)>& visit) {
  const std::vector<NodeRef> nodes = sk.nodes();
  const std::set<std::string> fv = free_variables(f);
  std::vector<std::string> vars(fv.begin(), fv.end());
  const RolePredicate* rp = std::get_if<RolePredicate>(&f);
  const Role* role = rp ? p.find_role(rp->role) : nullptr;
  Assignment a;
  std::function<void(std::size_t)> go = [&](std::size_t i) {
    if (i == vars.size()) {
      visit(a);
      return;
    }
    const std::string& v = vars[i];
    if (v == "n" || v == "m") {
      for (const NodeRef& n : nodes) {
        a[v] = n;
        go(i + 1);
      }
    } else {
      const Param* prm = (role && v.starts_with("p:")) ? role->find_param(v.substr(2)) : nullptr;
      for (const Term& t : values) {
        if (prm && !sort_accepts(prm->variable(), t)) continue;
        a[v] = t;
        go(i + 1);
      }
    }
    a.erase(v);
  };
  go(0);
}

/// Atomic formulas satisfied in `a` under some assignment stay satisfied in
/// `b` under the assignment pushed along `h`.
inline Tally lemma1(const Skeleton& a, const Skeleton& b, const Homomorphism& h,
                    const Protocol& p) {
  Tally t;
  const std::vector<Term> values = value_closure(a, p);
  for (const AtomicFormula& f : atomic_formulas(p)) {
    for_each_assignment(a, p, f, values, [&](const Assignment& sigma) {
      if (!satisfies_atomic(a, p, sigma, f)) return;
      ++t.checked;
      if (!satisfies_atomic(b, p, push_forward(h, sigma), f)) {
        t.fail(to_string(f) + " lost along a homomorphism");
      }
    });
  }
  return t;
}

/// A0-A4 plus every fixture characteristic skeleton and its shapes.
inline std::vector<Skeleton> corpus(const Protocol& p) {
  std::vector<Skeleton> out;
  if (&p == &blanchet()) out = {A0(), A1(), A2(), A3(), A4()};
  for (const std::string& g : goal_files()) {
    CharacteristicResult r = characteristic_skeleton(goal(g, p), p);
    if (!r.ok()) continue;
    out.push_back(r.state->skeleton);
    for (const Shape& s : shapes(r.state->skeleton, p).shapes) out.push_back(s.skeleton);
  }
  return out;
}

inline std::set<std::string> claim_variables(const SecurityGoal& g) {
  return g.hypothesis.free_variables();
}

/// Builds `samples` satisfying pairs (B, σ) as random images of cs(φ) and
/// counts those where the homomorphisms from cs(φ) agreeing with σ do not
/// form exactly one equivalence class.
inline Tally characteristic_property(const SecurityGoal& g, const Protocol& p,
                                     std::mt19937& rng, int samples) {
  Tally t;
  CharacteristicResult cs = characteristic_skeleton(g, p);
  if (!cs.ok()) {
    t.fail("no characteristic skeleton");
    return t;
  }
  const Skeleton& start = cs.state->skeleton;
  const std::set<std::string> fv = claim_variables(g);
  for (int i = 0; i < samples; ++i) {
    const Image img = random_image(start, p, rng, 1 + static_cast<int>(rng() % 4));
    const Assignment sigma = push_forward(img.hom, cs.state->sigma);
    ++t.checked;
    if (!satisfies_claim(img.skeleton, p, sigma, g.hypothesis)) {
      t.fail("generated pair does not satisfy the claim");
      continue;
    }
    std::vector<Homomorphism> agreeing;
    for (const Homomorphism& h : find_homomorphisms(start, img.skeleton)) {
      if (!agree_on(push_forward(h, cs.state->sigma), sigma, fv)) continue;
      bool fresh = true;
      for (const Homomorphism& seen : agreeing) {
        if (same_homomorphism(seen, h, start)) fresh = false;
      }
      if (fresh) agreeing.push_back(h);
    }
    if (agreeing.size() != 1) {
      t.fail(std::to_string(agreeing.size()) + " agreeing homomorphisms");
    }
  }
  return t;
}

/// A random pair of terms with a common instance: two generalizations of
/// one random term of depth at most `depth`.
struct UnifiablePair {
  Term common, u, v;
};

inline UnifiablePair unifiable_pair(std::mt19937& rng, int depth) {
  static const TermPool pool = default_pool();
  for (;;) {
    const Term t = random_term(rng, depth, pool);
    if (t.depth() > depth) continue;
    int counter = 0;
    Term u = generalize(t, rng, "u", counter);
    Term v = generalize(t, rng, "v", counter);
    return {t, u, v};
  }
}

inline Tally mgu_soundness(std::mt19937& rng, int pairs) {
  Tally t;
  for (int i = 0; i < pairs; ++i) {
    const UnifiablePair pr = unifiable_pair(rng, 4);
    ++t.checked;
    auto beta = unify(pr.u, pr.v);
    if (!beta) {
      t.fail("no unifier for " + to_string(pr.u) + " ~ " + to_string(pr.v));
    } else if (beta->apply(pr.u) != beta->apply(pr.v)) {
      t.fail("unifier does not equalize " + to_string(pr.u) + " ~ " + to_string(pr.v));
    }
  }
  return t;
}

/// Every enumerated unifier must factor through the computed one. The
/// enumeration draws values from the subterms of the common instance and
/// the variables of both sides.
inline Tally mgu_generality(std::mt19937& rng, int pairs, long* unifiers = nullptr) {
  Tally t;
  long seen = 0;
  for (int i = 0; i < pairs; ++i) {
    const UnifiablePair pr = unifiable_pair(rng, 4);
    auto beta = unify(pr.u, pr.v);
    ++t.checked;
    if (!beta) {
      t.fail("no unifier for " + to_string(pr.u) + " ~ " + to_string(pr.v));
      continue;
    }
    std::set<Term> vs = variables(pr.u);
    collect_variables(pr.v, vs);
    std::set<Term> dom;
    collect_subterms(pr.common, dom);
    dom.insert(vs.begin(), vs.end());
    const std::vector<Term> vars(vs.begin(), vs.end());
    const std::vector<Term> domain(dom.begin(), dom.end());
    for (const Substitution& gamma :
         enumerate_unifiers(pr.u, pr.v, vars, domain, 40, 20000)) {
      ++seen;
      if (!factors_via(gamma, *beta, vars)) {
        t.fail("unifier of " + to_string(pr.u) + " ~ " + to_string(pr.v) +
               " is not an instance of the computed one");
      }
    }
  }
  if (unifiers) *unifiers = seen;
  return t;
}

/// Random adversary context: up to four available messages of depth at
/// most three, with random non and unique_originated atoms.
inline AdversaryContext random_context(std::mt19937& rng) {
  static const TermPool pool = default_pool();
  AdversaryContext ctx;
  const int n = static_cast<int>(rng() % 5);
  for (int i = 0; i < n; ++i) {
    Term m = random_term(rng, 3, pool);
    while (m.depth() > 3) m = random_term(rng, 3, pool);
    ctx.available.push_back(m);
  }
  for (const Term& leaf : pool.leaves) {
    if (!leaf.is_atom()) continue;
    const unsigned roll = rng() % 6;
    if (roll == 0) ctx.non.insert(leaf);
    if (roll == 1) ctx.unique_originated.insert(leaf);
  }
  return ctx;
}

inline std::vector<Term> random_targets(const AdversaryContext& ctx, std::mt19937& rng) {
  static const TermPool pool = default_pool();
  std::set<Term> subs;
  for (const Term& m : ctx.available) collect_subterms(m, subs);
  std::vector<Term> sv(subs.begin(), subs.end());
  std::vector<Term> out{random_term(rng, 2, pool)};
  if (!sv.empty()) {
    const auto pick = [&] { return sv[rng() % sv.size()]; };
    out.push_back(pick());
    out.push_back(pick());
    out.push_back(cat(pick(), pick()));
    out.push_back(enc(pick(), pool.leaves[rng() % pool.leaves.size()]));
  }
  return out;
}

inline Tally dy_equivalence(std::mt19937& rng, int contexts, long* derivable_count = nullptr) {
  Tally t;
  long yes = 0;
  for (int i = 0; i < contexts; ++i) {
    const AdversaryContext ctx = random_context(rng);
    ++t.checked;
    Deriver d(ctx);
    for (const Term& target : random_targets(ctx, rng)) {
      const bool lib = d.derivable(target);
      const bool oracle = dy_closure(ctx, target);
      yes += lib;
      if (lib != oracle) {
        std::string avail;
        for (const Term& m : ctx.available) avail += " " + to_string(m);
        t.fail("derivable(" + to_string(target) + ") = " + (lib ? "true" : "false") +
               " over" + avail);
      }
    }
  }
  if (derivable_count) *derivable_count = yes;
  return t;
}

// ---------------------------------------------------------------------------
// Brute-force realized images

/// Visits realized images of `start` obtained by renaming its variables
/// into `values` and adding one role instance, or by adding two role
/// instances, then taking the hull and totally ordering the result by the
/// greedy schedule.
inline void for_each_realized_image(
    const Skeleton& start, const Protocol& p, const std::vector<Term>& values,
    const std::function<void(const Skeleton&, const Homomorphism&)>& visit) {
  const std::vector<Strand> instances = role_instances(p, values);
  const auto finish = [&](const Mapped& m) {
    auto h = hull(m.skeleton);
    if (!h) return;
    auto order = greedy_schedule(h->skeleton);
    if (!order) return;
    const Skeleton b = with_schedule(h->skeleton, *order);
    visit(b, compose(h->hom, m.hom));
  };
  // Renamings of the start skeleton's variables.
  const std::set<Term> vs = start.node_variables();
  const std::vector<Term> vars(vs.begin(), vs.end());
  std::vector<Substitution> renamings;
  std::function<void(std::size_t, Substitution&)> go = [&](std::size_t i, Substitution& s) {
    if (i == vars.size()) {
      renamings.push_back(s);
      return;
    }
    for (const Term& v : values) {
      if (!vars[i].is_base_atom() || !sort_accepts(vars[i], v)) continue;
      Substitution next = s;
      if (v != vars[i] && !next.bind(vars[i], v)) continue;
      go(i + 1, next);
    }
    if (!vars[i].is_base_atom()) go(i + 1, s);
  };
  Substitution none;
  go(0, none);
  for (const Substitution& r : renamings) {
    Mapped renamed = apply_substitution(start, r);
    if (validate(renamed.skeleton) == Classification::invalid) continue;
    finish(renamed);
    for (const Strand& s : instances) {
      Mapped added = add_strand(renamed.skeleton, s);
      finish(Mapped{added.skeleton, compose(added.hom, renamed.hom)});
    }
  }
  for (std::size_t i = 0; i < instances.size(); ++i) {
    for (std::size_t j = i; j < instances.size(); ++j) {
      Mapped one = add_strand(start, instances[i]);
      Mapped two = add_strand(one.skeleton, instances[j]);
      finish(Mapped{two.skeleton, compose(two.hom, one.hom)});
    }
  }
}

/// Atoms of `sk` plus one fresh atom per sort in use.
inline std::vector<Term> image_values(const Skeleton& sk) {
  std::set<Term> out;
  for (const Term& v : sk.node_variables()) {
    if (v.is_base_atom()) out.insert(v);
  }
  std::set<Sort> sorts;
  for (const Term& v : out) sorts.insert(*v.sort());
  for (Sort s : sorts) out.insert(Term::atom("fresh-" + std::string(to_string(s)), s));
  return {out.begin(), out.end()};
}

struct SoundnessReport {
  Tally tally;      // images checked, images violating the conclusion
  long realized = 0;
};

/// Enumerates bounded realized images of cs(goal) and counts those whose
/// pushed-forward assignment fails the conclusion.
inline SoundnessReport brute_force_violations(const SecurityGoal& g, const Protocol& p) {
  SoundnessReport r;
  CharacteristicResult cs = characteristic_skeleton(g, p);
  if (!cs.ok()) return r;
  const Skeleton& start = cs.state->skeleton;
  for_each_realized_image(start, p, image_values(start),
                          [&](const Skeleton& b, const Homomorphism& h) {
    ++r.tally.checked;
    if (!realized(b)) r.tally.fail("greedy schedule is not realized");
    ++r.realized;
    if (!check_homomorphism(h, start, b)) {
      r.tally.fail("image homomorphism does not verify");
      return;
    }
    const Assignment sigma = push_forward(h, cs.state->sigma);
    if (!conclusion_brute(b, p, sigma, g)) r.tally.fail("conclusion fails");
  });
  return r;
}

}  // namespace skeletal::testing

#endif  // SKELETAL_TESTS_SUPPORT_HPP
