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

#include "skeletal/render.hpp"

#include <sstream>

namespace skeletal {

using nlohmann::ordered_json;

Substitution strand_binding(const Strand& s, const Protocol& protocol) {
  const Role* role = protocol.find_role(s.role);
  if (!role) return {};
  auto b = instance_of(s.events, *role, s.length());
  return b ? *b : Substitution{};
}

namespace {

std::string binding_text(const Strand& s, const Protocol& protocol) {
  const Role* role = protocol.find_role(s.role);
  if (!role) return {};
  const Substitution b = strand_binding(s, protocol);
  std::string out;
  for (const Param& p : role->params_through(s.length())) {
    if (auto v = b.lookup(p.variable())) {
      if (!out.empty()) out += " ";
      out += p.id + "=" + to_string(*v);
    }
  }
  return out;
}

std::string dot_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

std::string node_id(const NodeRef& n) {
  return "n" + std::to_string(n.strand) + "_" + std::to_string(n.position);
}

std::string join(const std::set<Term>& ts) {
  std::string out;
  for (const Term& t : ts) {
    if (!out.empty()) out += " ";
    out += to_string(t);
  }
  return out;
}

}  // namespace

std::string to_text(const Skeleton& sk, const Protocol& protocol) {
  std::ostringstream os;
  for (std::size_t i = 0; i < sk.strands.size(); ++i) {
    const Strand& s = sk.strands[i];
    os << "strand " << i << " " << s.role << " " << s.length() << ": "
       << binding_text(s, protocol) << "\n";
    for (const Event& e : s.events) os << "  " << to_string(e) << "\n";
  }
  os << "order:";
  for (const auto& [a, b] : sk.order) {
    os << " " << to_string(a) << "<" << to_string(b);
  }
  os << "\nnon: " << join(sk.non) << "\nunique: " << join(sk.unique) << "\n";
  return os.str();
}

std::string to_dot(const Skeleton& sk, const Protocol& protocol,
                   std::string_view name) {
  std::ostringstream os;
  os << "digraph \"" << dot_escape(name) << "\" {\n";
  os << "  rankdir=TB;\n  node [shape=plaintext, fontname=\"monospace\"];\n";
  for (int i = 0; i < static_cast<int>(sk.strands.size()); ++i) {
    const Strand& s = sk.strands[i];
    os << "  subgraph cluster_" << i << " {\n";
    os << "    label=\"" << i << " " << dot_escape(s.role) << " "
       << dot_escape(binding_text(s, protocol)) << "\";\n";
    for (int p = 1; p <= s.length(); ++p) {
      os << "    " << node_id({i, p}) << " [label=\""
         << dot_escape(to_string(s.events[p - 1])) << "\"];\n";
    }
    for (int p = 1; p < s.length(); ++p) {
      os << "    " << node_id({i, p}) << " -> " << node_id({i, p + 1})
         << " [color=\"black:invis:black\", style=bold];\n";
    }
    os << "  }\n";
  }
  for (const auto& [a, b] : sk.order) {
    os << "  " << node_id(a) << " -> " << node_id(b)
       << " [style=dashed, constraint=false];\n";
  }
  os << "  note [shape=note, label=\"non: " << dot_escape(join(sk.non))
     << "\\lunique: " << dot_escape(join(sk.unique)) << "\\l\"];\n";
  os << "}\n";
  return os.str();
}

ordered_json to_json(const Skeleton& sk, const Protocol& protocol) {
  ordered_json strands = ordered_json::array();
  for (const Strand& s : sk.strands) {
    ordered_json binding = ordered_json::object();
    if (const Role* role = protocol.find_role(s.role)) {
      const Substitution b = strand_binding(s, protocol);
      for (const Param& p : role->params_through(s.length())) {
        if (auto v = b.lookup(p.variable())) binding[p.id] = to_string(*v);
      }
    }
    ordered_json events = ordered_json::array();
    for (const Event& e : s.events) events.push_back(to_string(e));
    strands.push_back({{"role", s.role},
                       {"length", s.length()},
                       {"binding", binding},
                       {"events", events}});
  }
  ordered_json order = ordered_json::array();
  for (const auto& [a, b] : sk.order) {
    order.push_back({{"from", {{"strand", a.strand}, {"position", a.position}}},
                     {"to", {{"strand", b.strand}, {"position", b.position}}}});
  }
  ordered_json non = ordered_json::array();
  for (const Term& t : sk.non) non.push_back(to_string(t));
  ordered_json unique = ordered_json::array();
  for (const Term& t : sk.unique) unique.push_back(to_string(t));
  return {{"strands", strands}, {"order", order}, {"non", non}, {"unique", unique}};
}

ordered_json to_json(const Assignment& sigma) {
  ordered_json out = ordered_json::object();
  for (const auto& [var, v] : sigma) {
    if (const auto* n = std::get_if<NodeRef>(&v)) {
      out[var] = {{"strand", n->strand}, {"position", n->position}};
    } else {
      out[var] = to_string(std::get<Term>(v));
    }
  }
  return out;
}

ordered_json to_json(const SearchBounds& b) {
  return {{"max_strands", b.max_added_strands},
          {"max_fresh", b.max_fresh_atoms},
          {"max_states", b.max_states}};
}

ordered_json to_json(const Verdict& v, const Protocol& protocol) {
  ordered_json out;
  out["verdict"] = std::string(to_string(v.kind));
  out["vacuous"] = v.vacuous;
  ordered_json shapes = ordered_json::array();
  for (const Shape& s : v.search.shapes) shapes.push_back(to_json(s.skeleton, protocol));
  out["shapes"] = shapes;
  if (v.counterexample) {
    out["counterexample"] = to_json(v.search.shapes[*v.counterexample].skeleton, protocol);
  }
  out["bounds"] = to_json(v.bounds);
  out["exhausted"] = v.search.exhausted;
  return out;
}

}  // namespace skeletal
