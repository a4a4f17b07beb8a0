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

// skeletal: characteristic skeletons, shapes and goal verdicts from the
// command line.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "skeletal/characteristic.hpp"
#include "skeletal/goal.hpp"
#include "skeletal/protocol.hpp"
#include "skeletal/render.hpp"
#include "skeletal/shapes.hpp"

namespace {

using namespace skeletal;

constexpr int kAchieved = 0;
constexpr int kCounterexample = 1;
constexpr int kBoundExceeded = 2;
constexpr int kInputError = 3;

struct InputError {
  std::string message;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError{path + ": cannot read file"};
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Config {
  std::string protocol_path;
  std::string goal_path;
  SearchBounds bounds;
  std::string dot_dir;
  std::string json_path;
};

struct Loaded {
  Protocol protocol;
  SecurityGoal goal;
};

Loaded load(const Config& cfg) {
  const std::string psrc = read_file(cfg.protocol_path);
  const std::string gsrc = read_file(cfg.goal_path);
  std::optional<Protocol> protocol;
  try {
    protocol = parse_protocol(psrc);
  } catch (const ParseError& e) {
    throw InputError{cfg.protocol_path + ":" + e.what()};
  } catch (const std::invalid_argument& e) {
    throw InputError{cfg.protocol_path + ": " + e.what()};
  }
  try {
    SecurityGoal goal = parse_goal(gsrc, *protocol);
    if (goal.protocol != protocol->name()) {
      std::cerr << "warning: " << cfg.goal_path << " names protocol " << goal.protocol
                << ", checking against " << protocol->name() << "\n";
    }
    return Loaded{std::move(*protocol), std::move(goal)};
  } catch (const ParseError& e) {
    throw InputError{cfg.goal_path + ":" + e.what()};
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError{path + ": cannot write file"};
  out << text;
}

void write_dot(const Config& cfg, const std::string& stem, const Skeleton& sk,
               const Protocol& protocol) {
  if (cfg.dot_dir.empty()) return;
  std::filesystem::create_directories(cfg.dot_dir);
  write_text((std::filesystem::path(cfg.dot_dir) / (stem + ".dot")).string(),
             to_dot(sk, protocol, stem));
}

void write_json(const Config& cfg, const nlohmann::ordered_json& j) {
  if (cfg.json_path.empty()) return;
  write_text(cfg.json_path, j.dump(2) + "\n");
}

void print_sigma(const Assignment& sigma) {
  std::cout << "sigma:";
  for (const auto& [var, v] : sigma) std::cout << " " << var << "=" << to_string(v);
  std::cout << "\n";
}

nlohmann::ordered_json failure_json(const CharacteristicResult& r) {
  return {{"reason", std::string(to_string(r.reason))},
          {"conjunct", r.conjunct},
          {"detail", r.detail}};
}

int run_cs(const Config& cfg) {
  Loaded in = load(cfg);
  CharacteristicResult r = characteristic_skeleton(in.goal, in.protocol);
  nlohmann::ordered_json j;
  j["ok"] = r.ok();
  if (!r.ok()) {
    std::cout << "characteristic skeleton: none (" << to_string(r.reason) << ")\n  "
              << r.detail << "\n";
    j["failure"] = failure_json(r);
    write_json(cfg, j);
    return 1;
  }
  std::cout << "characteristic skeleton:\n"
            << to_text(r.state->skeleton, in.protocol);
  print_sigma(r.state->sigma);
  j["skeleton"] = to_json(r.state->skeleton, in.protocol);
  j["sigma"] = to_json(r.state->sigma);
  write_dot(cfg, "cs", r.state->skeleton, in.protocol);
  write_json(cfg, j);
  return 0;
}

void print_shapes(const ShapeResult& result, const Protocol& protocol) {
  std::cout << "shapes: " << result.shapes.size()
            << (result.exhausted ? " (search exhausted)" : " (bound exceeded)")
            << ", states " << result.states << "\n";
  for (std::size_t i = 0; i < result.shapes.size(); ++i) {
    std::cout << "shape " << i + 1 << ":\n" << to_text(result.shapes[i].skeleton, protocol);
  }
}

int run_shapes(const Config& cfg) {
  Loaded in = load(cfg);
  CharacteristicResult r = characteristic_skeleton(in.goal, in.protocol);
  nlohmann::ordered_json j;
  if (!r.ok()) {
    std::cout << "characteristic skeleton: none (" << to_string(r.reason)
              << ")\nshapes: 0 (search exhausted), states 0\n";
    j["shapes"] = nlohmann::ordered_json::array();
    j["exhausted"] = true;
    j["bounds"] = to_json(cfg.bounds);
    j["failure"] = failure_json(r);
    write_json(cfg, j);
    return 0;
  }
  ShapeResult result = shapes(r.state->skeleton, in.protocol, cfg.bounds);
  print_shapes(result, in.protocol);
  nlohmann::ordered_json list = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < result.shapes.size(); ++i) {
    list.push_back(to_json(result.shapes[i].skeleton, in.protocol));
    write_dot(cfg, "shape-" + std::to_string(i + 1), result.shapes[i].skeleton, in.protocol);
  }
  j["shapes"] = list;
  j["exhausted"] = result.exhausted;
  j["bounds"] = to_json(cfg.bounds);
  write_json(cfg, j);
  return result.exhausted ? kAchieved : kBoundExceeded;
}

int run_check(const Config& cfg) {
  Loaded in = load(cfg);
  Verdict v = check_goal(in.protocol, in.goal, cfg.bounds);
  std::cout << "verdict: " << to_string(v.kind) << "\n";
  if (v.vacuous) {
    std::cout << "hypothesis unsatisfiable: " << v.characteristic.detail << "\n";
  } else {
    print_shapes(v.search, in.protocol);
    for (std::size_t i = 0; i < v.search.shapes.size(); ++i) {
      write_dot(cfg, "shape-" + std::to_string(i + 1), v.search.shapes[i].skeleton,
                in.protocol);
    }
  }
  if (v.counterexample) {
    const Skeleton& c = v.search.shapes[*v.counterexample].skeleton;
    std::cout << "counterexample: shape " << *v.counterexample + 1 << "\n";
    write_dot(cfg, "counterexample", c, in.protocol);
  }
  write_json(cfg, to_json(v, in.protocol));
  switch (v.kind) {
    case VerdictKind::achieved: return kAchieved;
    case VerdictKind::counterexample: return kCounterexample;
    case VerdictKind::bound_exceeded: return kBoundExceeded;
  }
  return kInputError;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Security goal checker over strand-space skeletons"};
  app.require_subcommand(1);
  Config cfg;
  app.add_option("--max-strands", cfg.bounds.max_added_strands,
                 "strands the search may add to the start skeleton")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-fresh", cfg.bounds.max_fresh_atoms,
                 "fresh atoms the search may introduce")
      ->check(CLI::PositiveNumber);
  app.add_option("--max-states", cfg.bounds.max_states, "search states before giving up")
      ->check(CLI::PositiveNumber);
  app.add_option("--dot", cfg.dot_dir, "directory for DOT renderings");
  app.add_option("--json", cfg.json_path, "file for the JSON record");

  const auto files = [&](CLI::App* sub) {
    sub->add_option("protocol", cfg.protocol_path, "protocol file")->required();
    sub->add_option("goal", cfg.goal_path, "goal file")->required();
    sub->fallthrough();
  };
  CLI::App* cs = app.add_subcommand("cs", "print the characteristic skeleton of the hypothesis");
  CLI::App* sh = app.add_subcommand("shapes", "print the shapes of the characteristic skeleton");
  CLI::App* check = app.add_subcommand("check", "decide the goal within the bounds");
  files(cs);
  files(sh);
  files(check);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kInputError;
  }
  try {
    if (cs->parsed()) return run_cs(cfg);
    if (sh->parsed()) return run_shapes(cfg);
    return run_check(cfg);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.message << "\n";
    return kInputError;
  }
}
