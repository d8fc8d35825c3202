#pragma once

#include "hydraplan/domains.hpp"
#include "hydraplan/grounding.hpp"
#include "hydraplan/parser.hpp"
#include "hydraplan/semantics.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace hydraplan::test {

inline std::filesystem::path source_dir() { return HYDRAPLAN_SOURCE_DIR; }

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Problem {
  ActionDescription ad;
  Instance inst;
  Theory th;
};

inline Problem load(std::string_view description, std::string_view instance) {
  Problem p;
  p.ad = parse_action_description(description);
  p.inst = parse_instance(instance, p.ad);
  p.th = Theory::from(ground(p.ad));
  return p;
}

inline Problem bundled(std::string_view name) {
  const auto& b = builtin(name);
  return load(b.description, b.instance);
}

inline ActionRef act(std::string name, std::vector<std::string> args = {}) { return ActionRef{std::move(name), std::move(args)}; }

inline Rational q(long long n, long long d = 1) { return Rational(n) / Rational(d); }

// Reference timed plan for the bundled Zeno instance.
inline TimedPlan reference_plan() {
  return {
      {q(5), {act("start_boarding", {"scott", "a"})}},
      {q(35), {act("end_boarding", {"scott", "a"})}},
      {q(40), {act("start_flying", {"a", "c", "400"})}},
      {q(190), {act("end_flying", {"a", "c"})}},
      {q(195), {act("start_refueling")}},
      {q(197), {act("start_boarding", {"ernie", "c"})}},
      {q(1345, 6), {act("end_refueling")}},
      {q(227), {act("end_boarding", {"ernie", "c"})}},
      {q(229), {act("start_flying", {"c", "d", "600"})}},
      {q(329), {act("end_flying", {"c", "d"})}},
  };
}

inline const Value* value_of(const State& s, const std::string& fluent, std::vector<std::string> args = {}) {
  return lookup(s.atoms, Term{fluent, std::move(args)});
}

}  // namespace hydraplan::test
