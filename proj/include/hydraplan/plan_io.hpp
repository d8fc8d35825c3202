#pragma once

#include "hydraplan/solver.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <optional>
#include <string>
#include <vector>

namespace hydraplan {

// "start_flying(a,c,400)" or "start_refueling".
inline ActionRef parse_action_ref(const std::string& text) {
  auto bad = [&] { return Error("malformed action '" + text + "'"); };
  auto ident = [](const std::string& s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isalnum(c) || c == '_'; });
  };
  ActionRef a;
  auto open = text.find('(');
  if (open == std::string::npos) {
    if (!ident(text)) throw bad();
    a.name = text;
    return a;
  }
  if (text.back() != ')') throw bad();
  a.name = text.substr(0, open);
  if (!ident(a.name)) throw bad();
  std::string inner = text.substr(open + 1, text.size() - open - 2);
  std::string arg;
  for (char c : inner + ",") {
    if (c == ' ') continue;
    if (c != ',') {
      arg += c;
      continue;
    }
    if (!ident(arg)) throw bad();
    a.args.push_back(arg);
    arg.clear();
  }
  return a;
}

// A plan file is a JSON list with one record per action occurrence:
// {"action": "start_boarding(scott,a)", "step": 0, "time": "5", "time_decimal": "5.00"}.
// "time" is an exact rational ("1345/6"); a replay script may leave it null
// for triggered steps.
inline nlohmann::json plan_to_json(const TimedPlan& plan) {
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t k = 0; k < plan.size(); ++k)
    for (const auto& a : plan[k].actions)
      out.push_back({{"action", a.str()},
                     {"step", k},
                     {"time", to_string(plan[k].time)},
                     {"time_decimal", to_decimal(plan[k].time, 2)}});
  return out;
}

// Groups the records by step. Steps must be numbered 0, 1, ... without gaps
// and all records of one step must agree on the time.
inline std::vector<ScriptStep> script_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error("plan: expected a JSON list of action records");
  std::vector<ScriptStep> steps;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& r = j[i];
    std::string where = "plan record " + std::to_string(i);
    if (!r.is_object() || !r.contains("action") || !r["action"].is_string())
      throw Error(where + ": missing \"action\" string");
    if (!r.contains("step") || !r["step"].is_number_unsigned()) throw Error(where + ": missing non-negative \"step\"");
    auto k = r["step"].get<std::size_t>();
    if (k > steps.size()) throw Error(where + ": step " + std::to_string(k) + " skips step " + std::to_string(steps.size()));
    std::optional<Rational> t;
    if (r.contains("time") && !r["time"].is_null()) {
      const auto& tj = r["time"];
      try {
        if (tj.is_string()) t = parse_rational(tj.get<std::string>());
        else if (tj.is_number_integer()) t = Rational(tj.get<long long>());
        else throw Error(where + ": time must be a string such as \"1345/6\"");
      } catch (const NumberFormatError& e) {
        throw Error(where + ": " + e.what());
      }
    }
    if (k == steps.size()) {
      steps.push_back(ScriptStep{{}, t});
    } else if (t) {
      if (steps[k].time && *steps[k].time != *t) throw Error(where + ": conflicting times for step " + std::to_string(k));
      steps[k].time = t;
    }
    steps[k].actions.push_back(parse_action_ref(r["action"].get<std::string>()));
  }
  return steps;
}

// As script_from_json, but every step must be timed.
inline TimedPlan plan_from_json(const nlohmann::json& j) {
  TimedPlan plan;
  auto steps = script_from_json(j);
  for (std::size_t k = 0; k < steps.size(); ++k) {
    if (!steps[k].time) throw Error("plan: step " + std::to_string(k) + " has no time");
    plan.push_back(TimedStep{*steps[k].time, std::move(steps[k].actions)});
  }
  return plan;
}

}  // namespace hydraplan
