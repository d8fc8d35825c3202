#include "hydraplan/domains.hpp"
#include "hydraplan/grounding.hpp"
#include "hydraplan/parser.hpp"
#include "hydraplan/plan_io.hpp"
#include "hydraplan/solver.hpp"
#include "hydraplan/translator.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

using namespace hydraplan;
using nlohmann::json;

namespace {

constexpr const char* kReportSchema = "hydraplan.report/1";

enum Exit { kOk = 0, kIo = 1, kInvalid = 2, kUnsat = 3, kLimit = 4 };

struct IoError : Error {
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw IoError("cannot write " + path);
}

// A domain argument is a file path, or the name of a bundled domain.
struct Inputs {
  std::string domain_text, instance_text;
};

Inputs load(const std::string& domain, const std::string& instance) {
  Inputs in;
  if (std::filesystem::exists(domain) || domain.find('/') != std::string::npos || domain.find('.') != std::string::npos) {
    in.domain_text = read_file(domain);
  } else {
    const auto& b = builtin(domain);
    in.domain_text = std::string(b.description);
    if (instance.empty()) in.instance_text = std::string(b.instance);
  }
  if (!instance.empty()) in.instance_text = read_file(instance);
  return in;
}

struct Options {
  std::string verb, domain, instance, file, out, format = "text";
  std::optional<int> horizon;
  std::optional<std::string> deadline;
  std::optional<int> max_concurrent;
  bool deterministic = true;
  int threads = 0;
  long node_limit = 2'000'000;
  std::vector<std::string> disable;
};

class Report {
public:
  explicit Report(const Options& o, std::vector<std::string> argv) : opts_(o) {
    doc_["schema"] = kReportSchema;
    doc_["command"] = std::move(argv);
    start_ = std::chrono::steady_clock::now();
  }
  json& operator[](const char* k) { return doc_[k]; }
  void diag(const std::string& kind, const std::string& message) {
    doc_["diagnostics"].push_back({{"kind", kind}, {"message", message}});
  }
  std::ostringstream text;

  int finish(int code) {
    doc_["exit_code"] = code;
    doc_["timings"]["total_ms"] =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start_).count();
    if (!doc_.contains("diagnostics")) doc_["diagnostics"] = json::array();
    if (opts_.format == "json") {
      std::cout << doc_.dump(2) << "\n";
    } else {
      std::cout << text.str();
      for (const auto& d : doc_["diagnostics"]) std::cerr << "hydraplan: " << d["kind"].get<std::string>() << ": " << d["message"].get<std::string>() << "\n";
    }
    return code;
  }

private:
  const Options& opts_;
  json doc_;
  std::chrono::steady_clock::time_point start_;
};

json stats_json(const SolveStats& s) {
  return {{"nodes", s.nodes},
          {"lra_calls", s.lra_checks},
          {"eliminations", s.eliminations},
          {"backtracks", s.backtracks},
          {"validations", s.validations},
          {"rejected_by_validator", s.rejected_by_validator}};
}

json verdict_json(const Verdict& v) {
  json j{{"accepted", v.accepted}};
  if (!v.accepted) {
    j["rule"] = rule_name(v.rule);
    j["step"] = v.step;
    j["witness"] = v.witness;
  }
  return j;
}

std::string plan_table(const TimedPlan& plan) {
  std::string s;
  for (std::size_t k = 0; k < plan.size(); ++k)
    for (const auto& a : plan[k].actions) {
      std::string occ = "occurs(" + a.str() + "," + std::to_string(k) + ")";
      s += occ + std::string(occ.size() < 40 ? 40 - occ.size() : 1, ' ') + "end(" + std::to_string(k) + ") = " + display(plan[k].time) + "\n";
    }
  return s;
}

struct Loaded {
  ActionDescription ad;
  Instance inst;
  Theory th;
};

Loaded load_problem(const Options& o) {
  Inputs in = load(o.domain, o.instance);
  if (in.instance_text.empty()) throw IoError("an instance file is required for " + o.verb);
  Loaded l{parse_action_description(in.domain_text), {}, {}};
  l.inst = parse_instance(in.instance_text, l.ad);
  if (o.deadline) {
    Rational d = parse_rational(*o.deadline);
    l.inst.deadline = d;
    l.inst.goal_before = d;
  }
  if (o.max_concurrent) l.inst.max_concurrent = *o.max_concurrent;
  if (o.horizon && *o.horizon > 0) l.inst.horizon = *o.horizon;
  auto g = ground(l.ad);
  if (auto bad = undeclared_symbols(g); !bad.empty()) throw ParseError("undeclared symbol " + bad.front());
  l.th = Theory::from(g);
  return l;
}

int cmd_check(const Options& o, Report& r) {
  Inputs in = load(o.domain, o.instance);
  auto ad = parse_action_description(in.domain_text);
  auto g = ground(ad);
  if (auto bad = undeclared_symbols(g); !bad.empty()) {
    r.diag("validation", "undeclared symbol " + bad.front());
    return kInvalid;
  }
  std::map<std::string, std::size_t> kinds;
  std::map<std::pair<int, std::string>, std::size_t> by_law;
  for (const auto& st : g.statements) {
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<S, StateConstraint>) ++kinds["state_constraints"];
          else if constexpr (std::is_same_v<S, DynamicLaw>) {
            ++kinds["dynamic_laws"];
            ++by_law[{st.pos.line, s.head.fluent}];
          } else if constexpr (std::is_same_v<S, Executability>) ++kinds["executability_conditions"];
          else ++kinds["triggers"];
        },
        st.form);
  }
  json stats{{"sorts", ad.signature.sorts.size()},
             {"fluents", ad.signature.fluents.size()},
             {"actions", ad.signature.actions.size()},
             {"ground_actions", ground_actions(ad.signature).size()},
             {"ground_fluents", ground_fluents(ad.signature).size()},
             {"ground_statements", g.statements.size()}};
  for (const auto& [k, n] : kinds) stats[k] = n;
  r.text << "ok: " << g.statements.size() << " ground statements\n";
  for (const auto& [k, n] : kinds) r.text << "  " << n << " " << k << "\n";
  json laws = json::array();
  for (const auto& [key, n] : by_law) {
    laws.push_back({{"line", key.first}, {"fluent", key.second}, {"ground", n}});
    r.text << "  " << n << " ground " << key.second << " laws (line " << key.first << ")\n";
  }
  stats["dynamic_laws_by_source"] = laws;
  if (!in.instance_text.empty()) {
    auto inst = parse_instance(in.instance_text, ad);
    auto th = Theory::from(g);
    initial_atoms(th, inst);
    stats["horizon"] = inst.horizon;
    r.text << "  instance ok, horizon " << inst.horizon << "\n";
  }
  r["outcome"] = "ok";
  r["stats"] = stats;
  return kOk;
}

int cmd_ground(const Options& o, Report& r) {
  Inputs in = load(o.domain, o.instance);
  auto ad = parse_action_description(in.domain_text);
  auto g = ground(ad);
  json list = json::array();
  for (const auto& st : g.statements) {
    std::string s = statement_str(st, g.signature);
    list.push_back(s);
    r.text << s << "\n";
  }
  r["outcome"] = "ground";
  r["statements"] = list;
  return kOk;
}

int cmd_translate(const Options& o, Report& r) {
  auto l = load_problem(o);
  int n = o.horizon ? *o.horizon : l.inst.horizon;
  auto prog = translate(l.th, l.inst, n);
  std::string text = emit_casp_text(prog);
  if (!o.out.empty()) {
    write_file(o.out, text);
    r.text << "wrote " << o.out << "\n";
    r["path"] = o.out;
  } else {
    r.text << text;
    r["program"] = text;
  }
  r["outcome"] = "translated";
  r["stats"] = {{"horizon", n}, {"cspvars", prog.cspvars.size() * static_cast<std::size_t>(n + 1)}, {"lines", std::count(text.begin(), text.end(), '\n')}};
  return kOk;
}

int cmd_solve(const Options& o, Report& r) {
  auto l = load_problem(o);
  auto prog = translate(l.th, l.inst, l.inst.horizon);
  SolveOptions so;
  so.deterministic = o.deterministic;
  so.node_limit = o.node_limit;
  so.threads = o.threads;
  for (const auto& a : o.disable) so.disabled.insert(parse_action_ref(a));
  auto res = solve(prog, l.th, l.inst, so);
  r["stats"] = stats_json(res.stats);
  r["outcome"] = status_name(res.status);
  if (res.status == SolveStatus::resource_limit) {
    r.diag("resource_limit", "search stopped after " + std::to_string(res.stats.nodes) + " nodes");
    return kLimit;
  }
  if (res.status == SolveStatus::unsat) {
    std::string why = "no plan within " + std::to_string(l.inst.horizon) + " steps";
    r.text << why << "\n";
    r["message"] = why;
    return kUnsat;
  }
  r["plan"] = plan_to_json(res.plan);
  r["goal_state"] = {{"step", res.goal_step}, {"start", to_string(res.goal_start)}, {"start_decimal", to_decimal(res.goal_start, 2)}};
  r["verdict"] = verdict_json(res.verdict);
  r.text << plan_table(res.plan);
  r.text << "goal reached in state " << res.goal_step << " at " << display(res.goal_start) << "\n";
  if (!o.out.empty()) write_file(o.out, plan_to_json(res.plan).dump(2) + "\n");
  return kOk;
}

int cmd_schedule(const Options& o, Report& r) {
  auto l = load_problem(o);
  auto script = script_from_json(json::parse(read_file(o.file)));
  int n = std::max<int>(1, static_cast<int>(script.size()));
  auto prog = translate(l.th, l.inst, n);
  auto res = schedule(prog, l.th, l.inst, script);
  r["stats"] = stats_json(res.stats);
  if (res.status != SolveStatus::sat) {
    r["outcome"] = "infeasible";
    r.text << "infeasible: no timing satisfies the fixed actions\n";
    return kUnsat;
  }
  r["outcome"] = "scheduled";
  r["plan"] = plan_to_json(res.plan);
  r["verdict"] = verdict_json(res.verdict);
  r.text << plan_table(res.plan) << "validator: " << res.verdict.str() << "\n";
  if (!o.out.empty()) write_file(o.out, plan_to_json(res.plan).dump(2) + "\n");
  return kOk;
}

int cmd_validate(const Options& o, Report& r) {
  auto l = load_problem(o);
  TimedPlan plan;
  try {
    plan = plan_from_json(json::parse(read_file(o.file)));
  } catch (const json::exception& e) {
    throw ParseError(std::string("plan file: ") + e.what());
  }
  Trajectory t;
  Verdict v = validate_trajectory(l.th, l.inst, plan, &t);
  r["verdict"] = verdict_json(v);
  r["outcome"] = v ? "accepted" : "rejected";
  r.text << v.str() << "\n";
  if (v) r["goal_state"] = t.goal_state;
  return v ? kOk : kInvalid;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Planning with the hybrid action language H: check, translate, solve and validate."};
  app.require_subcommand(1);
  Options o;
  std::vector<std::string> args(argv, argv + argc);

  auto common = [&](CLI::App* c, bool needs_instance) {
    c->add_option("domain", o.domain, "action description file, or a bundled domain name (zeno, brick)")->required();
    auto* i = c->add_option("instance", o.instance, "instance file (defaults to the bundled one)");
    (void)needs_instance;
    (void)i;
    c->add_option("--format", o.format, "output format")->check(CLI::IsMember({"text", "json"}));
  };
  auto* check = app.add_subcommand("check", "parse, ground and check a domain");
  common(check, false);
  auto* groundc = app.add_subcommand("ground", "print the ground theory");
  common(groundc, false);
  auto* trans = app.add_subcommand("translate", "emit the step-indexed constraint program");
  common(trans, true);
  trans->add_option("--horizon,-n", o.horizon, "number of steps")->check(CLI::Range(-1000, 100000));
  trans->add_option("--out,-o", o.out, "write the program here");
  auto* solvec = app.add_subcommand("solve", "search for a plan");
  common(solvec, true);
  solvec->add_option("--horizon,-n", o.horizon, "number of steps");
  solvec->add_option("--deadline", o.deadline, "initiating actions and the goal must come before this time");
  solvec->add_option("--max-concurrent", o.max_concurrent, "agent actions per step");
  solvec->add_flag("--deterministic,!--no-deterministic", o.deterministic, "fixed search order (default on)");
  solvec->add_option("--threads", o.threads, "search workers (env HYDRAPLAN_THREADS)");
  solvec->add_option("--node-limit", o.node_limit, "give up after this many search nodes");
  solvec->add_option("--disable", o.disable, "forbid an agent action, e.g. start_refueling");
  solvec->add_option("--out,-o", o.out, "write the plan file here");
  auto* sched = app.add_subcommand("schedule", "time a fixed action sequence");
  sched->add_option("domain", o.domain, "action description file or bundled domain")->required();
  sched->add_option("instance", o.instance, "instance file")->required();
  sched->add_option("plan", o.file, "plan file; steps without a time are timed by their triggers")->required();
  sched->add_option("--format", o.format, "output format")->check(CLI::IsMember({"text", "json"}));
  sched->add_option("--out,-o", o.out, "write the timed plan here");
  auto* valid = app.add_subcommand("validate", "check a timed plan against the semantics");
  valid->add_option("domain", o.domain, "action description file or bundled domain")->required();
  valid->add_option("instance", o.instance, "instance file")->required();
  valid->add_option("plan", o.file, "plan file")->required();
  valid->add_option("--format", o.format, "output format")->check(CLI::IsMember({"text", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kInvalid;
  }
  o.verb = app.get_subcommands().front()->get_name();
  if (o.threads == 0) {
    const char* env = std::getenv("HYDRAPLAN_THREADS");
    o.threads = env ? std::max(1, std::atoi(env)) : 1;
  }
  if (o.deterministic) o.threads = 1;

  Report r(o, args);
  try {
    if (o.verb == "check") return r.finish(cmd_check(o, r));
    if (o.verb == "ground") return r.finish(cmd_ground(o, r));
    if (o.verb == "translate") return r.finish(cmd_translate(o, r));
    if (o.verb == "solve") return r.finish(cmd_solve(o, r));
    if (o.verb == "schedule") return r.finish(cmd_schedule(o, r));
    if (o.verb == "validate") return r.finish(cmd_validate(o, r));
  } catch (const IoError& e) {
    r["outcome"] = "error";
    r.diag("io", e.what());
    return r.finish(kIo);
  } catch (const ResourceLimitError& e) {
    r["outcome"] = "resource_limit";
    r.diag("resource_limit", e.what());
    return r.finish(kLimit);
  } catch (const UnsupportedFragmentError& e) {
    r["outcome"] = "error";
    r.diag("unsupported", e.what());
    return r.finish(kInvalid);
  } catch (const json::exception& e) {
    r["outcome"] = "error";
    r.diag("parse", e.what());
    return r.finish(kInvalid);
  } catch (const std::exception& e) {
    r["outcome"] = "error";
    r.diag("invalid", e.what());
    return r.finish(kInvalid);
  }
  return kInvalid;
}
