#pragma once

#include "hydraplan/semantics.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hydraplan {

// A step-indexed constraint variable family instance such as f_final or
// tb_time(scott,a); the step is supplied when rendering.
struct VarKey {
  std::string family;
  std::vector<std::string> args;

  friend bool operator==(const VarKey&, const VarKey&) = default;
  friend auto operator<=>(const VarKey&, const VarKey&) = default;

  std::string at(const std::string& step) const {
    std::string s = family + "(";
    for (const auto& a : args) s += a + ",";
    return s + step + ")";
  }
};

// Linear combination of step-I variables.
struct StepLin {
  std::map<VarKey, Rational> coef;
  Rational constant = 0;

  static StepLin var(VarKey k) {
    StepLin s;
    s.coef[std::move(k)] = 1;
    return s;
  }
  static StepLin value(Rational c) {
    StepLin s;
    s.constant = std::move(c);
    return s;
  }
  bool is_constant() const { return coef.empty(); }

  StepLin& operator+=(const StepLin& o) {
    for (const auto& [k, c] : o.coef) {
      Rational& slot = coef[k];
      slot += c;
      if (slot == 0) coef.erase(k);
    }
    constant += o.constant;
    return *this;
  }
  StepLin scaled(const Rational& s) const {
    if (s == 0) return {};
    StepLin out = *this;
    for (auto& [k, c] : out.coef) c *= s;
    out.constant *= s;
    return out;
  }
  friend StepLin operator+(StepLin a, const StepLin& b) { return a += b; }
  friend StepLin operator-(StepLin a, const StepLin& b) { return a += b.scaled(-1); }
  friend bool operator==(const StepLin&, const StepLin&) = default;

  std::string render(const std::string& step) const {
    std::string s;
    for (const auto& [k, c] : coef) {
      Rational mag = c < 0 ? Rational(-c) : c;
      if (s.empty()) s += c < 0 ? "-" : "";
      else s += c < 0 ? " - " : " + ";
      if (mag != 1) s += to_string(mag) + "*";
      s += k.at(step);
    }
    if (s.empty()) return to_string(constant);
    if (constant > 0) s += " + " + to_string(constant);
    if (constant < 0) s += " - " + to_string(Rational(-constant));
    return s;
  }
};

inline const VarKey kStart{"start", {}};
inline const VarKey kEnd{"end", {}};

struct ProcessInfo {
  Term fluent;
  VarKey initial, time, final;
  Rational lower, upper;
  Rational init_value;
};

// A process regime: while `guard` is true at step I the process follows
// clamp(initial + rate * (end - time)).
struct Mode {
  std::size_t process = 0;
  Term guard;
  Rational rate;
  std::optional<Rational> floor, ceiling;
  std::string spelling;  // "max", "min", "clamp" or "" as written in the law
  std::string source;
};

struct DiscreteEffect {
  ActionRef action;
  std::vector<FluentLiteral> body;
  Term fluent;
  std::string value;
};

// Occurrence of `action` at I restarts the process at I+1 from `base`,
// anchored at end(I).
struct ProcessEffect {
  ActionRef action;
  std::vector<FluentLiteral> body;
  std::size_t process = 0;
  StepLin base;
  std::string source;
};

struct StaticRule {
  std::vector<FluentLiteral> body;
  Term fluent;
  std::string value;
};

// Required relation between step-I linear terms.
struct NumericRequirement {
  StepLin lhs;
  Relation rel = Relation::ge;
  StepLin rhs;
};

struct Denial {
  std::vector<ActionRef> actions;
  std::vector<FluentLiteral> body;
  std::optional<NumericRequirement> numeric;  // if set, the denial becomes this requirement
  std::string source;
};

struct TriggerEncoding {
  std::vector<FluentLiteral> guard;
  ActionRef action;
  std::size_t process = 0;
  std::size_t mode = 0;
  Rational target;
  std::string key;  // distinguishes the p/q atoms; empty for the bare p(I), q(I)
  std::string source;

  std::string atom(const std::string& name, const std::string& step) const {
    return name + "(" + (key.empty() ? "" : key + ",") + step + ")";
  }
};

struct CspVarDecl {
  VarKey var;
  Rational lo, hi;
};

struct CaspProgram {
  int n = 0;
  Signature signature;
  std::vector<Term> discrete_fluents;
  std::map<Term, std::string> initial_values;
  std::vector<ProcessInfo> processes;
  std::vector<Mode> modes;
  std::vector<DiscreteEffect> effects;
  std::vector<ProcessEffect> process_effects;
  std::vector<StaticRule> statics;
  std::vector<Denial> denials;
  std::vector<TriggerEncoding> triggers;
  std::vector<ActionRef> generated;
  std::vector<CspVarDecl> cspvars;  // one per family instance; declared for every step
  std::vector<FluentLiteral> goal;
  std::optional<Rational> goal_before;
  std::optional<Rational> deadline;
  int max_concurrent = 1;

  const CspVarDecl* decl(const VarKey& k) const {
    for (const auto& d : cspvars)
      if (d.var == k) return &d;
    return nullptr;
  }
};

namespace detail {

// Value of an expression as c0 + c1 * T with step-linear coefficients.
struct TimeAffine {
  StepLin c0, c1;
};

class LinearEvaluator {
public:
  LinearEvaluator(const std::map<Term, std::size_t>& process_index, const std::vector<ProcessInfo>& processes)
      : index_(process_index), processes_(processes) {}

  std::map<std::string, StepLin> bindings;

  TimeAffine eval(const Expr& e) const {
    switch (e.kind) {
      case ExprKind::number: return {StepLin::value(e.number), {}};
      case ExprKind::variable: {
        if (auto it = bindings.find(e.name); it != bindings.end()) return {it->second, {}};
        if (e.name == kTimeVariable) return {{}, StepLin::value(1)};
        throw UnsupportedFragmentError("unbound variable " + e.name);
      }
      case ExprKind::reserved:
        if (e.name == "end") return {StepLin::var(kEnd), {}};
        return {StepLin::var(kStart), {}};
      case ExprKind::fluent: {
        auto it = index_.find(Term{e.name, e.args});
        if (it == index_.end() || e.applied != "end")
          throw UnsupportedFragmentError("only p(end) of a process can appear in a constraint: " + expr_str(e));
        return {StepLin::var(processes_[it->second].final), {}};
      }
      case ExprKind::negate: {
        auto a = eval(*e.children[0]);
        return {a.c0.scaled(-1), a.c1.scaled(-1)};
      }
      case ExprKind::binary: {
        auto l = eval(*e.children[0]);
        auto r = eval(*e.children[1]);
        switch (e.op) {
          case '+': return {l.c0 + r.c0, l.c1 + r.c1};
          case '-': return {l.c0 - r.c0, l.c1 - r.c1};
          case '*':
            if (constant(r)) return {l.c0.scaled(r.c0.constant), l.c1.scaled(r.c0.constant)};
            if (constant(l)) return {r.c0.scaled(l.c0.constant), r.c1.scaled(l.c0.constant)};
            break;
          case '/':
            if (constant(r) && r.c0.constant != 0)
              return {l.c0.scaled(1 / r.c0.constant), l.c1.scaled(1 / r.c0.constant)};
            break;
          default: break;
        }
        throw UnsupportedFragmentError("non-linear arithmetic: " + expr_str(e));
      }
      default: break;
    }
    throw UnsupportedFragmentError("unsupported expression: " + expr_str(e));
  }

  StepLin eval_linear(const Expr& e) const {
    auto a = eval(e);
    if (a.c1 != StepLin{}) throw UnsupportedFragmentError("time variable outside a process law: " + expr_str(e));
    return a.c0;
  }

  static bool constant(const TimeAffine& a) { return a.c0.is_constant() && a.c1 == StepLin{}; }

private:
  const std::map<Term, std::size_t>& index_;
  const std::vector<ProcessInfo>& processes_;
};

}  // namespace detail

namespace detail {

struct SplitBody {
  std::vector<FluentLiteral> literals;
  std::vector<const Condition*> conditions;
};

inline SplitBody split_body(const Body& body) {
  SplitBody out;
  for (const auto& item : body) {
    if (const auto* lit = std::get_if<FluentLiteral>(&item)) out.literals.push_back(*lit);
    else if (const auto* c = std::get_if<Condition>(&item)) out.conditions.push_back(c);
  }
  return out;
}

// Records equalities that bind a fresh variable; returns the other conditions.
inline std::vector<const Condition*> bind_conditions(LinearEvaluator& ev, const std::vector<const Condition*>& conds) {
  std::vector<const Condition*> rest;
  for (const auto* c : conds) {
    std::map<std::string, Rational> bound;
    for (const auto& [k, v] : ev.bindings) bound[k] = 0;
    std::string var;
    const Expr* other = nullptr;
    if (is_binder(*c, bound, var, other)) ev.bindings[var] = ev.eval_linear(*other);
    else rest.push_back(c);
  }
  return rest;
}

inline std::optional<Relation> negate(Relation r) {
  switch (r) {
    case Relation::lt: return Relation::ge;
    case Relation::le: return Relation::gt;
    case Relation::gt: return Relation::le;
    case Relation::ge: return Relation::lt;
    case Relation::ne: return Relation::eq;
    case Relation::eq: return std::nullopt;
  }
  return std::nullopt;
}

inline void collect_processes(const Signature& sig, const Body& body, std::set<Term>& out) {
  for (const auto& item : body) {
    const auto* c = std::get_if<Condition>(&item);
    if (!c) continue;
    for (const auto& side : {c->lhs, c->rhs})
      walk(*side, [&](const Expr& n) {
        if (n.kind != ExprKind::fluent) return;
        const FluentDecl* fd = sig.fluent(n.name);
        if (fd && fd->kind == FluentKind::process) out.insert(Term{n.name, n.args});
      });
  }
}

}  // namespace detail

// Compiles a ground theory and instance into the step-indexed program for
// horizon n. Actions that can never occur (denied outright, or triggered only
// by triggers whose discrete guard is unreachable) are left out.
inline CaspProgram translate(const Theory& th, const Instance& inst, int n) {
  if (n < 1) throw Error("horizon must be at least 1");
  const Signature& sig = th.signature;
  CaspProgram prog;
  prog.n = n;
  prog.signature = sig;
  prog.max_concurrent = inst.max_concurrent;
  prog.deadline = inst.deadline;
  prog.goal = inst.goal;
  prog.goal_before = inst.goal_before;
  auto text = [&](const auto& form) { return statement_str(Statement{form, {}}, sig); };

  for (const auto& f : ground_fluents(sig)) {
    const FluentDecl* fd = sig.fluent(f.name);
    if (fd->kind == FluentKind::real)
      throw UnsupportedFragmentError("real fluent " + f.str() + " has no constraint encoding; declare it as a process");
    if (fd->kind != FluentKind::process) prog.discrete_fluents.push_back(f);
  }
  AtomSet init = initial_atoms(th, inst);

  // Liveness.
  std::set<ActionRef> denied, triggered;
  for (const auto& ex : th.executability)
    if (ex.actions.size() == 1 && ex.body.empty()) denied.insert(ex.actions.front());
  for (const auto& r : th.triggers) triggered.insert(r.action);
  std::set<std::pair<Term, std::string>> reach;
  for (const auto& a : init)
    if (const auto* v = std::get_if<std::string>(&a.value)) reach.emplace(a.term, *v);
  std::set<ActionRef> live;
  std::vector<bool> alive(th.triggers.size(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (std::size_t k = 0; k < th.triggers.size(); ++k) {
      if (alive[k]) continue;
      bool ok = true;
      for (const auto& lit : detail::split_body(th.triggers[k].body).literals)
        if (lit.polarity == Polarity::equal && !reach.count({lit.term(), lit.value})) ok = false;
      if (ok) alive[k] = changed = true;
    }
    for (const auto& a : ground_actions(sig)) {
      if (live.count(a) || denied.count(a)) continue;
      bool ok = is_agent_action(sig, a) && !triggered.count(a);
      for (std::size_t k = 0; k < th.triggers.size(); ++k)
        if (alive[k] && th.triggers[k].action == a) ok = true;
      if (ok) {
        live.insert(a);
        changed = true;
      }
    }
    for (const auto& law : th.laws)
      if (live.count(law.action) && !law.head.numeric())
        changed |= reach.emplace(law.head.term(), law.head.value).second;
    for (const auto& c : th.constraints)
      if (!c.head.numeric()) changed |= reach.emplace(c.head.term(), c.head.value).second;
  }

  // Processes mentioned by anything that can happen.
  std::set<Term> used;
  for (const auto& law : th.laws) {
    if (!live.count(law.action)) continue;
    if (law.head.numeric()) used.insert(law.head.term());
    detail::collect_processes(sig, law.body, used);
  }
  for (std::size_t k = 0; k < th.triggers.size(); ++k)
    if (alive[k]) detail::collect_processes(sig, th.triggers[k].body, used);
  for (const auto& ex : th.executability)
    if (std::all_of(ex.actions.begin(), ex.actions.end(), [&](const ActionRef& a) { return live.count(a) > 0; }))
      detail::collect_processes(sig, ex.body, used);
  std::map<Term, std::size_t> index;
  for (const auto& f : ground_fluents(sig)) {
    if (!used.count(f)) continue;
    const FluentDecl* fd = sig.fluent(f.name);
    ProcessInfo p{f, {fd->aux_initial, f.args}, {fd->aux_time, f.args}, {fd->aux_final, f.args}, fd->lower, fd->upper, 0};
    const Value* v = lookup(init, f);
    const auto* cl = v ? std::get_if<ClampedLinear>(v) : nullptr;
    if (!cl) throw UnsupportedFragmentError("process " + f.str() + " has no initial value");
    if (cl->rate != 0) throw UnsupportedFragmentError("process " + f.str() + " must start constant");
    p.init_value = cl->clamp(cl->base);
    index[f] = prog.processes.size();
    prog.processes.push_back(std::move(p));
  }

  for (const auto& f : prog.discrete_fluents)
    if (const Value* v = lookup(init, f)) prog.initial_values[f] = std::get<std::string>(*v);

  // Dynamic laws.
  for (const auto& law : th.laws) {
    if (!live.count(law.action)) continue;
    auto split = detail::split_body(law.body);
    if (!law.head.numeric()) {
      if (!split.conditions.empty())
        throw UnsupportedFragmentError("numeric condition on a discrete effect: " + text(law));
      prog.effects.push_back(DiscreteEffect{law.action, split.literals, law.head.term(), law.head.value});
    }
  }
  for (const auto& law : th.laws) {
    if (!live.count(law.action) || !law.head.numeric()) continue;
    std::string source = text(law);
    auto split = detail::split_body(law.body);
    detail::LinearEvaluator ev(index, prog.processes);
    Mode mode;
    detail::TimeAffine line;
    try {
      if (!detail::bind_conditions(ev, split.conditions).empty())
        throw UnsupportedFragmentError("only binding equalities may guard a process law");
      const Expr& e = *law.head.expr;
      std::optional<Rational> lo, hi;
      if (e.kind == ExprKind::call && (e.name == "max" || e.name == "min") && e.children.size() == 2) {
        auto a = ev.eval(*e.children[0]);
        auto b = ev.eval(*e.children[1]);
        bool first_const = detail::LinearEvaluator::constant(a);
        if (!first_const && !detail::LinearEvaluator::constant(b))
          throw UnsupportedFragmentError(e.name + " needs one constant argument");
        Rational bound = (first_const ? a : b).c0.constant;
        line = first_const ? b : a;
        if (!line.c1.is_constant()) throw UnsupportedFragmentError("rate must be constant");
        Rational rate = line.c1.constant;
        bool as_floor = rate < 0 || (rate == 0 && e.name == "max");
        (as_floor ? lo : hi) = bound;
        mode.spelling = e.name;
      } else if (e.kind == ExprKind::call && e.name == "clamp") {
        line = ev.eval(*e.children[0]);
        if (e.children[1]->kind != ExprKind::none) lo = ev.eval_linear(*e.children[1]).constant;
        if (e.children[2]->kind != ExprKind::none) hi = ev.eval_linear(*e.children[2]).constant;
        mode.spelling = "clamp";
      } else {
        line = ev.eval(e);
      }
      if (!line.c1.is_constant()) throw UnsupportedFragmentError("rate must be constant");
      mode.rate = line.c1.constant;
      mode.floor = lo;
      mode.ceiling = hi;
    } catch (const UnsupportedFragmentError& err) {
      throw UnsupportedFragmentError("process law is not clamped-linear: " + source + " (" + err.what() + ")");
    } catch (const UnsupportedExpressionError& err) {
      throw UnsupportedFragmentError("process law is not clamped-linear: " + source + " (" + err.what() + ")");
    }
    std::size_t pi = index.at(law.head.term());
    StepLin base = line.c0 + StepLin::var(kEnd).scaled(mode.rate);
    prog.process_effects.push_back(ProcessEffect{law.action, split.literals, pi, base, source});
    if (mode.rate == 0) continue;
    const DiscreteEffect* guard = nullptr;
    for (const auto& eff : prog.effects) {
      const FluentDecl* fd = sig.fluent(eff.fluent.name);
      if (eff.action == law.action && eff.body.empty() && fd->kind == FluentKind::boolean && eff.value == "true") {
        guard = &eff;
        break;
      }
    }
    if (!guard)
      throw UnsupportedFragmentError("no boolean fluent made true by " + law.action.str() + " marks the regime of " + source);
    mode.process = pi;
    mode.guard = guard->fluent;
    mode.source = source;
    auto same = std::find_if(prog.modes.begin(), prog.modes.end(),
                             [&](const Mode& m) { return m.process == pi && m.guard == mode.guard; });
    if (same == prog.modes.end()) prog.modes.push_back(mode);
    else if (same->rate != mode.rate || same->floor != mode.floor || same->ceiling != mode.ceiling)
      throw UnsupportedFragmentError("two regimes of " + prog.processes[pi].fluent.str() + " share guard " + mode.guard.str());
  }

  // State constraints.
  for (const auto& c : th.constraints) {
    auto split = detail::split_body(c.body);
    if (c.head.numeric() || !split.conditions.empty())
      throw UnsupportedFragmentError("numeric state constraint: " + text(c));
    prog.statics.push_back(StaticRule{split.literals, c.head.term(), c.head.value});
  }

  // Executability conditions.
  for (const auto& ex : th.executability) {
    if (!std::all_of(ex.actions.begin(), ex.actions.end(), [&](const ActionRef& a) { return live.count(a) > 0; })) continue;
    auto split = detail::split_body(ex.body);
    Denial d{ex.actions, split.literals, std::nullopt, text(ex)};
    detail::LinearEvaluator ev(index, prog.processes);
    auto rest = detail::bind_conditions(ev, split.conditions);
    if (rest.size() > 1) throw UnsupportedFragmentError("more than one comparison in " + d.source);
    if (rest.size() == 1) {
      auto rel = detail::negate(rest.front()->rel);
      if (!rel) throw UnsupportedFragmentError("equality comparison in " + d.source);
      d.numeric = NumericRequirement{ev.eval_linear(*rest.front()->lhs), *rel, ev.eval_linear(*rest.front()->rhs)};
    }
    prog.denials.push_back(std::move(d));
  }

  // Triggers.
  std::map<ActionRef, int> per_action;
  int nullary = 0;
  for (std::size_t k = 0; k < th.triggers.size(); ++k) {
    if (!alive[k]) continue;
    ++per_action[th.triggers[k].action];
    if (th.triggers[k].action.args.empty()) ++nullary;
  }
  std::map<ActionRef, int> seen;
  for (std::size_t k = 0; k < th.triggers.size(); ++k) {
    if (!alive[k]) continue;
    const Trigger& r = th.triggers[k];
    TriggerEncoding enc;
    enc.action = r.action;
    enc.source = text(r);
    auto split = detail::split_body(r.body);
    enc.guard = split.literals;
    if (split.conditions.size() != 1)
      throw UnsupportedFragmentError("a trigger needs exactly one process condition: " + enc.source);
    const Condition& c = *split.conditions.front();
    const Expr* fluent = c.lhs->kind == ExprKind::fluent ? c.lhs.get() : c.rhs.get();
    const Expr* other = fluent == c.lhs.get() ? c.rhs.get() : c.lhs.get();
    auto it = fluent->kind == ExprKind::fluent ? index.find(Term{fluent->name, fluent->args}) : index.end();
    if (c.rel != Relation::eq || it == index.end() || fluent->applied != "end")
      throw UnsupportedFragmentError("trigger condition must read p(end) = c: " + enc.source);
    detail::LinearEvaluator ev(index, prog.processes);
    StepLin target = ev.eval_linear(*other);
    if (!target.is_constant()) throw UnsupportedFragmentError("trigger target must be constant: " + enc.source);
    enc.process = it->second;
    enc.target = target.constant;
    auto mode = std::find_if(prog.modes.begin(), prog.modes.end(), [&](const Mode& m) {
      return m.process == enc.process &&
             std::any_of(enc.guard.begin(), enc.guard.end(), [&](const FluentLiteral& l) {
               return l.term() == m.guard && l.polarity == Polarity::equal && l.value == "true";
             });
    });
    if (mode == prog.modes.end())
      throw UnsupportedFragmentError("no changing regime of " + prog.processes[enc.process].fluent.str() +
                                     " is active under the guard of " + enc.source);
    enc.mode = static_cast<std::size_t>(mode - prog.modes.begin());
    int nth = ++seen[r.action];
    if (r.action.args.empty() && nullary == 1) enc.key.clear();
    else if (per_action[r.action] == 1) enc.key = r.action.str();
    else enc.key = r.action.str() + "," + std::to_string(nth);
    prog.triggers.push_back(std::move(enc));
  }

  for (const auto& a : ground_actions(sig))
    if (live.count(a) && is_agent_action(sig, a) && !triggered.count(a)) prog.generated.push_back(a);

  // Constraint variables and their ranges.
  auto range = [&](const std::string& family, bool is_time, const Rational& lo, const Rational& hi) {
    if (auto it = inst.bounds.find(family); it != inst.bounds.end()) return it->second;
    if (!is_time) return std::make_pair(lo, hi);
    if (auto it = inst.bounds.find("end"); it != inst.bounds.end()) return it->second;
    Rational top = inst.deadline ? *inst.deadline + n : inst.goal_before ? *inst.goal_before + n : Rational(1000000);
    return std::make_pair(Rational(0), top);
  };
  auto declare = [&](const VarKey& k, std::pair<Rational, Rational> r) { prog.cspvars.push_back(CspVarDecl{k, r.first, r.second}); };
  declare(kStart, range("start", true, 0, 0));
  declare(kEnd, range("end", true, 0, 0));
  for (const auto& p : prog.processes) {
    declare(p.initial, range(p.initial.family, false, p.lower, p.upper));
    declare(p.time, range(p.time.family, true, 0, 0));
    declare(p.final, range(p.final.family, false, p.lower, p.upper));
  }
  return prog;
}

// ---------------------------------------------------------------------------
// Text form

namespace detail {

inline std::string v_atom(const FluentLiteral& lit, const std::string& step) {
  std::string atom = "v(" + lit.value + "," + lit.term().str() + "," + step + ")";
  return lit.polarity == Polarity::equal ? atom : "not " + atom;
}

inline std::string with_body(const std::string& head, const std::vector<std::string>& body) {
  if (body.empty()) return head + ".";
  std::string s = head.empty() ? ":- " : head + " :- ";
  for (std::size_t i = 0; i < body.size(); ++i) s += (i ? ", " : "") + body[i];
  return s + ".";
}

inline std::vector<std::string> literal_atoms(const std::vector<FluentLiteral>& lits, const std::string& step = "I") {
  std::vector<std::string> out;
  for (const auto& l : lits) out.push_back(v_atom(l, step));
  return out;
}

inline std::string occurs_atom(const ActionRef& a, const std::string& step = "I") {
  return "occurs(" + a.str() + "," + step + ")";
}

// initial + rate*(end - time), with the rate's sign pulled out.
inline std::string line_text(const ProcessInfo& p, const Rational& rate) {
  Rational mag = rate < 0 ? Rational(-rate) : rate;
  return p.initial.at("I") + (rate < 0 ? " - " : " + ") + to_string(mag) + "*(end(I)-" + p.time.at("I") + ")";
}

// The end time at which the regime reaches `target`.
inline std::string root_text(const ProcessInfo& p, const Rational& rate, const Rational& target) {
  Rational mag = rate < 0 ? Rational(-rate) : rate;
  std::string diff = rate > 0 ? "(" + to_string(target) + "-" + p.initial.at("I") + ")"
                              : "(" + p.initial.at("I") + "-" + to_string(target) + ")";
  std::string scaled = is_integer(mag) ? diff + "/" + to_string(mag)
                                       : diff + "*" + to_string(Rational(denominator(mag))) + "/" +
                                             to_string(Rational(numerator(mag)));
  return scaled + " + " + p.time.at("I");
}

inline std::string regime_key(const CaspProgram& prog, const Mode& m) {
  return prog.processes[m.process].fluent.str() + "," + m.guard.str();
}

}  // namespace detail

inline std::string emit_casp_text(const CaspProgram& prog) {
  using detail::with_body;
  std::vector<std::string> out;
  auto line = [&](std::string s) { out.push_back(std::move(s)); };
  auto blank = [&] { out.emplace_back(); };
  auto comment = [&](const std::string& s) { out.push_back("% " + s); };

  line("#const n=" + std::to_string(prog.n) + ".");
  line("step(0..n).");
  line("#domain step(I;I1).");
  if (prog.discrete_fluents.empty() && prog.processes.empty() && prog.generated.empty() && prog.goal.empty())
    return "#const n=" + std::to_string(prog.n) + ".\nstep(0..n).\n#domain step(I;I1).\n";
  blank();

  comment("constraint variables; ranges of start, end and *_time variables without");
  comment("an explicit instance bound are derived from the instance (end bound, or deadline + n)");
  for (const auto& d : prog.cspvars)
    for (int k = 0; k <= prog.n; ++k)
      line("cspvar(" + d.var.at(std::to_string(k)) + "," + to_string(d.lo) + "," + to_string(d.hi) + ").");
  blank();

  comment("fluent domains and initiating actions");
  for (const auto& f : prog.discrete_fluents) {
    const FluentDecl* fd = prog.signature.fluent(f.name);
    for (const auto& v : prog.signature.values_of(*fd)) line("dom(" + f.str() + "," + v + ").");
  }
  for (const auto& a : prog.generated) line("action(" + a.str() + ").");
  blank();

  comment("initial state");
  for (const auto& [f, v] : prog.initial_values) line("v(" + v + "," + f.str() + ",0).");
  line("required(start(0)==0).");
  for (const auto& p : prog.processes) {
    line("required(" + p.initial.at("0") + "==" + to_string(p.init_value) + ").");
    line("required(" + p.time.at("0") + "==0).");
  }
  blank();

  comment("states are consecutive intervals");
  line("required(end(I)>=start(I)).");
  for (int k = 0; k < prog.n; ++k)
    line("required(start(" + std::to_string(k + 1) + ")==end(" + std::to_string(k) + ")).");
  blank();

  comment("plan generation");
  line("{occurs(A,I): action(A)} :- step(I), I<n.");
  line(":- step(I), #count{A: occurs(A,I), action(A)} > " + std::to_string(prog.max_concurrent) + ".");
  blank();

  comment("direct effects");
  for (const auto& e : prog.effects) {
    std::vector<std::string> body{detail::occurs_atom(e.action)};
    for (auto& b : detail::literal_atoms(e.body)) body.push_back(b);
    line(with_body("v(" + e.value + "," + e.fluent.str() + ",I+1)", body));
  }
  blank();

  comment("state constraints");
  for (const auto& s : prog.statics)
    line(with_body("v(" + s.value + "," + s.fluent.str() + ",I)", detail::literal_atoms(s.body)));
  blank();

  comment("inertia and uniqueness of discrete values");
  line("-v(X,F,I) :- v(Y,F,I), dom(F,X), X != Y.");
  line("v(X,F,I1) :- v(X,F,I), not -v(X,F,I1), I1 = I+1.");
  line(":- v(X,F,I), v(Y,F,I), X != Y.");
  blank();

  comment("executability");
  for (const auto& d : prog.denials) {
    std::vector<std::string> body;
    for (const auto& a : d.actions) body.push_back(detail::occurs_atom(a));
    for (auto& b : detail::literal_atoms(d.body)) body.push_back(b);
    if (d.numeric)
      line(with_body("required(" + d.numeric->lhs.render("I") + " " + relation_str(d.numeric->rel) + " " +
                         d.numeric->rhs.render("I") + ")",
                     body));
    else
      line(with_body("", body));
  }
  blank();

  comment("process restarts and inertia");
  for (const auto& e : prog.process_effects) {
    const ProcessInfo& p = prog.processes[e.process];
    std::vector<std::string> body{detail::occurs_atom(e.action)};
    for (auto& b : detail::literal_atoms(e.body)) body.push_back(b);
    std::vector<std::string> shifted = body;
    shifted.push_back("I1 = I+1");
    line(with_body("required(" + p.initial.at("I1") + "==" + e.base.render("I") + ")", shifted));
    line(with_body("required(" + p.time.at("I1") + "==end(I))", shifted));
    line(with_body("affects(" + p.fluent.str() + ",I)", body));
  }
  for (const auto& p : prog.processes) {
    line(with_body("required(" + p.initial.at("I1") + "==" + p.initial.at("I") + ")",
                   {"not affects(" + p.fluent.str() + ",I)", "I1 = I+1"}));
    line(with_body("required(" + p.time.at("I1") + "==" + p.time.at("I") + ")",
                   {"not affects(" + p.fluent.str() + ",I)", "I1 = I+1"}));
  }
  blank();

  comment("process regimes");
  for (const auto& m : prog.modes) {
    const ProcessInfo& p = prog.processes[m.process];
    std::string guard = "v(true," + m.guard.str() + ",I)";
    std::string lin = detail::line_text(p, m.rate);
    std::string value;
    if (m.spelling == "max" || m.spelling == "min") {
      const Rational& bound = m.floor ? *m.floor : *m.ceiling;
      value = m.spelling + "(" + to_string(bound) + "," + lin + " )";
    } else if (m.spelling == "clamp") {
      value = lin;
      if (m.ceiling) value = "min(" + to_string(*m.ceiling) + "," + value + ")";
      if (m.floor) value = "max(" + to_string(*m.floor) + "," + value + ")";
    } else {
      value = lin;
    }
    line(with_body("active(" + p.fluent.str() + ",I)", {guard}));
    line(with_body("required(" + p.final.at("I") + "==" + value + ")", {guard}));
    std::string key = detail::regime_key(prog, m);
    if (m.floor && m.ceiling) {
      line(with_body("1{ncl(" + key + ",I), clf(" + key + ",I), clc(" + key + ",I)}1", {guard}));
      line(with_body("required(" + lin + " >= " + to_string(*m.floor) + ")", {"ncl(" + key + ",I)"}));
      line(with_body("required(" + lin + " <= " + to_string(*m.ceiling) + ")", {"ncl(" + key + ",I)"}));
      line(with_body("required(" + lin + " <= " + to_string(*m.floor) + ")", {"clf(" + key + ",I)"}));
      line(with_body("required(" + lin + " >= " + to_string(*m.ceiling) + ")", {"clc(" + key + ",I)"}));
    } else if (m.floor || m.ceiling) {
      bool floor = m.floor.has_value();
      std::string bound = to_string(floor ? *m.floor : *m.ceiling);
      line(with_body("1{ncl(" + key + ",I), cl(" + key + ",I)}1", {guard}));
      line(with_body("required(" + lin + (floor ? " >= " : " <= ") + bound + ")", {"ncl(" + key + ",I)"}));
      line(with_body("required(" + lin + (floor ? " <= " : " >= ") + bound + ")", {"cl(" + key + ",I)"}));
    }
  }
  for (const auto& p : prog.processes)
    line(with_body("required(" + p.final.at("I") + "==" + p.initial.at("I") + ")", {"not active(" + p.fluent.str() + ",I)"}));
  blank();

  comment("triggers");
  for (const auto& t : prog.triggers) {
    const ProcessInfo& p = prog.processes[t.process];
    const Mode& m = prog.modes[t.mode];
    std::string root = detail::root_text(p, m.rate, t.target);
    auto guard = detail::literal_atoms(t.guard);
    line(with_body("1{" + t.atom("p", "I") + ", " + t.atom("q", "I") + "}1", guard));
    line(with_body("required(end(I) == " + root + " )", {t.atom("p", "I")}));
    line(with_body("required(end(I) < " + root + " )", {t.atom("q", "I")}));
    auto body = guard;
    body.push_back(t.atom("p", "I"));
    line(with_body(detail::occurs_atom(t.action), body));
  }
  blank();

  if (prog.deadline) {
    comment("deadline");
    line("required(end(I)< " + to_string(*prog.deadline) + " ) :- occurs(A,I), action(A).");
    blank();
  }

  comment("goal");
  auto goal = detail::literal_atoms(prog.goal);
  if (prog.goal_before) {
    std::string bound = to_string(*prog.goal_before);
    goal.push_back("required(start(I)<" + bound + ")");
    line(with_body("goal(I)", goal));
    line("1{g(I),ng(I)}1.");
    line("required(start(I)<" + bound + ") :- g(I).");
    line("required(start(I) >=" + bound + ") :- ng(I).");
  } else {
    line(with_body("goal(I)", goal));
  }
  line("success :- goal(I).");
  line(":- not success.");

  std::string s;
  for (const auto& l : out) s += l + "\n";
  return s;
}

}  // namespace hydraplan
