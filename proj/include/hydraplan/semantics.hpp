#pragma once

#include "hydraplan/core.hpp"
#include "hydraplan/grounding.hpp"
#include "hydraplan/syntax.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hydraplan {

class ContradictionError : public Error {
public:
  using Error::Error;
};

// A state of the transition diagram: an interval plus a complete valuation.
// Discrete fluents map to constant symbols, real fluents to rationals and
// process fluents to clamped-linear functions of time.
struct State {
  TimeValue start = 0;
  TimeValue end = TimeValue::omega();
  AtomSet atoms;

  std::string str() const {
    std::string s = "[" + start.str() + ", " + end.str() + "]";
    for (const auto& a : atoms) s += " " + a.str();
    return s;
  }
};

using CompoundAction = std::vector<ActionRef>;

struct TimedStep {
  Rational time;
  CompoundAction actions;
};
using TimedPlan = std::vector<TimedStep>;

enum class Rule {
  none,
  plan_shape,
  interval,
  valuation,
  constraint_closure,
  trigger_closure,
  executability,
  action_completeness,
  fixpoint,
  concurrency,
  deadline,
  goal,
};

inline std::string rule_name(Rule r) {
  switch (r) {
    case Rule::none: return "none";
    case Rule::plan_shape: return "plan shape";
    case Rule::interval: return "interval";
    case Rule::valuation: return "valuation";
    case Rule::constraint_closure: return "constraint closure";
    case Rule::trigger_closure: return "trigger closure";
    case Rule::executability: return "executability";
    case Rule::action_completeness: return "action completeness";
    case Rule::fixpoint: return "fixpoint";
    case Rule::concurrency: return "concurrency";
    case Rule::deadline: return "deadline";
    case Rule::goal: return "goal";
  }
  return "?";
}

struct Verdict {
  bool accepted = true;
  Rule rule = Rule::none;
  int step = -1;
  std::string witness;

  static Verdict ok() { return {}; }
  static Verdict reject(Rule r, std::string witness, int step = -1) { return Verdict{false, r, step, std::move(witness)}; }
  explicit operator bool() const { return accepted; }

  std::string str() const {
    if (accepted) return "accepted";
    std::string s = "rejected: " + rule_name(rule);
    if (step >= 0) s += " at step " + std::to_string(step);
    if (!witness.empty()) s += ": " + witness;
    return s;
  }
};

// Ground theory split by statement form, with the signature it refers to.
struct Theory {
  Signature signature;
  std::vector<StateConstraint> constraints;
  std::vector<DynamicLaw> laws;
  std::vector<Executability> executability;
  std::vector<Trigger> triggers;

  static Theory from(const GroundActionDescription& g) {
    Theory t;
    t.signature = g.signature;
    for (const auto& st : g.statements) {
      std::visit(
          [&](const auto& s) {
            using S = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<S, StateConstraint>) t.constraints.push_back(s);
            else if constexpr (std::is_same_v<S, DynamicLaw>) t.laws.push_back(s);
            else if constexpr (std::is_same_v<S, Executability>) t.executability.push_back(s);
            else t.triggers.push_back(s);
          },
          st.form);
    }
    return t;
  }

  bool triggered(const ActionRef& a) const {
    return std::any_of(triggers.begin(), triggers.end(), [&](const Trigger& r) { return r.action == a; });
  }
};

namespace detail {

// Arithmetic view of an atom set over an interval whose end may be overridden.
inline EvalContext eval_context(const AtomSet& atoms, const TimeValue& start, const TimeValue& end) {
  EvalContext ctx;
  ctx.reserved = [start, end](const std::string& r) { return r == "start" ? start.value() : end.value(); };
  ctx.fluent = [&atoms, start, end](const Expr& node) -> Rational {
    const Value* v = lookup(atoms, Term{node.name, node.args});
    if (!v) throw OutOfDomainError("no value for " + term_text(node.name, node.args));
    if (const auto* r = std::get_if<Rational>(v)) return *r;
    if (const auto* p = std::get_if<ClampedLinear>(v)) {
      if (node.applied.empty())
        throw UnsupportedExpressionError("process " + term_text(node.name, node.args) + " used without a time");
      return eval_process(*p, node.applied == "start" ? start : end);
    }
    throw UnsupportedExpressionError("discrete fluent " + term_text(node.name, node.args) + " inside arithmetic");
  };
  return ctx;
}

inline bool is_binder(const Condition& c, const std::map<std::string, Rational>& bound, std::string& var,
                      const Expr*& other) {
  if (c.rel != Relation::eq) return false;
  auto unbound_var = [&](const ExprPtr& e) {
    return e->kind == ExprKind::variable && e->name != kTimeVariable && !bound.count(e->name);
  };
  if (unbound_var(c.rhs)) {
    var = c.rhs->name;
    other = c.lhs.get();
    return true;
  }
  if (unbound_var(c.lhs)) {
    var = c.lhs->name;
    other = c.rhs.get();
    return true;
  }
  return false;
}

}  // namespace detail

// Evaluates a body over atoms and interval. Returns the variable bindings made
// by equalities when every item holds. Arithmetic on omega makes an item false.
inline std::optional<std::map<std::string, Rational>> eval_body(const Body& body, const AtomSet& atoms,
                                                               const TimeValue& start, const TimeValue& end) {
  EvalContext ctx = detail::eval_context(atoms, start, end);
  for (const auto& item : body) {
    if (const auto* lit = std::get_if<FluentLiteral>(&item)) {
      if (!literal_holds(atoms, lit->ground())) return std::nullopt;
      continue;
    }
    const auto* c = std::get_if<Condition>(&item);
    if (!c) continue;
    try {
      std::string var;
      const Expr* other = nullptr;
      if (detail::is_binder(*c, ctx.bindings, var, other)) {
        ctx.bindings[var] = eval_constant(*other, ctx);
        continue;
      }
      if (!compare(eval_constant(*c->lhs, ctx), c->rel, eval_constant(*c->rhs, ctx))) return std::nullopt;
    } catch (const UndefinedTimeError&) {
      return std::nullopt;
    } catch (const OutOfDomainError&) {
      return std::nullopt;
    }
  }
  return ctx.bindings;
}

namespace detail {

inline Atom head_atom(const Head& h, const Signature& sig, const AtomSet& atoms, const TimeValue& start,
                      const TimeValue& end, const std::map<std::string, Rational>& bindings,
                      const Rational& anchor) {
  Term term = h.term();
  if (!h.numeric()) return Atom{term, h.value};
  EvalContext ctx = eval_context(atoms, start, end);
  ctx.bindings = bindings;
  const FluentDecl* fd = sig.fluent(h.fluent);
  if (fd && fd->kind == FluentKind::process) return Atom{term, to_clamped_linear(*h.expr, ctx, anchor)};
  return Atom{term, eval_constant(*h.expr, ctx)};
}

inline std::vector<std::string> conflicting_terms(const AtomSet& atoms) {
  std::vector<std::string> out;
  const Atom* prev = nullptr;
  for (const auto& a : atoms) {
    if (prev && prev->term == a.term && (out.empty() || out.back() != a.term.str())) out.push_back(a.term.str());
    prev = &a;
  }
  return out;
}

// Least set containing `s` and closed under `z`; may be inconsistent.
inline AtomSet derive(const AtomSet& s, const std::vector<StateConstraint>& z, const Signature& sig,
                      const TimeValue& start, const TimeValue& end) {
  AtomSet out = s;
  bool changed = true;
  while (changed) {
    changed = false;
    for (const auto& c : z) {
      auto b = eval_body(c.body, out, start, end);
      if (!b) continue;
      Rational anchor = start.is_finite() ? start.value() : Rational(0);
      if (out.insert(head_atom(c.head, sig, out, start, end, *b, anchor)).second) changed = true;
    }
  }
  return out;
}

}  // namespace detail

// Cn_Z(S): the smallest set of atoms containing S and closed under Z.
inline AtomSet cn_z(const AtomSet& s, const std::vector<StateConstraint>& z, const Signature& sig,
                    const TimeValue& start = 0, const TimeValue& end = TimeValue::omega()) {
  AtomSet out = detail::derive(s, z, sig, start, end);
  auto bad = detail::conflicting_terms(out);
  if (!bad.empty()) {
    std::string chain;
    for (const auto& c : z) {
      if (c.head.term().str() != bad.front()) continue;
      if (eval_body(c.body, out, start, end)) chain += (chain.empty() ? "" : "; ") + head_str(c.head, sig) + " if " + body_str(c.body);
    }
    throw ContradictionError("two values for " + bad.front() + (chain.empty() ? "" : " via " + chain));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Triggers

// Infimum of the times t >= start at which a body holds when end is set to t,
// and whether the infimum itself satisfies the body.
struct EarliestTime {
  Rational time;
  bool attained = true;
};

namespace detail {

struct TimeInterval {
  Rational lo;
  bool lo_open = false;
  std::optional<Rational> hi;  // nullopt: unbounded
  bool hi_open = false;

  bool empty() const {
    if (!hi) return false;
    return lo > *hi || (lo == *hi && (lo_open || hi_open));
  }
  void raise_lo(const Rational& v, bool open) {
    if (v > lo || (v == lo && open)) {
      lo = v;
      lo_open = open;
    }
  }
  void lower_hi(const Rational& v, bool open) {
    if (!hi || v < *hi || (v == *hi && open)) {
      hi = v;
      hi_open = open;
    }
  }
};

// Times where a process stops or starts being clamped.
inline void clamp_breakpoints(const ClampedLinear& p, const Rational& after, std::set<Rational>& out) {
  if (p.rate == 0) return;
  for (const auto& bound : {p.floor, p.ceiling}) {
    if (!bound) continue;
    Rational t = p.anchor + (*bound - p.base) / p.rate;
    if (t > after) out.insert(t);
  }
}

}  // namespace detail

// Earliest end time at which `body` holds for the given valuation, if any.
// Process atoms are piecewise linear in end, so the search runs piece by piece.
inline std::optional<EarliestTime> earliest_satisfying_time(const Body& body, const AtomSet& atoms,
                                                            const Rational& start) {
  std::vector<const Condition*> conditions;
  for (const auto& item : body) {
    if (const auto* lit = std::get_if<FluentLiteral>(&item)) {
      if (!literal_holds(atoms, lit->ground())) return std::nullopt;
    } else if (const auto* c = std::get_if<Condition>(&item)) {
      conditions.push_back(c);
    }
  }
  if (conditions.empty()) return EarliestTime{start, true};

  std::set<Rational> cuts{start};
  for (const auto* c : conditions) {
    std::map<std::string, Rational> none;
    std::string var;
    const Expr* other = nullptr;
    if (detail::is_binder(*c, none, var, other))
      throw UnsupportedFragmentError("trigger body binds variable " + var);
    for (const auto& side : {c->lhs, c->rhs}) {
      walk(*side, [&](const Expr& n) {
        if (n.kind != ExprKind::fluent) return;
        if (const Value* v = lookup(atoms, Term{n.name, n.args}))
          if (const auto* p = std::get_if<ClampedLinear>(v)) detail::clamp_breakpoints(*p, start, cuts);
      });
    }
  }

  auto g = [&](const Condition& c, const Rational& t) {
    EvalContext ctx = detail::eval_context(atoms, start, t);
    return eval_constant(*c.lhs, ctx) - eval_constant(*c.rhs, ctx);
  };
  std::vector<Rational> points(cuts.begin(), cuts.end());
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Rational& a = points[k];
    std::optional<Rational> b;
    if (k + 1 < points.size()) b = points[k + 1];
    Rational probe = b ? *b : a + 1;
    detail::TimeInterval iv{a, false, b, false};
    std::vector<Rational> excluded;
    try {
      for (const auto* c : conditions) {
        Rational ga = g(*c, a);
        Rational slope = (g(*c, probe) - ga) / (probe - a);
        if (slope == 0) {
          if (!compare(ga, c->rel, Rational(0))) iv.lower_hi(a, true);
          continue;
        }
        Rational root = a - ga / slope;
        bool rising = slope > 0;
        switch (c->rel) {
          case Relation::eq:
            iv.raise_lo(root, false);
            iv.lower_hi(root, false);
            break;
          case Relation::ne: excluded.push_back(root); break;
          case Relation::lt:
          case Relation::le: {
            bool open = c->rel == Relation::lt;
            if (rising) iv.lower_hi(root, open);
            else iv.raise_lo(root, open);
            break;
          }
          case Relation::gt:
          case Relation::ge: {
            bool open = c->rel == Relation::gt;
            if (rising) iv.raise_lo(root, open);
            else iv.lower_hi(root, open);
            break;
          }
        }
      }
    } catch (const OutOfDomainError&) {
      continue;
    }
    if (iv.empty()) continue;
    bool attained = !iv.lo_open;
    if (std::find(excluded.begin(), excluded.end(), iv.lo) != excluded.end()) {
      if (iv.hi && *iv.hi == iv.lo) continue;
      attained = false;
    }
    return EarliestTime{iv.lo, attained};
  }
  return std::nullopt;
}

inline bool satisfies_trigger(const State& s, const Trigger& r) {
  return eval_body(r.body, s.atoms, s.start, s.end).has_value();
}

// The first trigger some strictly earlier end would satisfy, with that time.
inline std::optional<std::pair<const Trigger*, EarliestTime>> trigger_closure_violation(const State& s,
                                                                                        const Theory& th) {
  for (const auto& r : th.triggers) {
    auto e = earliest_satisfying_time(r.body, s.atoms, s.start.value());
    if (!e) continue;
    if (s.end.is_omega() || e->time < s.end.value()) return std::make_pair(&r, *e);
  }
  return std::nullopt;
}

inline bool closed_under_triggers(const State& s, const Theory& th) { return !trigger_closure_violation(s, th); }

inline std::string trigger_str(const Trigger& r) { return body_str(r.body) + " triggers " + r.action.str(); }

// ---------------------------------------------------------------------------
// States and transitions

inline Verdict is_state(const State& s, const Theory& th) {
  const Signature& sig = th.signature;
  if (s.start.is_omega()) return Verdict::reject(Rule::interval, "start is omega");
  if (s.end < s.start) return Verdict::reject(Rule::interval, "end " + s.end.str() + " precedes start " + s.start.str());
  if (!is_consistent(s.atoms))
    return Verdict::reject(Rule::valuation, "two values for " + detail::conflicting_terms(s.atoms).front());
  for (const auto& term : ground_fluents(sig)) {
    const Value* v = lookup(s.atoms, term);
    if (!v) return Verdict::reject(Rule::valuation, "no value for " + term.str());
    const FluentDecl* fd = sig.fluent(term.name);
    switch (fd->kind) {
      case FluentKind::boolean:
      case FluentKind::enumerated: {
        auto dom = sig.values_of(*fd);
        const auto* sym = std::get_if<std::string>(v);
        if (!sym || std::find(dom.begin(), dom.end(), *sym) == dom.end())
          return Verdict::reject(Rule::valuation, term.str() + "=" + value_str(*v) + " is outside its range");
        break;
      }
      case FluentKind::real:
        if (!std::holds_alternative<Rational>(*v))
          return Verdict::reject(Rule::valuation, term.str() + " needs a number");
        break;
      case FluentKind::process: {
        const auto* p = std::get_if<ClampedLinear>(v);
        if (!p) return Verdict::reject(Rule::valuation, term.str() + " needs a function of time");
        if (p->anchor > s.start.value())
          return Verdict::reject(Rule::valuation, term.str() + " is undefined at start " + s.start.str());
        for (const auto& t : {s.start, s.end}) {
          if (t.is_omega()) continue;
          Rational x = eval_process(*p, t);
          if (x < fd->lower || x > fd->upper)
            return Verdict::reject(Rule::valuation, term.str() + "(" + t.str() + ")=" + to_string(x) + " leaves its range");
        }
        break;
      }
    }
  }
  AtomSet closed = detail::derive(s.atoms, th.constraints, sig, s.start, s.end);
  if (closed != s.atoms) {
    for (const auto& a : closed)
      if (!s.atoms.count(a)) return Verdict::reject(Rule::constraint_closure, a.str() + " is derivable but absent");
  }
  if (auto v = trigger_closure_violation(s, th))
    return Verdict::reject(Rule::trigger_closure,
                           trigger_str(*v->first) + " holds at " + to_string(v->second.time) + " before end " + s.end.str());
  return Verdict::ok();
}

inline bool contains(const CompoundAction& a, const ActionRef& e) { return std::find(a.begin(), a.end(), e) != a.end(); }

// The executability condition ruling out `a` in `s`, if any.
inline const Executability* executability_violation(const State& s, const CompoundAction& a, const Theory& th) {
  for (const auto& ex : th.executability) {
    if (!std::all_of(ex.actions.begin(), ex.actions.end(), [&](const ActionRef& e) { return contains(a, e); })) continue;
    if (eval_body(ex.body, s.atoms, s.start, s.end)) return &ex;
  }
  return nullptr;
}

inline bool action_possible(const State& s, const CompoundAction& a, const Theory& th) {
  return !executability_violation(s, a, th);
}

// E_s(a): heads of the laws of a's members whose bodies hold in s. Process
// heads become functions anchored at the end of s.
inline AtomSet direct_effects(const State& s, const CompoundAction& a, const Theory& th) {
  AtomSet out;
  Rational anchor = s.end.value();
  for (const auto& law : th.laws) {
    if (!contains(a, law.action)) continue;
    auto b = eval_body(law.body, s.atoms, s.start, s.end);
    if (!b) continue;
    out.insert(detail::head_atom(law.head, th.signature, s.atoms, s.start, s.end, *b, anchor));
  }
  auto bad = detail::conflicting_terms(out);
  if (!bad.empty()) throw ContradictionError("inconsistent direct effects on " + bad.front());
  return out;
}

// A triggered action belongs to `a` iff some trigger for it is satisfied.
inline std::optional<std::string> completeness_violation(const State& s, const CompoundAction& a, const Theory& th) {
  std::map<ActionRef, bool> fired;
  for (const auto& r : th.triggers) fired[r.action] = fired[r.action] || satisfies_trigger(s, r);
  for (const auto& [e, on] : fired) {
    if (on && !contains(a, e)) return e.str() + " is triggered but missing";
    if (!on && contains(a, e)) return e.str() + " occurs but no trigger for it holds";
  }
  return std::nullopt;
}

inline bool action_complete(const State& s, const CompoundAction& a, const Theory& th) {
  return !completeness_violation(s, a, th);
}

// The successor of s under a over [end(s), end]: direct effects, then inertia
// for every atom not overridden by the closure.
inline State successor(const State& s, const CompoundAction& a, const Theory& th, const TimeValue& end) {
  State out;
  out.start = s.end;
  out.end = end;
  AtomSet effects = direct_effects(s, a, th);
  AtomSet inertial;
  for (const auto& at : s.atoms)
    if (!lookup(effects, at.term)) inertial.insert(at);
  for (;;) {
    AtomSet base = effects;
    base.insert(inertial.begin(), inertial.end());
    AtomSet closed = detail::derive(base, th.constraints, th.signature, out.start, out.end);
    auto bad = detail::conflicting_terms(closed);
    std::size_t before = inertial.size();
    for (auto it = inertial.begin(); it != inertial.end();) {
      if (std::find(bad.begin(), bad.end(), it->term.str()) != bad.end()) it = inertial.erase(it);
      else ++it;
    }
    if (inertial.size() == before) {
      if (!bad.empty()) throw ContradictionError("no consistent successor: two values for " + bad.front());
      out.atoms = std::move(closed);
      return out;
    }
  }
}

// Definition-level check of one arc: completeness, possibility, trigger
// closure of the target and the fixpoint equation.
inline Verdict is_transition(const State& s, const CompoundAction& a, const State& s2, const Theory& th) {
  if (a.empty()) return Verdict::reject(Rule::plan_shape, "empty compound action");
  if (auto w = completeness_violation(s, a, th)) return Verdict::reject(Rule::action_completeness, *w);
  if (const auto* ex = executability_violation(s, a, th)) {
    Statement st{*ex, {}};
    return Verdict::reject(Rule::executability, statement_str(st, th.signature));
  }
  if (s2.start != s.end) return Verdict::reject(Rule::interval, "target does not start at " + s.end.str());
  if (Verdict v = is_state(s2, th); !v) return v;
  AtomSet expected;
  try {
    AtomSet base = direct_effects(s, a, th);
    for (const auto& at : s.atoms)
      if (s2.atoms.count(at)) base.insert(at);
    expected = detail::derive(base, th.constraints, th.signature, s2.start, s2.end);
  } catch (const ContradictionError& e) {
    return Verdict::reject(Rule::fixpoint, e.what());
  }
  for (const auto& at : s2.atoms)
    if (!expected.count(at)) return Verdict::reject(Rule::fixpoint, at.str() + " is not derivable");
  for (const auto& at : expected)
    if (!s2.atoms.count(at)) return Verdict::reject(Rule::fixpoint, at.str() + " is derivable but absent");
  return Verdict::ok();
}

// Atoms of the initial state: the instance's init section closed under the
// state constraints. Numeric initial values are anchored at time 0.
inline AtomSet initial_atoms(const Theory& th, const Instance& inst) {
  AtomSet s;
  for (const auto& lit : inst.init) s.insert(Atom{lit.term(), lit.value});
  EvalContext ctx;
  for (const auto& [term, expr] : inst.init_numeric) {
    const FluentDecl* fd = th.signature.fluent(term.name);
    if (fd && fd->kind == FluentKind::process) s.insert(Atom{term, to_clamped_linear(*expr, ctx, 0)});
    else s.insert(Atom{term, eval_constant(*expr, ctx)});
  }
  return cn_z(s, th.constraints, th.signature, 0, TimeValue::omega());
}

inline bool is_agent_action(const Signature& sig, const ActionRef& a) {
  const ActionDecl* d = sig.action(a.name);
  return d && d->genus == Genus::agent;
}

// The states visited by a timed plan: state k spans the times of steps k-1 and
// k, the first starts at 0 and the last never ends.
struct Trajectory {
  std::vector<State> states;
  Verdict verdict;
  int goal_state = -1;
};

inline Trajectory build_trajectory(const Theory& th, const Instance& inst, const TimedPlan& plan) {
  Trajectory out;
  auto fail = [&](Rule r, std::string w, int step) {
    out.verdict = Verdict::reject(r, std::move(w), step);
    return out;
  };
  Rational prev = 0;
  for (std::size_t k = 0; k < plan.size(); ++k) {
    const auto& st = plan[k];
    int step = static_cast<int>(k);
    if (st.time < prev) return fail(Rule::plan_shape, "time " + to_string(st.time) + " goes backwards", step);
    prev = st.time;
    if (st.actions.empty()) return fail(Rule::plan_shape, "empty compound action", step);
    int agents = 0;
    for (const auto& a : st.actions) {
      if (!th.signature.action(a.name)) return fail(Rule::plan_shape, "unknown action " + a.str(), step);
      if (!is_agent_action(th.signature, a)) continue;
      ++agents;
      if (inst.deadline && st.time >= *inst.deadline)
        return fail(Rule::deadline, a.str() + " at " + to_string(st.time) + " is not before " + to_string(*inst.deadline), step);
    }
    if (agents > inst.max_concurrent)
      return fail(Rule::concurrency, std::to_string(agents) + " agent actions exceed " + std::to_string(inst.max_concurrent), step);
  }

  State s;
  s.start = 0;
  s.end = plan.empty() ? TimeValue::omega() : TimeValue(plan.front().time);
  try {
    s.atoms = initial_atoms(th, inst);
  } catch (const Error& e) {
    return fail(Rule::constraint_closure, e.what(), 0);
  }
  if (Verdict v = is_state(s, th); !v) {
    v.step = 0;
    out.verdict = v;
    return out;
  }
  out.states.push_back(s);
  for (std::size_t k = 0; k < plan.size(); ++k) {
    int step = static_cast<int>(k);
    const State& cur = out.states.back();
    const CompoundAction& a = plan[k].actions;
    TimeValue end = k + 1 < plan.size() ? TimeValue(plan[k + 1].time) : TimeValue::omega();
    if (auto w = completeness_violation(cur, a, th)) return fail(Rule::action_completeness, *w, step);
    if (const auto* ex = executability_violation(cur, a, th))
      return fail(Rule::executability, statement_str(Statement{*ex, {}}, th.signature), step);
    State next;
    try {
      next = successor(cur, a, th, end);
    } catch (const Error& e) {
      return fail(Rule::fixpoint, e.what(), step);
    }
    if (Verdict v = is_transition(cur, a, next, th); !v) {
      v.step = step;
      out.verdict = v;
      return out;
    }
    out.states.push_back(std::move(next));
  }
  return out;
}

inline bool goal_holds(const Instance& inst, const State& s) {
  for (const auto& g : inst.goal)
    if (!literal_holds(s.atoms, g.ground())) return false;
  return !inst.goal_before || s.start.value() < *inst.goal_before;
}

// Checks every state and arc of the trajectory a timed plan induces, then the
// goal: some visited state satisfies it and starts before the goal bound.
inline Verdict validate_trajectory(const Theory& th, const Instance& inst, const TimedPlan& plan,
                                   Trajectory* trajectory = nullptr) {
  Trajectory t = build_trajectory(th, inst, plan);
  if (t.verdict) {
    for (std::size_t k = 0; k < t.states.size(); ++k) {
      if (goal_holds(inst, t.states[k])) {
        t.goal_state = static_cast<int>(k);
        break;
      }
    }
    if (t.goal_state < 0) {
      std::string w;
      for (const auto& g : inst.goal)
        if (!literal_holds(t.states.back().atoms, g.ground())) {
          w = g.ground().str() + " does not hold in the final state";
          break;
        }
      if (w.empty()) w = "goal reached too late";
      t.verdict = Verdict::reject(Rule::goal, w, static_cast<int>(t.states.size()) - 1);
    }
  }
  if (trajectory) *trajectory = t;
  return t.verdict;
}

}  // namespace hydraplan
