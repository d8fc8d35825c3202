#pragma once

#include "hydraplan/lra.hpp"
#include "hydraplan/translator.hpp"

#include <atomic>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

namespace hydraplan {

class ResourceLimitError : public Error {
public:
  using Error::Error;
};

struct SolveOptions {
  bool deterministic = true;
  long node_limit = 2'000'000;
  int threads = 1;
  std::set<ActionRef> disabled;  // agent actions the search may not use
  // Look for plans with the fewest agent-initiated actions first.
  bool fewest_actions = true;
};

struct SolveStats {
  long nodes = 0;
  long backtracks = 0;
  long lra_checks = 0;
  long eliminations = 0;
  long validations = 0;
  long rejected_by_validator = 0;

  SolveStats& operator+=(const SolveStats& o) {
    nodes += o.nodes;
    backtracks += o.backtracks;
    lra_checks += o.lra_checks;
    eliminations += o.eliminations;
    validations += o.validations;
    rejected_by_validator += o.rejected_by_validator;
    return *this;
  }
};

enum class SolveStatus { sat, unsat, resource_limit };

inline std::string status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::sat: return "sat";
    case SolveStatus::unsat: return "unsat";
    case SolveStatus::resource_limit: return "resource_limit";
  }
  return "?";
}

struct SolveResult {
  SolveStatus status = SolveStatus::unsat;
  TimedPlan plan;
  Rational goal_start = 0;  // start of the goal state
  int goal_step = -1;
  Verdict verdict;  // the validator's judgement of `plan`
  SolveStats stats;
};

namespace detail {

using Valuation = std::map<Term, std::string>;

inline bool holds(const Valuation& v, const FluentLiteral& l) {
  auto it = v.find(l.term());
  bool eq = it != v.end() && it->second == l.value;
  return l.polarity == Polarity::equal ? eq : !eq;
}

inline bool holds_all(const Valuation& v, const std::vector<FluentLiteral>& ls) {
  return std::all_of(ls.begin(), ls.end(), [&](const FluentLiteral& l) { return holds(v, l); });
}

inline bool guard_on(const Valuation& v, const Term& guard) {
  auto it = v.find(guard);
  return it != v.end() && it->second == "true";
}

// Closes a valuation under the state constraints; values fixed by `pinned`
// (direct effects) may not be overridden. nullopt on a conflict.
inline std::optional<Valuation> close_statics(Valuation v, const std::vector<StaticRule>& statics,
                                              const Valuation& pinned) {
  Valuation derived;
  for (std::size_t round = 0;; ++round) {
    if (round > statics.size() + 1) return std::nullopt;  // oscillation
    bool changed = false;
    for (const auto& s : statics) {
      if (!holds_all(v, s.body)) continue;
      auto pin = pinned.find(s.fluent);
      if (pin != pinned.end() && pin->second != s.value) return std::nullopt;
      auto d = derived.find(s.fluent);
      if (d != derived.end() && d->second != s.value) return std::nullopt;
      derived[s.fluent] = s.value;
      std::string& slot = v[s.fluent];
      if (slot != s.value) {
        slot = s.value;
        changed = true;
      }
    }
    if (!changed) break;
  }
  for (const auto& s : statics)
    if (holds_all(v, s.body) && v[s.fluent] != s.value) return std::nullopt;
  return v;
}

// Delete-relaxed lower bound on the number of steps before the goal can hold.
class StepBound {
public:
  static constexpr int kInfinite = std::numeric_limits<int>::max() / 2;
  using Levels = std::map<std::pair<Term, std::string>, int>;

  StepBound(const CaspProgram& prog, const std::set<ActionRef>& disabled) : prog_(prog) {
    auto add_action = [&](const ActionRef& a, std::vector<FluentLiteral> pre) {
      Relaxed r;
      r.action = a;
      r.pre = std::move(pre);
      for (const auto& e : prog.effects)
        if (e.action == a) r.effects.push_back(&e);
      actions_.push_back(std::move(r));
    };
    for (const auto& a : prog.generated) {
      if (disabled.contains(a)) continue;
      std::vector<FluentLiteral> pre;
      for (const auto& d : prog.denials) {
        if (d.numeric || d.actions.size() != 1 || d.actions[0] != a || d.body.size() != 1) continue;
        if (d.body[0].polarity != Polarity::not_equal) continue;
        FluentLiteral l = d.body[0];
        l.polarity = Polarity::equal;
        pre.push_back(l);
      }
      add_action(a, std::move(pre));
    }
    for (const auto& t : prog.triggers) {
      std::vector<FluentLiteral> pre;
      for (const auto& l : t.guard)
        if (l.polarity == Polarity::equal) pre.push_back(l);
      add_action(t.action, std::move(pre));
    }
  }

  static int level_of(const Levels& level, const std::vector<FluentLiteral>& ls) {
    int m = 0;
    for (const auto& l : ls) {
      if (l.polarity != Polarity::equal) continue;
      auto it = level.find({l.term(), l.value});
      if (it == level.end()) return kInfinite;
      m = std::max(m, it->second);
    }
    return m;
  }

  Levels levels(const Valuation& v, const std::set<ActionRef>& blocked = {}) const {
    Levels level;
    for (const auto& [t, x] : v) level[{t, x}] = 0;
    auto improve = [&](const Term& t, const std::string& x, int l) {
      auto [it, fresh] = level.try_emplace({t, x}, l);
      if (fresh) return true;
      if (l < it->second) {
        it->second = l;
        return true;
      }
      return false;
    };
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& a : actions_) {
        if (blocked.contains(a.action)) continue;
        int pre = level_of(level, a.pre);
        if (pre >= kInfinite) continue;
        for (const auto* e : a.effects) {
          int body = level_of(level, e->body);
          if (body >= kInfinite) continue;
          changed |= improve(e->fluent, e->value, std::max(pre, body) + 1);
        }
      }
      for (const auto& s : prog_.statics) {
        int body = level_of(level, s.body);
        if (body < kInfinite) changed |= improve(s.fluent, s.value, body);
      }
    }
    return level;
  }

  // Actions whose relaxed preconditions are reachable.
  std::set<ActionRef> applicable(const Levels& level) const {
    std::set<ActionRef> out;
    for (const auto& a : actions_)
      if (level_of(level, a.pre) < kInfinite) out.insert(a.action);
    return out;
  }

  int operator()(const Valuation& v, const std::set<ActionRef>& blocked = {}) const {
    return level_of(levels(v, blocked), prog_.goal);
  }

private:
  struct Relaxed {
    ActionRef action;
    std::vector<FluentLiteral> pre;
    std::vector<const DiscreteEffect*> effects;
  };
  const CaspProgram& prog_;
  std::vector<Relaxed> actions_;
};

// The ordered agent subsets of `pool` with at most `k` members, smallest first.
inline std::vector<std::vector<std::size_t>> subsets(std::size_t pool, int k) {
  std::vector<std::vector<std::size_t>> out{{}};
  std::vector<std::vector<std::size_t>> layer{{}};
  for (int size = 1; size <= k; ++size) {
    std::vector<std::vector<std::size_t>> next;
    for (const auto& s : layer)
      for (std::size_t i = s.empty() ? 0 : s.back() + 1; i < pool; ++i) {
        auto t = s;
        t.push_back(i);
        next.push_back(std::move(t));
      }
    for (const auto& s : next) out.push_back(s);
    layer = std::move(next);
  }
  return out;
}

}  // namespace detail

// One fixed step of a replayed plan: the actions, and the time they happen
// if it is known in advance (triggered steps are timed by the search).
struct ScriptStep {
  CompoundAction actions;
  std::optional<Rational> time;
};

namespace detail {

// Depth-first search over the translated program: discrete choices are made
// step by step and every timing, regime and trigger constraint is posted to
// an exact linear store, which prunes as soon as it becomes infeasible.
class Search {
public:
  Search(const CaspProgram& prog, const Theory& th, const Instance& inst, const SolveOptions& opts,
         const std::vector<ScriptStep>* script = nullptr)
      : prog_(prog), th_(th), inst_(inst), opts_(opts), script_(script), bound_(prog, opts.disabled) {
    for (std::size_t i = 0; i < prog.processes.size(); ++i) {
      const auto& p = prog.processes[i];
      keys_[p.initial] = {i, 0};
      keys_[p.time] = {i, 1};
      keys_[p.final] = {i, 2};
    }
    for (const auto& d : prog.cspvars) ranges_[d.var] = {d.lo, d.hi};
    // A dormant process's time anchor only matters if some action can wake
    // one of its regimes without restarting it.
    for (const auto& d : prog.denials)
      if (d.numeric && d.actions.size() == 1 && d.body.empty()) numeric_denials_.push_back(&d);
    anchor_matters_.assign(prog.processes.size(), false);
    for (const auto& m : prog.modes)
      for (const auto& e : prog.effects) {
        if (e.fluent != m.guard || e.value != "true") continue;
        bool restarts = std::any_of(prog.process_effects.begin(), prog.process_effects.end(), [&](const ProcessEffect& pe) {
          return pe.action == e.action && pe.process == m.process && pe.body.empty();
        });
        if (!restarts) anchor_matters_[m.process] = true;
      }
    for (const auto& a : prog.generated)
      if (!opts.disabled.contains(a)) agents_.push_back(a);
    int steps = script ? static_cast<int>(script->size()) : prog.n;
    if (steps > prog.n) throw Error("plan is longer than the horizon");
    horizon_ = steps;
  }

  std::atomic<bool>* stop = nullptr;
  int agent_budget = std::numeric_limits<int>::max();
  bool budget_hit = false;  // some branch was cut by agent_budget
  SolveStats stats;

  struct Node {
    int k = 0;
    Valuation values;
    std::vector<LinExpr> init, time;
    LraStore store;
    std::vector<CompoundAction> history;
    int agent_actions = 0;
    int goal_k = -1;  // first visited state satisfying the goal, its start bound already posted
  };

  Node root() const {
    Node n;
    Valuation v;
    for (const auto& [t, x] : prog_.initial_values) v[t] = x;
    auto closed = close_statics(v, prog_.statics, {});
    if (!closed || *closed != v) throw ContradictionError("initial state is not closed under the state constraints");
    n.values = std::move(*closed);
    std::vector<std::string> names;
    for (int k = 0; k < horizon_; ++k) names.push_back(kEnd.at(std::to_string(k)));
    n.store = LraStore(names);
    for (const auto& p : prog_.processes) {
      n.init.push_back(LinExpr::value(p.init_value));
      n.time.push_back(LinExpr::value(0));
    }
    if (!script_ && holds_all(n.values, prog_.goal)) {
      n.goal_k = 0;
      if (prog_.goal_before && *prog_.goal_before <= 0) n.store.add(LinExpr::value(0), Relation::gt, LinExpr::value(0));
    }
    return n;
  }

  std::optional<SolveResult> explore(const Node& node, std::vector<Node>* collect = nullptr) {
    if (stop && stop->load()) return std::nullopt;
    if (++stats.nodes > opts_.node_limit) throw ResourceLimitError("node limit of " + std::to_string(opts_.node_limit) + " reached");
    if (accepting(node))
      if (auto r = accept(node)) return r;
    if (node.k >= horizon_) return std::nullopt;
    if (!script_) {
      auto level = bound_.levels(node.values);
      auto blocked = exhausted(node, level);
      int h = node.goal_k >= 0 ? 0 : blocked.empty() ? StepBound::level_of(level, prog_.goal) : bound_(node.values, blocked);
      if (h > horizon_ - node.k) return std::nullopt;
    }

    std::vector<std::size_t> active;
    for (std::size_t m = 0; m < prog_.modes.size(); ++m)
      if (guard_on(node.values, prog_.modes[m].guard)) active.push_back(m);
    // With every process dormant the state could have lasted longer instead:
    // repeating an ancestor's situation only wastes steps.
    std::optional<PathKey> key;
    if (!script_ && active.empty()) {
      key = path_key(node);
      if (std::find(path_.begin(), path_.end(), *key) != path_.end()) {
        ++stats.backtracks;
        return std::nullopt;
      }
      path_.push_back(*key);
    }
    struct Pop {
      std::vector<PathKey>* path;
      bool on;
      ~Pop() {
        if (on) path->pop_back();
      }
    } pop{&path_, key.has_value()};

    LraStore store = node.store;
    LinExpr end = LinExpr::var(node.k);
    add_range(store, kEnd, end);
    add_range(store, kStart, end);  // the next state's start
    store.add(end, Relation::ge, start_of(node.k));
    if (script_ && (*script_)[static_cast<std::size_t>(node.k)].time)
      store.add(end, Relation::eq, LinExpr::value(*(*script_)[static_cast<std::size_t>(node.k)].time));
    for (std::size_t i = 0; i < prog_.processes.size(); ++i) {
      add_range(store, prog_.processes[i].initial, node.init[i]);
      add_range(store, prog_.processes[i].time, node.time[i]);
    }
    std::vector<std::optional<LinExpr>> finals(prog_.processes.size());
    return branch_modes(node, active, 0, finals, store, collect);
  }

private:
  struct PathKey {
    Valuation values;
    std::vector<LinExpr> processes;
    bool goal_seen = false;
    friend bool operator==(const PathKey&, const PathKey&) = default;
  };

  PathKey path_key(const Node& node) const {
    PathKey k{node.values, {}, node.goal_k >= 0};
    for (std::size_t i = 0; i < prog_.processes.size(); ++i) {
      k.processes.push_back(node.init[i]);
      if (anchor_matters_[i]) k.processes.push_back(node.time[i]);
    }
    return k;
  }

  // Agent actions that can never again meet a numeric requirement because
  // the processes it depends on can only move away from it (fuel that cannot
  // be topped up, say).
  std::set<ActionRef> exhausted(const Node& node, const StepBound::Levels& level) {
    std::set<ActionRef> out;
    if (numeric_denials_.empty()) return out;
    auto usable = bound_.applicable(level);
    // direction[i]: 2 constant, 1 never decreases, -1 never increases, 0 either.
    std::vector<int> direction(prog_.processes.size(), 2);
    for (const auto& m : prog_.modes) {
      if (m.rate == 0 || !level.contains({m.guard, "true"})) continue;
      int d = m.rate > 0 ? 1 : -1;
      int& slot = direction[m.process];
      slot = slot == 2 || slot == d ? d : 0;
    }
    for (const auto& e : prog_.process_effects)
      if (usable.contains(e.action) && e.base != StepLin::var(prog_.processes[e.process].final)) direction[e.process] = 0;
    for (const Denial* d : numeric_denials_) {
      const auto& req = *d->numeric;
      StepLin diff;
      if (req.rel == Relation::ge || req.rel == Relation::gt) diff = req.lhs - req.rhs;
      else if (req.rel == Relation::le || req.rel == Relation::lt) diff = req.rhs - req.lhs;
      else continue;
      LinExpr now = LinExpr::value(diff.constant);
      bool monotone = true;
      for (const auto& [key, c] : diff.coef) {
        auto it = keys_.find(key);
        if (it == keys_.end() || it->second.second == 1) {
          monotone = false;
          break;
        }
        std::size_t i = it->second.first;
        int dir = direction[i];
        if (dir == 0 || (c > 0 && dir == 1) || (c < 0 && dir == -1)) {
          monotone = false;
          break;
        }
        now += node.init[i] * c;
      }
      if (!monotone) continue;
      bool strict = req.rel == Relation::gt || req.rel == Relation::lt;
      bool possible;
      if (now.is_constant()) possible = strict ? now.constant > 0 : now.constant >= 0;
      else {
        LraStore s = node.store;
        s.add(now, strict ? Relation::gt : Relation::ge, LinExpr::value(0));
        possible = feasible(s);
      }
      if (!possible) out.insert(d->actions[0]);
    }
    return out;
  }

  LinExpr start_of(int k) const { return k == 0 ? LinExpr::value(0) : LinExpr::var(k - 1); }

  void add_range(LraStore& store, const VarKey& family, const LinExpr& e) const {
    auto it = ranges_.find(family);
    if (it == ranges_.end()) return;
    if (e.is_constant()) {
      if (e.constant < it->second.first || e.constant > it->second.second) store.add(LinExpr::value(0), Relation::gt, LinExpr::value(0));
      return;
    }
    store.add(e, Relation::ge, LinExpr::value(it->second.first));
    store.add(e, Relation::le, LinExpr::value(it->second.second));
  }

  bool feasible(const LraStore& store) {
    LraStats s;
    bool ok = store.feasible(&s);
    stats.lra_checks += s.checks;
    stats.eliminations += s.eliminations;
    if (!ok) ++stats.backtracks;
    return ok;
  }

  LinExpr line(const Node& node, const Mode& m) const {
    return node.init[m.process] + (LinExpr::var(node.k) - node.time[m.process]) * m.rate;
  }

  LinExpr eval(const StepLin& s, const Node& node, const std::vector<std::optional<LinExpr>>& finals) const {
    LinExpr out = LinExpr::value(s.constant);
    for (const auto& [key, c] : s.coef) {
      LinExpr term;
      if (key == kStart) term = start_of(node.k);
      else if (key == kEnd) term = LinExpr::var(node.k);
      else {
        auto it = keys_.find(key);
        if (it == keys_.end()) throw Error("internal: unknown constraint variable " + key.at("I"));
        auto [i, which] = it->second;
        term = which == 0 ? node.init[i] : which == 1 ? node.time[i] : finals[i].value_or(node.init[i]);
      }
      out += term * c;
    }
    return out;
  }

  bool accepting(const Node& node) const {
    if (script_) return node.k == horizon_;
    return node.goal_k >= 0;
  }

  std::optional<SolveResult> branch_modes(const Node& node, const std::vector<std::size_t>& active, std::size_t at,
                                          std::vector<std::optional<LinExpr>>& finals, const LraStore& store,
                                          std::vector<Node>* collect) {
    if (at == active.size()) {
      LraStore s = store;
      for (std::size_t i = 0; i < finals.size(); ++i) {
        if (!finals[i]) continue;
        add_range(s, prog_.processes[i].final, *finals[i]);
      }
      if (!feasible(s)) return std::nullopt;
      std::vector<std::size_t> live;
      for (std::size_t t = 0; t < prog_.triggers.size(); ++t)
        if (holds_all(node.values, prog_.triggers[t].guard)) live.push_back(t);
      std::set<ActionRef> fired;
      return branch_triggers(node, live, 0, finals, s, fired, collect);
    }
    const Mode& m = prog_.modes[active[at]];
    LinExpr lin = line(node, m);
    struct Case {
      LinExpr value;
      std::vector<LinConstraint> side;
    };
    std::vector<Case> cases;
    Case free{lin, {}};
    if (m.floor) free.side.push_back(relate(lin, Relation::ge, LinExpr::value(*m.floor)));
    if (m.ceiling) free.side.push_back(relate(lin, Relation::le, LinExpr::value(*m.ceiling)));
    cases.push_back(free);
    if (m.floor) cases.push_back({LinExpr::value(*m.floor), {relate(lin, Relation::le, LinExpr::value(*m.floor))}});
    if (m.ceiling) cases.push_back({LinExpr::value(*m.ceiling), {relate(lin, Relation::ge, LinExpr::value(*m.ceiling))}});
    for (const auto& c : cases) {
      LraStore s = store;
      for (const auto& q : c.side) s.add(q);
      auto saved = finals[m.process];
      if (saved) s.add(*saved, Relation::eq, c.value);
      else finals[m.process] = c.value;
      auto r = branch_modes(node, active, at + 1, finals, s, collect);
      finals[m.process] = saved;
      if (r) return r;
    }
    return std::nullopt;
  }

  // A live trigger either fires exactly at the end of the state, is still
  // ahead of the process, or lies behind it. In the last case it holds from
  // the start on when the process sits clamped at the target, which forces a
  // zero-length state.
  std::optional<SolveResult> branch_triggers(const Node& node, const std::vector<std::size_t>& live, std::size_t at,
                                             const std::vector<std::optional<LinExpr>>& finals, const LraStore& store,
                                             std::set<ActionRef>& fired, std::vector<Node>* collect) {
    if (at == live.size()) return branch_actions(node, finals, store, fired, collect);
    const TriggerEncoding& t = prog_.triggers[live[at]];
    const Mode& m = prog_.modes[t.mode];
    auto next = [&](const LraStore& s, bool fires) -> std::optional<SolveResult> {
      if (!feasible(s)) return std::nullopt;
      bool fresh = fires && fired.insert(t.action).second;
      auto r = branch_triggers(node, live, at + 1, finals, s, fired, collect);
      if (fresh) fired.erase(t.action);
      return r;
    };
    if ((m.floor && t.target < *m.floor) || (m.ceiling && t.target > *m.ceiling))
      return branch_triggers(node, live, at + 1, finals, store, fired, collect);
    LinExpr end = LinExpr::var(node.k);
    LinExpr start = start_of(node.k);
    LinExpr target = LinExpr::value(t.target);
    const LinExpr& init = node.init[t.process];
    if (m.rate == 0) {
      LraStore on = store;
      on.add(init, Relation::eq, target);
      on.add(end, Relation::eq, start);
      if (auto r = next(on, true)) return r;
      for (Relation rel : {Relation::lt, Relation::gt}) {
        LraStore off = store;
        off.add(init, rel, target);
        if (auto r = next(off, false)) return r;
      }
      return std::nullopt;
    }
    LinExpr root = node.time[t.process] + (target - init) * Rational(1 / m.rate);
    LraStore p = store;
    p.add(end, Relation::eq, root);
    if (auto r = next(p, true)) return r;
    LraStore q = store;
    q.add(end, Relation::lt, root);
    if (auto r = next(q, false)) return r;
    bool saturated = m.rate > 0 ? m.ceiling && *m.ceiling == t.target : m.floor && *m.floor == t.target;
    LraStore behind = store;
    behind.add(root, Relation::lt, start);
    if (saturated) behind.add(end, Relation::eq, start);
    return next(behind, saturated);
  }

  bool denied_outright(const Valuation& v, const ActionRef& a) const {
    for (const auto& d : prog_.denials)
      if (!d.numeric && d.actions.size() == 1 && d.actions[0] == a && holds_all(v, d.body)) return true;
    return false;
  }

  std::optional<SolveResult> branch_actions(const Node& node, const std::vector<std::optional<LinExpr>>& finals,
                                            const LraStore& store, const std::set<ActionRef>& fired,
                                            std::vector<Node>* collect) {
    std::vector<ActionRef> pool;
    std::vector<std::vector<std::size_t>> choices;
    if (script_) {
      const auto& want = (*script_)[static_cast<std::size_t>(node.k)].actions;
      std::set<ActionRef> wanted(want.begin(), want.end());
      for (const auto& a : fired)
        if (!wanted.contains(a)) return std::nullopt;
      std::vector<std::size_t> pick;
      for (const auto& a : wanted) {
        if (fired.contains(a)) continue;
        if (std::find(agents_.begin(), agents_.end(), a) == agents_.end()) return std::nullopt;
        pick.push_back(pool.size());
        pool.push_back(a);
      }
      choices.push_back(pick);
    } else {
      for (const auto& a : agents_)
        if (!denied_outright(node.values, a)) pool.push_back(a);
      choices = subsets(pool.size(), prog_.max_concurrent);
    }

    LinExpr end = LinExpr::var(node.k);
    for (const auto& choice : choices) {
      std::set<ActionRef> compound = fired;
      for (std::size_t i : choice) compound.insert(pool[i]);
      if (compound.empty()) continue;
      if (node.agent_actions + static_cast<int>(choice.size()) > agent_budget) {
        budget_hit = true;
        continue;
      }
      auto occurs = [&](const ActionRef& a) { return compound.contains(a); };

      LraStore s = store;
      bool ok = true;
      for (const auto& d : prog_.denials) {
        if (!std::all_of(d.actions.begin(), d.actions.end(), occurs) || !holds_all(node.values, d.body)) continue;
        if (!d.numeric) {
          ok = false;
          break;
        }
        s.add(eval(d.numeric->lhs, node, finals), d.numeric->rel, eval(d.numeric->rhs, node, finals));
      }
      if (!ok) continue;
      if (!choice.empty() && prog_.deadline) s.add(end, Relation::lt, LinExpr::value(*prog_.deadline));

      Valuation pinned;
      for (const auto& e : prog_.effects) {
        if (!occurs(e.action) || !holds_all(node.values, e.body)) continue;
        auto [it, fresh] = pinned.emplace(e.fluent, e.value);
        if (!fresh && it->second != e.value) {
          ok = false;
          break;
        }
      }
      if (!ok) continue;
      Valuation next = node.values;
      for (const auto& [f, x] : pinned) next[f] = x;
      auto closed = close_statics(std::move(next), prog_.statics, pinned);
      if (!closed) continue;

      Node child;
      child.k = node.k + 1;
      child.values = std::move(*closed);
      child.init = node.init;
      child.time = node.time;
      std::vector<bool> affected(prog_.processes.size(), false);
      for (const auto& e : prog_.process_effects) {
        if (!occurs(e.action) || !holds_all(node.values, e.body)) continue;
        LinExpr value = eval(e.base, node, finals);
        if (affected[e.process]) {
          s.add(child.init[e.process], Relation::eq, value);
        } else {
          affected[e.process] = true;
          child.init[e.process] = value;
          child.time[e.process] = end;
        }
      }
      child.goal_k = node.goal_k;
      if (!script_ && child.goal_k < 0 && holds_all(child.values, prog_.goal)) {
        child.goal_k = child.k;
        if (prog_.goal_before) s.add(end, Relation::lt, LinExpr::value(*prog_.goal_before));
      }
      if (!feasible(s)) continue;
      child.store = std::move(s);
      child.agent_actions = node.agent_actions + static_cast<int>(choice.size());
      child.history = node.history;
      child.history.emplace_back(compound.begin(), compound.end());
      if (collect) {
        collect->push_back(std::move(child));
        continue;
      }
      if (auto r = explore(child)) return r;
    }
    return std::nullopt;
  }

  std::optional<SolveResult> accept(const Node& node) {
    LraStore base = node.store;
    LinExpr start = start_of(node.k);
    for (std::size_t i = 0; i < prog_.processes.size(); ++i) {
      add_range(base, prog_.processes[i].initial, node.init[i]);
      add_range(base, prog_.processes[i].time, node.time[i]);
    }
    // The final state lasts forever, so no live trigger may ever fire in it.
    std::vector<std::vector<LinConstraint>> splits;
    for (const auto& t : prog_.triggers) {
      if (!holds_all(node.values, t.guard)) continue;
      const Mode& m = prog_.modes[t.mode];
      if ((m.floor && t.target < *m.floor) || (m.ceiling && t.target > *m.ceiling)) continue;
      LinExpr v = node.init[t.process] + (start - node.time[t.process]) * m.rate;
      LinExpr target = LinExpr::value(t.target);
      if (m.rate > 0) {
        if (m.ceiling && *m.ceiling == t.target) return std::nullopt;
        base.add(v, Relation::gt, target);
      } else if (m.rate < 0) {
        if (m.floor && *m.floor == t.target) return std::nullopt;
        base.add(v, Relation::lt, target);
      } else {
        splits.push_back({relate(v, Relation::lt, target), relate(v, Relation::gt, target)});
      }
    }
    std::size_t combos = std::size_t{1} << splits.size();
    for (std::size_t mask = 0; mask < combos; ++mask) {
      LraStore s = base;
      for (std::size_t i = 0; i < splits.size(); ++i) s.add(splits[i][(mask >> i) & 1]);
      LraStats ls;
      auto x = s.model(&ls);
      stats.lra_checks += ls.checks;
      stats.eliminations += ls.eliminations;
      if (!x) continue;
      SolveResult r;
      r.status = SolveStatus::sat;
      for (int j = 0; j < node.k; ++j)
        r.plan.push_back(TimedStep{(*x)[static_cast<std::size_t>(j)], node.history[static_cast<std::size_t>(j)]});
      r.goal_step = script_ ? node.k : node.goal_k;
      r.goal_start = r.goal_step == 0 ? Rational(0) : (*x)[static_cast<std::size_t>(r.goal_step - 1)];
      ++stats.validations;
      r.verdict = validate_trajectory(th_, inst_, r.plan);
      if (!script_ && !r.verdict) {
        ++stats.rejected_by_validator;
        continue;
      }
      return r;
    }
    return std::nullopt;
  }

  const CaspProgram& prog_;
  const Theory& th_;
  const Instance& inst_;
  const SolveOptions& opts_;
  const std::vector<ScriptStep>* script_;
  StepBound bound_;
  int horizon_ = 0;
  std::map<VarKey, std::pair<std::size_t, int>> keys_;
  std::map<VarKey, std::pair<Rational, Rational>> ranges_;
  std::vector<ActionRef> agents_;
  std::vector<bool> anchor_matters_;
  std::vector<const Denial*> numeric_denials_;
  std::vector<PathKey> path_;
};

}  // namespace detail

// Searches for a plan of at most prog.n steps. With several threads and
// deterministic mode off, the first-step alternatives are shared out between
// workers and the first plan found wins; the node limit applies per worker.
inline SolveResult solve(const CaspProgram& prog, const Theory& th, const Instance& inst, const SolveOptions& opts = {}) {
  SolveResult out;
  if (opts.deterministic || opts.threads <= 1) {
    int limit = prog.n * prog.max_concurrent;
    for (int budget = opts.fewest_actions ? 0 : limit;; ++budget) {
      detail::Search search(prog, th, inst, opts);
      search.agent_budget = budget;
      try {
        auto r = search.explore(search.root());
        out.stats += search.stats;
        if (r) {
          SolveStats total = out.stats;
          out = std::move(*r);
          out.stats = total;
          return out;
        }
      } catch (const ResourceLimitError&) {
        out.stats += search.stats;
        out.status = SolveStatus::resource_limit;
        return out;
      }
      if (!search.budget_hit || budget >= limit) return out;
    }
  }

  detail::Search seed(prog, th, inst, opts);
  std::vector<detail::Search::Node> children;
  auto root = seed.root();
  try {
    if (auto r = seed.explore(root, &children)) {
      r->stats = seed.stats;
      return *r;
    }
  } catch (const ResourceLimitError&) {
    out.status = SolveStatus::resource_limit;
    out.stats = seed.stats;
    return out;
  }

  std::atomic<bool> stop{false};
  std::atomic<std::size_t> next{0};
  std::mutex lock;
  std::optional<SolveResult> found;
  bool limited = false;
  SolveStats total = seed.stats;
  auto worker = [&] {
    detail::Search search(prog, th, inst, opts);
    search.stop = &stop;
    bool hit_limit = false;
    std::optional<SolveResult> mine;
    try {
      for (std::size_t i; !stop && (i = next++) < children.size();)
        if ((mine = search.explore(children[i]))) {
          stop = true;
          break;
        }
    } catch (const ResourceLimitError&) {
      hit_limit = true;
    }
    std::lock_guard<std::mutex> g(lock);
    total += search.stats;
    limited |= hit_limit;
    if (mine && !found) found = std::move(mine);
  };
  std::vector<std::thread> pool;
  for (int t = 0; t < opts.threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (found) out = std::move(*found);
  else if (limited) out.status = SolveStatus::resource_limit;
  out.stats = total;
  return out;
}

// Replays a fixed action sequence, timing the steps whose time is not given
// (those driven by triggers). status is unsat when no timing exists; the
// validator's verdict on the timed plan is reported alongside.
inline SolveResult schedule(const CaspProgram& prog, const Theory& th, const Instance& inst,
                            const std::vector<ScriptStep>& script) {
  SolveOptions opts;
  detail::Search search(prog, th, inst, opts, &script);
  SolveResult out;
  if (auto r = search.explore(search.root())) out = std::move(*r);
  out.stats = search.stats;
  return out;
}

}  // namespace hydraplan
