// Random micro-domains: the solver's verdict must match a brute-force
// enumeration of action sequences, regime cases and trigger cases whose
// linear systems are decided by a separate Fourier-Motzkin routine.

#include "hydraplan/solver.hpp"
#include "hydraplan/translator.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <random>
#include <set>
#include <tuple>
#include <sstream>

using namespace hydraplan;
using namespace hydraplan::test;

namespace {

// ---- linear forms over the step end times t_0 .. t_{n-1}

struct Lin {
  std::vector<Rational> a;
  Rational c = 0;
};

Lin konst(int n, Rational c) { return Lin{std::vector<Rational>(static_cast<std::size_t>(n), Rational(0)), c}; }
Lin tvar(int n, int k) {
  Lin l = konst(n, 0);
  l.a[static_cast<std::size_t>(k)] = 1;
  return l;
}
Lin operator+(Lin x, const Lin& y) {
  for (std::size_t i = 0; i < x.a.size(); ++i) x.a[i] += y.a[i];
  x.c += y.c;
  return x;
}
Lin operator*(Lin x, const Rational& k) {
  for (auto& v : x.a) v *= k;
  x.c *= k;
  return x;
}
Lin operator-(const Lin& x, const Lin& y) { return x + y * Rational(-1); }

struct Ineq {
  std::vector<Rational> a;
  Rational c;
  bool strict;
  bool operator<(const Ineq& o) const { return std::tie(a, c, strict) < std::tie(o.a, o.c, o.strict); }
};

enum class Rel { lt, le, eq, ge, gt };

struct Sys {
  std::vector<Ineq> rows;
  void add(const Lin& x, Rel r, const Lin& y) {
    Lin d = x - y;  // d r 0
    switch (r) {
      case Rel::ge: rows.push_back({d.a, d.c, false}); break;
      case Rel::gt: rows.push_back({d.a, d.c, true}); break;
      case Rel::le: d = d * Rational(-1); rows.push_back({d.a, d.c, false}); break;
      case Rel::lt: d = d * Rational(-1); rows.push_back({d.a, d.c, true}); break;
      case Rel::eq:
        rows.push_back({d.a, d.c, false});
        d = d * Rational(-1);
        rows.push_back({d.a, d.c, false});
        break;
    }
  }
};

Ineq normalized(Ineq r) {
  Rational m = 0;
  for (const auto& v : r.a) m = std::max(m, Rational(abs(v)));
  if (m != 0) {
    for (auto& v : r.a) v /= m;
    r.c /= m;
  }
  return r;
}

// rows read a.t + c >= 0 (> 0 when strict)
bool fm_feasible(std::vector<Ineq> rows, std::size_t nv) {
  for (std::size_t v = 0; v < nv; ++v) {
    std::vector<Ineq> pos, neg;
    std::set<Ineq> rest;
    for (auto& r : rows) {
      if (r.a[v] > 0) pos.push_back(r);
      else if (r.a[v] < 0) neg.push_back(r);
      else rest.insert(normalized(r));
    }
    for (const auto& p : pos)
      for (const auto& q : neg) {
        Rational wp = -q.a[v], wq = p.a[v];
        Ineq s{std::vector<Rational>(nv, Rational(0)), p.c * wp + q.c * wq, p.strict || q.strict};
        for (std::size_t i = 0; i < nv; ++i) s.a[i] = p.a[i] * wp + q.a[i] * wq;
        s.a[v] = 0;
        rest.insert(normalized(s));
      }
    rows.assign(rest.begin(), rest.end());
  }
  for (const auto& r : rows)
    if (r.strict ? !(r.c > 0) : !(r.c >= 0)) return false;
  return true;
}

bool feasible(const Sys& s, int n) { return fm_feasible(s.rows, static_cast<std::size_t>(n)); }

// ---- family A: two booleans, agent actions only

struct Lit {
  int fluent;  // 0 = f, 1 = g
  bool value;
};
const char* fname(int i) { return i == 0 ? "f" : "g"; }
std::string lit_text(Lit l) { return (l.value ? "" : "-") + std::string(fname(l.fluent)); }

struct Effect {
  Lit head;
  std::optional<Lit> cond;
};

struct Discrete {
  int actions = 2;
  std::vector<std::vector<Effect>> effects;
  std::vector<std::pair<int, Lit>> denials;
  std::optional<std::pair<Lit, Lit>> rule;  // head if body
  std::array<bool, 2> init{};
  std::vector<Lit> goal;
};

// ---- family B: a guard `on` and a clamped process x on [0, 20]

struct Process {
  bool up = true;
  int rate = 1;
  int bound = 12;  // ceiling when rising, floor when falling
  int x0 = 3;
  std::optional<int> target;
  bool stop = false;
  bool go_once = true;
  std::optional<std::pair<Rel, int>> go_denied, stop_denied;  // impossible if x(end) rel K
  bool goal_on = true;
};

struct Micro {
  bool process = false;
  Discrete d;
  Process p;
  int horizon = 2;
  int concurrency = 1;
  int limit = 100;
  std::optional<int> deadline, before;
};

const char* rel_text(Rel r) {
  switch (r) {
    case Rel::lt: return "<";
    case Rel::le: return "<=";
    case Rel::eq: return "=";
    case Rel::ge: return ">=";
    case Rel::gt: return ">";
  }
  return "?";
}

Rel negated(Rel r) {
  switch (r) {
    case Rel::lt: return Rel::ge;
    case Rel::le: return Rel::gt;
    case Rel::ge: return Rel::lt;
    case Rel::gt: return Rel::le;
    case Rel::eq: break;
  }
  throw std::logic_error("no single negation");
}

std::string description(const Micro& m) {
  std::ostringstream o;
  if (!m.process) {
    const auto& d = m.d;
    o << "fluent f : bool.\nfluent g : bool.\n";
    for (int i = 0; i < d.actions; ++i) o << "action a" << i << " : agent.\n";
    for (int i = 0; i < d.actions; ++i)
      for (const auto& e : d.effects[static_cast<std::size_t>(i)]) {
        o << "a" << i << " causes " << lit_text(e.head);
        if (e.cond) o << " if " << lit_text(*e.cond);
        o << ".\n";
      }
    for (const auto& [i, l] : d.denials) o << "impossible a" << i << " if " << lit_text(l) << ".\n";
    if (d.rule) o << lit_text(d.rule->first) << " if " << lit_text(d.rule->second) << ".\n";
    return o.str();
  }
  const auto& p = m.p;
  o << "fluent on : bool.\nprocess x : [0, 20].\naction go : agent.\n";
  if (p.target) o << "action halt : exogenous.\n";
  if (p.stop) o << "action stop : agent.\n";
  o << "go causes on.\n";
  if (p.up) o << "go causes x = min(" << p.bound << ", X + " << p.rate << " * (T - T0)) if x(end) = X, end = T0.\n";
  else o << "go causes x = max(" << p.bound << ", X - " << p.rate << " * (T - T0)) if x(end) = X, end = T0.\n";
  if (p.go_once) o << "impossible go if on.\n";
  if (p.go_denied) o << "impossible go if x(end) = X, X " << rel_text(p.go_denied->first) << " " << p.go_denied->second << ".\n";
  if (p.target) {
    o << "x(end) = " << *p.target << ", on triggers halt.\n";
    o << "halt causes -on.\nhalt causes x = X if x(end) = X.\n";
  }
  if (p.stop) {
    o << "stop causes -on.\nstop causes x = X if x(end) = X.\nimpossible stop if -on.\n";
    if (p.stop_denied)
      o << "impossible stop if x(end) = X, X " << rel_text(p.stop_denied->first) << " " << p.stop_denied->second << ".\n";
  }
  return o.str();
}

std::string instance(const Micro& m) {
  std::ostringstream o;
  if (!m.process) {
    for (int i = 0; i < 2; ++i) o << "init " << (m.d.init[static_cast<std::size_t>(i)] ? "" : "-") << fname(i) << ".\n";
    o << "goal ";
    for (std::size_t i = 0; i < m.d.goal.size(); ++i) o << (i ? ", " : "") << lit_text(m.d.goal[i]);
  } else {
    o << "init -on.\ninit x = " << m.p.x0 << ".\ngoal " << (m.p.goal_on ? "on" : "-on");
  }
  if (m.before) o << " before " << *m.before;
  o << ".\nhorizon " << m.horizon << ".\nconcurrency " << m.concurrency << ".\n";
  if (m.deadline) o << "deadline " << *m.deadline << ".\n";
  o << "bounds end 0 " << m.limit << ".\n";
  return o.str();
}

// ---- the enumeration

class Oracle {
 public:
  explicit Oracle(const Micro& m) : m_(m), n_(m.horizon) {}

  bool sat() {
    Node root;
    root.sys.add(konst(n_, 0), Rel::ge, konst(n_, 0));
    if (!m_.process) {
      root.bits = m_.d.init;
    } else {
      root.x = Fn{konst(n_, m_.p.x0), konst(n_, 0), 0};
    }
    if (goal_here(root)) {
      Node claimed = root;
      claimed.goal_seen = true;
      if (m_.before) claimed.sys.add(konst(n_, 0), Rel::lt, konst(n_, *m_.before));
      if (visit(claimed, 0)) return true;
    }
    return visit(root, 0);
  }

 private:
  struct Fn {
    Lin base, anchor;
    int rate;  // signed; 0 when constant
  };
  struct Node {
    Sys sys;
    std::array<bool, 2> bits{};  // f, g or on
    Fn x;
    bool goal_seen = false;
  };

  Lin start_of(int k) const { return k == 0 ? konst(n_, 0) : tvar(n_, k - 1); }

  bool goal_here(const Node& s) const {
    if (m_.process) return s.bits[0] == m_.p.goal_on;
    for (const auto& l : m_.d.goal)
      if (s.bits[static_cast<std::size_t>(l.fluent)] != l.value) return false;
    return true;
  }

  // value of x at time tau, one entry per regime case
  std::vector<std::pair<Lin, Sys>> value_at(const Fn& fn, const Lin& tau) const {
    if (fn.rate == 0) return {{fn.base, Sys{}}};
    Lin line = fn.base + (tau - fn.anchor) * Rational(fn.rate);
    Lin b = konst(n_, m_.p.bound);
    Sys free, clamped;
    free.add(line, fn.rate > 0 ? Rel::le : Rel::ge, b);
    clamped.add(line, fn.rate > 0 ? Rel::ge : Rel::le, b);
    return {{line, free}, {b, clamped}};
  }

  static Sys joined(Sys a, const Sys& b) {
    a.rows.insert(a.rows.end(), b.rows.begin(), b.rows.end());
    return a;
  }

  bool visit(Node s, int k) {
    if (!feasible(s.sys, n_)) return false;
    // the state may be the last one
    if (s.goal_seen && quiescent(s, k)) return true;
    if (k == n_) return false;
    return m_.process ? step_process(s, k) : step_discrete(s, k);
  }

  // enter state k+1 with the goal optionally claimed
  bool enter(Node next, int k) {
    Lin start = tvar(n_, k);
    if (!next.goal_seen && goal_here(next)) {
      Node claimed = next;
      claimed.goal_seen = true;
      if (m_.before) claimed.sys.add(start, Rel::lt, konst(n_, *m_.before));
      if (visit(claimed, k + 1)) return true;
    }
    return visit(std::move(next), k + 1);
  }

  bool quiescent(const Node& s, int k) {
    if (!m_.process || !m_.p.target || !s.bits[0]) return feasible(s.sys, n_);
    int c = *m_.p.target;
    Lin cl = konst(n_, c);
    for (auto& [v, cs] : value_at(s.x, start_of(k))) {
      Sys base = joined(s.sys, cs);
      std::vector<Sys> ok;
      if (s.x.rate == 0) {
        ok.push_back(base), ok.back().add(v, Rel::lt, cl);
        ok.push_back(base), ok.back().add(v, Rel::gt, cl);
      } else {
        bool up = s.x.rate > 0;
        ok.push_back(base), ok.back().add(cl, up ? Rel::lt : Rel::gt, v);  // already past
        if (up ? c > m_.p.bound : c < m_.p.bound) ok.push_back(base);      // never reachable
      }
      for (const auto& o : ok)
        if (feasible(o, n_)) return true;
    }
    return false;
  }

  std::vector<std::vector<int>> agent_choices(int actions) const {
    std::vector<std::vector<int>> out;
    for (int mask = 0; mask < (1 << actions); ++mask) {
      std::vector<int> c;
      for (int i = 0; i < actions; ++i)
        if (mask & (1 << i)) c.push_back(i);
      if (static_cast<int>(c.size()) <= m_.concurrency) out.push_back(c);
    }
    return out;
  }

  void common(Sys& sys, int k, bool agents) const {
    Lin end = tvar(n_, k);
    sys.add(end, Rel::ge, start_of(k));
    sys.add(end, Rel::le, konst(n_, m_.limit));
    if (agents && m_.deadline) sys.add(end, Rel::lt, konst(n_, *m_.deadline));
  }

  // fixpoint states s' = Cn(E + (s & s'))
  std::vector<std::array<bool, 2>> successors(const std::array<bool, 2>& s, const std::vector<Lit>& effects) const {
    std::vector<std::array<bool, 2>> out;
    for (int cand = 0; cand < 4; ++cand) {
      std::array<bool, 2> t{(cand & 1) != 0, (cand & 2) != 0};
      std::array<std::optional<bool>, 2> known;
      bool clash = false;
      auto put = [&](Lit l) {
        auto& slot = known[static_cast<std::size_t>(l.fluent)];
        if (slot && *slot != l.value) clash = true;
        slot = l.value;
      };
      for (const auto& e : effects) put(e);
      for (int i = 0; i < 2; ++i)
        if (s[static_cast<std::size_t>(i)] == t[static_cast<std::size_t>(i)]) put(Lit{i, t[static_cast<std::size_t>(i)]});
      for (bool changed = true; changed && !clash;) {
        changed = false;
        if (m_.d.rule) {
          auto [h, b] = *m_.d.rule;
          auto& kb = known[static_cast<std::size_t>(b.fluent)];
          auto& kh = known[static_cast<std::size_t>(h.fluent)];
          if (kb && *kb == b.value && !(kh && *kh == h.value)) {
            if (kh) clash = true;
            kh = h.value;
            changed = true;
          }
        }
      }
      if (clash || !known[0] || !known[1]) continue;
      if (*known[0] == t[0] && *known[1] == t[1]) out.push_back(t);
    }
    return out;
  }

  bool step_discrete(const Node& s, int k) {
    const auto& d = m_.d;
    auto on = [&](Lit l) { return s.bits[static_cast<std::size_t>(l.fluent)] == l.value; };
    for (const auto& choice : agent_choices(d.actions)) {
      if (choice.empty()) continue;
      bool denied = false;
      for (const auto& [a, l] : d.denials)
        if (std::count(choice.begin(), choice.end(), a) && on(l)) denied = true;
      if (denied) continue;
      std::vector<Lit> effects;
      for (int a : choice)
        for (const auto& e : d.effects[static_cast<std::size_t>(a)])
          if (!e.cond || on(*e.cond)) effects.push_back(e.head);
      for (const auto& t : successors(s.bits, effects)) {
        Node next = s;
        next.bits = t;
        common(next.sys, k, true);
        if (enter(std::move(next), k)) return true;
      }
    }
    return false;
  }

  bool step_process(const Node& s, int k) {
    const auto& p = m_.p;
    Lin start = start_of(k), end = tvar(n_, k);
    Lin zero = konst(n_, 0), twenty = konst(n_, 20);
    for (auto& [vs, cs] : value_at(s.x, start))
      for (auto& [ve, ce] : value_at(s.x, end)) {
        Sys base = joined(joined(s.sys, cs), ce);
        for (const Lin* v : {&vs, &ve}) base.add(*v, Rel::ge, zero), base.add(*v, Rel::le, twenty);
        // (fires, extra constraints)
        std::vector<std::pair<bool, Sys>> cases;
        if (!p.target || !s.bits[0]) {
          cases.push_back({false, base});
        } else {
          int c = *p.target;
          Lin cl = konst(n_, c);
          if (s.x.rate == 0) {
            Sys f = base;
            f.add(vs, Rel::eq, cl), f.add(end, Rel::eq, start);
            cases.push_back({true, f});
            Sys lo = base, hi = base;
            lo.add(vs, Rel::lt, cl), hi.add(vs, Rel::gt, cl);
            cases.push_back({false, lo}), cases.push_back({false, hi});
          } else {
            bool up = s.x.rate > 0;
            Rel before = up ? Rel::lt : Rel::gt;
            Sys passed = base, ahead = base;
            passed.add(cl, before, vs);
            ahead.add(ve, before, cl);
            cases.push_back({false, passed}), cases.push_back({false, ahead});
            Sys zero_len = base;
            zero_len.add(end, Rel::eq, start), zero_len.add(vs, Rel::eq, cl);
            cases.push_back({true, zero_len});
            Sys at_end = base;  // first reaches c exactly at the end
            at_end.add(ve, Rel::eq, cl), at_end.add(vs, up ? Rel::le : Rel::ge, cl);
            Lin line = s.x.base + (end - s.x.anchor) * Rational(s.x.rate);
            at_end.add(line, Rel::eq, cl);
            cases.push_back({true, at_end});
          }
        }
        for (auto& [fires, sys] : cases) {
          std::vector<int> agents{-1, 0};  // none, go
          if (p.stop) agents.push_back(1);
          for (int ag : agents) {
            if (ag < 0 && !fires) continue;
            Node next = s;
            next.sys = sys;
            if (ag == 0) {
              if (p.go_once && s.bits[0]) continue;
              if (p.go_denied) next.sys.add(ve, negated(p.go_denied->first), konst(n_, p.go_denied->second));
              if (fires) continue;  // on and -on at once
              next.bits[0] = true;
              next.x = Fn{ve, end, p.up ? p.rate : -p.rate};
            } else {
              if (ag == 1) {
                if (!s.bits[0]) continue;
                if (p.stop_denied) next.sys.add(ve, negated(p.stop_denied->first), konst(n_, p.stop_denied->second));
              }
              next.bits[0] = false;
              next.x = Fn{ve, end, 0};
            }
            common(next.sys, k, ag >= 0);
            if (enter(std::move(next), k)) return true;
          }
        }
      }
    return false;
  }

  const Micro& m_;
  int n_;
};

// ---- generation

Micro random_micro(std::mt19937& rng, bool process) {
  auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
  auto coin = [&](int pct) { return pick(1, 100) <= pct; };
  Micro m;
  m.process = process;
  m.horizon = pick(1, 3);
  m.limit = coin(50) ? 100 : 30;
  if (coin(40)) m.deadline = pick(0, 12);
  if (coin(60)) m.before = pick(0, 12);
  if (!process) {
    auto lit = [&] { return Lit{pick(0, 1), coin(50)}; };
    auto& d = m.d;
    d.actions = pick(2, 3);
    m.concurrency = pick(1, 2);
    d.effects.resize(static_cast<std::size_t>(d.actions));
    for (auto& es : d.effects) {
      int count = pick(1, 2);
      for (int i = 0; i < count; ++i) {
        Effect e{lit(), std::nullopt};
        if (coin(30)) e.cond = lit();
        es.push_back(e);
      }
    }
    int denials = pick(0, 2);
    for (int i = 0; i < denials; ++i) d.denials.push_back({pick(0, d.actions - 1), lit()});
    if (coin(40)) {
      int h = pick(0, 1);
      d.rule = std::pair{Lit{h, coin(50)}, Lit{1 - h, coin(50)}};
    }
    do {
      d.init = {coin(50), coin(50)};
    } while (d.rule && d.init[static_cast<std::size_t>(d.rule->second.fluent)] == d.rule->second.value &&
             d.init[static_cast<std::size_t>(d.rule->first.fluent)] != d.rule->first.value);
    d.goal.push_back(lit());
    if (coin(40)) {
      Lit other = lit();
      if (other.fluent != d.goal[0].fluent) d.goal.push_back(other);
    }
    return m;
  }
  auto& p = m.p;
  p.up = coin(50);
  p.rate = pick(1, 3);
  if (p.up) {
    p.bound = pick(8, 20);
    p.x0 = pick(0, p.bound);
  } else {
    p.bound = pick(0, 10);
    p.x0 = pick(p.bound, 20);
  }
  if (coin(85)) {
    int c = coin(30) ? p.bound : pick(std::max(0, p.x0 - 4), std::min(20, p.x0 + 10));
    if (!p.up) c = coin(30) ? p.bound : pick(std::max(0, p.x0 - 10), std::min(20, p.x0 + 4));
    p.target = c;
  }
  p.stop = coin(50);
  p.go_once = coin(60);
  Rel rels[] = {Rel::lt, Rel::gt, Rel::le, Rel::ge};
  if (coin(30)) p.go_denied = std::pair{rels[pick(0, 3)], pick(0, 20)};
  if (p.stop && coin(40)) p.stop_denied = std::pair{rels[pick(0, 3)], pick(0, 20)};
  p.goal_on = coin(75);
  return m;
}

}  // namespace

TEST(Oracle, FourierMotzkinBasics) {
  Sys s;
  s.add(tvar(1, 0), Rel::gt, konst(1, 3));
  s.add(tvar(1, 0), Rel::le, konst(1, 3));
  EXPECT_FALSE(feasible(s, 1));
  Sys t;
  t.add(tvar(2, 0) + tvar(2, 1), Rel::eq, konst(2, 4));
  t.add(tvar(2, 0), Rel::ge, konst(2, 3));
  t.add(tvar(2, 1), Rel::ge, konst(2, 1));
  EXPECT_TRUE(feasible(t, 2));
  t.add(tvar(2, 1), Rel::gt, konst(2, 1));
  EXPECT_FALSE(feasible(t, 2));
}

TEST(Oracle, SolverAgreesOnRandomMicroDomains) {
  std::mt19937 rng(20240611);
  int sat = 0, unsat = 0;
  for (int i = 0; i < 200; ++i) {
    Micro m = random_micro(rng, i % 2 == 1);
    std::string desc = description(m), inst_text = instance(m);
    SCOPED_TRACE("instance " + std::to_string(i) + "\n" + desc + "--\n" + inst_text);
    auto p = load(desc, inst_text);
    auto prog = translate(p.th, p.inst, p.inst.horizon);
    auto res = solve(prog, p.th, p.inst, {});
    ASSERT_NE(res.status, SolveStatus::resource_limit);
    bool expected = Oracle(m).sat();
    EXPECT_EQ(res.status == SolveStatus::sat, expected) << "solver says " << status_name(res.status);
    if (res.status == SolveStatus::sat) {
      ++sat;
      EXPECT_TRUE(validate_trajectory(p.th, p.inst, res.plan).accepted);
      EXPECT_LE(static_cast<int>(res.plan.size()), m.horizon);
    } else {
      ++unsat;
    }
  }
  EXPECT_GT(sat, 30);
  EXPECT_GT(unsat, 30);
}
