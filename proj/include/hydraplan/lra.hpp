#pragma once

#include "hydraplan/core.hpp"
#include "hydraplan/syntax.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hydraplan {

// sum(coef[v] * x_v) + constant over integer-indexed rational variables.
struct LinExpr {
  std::map<int, Rational> coef;
  Rational constant = 0;

  static LinExpr var(int v, Rational c = 1) {
    LinExpr e;
    if (c != 0) e.coef[v] = std::move(c);
    return e;
  }
  static LinExpr value(Rational c) {
    LinExpr e;
    e.constant = std::move(c);
    return e;
  }

  bool is_constant() const { return coef.empty(); }
  Rational at(int v) const {
    auto it = coef.find(v);
    return it == coef.end() ? Rational(0) : it->second;
  }
  int newest() const { return coef.empty() ? -1 : coef.rbegin()->first; }

  LinExpr& operator+=(const LinExpr& o) {
    for (const auto& [v, c] : o.coef) {
      Rational& slot = coef[v];
      slot += c;
      if (slot == 0) coef.erase(v);
    }
    constant += o.constant;
    return *this;
  }
  LinExpr& operator*=(const Rational& s) {
    if (s == 0) return *this = LinExpr{};
    for (auto& [v, c] : coef) c *= s;
    constant *= s;
    return *this;
  }
  friend LinExpr operator+(LinExpr a, const LinExpr& b) { return a += b; }
  friend LinExpr operator-(LinExpr a, LinExpr b) { return a += (b *= -1); }
  friend LinExpr operator*(LinExpr a, const Rational& s) { return a *= s; }
  friend bool operator==(const LinExpr&, const LinExpr&) = default;

  // Replaces x_v by e.
  LinExpr substituted(int v, const LinExpr& e) const {
    auto it = coef.find(v);
    if (it == coef.end()) return *this;
    Rational c = it->second;
    LinExpr out = *this;
    out.coef.erase(v);
    return out + e * c;
  }

  Rational eval(const std::vector<Rational>& x) const {
    Rational acc = constant;
    for (const auto& [v, c] : coef) acc += c * x[static_cast<std::size_t>(v)];
    return acc;
  }

  std::string str(const std::vector<std::string>& names) const {
    std::string s;
    for (const auto& [v, c] : coef) {
      std::string name = v < static_cast<int>(names.size()) ? names[static_cast<std::size_t>(v)] : "x" + std::to_string(v);
      Rational mag = c < 0 ? Rational(-c) : c;
      s += s.empty() ? (c < 0 ? "-" : "") : (c < 0 ? " - " : " + ");
      if (mag != 1) s += to_string(mag) + "*";
      s += name;
    }
    if (s.empty()) return to_string(constant);
    if (constant > 0) s += " + " + to_string(constant);
    if (constant < 0) s += " - " + to_string(Rational(-constant));
    return s;
  }
};

enum class Cmp { eq, ge, gt };  // expr == 0, expr >= 0, expr > 0

struct LinConstraint {
  LinExpr expr;
  Cmp cmp = Cmp::ge;

  bool holds(const std::vector<Rational>& x) const {
    Rational v = expr.eval(x);
    return cmp == Cmp::eq ? v == 0 : cmp == Cmp::ge ? v >= 0 : v > 0;
  }
  std::string str(const std::vector<std::string>& names) const {
    return expr.str(names) + (cmp == Cmp::eq ? " = 0" : cmp == Cmp::ge ? " >= 0" : " > 0");
  }
};

// lhs rel rhs as a normalized constraint. Disequalities are not linear
// constraints and must be case-split by the caller.
inline LinConstraint relate(const LinExpr& lhs, Relation rel, const LinExpr& rhs) {
  switch (rel) {
    case Relation::eq: return {lhs - rhs, Cmp::eq};
    case Relation::ge: return {lhs - rhs, Cmp::ge};
    case Relation::gt: return {lhs - rhs, Cmp::gt};
    case Relation::le: return {rhs - lhs, Cmp::ge};
    case Relation::lt: return {rhs - lhs, Cmp::gt};
    case Relation::ne: break;
  }
  throw UnsupportedExpressionError("disequality is not a linear constraint");
}

namespace detail {

// One inequality over free variables, scaled so its first coefficient is +-1.
struct Bound {
  std::map<int, Rational> coef;
  Rational constant;
  bool strict = false;
};

inline std::optional<Bound> normalize(LinExpr e, bool strict) {
  if (e.coef.empty()) {
    if (e.constant > 0 || (e.constant == 0 && !strict)) return std::nullopt;  // tautology
    return Bound{{}, e.constant, strict};
  }
  Rational scale = e.coef.begin()->second;
  if (scale < 0) scale = -scale;
  e *= 1 / scale;
  return Bound{std::move(e.coef), std::move(e.constant), strict};
}

// Keeps, per coefficient vector, only the tightest constant.
class BoundSet {
public:
  // False when a contradiction (0 >= c < 0, or 0 > 0) is added.
  bool add(const Bound& b) {
    if (b.coef.empty()) return false;
    auto it = bounds_.find(b.coef);
    if (it == bounds_.end()) {
      bounds_.emplace(b.coef, std::make_pair(b.constant, b.strict));
    } else if (b.constant < it->second.first || (b.constant == it->second.first && b.strict)) {
      it->second = {b.constant, b.strict};
    }
    return true;
  }
  std::vector<Bound> list() const {
    std::vector<Bound> out;
    for (const auto& [c, v] : bounds_) out.push_back(Bound{c, v.first, v.second});
    return out;
  }
  std::size_t size() const { return bounds_.size(); }

private:
  std::map<std::map<int, Rational>, std::pair<Rational, bool>> bounds_;
};

}  // namespace detail

struct LraStats {
  long checks = 0;
  long eliminations = 0;
};

// Conjunction of linear constraints over exact rationals. Equalities are
// solved eagerly for their newest variable; inequalities are decided by
// Fourier-Motzkin elimination. Copies are independent (constraints are
// shared immutably, so copying is cheap).
class LraStore {
public:
  explicit LraStore(std::vector<std::string> names = {}) : names_(std::move(names)) {}

  int add_var(std::string name) {
    names_.push_back(std::move(name));
    return static_cast<int>(names_.size()) - 1;
  }
  int num_vars() const { return static_cast<int>(names_.size()); }
  const std::vector<std::string>& names() const { return names_; }
  std::vector<LinConstraint> constraints() const {
    std::vector<LinConstraint> out;
    for (const auto& c : original_) out.push_back(*c);
    return out;
  }

  // Adds a constraint; false when it is trivially contradictory after
  // substitution (the store is then unusable).
  bool add(const LinConstraint& c) {
    original_.push_back(std::make_shared<const LinConstraint>(c));
    if (!ok_) return false;
    LinExpr e = reduce(c.expr);
    if (c.cmp == Cmp::eq) {
      if (e.is_constant()) return ok_ = e.constant == 0;
      int v = e.newest();
      Rational a = e.at(v);
      LinExpr rhs = e;
      rhs.coef.erase(v);
      rhs *= Rational(-1 / a);
      for (auto& [w, def] : solved_)
        if (def->coef.contains(v)) def = std::make_shared<const LinExpr>(def->substituted(v, rhs));
      solved_[v] = std::make_shared<const LinExpr>(rhs);
      std::vector<std::shared_ptr<const LinConstraint>> old;
      old.swap(ineqs_);
      for (auto& q : old) {
        if (!q->expr.coef.contains(v)) {
          ineqs_.push_back(std::move(q));
          continue;
        }
        if (!push_ineq({q->expr.substituted(v, rhs), q->cmp})) return ok_ = false;
      }
      return true;
    }
    return push_ineq({std::move(e), c.cmp}) || (ok_ = false);
  }

  bool add(const LinExpr& lhs, Relation rel, const LinExpr& rhs) { return add(relate(lhs, rel, rhs)); }

  // Constraints added since the last witness are first tried against it;
  // elimination runs only when one of them fails.
  bool feasible(LraStats* stats = nullptr) const {
    if (!ok_) return false;
    if (hint_) {
      bool still = true;
      for (std::size_t i = hint_upto_; i < original_.size() && still; ++i) still = original_[i]->holds(*hint_);
      if (still) {
        hint_upto_ = original_.size();
        return true;
      }
    }
    auto x = solve(stats);
    if (!x) return false;
    verify(*x);
    hint_ = std::make_shared<const std::vector<Rational>>(std::move(*x));
    hint_upto_ = original_.size();
    return true;
  }

  // A model minimizing variables greedily from the lowest index upward,
  // re-verified exactly against every constraint ever added.
  std::optional<std::vector<Rational>> model(LraStats* stats = nullptr) const {
    auto x = solve(stats);
    if (x) verify(*x);
    return x;
  }

  std::string str() const {
    std::string s;
    for (const auto& c : original_) s += c->str(names_) + "\n";
    return s;
  }

private:
  void verify(const std::vector<Rational>& x) const {
    for (const auto& c : original_)
      if (!c->holds(x)) throw Error("internal: witness violates " + c->str(names_));
  }

  LinExpr reduce(LinExpr e) const {
    for (const auto& [v, def] : solved_)
      if (e.coef.contains(v)) e = e.substituted(v, *def);
    return e;
  }

  bool push_ineq(LinConstraint c) {
    if (c.expr.is_constant()) return c.cmp == Cmp::gt ? c.expr.constant > 0 : c.expr.constant >= 0;
    ineqs_.push_back(std::make_shared<const LinConstraint>(std::move(c)));
    return true;
  }

  std::optional<std::vector<Rational>> solve(LraStats* stats) const {
    if (stats) ++stats->checks;
    if (!ok_) return std::nullopt;
    std::set<int> free_vars;
    detail::BoundSet level;
    for (const auto& q : ineqs_) {
      auto b = detail::normalize(q->expr, q->cmp == Cmp::gt);
      if (!b) continue;
      if (!level.add(*b)) return std::nullopt;
      for (const auto& [v, c] : b->coef) free_vars.insert(v);
    }
    // Eliminate the newest variable first so the oldest is assigned first.
    std::vector<int> order(free_vars.rbegin(), free_vars.rend());
    std::vector<std::vector<detail::Bound>> levels;
    std::vector<detail::Bound> current = level.list();
    for (int v : order) {
      if (stats) ++stats->eliminations;
      levels.push_back(current);
      std::vector<detail::Bound> lower, upper;
      detail::BoundSet next;
      for (const auto& b : current) {
        auto it = b.coef.find(v);
        if (it == b.coef.end()) next.add(b);
        else (it->second > 0 ? lower : upper).push_back(b);
      }
      for (const auto& lo : lower) {
        for (const auto& hi : upper) {
          LinExpr combined;
          combined.coef = lo.coef;
          combined.constant = lo.constant;
          combined *= -hi.coef.at(v);
          LinExpr h;
          h.coef = hi.coef;
          h.constant = hi.constant;
          combined += h * lo.coef.at(v);
          auto b = detail::normalize(combined, lo.strict || hi.strict);
          if (!b) continue;
          if (!next.add(*b)) return std::nullopt;
        }
      }
      current = next.list();
    }
    std::vector<Rational> x(names_.size(), Rational(0));
    for (std::size_t k = order.size(); k-- > 0;) {
      int v = order[k];
      std::optional<Rational> lo, hi;
      bool lo_strict = false, hi_strict = false;
      for (const auto& b : levels[k]) {
        auto it = b.coef.find(v);
        if (it == b.coef.end()) continue;
        Rational rest = b.constant;
        for (const auto& [w, c] : b.coef)
          if (w != v) rest += c * x[static_cast<std::size_t>(w)];
        Rational bound = -rest / it->second;  // a*x + rest (>|>=) 0
        if (it->second > 0) {
          if (!lo || bound > *lo || (bound == *lo && b.strict)) {
            lo = bound;
            lo_strict = b.strict;
          }
        } else if (!hi || bound < *hi || (bound == *hi && b.strict)) {
          hi = bound;
          hi_strict = b.strict;
        }
      }
      Rational value;
      if (lo && !lo_strict) value = *lo;
      else if (lo) value = hi ? Rational(*lo + std::min(Rational(1), Rational((*hi - *lo) / 2))) : Rational(*lo + 1);
      else if (hi) value = std::min(Rational(0), hi_strict ? Rational(*hi - 1) : *hi);
      else value = 0;
      x[static_cast<std::size_t>(v)] = value;
    }
    // Solved variables, oldest definitions first; definitions only mention
    // free variables.
    for (const auto& [v, def] : solved_) x[static_cast<std::size_t>(v)] = def->eval(x);
    return x;
  }

  std::vector<std::string> names_;
  std::map<int, std::shared_ptr<const LinExpr>> solved_;
  std::vector<std::shared_ptr<const LinConstraint>> ineqs_;
  std::vector<std::shared_ptr<const LinConstraint>> original_;
  bool ok_ = true;
  mutable std::shared_ptr<const std::vector<Rational>> hint_;
  mutable std::size_t hint_upto_ = 0;
};

}  // namespace hydraplan
