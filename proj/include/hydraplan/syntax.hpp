#pragma once

#include "hydraplan/core.hpp"

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hydraplan {

class ParseError : public Error {
public:
  ParseError(const std::string& what, int line = 0, int column = 0)
      : Error(line > 0 ? "line " + std::to_string(line) + ":" + std::to_string(column) + ": " + what : what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

private:
  int line_;
  int column_;
};

class UnsupportedFragmentError : public Error {
public:
  using Error::Error;
};

inline bool is_variable_name(const std::string& s) {
  return !s.empty() && (std::isupper(static_cast<unsigned char>(s[0])) || s[0] == '_');
}

// The process time variable of lambda expressions.
inline constexpr const char* kTimeVariable = "T";

// ---------------------------------------------------------------------------
// Expressions

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class ExprKind {
  number,    // rational literal
  variable,  // X, T0, T, ...
  reserved,  // start / end
  fluent,    // fluent term, optionally applied to start/end
  call,      // max, min, lin, clamp, or a rigid fact function before grounding
  none,      // "_" inside clamp bounds
  negate,
  binary,    // + - * / ^
};

struct Expr {
  ExprKind kind = ExprKind::number;
  Rational number;
  std::string name;               // variable / reserved / fluent / call name
  std::vector<std::string> args;  // fluent arguments (may hold sort variables)
  std::string applied;            // "", "start" or "end" for fluent nodes
  char op = 0;
  std::vector<ExprPtr> children;

  static ExprPtr make_number(Rational v) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::number;
    e->number = std::move(v);
    return e;
  }
  static ExprPtr make_variable(std::string n) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::variable;
    e->name = std::move(n);
    return e;
  }
  static ExprPtr make_reserved(std::string n) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::reserved;
    e->name = std::move(n);
    return e;
  }
  static ExprPtr make_fluent(std::string n, std::vector<std::string> args, std::string applied) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::fluent;
    e->name = std::move(n);
    e->args = std::move(args);
    e->applied = std::move(applied);
    return e;
  }
  static ExprPtr make_call(std::string n, std::vector<ExprPtr> children) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::call;
    e->name = std::move(n);
    e->children = std::move(children);
    return e;
  }
  static ExprPtr make_none() {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::none;
    return e;
  }
  static ExprPtr make_negate(ExprPtr inner) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::negate;
    e->children = {std::move(inner)};
    return e;
  }
  static ExprPtr make_binary(char op, ExprPtr l, ExprPtr r) {
    auto e = std::make_shared<Expr>();
    e->kind = ExprKind::binary;
    e->op = op;
    e->children = {std::move(l), std::move(r)};
    return e;
  }
};

inline int precedence(char op) {
  switch (op) {
    case '+':
    case '-': return 1;
    case '*':
    case '/': return 2;
    case '^': return 3;
    default: return 0;
  }
}

inline std::string term_text(const std::string& name, const std::vector<std::string>& args) {
  return Term{name, args}.str();
}

inline std::string expr_str(const Expr& e, int parent_prec = 0, bool right = false) {
  switch (e.kind) {
    case ExprKind::number: {
      std::string s = to_string(e.number);
      if (!is_integer(e.number) || e.number < 0) return "(" + s + ")";
      return s;
    }
    case ExprKind::variable:
    case ExprKind::reserved: return e.name;
    case ExprKind::none: return "_";
    case ExprKind::fluent: {
      std::string s = term_text(e.name, e.args);
      return e.applied.empty() ? s : s + "(" + e.applied + ")";
    }
    case ExprKind::call: {
      if (e.name == "clamp") {
        return expr_str(*e.children[0]) + " clamp [" + expr_str(*e.children[1]) + ", " +
               expr_str(*e.children[2]) + "]";
      }
      std::string s = e.name + "(";
      for (std::size_t i = 0; i < e.children.size(); ++i)
        s += (i ? ", " : "") + expr_str(*e.children[i]);
      return s + ")";
    }
    case ExprKind::negate: return "-" + expr_str(*e.children[0], 4);
    case ExprKind::binary: {
      int p = precedence(e.op);
      std::string s = expr_str(*e.children[0], p, false) + " " + std::string(1, e.op) + " " +
                      expr_str(*e.children[1], p, true);
      bool paren = p < parent_prec || (p == parent_prec && right);
      return paren ? "(" + s + ")" : s;
    }
  }
  return "?";
}

inline std::string expr_str(const ExprPtr& e) { return expr_str(*e); }

// Polynomial in the process time variable T.
struct Poly {
  std::vector<Rational> coefficients;  // coefficients[k] multiplies T^k

  static Poly constant(Rational v) { return Poly{{std::move(v)}}; }

  int degree() const {
    for (int k = static_cast<int>(coefficients.size()) - 1; k >= 0; --k)
      if (coefficients[static_cast<std::size_t>(k)] != 0) return k;
    return 0;
  }
  Rational coefficient(std::size_t k) const { return k < coefficients.size() ? coefficients[k] : Rational(0); }

  Rational at(const Rational& t) const {
    Rational acc = 0;
    for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * t + *it;
    return acc;
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    Poly r;
    r.coefficients.resize(std::max(a.coefficients.size(), b.coefficients.size()));
    for (std::size_t k = 0; k < r.coefficients.size(); ++k) r.coefficients[k] = a.coefficient(k) + b.coefficient(k);
    return r;
  }
  friend Poly operator*(const Poly& a, const Poly& b) {
    Poly r;
    r.coefficients.assign(a.coefficients.size() + b.coefficients.size(), Rational(0));
    for (std::size_t i = 0; i < a.coefficients.size(); ++i)
      for (std::size_t j = 0; j < b.coefficients.size(); ++j) r.coefficients[i + j] += a.coefficients[i] * b.coefficients[j];
    return r;
  }
  Poly scaled(const Rational& s) const {
    Poly r = *this;
    for (auto& c : r.coefficients) c *= s;
    return r;
  }
};

// Supplies the runtime meaning of the non-constant leaves of an expression.
struct EvalContext {
  std::function<Rational(const Expr& fluent_node)> fluent;  // applied process / real fluent
  std::function<Rational(const std::string& reserved)> reserved;
  std::map<std::string, Rational> bindings;
};

class UnboundVariableError : public Error {
public:
  using Error::Error;
};

inline Poly eval_poly(const Expr& e, const EvalContext& ctx) {
  switch (e.kind) {
    case ExprKind::number: return Poly::constant(e.number);
    case ExprKind::variable: {
      if (auto it = ctx.bindings.find(e.name); it != ctx.bindings.end()) return Poly::constant(it->second);
      if (e.name == kTimeVariable) return Poly{{Rational(0), Rational(1)}};
      throw UnboundVariableError("unbound variable " + e.name);
    }
    case ExprKind::reserved:
      if (!ctx.reserved) throw UnboundVariableError("no interval available for " + e.name);
      return Poly::constant(ctx.reserved(e.name));
    case ExprKind::fluent:
      if (!ctx.fluent) throw UnboundVariableError("no state available for " + e.name);
      return Poly::constant(ctx.fluent(e));
    case ExprKind::none: throw UnsupportedExpressionError("'_' outside a clamp bound");
    case ExprKind::negate: return eval_poly(*e.children[0], ctx).scaled(-1);
    case ExprKind::call: {
      if (e.name == "max" || e.name == "min") {
        if (e.children.size() != 2) throw UnsupportedExpressionError(e.name + " expects two arguments");
        Poly a = eval_poly(*e.children[0], ctx);
        Poly b = eval_poly(*e.children[1], ctx);
        if (a.degree() > 0 || b.degree() > 0)
          throw UnsupportedExpressionError(e.name + " over a time-dependent argument is only allowed at the top of a process");
        Rational x = a.coefficient(0), y = b.coefficient(0);
        return Poly::constant(e.name == "max" ? (x > y ? x : y) : (x < y ? x : y));
      }
      if (e.name == "lin") {
        if (e.children.size() != 3) throw UnsupportedExpressionError("lin expects (base, rate, anchor)");
        Poly base = eval_poly(*e.children[0], ctx);
        Poly rate = eval_poly(*e.children[1], ctx);
        Poly anchor = eval_poly(*e.children[2], ctx);
        Poly t{{Rational(0), Rational(1)}};
        return base + rate * (t + anchor.scaled(-1));
      }
      throw UnsupportedExpressionError("unsupported function " + e.name + " in arithmetic");
    }
    case ExprKind::binary: {
      Poly l = eval_poly(*e.children[0], ctx);
      Poly r = eval_poly(*e.children[1], ctx);
      switch (e.op) {
        case '+': return l + r;
        case '-': return l + r.scaled(-1);
        case '*': return l * r;
        case '/':
          if (r.degree() > 0) throw UnsupportedExpressionError("division by a time-dependent expression");
          if (r.coefficient(0) == 0) throw UnsupportedExpressionError("division by zero");
          return l.scaled(1 / r.coefficient(0));
        case '^': {
          if (r.degree() > 0 || !is_integer(r.coefficient(0)) || r.coefficient(0) < 0 || r.coefficient(0) > 8)
            throw UnsupportedExpressionError("exponent must be a small non-negative integer");
          Poly acc = Poly::constant(1);
          for (int k = 0; k < static_cast<int>(r.coefficient(0)); ++k) acc = acc * l;
          return acc;
        }
        default: break;
      }
    }
  }
  throw UnsupportedExpressionError("malformed expression");
}

inline Rational eval_constant(const Expr& e, const EvalContext& ctx) {
  Poly p = eval_poly(e, ctx);
  if (p.degree() > 0) throw UnsupportedExpressionError("expression depends on T: " + expr_str(e));
  return p.coefficient(0);
}

// Instantiates a process expression anchored at `anchor`. Accepted shapes:
// an affine function of T, max(c, e) / min(c, e) with one constant side,
// or `e clamp [lo, hi]`. A bound that stops decay becomes a floor and a bound
// that caps growth becomes a ceiling, whichever of max/min was written.
inline ClampedLinear to_clamped_linear(const Expr& e, const EvalContext& ctx, const Rational& anchor) {
  auto affine = [&](const Expr& inner) {
    Poly p = eval_poly(inner, ctx);
    if (p.degree() > 1)
      throw UnsupportedExpressionError("process is not clamped-linear: " + expr_str(inner));
    return p;
  };
  ClampedLinear out;
  Poly line;
  std::optional<Rational> lo, hi;
  if (e.kind == ExprKind::call && (e.name == "max" || e.name == "min") && e.children.size() == 2) {
    Poly a = affine(*e.children[0]);
    Poly b = affine(*e.children[1]);
    if (a.degree() > 0 && b.degree() > 0)
      throw UnsupportedExpressionError("both arguments of " + e.name + " depend on T");
    Rational bound = (a.degree() == 0 ? a : b).coefficient(0);
    line = a.degree() == 0 ? b : a;
    Rational rate = line.coefficient(1);
    bool as_floor = rate < 0 || (rate == 0 && e.name == "max");
    (as_floor ? lo : hi) = bound;
  } else if (e.kind == ExprKind::call && e.name == "clamp") {
    line = affine(*e.children[0]);
    if (e.children[1]->kind != ExprKind::none) lo = eval_constant(*e.children[1], ctx);
    if (e.children[2]->kind != ExprKind::none) hi = eval_constant(*e.children[2], ctx);
  } else {
    line = affine(e);
  }
  out.rate = line.coefficient(1);
  out.anchor = anchor;
  out.base = line.at(anchor);
  out.floor = lo;
  out.ceiling = hi;
  out.check();
  return out;
}

// Visits every node of an expression tree.
inline void walk(const Expr& e, const std::function<void(const Expr&)>& fn) {
  fn(e);
  for (const auto& c : e.children) walk(*c, fn);
}

// ---------------------------------------------------------------------------
// Statements

enum class Relation { eq, ne, lt, le, gt, ge };

inline std::string relation_str(Relation r) {
  switch (r) {
    case Relation::eq: return "=";
    case Relation::ne: return "!=";
    case Relation::lt: return "<";
    case Relation::le: return "<=";
    case Relation::gt: return ">";
    case Relation::ge: return ">=";
  }
  return "?";
}

inline bool compare(const Rational& a, Relation r, const Rational& b) {
  switch (r) {
    case Relation::eq: return a == b;
    case Relation::ne: return a != b;
    case Relation::lt: return a < b;
    case Relation::le: return a <= b;
    case Relation::gt: return a > b;
    case Relation::ge: return a >= b;
  }
  return false;
}

struct SourcePos {
  int line = 0;
  int column = 0;
};

// f(args) = value / f(args) != value for boolean and enumerated fluents.
struct FluentLiteral {
  std::string fluent;
  std::vector<std::string> args;
  Polarity polarity = Polarity::equal;
  std::string value;

  Term term() const { return Term{fluent, args}; }
  AtomLiteral ground() const { return AtomLiteral{term(), polarity, Value{value}}; }
};

// lhs rel rhs over numbers, bound variables, start/end and applied fluents.
// An equality whose one side is a not-yet-bound variable binds it.
struct Condition {
  ExprPtr lhs;
  Relation rel = Relation::eq;
  ExprPtr rhs;
};

// A rigid fact precondition such as distance(L1, L2, Y), or its negation
// -distance(L1, L2, Y) (no matching fact; unbound variables are wildcards).
// Consumed by grounding.
struct FactAtom {
  std::string name;
  std::vector<std::string> args;
  bool negated = false;
};

using BodyItem = std::variant<FluentLiteral, Condition, FactAtom>;
using Body = std::vector<BodyItem>;

struct ActionRef {
  std::string name;
  std::vector<std::string> args;

  Term term() const { return Term{name, args}; }
  std::string str() const { return term().str(); }
  friend bool operator==(const ActionRef&, const ActionRef&) = default;
  friend auto operator<=>(const ActionRef&, const ActionRef&) = default;
};

// Head of a law: discrete atom f(args)=value, or f(args) = expr for real and
// process fluents.
struct Head {
  std::string fluent;
  std::vector<std::string> args;
  std::string value;  // discrete heads
  ExprPtr expr;       // numeric heads

  bool numeric() const { return static_cast<bool>(expr); }
  Term term() const { return Term{fluent, args}; }
};

struct StateConstraint {
  Head head;
  Body body;
};
struct DynamicLaw {
  ActionRef action;
  Head head;
  Body body;
};
struct Executability {
  std::vector<ActionRef> actions;
  Body body;
};
struct Trigger {
  Body body;
  ActionRef action;
};

struct Statement {
  std::variant<StateConstraint, DynamicLaw, Executability, Trigger> form;
  SourcePos pos;
};

// ---------------------------------------------------------------------------
// Signature

struct SortDecl {
  std::string name;
  std::vector<std::string> elements;
};

enum class FluentKind { boolean, enumerated, real, process };

struct FluentDecl {
  std::string name;
  std::vector<std::string> params;
  FluentKind kind = FluentKind::boolean;
  std::string range_sort;  // enumerated
  Rational lower = 0;      // real / process range
  Rational upper = 0;
  // Constraint-variable names carrying a process across steps.
  std::string aux_initial, aux_time, aux_final;
};

enum class Genus { agent, exogenous };

struct ActionDecl {
  std::string name;
  std::vector<std::string> params;
  Genus genus = Genus::agent;
};

struct Fact {
  std::string name;
  std::vector<std::string> args;
};

struct Signature {
  std::vector<SortDecl> sorts;
  std::map<std::string, std::string> variables;  // sort variable -> sort
  std::vector<FluentDecl> fluents;
  std::vector<ActionDecl> actions;
  std::vector<Fact> facts;

  const SortDecl* sort(const std::string& n) const {
    for (const auto& s : sorts)
      if (s.name == n) return &s;
    return nullptr;
  }
  const FluentDecl* fluent(const std::string& n) const {
    for (const auto& f : fluents)
      if (f.name == n) return &f;
    return nullptr;
  }
  const ActionDecl* action(const std::string& n) const {
    for (const auto& a : actions)
      if (a.name == n) return &a;
    return nullptr;
  }
  bool is_fact(const std::string& n) const {
    for (const auto& f : facts)
      if (f.name == n) return true;
    return false;
  }
  bool is_sort_variable(const std::string& n) const { return variables.count(n) > 0; }

  // Value domain of a discrete fluent.
  std::vector<std::string> values_of(const FluentDecl& f) const {
    if (f.kind == FluentKind::boolean) return {"false", "true"};
    if (f.kind == FluentKind::enumerated) {
      if (const SortDecl* s = sort(f.range_sort)) return s->elements;
    }
    return {};
  }

  // All ground instances of a parameter list.
  std::vector<std::vector<std::string>> instances(const std::vector<std::string>& params) const {
    std::vector<std::vector<std::string>> out{{}};
    for (const auto& p : params) {
      const SortDecl* s = sort(p);
      std::vector<std::vector<std::string>> next;
      for (const auto& prefix : out)
        for (const auto& el : s ? s->elements : std::vector<std::string>{}) {
          auto v = prefix;
          v.push_back(el);
          next.push_back(std::move(v));
        }
      out = std::move(next);
    }
    return out;
  }
};

struct ActionDescription {
  Signature signature;
  std::vector<Statement> statements;
};

// A ground description has the same shape; only T and value variables bound
// inside bodies (X, T0, ...) remain.
using GroundActionDescription = ActionDescription;

struct Instance {
  std::vector<FluentLiteral> init;                     // ground discrete initial atoms
  std::vector<std::pair<Term, ExprPtr>> init_numeric;  // real / process initial values
  std::vector<FluentLiteral> goal;
  std::optional<Rational> goal_before;  // goal state must start strictly before this
  int horizon = 10;
  std::optional<Rational> deadline;
  int max_concurrent = 1;
  std::map<std::string, std::pair<Rational, Rational>> bounds;  // cspvar range overrides
};

}  // namespace hydraplan
