#pragma once

#include "hydraplan/lexer.hpp"
#include "hydraplan/syntax.hpp"

#include <algorithm>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace hydraplan {

namespace detail {

inline bool is_reserved_time(const std::string& s) { return s == "start" || s == "end"; }

// Index of the first depth-0 token equal to `word` in [b, e), or e.
inline std::size_t find_top(const std::vector<Token>& t, std::size_t b, std::size_t e, std::string_view word) {
  int depth = 0;
  for (std::size_t i = b; i < e; ++i) {
    if (t[i].is("(") || t[i].is("[") || t[i].is("{")) ++depth;
    else if (t[i].is(")") || t[i].is("]") || t[i].is("}")) --depth;
    else if (depth == 0 && t[i].is(word)) return i;
  }
  return e;
}

inline std::vector<std::pair<std::size_t, std::size_t>> split_top(const std::vector<Token>& t, std::size_t b,
                                                                  std::size_t e) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (b >= e) return out;
  std::size_t start = b;
  int depth = 0;
  for (std::size_t i = b; i < e; ++i) {
    if (t[i].is("(") || t[i].is("[") || t[i].is("{")) ++depth;
    else if (t[i].is(")") || t[i].is("]") || t[i].is("}")) --depth;
    else if (depth == 0 && t[i].is(",")) {
      out.emplace_back(start, i);
      start = i + 1;
    }
  }
  out.emplace_back(start, e);
  return out;
}

}  // namespace detail

// Parser for action descriptions (.h) and instances (.inst). Declarations must
// precede their first use.
class Parser {
public:
  explicit Parser(Signature& sig) : sig_(sig) {}

  // ---- expressions -------------------------------------------------------

  ExprPtr parse_expr(TokenCursor& c) {
    ExprPtr e = parse_additive(c);
    if (c.peek_is("clamp")) {
      c.next();
      c.expect("[");
      ExprPtr lo = parse_bound(c);
      c.expect(",");
      ExprPtr hi = parse_bound(c);
      c.expect("]");
      e = Expr::make_call("clamp", {e, lo, hi});
    }
    return e;
  }

  // ---- fluent / action references ---------------------------------------

  std::vector<std::string> parse_args(TokenCursor& c) {
    std::vector<std::string> args;
    if (!c.accept("(")) return args;
    if (c.accept(")")) return args;
    do {
      const Token& t = c.next();
      if (t.kind == TokenKind::punct) c.fail("expected an argument but found '" + t.text + "'", &t);
      args.push_back(t.text);
    } while (c.accept(","));
    c.expect(")");
    return args;
  }

  void check_args(const std::vector<std::string>& params, const std::vector<std::string>& args,
                  const std::string& symbol, const Token& at, TokenCursor& c) const {
    if (params.size() != args.size())
      c.fail("arity mismatch for " + symbol + ": expected " + std::to_string(params.size()) + " arguments, got " +
                 std::to_string(args.size()),
             &at);
    for (std::size_t i = 0; i < args.size(); ++i) {
      const SortDecl* sort = sig_.sort(params[i]);
      if (!sort) c.fail("undeclared sort " + params[i], &at);
      if (is_variable_name(args[i])) {
        auto v = sig_.variables.find(args[i]);
        if (v == sig_.variables.end()) c.fail("undeclared variable " + args[i] + " in " + symbol, &at);
        const SortDecl* vs = sig_.sort(v->second);
        for (const auto& el : vs->elements)
          if (std::find(sort->elements.begin(), sort->elements.end(), el) == sort->elements.end())
            c.fail("variable " + args[i] + " of sort " + v->second + " does not fit sort " + params[i], &at);
      } else if (std::find(sort->elements.begin(), sort->elements.end(), args[i]) == sort->elements.end()) {
        c.fail("constant " + args[i] + " is not of sort " + params[i], &at);
      }
    }
  }

  ActionRef parse_action(TokenCursor& c) {
    const Token& name = c.next();
    const ActionDecl* decl = sig_.action(name.text);
    if (!decl) c.fail("undeclared action " + name.text, &name);
    ActionRef a{name.text, parse_args(c)};
    check_args(decl->params, a.args, name.text, name, c);
    return a;
  }

  // ---- bodies and heads --------------------------------------------------

  BodyItem parse_body_item(const std::vector<Token>& t, std::size_t b, std::size_t e, SourcePos pos) {
    TokenCursor c(t, b, e, pos);
    if (c.done()) c.fail("empty literal");
    const Token* first = c.peek();
    if (first->is("-") && c.peek(1) && sig_.is_fact(c.peek(1)->text)) {
      c.next();
      const Token& nt = c.next();
      FactAtom fa{nt.text, parse_args(c), true};
      if (!c.done()) c.fail("unexpected '" + c.peek()->text + "' after fact");
      return fa;
    }
    bool negated = first->is("-") && c.peek(1) && c.peek(1)->kind == TokenKind::identifier &&
                   sig_.fluent(c.peek(1)->text);
    const Token* name = negated ? c.peek(1) : first;
    const FluentDecl* fd = name->kind == TokenKind::identifier ? sig_.fluent(name->text) : nullptr;
    if (fd && (fd->kind == FluentKind::boolean || fd->kind == FluentKind::enumerated)) {
      if (negated) c.next();
      const Token& nt = c.next();
      FluentLiteral lit{fd->name, parse_args(c), Polarity::equal, "true"};
      check_args(fd->params, lit.args, fd->name, nt, c);
      if (negated) {
        if (fd->kind != FluentKind::boolean) c.fail("'-' applies to boolean fluents only", &nt);
        lit.value = "false";
      } else if (c.accept("=") || (c.peek_is("!=") && (lit.polarity = Polarity::not_equal, c.next(), true))) {
        const Token& v = c.next();
        if (v.kind == TokenKind::punct) c.fail("expected a value", &v);
        lit.value = v.text;
        check_value(*fd, lit.value, v, c);
      } else if (fd->kind != FluentKind::boolean) {
        c.fail("fluent " + fd->name + " is not boolean; write " + fd->name + "(...) = value", &nt);
      }
      if (!c.done()) c.fail("unexpected '" + c.peek()->text + "' after literal");
      return lit;
    }
    ExprPtr lhs = parse_expr(c);
    if (c.done()) {
      if (lhs->kind == ExprKind::call && sig_.is_fact(lhs->name)) return FactAtom{lhs->name, lhs->args};
      c.fail("expected a relation after " + expr_str(lhs));
    }
    Relation rel = parse_relation(c);
    ExprPtr rhs = parse_expr(c);
    if (!c.done()) c.fail("unexpected '" + c.peek()->text + "'");
    return Condition{lhs, rel, rhs};
  }

  Body parse_body(const std::vector<Token>& t, std::size_t b, std::size_t e, SourcePos pos) {
    Body body;
    for (auto [ib, ie] : detail::split_top(t, b, e)) body.push_back(parse_body_item(t, ib, ie, pos));
    return body;
  }

  Head parse_head(const std::vector<Token>& t, std::size_t b, std::size_t e, SourcePos pos) {
    TokenCursor c(t, b, e, pos);
    bool negated = c.accept("-");
    const Token& nt = c.next();
    const FluentDecl* fd = sig_.fluent(nt.text);
    if (!fd) c.fail("undeclared fluent " + nt.text, &nt);
    Head h{fd->name, parse_args(c), "true", nullptr};
    check_args(fd->params, h.args, fd->name, nt, c);
    bool discrete = fd->kind == FluentKind::boolean || fd->kind == FluentKind::enumerated;
    if (negated) {
      if (fd->kind != FluentKind::boolean) c.fail("'-' applies to boolean fluents only", &nt);
      h.value = "false";
    } else if (c.accept("=")) {
      if (discrete) {
        const Token& v = c.next();
        h.value = v.text;
        check_value(*fd, h.value, v, c);
      } else {
        h.value.clear();
        h.expr = parse_expr(c);
      }
    } else if (fd->kind != FluentKind::boolean) {
      c.fail("head of non-boolean fluent " + fd->name + " needs a value", &nt);
    }
    if (!c.done()) c.fail("unexpected '" + c.peek()->text + "' in head");
    return h;
  }

  // ---- statements --------------------------------------------------------

  void parse_statement(const TokenStatement& st, ActionDescription& ad) {
    const auto& t = st.tokens;
    std::size_t n = t.size();
    const Token& first = t.front();
    if (first.kind == TokenKind::identifier) {
      if (first.text == "sort") return parse_sort(st);
      if (first.text == "var") return parse_var(st);
      if (first.text == "fluent" || first.text == "process") return parse_fluent(st);
      if (first.text == "action") return parse_action_decl(st);
      if (first.text == "fact") return parse_fact(st);
    }
    Statement out;
    out.pos = st.pos;
    if (first.is("impossible")) {
      std::size_t iff = detail::find_top(t, 1, n, "if");
      Executability ex;
      for (auto [ab, ae] : detail::split_top(t, 1, iff)) {
        TokenCursor c(t, ab, ae, st.pos);
        ex.actions.push_back(parse_action(c));
        if (!c.done()) c.fail("unexpected '" + c.peek()->text + "' in action list");
      }
      if (ex.actions.empty()) throw ParseError("impossible needs at least one action", first.line, first.column);
      if (iff < n) ex.body = parse_body(t, iff + 1, n, st.pos);
      out.form = std::move(ex);
    } else if (std::size_t trig = detail::find_top(t, 0, n, "triggers"); trig < n) {
      Trigger tr;
      tr.body = parse_body(t, 0, trig, st.pos);
      TokenCursor c(t, trig + 1, n, st.pos);
      tr.action = parse_action(c);
      if (!c.done()) c.fail("unexpected '" + c.peek()->text + "' after triggered action");
      out.form = std::move(tr);
    } else if (std::size_t causes = detail::find_top(t, 0, n, "causes"); causes < n) {
      DynamicLaw law;
      TokenCursor c(t, 0, causes, st.pos);
      law.action = parse_action(c);
      if (!c.done()) c.fail("unexpected '" + c.peek()->text + "' before causes");
      std::size_t iff = detail::find_top(t, causes + 1, n, "if");
      law.head = parse_head(t, causes + 1, iff, st.pos);
      if (iff < n) law.body = parse_body(t, iff + 1, n, st.pos);
      out.form = std::move(law);
    } else {
      StateConstraint sc;
      std::size_t iff = detail::find_top(t, 0, n, "if");
      sc.head = parse_head(t, 0, iff, st.pos);
      if (iff < n) sc.body = parse_body(t, iff + 1, n, st.pos);
      out.form = std::move(sc);
    }
    ad.statements.push_back(std::move(out));
  }

private:
  ExprPtr parse_bound(TokenCursor& c) {
    if (c.accept("_")) return Expr::make_none();
    return parse_additive(c);
  }

  ExprPtr parse_additive(TokenCursor& c) {
    ExprPtr l = parse_mul(c);
    while (c.peek_is("+") || c.peek_is("-")) {
      char op = c.next().text[0];
      l = Expr::make_binary(op, l, parse_mul(c));
    }
    return l;
  }

  ExprPtr parse_mul(TokenCursor& c) {
    ExprPtr l = parse_pow(c);
    while (c.peek_is("*") || c.peek_is("/")) {
      char op = c.next().text[0];
      ExprPtr r = parse_pow(c);
      if (op == '/' && l->kind == ExprKind::number && r->kind == ExprKind::number && r->number != 0)
        l = Expr::make_number(l->number / r->number);
      else
        l = Expr::make_binary(op, l, r);
    }
    return l;
  }

  ExprPtr parse_pow(TokenCursor& c) {
    ExprPtr b = parse_unary(c);
    if (c.accept("^")) return Expr::make_binary('^', b, parse_pow(c));
    return b;
  }

  ExprPtr parse_unary(TokenCursor& c) {
    if (c.accept("-")) {
      ExprPtr inner = parse_unary(c);
      if (inner->kind == ExprKind::number) return Expr::make_number(-inner->number);
      return Expr::make_negate(inner);
    }
    return parse_primary(c);
  }

  ExprPtr parse_primary(TokenCursor& c) {
    const Token& t = c.next();
    if (t.kind == TokenKind::number) return Expr::make_number(parse_rational(t.text));
    if (t.kind == TokenKind::variable) return Expr::make_variable(t.text);
    if (t.is("(")) {
      ExprPtr e = parse_expr(c);
      c.expect(")");
      return e;
    }
    if (t.kind != TokenKind::identifier) c.fail("unexpected '" + t.text + "' in expression", &t);
    if (detail::is_reserved_time(t.text)) return Expr::make_reserved(t.text);
    if (t.text == "max" || t.text == "min" || t.text == "lin") {
      c.expect("(");
      std::vector<ExprPtr> children{parse_expr(c)};
      while (c.accept(",")) children.push_back(parse_expr(c));
      c.expect(")");
      return Expr::make_call(t.text, std::move(children));
    }
    if (const FluentDecl* fd = sig_.fluent(t.text)) {
      std::vector<std::string> args = parse_args(c);
      std::string applied;
      if (args.size() == fd->params.size() + 1 && detail::is_reserved_time(args.back())) {
        applied = args.back();  // time_left_board(P,L,end) spelling
        args.pop_back();
      }
      check_args(fd->params, args, fd->name, t, c);
      if (applied.empty() && c.peek_is("(") && c.peek(1) && detail::is_reserved_time(c.peek(1)->text) &&
          c.peek_is(")", 2)) {
        c.next();
        applied = c.next().text;
        c.next();
      }
      if (!applied.empty() && fd->kind != FluentKind::process)
        c.fail("only process fluents can be applied to a time", &t);
      if (fd->kind == FluentKind::boolean || fd->kind == FluentKind::enumerated)
        c.fail("discrete fluent " + fd->name + " used inside arithmetic", &t);
      return Expr::make_fluent(fd->name, std::move(args), std::move(applied));
    }
    if (sig_.is_fact(t.text)) {
      auto e = std::make_shared<Expr>();
      e->kind = ExprKind::call;
      e->name = t.text;
      e->args = parse_args(c);
      return e;
    }
    c.fail("undeclared symbol " + t.text, &t);
  }

  Relation parse_relation(TokenCursor& c) {
    const Token& t = c.next();
    if (t.is("=") || t.is("==")) return Relation::eq;
    if (t.is("!=")) return Relation::ne;
    if (t.is("<")) return Relation::lt;
    if (t.is("<=")) return Relation::le;
    if (t.is(">")) return Relation::gt;
    if (t.is(">=")) return Relation::ge;
    c.fail("expected a relation but found '" + t.text + "'", &t);
  }

  void check_value(const FluentDecl& fd, const std::string& v, const Token& at, TokenCursor& c) const {
    if (is_variable_name(v)) {
      auto it = sig_.variables.find(v);
      if (it == sig_.variables.end()) c.fail("undeclared variable " + v, &at);
      return;
    }
    auto values = sig_.values_of(fd);
    if (std::find(values.begin(), values.end(), v) == values.end())
      c.fail("value " + v + " is not in the range of " + fd.name, &at);
  }

  void check_fresh_name(const Token& t) const {
    if (sig_.fluent(t.text) || sig_.action(t.text))
      throw ParseError("duplicate symbol " + t.text, t.line, t.column);
  }

  std::vector<std::string> parse_param_sorts(TokenCursor& c) {
    std::vector<std::string> params = parse_args(c);
    for (const auto& p : params)
      if (!sig_.sort(p)) c.fail("undeclared sort " + p);
    return params;
  }

  void parse_sort(const TokenStatement& st) {
    TokenCursor c(st.tokens, 1, st.tokens.size(), st.pos);
    const Token& name = c.next();
    if (sig_.sort(name.text)) c.fail("duplicate sort " + name.text, &name);
    c.expect("=");
    SortDecl s{name.text, {}};
    auto add = [&](const std::string& el, const Token& at) {
      if (std::find(s.elements.begin(), s.elements.end(), el) != s.elements.end())
        c.fail("duplicate element " + el + " in sort " + s.name, &at);
      s.elements.push_back(el);
    };
    do {
      if (c.accept("{")) {
        do {
          const Token& el = c.next();
          if (el.kind == TokenKind::punct || el.kind == TokenKind::variable) c.fail("bad sort element", &el);
          add(el.text, el);
        } while (c.accept(","));
        c.expect("}");
      } else {
        const Token& other = c.next();
        const SortDecl* os = sig_.sort(other.text);
        if (!os) c.fail("undeclared sort " + other.text, &other);
        for (const auto& el : os->elements) add(el, other);
      }
    } while (c.accept("+"));
    if (!c.done()) c.fail("unexpected '" + c.peek()->text + "'");
    if (s.elements.empty()) c.fail("sort " + s.name + " is empty", &name);
    sig_.sorts.push_back(std::move(s));
  }

  void parse_var(const TokenStatement& st) {
    TokenCursor c(st.tokens, 1, st.tokens.size(), st.pos);
    std::vector<const Token*> names;
    do {
      const Token& v = c.next();
      if (v.kind != TokenKind::variable) c.fail("variables start with an uppercase letter", &v);
      if (v.text == kTimeVariable) c.fail("T is reserved for process time", &v);
      names.push_back(&v);
    } while (c.accept(","));
    c.expect(":");
    const Token& sort = c.next();
    if (!sig_.sort(sort.text)) c.fail("undeclared sort " + sort.text, &sort);
    for (const Token* v : names) sig_.variables[v->text] = sort.text;
  }

  void parse_fluent(const TokenStatement& st) {
    TokenCursor c(st.tokens, 0, st.tokens.size(), st.pos);
    bool process = c.next().text == "process";
    const Token& name = c.next();
    check_fresh_name(name);
    if (detail::is_reserved_time(name.text)) c.fail("start and end are reserved fluents", &name);
    FluentDecl f;
    f.name = name.text;
    f.params = parse_param_sorts(c);
    c.expect(":");
    auto parse_range = [&] {
      c.expect("[");
      f.lower = parse_rational_token(c);
      c.expect(",");
      f.upper = parse_rational_token(c);
      c.expect("]");
      if (f.lower > f.upper) c.fail("empty range for " + f.name, &name);
    };
    if (process) {
      f.kind = FluentKind::process;
      parse_range();
      f.aux_initial = f.name + "_initial";
      f.aux_time = f.name + "_time";
      f.aux_final = f.name + "_final";
      if (c.accept("via")) {
        f.aux_initial = c.next().text;
        c.expect(",");
        f.aux_time = c.next().text;
        c.expect(",");
        f.aux_final = c.next().text;
      }
    } else if (c.accept("bool")) {
      f.kind = FluentKind::boolean;
    } else if (c.accept("real")) {
      f.kind = FluentKind::real;
      parse_range();
    } else {
      const Token& range = c.next();
      if (!sig_.sort(range.text)) c.fail("undeclared sort " + range.text, &range);
      f.kind = FluentKind::enumerated;
      f.range_sort = range.text;
    }
    if (!c.done()) c.fail("unexpected '" + c.peek()->text + "'");
    sig_.fluents.push_back(std::move(f));
  }

  Rational parse_rational_token(TokenCursor& c) {
    bool neg = c.accept("-");
    const Token& t = c.next();
    if (t.kind != TokenKind::number) c.fail("expected a number", &t);
    Rational v = parse_rational(t.text);
    return neg ? Rational(-v) : v;
  }

  void parse_action_decl(const TokenStatement& st) {
    TokenCursor c(st.tokens, 1, st.tokens.size(), st.pos);
    const Token& name = c.next();
    check_fresh_name(name);
    ActionDecl a{name.text, parse_param_sorts(c), Genus::agent};
    c.expect(":");
    const Token& g = c.next();
    if (g.text == "agent") a.genus = Genus::agent;
    else if (g.text == "exogenous") a.genus = Genus::exogenous;
    else c.fail("expected agent or exogenous", &g);
    if (!c.done()) c.fail("unexpected '" + c.peek()->text + "'");
    sig_.actions.push_back(std::move(a));
  }

  void parse_fact(const TokenStatement& st) {
    TokenCursor c(st.tokens, 1, st.tokens.size(), st.pos);
    const Token& name = c.next();
    if (sig_.fluent(name.text) || sig_.action(name.text)) c.fail(name.text + " is already a fluent or action", &name);
    Fact f{name.text, parse_args(c)};
    for (const auto& a : f.args)
      if (is_variable_name(a)) c.fail("facts must be ground", &name);
    for (const auto& other : sig_.facts)
      if (other.name == f.name && other.args.size() != f.args.size()) c.fail("arity mismatch for fact " + f.name, &name);
    if (!c.done()) c.fail("unexpected '" + c.peek()->text + "'");
    sig_.facts.push_back(std::move(f));
  }

  Signature& sig_;
};

inline ActionDescription parse_action_description(std::string_view text) {
  ActionDescription ad;
  Parser p(ad.signature);
  for (const auto& st : tokenize(text)) p.parse_statement(st, ad);
  return ad;
}

// ---------------------------------------------------------------------------
// Instances

namespace detail {

// Every ground substitution for the sort variables occurring in `names`.
inline std::vector<std::map<std::string, std::string>> variable_assignments(const Signature& sig,
                                                                             const std::set<std::string>& names) {
  std::vector<std::map<std::string, std::string>> out{{}};
  for (const auto& v : names) {
    const SortDecl* s = sig.sort(sig.variables.at(v));
    std::vector<std::map<std::string, std::string>> next;
    for (const auto& partial : out)
      for (const auto& el : s->elements) {
        auto m = partial;
        m[v] = el;
        next.push_back(std::move(m));
      }
    out = std::move(next);
  }
  return out;
}

inline std::string substitute(const std::string& s, const std::map<std::string, std::string>& m) {
  auto it = m.find(s);
  return it == m.end() ? s : it->second;
}

}  // namespace detail

inline Instance parse_instance(std::string_view text, const ActionDescription& ad) {
  Instance inst;
  Signature sig = ad.signature;
  Parser p(sig);
  for (const auto& st : tokenize(text)) {
    const auto& t = st.tokens;
    std::size_t n = t.size();
    const Token& kw = t.front();
    auto number_arg = [&](std::size_t at) {
      TokenCursor c(t, at, n, st.pos);
      ExprPtr e = p.parse_expr(c);
      if (!c.done()) c.fail("unexpected '" + c.peek()->text + "'");
      if (e->kind != ExprKind::number) c.fail("expected a number");
      return e->number;
    };
    if (kw.is("init")) {
      TokenCursor probe(t, 1, n, st.pos);
      probe.accept("-");
      const Token& name = probe.next();
      const FluentDecl* fd = sig.fluent(name.text);
      if (!fd) throw ParseError("undeclared fluent " + name.text, name.line, name.column);
      Head h = p.parse_head(t, 1, n, st.pos);
      std::set<std::string> vars;
      for (const auto& a : h.args)
        if (is_variable_name(a)) vars.insert(a);
      if (!h.numeric() && is_variable_name(h.value)) vars.insert(h.value);
      for (const auto& m : detail::variable_assignments(sig, vars)) {
        std::vector<std::string> args;
        for (const auto& a : h.args) args.push_back(detail::substitute(a, m));
        if (h.numeric())
          inst.init_numeric.emplace_back(Term{h.fluent, args}, h.expr);
        else
          inst.init.push_back(FluentLiteral{h.fluent, args, Polarity::equal, detail::substitute(h.value, m)});
      }
    } else if (kw.is("goal")) {
      std::size_t before = detail::find_top(t, 1, n, "before");
      if (before < n) inst.goal_before = number_arg(before + 1);
      for (auto& item : p.parse_body(t, 1, before, st.pos)) {
        auto* lit = std::get_if<FluentLiteral>(&item);
        if (!lit) throw ParseError("goals are conjunctions of discrete fluent literals", kw.line, kw.column);
        for (const auto& a : lit->args)
          if (is_variable_name(a)) throw ParseError("goal literals must be ground", kw.line, kw.column);
        inst.goal.push_back(*lit);
      }
    } else if (kw.is("horizon")) {
      Rational h = number_arg(1);
      if (!is_integer(h) || h < 1) throw ParseError("horizon must be a positive integer", kw.line, kw.column);
      inst.horizon = static_cast<int>(h);
    } else if (kw.is("deadline")) {
      inst.deadline = number_arg(1);
    } else if (kw.is("concurrency")) {
      Rational k = number_arg(1);
      if (!is_integer(k) || k < 1) throw ParseError("concurrency must be a positive integer", kw.line, kw.column);
      inst.max_concurrent = static_cast<int>(k);
    } else if (kw.is("bounds")) {
      TokenCursor c(t, 1, n, st.pos);
      std::string name = c.next().text;
      auto num = [&] {
        bool neg = c.accept("-");
        const Token& v = c.next();
        if (v.kind != TokenKind::number) c.fail("expected a number", &v);
        Rational r = parse_rational(v.text);
        return neg ? Rational(-r) : r;
      };
      Rational lo = num();
      Rational hi = num();
      if (lo > hi) c.fail("empty bounds for " + name);
      inst.bounds[name] = {lo, hi};
    } else {
      throw ParseError("unknown instance statement '" + kw.text + "'", kw.line, kw.column);
    }
  }
  return inst;
}

// ---------------------------------------------------------------------------
// Pretty printing

inline std::string body_item_str(const BodyItem& item) {
  if (const auto* lit = std::get_if<FluentLiteral>(&item)) {
    std::string term = term_text(lit->fluent, lit->args);
    if (lit->polarity == Polarity::equal && lit->value == "true") return term;
    if (lit->polarity == Polarity::equal && lit->value == "false") return "-" + term;
    return term + (lit->polarity == Polarity::equal ? " = " : " != ") + lit->value;
  }
  if (const auto* cond = std::get_if<Condition>(&item))
    return expr_str(cond->lhs) + " " + relation_str(cond->rel) + " " + expr_str(cond->rhs);
  const auto& fact = std::get<FactAtom>(item);
  return (fact.negated ? "-" : "") + term_text(fact.name, fact.args);
}

inline std::string body_str(const Body& body) {
  std::string s;
  for (std::size_t i = 0; i < body.size(); ++i) s += (i ? ", " : "") + body_item_str(body[i]);
  return s;
}

inline std::string head_str(const Head& h, const Signature& sig) {
  std::string term = term_text(h.fluent, h.args);
  if (h.numeric()) return term + " = " + expr_str(h.expr);
  const FluentDecl* fd = sig.fluent(h.fluent);
  if (fd && fd->kind == FluentKind::boolean) return h.value == "true" ? term : "-" + term;
  return term + " = " + h.value;
}

inline std::string statement_str(const Statement& st, const Signature& sig) {
  auto with_body = [](std::string s, const Body& b) {
    if (!b.empty()) s += " if " + body_str(b);
    return s + ".";
  };
  if (const auto* sc = std::get_if<StateConstraint>(&st.form)) return with_body(head_str(sc->head, sig), sc->body);
  if (const auto* law = std::get_if<DynamicLaw>(&st.form))
    return with_body(law->action.str() + " causes " + head_str(law->head, sig), law->body);
  if (const auto* ex = std::get_if<Executability>(&st.form)) {
    std::string s = "impossible ";
    for (std::size_t i = 0; i < ex->actions.size(); ++i) s += (i ? ", " : "") + ex->actions[i].str();
    return with_body(s, ex->body);
  }
  const auto& tr = std::get<Trigger>(st.form);
  return body_str(tr.body) + " triggers " + tr.action.str() + ".";
}

inline std::string print_action_description(const ActionDescription& ad) {
  const Signature& sig = ad.signature;
  std::string out;
  auto list = [](const std::vector<std::string>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + xs[i];
    return s;
  };
  auto params = [&](const std::vector<std::string>& ps) { return ps.empty() ? std::string() : "(" + list(ps) + ")"; };
  for (const auto& s : sig.sorts) out += "sort " + s.name + " = {" + list(s.elements) + "}.\n";
  std::map<std::string, std::vector<std::string>> by_sort;
  for (const auto& [v, s] : sig.variables) by_sort[s].push_back(v);
  for (const auto& [s, vs] : by_sort) out += "var " + list(vs) + " : " + s + ".\n";
  for (const auto& f : sig.fluents) {
    switch (f.kind) {
      case FluentKind::boolean: out += "fluent " + f.name + params(f.params) + " : bool.\n"; break;
      case FluentKind::enumerated: out += "fluent " + f.name + params(f.params) + " : " + f.range_sort + ".\n"; break;
      case FluentKind::real:
        out += "fluent " + f.name + params(f.params) + " : real [" + to_string(f.lower) + ", " + to_string(f.upper) + "].\n";
        break;
      case FluentKind::process:
        out += "process " + f.name + params(f.params) + " : [" + to_string(f.lower) + ", " + to_string(f.upper) +
               "] via " + f.aux_initial + ", " + f.aux_time + ", " + f.aux_final + ".\n";
        break;
    }
  }
  for (const auto& a : sig.actions)
    out += "action " + a.name + params(a.params) + " : " + (a.genus == Genus::agent ? "agent" : "exogenous") + ".\n";
  for (const auto& f : sig.facts) out += "fact " + term_text(f.name, f.args) + ".\n";
  for (const auto& st : ad.statements) out += statement_str(st, sig) + "\n";
  return out;
}

inline std::string print_instance(const Instance& inst, const Signature& sig) {
  std::string out;
  for (const auto& lit : inst.init) {
    Head h{lit.fluent, lit.args, lit.value, nullptr};
    out += "init " + head_str(h, sig) + ".\n";
  }
  for (const auto& [term, expr] : inst.init_numeric) out += "init " + term.str() + " = " + expr_str(expr) + ".\n";
  if (!inst.goal.empty()) {
    Body b(inst.goal.begin(), inst.goal.end());
    out += "goal " + body_str(b);
    if (inst.goal_before) out += " before " + to_string(*inst.goal_before);
    out += ".\n";
  }
  out += "horizon " + std::to_string(inst.horizon) + ".\n";
  if (inst.deadline) out += "deadline " + to_string(*inst.deadline) + ".\n";
  out += "concurrency " + std::to_string(inst.max_concurrent) + ".\n";
  for (const auto& [name, b] : inst.bounds)
    out += "bounds " + name + " " + to_string(b.first) + " " + to_string(b.second) + ".\n";
  return out;
}

}  // namespace hydraplan
