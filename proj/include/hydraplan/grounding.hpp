#pragma once

#include "hydraplan/parser.hpp"
#include "hydraplan/syntax.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hydraplan {

class GroundingError : public Error {
public:
  using Error::Error;
};

namespace detail {

using Substitution = std::map<std::string, std::string>;

inline void collect_sort_vars(const Signature& sig, const std::vector<std::string>& args, std::set<std::string>& out) {
  for (const auto& a : args)
    if (sig.is_sort_variable(a)) out.insert(a);
}

inline void collect_sort_vars(const Signature& sig, const ExprPtr& e, std::set<std::string>& out) {
  if (!e) return;
  walk(*e, [&](const Expr& n) {
    collect_sort_vars(sig, n.args, out);
    if (n.kind == ExprKind::variable && sig.is_sort_variable(n.name)) out.insert(n.name);
  });
}

inline void collect_sort_vars(const Signature& sig, const Body& body, std::set<std::string>& out) {
  for (const auto& item : body) {
    if (const auto* lit = std::get_if<FluentLiteral>(&item)) {
      collect_sort_vars(sig, lit->args, out);
      if (sig.is_sort_variable(lit->value)) out.insert(lit->value);
    } else if (const auto* c = std::get_if<Condition>(&item)) {
      collect_sort_vars(sig, c->lhs, out);
      collect_sort_vars(sig, c->rhs, out);
    } else {
      collect_sort_vars(sig, std::get<FactAtom>(item).args, out);
    }
  }
}

inline void collect_sort_vars(const Signature& sig, const Head& h, std::set<std::string>& out) {
  collect_sort_vars(sig, h.args, out);
  if (sig.is_sort_variable(h.value)) out.insert(h.value);
  collect_sort_vars(sig, h.expr, out);
}

inline std::vector<std::string> subst_args(const std::vector<std::string>& args, const Substitution& m) {
  std::vector<std::string> out;
  out.reserve(args.size());
  for (const auto& a : args) out.push_back(substitute(a, m));
  return out;
}

// Looks up a rigid function: name(args..., value).
inline std::optional<std::string> fact_function(const Signature& sig, const std::string& name,
                                                const std::vector<std::string>& args) {
  for (const auto& f : sig.facts) {
    if (f.name != name || f.args.size() != args.size() + 1) continue;
    if (std::equal(args.begin(), args.end(), f.args.begin())) return f.args.back();
  }
  return std::nullopt;
}

// Substitutes sort and fact-bound variables; nullopt when a rigid function has
// no defining fact for this instance.
inline std::optional<ExprPtr> subst_expr(const Signature& sig, const ExprPtr& e, const Substitution& m) {
  if (!e) return e;
  switch (e->kind) {
    case ExprKind::variable: {
      auto it = m.find(e->name);
      if (it == m.end()) return e;
      try {
        return Expr::make_number(parse_rational(it->second));
      } catch (const NumberFormatError&) {
        throw GroundingError("variable " + e->name + " is bound to non-numeric " + it->second + " inside arithmetic");
      }
    }
    case ExprKind::fluent: return Expr::make_fluent(e->name, subst_args(e->args, m), e->applied);
    case ExprKind::call: {
      if (sig.is_fact(e->name)) {
        auto args = subst_args(e->args, m);
        for (const auto& a : args)
          if (is_variable_name(a)) throw GroundingError("unbound variable " + a + " in " + e->name);
        auto v = fact_function(sig, e->name, args);
        if (!v) return std::nullopt;
        return Expr::make_number(parse_rational(*v));
      }
      std::vector<ExprPtr> children;
      for (const auto& c : e->children) {
        auto s = subst_expr(sig, c, m);
        if (!s) return std::nullopt;
        children.push_back(*s);
      }
      return Expr::make_call(e->name, std::move(children));
    }
    case ExprKind::negate: {
      auto s = subst_expr(sig, e->children[0], m);
      if (!s) return std::nullopt;
      return Expr::make_negate(*s);
    }
    case ExprKind::binary: {
      auto l = subst_expr(sig, e->children[0], m);
      auto r = subst_expr(sig, e->children[1], m);
      if (!l || !r) return std::nullopt;
      return Expr::make_binary(e->op, *l, *r);
    }
    default: return e;
  }
}

// All extensions of `m` satisfying the rigid fact atoms of a body.
inline std::vector<Substitution> join_facts(const Signature& sig, const Body& body, const Substitution& m) {
  std::vector<Substitution> current{m};
  for (const auto& item : body) {
    const auto* fa = std::get_if<FactAtom>(&item);
    if (!fa) continue;
    std::vector<Substitution> next;
    if (fa->negated) {
      for (const auto& partial : current) {
        bool any = false;
        for (const auto& f : sig.facts) {
          if (f.name != fa->name || f.args.size() != fa->args.size()) continue;
          bool ok = true;
          for (std::size_t i = 0; i < f.args.size() && ok; ++i) {
            std::string a = substitute(fa->args[i], partial);
            ok = is_variable_name(a) || a == f.args[i];
          }
          any = any || ok;
        }
        if (!any) next.push_back(partial);
      }
      current = std::move(next);
      continue;
    }
    for (const auto& partial : current) {
      for (const auto& f : sig.facts) {
        if (f.name != fa->name || f.args.size() != fa->args.size()) continue;
        Substitution ext = partial;
        bool ok = true;
        for (std::size_t i = 0; i < f.args.size() && ok; ++i) {
          std::string a = substitute(fa->args[i], ext);
          if (is_variable_name(a)) ext[a] = f.args[i];
          else ok = a == f.args[i];
        }
        if (ok) next.push_back(std::move(ext));
      }
    }
    current = std::move(next);
  }
  return current;
}

inline std::optional<Body> subst_body(const Signature& sig, const Body& body, const Substitution& m) {
  Body out;
  for (const auto& item : body) {
    if (const auto* lit = std::get_if<FluentLiteral>(&item)) {
      out.push_back(FluentLiteral{lit->fluent, subst_args(lit->args, m), lit->polarity, substitute(lit->value, m)});
    } else if (const auto* c = std::get_if<Condition>(&item)) {
      auto l = subst_expr(sig, c->lhs, m);
      auto r = subst_expr(sig, c->rhs, m);
      if (!l || !r) return std::nullopt;
      out.push_back(Condition{*l, c->rel, *r});
    }
  }
  return out;
}

// Value variables must be bound by a binder before use; T only in heads.
inline void check_bindings(const Body& body, const Head* head, const Statement& st) {
  std::set<std::string> bound;
  auto free_vars = [&](const ExprPtr& e, std::set<std::string>& out) {
    if (!e) return;
    walk(*e, [&](const Expr& n) {
      if (n.kind == ExprKind::variable && !bound.count(n.name)) out.insert(n.name);
    });
  };
  auto fail = [&](const std::string& v) {
    throw GroundingError("line " + std::to_string(st.pos.line) + ": variable " + v +
                         " is not bound by a sort, a fact, or an equality in the body");
  };
  for (const auto& item : body) {
    const auto* c = std::get_if<Condition>(&item);
    if (!c) continue;
    std::set<std::string> fl, fr;
    free_vars(c->lhs, fl);
    free_vars(c->rhs, fr);
    if (c->rel == Relation::eq && fl.empty() && fr.size() == 1 && c->rhs->kind == ExprKind::variable) {
      bound.insert(*fr.begin());
    } else if (c->rel == Relation::eq && fr.empty() && fl.size() == 1 && c->lhs->kind == ExprKind::variable) {
      bound.insert(*fl.begin());
    } else if (!fl.empty() || !fr.empty()) {
      fail(*(fl.empty() ? fr : fl).begin());
    }
  }
  if (head && head->expr) {
    std::set<std::string> fh;
    free_vars(head->expr, fh);
    fh.erase(kTimeVariable);
    if (!fh.empty()) fail(*fh.begin());
  }
}

}  // namespace detail

// Replaces every sort variable by each element of its sort. Instances whose
// rigid-fact preconditions have no matching fact are dropped.
inline GroundActionDescription ground(const ActionDescription& ad) {
  const Signature& sig = ad.signature;
  GroundActionDescription out;
  out.signature = sig;
  for (const auto& st : ad.statements) {
    std::set<std::string> vars;
    const Body* body = nullptr;
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          body = &s.body;
          detail::collect_sort_vars(sig, s.body, vars);
          if constexpr (std::is_same_v<S, StateConstraint>) {
            detail::collect_sort_vars(sig, s.head, vars);
          } else if constexpr (std::is_same_v<S, DynamicLaw>) {
            detail::collect_sort_vars(sig, s.head, vars);
            detail::collect_sort_vars(sig, s.action.args, vars);
          } else if constexpr (std::is_same_v<S, Executability>) {
            for (const auto& a : s.actions) detail::collect_sort_vars(sig, a.args, vars);
          } else {
            detail::collect_sort_vars(sig, s.action.args, vars);
          }
        },
        st.form);

    std::set<std::string> seen;
    for (const auto& assignment : detail::variable_assignments(sig, vars)) {
      for (const auto& m : detail::join_facts(sig, *body, assignment)) {
        auto gbody = detail::subst_body(sig, *body, m);
        if (!gbody) continue;
        Statement g;
        g.pos = st.pos;
        bool keep = true;
        auto ground_head = [&](const Head& h) {
          Head out_head{h.fluent, detail::subst_args(h.args, m), detail::substitute(h.value, m), nullptr};
          if (h.expr) {
            auto e = detail::subst_expr(sig, h.expr, m);
            if (!e) keep = false;
            else out_head.expr = *e;
          }
          return out_head;
        };
        auto ground_action = [&](const ActionRef& a) { return ActionRef{a.name, detail::subst_args(a.args, m)}; };
        if (const auto* sc = std::get_if<StateConstraint>(&st.form)) {
          g.form = StateConstraint{ground_head(sc->head), *gbody};
        } else if (const auto* law = std::get_if<DynamicLaw>(&st.form)) {
          g.form = DynamicLaw{ground_action(law->action), ground_head(law->head), *gbody};
        } else if (const auto* ex = std::get_if<Executability>(&st.form)) {
          Executability e;
          for (const auto& a : ex->actions) e.actions.push_back(ground_action(a));
          e.body = *gbody;
          g.form = std::move(e);
        } else {
          const auto& tr = std::get<Trigger>(st.form);
          g.form = Trigger{*gbody, ground_action(tr.action)};
        }
        if (!keep) continue;
        const Head* head = nullptr;
        if (const auto* sc = std::get_if<StateConstraint>(&g.form)) head = &sc->head;
        if (const auto* law = std::get_if<DynamicLaw>(&g.form)) head = &law->head;
        std::visit([&](const auto& s) { detail::check_bindings(s.body, head, g); }, g.form);
        std::string key = statement_str(g, sig);
        if (!seen.insert(key).second) continue;
        out.statements.push_back(std::move(g));
      }
    }
  }
  return out;
}

// Symbol-table sweep: every fluent, action and sort element mentioned by a
// ground statement is declared.
inline std::vector<std::string> undeclared_symbols(const GroundActionDescription& g) {
  const Signature& sig = g.signature;
  std::vector<std::string> out;
  auto check_term = [&](const std::string& name, const std::vector<std::string>& args, bool action) {
    const std::vector<std::string>* params = nullptr;
    if (action) {
      if (const auto* a = sig.action(name)) params = &a->params;
    } else if (const auto* f = sig.fluent(name)) {
      params = &f->params;
    }
    if (!params || params->size() != args.size()) {
      out.push_back(name);
      return;
    }
    for (std::size_t i = 0; i < args.size(); ++i) {
      const SortDecl* s = sig.sort((*params)[i]);
      if (!s || std::find(s->elements.begin(), s->elements.end(), args[i]) == s->elements.end())
        out.push_back(args[i]);
    }
  };
  auto check_expr = [&](const ExprPtr& e) {
    if (!e) return;
    walk(*e, [&](const Expr& n) {
      if (n.kind == ExprKind::fluent) check_term(n.name, n.args, false);
    });
  };
  auto check_body = [&](const Body& b) {
    for (const auto& item : b) {
      if (const auto* lit = std::get_if<FluentLiteral>(&item)) check_term(lit->fluent, lit->args, false);
      else if (const auto* c = std::get_if<Condition>(&item)) {
        check_expr(c->lhs);
        check_expr(c->rhs);
      }
    }
  };
  for (const auto& st : g.statements) {
    std::visit(
        [&](const auto& s) {
          using S = std::decay_t<decltype(s)>;
          check_body(s.body);
          if constexpr (std::is_same_v<S, StateConstraint> || std::is_same_v<S, DynamicLaw>) {
            check_term(s.head.fluent, s.head.args, false);
            check_expr(s.head.expr);
          }
          if constexpr (std::is_same_v<S, DynamicLaw> || std::is_same_v<S, Trigger>) check_term(s.action.name, s.action.args, true);
          if constexpr (std::is_same_v<S, Executability>)
            for (const auto& a : s.actions) check_term(a.name, a.args, true);
        },
        st.form);
  }
  return out;
}

// Every ground instance of every declared action, in declaration order.
inline std::vector<ActionRef> ground_actions(const Signature& sig) {
  std::vector<ActionRef> out;
  for (const auto& a : sig.actions)
    for (auto& args : sig.instances(a.params)) out.push_back(ActionRef{a.name, std::move(args)});
  return out;
}

// Every ground instance of every declared fluent.
inline std::vector<Term> ground_fluents(const Signature& sig) {
  std::vector<Term> out;
  for (const auto& f : sig.fluents)
    for (auto& args : sig.instances(f.params)) out.push_back(Term{f.name, std::move(args)});
  return out;
}

}  // namespace hydraplan
