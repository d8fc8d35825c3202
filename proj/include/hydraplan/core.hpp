#pragma once

#include "hydraplan/rational.hpp"

#include <compare>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hydraplan {

// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UndefinedTimeError : public Error {
public:
  UndefinedTimeError() : Error("no arithmetic is defined on omega") {}
};

class OutOfDomainError : public Error {
public:
  using Error::Error;
};

class UnsupportedExpressionError : public Error {
public:
  using Error::Error;
};

// A point of the time sort: a finite non-negative rational or omega.
class TimeValue {
public:
  TimeValue() : value_(Rational(0)) {}
  TimeValue(Rational v) : value_(std::move(v)) {}  // NOLINT(google-explicit-constructor)
  TimeValue(int v) : value_(Rational(v)) {}        // NOLINT(google-explicit-constructor)

  static TimeValue omega() {
    TimeValue t;
    t.value_.reset();
    return t;
  }

  bool is_omega() const { return !value_.has_value(); }
  bool is_finite() const { return value_.has_value(); }

  const Rational& value() const {
    if (!value_) throw UndefinedTimeError();
    return *value_;
  }

  friend bool operator==(const TimeValue& a, const TimeValue& b) { return a.value_ == b.value_; }
  friend std::strong_ordering operator<=>(const TimeValue& a, const TimeValue& b) {
    if (a.is_omega() || b.is_omega()) {
      if (a.is_omega() && b.is_omega()) return std::strong_ordering::equal;
      return a.is_omega() ? std::strong_ordering::greater : std::strong_ordering::less;
    }
    if (*a.value_ < *b.value_) return std::strong_ordering::less;
    if (*a.value_ > *b.value_) return std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }

  std::string str() const { return is_omega() ? "omega" : to_string(*value_); }

private:
  std::optional<Rational> value_;
};

inline std::strong_ordering compare_rational(const Rational& a, const Rational& b) {
  if (a < b) return std::strong_ordering::less;
  if (a > b) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

inline std::strong_ordering compare_optional(const std::optional<Rational>& a,
                                             const std::optional<Rational>& b) {
  if (a.has_value() != b.has_value())
    return a.has_value() ? std::strong_ordering::greater : std::strong_ordering::less;
  return a ? compare_rational(*a, *b) : std::strong_ordering::equal;
}

/// t -> clamp(base + rate * (t - anchor), floor, ceiling).
///
/// `base` is the unclamped value at `anchor`. Every process of the bundled
/// domains has this shape, and its level sets can be solved in closed form.
struct ClampedLinear {
  Rational base;
  Rational rate;
  Rational anchor;
  std::optional<Rational> floor;
  std::optional<Rational> ceiling;

  static ClampedLinear constant(Rational v, Rational anchor = 0) {
    return ClampedLinear{std::move(v), 0, std::move(anchor), std::nullopt, std::nullopt};
  }

  void check() const {
    if (floor && ceiling && *floor > *ceiling)
      throw Error("clamped-linear floor exceeds ceiling");
  }

  Rational clamp(Rational v) const {
    if (floor && v < *floor) v = *floor;
    if (ceiling && v > *ceiling) v = *ceiling;
    return v;
  }

  friend bool operator==(const ClampedLinear& a, const ClampedLinear& b) {
    return a.base == b.base && a.rate == b.rate && a.anchor == b.anchor && a.floor == b.floor &&
           a.ceiling == b.ceiling;
  }
  friend std::strong_ordering operator<=>(const ClampedLinear& a, const ClampedLinear& b) {
    if (auto c = compare_rational(a.base, b.base); c != 0) return c;
    if (auto c = compare_rational(a.rate, b.rate); c != 0) return c;
    if (auto c = compare_rational(a.anchor, b.anchor); c != 0) return c;
    if (auto c = compare_optional(a.floor, b.floor); c != 0) return c;
    return compare_optional(a.ceiling, b.ceiling);
  }

  std::string str() const {
    std::string s = "lin(" + to_string(base) + ", " + to_string(rate) + ", " + to_string(anchor) + ")";
    if (floor || ceiling)
      s += " clamp [" + (floor ? to_string(*floor) : std::string("_")) + ", " +
           (ceiling ? to_string(*ceiling) : std::string("_")) + "]";
    return s;
  }
};

inline Rational eval_process(const ClampedLinear& p, const TimeValue& t) {
  if (t.is_omega()) throw UndefinedTimeError();
  if (t.value() < p.anchor)
    throw OutOfDomainError("time " + t.str() + " precedes process anchor " + to_string(p.anchor));
  return p.clamp(p.base + p.rate * (t.value() - p.anchor));
}

// Earliest t >= anchor with eval_process(p, t) == target, if any.
inline std::optional<Rational> invert_clamped_linear(const ClampedLinear& p, const Rational& target) {
  if (p.clamp(p.base) == target) return p.anchor;
  if (p.rate == 0) return std::nullopt;
  if (p.floor && target < *p.floor) return std::nullopt;
  if (p.ceiling && target > *p.ceiling) return std::nullopt;
  Rational t = p.anchor + (target - p.base) / p.rate;
  if (t < p.anchor) return std::nullopt;
  return t;
}

// h + c1 (t - t0) + c2 (t - t0)^2; the free-fall example is the only user.
inline Rational eval_poly_demo(const std::vector<Rational>& coefficients, const Rational& t0,
                               const Rational& t) {
  if (coefficients.size() > 3)
    throw UnsupportedExpressionError("polynomial processes of degree > 2 are not supported");
  Rational dt = t - t0;
  Rational acc = 0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) acc = acc * dt + *it;
  return acc;
}

// A ground fluent (or reserved) term: name(arg, ...).
struct Term {
  std::string name;
  std::vector<std::string> args;

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;

  std::string str() const {
    if (args.empty()) return name;
    std::string s = name + "(";
    for (std::size_t i = 0; i < args.size(); ++i) s += (i ? "," : "") + args[i];
    return s + ")";
  }
};

struct OmegaTag {
  friend bool operator==(OmegaTag, OmegaTag) { return true; }
  friend std::strong_ordering operator<=>(OmegaTag, OmegaTag) { return std::strong_ordering::equal; }
};

// Value of a fluent: a constant symbol, a rational, a process function, or
// omega (only ever the value of `end`).
using Value = std::variant<std::string, Rational, ClampedLinear, OmegaTag>;

inline std::strong_ordering compare_values(const Value& a, const Value& b) {
  if (a.index() != b.index()) return a.index() <=> b.index();
  switch (a.index()) {
    case 0: return std::get<0>(a) <=> std::get<0>(b);
    case 1: return compare_rational(std::get<1>(a), std::get<1>(b));
    case 2: return std::get<2>(a) <=> std::get<2>(b);
    default: return std::strong_ordering::equal;
  }
}

inline std::string value_str(const Value& v) {
  switch (v.index()) {
    case 0: return std::get<0>(v);
    case 1: return to_string(std::get<1>(v));
    case 2: return std::get<2>(v).str();
    default: return "omega";
  }
}

inline Value time_value(const TimeValue& t) {
  if (t.is_omega()) return OmegaTag{};
  return t.value();
}

struct Atom {
  Term term;
  Value value;

  friend bool operator==(const Atom& a, const Atom& b) {
    return a.term == b.term && compare_values(a.value, b.value) == 0;
  }
  friend std::strong_ordering operator<=>(const Atom& a, const Atom& b) {
    if (auto c = a.term <=> b.term; c != 0) return c;
    return compare_values(a.value, b.value);
  }

  std::string str() const { return term.str() + "=" + value_str(value); }
};

using AtomSet = std::set<Atom>;

inline bool is_consistent(const AtomSet& atoms) {
  const Atom* prev = nullptr;
  for (const auto& a : atoms) {
    if (prev && prev->term == a.term) return false;
    prev = &a;
  }
  return true;
}

// First value bound to `term`, if any.
inline const Value* lookup(const AtomSet& atoms, const Term& term) {
  auto it = atoms.lower_bound(Atom{term, std::string()});
  if (it != atoms.end() && it->term == term) return &it->value;
  return nullptr;
}

enum class Polarity { equal, not_equal };

struct AtomLiteral {
  Term term;
  Polarity polarity = Polarity::equal;
  Value value;

  std::string str() const {
    return term.str() + (polarity == Polarity::equal ? "=" : "!=") + value_str(value);
  }
};

// L |= t=y iff t=y in L; L |= t!=y iff L |= t=y0 for some y0 != y.
inline bool literal_holds(const AtomSet& atoms, const AtomLiteral& lit) {
  if (lit.polarity == Polarity::equal) return atoms.count(Atom{lit.term, lit.value}) > 0;
  auto it = atoms.lower_bound(Atom{lit.term, std::string()});
  for (; it != atoms.end() && it->term == lit.term; ++it)
    if (compare_values(it->value, lit.value) != 0) return true;
  return false;
}

}  // namespace hydraplan
