#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace hydraplan {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

class NumberFormatError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline Integer parse_integer(std::string_view digits) {
  Integer v = 0;
  for (char c : digits) {
    if (!std::isdigit(static_cast<unsigned char>(c)))
      throw NumberFormatError("bad digit in number: " + std::string(digits));
    v = v * 10 + (c - '0');
  }
  return v;
}

}  // namespace detail

// Exact conversion of "12", "-3", "224.16", "1345/6" into a rational.
inline Rational parse_rational(std::string_view text) {
  if (text.empty()) throw NumberFormatError("empty number");
  bool negative = false;
  if (text.front() == '-' || text.front() == '+') {
    negative = text.front() == '-';
    text.remove_prefix(1);
  }
  if (text.empty()) throw NumberFormatError("sign without digits");

  Rational r;
  if (auto slash = text.find('/'); slash != std::string_view::npos) {
    Integer num = detail::parse_integer(text.substr(0, slash));
    Integer den = detail::parse_integer(text.substr(slash + 1));
    if (den == 0) throw NumberFormatError("zero denominator");
    r = Rational(num, den);
  } else if (auto dot = text.find('.'); dot != std::string_view::npos) {
    auto whole = text.substr(0, dot);
    auto frac = text.substr(dot + 1);
    if (whole.empty() && frac.empty()) throw NumberFormatError("lone '.'");
    Integer scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Integer num = (whole.empty() ? Integer(0) : detail::parse_integer(whole)) * scale +
                  (frac.empty() ? Integer(0) : detail::parse_integer(frac));
    r = Rational(num, scale);
  } else {
    r = Rational(detail::parse_integer(text));
  }
  return negative ? Rational(-r) : r;
}

// "num/den", or just "num" for integers.
inline std::string to_string(const Rational& r) {
  auto num = boost::multiprecision::numerator(r);
  auto den = boost::multiprecision::denominator(r);
  if (den == 1) return num.str();
  return num.str() + "/" + den.str();
}

inline bool is_integer(const Rational& r) {
  return boost::multiprecision::denominator(r) == 1;
}

// Decimal rendering rounded half away from zero.
inline std::string to_decimal(const Rational& r, int places = 2) {
  Integer scale = 1;
  for (int i = 0; i < places; ++i) scale *= 10;
  Rational scaled = r < 0 ? Rational(-r * scale) : Rational(r * scale);
  Integer num = boost::multiprecision::numerator(scaled);
  Integer den = boost::multiprecision::denominator(scaled);
  Integer q = num / den;
  if ((num % den) * 2 >= den) q += 1;
  std::string digits = q.str();
  if (places > 0) {
    if (digits.size() <= static_cast<std::size_t>(places))
      digits.insert(0, static_cast<std::size_t>(places) - digits.size() + 1, '0');
    digits.insert(digits.size() - static_cast<std::size_t>(places), ".");
  }
  if (r < 0 && q != 0) digits.insert(0, "-");
  return digits;
}

// Human rendering of a time or quantity: "35.00", or "224.17 (=1345/6)" when
// the two-place decimal is not exact.
inline std::string display(const Rational& r) {
  std::string dec = to_decimal(r, 2);
  if (parse_rational(dec) == r) return dec;
  return dec + " (=" + to_string(r) + ")";
}

}  // namespace hydraplan
