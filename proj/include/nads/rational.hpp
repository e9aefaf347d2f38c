#pragma once

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>

namespace nads {

using Rational = mpq_class;
using Integer = mpz_class;

class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Parses "p/q", an integer, or a decimal such as "0.375" / "1e-3" exactly.
Rational parse_rational(std::string_view text);

// Exact binary value of a finite double.
Rational rational_from_double(double v);

// "p/q" (or "p" for integers).
std::string to_string(const Rational& r);

// Nearest double (get_d truncates).
double to_double(const Rational& r);

inline Rational abs(const Rational& r) { return r < 0 ? Rational(-r) : r; }

// 2^-k as an exact rational.
Rational pow2_neg(unsigned long k);

// floor and ceil of a rational as integers.
Integer floor(const Rational& r);
Integer ceil(const Rational& r);

}  // namespace nads
