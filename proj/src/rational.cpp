#include "nads/rational.hpp"

#include <cctype>
#include <cmath>

namespace nads {

namespace {

bool all_digits(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) return false;
  return true;
}

Integer pow10(unsigned long e) {
  Integer r;
  mpz_ui_pow_ui(r.get_mpz_t(), 10, e);
  return r;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string_view s = text;
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  if (s.empty()) throw InvalidInput("empty rational literal");

  bool negative = false;
  std::string_view body = s;
  if (body.front() == '-' || body.front() == '+') {
    negative = body.front() == '-';
    body.remove_prefix(1);
  }

  Rational out;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    auto num = body.substr(0, slash);
    auto den = body.substr(slash + 1);
    if (!all_digits(num) || !all_digits(den)) throw InvalidInput("bad rational literal: " + std::string(text));
    Integer d(std::string(den), 10);
    if (d == 0) throw InvalidInput("zero denominator: " + std::string(text));
    out = Rational(Integer(std::string(num), 10), d);
    out.canonicalize();
  } else {
    long exponent = 0;
    std::string_view mant = body;
    if (auto e = body.find_first_of("eE"); e != std::string_view::npos) {
      auto exp_text = body.substr(e + 1);
      bool exp_neg = false;
      if (!exp_text.empty() && (exp_text.front() == '-' || exp_text.front() == '+')) {
        exp_neg = exp_text.front() == '-';
        exp_text.remove_prefix(1);
      }
      if (!all_digits(exp_text) || exp_text.size() > 6) throw InvalidInput("bad exponent: " + std::string(text));
      exponent = std::stol(std::string(exp_text));
      if (exp_neg) exponent = -exponent;
      mant = body.substr(0, e);
    }
    std::string digits;
    long frac_digits = 0;
    if (auto dot = mant.find('.'); dot != std::string_view::npos) {
      auto ip = mant.substr(0, dot);
      auto fp = mant.substr(dot + 1);
      if ((ip.empty() && fp.empty()) || (!ip.empty() && !all_digits(ip)) || (!fp.empty() && !all_digits(fp)))
        throw InvalidInput("bad decimal literal: " + std::string(text));
      digits = std::string(ip) + std::string(fp);
      frac_digits = static_cast<long>(fp.size());
    } else {
      if (!all_digits(mant)) throw InvalidInput("bad number literal: " + std::string(text));
      digits = std::string(mant);
    }
    Integer m(digits.empty() ? std::string("0") : digits, 10);
    long scale = exponent - frac_digits;
    if (scale >= 0) {
      out = Rational(m * pow10(static_cast<unsigned long>(scale)));
    } else {
      out = Rational(m, pow10(static_cast<unsigned long>(-scale)));
      out.canonicalize();
    }
  }
  if (negative) out = -out;
  return out;
}

Rational rational_from_double(double v) {
  if (!std::isfinite(v)) throw InvalidInput("non-finite value");
  Rational r;
  mpq_set_d(r.get_mpq_t(), v);
  return r;
}

std::string to_string(const Rational& r) { return r.get_str(); }

double to_double(const Rational& r) {
  double d = r.get_d();
  if (!std::isfinite(d)) return d;
  double other = std::nextafter(d, r > rational_from_double(d) ? INFINITY : -INFINITY);
  if (!std::isfinite(other)) return d;
  Rational ed = abs(Rational(r - rational_from_double(d)));
  Rational eo = abs(Rational(r - rational_from_double(other)));
  return eo < ed ? other : d;
}

Rational pow2_neg(unsigned long k) {
  Rational r(1);
  mpq_div_2exp(r.get_mpq_t(), r.get_mpq_t(), k);
  return r;
}

Integer floor(const Rational& r) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

Integer ceil(const Rational& r) {
  Integer q;
  mpz_cdiv_q(q.get_mpz_t(), r.get_num_mpz_t(), r.get_den_mpz_t());
  return q;
}

}  // namespace nads
