#include "psk/scalar.hpp"

#include <cstdio>
#include <stdexcept>

namespace psk {

std::string to_string(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

// Accepts "p", "p/q" and decimal forms such as "-1.25" or "3e-2".
Rational parse_rational(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty number");
  if (s.find_first_of(".eE") == std::string::npos) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("bad rational: " + s);
    if (q.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
    q.canonicalize();
    return q;
  }
  std::string mant = s;
  long exp10 = 0;
  auto epos = s.find_first_of("eE");
  if (epos != std::string::npos) {
    mant = s.substr(0, epos);
    exp10 = std::stol(s.substr(epos + 1));
  }
  bool neg = false;
  if (!mant.empty() && (mant[0] == '-' || mant[0] == '+')) {
    neg = mant[0] == '-';
    mant = mant.substr(1);
  }
  auto dot = mant.find('.');
  std::string digits = mant;
  if (dot != std::string::npos) {
    digits = mant.substr(0, dot) + mant.substr(dot + 1);
    exp10 -= static_cast<long>(mant.size() - dot - 1);
  }
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    throw std::invalid_argument("bad number: " + s);
  mpz_class num(digits, 10);
  mpz_class p10;
  mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  Rational q = exp10 >= 0 ? Rational(num * p10) : Rational(num, p10);
  q.canonicalize();
  return neg ? Rational(-q) : q;
}

}  // namespace psk
