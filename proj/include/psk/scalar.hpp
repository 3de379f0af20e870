#pragma once

#include <gmpxx.h>

#include <cmath>
#include <string>

namespace psk {

using Rational = mpq_class;

inline constexpr double kDefaultTol = 1e-10;

// Zero tests. Exact types ignore the tolerance; floats compare |x| <= tol.
inline bool is_zero(const Rational& x, double = kDefaultTol) { return sgn(x) == 0; }
inline bool is_zero(double x, double tol = kDefaultTol) { return std::fabs(x) <= tol; }

inline bool exactly_zero(const Rational& x) { return sgn(x) == 0; }
inline bool exactly_zero(double x) { return x == 0.0; }

inline double to_double(const Rational& x) { return x.get_d(); }
inline double to_double(double x) { return x; }

inline double magnitude(const Rational& x) { return std::fabs(x.get_d()); }
inline double magnitude(double x) { return std::fabs(x); }

inline std::string to_string(const Rational& x) { return x.get_str(); }
std::string to_string(double x);

Rational parse_rational(const std::string& s);

// Convert a number to the scalar type T.
template <class T> T from_rational(const Rational& q);
template <> inline Rational from_rational<Rational>(const Rational& q) { return q; }
template <> inline double from_rational<double>(const Rational& q) { return q.get_d(); }

template <class T> T from_double(double x);
template <> inline double from_double<double>(double x) { return x; }
// Exact binary value of the double.
template <> inline Rational from_double<Rational>(double x) { return Rational(x); }

template <class T>
T ipow(const T& x, int e) {
  if (e < 0) return T(1) / ipow(x, -e);
  T r(1), b(x);
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

}  // namespace psk
