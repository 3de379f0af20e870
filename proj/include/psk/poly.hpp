#pragma once

#include <vector>

#include "psk/jet.hpp"
#include "psk/scalar.hpp"

namespace psk {

// Dense polynomial in z, c[i] is the coefficient of z^i.
template <class T>
struct Poly {
  std::vector<T> c;

  Poly() = default;
  explicit Poly(std::vector<T> coeffs) : c(std::move(coeffs)) {}
  static Poly constant(const T& v) { return Poly(std::vector<T>{v}); }
  static Poly monomial(const T& v, int deg) {
    std::vector<T> r(deg + 1, T(0));
    r[deg] = v;
    return Poly(std::move(r));
  }

  std::size_t size() const { return c.size(); }
  T coef(std::size_t i) const { return i < c.size() ? c[i] : T(0); }

  // Highest index with a nonzero (exactly) coefficient; -1 for the zero polynomial.
  int degree() const {
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
      if (!exactly_zero(c[i])) return i;
    return -1;
  }
  int degree(double tol) const {
    for (int i = static_cast<int>(c.size()) - 1; i >= 0; --i)
      if (!is_zero(c[i], tol)) return i;
    return -1;
  }
  void trim() { c.resize(degree() + 1); }

  T operator()(const T& z) const {
    T r(0);
    for (std::size_t i = c.size(); i-- > 0;) r = r * z + c[i];
    return r;
  }

  Poly& operator+=(const Poly& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size(), T(0));
    for (std::size_t i = 0; i < o.c.size(); ++i) c[i] += o.c[i];
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    if (o.c.size() > c.size()) c.resize(o.c.size(), T(0));
    for (std::size_t i = 0; i < o.c.size(); ++i) c[i] -= o.c[i];
    return *this;
  }
  Poly& operator*=(const T& s) {
    for (auto& x : c) x *= s;
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }
  friend Poly operator*(Poly a, const T& s) { return a *= s; }
  friend Poly operator*(const T& s, Poly a) { return a *= s; }
  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.c.empty() || b.c.empty()) return Poly();
    std::vector<T> r(a.c.size() + b.c.size() - 1, T(0));
    for (std::size_t i = 0; i < a.c.size(); ++i)
      for (std::size_t j = 0; j < b.c.size(); ++j) r[i + j] += a.c[i] * b.c[j];
    return Poly(std::move(r));
  }

  // Multiply by z^k (k >= 0).
  Poly shifted(int k) const {
    std::vector<T> r(k, T(0));
    r.insert(r.end(), c.begin(), c.end());
    return Poly(std::move(r));
  }
  Poly truncated(int deg) const {
    std::vector<T> r(c.begin(), c.begin() + std::min<std::size_t>(c.size(), deg + 1));
    return Poly(std::move(r));
  }

  bool is_zero_poly() const { return degree() < 0; }
  bool is_zero_poly(double tol) const { return degree(tol) < 0; }
};

template <class T>
double magnitude(const Poly<T>& p) {
  double m = 0;
  for (const auto& x : p.c) m = std::max(m, magnitude(x));
  return m;
}

// Remainder of a modulo b (b must have a nonzero leading coefficient).
template <class T>
Poly<T> poly_mod(Poly<T> a, const Poly<T>& b) {
  int db = b.degree();
  T lead = b.c[db];
  a.trim();
  while (a.degree() >= db) {
    int da = a.degree();
    T q = a.c[da] / lead;
    for (int i = 0; i <= db; ++i) a.c[da - db + i] -= q * b.c[i];
    a.c[da] = T(0);
    a.trim();
  }
  return a;
}

template <class T>
Poly<T> poly_mod(Poly<T> a, const Poly<T>& b, double tol) {
  int db = b.degree(tol);
  T lead = b.c[db];
  while (true) {
    int da = a.degree(tol);
    if (da < db) break;
    T q = a.c[da] / lead;
    for (int i = 0; i <= db; ++i) a.c[da - db + i] -= q * b.c[i];
    a.c[da] = T(0);
  }
  a.c.resize(std::max(0, db));
  return a;
}

// Order-0 part of every coefficient.
template <class T>
Poly<T> values(const Poly<Jet<T>>& p) {
  Poly<T> r;
  for (const auto& x : p.c) r.c.push_back(x.value());
  return r;
}
template <class T>
Poly<T> d_dt(const Poly<Jet<T>>& p) {
  Poly<T> r;
  for (const auto& x : p.c) r.c.push_back(x.dt());
  return r;
}

template <class T>
Poly<T> d_ds(const Poly<Jet<T>>& p) {
  Poly<T> r;
  for (const auto& x : p.c) r.c.push_back(x.ds());
  return r;
}

}  // namespace psk
