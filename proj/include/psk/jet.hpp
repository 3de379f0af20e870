#pragma once

#include <array>
#include <algorithm>
#include <ostream>

#include "psk/scalar.hpp"

namespace psk {

// Truncated Taylor polynomial in two nilpotent parameters e_t, e_s.
// Orders: ot in {0,1,2} (e_t^{ot+1} = 0), os in {0,1} (e_s^{os+1} = 0).
// An axis with order 0 carries no information along it and adopts the
// other operand's order; two non-constant axes combine by the smaller order.
enum class JetShape { Const, T1, T2, TS };

template <class T>
class Jet {
 public:
  Jet() { a_.fill(T(0)); }
  Jet(const T& v) {  // NOLINT: implicit lift of constants
    a_.fill(T(0));
    a_[0] = v;
  }
  Jet(int v) : Jet(T(v)) {}  // NOLINT
  Jet(const T& v, JetShape shape) : Jet(v) { set_shape(shape); }

  static Jet variable_t(const T& v, int order) {
    Jet j(v);
    j.ot_ = order;
    if (order >= 1) j.at(1, 0) = T(1);
    return j;
  }

  void set_shape(JetShape s) {
    switch (s) {
      case JetShape::Const: ot_ = 0; os_ = 0; break;
      case JetShape::T1: ot_ = 1; os_ = 0; break;
      case JetShape::T2: ot_ = 2; os_ = 0; break;
      case JetShape::TS: ot_ = 1; os_ = 1; break;
    }
    truncate();
  }

  int ot() const { return ot_; }
  int os() const { return os_; }
  void set_orders(int ot, int os) {
    ot_ = ot;
    os_ = os;
    truncate();
  }

  T& at(int i, int j) { return a_[i * 2 + j]; }
  const T& at(int i, int j) const { return a_[i * 2 + j]; }
  T coef(int i, int j) const {
    if (i > ot_ || j > os_) return T(0);
    return at(i, j);
  }

  const T& value() const { return a_[0]; }
  // d/dt, d2/dt2, d/ds, d2/dtds at the expansion point.
  T dt() const { return coef(1, 0); }
  T dtt() const { return T(2) * coef(2, 0); }
  T ds() const { return coef(0, 1); }
  T dts() const { return coef(1, 1); }

  bool is_const() const { return ot_ == 0 && os_ == 0; }

  Jet& operator+=(const Jet& o) {
    merge(o);
    for (int i = 0; i <= ot_; ++i)
      for (int j = 0; j <= os_; ++j) at(i, j) += o.coef(i, j);
    return *this;
  }
  Jet& operator-=(const Jet& o) {
    merge(o);
    for (int i = 0; i <= ot_; ++i)
      for (int j = 0; j <= os_; ++j) at(i, j) -= o.coef(i, j);
    return *this;
  }
  Jet& operator*=(const Jet& o) {
    Jet r;
    r.ot_ = combine(ot_, o.ot_);
    r.os_ = combine(os_, o.os_);
    for (int i = 0; i <= r.ot_; ++i)
      for (int j = 0; j <= r.os_; ++j) {
        T s(0);
        for (int i1 = 0; i1 <= i; ++i1)
          for (int j1 = 0; j1 <= j; ++j1) s += coef(i1, j1) * o.coef(i - i1, j - j1);
        r.at(i, j) = s;
      }
    *this = r;
    return *this;
  }
  Jet& operator/=(const Jet& o) {
    *this *= o.inverse();
    return *this;
  }

  // 1/(v(1+n)) = (1 - n + n^2 - n^3)/v; n^4 = 0 for every supported shape.
  Jet inverse() const {
    T v0 = value();
    Jet n = *this;
    n.at(0, 0) = T(0);
    for (auto& c : n.a_) c /= v0;
    Jet r(T(1));
    r.ot_ = ot_;
    r.os_ = os_;
    Jet p = n;
    T sign(-1);
    for (int k = 1; k <= 3; ++k) {
      Jet term = p;
      for (auto& c : term.a_) c *= sign;
      r += term;
      p *= n;
      sign = -sign;
    }
    for (auto& c : r.a_) c /= v0;
    return r;
  }

  Jet operator-() const {
    Jet r = *this;
    for (auto& c : r.a_) c = -c;
    return r;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, const Jet& b) { return a *= b; }
  friend Jet operator/(Jet a, const Jet& b) { return a /= b; }

  friend bool operator==(const Jet& a, const Jet& b) {
    int ot = std::max(a.ot_, b.ot_), os = std::max(a.os_, b.os_);
    for (int i = 0; i <= ot; ++i)
      for (int j = 0; j <= os; ++j)
        if (!(a.coef(i, j) == b.coef(i, j))) return false;
    return true;
  }
  friend bool operator!=(const Jet& a, const Jet& b) { return !(a == b); }

  friend std::ostream& operator<<(std::ostream& os, const Jet& j) {
    os << "[";
    for (int i = 0; i <= j.ot_; ++i)
      for (int k = 0; k <= j.os_; ++k) {
        if (i || k) os << ", ";
        os << j.at(i, k);
      }
    return os << "]";
  }

 private:
  static int combine(int a, int b) {
    if (a == 0) return b;
    if (b == 0) return a;
    return std::min(a, b);
  }
  void merge(const Jet& o) {
    int ot = combine(ot_, o.ot_), os = combine(os_, o.os_);
    ot_ = ot;
    os_ = os;
    truncate();
  }
  void truncate() {
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 2; ++j)
        if (i > ot_ || j > os_) at(i, j) = T(0);
  }

  std::array<T, 6> a_;
  int ot_ = 0, os_ = 0;
};

template <class T>
bool is_zero(const Jet<T>& x, double tol = kDefaultTol) {
  for (int i = 0; i <= x.ot(); ++i)
    for (int j = 0; j <= x.os(); ++j)
      if (!is_zero(x.coef(i, j), tol)) return false;
  return true;
}

template <class T>
bool exactly_zero(const Jet<T>& x) {
  for (int i = 0; i <= x.ot(); ++i)
    for (int j = 0; j <= x.os(); ++j)
      if (!exactly_zero(x.coef(i, j))) return false;
  return true;
}

template <class T>
double magnitude(const Jet<T>& x) {
  double m = 0;
  for (int i = 0; i <= x.ot(); ++i)
    for (int j = 0; j <= x.os(); ++j) m = std::max(m, magnitude(x.coef(i, j)));
  return m;
}

// d/dt of a jet; the t-order drops by one.
template <class T>
Jet<T> derivative_t(const Jet<T>& x) {
  Jet<T> r(T(0));
  r.set_orders(std::max(0, x.ot() - 1), x.os());
  for (int i = 1; i <= x.ot(); ++i)
    for (int j = 0; j <= x.os(); ++j) r.at(i - 1, j) = T(i) * x.coef(i, j);
  return r;
}

// d/ds of a jet; the s-order drops to zero.
template <class T>
Jet<T> derivative_s(const Jet<T>& x) {
  Jet<T> r(T(0));
  r.set_orders(x.ot(), 0);
  if (x.os() >= 1)
    for (int i = 0; i <= x.ot(); ++i) r.at(i, 0) = x.coef(i, 1);
  return r;
}

// exp(c*e_t + d*e_s) truncated to the given orders.
template <class T>
Jet<T> exp_jet(const T& c, const T& d, int ot, int os) {
  Jet<T> r(T(1));
  r.set_orders(ot, os);
  T ck(1);
  T fact(1);
  for (int i = 0; i <= ot; ++i) {
    if (i > 0) {
      ck *= c;
      fact *= T(i);
    }
    T base = ck / fact;
    r.at(i, 0) = base;
    if (os >= 1) r.at(i, 1) = base * d;
  }
  return r;
}

}  // namespace psk
