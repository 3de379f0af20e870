#include "psk/psop.hpp"

namespace psk {

template <class T>
PsopFamily<T>::PsopFamily(MomentSystem<T> sys, int k, int l, double tol)
    : sys_(std::move(sys)), k_(k), l_(l), tol_(tol) {}

template <class T>
Jet<T> PsopFamily<T>::tau(int n) const {
  auto it = tau_.find(n);
  if (it != tau_.end()) return it->second;
  Jet<T> v = tau_pfaffian(sys_, n, k_, l_);
  tau_.emplace(n, v);
  return v;
}

template <class T>
Jet<T> PsopFamily<T>::tau_nonzero(int n) const {
  Jet<T> v = tau(n);
  if (is_zero(v.value(), tol_)) throw DegenerateTau("tau_" + std::to_string(n) + " vanishes");
  return v;
}

template <class T>
Poly<Jet<T>> PsopFamily<T>::tauP(int n) const {
  if (n < 0) return Poly<Jet<T>>();
  if (n == 0) return Poly<Jet<T>>::constant(Jet<T>(T(1)));
  auto o = sys_.oracle(k_, l_);
  IndexList idx = n % 2 == 0 ? irange(0, n) : with({ExtIndex::d0()}, irange(0, n));
  idx.push_back(ExtIndex::z());
  return pf_poly(o, idx);
}

template <class T>
const Poly<Jet<T>>& PsopFamily<T>::P_jet(int n) const {
  auto it = P_.find(n);
  if (it != P_.end()) return it->second;
  Poly<Jet<T>> p;
  if (n >= 0) {
    Jet<T> inv = tau_nonzero(n).inverse();
    p = tauP(n) * inv;
  }
  return P_.emplace(n, std::move(p)).first->second;
}

template <class T>
T PsopFamily<T>::zeta(int n) const {
  return tau(2 * n + 2).value() / tau_nonzero(2 * n).value();
}

template <class T>
T PsopFamily<T>::gamma(int n) const {
  return -tau(2 * n + 2).value() / tau_nonzero(2 * n + 1).value();
}

template <class T>
T skew_inner(const MomentSystem<T>& sys, const Poly<T>& p, const Poly<T>& q, int k, int l) {
  T s(0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (exactly_zero(p.c[i])) continue;
    for (std::size_t j = 0; j < q.size(); ++j) {
      if (exactly_zero(q.c[j])) continue;
      s += p.c[i] * q.c[j] * sys.mu(static_cast<int>(i), static_cast<int>(j), k, l).value();
    }
  }
  return s;
}

template <class T>
std::vector<T> verify_orthogonality(const PsopFamily<T>& fam, int n) {
  const auto& sys = fam.system();
  std::vector<T> r;
  Poly<T> even = fam.P(2 * n), odd = fam.P(2 * n + 1);
  T z = fam.zeta(n);
  T g = fam.tau(2 * n + 2).value() / fam.tau_nonzero(2 * n + 1).value();
  for (int m = 0; m <= 2 * n + 1; ++m) {
    T v = skew_inner(sys, even, Poly<T>::monomial(T(1), m), fam.k(), fam.l());
    if (m == 2 * n + 1) v -= z;
    r.push_back(v);
  }
  for (int m = 0; m <= 2 * n + 1; ++m) {
    T v = skew_inner(sys, odd, Poly<T>::monomial(T(1), m), fam.k(), fam.l());
    v += g * sys.beta(m, fam.k(), fam.l()).value();
    r.push_back(v);
  }
  return r;
}

template <class T>
Jet<T> u_jet(const PsopFamily<T>& fam, int n) {
  if (n <= 0) return Jet<T>(T(0));
  Jet<T> tn = fam.tau_nonzero(n);
  return fam.tau(n + 1) * fam.tau(n - 1) / (tn * tn);
}

template <class T>
Jet<T> b_jet(const PsopFamily<T>& fam, int n) {
  if (n <= 0) return Jet<T>(T(0));
  Jet<T> tn = fam.tau_nonzero(n);
  return derivative_t(tn) / tn;
}

template <class T>
UB<T> un_bn(const PsopFamily<T>& fam, int n) {
  if (n <= 0) return {T(0), T(0)};
  Jet<T> tn = fam.tau_nonzero(n);
  T v = tn.value();
  return {fam.tau(n + 1).value() * fam.tau(n - 1).value() / (v * v), tn.dt() / v};
}

template <class T>
Poly<T> four_term_residual(const PsopFamily<T>& fam, int n) {
  auto P = [&](int m) { return fam.P(m); };
  UB<T> a = un_bn(fam, n), b1 = un_bn(fam, n + 1), am = un_bn(fam, n - 1);
  T un = a.u, db = b1.b - a.b;
  Poly<T> lhs = (P(n) + P(n - 1) * un).shifted(1);
  Poly<T> rhs = P(n + 1) + P(n) * T(db + un) - P(n - 1) * T(un * (db + b1.u)) - P(n - 2) * T(un * un * am.u);
  return lhs - rhs;
}

namespace {

template <class T>
Matrix<Jet<T>> zero_matrix(int N) {
  return Matrix<Jet<T>>(N, std::vector<Jet<T>>(N, Jet<T>(T(0))));
}

// X = L1^{-1} M for unit lower bidiagonal L1 with subdiagonal u.
template <class T>
Matrix<Jet<T>> solve_bidiagonal(const std::vector<Jet<T>>& u, const Matrix<Jet<T>>& M) {
  Matrix<Jet<T>> X = M;
  for (std::size_t n = 1; n < M.size(); ++n)
    for (std::size_t j = 0; j < M.size(); ++j) X[n][j] = M[n][j] - u[n] * X[n - 1][j];
  return X;
}

}  // namespace

template <class T>
LaxTruncation<T> lax_matrices(const PsopFamily<T>& fam, int N) {
  if (N < 3) throw ConfigError("Lax truncation needs N >= 3");
  std::vector<Jet<T>> u, b;
  for (int n = 0; n <= N; ++n) {
    u.push_back(u_jet(fam, n));
    b.push_back(b_jet(fam, n));
  }
  LaxTruncation<T> r;
  r.N = N;
  r.L1 = zero_matrix<T>(N);
  r.L2 = zero_matrix<T>(N);
  r.B2 = zero_matrix<T>(N);
  for (int n = 0; n < N; ++n) {
    r.L1[n][n] = Jet<T>(T(1));
    if (n >= 1) r.L1[n][n - 1] = u[n];
    if (n + 1 < N) r.L2[n][n + 1] = Jet<T>(T(1));
    r.L2[n][n] = b[n + 1] - b[n] + u[n];
    if (n >= 1) {
      r.L2[n][n - 1] = u[n] * (b[n] - b[n + 1] - u[n + 1]);
      r.B2[n][n - 1] = u[n] * (b[n + 1] - b[n - 1]);
    }
    if (n >= 2) r.L2[n][n - 2] = -(u[n] * u[n] * u[n - 1]);
  }
  r.L = solve_bidiagonal(u, r.L2);
  r.B = solve_bidiagonal(u, r.B2);
  return r;
}

template <class T>
LaxResiduals<T> lax_residuals(const LaxTruncation<T>& lax, const PsopFamily<T>& fam) {
  int N = lax.N;
  LaxResiduals<T> r;
  std::vector<Poly<T>> phi, phit;
  for (int n = 0; n < N; ++n) {
    phi.push_back(fam.P(n));
    phit.push_back(d_dt(fam.P_jet(n)));
  }
  for (int n = 0; n + 3 <= N; ++n) {
    Poly<T> s = phi[n].shifted(1) * T(-1);
    Poly<T> e = phit[n];
    for (int j = 0; j < N; ++j) {
      T lv = lax.L[n][j].value(), bv = lax.B[n][j].value();
      if (!exactly_zero(lv)) s += phi[j] * lv;
      if (!exactly_zero(bv)) e -= phi[j] * bv;
    }
    r.spectral.push_back(s);
    r.evolution.push_back(e);
  }
  int M = N - 3;
  r.commutator.assign(M, std::vector<T>(M, T(0)));
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) {
      T c = lax.L[i][j].dt();
      for (int k = 0; k < N; ++k) {
        c -= lax.B[i][k].value() * lax.L[k][j].value();
        c += lax.L[i][k].value() * lax.B[k][j].value();
      }
      r.commutator[i][j] = c;
    }
  return r;
}

template <class T>
Poly<T> bures_char_poly_average(const MomentSystem<T>& sys, int n) {
  if (sys.kernel().id != KernelId::Bures) throw ConfigError("characteristic-polynomial average needs the Bures kernel");
  const auto& meas = sys.measure();
  if (n > static_cast<int>(meas.size())) throw InsufficientSupport("not enough nodes");
  const auto& h0 = sys.node_factors(0, 0, 0);
  Poly<T> total = Poly<T>::constant(T(0));
  if (n == 0) return Poly<T>::constant(T(1));
  detail::for_each_increasing(meas.size(), static_cast<std::size_t>(n), [&](const std::vector<std::size_t>& a) {
    T prod(1);
    Poly<T> chi = Poly<T>::constant(T(1));
    for (std::size_t i = 0; i < a.size(); ++i) {
      const T& xi = meas.nodes[a[i]];
      for (std::size_t j = i + 1; j < a.size(); ++j) {
        const T& xj = meas.nodes[a[j]];
        prod *= T((xj - xi) * (xj - xi)) / T(xi + xj);
      }
      prod *= h0[a[i]].value() * meas.weights[a[i]];
      chi = chi * Poly<T>(std::vector<T>{T(-xi), T(1)});
    }
    total += chi * prod;
  });
  T t = tau_pfaffian(sys, n).value();
  if (is_zero(t, 0.0)) throw DegenerateTau("tau_" + std::to_string(n) + " vanishes");
  T sign = (n / 2) % 2 == 0 ? T(1) : T(-1);
  return total * T(sign / t);
}

#define PSK_INSTANTIATE(T)                                                                    \
  template class PsopFamily<T>;                                                               \
  template T skew_inner(const MomentSystem<T>&, const Poly<T>&, const Poly<T>&, int, int);    \
  template std::vector<T> verify_orthogonality(const PsopFamily<T>&, int);                    \
  template UB<T> un_bn(const PsopFamily<T>&, int);                                            \
  template Jet<T> u_jet(const PsopFamily<T>&, int);                                           \
  template Jet<T> b_jet(const PsopFamily<T>&, int);                                           \
  template Poly<T> four_term_residual(const PsopFamily<T>&, int);                             \
  template LaxTruncation<T> lax_matrices(const PsopFamily<T>&, int);                          \
  template LaxResiduals<T> lax_residuals(const LaxTruncation<T>&, const PsopFamily<T>&);      \
  template Poly<T> bures_char_poly_average(const MomentSystem<T>&, int);

PSK_INSTANTIATE(Rational)
PSK_INSTANTIATE(double)

}  // namespace psk
