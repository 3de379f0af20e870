#pragma once

#include <map>
#include <vector>

#include "psk/measures.hpp"

namespace psk {

// Monic PSOP family P_0, P_1, ... built from the moments of one system at a
// fixed deformation (k, l). Coefficients are jets so that t/s derivatives
// of P_n are available when the binding carries them.
template <class T>
class PsopFamily {
 public:
  PsopFamily(MomentSystem<T> sys, int k = 0, int l = 0, double tol = 0.0);

  const MomentSystem<T>& system() const { return sys_; }
  int k() const { return k_; }
  int l() const { return l_; }

  // tau_{-1} = 0, tau_0 = 1, tau_{2m} = Pf(0..2m-1), tau_{2m+1} = Pf(d0,0..2m).
  Jet<T> tau(int n) const;
  // tau(n), throwing DegenerateTau if its value vanishes.
  Jet<T> tau_nonzero(int n) const;

  // P_n with jet coefficients; P_{-1} = P_{-2} = 0.
  const Poly<Jet<T>>& P_jet(int n) const;
  Poly<T> P(int n) const { return values(P_jet(n)); }

  // Unnormalized tau_n P_n = Pf(..., z).
  Poly<Jet<T>> tauP(int n) const;

  T zeta(int n) const;   // tau_{2n+2} / tau_{2n}
  T gamma(int n) const;  // -tau_{2n+2} / tau_{2n+1}

 private:
  MomentSystem<T> sys_;
  int k_, l_;
  double tol_;
  mutable std::map<int, Jet<T>> tau_;
  mutable std::map<int, Poly<Jet<T>>> P_;
};

// <p, q> = sum p_i q_j mu_{i,j}.
template <class T>
T skew_inner(const MomentSystem<T>& sys, const Poly<T>& p, const Poly<T>& q, int k = 0, int l = 0);

// Residuals for m = 0..2n+1 of
//   <P_{2n}, z^m> - (tau_{2n+2}/tau_{2n}) delta_{2n+1,m}   (first half)
//   <P_{2n+1}, z^m> + (tau_{2n+2}/tau_{2n+1}) beta_m        (second half)
template <class T>
std::vector<T> verify_orthogonality(const PsopFamily<T>& fam, int n);

// u_n = tau_{n+1} tau_{n-1} / tau_n^2 and b_n = d/dt log tau_n (u_0 = b_0 = 0).
template <class T>
struct UB {
  T u;
  T b;
};
template <class T>
UB<T> un_bn(const PsopFamily<T>& fam, int n);

// Same quantities as order-reduced jets (needs t-order 2 for a useful b jet).
template <class T>
Jet<T> u_jet(const PsopFamily<T>& fam, int n);
template <class T>
Jet<T> b_jet(const PsopFamily<T>& fam, int n);

// z(P_n + u_n P_{n-1}) - [P_{n+1} + (b_{n+1}-b_n+u_n) P_n
//   - u_n (b_{n+1}-b_n+u_{n+1}) P_{n-1} - u_n^2 u_{n-1} P_{n-2}]
template <class T>
Poly<T> four_term_residual(const PsopFamily<T>& fam, int n);

template <class T>
using Matrix = std::vector<std::vector<T>>;

// Truncated Lax matrices on rows/columns 0..N-1 with jet entries.
template <class T>
struct LaxTruncation {
  int N = 0;
  Matrix<Jet<T>> L1, L2, B2;
  Matrix<Jet<T>> L, B;  // L1^{-1} L2, L1^{-1} B2
};

template <class T>
LaxTruncation<T> lax_matrices(const PsopFamily<T>& fam, int N);

template <class T>
struct LaxResiduals {
  std::vector<Poly<T>> spectral;   // (L Phi - z Phi)_n, n = 0..N-3
  std::vector<Poly<T>> evolution;  // (Phi_t - B Phi)_n, n = 0..N-3
  Matrix<T> commutator;            // dL/dt - (BL - LB), top-left (N-3)x(N-3)
};

template <class T>
LaxResiduals<T> lax_residuals(const LaxTruncation<T>& lax, const PsopFamily<T>& fam);

// Bures case: (-1)^{floor(n/2)}/tau_n * sum over increasing n-tuples of
// prod (xj-xi)^2/(xi+xj) prod (z - xj) w_j.
template <class T>
Poly<T> bures_char_poly_average(const MomentSystem<T>& sys, int n);

}  // namespace psk
