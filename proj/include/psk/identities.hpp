#pragma once

#include <array>
#include <vector>

#include "psk/jet.hpp"
#include "psk/pfaffian.hpp"

namespace psk {

// Each validator returns LHS - RHS of the identity it names.

// Pf(a1,a2,a3,a4,B) Pf(B) = sum_{j=2..4} (-1)^j Pf(a1,aj,B) Pf(rest,B).
template <class T>
T pf1_residual(const EntryOracle<T>& o, const IndexList& base, const std::array<ExtIndex, 4>& a) {
  if (base.size() % 2) throw InvalidOrder("pf1 base must have even length");
  T lhs = pf_indexed(o, with({a[0], a[1], a[2], a[3]}, base)) * pf_indexed(o, base);
  T rhs(0);
  for (int j = 1; j <= 3; ++j) {
    IndexList rest;
    for (int k = 1; k <= 3; ++k)
      if (k != j) rest.push_back(a[k]);
    T term = pf_indexed(o, with({a[0], a[j]}, base)) * pf_indexed(o, cat(rest, base));
    // j here is 0-based position of a_{j+1}; sign (-1)^{j+1}
    if (j % 2 == 1) rhs += term; else rhs -= term;
  }
  return lhs - rhs;
}

// Pf(a1,a2,a3,B') Pf(B',t) = sum_{j=1..3} (-1)^{j-1} Pf(aj,B') Pf(rest,B',t),
// B' of odd length, t one extra label.
template <class T>
T pf2_residual(const EntryOracle<T>& o, const IndexList& odd_base, const ExtIndex& tail,
               const std::array<ExtIndex, 3>& a) {
  if (odd_base.size() % 2 == 0) throw InvalidOrder("pf2 base must have odd length");
  IndexList full = odd_base;
  full.push_back(tail);
  T lhs = pf_indexed(o, with({a[0], a[1], a[2]}, odd_base)) * pf_indexed(o, full);
  T rhs(0);
  for (int j = 0; j < 3; ++j) {
    IndexList rest;
    for (int k = 0; k < 3; ++k)
      if (k != j) rest.push_back(a[k]);
    T term = pf_indexed(o, with({a[j]}, odd_base)) * pf_indexed(o, cat(rest, full));
    if (j % 2 == 0) rhs += term; else rhs -= term;
  }
  return lhs - rhs;
}

template <class T>
T schur_product(const std::vector<T>& s) {
  T p(1);
  for (std::size_t i = 0; i < s.size(); ++i)
    for (std::size_t j = i + 1; j < s.size(); ++j) p *= (s[i] - s[j]) / (s[i] + s[j]);
  return p;
}

template <class T>
EntryOracle<T> schur_oracle(const std::vector<T>& s) {
  EntryOracle<T> o;
  o.entry = [s](const ExtIndex& a, const ExtIndex& b) -> T {
    auto val = [&](const ExtIndex& x) { return s.at(static_cast<std::size_t>(x.n - 1)); };
    if (a.kind == ExtIndex::Kind::C0 && b.is_int()) return T(1);
    if (b.kind == ExtIndex::Kind::C0 && a.is_int()) return T(-1);
    if (a.is_int() && b.is_int()) {
      T x = val(a), y = val(b);
      return (x - y) / (x + y);
    }
    return T(0);
  };
  return o;
}

// Pf[(si-sj)/(si+sj)] - prod_{i<j} (si-sj)/(si+sj), |s| even.
template <class T>
T schur_residual(const std::vector<T>& s) {
  if (s.size() % 2) throw InvalidOrder("even number of parameters required");
  auto o = schur_oracle(s);
  return pf_indexed(o, irange(1, static_cast<int>(s.size()))) - schur_product(s);
}

// Odd case with a bordering row Pf(a0, i) = 1.
template <class T>
T schur_odd_residual(const std::vector<T>& s) {
  if (s.size() % 2 == 0) throw InvalidOrder("odd number of parameters required");
  auto o = schur_oracle(s);
  return pf_indexed(o, with({ExtIndex::c0()}, irange(1, static_cast<int>(s.size())))) -
         schur_product(s);
}

// Bordered determinant factorizations. A is skew-symmetric of size m.
//   m odd:  det[[A, x], [-y^T, z]] = Pf([[A, x], [-x^T, 0]]) Pf([[A, y], [-y^T, 0]])
//   m even: det[[A, x], [-y^T, z]] = Pf(A) Pf([[A, y, x], [-y^T, 0, z], [-x^T, -z, 0]])
template <class T>
T det_pf_border_residual(const std::vector<std::vector<T>>& A, const std::vector<T>& x,
                         const std::vector<T>& y, const T& z) {
  std::size_t m = A.size();
  std::vector<std::vector<T>> D(m + 1, std::vector<T>(m + 1, T(0)));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) D[i][j] = A[i][j];
    D[i][m] = x[i];
    D[m][i] = -y[i];
  }
  D[m][m] = z;
  T lhs = det(D);
  auto border = [&](const std::vector<T>& v) {
    std::vector<std::vector<T>> B(m + 1, std::vector<T>(m + 1, T(0)));
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < m; ++j) B[i][j] = A[i][j];
      B[i][m] = v[i];
      B[m][i] = -v[i];
    }
    return B;
  };
  if (m % 2 == 1) return lhs - pf(border(x)) * pf(border(y));
  std::vector<std::vector<T>> B(m + 2, std::vector<T>(m + 2, T(0)));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) B[i][j] = A[i][j];
    B[i][m] = y[i];
    B[m][i] = -y[i];
    B[i][m + 1] = x[i];
    B[m + 1][i] = -x[i];
  }
  B[m][m + 1] = z;
  B[m + 1][m] = -z;
  return lhs - pf(A) * pf(B);
}

// ---- derivative formulas (order-1 jets; Deriv selects d/dt or d/ds) ----

enum class Deriv { T, S };

template <class T>
T jet_d(const Jet<T>& j, Deriv d) {
  return d == Deriv::T ? j.dt() : j.ds();
}

template <class T>
EntryOracle<T> value_oracle(const EntryOracle<Jet<T>>& o) {
  EntryOracle<T> r;
  r.entry = [o](const ExtIndex& a, const ExtIndex& b) { return o(a, b).value(); };
  return r;
}

namespace detail {
inline IndexList bump(IndexList idx, std::size_t k) {
  idx[k].n += 1;
  return idx;
}
}  // namespace detail

// Premise: d Pf(i,j) = Pf(i+1,j) + Pf(i,j+1) (and d Pf(a0,i) = Pf(a0,i+1) for a0 rows).
template <class T>
void check_wronski_premise(const EntryOracle<Jet<T>>& o, const IndexList& idx, Deriv d) {
  auto v = value_oracle(o);
  for (std::size_t i = 0; i < idx.size(); ++i)
    for (std::size_t j = i + 1; j < idx.size() && j < i + 3; ++j) {
      const ExtIndex &a = idx[i], &b = idx[j];
      if (a == b) continue;
      T lhs = jet_d(o(a, b), d);
      T rhs(0);
      if (a.is_int()) rhs += v(detail::bump({a}, 0)[0], b);
      if (b.is_int()) rhs += v(a, detail::bump({b}, 0)[0]);
      if (!(lhs == rhs)) throw PremiseViolation("entry derivative rule fails at (" + a.str() + "," + b.str() + ")");
    }
}

// d Pf(i_1..i_m) - sum_k Pf(.., i_k + 1, ..); characters are held fixed.
template <class T>
T der1_gen_residual(const EntryOracle<Jet<T>>& o, const IndexList& idx, Deriv d = Deriv::T) {
  check_wronski_premise(o, idx, d);
  auto v = value_oracle(o);
  T lhs = jet_d(pf_indexed(o, idx), d);
  T rhs(0);
  for (std::size_t k = 0; k < idx.size(); ++k)
    if (idx[k].is_int()) rhs += pf_indexed(v, detail::bump(idx, k));
  return lhs - rhs;
}

// d Pf(s..s+2N-1) - Pf(s..s+2N-2, s+2N)
template <class T>
T der1_residual(const EntryOracle<Jet<T>>& o, int start, int N, Deriv d = Deriv::T) {
  IndexList idx = irange(start, start + 2 * N - 1);
  check_wronski_premise(o, idx, d);
  IndexList r = irange(start, start + 2 * N - 2);
  r.push_back(ExtIndex::I(start + 2 * N));
  return jet_d(pf_indexed(o, idx), d) - pf_indexed(value_oracle(o), r);
}

// d Pf(a0, s..s+2N-2) - Pf(a0, s..s+2N-3, s+2N-1)
template <class T>
T der1_odd_residual(const EntryOracle<Jet<T>>& o, const ExtIndex& a0, int start, int N,
                    Deriv d = Deriv::T) {
  IndexList idx = with({a0}, irange(start, start + 2 * N - 2));
  check_wronski_premise(o, idx, d);
  IndexList r = with({a0}, irange(start, start + 2 * N - 3));
  r.push_back(ExtIndex::I(start + 2 * N - 1));
  return jet_d(pf_indexed(o, idx), d) - pf_indexed(value_oracle(o), r);
}

// Premise: d Pf(i,j) = Pf(a0,b0,i,j), Pf(a0,b0) = 0.
template <class T>
void check_gram_premise(const EntryOracle<Jet<T>>& o, const ExtIndex& a0, const ExtIndex& b0,
                        const IndexList& idx, Deriv d) {
  auto v = value_oracle(o);
  if (!exactly_zero(v(a0, b0))) throw PremiseViolation("Pf(a0,b0) must vanish");
  for (std::size_t i = 0; i + 1 < idx.size(); ++i) {
    const ExtIndex &a = idx[i], &b = idx[i + 1];
    if (a == b) continue;
    T lhs = jet_d(o(a, b), d);
    T rhs = pf_indexed(v, {a0, b0, a, b});
    if (!(lhs == rhs)) throw PremiseViolation("Gram-type entry rule fails at (" + a.str() + "," + b.str() + ")");
  }
}

template <class T>
T der2_1_residual(const EntryOracle<Jet<T>>& o, const ExtIndex& a0, const ExtIndex& b0,
                  const IndexList& idx, Deriv d) {
  check_gram_premise(o, a0, b0, idx, d);
  return jet_d(pf_indexed(o, idx), d) - pf_indexed(value_oracle(o), with({a0, b0}, idx));
}

// Additionally d Pf(a0,j) = Pf(b0,j); idx of odd length.
template <class T>
T der2_2_residual(const EntryOracle<Jet<T>>& o, const ExtIndex& a0, const ExtIndex& b0,
                  const IndexList& idx, Deriv d) {
  check_gram_premise(o, a0, b0, idx, d);
  auto v = value_oracle(o);
  for (const auto& j : idx)
    if (!(jet_d(o(a0, j), d) == v(b0, j))) throw PremiseViolation("d Pf(a0,j) != Pf(b0,j)");
  return jet_d(pf_indexed(o, with({a0}, idx)), d) - pf_indexed(v, with({b0}, idx));
}

// ---- addition formulas; starred entries are built from the base oracle ----

// Pf(i*,j*) = Pf(i,j) + lam Pf(a0,b0,i,j); Pf(a0,i*) = Pf(a0,i) + lam Pf(b0,i).
template <class T>
EntryOracle<T> gram_star_oracle(const EntryOracle<T>& o, const ExtIndex& a0, const ExtIndex& b0,
                                const T& lam) {
  EntryOracle<T> s;
  s.entry = [o, a0, b0, lam](const ExtIndex& a, const ExtIndex& b) -> T {
    if (a.is_int() && b.is_int()) return o(a, b) + lam * pf_indexed(o, {a0, b0, a, b});
    if (a == a0 && b.is_int()) return o(a0, b) + lam * o(b0, b);
    if (b == a0 && a.is_int()) return -(o(a0, a) + lam * o(b0, a));
    throw InvalidIndexList("starred oracle queried outside its rows");
  };
  return s;
}

template <class T>
T add_g1_residual(const EntryOracle<T>& o, const ExtIndex& a0, const ExtIndex& b0, const T& lam,
                  const IndexList& idx) {
  if (!exactly_zero(o(a0, b0))) throw PremiseViolation("Pf(a0,b0) must vanish");
  auto s = gram_star_oracle(o, a0, b0, lam);
  return pf_indexed(s, idx) - pf_indexed(o, idx) - lam * pf_indexed(o, with({a0, b0}, idx));
}

template <class T>
T add_g2_residual(const EntryOracle<T>& o, const ExtIndex& a0, const ExtIndex& b0, const T& lam,
                  const IndexList& idx) {
  if (!exactly_zero(o(a0, b0))) throw PremiseViolation("Pf(a0,b0) must vanish");
  auto s = gram_star_oracle(o, a0, b0, lam);
  return pf_indexed(s, with({a0}, idx)) - pf_indexed(o, with({a0}, idx)) -
         lam * pf_indexed(o, with({b0}, idx));
}

// Base oracle extended by the c0 row: (c0,i) = (-lam)^{i-1}, (a0,c0) = 0.
template <class T>
EntryOracle<T> with_c0_row(const EntryOracle<T>& o, const T& lam) {
  EntryOracle<T> r;
  r.entry = [o, lam](const ExtIndex& a, const ExtIndex& b) -> T {
    bool ac = a.kind == ExtIndex::Kind::C0, bc = b.kind == ExtIndex::Kind::C0;
    if (ac && bc) return T(0);
    if (ac) return b.is_int() ? ipow(T(-lam), b.n - 1) : T(0);
    if (bc) return a.is_int() ? T(-ipow(T(-lam), a.n - 1)) : T(0);
    return o(a, b);
  };
  return r;
}

// Pf(i*,j*) = lam^2 (i,j) + lam (i+1,j) + lam (i,j+1) + (i+1,j+1); Pf(a0,i*) = lam (a0,i) + (a0,i+1).
template <class T>
EntryOracle<T> wronski_star_oracle(const EntryOracle<T>& o, const ExtIndex& a0, const T& lam) {
  EntryOracle<T> s;
  s.entry = [o, a0, lam](const ExtIndex& a, const ExtIndex& b) -> T {
    auto up = [](ExtIndex x) { x.n += 1; return x; };
    if (a.is_int() && b.is_int())
      return lam * lam * o(a, b) + lam * o(up(a), b) + lam * o(a, up(b)) + o(up(a), up(b));
    if (a == a0 && b.is_int()) return lam * o(a0, b) + o(a0, up(b));
    if (b == a0 && a.is_int()) return -(lam * o(a0, a) + o(a0, up(a)));
    throw InvalidIndexList("starred oracle queried outside its rows");
  };
  return s;
}

// Pf(1*..(2N)*) - Pf(c0, 1..2N+1)
template <class T>
T add_w1_residual(const EntryOracle<T>& o, const T& lam, int N) {
  auto s = wronski_star_oracle(o, ExtIndex::d0(), lam);
  auto c = with_c0_row(o, lam);
  return pf_indexed(s, irange(1, 2 * N)) - pf_indexed(c, with({ExtIndex::c0()}, irange(1, 2 * N + 1)));
}

// Pf(a0, 1*..(2N-1)*) - Pf(a0, c0, 1..2N)
template <class T>
T add_w2_residual(const EntryOracle<T>& o, const ExtIndex& a0, const T& lam, int N) {
  auto s = wronski_star_oracle(o, a0, lam);
  auto c = with_c0_row(o, lam);
  return pf_indexed(s, with({a0}, irange(1, 2 * N - 1))) -
         pf_indexed(c, with({a0, ExtIndex::c0()}, irange(1, 2 * N)));
}

}  // namespace psk
