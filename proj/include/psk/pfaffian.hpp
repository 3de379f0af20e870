#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "psk/errors.hpp"
#include "psk/poly.hpp"
#include "psk/scalar.hpp"

namespace psk {

// Pfaffian row label: an integer or one of the character rows.
struct ExtIndex {
  enum class Kind : std::uint8_t { Int, D0, D1, C0, Z };
  Kind kind = Kind::Int;
  int n = 0;

  static ExtIndex I(int n) { return {Kind::Int, n}; }
  static ExtIndex d0() { return {Kind::D0, 0}; }
  static ExtIndex d1() { return {Kind::D1, 0}; }
  static ExtIndex c0() { return {Kind::C0, 0}; }
  static ExtIndex z() { return {Kind::Z, 0}; }

  bool is_int() const { return kind == Kind::Int; }
  friend bool operator==(const ExtIndex& a, const ExtIndex& b) {
    return a.kind == b.kind && (a.kind != Kind::Int || a.n == b.n);
  }
  std::string str() const;
};

using IndexList = std::vector<ExtIndex>;

// Integer range lo..hi inclusive as index labels.
IndexList irange(int lo, int hi);
IndexList cat(const IndexList& a, const IndexList& b);
IndexList with(std::initializer_list<ExtIndex> head, const IndexList& tail);

// A z-row entry is a single monomial coef * z^power (coef may be zero).
template <class T>
struct ZMonomial {
  T coef;
  int power;
};

template <class T>
struct EntryOracle {
  std::function<T(const ExtIndex&, const ExtIndex&)> entry;
  // Pf(a, z). Default: z^i for integers, 0 for characters.
  std::function<ZMonomial<T>(const ExtIndex&)> z_entry;

  T operator()(const ExtIndex& a, const ExtIndex& b) const { return entry(a, b); }
  ZMonomial<T> z(const ExtIndex& a) const {
    if (z_entry) return z_entry(a);
    if (a.is_int()) return {T(1), a.n};
    return {T(0), 0};
  }
};

enum class Pivot { Last, First };

namespace detail {

template <class T>
class PfEvaluator {
 public:
  PfEvaluator(const std::vector<std::vector<T>>& m, Pivot p) : m_(m), pivot_(p) {}

  T eval(std::uint64_t mask) {
    if (mask == 0) return T(1);
    auto it = memo_.find(mask);
    if (it != memo_.end()) return it->second;
    // positions present, in order
    int pos[64];
    int cnt = 0;
    for (int i = 0; i < 64; ++i)
      if (mask >> i & 1ULL) pos[cnt++] = i;
    T s(0);
    if (pivot_ == Pivot::Last) {
      // Pf = sum_{j<last} (-1)^{j} Pf(.. j^ .., last^) a(j, last), j 0-based within the list
      int last = pos[cnt - 1];
      for (int j = 0; j < cnt - 1; ++j) {
        const T& a = m_[pos[j]][last];
        if (exactly_zero(a)) continue;
        std::uint64_t rest = mask & ~(1ULL << pos[j]) & ~(1ULL << last);
        T term = a * eval(rest);
        if (j % 2 == 0) s += term; else s -= term;
      }
    } else {
      int first = pos[0];
      for (int j = 1; j < cnt; ++j) {
        const T& a = m_[first][pos[j]];
        if (exactly_zero(a)) continue;
        std::uint64_t rest = mask & ~(1ULL << pos[j]) & ~(1ULL << first);
        T term = a * eval(rest);
        if (j % 2 == 1) s += term; else s -= term;
      }
    }
    memo_.emplace(mask, s);
    return s;
  }

 private:
  const std::vector<std::vector<T>>& m_;
  Pivot pivot_;
  std::unordered_map<std::uint64_t, T> memo_;
};

template <class T>
void check_antisymmetry(const EntryOracle<T>& o, const IndexList& idx) {
  // spot check on a few pairs
  std::size_t m = idx.size();
  if (m < 2) return;
  std::pair<std::size_t, std::size_t> probes[] = {{0, m - 1}, {0, 1}, {m / 2, m - 1}};
  for (auto [i, j] : probes) {
    if (i == j) continue;
    T s = o(idx[i], idx[j]) + o(idx[j], idx[i]);
    if (!exactly_zero(s) && !is_zero(s, 1e-12 * (1.0 + magnitude(o(idx[i], idx[j])))))
      throw BadOracle("entry(" + idx[i].str() + "," + idx[j].str() + ") is not antisymmetric");
  }
}

}  // namespace detail

// Pfaffian of an explicit skew-symmetric matrix (full storage, only i<j read).
template <class T>
T pf(const std::vector<std::vector<T>>& a, Pivot pivot = Pivot::Last) {
  std::size_t m = a.size();
  if (m % 2) throw InvalidOrder("pfaffian of odd order " + std::to_string(m));
  if (m == 0) return T(1);
  if (m > 62) throw InvalidOrder("order too large for subset expansion");
  std::vector<std::vector<T>> full(m, std::vector<T>(m, T(0)));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      full[i][j] = a[i][j];
      full[j][i] = -a[i][j];
    }
  detail::PfEvaluator<T> ev(full, pivot);
  std::uint64_t mask = (m == 64) ? ~0ULL : ((1ULL << m) - 1);
  return ev.eval(mask);
}

// Materialize the oracle on a list of labels.
template <class T>
std::vector<std::vector<T>> materialize(const EntryOracle<T>& o, const IndexList& idx) {
  std::size_t m = idx.size();
  std::vector<std::vector<T>> a(m, std::vector<T>(m, T(0)));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j) {
      if (idx[i] == idx[j]) continue;  // repeated label: entry 0, Pfaffian vanishes
      a[i][j] = o(idx[i], idx[j]);
      a[j][i] = -a[i][j];
    }
  return a;
}

template <class T>
T pf_indexed(const EntryOracle<T>& o, const IndexList& idx, Pivot pivot = Pivot::Last) {
  for (const auto& x : idx)
    if (x.kind == ExtIndex::Kind::Z) throw InvalidIndexList("z label in scalar Pfaffian");
  if (idx.size() % 2) throw InvalidOrder("odd index list of length " + std::to_string(idx.size()));
  detail::check_antisymmetry(o, idx);
  return pf(materialize(o, idx), pivot);
}

// Polynomial Pfaffian with a trailing z label, expanded along the z row and
// multiplied by z^shift. Throws if negative powers of z survive.
template <class T>
Poly<T> pf_poly(const EntryOracle<T>& o, const IndexList& idx, int shift = 0) {
  if (idx.empty() || idx.back().kind != ExtIndex::Kind::Z)
    throw InvalidIndexList("z label must be last");
  int zc = 0;
  for (const auto& x : idx) zc += x.kind == ExtIndex::Kind::Z;
  if (zc != 1) throw InvalidIndexList("exactly one z label required");
  if (idx.size() % 2) throw InvalidOrder("odd index list");
  IndexList head(idx.begin(), idx.end() - 1);
  std::size_t m = head.size();
  auto a = materialize(o, head);
  // Pf(h_1..h_m, z) = sum_j (-1)^{j+1} Pf(h without j) Pf(h_j, z), j 1-based.
  std::vector<std::pair<int, T>> terms;
  int lo = 0, hi = 0;
  bool any = false;
  for (std::size_t j = 0; j < m; ++j) {
    ZMonomial<T> zm = o.z(head[j]);
    if (exactly_zero(zm.coef)) continue;
    std::vector<std::vector<T>> sub;
    sub.reserve(m - 1);
    for (std::size_t r = 0; r < m; ++r) {
      if (r == j) continue;
      std::vector<T> row;
      row.reserve(m - 1);
      for (std::size_t c = 0; c < m; ++c)
        if (c != j) row.push_back(a[r][c]);
      sub.push_back(std::move(row));
    }
    T v = pf(sub) * zm.coef;
    if (j % 2 == 1) v = -v;
    int p = zm.power + shift;
    if (!any) {
      lo = hi = p;
      any = true;
    }
    lo = std::min(lo, p);
    hi = std::max(hi, p);
    terms.emplace_back(p, v);
  }
  if (!any) return Poly<T>::constant(T(0));
  if (lo < 0) {
    for (auto& [p, v] : terms)
      if (p < 0 && !exactly_zero(v)) throw InvalidIndexList("negative power of z survives the shift");
  }
  std::vector<T> c(std::max(hi, 0) + 1, T(0));
  for (auto& [p, v] : terms)
    if (p >= 0) c[p] += v;
  return Poly<T>(std::move(c));
}

// Determinant by fraction-free (Bareiss) elimination with row pivoting.
template <class T>
T det(std::vector<std::vector<T>> a) {
  std::size_t n = a.size();
  if (n == 0) return T(1);
  T prev(1);
  int sign = 1;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    std::size_t p = k;
    while (p < n && exactly_zero(a[p][k])) ++p;
    if (p == n) return T(0);
    if (p != k) {
      std::swap(a[p], a[k]);
      sign = -sign;
    }
    for (std::size_t i = k + 1; i < n; ++i) {
      for (std::size_t j = k + 1; j < n; ++j) {
        T v = a[i][j] * a[k][k] - a[i][k] * a[k][j];
        a[i][j] = v / prev;
      }
      a[i][k] = T(0);
    }
    prev = a[k][k];
  }
  T r = a[n - 1][n - 1];
  return sign > 0 ? r : T(-r);
}

}  // namespace psk
