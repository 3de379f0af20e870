#include "psk/vpade.hpp"

#include <cmath>
#include <complex>
#include <functional>
#include <map>

#include "psk/pfaffian.hpp"
#include "psk/random.hpp"

namespace psk {

template <class T>
Poly<T> VectorSeries<T>::component(int c) const {
  Poly<T> p;
  for (const auto& row : coeffs) p.c.push_back(row[c]);
  return p;
}

template <class T>
VectorSeries<T> vector_series(std::vector<std::vector<T>> coeffs) {
  if (coeffs.empty()) throw ConfigError("empty series");
  VectorSeries<T> f;
  f.d = static_cast<int>(coeffs[0].size());
  if (f.d < 1) throw ConfigError("series dimension must be >= 1");
  for (const auto& row : coeffs)
    if (static_cast<int>(row.size()) != f.d) throw ConfigError("series coefficients differ in dimension");
  f.coeffs = std::move(coeffs);
  return f;
}

template <class T>
T residue_entry(const VectorSeries<T>& f, int a, int b) {
  // x: a + p - m - 1 = -1, y: b + q + m = -1  =>  p = m - a, q = -b - m - 1
  T s(0);
  for (int m = std::max(0, a); m <= -b - 1; ++m) {
    int p = m - a, q = -b - m - 1;
    if (p > f.order() || q > f.order()) continue;
    for (int c = 0; c < f.d; ++c) s += f.coeffs[p][c] * f.coeffs[q][c];
  }
  return T(-2) * s;
}

namespace {

void need_order(int M, int N, int K) {
  if (N < 0 || K < 0) throw ConfigError("N and K must be nonnegative");
  if (M < N + 2 * K)
    throw InsufficientOrder("series of order " + std::to_string(M) + " is too short for N + 2K = " +
                            std::to_string(N + 2 * K));
}

template <class T>
std::vector<std::vector<T>> minor_without(const std::vector<std::vector<T>>& a, int j) {
  std::vector<std::vector<T>> r;
  for (int i = 0; i < static_cast<int>(a.size()); ++i) {
    if (i == j) continue;
    std::vector<T> row;
    for (int k = 0; k < static_cast<int>(a.size()); ++k)
      if (k != j) row.push_back(a[i][k]);
    r.push_back(std::move(row));
  }
  return r;
}

template <class T>
bool small(const T& x, double tol, double scale) {
  if constexpr (std::is_same_v<T, Rational>) return sgn(x) == 0;
  else return std::fabs(x) <= tol * scale;
}

}  // namespace

template <class T>
SeriesMoments<T> series_moments(const VectorSeries<T>& f, int N, int K) {
  need_order(f.order(), N, K);
  SeriesMoments<T> m;
  m.N = N;
  m.K = K;
  int sz = 2 * K + 1, e = gipa_exponent(N);
  m.raw.assign(sz, std::vector<T>(sz, T(0)));
  m.skew = m.raw;
  for (int i = 0; i < sz; ++i)
    for (int j = 0; j < sz; ++j) m.raw[i][j] = residue_entry(f, 2 * K - i + e, 2 * K - j + e);
  for (int i = 0; i < sz; ++i)
    for (int j = 0; j < sz; ++j) {
      m.skew[i][j] = (m.raw[i][j] - m.raw[j][i]) / T(2);
      m.defect = std::max(m.defect, magnitude(T(m.raw[i][j] + m.raw[j][i])));
    }
  return m;
}

std::vector<std::vector<double>> contour_moments(const VectorSeries<double>& f, int N, int K, int points, double rx,
                                                 double ry) {
  need_order(f.order(), N, K);
  using C = std::complex<double>;
  const double two_pi = 2.0 * std::acos(-1.0);
  std::vector<C> xs(points), ys(points);
  std::vector<std::vector<C>> fx(points, std::vector<C>(f.d)), fy = fx;
  for (int p = 0; p < points; ++p) {
    xs[p] = std::polar(rx, two_pi * p / points);
    ys[p] = std::polar(ry, two_pi * p / points);
    for (int c = 0; c < f.d; ++c) {
      C sx = 0, sy = 0;
      for (int m = f.order(); m >= 0; --m) {
        sx = sx * xs[p] + f.coeffs[m][c];
        sy = sy * ys[p] + f.coeffs[m][c];
      }
      fx[p][c] = sx;
      fy[p][c] = sy;
    }
  }
  // G[p][q] = f(x_p).f(y_q) / (x_p - y_q) times x_p y_q (from dx dy)
  std::vector<std::vector<C>> G(points, std::vector<C>(points));
  for (int p = 0; p < points; ++p)
    for (int q = 0; q < points; ++q) {
      C dot = 0;
      for (int c = 0; c < f.d; ++c) dot += fx[p][c] * fy[q][c];
      G[p][q] = dot * xs[p] * ys[q] / (xs[p] - ys[q]);
    }
  int sz = 2 * K + 1, e = gipa_exponent(N);
  std::vector<std::vector<double>> out(sz, std::vector<double>(sz, 0.0));
  std::vector<std::vector<C>> xp(sz, std::vector<C>(points)), yp = xp;
  for (int i = 0; i < sz; ++i)
    for (int p = 0; p < points; ++p) {
      xp[i][p] = std::pow(xs[p], 2 * K - i + e);
      yp[i][p] = std::pow(ys[p], 2 * K - i + e);
    }
  for (int i = 0; i < sz; ++i)
    for (int j = 0; j < sz; ++j) {
      C s = 0;
      for (int p = 0; p < points; ++p) {
        C row = 0;
        for (int q = 0; q < points; ++q) row += yp[j][q] * G[p][q];
        s += xp[i][p] * row;
      }
      out[i][j] = -2.0 * s.real() / (static_cast<double>(points) * points);
    }
  return out;
}

template <class T>
std::vector<Poly<T>> numerator(const Poly<T>& P, const VectorSeries<T>& f, int N) {
  std::vector<Poly<T>> Q;
  for (int c = 0; c < f.d; ++c) Q.push_back((P * f.component(c)).truncated(N));
  return Q;
}

template <class T>
AxiomReport verify_axioms(const Poly<T>& P, const std::vector<Poly<T>>& Q, const VectorSeries<T>& f, int N, int K,
                          double tol) {
  AxiomReport r;
  bool exact = std::is_same_v<T, Rational>;
  auto deg = [&](const Poly<T>& p) { return exact ? p.degree() : p.degree(tol * std::max(1.0, magnitude(p))); };

  r.degree_q = true;
  for (const auto& q : Q) r.degree_q = r.degree_q && deg(q) <= N;
  if (!r.degree_q) r.failures.push_back("deg Q > " + std::to_string(N));

  r.degree_p = deg(P) == 2 * K;
  if (!r.degree_p) r.failures.push_back("deg P != " + std::to_string(2 * K));

  r.p0_nonzero = !small(P.coef(0), tol, std::max(1.0, magnitude(P)));
  if (!r.p0_nonzero) r.failures.push_back("P(0) = 0");

  // coefficients 0..N of P f - Q
  r.order = static_cast<int>(Q.size()) == f.d;
  double scale = 1.0;
  for (int c = 0; c < f.d && r.order; ++c) {
    Poly<T> pf_c = P * f.component(c);
    scale = std::max(scale, magnitude(pf_c));
    for (int i = 0; i <= N; ++i) {
      T d = pf_c.coef(i) - Q[c].coef(i);
      r.order_residual = std::max(r.order_residual, magnitude(d));
      if (exact && !exactly_zero(d)) r.order = false;
    }
  }
  if (!exact && r.order_residual > tol * scale) r.order = false;
  if (!r.order) r.failures.push_back("P f - Q is not O(z^" + std::to_string(N + 1) + ")");

  // P divides |Q|^2
  Poly<T> norm2;
  for (const auto& q : Q) norm2 += q * q;
  int dp = P.degree();
  if (dp < 0) {
    r.divisibility = false;
  } else if (dp == 0) {
    r.divisibility = true;
  } else {
    Poly<T> rem = poly_mod(norm2, P);
    r.divisibility_residual = magnitude(rem);
    r.divisibility = exact ? rem.is_zero_poly() : r.divisibility_residual <= tol * std::max(1.0, magnitude(norm2));
  }
  if (!r.divisibility) r.failures.push_back("P does not divide |Q|^2");
  return r;
}

template <class T>
GipaResult<T> gipa_pfaffian(const VectorSeries<T>& f, int N, int K, double tol) {
  need_order(f.order(), N, K);
  GipaResult<T> r;
  r.N = N;
  r.K = K;
  r.path = "pfaffian";
  if (K == 0) {
    r.P = Poly<T>::constant(T(1));
  } else {
    auto mom = series_moments(f, N, K);
    r.defect = mom.defect;
    r.tau = pf(minor_without(mom.skew, 2 * K));
    if (exactly_zero(r.tau)) throw DegenerateTau("Pf(0..2K-1) vanishes");
    // z^{2K} Pf(0..2K, z) with Pf(i, z) = z^{-i}
    r.P.c.assign(2 * K + 1, T(0));
    for (int j = 0; j <= 2 * K; ++j) {
      T minor = pf(minor_without(mom.skew, j));
      r.P.c[2 * K - j] = (j % 2 ? T(-1) : T(1)) * minor * r.tau;
    }
  }
  r.Q = numerator(r.P, f, N);
  r.report = verify_axioms(r.P, r.Q, f, N, K, tol);
  if (!r.report.ok()) throw AxiomViolation("pfaffian path: " + r.report.failures.front());
  return r;
}

namespace {

Rational binom(int n, int k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return Rational(r);
}

// Auxiliary d0 row; any fixed sequence works.
Rational aux_beta(int m) {
  Rng rng(0x5eed0000ULL + static_cast<std::uint64_t>(m + 1000));
  return rng.positive_rational(9, 9);
}

template <class T>
class RecursivePath {
 public:
  RecursivePath(const VectorSeries<T>& f, int N) : mom_(pade_moments(f, N)) {}

  T tau(int n, int k, int l) {
    if (n < 0) return T(0);
    if (n == 0) return T(1);
    auto key = std::make_tuple(n, k, l);
    auto it = tau_.find(key);
    if (it != tau_.end()) return it->second;
    T v;
    if (n <= 2) {
      v = mom_.tau(n, k, l);
    } else {
      int m = n - 2;
      T d = nz(m - 1, k - 2, l + 1);
      v = (tau(m + 1, k, l) * tau(m, k - 2, l + 1) - tau(m + 1, k - 1, l + 1) * tau(m, k - 1, l) +
           tau(m + 1, k - 1, l) * tau(m, k - 1, l + 1)) /
          d;
    }
    tau_.emplace(key, v);
    return v;
  }

  Poly<T> P(int n, int k, int l) {
    if (n < 0) return Poly<T>();
    if (n == 0) return Poly<T>::constant(T(1));
    auto key = std::make_tuple(n, k, l);
    auto it = P_.find(key);
    if (it != P_.end()) return it->second;
    int m = n - 1;
    T t1 = tau(m + 1, k, l), tA = nz(m, k - 1, l + 1), tB = nz(m, k, l), tC = tau(m + 1, k - 1, l + 1);
    Poly<T> one_z(std::vector<T>{T(1), T(1)});
    Poly<T> r = one_z * (P(m, k - 1, l + 1) * T(t1 * t1 / (tA * tA)));
    r -= (P(m, k, l) * T(t1 * tC / (tA * tB))).shifted(1);
    if (m >= 1) {
      T tD = tau(m + 2, k, l), tE = nz(m - 1, k - 1, l + 1);
      r += (one_z * P(m - 1, k - 1, l + 1)).shifted(1) * T(t1 * tD / (tA * tE));
    }
    P_.emplace(key, r);
    return r;
  }

 private:
  T nz(int n, int k, int l) {
    T v = tau(n, k, l);
    if (exactly_zero(v))
      throw DegenerateTau("tau(" + std::to_string(n) + "," + std::to_string(k) + "," + std::to_string(l) +
                          ") vanishes on the recursion path");
    return v;
  }

  PadeMoments<T> mom_;
  std::map<std::tuple<int, int, int>, T> tau_;
  std::map<std::tuple<int, int, int>, Poly<T>> P_;
};

}  // namespace

template <class T>
PadeMoments<T>::PadeMoments(std::function<T(int, int)> base, std::function<T(int)> aux)
    : c_(std::make_shared<Cache>()) {
  c_->base = std::move(base);
  c_->aux = std::move(aux);
}

template <class T>
T PadeMoments<T>::base(int p, int q) const {
  auto key = std::make_pair(p, q);
  auto it = c_->b.find(key);
  if (it != c_->b.end()) return it->second;
  T v = c_->base(p, q);
  c_->b.emplace(key, v);
  return v;
}

template <class T>
T PadeMoments<T>::aux(int m) const {
  auto it = c_->a.find(m);
  if (it != c_->a.end()) return it->second;
  T v = c_->aux(m);
  c_->a.emplace(m, v);
  return v;
}

template <class T>
T PadeMoments<T>::mu(int i, int j, int k, int l) const {
  T s(0);
  for (int a = 0; a <= l; ++a)
    for (int b = 0; b <= l; ++b) s += from_rational<T>(binom(l, a) * binom(l, b)) * base(k - i + a, k - j + b);
  return s;
}

template <class T>
T PadeMoments<T>::beta(int i, int k, int l) const {
  T s(0);
  for (int a = 0; a <= l; ++a) s += from_rational<T>(binom(l, a)) * aux(k - i + a);
  return s;
}

template <class T>
T PadeMoments<T>::tau(int n, int k, int l) const {
  if (n < 0) return T(0);
  if (n == 0) return T(1);
  int odd = n % 2;
  int sz = n + odd;
  std::vector<std::vector<T>> a(sz, std::vector<T>(sz, T(0)));
  // row 0 is d0 when n is odd
  auto label = [&](int r) { return odd ? r - 1 : r; };
  for (int r = 0; r < sz; ++r)
    for (int c = r + 1; c < sz; ++c) {
      T v = (odd && r == 0) ? beta(label(c), k, l) : mu(label(r), label(c), k, l);
      a[r][c] = v;
      a[c][r] = -v;
    }
  return pf(a);
}

template <class T>
PadeMoments<T> pade_moments(const VectorSeries<T>& f, int N) {
  int e = gipa_exponent(N);
  VectorSeries<T> g = f;
  return PadeMoments<T>(
      [g, e](int p, int q) {
        return T((residue_entry(g, p + e, q + e) - residue_entry(g, q + e, p + e)) / T(2));
      },
      [](int m) { return from_rational<T>(aux_beta(m)); });
}

namespace {

template <class T>
T int_pow(const T& x, int p) {
  T r(1), b = x;
  unsigned e = static_cast<unsigned>(p < 0 ? -p : p);
  while (e) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return p < 0 ? T(T(1) / r) : r;
}

}  // namespace

template <class T>
PadeMoments<T> pade_moments(const Measure<T>& m, const Kernel& kernel) {
  for (const auto& x : m.nodes)
    if (exactly_zero(x)) throw ConfigError("Pade moments need nonzero nodes");
  std::size_t n = m.size();
  std::vector<std::vector<T>> w(n, std::vector<T>(n, T(0)));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) w[a][b] = m.weights[a] * m.weights[b] * kernel_value(kernel, m, a, b);
  auto nodes = m.nodes;
  auto weights = m.weights;
  return PadeMoments<T>(
      [nodes, w](int p, int q) {
        T s(0);
        for (std::size_t a = 0; a < nodes.size(); ++a)
          for (std::size_t b = 0; b < nodes.size(); ++b)
            if (a != b) s += w[a][b] * int_pow(nodes[a], p) * int_pow(nodes[b], q);
        return s;
      },
      [nodes, weights](int mm) {
        T s(0);
        for (std::size_t a = 0; a < nodes.size(); ++a) s += weights[a] * int_pow(nodes[a], mm);
        return s;
      });
}

template <class T>
T pade_bilinear_residual(const PadeMoments<T>& mom, int m, int k, int l) {
  auto t = [&](int n, int kk, int ll) { return mom.tau(n, kk, ll); };
  return t(m + 2, k, l) * t(m - 1, k - 2, l + 1) - t(m + 1, k, l) * t(m, k - 2, l + 1) +
         t(m + 1, k - 1, l + 1) * t(m, k - 1, l) - t(m + 1, k - 1, l) * t(m, k - 1, l + 1);
}

template <class T>
GipaResult<T> gipa_recursive(const VectorSeries<T>& f, int N, int K, double tol) {
  need_order(f.order(), N, K);
  GipaResult<T> r;
  r.N = N;
  r.K = K;
  r.path = "recursive";
  if (K == 0) {
    r.P = Poly<T>::constant(T(1));
  } else {
    RecursivePath<T> path(f, N);
    r.P = path.P(2 * K, 2 * K, 0);
    r.tau = path.tau(2 * K, 2 * K, 0);
    r.P.c.resize(2 * K + 1, T(0));
    auto ref = series_moments(f, N, K);
    r.defect = ref.defect;
    // P(0) of the Pfaffian path is Pf(0..2K-1)^2
    T tau_pf = pf(minor_without(ref.skew, 2 * K));
    T want = tau_pf * tau_pf;
    T have = r.P.coef(0);
    if (exactly_zero(have) || exactly_zero(want)) throw DegenerateTau("P(0) vanishes on the recursive path");
    if (!(have == want)) {
      r.P *= T(want / have);
      r.rescaled = true;
    }
  }
  r.Q = numerator(r.P, f, N);
  r.report = verify_axioms(r.P, r.Q, f, N, K, tol);
  if (!r.report.ok()) throw AxiomViolation("recursive path: " + r.report.failures.front());
  return r;
}

template <class T>
std::vector<int> perturbation_probe(const GipaResult<T>& r, const VectorSeries<T>& f, double tol) {
  std::vector<int> survivors;
  for (int i = 0; i < static_cast<int>(r.P.size()); ++i) {
    Poly<T> p = r.P;
    p.c[i] += T(1);
    if (verify_axioms(p, r.Q, f, r.N, r.K, tol).ok()) survivors.push_back(i);
  }
  return survivors;
}

#define PSK_INSTANTIATE(T)                                                                                   \
  template class PadeMoments<T>;                                                                             \
  template PadeMoments<T> pade_moments(const VectorSeries<T>&, int);                                         \
  template PadeMoments<T> pade_moments(const Measure<T>&, const Kernel&);                                    \
  template T pade_bilinear_residual(const PadeMoments<T>&, int, int, int);                                   \
  template struct VectorSeries<T>;                                                                           \
  template VectorSeries<T> vector_series(std::vector<std::vector<T>>);                                       \
  template T residue_entry(const VectorSeries<T>&, int, int);                                                \
  template SeriesMoments<T> series_moments(const VectorSeries<T>&, int, int);                                \
  template std::vector<Poly<T>> numerator(const Poly<T>&, const VectorSeries<T>&, int);                      \
  template AxiomReport verify_axioms(const Poly<T>&, const std::vector<Poly<T>>&, const VectorSeries<T>&, int, \
                                     int, double);                                                           \
  template GipaResult<T> gipa_pfaffian(const VectorSeries<T>&, int, int, double);                            \
  template GipaResult<T> gipa_recursive(const VectorSeries<T>&, int, int, double);                           \
  template std::vector<int> perturbation_probe(const GipaResult<T>&, const VectorSeries<T>&, double);

PSK_INSTANTIATE(Rational)
PSK_INSTANTIATE(double)

}  // namespace psk
