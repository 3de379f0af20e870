#pragma once

#include <array>
#include <map>
#include <mutex>
#include <memory>
#include <string>
#include <tuple>
#include <vector>

#include "psk/errors.hpp"
#include "psk/jet.hpp"
#include "psk/pfaffian.hpp"
#include "psk/poly.hpp"

namespace psk {

template <class T>
struct Measure {
  std::vector<T> nodes;
  std::vector<T> weights;
  bool discrete = true;
  std::string label = "discrete";
  // Optional planar rule (x, y, weight) for double integrals; empty means
  // the tensor product of the nodes is used.
  std::vector<std::array<T, 3>> pairs;

  std::size_t size() const { return nodes.size(); }
};

template <class T>
Measure<T> discrete_measure(std::vector<T> nodes, std::vector<T> weights) {
  if (nodes.size() != weights.size()) throw ConfigError("nodes and weights differ in length");
  for (std::size_t i = 1; i < nodes.size(); ++i)
    if (!(nodes[i - 1] < nodes[i])) throw ConfigError("nodes must be strictly increasing");
  Measure<T> m;
  m.nodes = std::move(nodes);
  m.weights = std::move(weights);
  return m;
}

// Gauss rules (Newton iteration on the three-term recurrence).
// Laguerre: weight x^alpha e^{-x} on (0, inf). Hermite: e^{-x^2} on the line.
Measure<double> gauss_laguerre(int n, double alpha = 0.0);
Measure<double> gauss_hermite(int n);
Measure<double> gauss_legendre01(int n);

// Multiply every weight by exp(t0 x + s0 q(x)).
Measure<double> reweighted(const Measure<double>& m, double t0, double s0, const Poly<Rational>& q);

// The same nodes and weights as exact rationals (each double is represented
// exactly). Tau ratios of ill-conditioned rules are then free of roundoff.
Measure<Rational> exact_copy(const Measure<double>& m);

enum class KernelId { Sgn, Bures, Shifted, QRatio, Generic };

struct Kernel {
  KernelId id = KernelId::Bures;
  Poly<Rational> q = Poly<Rational>(std::vector<Rational>{0, 0, 1});
  // Generic: antisymmetric table indexed by node position.
  std::vector<std::vector<Rational>> table;

  static Kernel bures() { return {KernelId::Bures, {}, {}}; }
  static Kernel shifted() { return {KernelId::Shifted, {}, {}}; }
  static Kernel sgn() { return {KernelId::Sgn, {}, {}}; }
  static Kernel qratio(Poly<Rational> q) { return {KernelId::QRatio, std::move(q), {}}; }
  static Kernel generic(std::vector<std::vector<Rational>> t) { return {KernelId::Generic, {}, std::move(t)}; }

  std::string name() const;
};

KernelId parse_kernel_id(const std::string& s);

template <class T>
T poly_at(const Poly<Rational>& p, const T& x) {
  T r(0);
  for (std::size_t i = p.c.size(); i-- > 0;) r = r * x + from_rational<T>(p.c[i]);
  return r;
}

template <class T>
T kernel_at(const Kernel& k, const T& x, const T& y) {
  switch (k.id) {
    case KernelId::Sgn: return x < y ? T(-1) : (y < x ? T(1) : T(0));
    case KernelId::Bures: return T(x - y) / T(x + y);
    case KernelId::Shifted: return T(x - y) / T(x * y + x + y);
    case KernelId::QRatio: {
      T qx = poly_at(k.q, x), qy = poly_at(k.q, y);
      return T(qx - qy) / T(qx + qy);
    }
    case KernelId::Generic: throw ConfigError("generic kernel is defined on node positions only");
  }
  return T(0);
}

template <class T>
T kernel_value(const Kernel& k, const Measure<T>& m, std::size_t a, std::size_t b) {
  if (a == b) return T(0);
  if (k.id == KernelId::Generic) return from_rational<T>(k.table.at(a).at(b));
  return kernel_at(k, m.nodes[a], m.nodes[b]);
}

// Which deformation each lattice uses. A node of position a contributes
//   h_a(i,k,l) = x^{index_sign*i} kb(x)^k lb(x)^l exp(e_t x + e_s q(x)).
struct Binding {
  enum class D1 { None, QMoment, Shift };
  enum class C0 { None, Alternating, Ones };

  std::string name = "plain";
  int index_sign = 1;
  Poly<Rational> k_base = Poly<Rational>(std::vector<Rational>{0, 1});
  Poly<Rational> l_base = Poly<Rational>(std::vector<Rational>{1, 1});
  Poly<Rational> q = Poly<Rational>(std::vector<Rational>{0, 0, 1});
  int t_order = 0;
  int s_order = 0;
  D1 d1 = D1::None;
  C0 c0 = C0::None;
  bool accel_beta = false;
};

template <class T>
class MomentSystem {
 public:
  MomentSystem(Measure<T> m, Kernel k, Binding b) : st_(std::make_shared<State>()) {
    st_->m = std::move(m);
    st_->k = std::move(k);
    st_->b = std::move(b);
    if (st_->k.id == KernelId::QRatio) st_->b.q = st_->k.q;
    if (st_->k.id == KernelId::Generic && st_->k.table.size() != st_->m.size())
      throw ConfigError("generic kernel table size does not match the node count");
    std::size_t n = st_->m.size();
    st_->omega.assign(n, std::vector<T>(n, T(0)));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t c = 0; c < n; ++c) st_->omega[a][c] = kernel_value(st_->k, st_->m, a, c);
    for (std::size_t a = 0; a < n; ++a) {
      T qx = poly_at(st_->b.q, st_->m.nodes[a]);
      st_->qv.push_back(qx);
      st_->ejet.push_back(exp_jet(st_->m.nodes[a], qx, st_->b.t_order, st_->b.s_order));
    }
    for (const auto& [x, y, w] : st_->m.pairs) {
      st_->pair_omega.push_back(kernel_at(st_->k, x, y));
      T qs = poly_at(st_->b.q, x) + poly_at(st_->b.q, y);
      st_->pair_jet.push_back(exp_jet(T(x + y), qs, st_->b.t_order, st_->b.s_order));
    }
  }

  const Measure<T>& measure() const { return st_->m; }
  const Kernel& kernel() const { return st_->k; }
  const Binding& binding() const { return st_->b; }
  T omega(std::size_t a, std::size_t b) const { return st_->omega[a][b]; }

  // h(i,k,l) at a point, without the exponential jet.
  T factor_at(const T& x, int i, int k, int l) const {
    const auto& b = st_->b;
    T f = ipow(x, b.index_sign * i);
    if (k) f *= ipow(poly_at(b.k_base, x), k);
    if (l) f *= ipow(poly_at(b.l_base, x), l);
    return f;
  }

  // Per-node factor h_a(i,k,l) for all nodes.
  const std::vector<Jet<T>>& node_factors(int i, int k, int l) const {
    std::lock_guard<std::mutex> g(st_->mu_lock);
    auto key = std::make_tuple(i, k, l);
    auto it = st_->h.find(key);
    if (it != st_->h.end()) return it->second;
    std::vector<Jet<T>> v;
    for (std::size_t a = 0; a < st_->m.size(); ++a)
      v.push_back(st_->ejet[a] * Jet<T>(factor_at(st_->m.nodes[a], i, k, l)));
    return st_->h.emplace(key, std::move(v)).first->second;
  }

  Jet<T> mu(int i, int j, int k = 0, int l = 0) const {
    auto key = std::make_tuple(0, i, j, k, l);
    if (auto c = cached(key)) return *c;
    Jet<T> s = zero_jet();
    if (!st_->m.pairs.empty()) {
      for (std::size_t p = 0; p < st_->m.pairs.size(); ++p) {
        const auto& [x, y, w] = st_->m.pairs[p];
        s += st_->pair_jet[p] * Jet<T>(T(factor_at(x, i, k, l) * factor_at(y, j, k, l) * st_->pair_omega[p] * w));
      }
      return store(key, s);
    }
    const auto& hi = node_factors(i, k, l);
    const auto& hj = node_factors(j, k, l);
    std::size_t n = st_->m.size();
    for (std::size_t a = 0; a < n; ++a) {
      Jet<T> inner = zero_jet();
      for (std::size_t c = 0; c < n; ++c) {
        if (exactly_zero(st_->omega[a][c])) continue;
        inner += hj[c] * Jet<T>(T(st_->omega[a][c] * st_->m.weights[c]));
      }
      s += hi[a] * Jet<T>(st_->m.weights[a]) * inner;
    }
    return store(key, s);
  }

  Jet<T> beta(int i, int k = 0, int l = 0) const {
    auto key = std::make_tuple(1, i, 0, k, l);
    if (auto c = cached(key)) return *c;
    Jet<T> s = zero_jet();
    std::size_t n = st_->m.size();
    const auto& hi = node_factors(i, k, l);
    if (st_->b.accel_beta) {
      // double integral: x^{k+i} y^k w(x,y) lb(x)^l lb(y)^{l-1}
      const auto& h0 = node_factors(0, k, l - 1);
      for (std::size_t a = 0; a < n; ++a)
        for (std::size_t c = 0; c < n; ++c) {
          if (exactly_zero(st_->omega[a][c])) continue;
          s += hi[a] * h0[c] * Jet<T>(T(st_->omega[a][c] * st_->m.weights[a] * st_->m.weights[c]));
        }
    } else {
      for (std::size_t a = 0; a < n; ++a) s += hi[a] * Jet<T>(st_->m.weights[a]);
    }
    return store(key, s);
  }

  // The d1 row: s-derivative moments (QMoment) or shifted single moments (Shift).
  Jet<T> d1(int i, int k = 0, int l = 0) const {
    switch (st_->b.d1) {
      case Binding::D1::Shift: return beta(i + 1, k, l);
      case Binding::D1::QMoment: {
        Jet<T> s = zero_jet();
        const auto& hi = node_factors(i, k, l);
        for (std::size_t a = 0; a < st_->m.size(); ++a)
          s += hi[a] * Jet<T>(T(st_->qv[a] * st_->m.weights[a]));
        return s;
      }
      case Binding::D1::None: break;
    }
    throw InvalidIndexList("binding " + st_->b.name + " has no d1 row");
  }

  T c0(int i) const {
    switch (st_->b.c0) {
      case Binding::C0::Alternating: return (i - 1) % 2 == 0 ? T(1) : T(-1);
      case Binding::C0::Ones: return T(1);
      case Binding::C0::None: break;
    }
    throw InvalidIndexList("binding " + st_->b.name + " has no c0 row");
  }

  // Entry oracle at deformation (k, l).
  EntryOracle<Jet<T>> oracle(int k = 0, int l = 0) const {
    MomentSystem self = *this;
    EntryOracle<Jet<T>> o;
    o.entry = [self, k, l](const ExtIndex& a, const ExtIndex& b) { return self.entry(a, b, k, l); };
    int sign = st_->b.index_sign;
    o.z_entry = [sign](const ExtIndex& a) -> ZMonomial<Jet<T>> {
      if (a.is_int()) return {Jet<T>(T(1)), sign * a.n};
      return {Jet<T>(T(0)), 0};
    };
    return o;
  }

  EntryOracle<T> scalar_oracle(int k = 0, int l = 0) const {
    auto o = oracle(k, l);
    EntryOracle<T> r;
    r.entry = [o](const ExtIndex& a, const ExtIndex& b) { return o(a, b).value(); };
    int sign = st_->b.index_sign;
    r.z_entry = [sign](const ExtIndex& a) -> ZMonomial<T> {
      if (a.is_int()) return {T(1), sign * a.n};
      return {T(0), 0};
    };
    return r;
  }

  Jet<T> entry(const ExtIndex& a, const ExtIndex& b, int k, int l) const {
    using K = ExtIndex::Kind;
    auto rank = [](const ExtIndex& x) {
      switch (x.kind) {
        case K::C0: return 0;
        case K::D0: return 1;
        case K::D1: return 2;
        case K::Int: return 3;
        case K::Z: return 4;
      }
      return 5;
    };
    if (a == b) return zero_jet();
    if (rank(a) > rank(b)) return -entry(b, a, k, l);
    if (a.kind == K::Z || b.kind == K::Z) throw InvalidIndexList("z label in entry oracle");
    if (a.is_int()) return mu(a.n, b.n, k, l);
    if (a.kind == K::C0) {
      if (b.is_int()) return Jet<T>(c0(b.n));
      return zero_jet();  // (c0,d0) = (c0,d1) = 0
    }
    if (a.kind == K::D0) {
      if (b.is_int()) return beta(b.n, k, l);
      return zero_jet();  // (d0,d1) = 0
    }
    // D1
    return d1(b.n, k, l);
  }

  Jet<T> zero_jet() const {
    Jet<T> z(T(0));
    z.set_orders(st_->b.t_order, st_->b.s_order);
    return z;
  }

 private:
  using Key = std::tuple<int, int, int, int, int>;
  struct State {
    Measure<T> m;
    Kernel k;
    Binding b;
    std::vector<std::vector<T>> omega;
    std::vector<T> qv;
    std::vector<Jet<T>> ejet;
    std::vector<T> pair_omega;
    std::vector<Jet<T>> pair_jet;
    mutable std::recursive_mutex lock;
    mutable std::mutex mu_lock;
    std::map<Key, Jet<T>> cache;
    std::map<std::tuple<int, int, int>, std::vector<Jet<T>>> h;
  };

  std::unique_ptr<Jet<T>> cached(const Key& key) const {
    std::lock_guard<std::recursive_mutex> g(st_->lock);
    auto it = st_->cache.find(key);
    if (it == st_->cache.end()) return nullptr;
    return std::make_unique<Jet<T>>(it->second);
  }
  Jet<T> store(const Key& key, const Jet<T>& v) const {
    std::lock_guard<std::recursive_mutex> g(st_->lock);
    st_->cache.emplace(key, v);
    return v;
  }

  std::shared_ptr<State> st_;
};

// ---- de Bruijn oracles (brute force over ordered node tuples) ----

namespace detail {
template <class F>
void for_each_increasing(std::size_t n, std::size_t r, F&& f) {
  std::vector<std::size_t> idx(r);
  for (std::size_t i = 0; i < r; ++i) idx[i] = i;
  if (r > n) return;
  while (true) {
    f(idx);
    std::size_t p = r;
    while (p > 0 && idx[p - 1] == n - r + p - 1) --p;
    if (p == 0) return;
    ++idx[p - 1];
    for (std::size_t q = p; q < r; ++q) idx[q] = idx[q - 1] + 1;
  }
}
}  // namespace detail

// sum over a_1 < .. < a_m of Pf(S) det[h_{a_j}(i)] prod w, m = 2n (even) or 2n+1 (odd, bordered S).
template <class T>
Jet<T> debruijn_sum(const MomentSystem<T>& sys, int m, int k = 0, int l = 0) {
  const auto& meas = sys.measure();
  std::size_t N = meas.size();
  Jet<T> total = sys.zero_jet();
  if (m == 0) return Jet<T>(T(1));
  std::vector<const std::vector<Jet<T>>*> h;
  for (int i = 0; i < m; ++i) h.push_back(&sys.node_factors(i, k, l));
  bool odd = m % 2 == 1;
  detail::for_each_increasing(N, static_cast<std::size_t>(m), [&](const std::vector<std::size_t>& a) {
    std::size_t sz = a.size() + (odd ? 1 : 0);
    std::vector<std::vector<T>> S(sz, std::vector<T>(sz, T(0)));
    std::size_t off = odd ? 1 : 0;
    for (std::size_t p = 0; p < a.size(); ++p) {
      if (odd) {
        S[0][p + 1] = T(1);
        S[p + 1][0] = T(-1);
      }
      for (std::size_t q = 0; q < a.size(); ++q) S[p + off][q + off] = sys.omega(a[p], a[q]);
    }
    T pfS = pf(S);
    if (exactly_zero(pfS)) return;
    std::vector<std::vector<Jet<T>>> D(a.size(), std::vector<Jet<T>>(a.size()));
    Jet<T> w(T(1));
    for (std::size_t j = 0; j < a.size(); ++j) {
      w *= Jet<T>(meas.weights[a[j]]);
      for (std::size_t i = 0; i < a.size(); ++i) D[i][j] = (*h[i])[a[j]];
    }
    total += Jet<T>(pfS) * det(D) * w;
  });
  return total;
}

template <class T>
Jet<T> debruijn_even(const MomentSystem<T>& sys, int n, int k = 0, int l = 0) {
  if (2 * n > static_cast<int>(sys.measure().size())) return Jet<T>(T(0));
  return debruijn_sum(sys, 2 * n, k, l);
}

template <class T>
Jet<T> debruijn_odd(const MomentSystem<T>& sys, int n, int k = 0, int l = 0) {
  if (2 * n + 1 > static_cast<int>(sys.measure().size())) return Jet<T>(T(0));
  return debruijn_sum(sys, 2 * n + 1, k, l);
}

// tau_n from the Pfaffian definition (tau_{2m} = Pf(0..2m-1), tau_{2m+1} = Pf(d0,0..2m)).
template <class T>
Jet<T> tau_pfaffian(const MomentSystem<T>& sys, int n, int k = 0, int l = 0) {
  if (n < 0) return Jet<T>(T(0));
  if (n == 0) return Jet<T>(T(1));
  auto o = sys.oracle(k, l);
  if (n % 2 == 0) return pf_indexed(o, irange(0, n - 1));
  return pf_indexed(o, with({ExtIndex::d0()}, irange(0, n - 1)));
}

// Multiple-sum tau with the lattice's closed-form integrand; the sign relating
// it to the Pfaffian tau is detected, not assumed.
template <class T>
struct MultiIntegralTau {
  Jet<T> unsigned_sum;
  Jet<T> pfaffian;
  int sign = 0;  // +1 or -1 if pfaffian == sign * unsigned_sum; 0 if neither
  std::string form;
};

template <class T>
MultiIntegralTau<T> tau_multi_integral(const MomentSystem<T>& sys, int n, int k = 0, int l = 0) {
  if (n > static_cast<int>(sys.measure().size()))
    throw InsufficientSupport("tau_" + std::to_string(n) + " needs at least n nodes");
  MultiIntegralTau<T> r;
  r.pfaffian = tau_pfaffian(sys, n, k, l);
  const auto& meas = sys.measure();
  const auto& h0 = sys.node_factors(0, k, l);
  KernelId kid = sys.kernel().id;
  Jet<T> total = sys.zero_jet();
  if (n == 0) total = Jet<T>(T(1));
  switch (kid) {
    case KernelId::Bures: r.form = "prod (xj-xi)^2/(xi+xj)"; break;
    case KernelId::Shifted: r.form = "prod (xj-xi)^2/(xi xj+xi+xj)"; break;
    case KernelId::QRatio: r.form = "prod (q(xi)-q(xj))(xj-xi)/(q(xi)+q(xj))"; break;
    default: r.form = "Pf(S) prod (xj-xi)"; break;
  }
  if (n > 0) {
    detail::for_each_increasing(meas.size(), static_cast<std::size_t>(n), [&](const std::vector<std::size_t>& a) {
      T prod(1);
      for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = i + 1; j < a.size(); ++j) {
          const T& xi = meas.nodes[a[i]];
          const T& xj = meas.nodes[a[j]];
          T d = xj - xi;
          switch (kid) {
            case KernelId::Bures: prod *= T(d * d) / T(xi + xj); break;
            case KernelId::Shifted: prod *= T(d * d) / T(xi * xj + xi + xj); break;
            case KernelId::QRatio: {
              T qi = poly_at(sys.binding().q, xi), qj = poly_at(sys.binding().q, xj);
              prod *= T(qi - qj) * d / T(qi + qj);
              break;
            }
            default: prod *= d; break;
          }
        }
      if (kid == KernelId::Generic || kid == KernelId::Sgn) {
        bool odd = a.size() % 2 == 1;
        std::size_t off = odd ? 1 : 0, sz = a.size() + off;
        std::vector<std::vector<T>> S(sz, std::vector<T>(sz, T(0)));
        for (std::size_t p = 0; p < a.size(); ++p) {
          if (odd) {
            S[0][p + 1] = T(1);
            S[p + 1][0] = T(-1);
          }
          for (std::size_t q = 0; q < a.size(); ++q) S[p + off][q + off] = sys.omega(a[p], a[q]);
        }
        prod *= pf(S);
      }
      Jet<T> w(prod);
      for (auto x : a) w *= h0[x] * Jet<T>(meas.weights[x]);
      total += w;
    });
  }
  r.unsigned_sum = total;
  double tol = 1e-9 * (1.0 + magnitude(total));
  if (is_zero(r.pfaffian - total, tol)) r.sign = 1;
  else if (is_zero(r.pfaffian + total, tol)) r.sign = -1;
  return r;
}

}  // namespace psk
