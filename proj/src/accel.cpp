#include "psk/accel.hpp"

#include <cmath>

#include "psk/pfaffian.hpp"

namespace psk {

Binding accel_binding() {
  Binding b;
  b.name = "accel";
  b.k_base = Poly<Rational>(std::vector<Rational>{0, 1});
  b.l_base = Poly<Rational>(std::vector<Rational>{1, -1});
  b.c0 = Binding::C0::Ones;
  b.accel_beta = true;
  return b;
}

template <class T>
T accel_sigma(const MomentSystem<T>& sys, int n, int k, int l) {
  if (n == 0) return T(0);
  auto o = sys.scalar_oracle(k, l);
  IndexList idx = with({ExtIndex::c0(), ExtIndex::d0()}, irange(0, n - 1));
  if (idx.size() % 2) throw InvalidOrder("sigma needs an even index count");
  return pf_indexed(o, idx);
}

template <class T>
T AccelTables<T>::t(int n, int k, int l) const {
  if (n < 0) return T(0);
  if (n == 0) return T(1);
  auto it = tau.find({n, k, l});
  if (it == tau.end()) throw MissingCell("accel tau" + Site{n, k, l}.str());
  return it->second;
}

template <class T>
T AccelTables<T>::s(int n, int k, int l) const {
  if (n == 0) return T(0);
  auto it = sigma.find({n, k, l});
  if (it == sigma.end()) throw MissingCell("accel sigma" + Site{n, k, l}.str());
  return it->second;
}

template <class T>
AccelTables<T> tau_sigma_tables(const MomentSystem<T>& sys, int n_max, int k_max, int l_max) {
  if (!sys.binding().accel_beta || sys.binding().c0 != Binding::C0::Ones)
    throw ConfigError("tau/sigma tables need the acceleration binding");
  AccelTables<T> tab;
  tab.n_max = n_max;
  tab.k_max = k_max;
  tab.l_max = l_max;
  // bilinear stencil: 2n+2 in n, k+1, l-1..l+1; recurrences reach one more level
  for (int n = 1; n <= 2 * n_max + 4; ++n)
    for (int k = 0; k <= k_max + 2; ++k)
      for (int l = -1; l <= l_max + 2; ++l) {
        if (n % 2 && l < 0) continue;  // odd tau at l = -1 would need (1-y)^{-2}
        tab.tau[{n, k, l}] = tau_pfaffian(sys, n, k, l).value();
        if (n % 2 == 0 && l >= 0) tab.sigma[{n, k, l}] = accel_sigma(sys, n, k, l);
      }
  return tab;
}

template <class T>
std::pair<T, T> bilinear_residual_accel(const AccelTables<T>& tab, const Site& s) {
  int n = s.n, k = s.k, l = s.l;
  if (l < 1) throw MissingCell("accel bilinear sites need l >= 1");
  auto t = [&](int a, int b, int c) { return tab.t(a, b, c); };
  auto g = [&](int a, int b, int c) { return tab.s(a, b, c); };
  int m = 2 * n;
  T r1 = g(m, k, l) * t(m, k + 1, l) - g(m, k + 1, l) * t(m, k, l) -
         (t(m, k + 1, l) * t(m, k, l) + t(m + 2, k, l - 1) * t(m - 2, k + 1, l + 1) -
          t(m, k, l + 1) * t(m, k + 1, l - 1));
  T r2 = g(m + 2, k, l) * t(m, k + 1, l) - g(m, k + 1, l) * t(m + 2, k, l) -
         (t(m, k + 1, l) * t(m + 2, k, l) + t(m, k + 1, l + 1) * t(m + 2, k, l - 1) -
          t(m, k, l + 1) * t(m + 2, k + 1, l - 1));
  return {r1, r2};
}

template <class T>
std::vector<T> accel_recurrence_residual(const AccelTables<T>& tab, int n, int k, int l) {
  auto t = [&](int a, int b, int c) { return tab.t(a, b, c); };
  auto div = [](const T& a, const T& b) {
    if (exactly_zero(b)) throw DegenerateSite("vanishing tau in accel ratios");
    return T(a / b);
  };
  auto u = [&](int nn, int kk, int ll) { return div(t(2 * nn + 2, kk, ll - 1), t(2 * nn, kk + 1, ll)); };
  auto v = [&](int nn, int kk, int ll) { return div(tab.s(2 * nn, kk, ll), t(2 * nn, kk, ll)); };
  auto r = [&](int nn, int kk, int ll) { return div(t(2 * nn, kk, ll), t(2 * nn, kk + 1, ll - 1)); };
  std::vector<T> out;
  out.push_back(r(n + 1, k, l) - div(u(n, k, l + 1), u(n, k + 1, l)) * r(n, k + 1, l + 1));
  out.push_back(v(n + 1, k, l) - v(n, k + 1, l) - (T(1) + div(u(n, k, l), u(n, k, l + 1)) -
                                                     div(r(n, k, l + 1), r(n + 1, k, l))));
  out.push_back(div(u(n + 1, k, l), u(n, k, l + 1)) - div(r(n + 1, k, l + 1), r(n + 1, k, l)) -
                (v(n + 1, k, l) - v(n + 1, k + 1, l) - T(1)));
  return out;
}

template <class T>
T forward_difference(const std::vector<T>& S, int m, int k) {
  if (k < 0 || m < 0 || k + m >= static_cast<int>(S.size()))
    throw MissingCell("Delta^" + std::to_string(m) + " S_" + std::to_string(k) + " needs more terms");
  T s(0);
  Rational c(1);  // C(m, j)
  for (int j = 0; j <= m; ++j) {
    T term = from_rational<T>(c) * S[k + j];
    s += ((m - j) % 2) ? T(-term) : term;
    c = c * (m - j) / (j + 1);
  }
  return s;
}

template <class T>
std::optional<T> AccelRun<T>::transformed(int n, int k) const {
  auto it = out.find({n, k});
  if (it == out.end()) return std::nullopt;
  return it->second;
}

namespace {

template <class T>
bool bad(const T& x) {
  if constexpr (std::is_same_v<T, double>) return !std::isfinite(x);
  else return false;
}

}  // namespace

template <class T>
AccelRun<T> run_acceleration(const std::vector<T>& S, int n_max, int k_max, int l_max) {
  if (S.empty()) throw ConfigError("empty sequence");
  if (n_max < 0) throw ConfigError("n_max must be nonnegative");
  AccelRun<T> run;
  run.S = S;
  run.n_max = n_max;
  int M = static_cast<int>(S.size()) - 1;
  if (k_max < 0) k_max = M;
  if (l_max < 0) l_max = M / 2;

  for (int k = 0; k <= k_max; ++k)
    for (int l = 0; l <= l_max && k + 2 * l <= M; ++l) {
      run.u[{0, k, l}] = forward_difference(S, 2 * l, k);
      run.v[{0, k, l}] = T(0);
      run.r[{0, k, l}] = T(1);
    }

  enum class Got { Yes, Absent, Quarantined };
  auto look = [&](const char* name, const std::map<Site, T>& g, const Site& s, T& x) {
    auto it = g.find(s);
    if (it != g.end()) {
      x = it->second;
      return Got::Yes;
    }
    return run.unavailable.count({name, s}) ? Got::Quarantined : Got::Absent;
  };

  // Each cell: gather inputs; absent inputs mean the cell is outside the
  // triangle, quarantined ones or a zero divisor make it Unavailable.
  auto fill = [&](const char* name, std::map<Site, T>& grid, const Site& s, auto&& compute) {
    std::optional<T> val;
    bool quarantine = false, absent = false;
    compute(quarantine, absent, val);
    if (absent && !quarantine) return;
    if (quarantine || !val || bad(*val)) {
      run.unavailable.insert({name, s});
      return;
    }
    grid[s] = *val;
  };

  auto need = [&](const char* name, const std::map<Site, T>& g, Site s, T& x, bool& q, bool& a) {
    Got got = look(name, g, s, x);
    if (got == Got::Absent) a = true;
    if (got == Got::Quarantined) q = true;
    return got == Got::Yes;
  };

  for (int n = 0; n < n_max; ++n) {
    int nn = n + 1;
    for (int k = 0; k <= k_max; ++k)
      for (int l = 0; l <= l_max; ++l) {
        fill("r", run.r, {nn, k, l}, [&](bool& q, bool& a, std::optional<T>& out) {
          T u1{}, u2{}, r0{};
          bool ok = need("u", run.u, {n, k, l + 1}, u1, q, a) & need("u", run.u, {n, k + 1, l}, u2, q, a) &
                    need("r", run.r, {n, k + 1, l + 1}, r0, q, a);
          if (!ok) return;
          if (exactly_zero(u2)) return;
          out = u1 / u2 * r0;
        });
      }
    for (int k = 0; k <= k_max; ++k)
      for (int l = 0; l <= l_max; ++l) {
        fill("v", run.v, {nn, k, l}, [&](bool& q, bool& a, std::optional<T>& out) {
          T v0{}, u0{}, u1{}, r0{}, r1{};
          bool ok = need("v", run.v, {n, k + 1, l}, v0, q, a) & need("u", run.u, {n, k, l}, u0, q, a) &
                    need("u", run.u, {n, k, l + 1}, u1, q, a) & need("r", run.r, {n, k, l + 1}, r0, q, a) &
                    need("r", run.r, {nn, k, l}, r1, q, a);
          if (!ok) return;
          if (exactly_zero(u1) || exactly_zero(r1)) return;
          out = v0 + T(1) + u0 / u1 - r0 / r1;
        });
      }
    for (int k = 0; k <= k_max; ++k)
      for (int l = 0; l <= l_max; ++l) {
        fill("u", run.u, {nn, k, l}, [&](bool& q, bool& a, std::optional<T>& out) {
          T u1{}, va{}, vb{}, ra{}, rb{};
          bool ok = need("u", run.u, {n, k, l + 1}, u1, q, a) & need("v", run.v, {nn, k, l}, va, q, a) &
                    need("v", run.v, {nn, k + 1, l}, vb, q, a) & need("r", run.r, {nn, k, l + 1}, ra, q, a) &
                    need("r", run.r, {nn, k, l}, rb, q, a);
          if (!ok) return;
          if (exactly_zero(rb)) return;
          out = u1 * (va - vb - T(1) + ra / rb);
        });
      }
  }

  for (int n = 0; n <= n_max; ++n)
    for (int k = 0; k <= k_max; ++k) {
      auto iu = run.u.find({n, k, 0});
      auto ir = run.r.find({n, k, 1});
      if (iu == run.u.end() || ir == run.r.end() || exactly_zero(ir->second)) continue;
      T val = iu->second / ir->second;
      if (!bad(val)) run.out[{n, k}] = val;
    }
  return run;
}

#define PSK_INSTANTIATE(T)                                                                     \
  template T accel_sigma(const MomentSystem<T>&, int, int, int);                               \
  template struct AccelTables<T>;                                                              \
  template AccelTables<T> tau_sigma_tables(const MomentSystem<T>&, int, int, int);             \
  template std::pair<T, T> bilinear_residual_accel(const AccelTables<T>&, const Site&);        \
  template std::vector<T> accel_recurrence_residual(const AccelTables<T>&, int, int, int);     \
  template T forward_difference(const std::vector<T>&, int, int);                              \
  template struct AccelRun<T>;                                                                 \
  template AccelRun<T> run_acceleration(const std::vector<T>&, int, int, int);

PSK_INSTANTIATE(Rational)
PSK_INSTANTIATE(double)

}  // namespace psk
