#include "psk/lattices.hpp"

#include <cmath>
#include <functional>
#include <optional>

namespace psk {

namespace {

using P = Poly<Rational>;

P lin(const Rational& c0, const Rational& c1) { return P(std::vector<Rational>{c0, c1}); }

bool same_poly(const P& a, const P& b) {
  std::size_t n = std::max(a.size(), b.size());
  for (std::size_t i = 0; i < n; ++i) {
    Rational x = i < a.size() ? a.c[i] : Rational(0);
    Rational y = i < b.size() ? b.c[i] : Rational(0);
    if (x != y) return false;
  }
  return true;
}

}  // namespace

const std::vector<LatticeId>& all_lattices() {
  static const std::vector<LatticeId> ids = {LatticeId::GLV_1p2,   LatticeId::GLV_3D,   LatticeId::BTODA_2p1,
                                             LatticeId::BTODA_1p1, LatticeId::BTODA_1p2, LatticeId::BTODA_3D,
                                             LatticeId::BTODA_2D};
  return ids;
}

std::string lattice_name(LatticeId id) {
  switch (id) {
    case LatticeId::GLV_1p2: return "GLV_1p2";
    case LatticeId::GLV_3D: return "GLV_3D";
    case LatticeId::BTODA_2p1: return "BTODA_2p1";
    case LatticeId::BTODA_1p1: return "BTODA_1p1";
    case LatticeId::BTODA_1p2: return "BTODA_1p2";
    case LatticeId::BTODA_3D: return "BTODA_3D";
    case LatticeId::BTODA_2D: return "BTODA_2D";
  }
  return "?";
}

LatticeId parse_lattice_id(const std::string& s) {
  for (auto id : all_lattices())
    if (lattice_name(id) == s) return id;
  throw ConfigError("unknown lattice system '" + s + "'");
}

bool is_semidiscrete(LatticeId id) {
  return id == LatticeId::GLV_1p2 || id == LatticeId::BTODA_2p1 || id == LatticeId::BTODA_1p1 ||
         id == LatticeId::BTODA_1p2;
}

std::string Site::str() const {
  return "(" + std::to_string(n) + "," + std::to_string(k) + "," + std::to_string(l) + ")";
}

Binding lattice_binding(LatticeId id, const Rational& lambda, const Poly<Rational>& q) {
  Binding b;
  b.name = lattice_name(id);
  switch (id) {
    case LatticeId::GLV_1p2:
      b.k_base = lin(0, 1);
      b.t_order = 1;
      break;
    case LatticeId::GLV_3D:
      b.k_base = lin(0, 1);
      b.l_base = lin(1, 1);
      break;
    case LatticeId::BTODA_2p1:
      b.q = q;
      b.t_order = 1;
      b.s_order = 1;
      b.d1 = Binding::D1::QMoment;
      break;
    case LatticeId::BTODA_1p1:
      b.t_order = 2;
      b.d1 = Binding::D1::Shift;
      break;
    case LatticeId::BTODA_1p2:
      b.k_base = lin(1, 1);
      b.t_order = 1;
      b.d1 = Binding::D1::Shift;
      break;
    case LatticeId::BTODA_3D:
      b.k_base = lin(1, 1);
      b.l_base = lin(lambda, 1);
      b.d1 = Binding::D1::Shift;
      break;
    case LatticeId::BTODA_2D:
      b.k_base = lin(1, 1);
      b.d1 = Binding::D1::Shift;
      break;
  }
  return b;
}

Kernel lattice_kernel(LatticeId id, const Kernel& generic_default, const Poly<Rational>& q) {
  switch (id) {
    case LatticeId::GLV_1p2:
    case LatticeId::GLV_3D: return generic_default;
    case LatticeId::BTODA_2p1: return Kernel::qratio(q);
    case LatticeId::BTODA_1p1: return Kernel::bures();
    default: return Kernel::shifted();
  }
}

template <class T>
void check_binding(LatticeId id, const MomentSystem<T>& sys) {
  const auto& b = sys.binding();
  KernelId kid = sys.kernel().id;
  auto fail = [&](const std::string& why) { throw ConfigError(lattice_name(id) + ": " + why); };
  auto want_kernel = [&](KernelId k) {
    if (kid != k) fail("kernel " + sys.kernel().name() + " does not match");
  };
  if (b.index_sign != 1) fail("moments must use nonnegative powers");
  switch (id) {
    case LatticeId::GLV_1p2:
      if (!same_poly(b.k_base, lin(0, 1))) fail("k deformation must be x^k");
      if (b.t_order < 1) fail("needs a t-jet of order 1");
      break;
    case LatticeId::GLV_3D:
      if (!same_poly(b.k_base, lin(0, 1)) || !same_poly(b.l_base, lin(1, 1))) fail("weight must be x^k (1+x)^l");
      break;
    case LatticeId::BTODA_2p1:
      want_kernel(KernelId::QRatio);
      if (!same_poly(b.q, sys.kernel().q)) fail("s-flow function differs from the kernel's q");
      if (b.t_order < 1 || b.s_order < 1) fail("needs mixed (1,1) jets");
      break;
    case LatticeId::BTODA_1p1:
      want_kernel(KernelId::Bures);
      if (b.t_order < 2) fail("needs a t-jet of order 2");
      break;
    case LatticeId::BTODA_1p2:
      want_kernel(KernelId::Shifted);
      if (!same_poly(b.k_base, lin(1, 1))) fail("weight must be (1+x)^k");
      if (b.t_order < 1) fail("needs a t-jet of order 1");
      break;
    case LatticeId::BTODA_3D:
      want_kernel(KernelId::Shifted);
      if (!same_poly(b.k_base, lin(1, 1)) || b.l_base.degree() != 1 || b.l_base.c[1] != 1)
        fail("weight must be (1+x)^k (lambda+x)^l");
      break;
    case LatticeId::BTODA_2D:
      want_kernel(KernelId::Shifted);
      if (!same_poly(b.k_base, lin(1, 1))) fail("weight must be (1+x)^k");
      break;
  }
}

Reach bilinear_reach(LatticeId id) {
  switch (id) {
    case LatticeId::GLV_1p2: return {2, 1, 0};
    case LatticeId::GLV_3D: return {2, 1, 1};
    case LatticeId::BTODA_2p1:
    case LatticeId::BTODA_1p1: return {1, 0, 0};
    case LatticeId::BTODA_1p2: return {1, 1, 0};
    case LatticeId::BTODA_3D: return {1, 1, 1};
    case LatticeId::BTODA_2D: return {1, 2, 0};
  }
  return {0, 0, 0};
}

bool uses_l(LatticeId id) { return id == LatticeId::GLV_3D || id == LatticeId::BTODA_3D; }
bool uses_k(LatticeId id) { return id != LatticeId::BTODA_2p1 && id != LatticeId::BTODA_1p1; }

template <class T>
Jet<T> TauTable<T>::at(int n, int k, int l) const {
  if (n < 0) return Jet<T>(T(0));
  if (n == 0) return Jet<T>(T(1));
  auto it = cells.find({n, k, l});
  if (it == cells.end()) throw MissingCell(lattice_name(id) + " tau" + Site{n, k, l}.str());
  return it->second;
}

template <class T>
TauTable<T> tau_table(LatticeId id, const MomentSystem<T>& sys, int n_max, int k_max, int l_max) {
  check_binding(id, sys);
  if (!uses_k(id)) k_max = 0;
  if (!uses_l(id)) l_max = 0;
  TauTable<T> tab;
  tab.id = id;
  tab.n_max = n_max;
  tab.k_max = k_max;
  tab.l_max = l_max;
  for (int n = 1; n <= n_max; ++n)
    for (int k = 0; k <= k_max; ++k)
      for (int l = 0; l <= l_max; ++l) {
        Jet<T> v = tau_pfaffian(sys, n, k, l);
        if (is_zero(v.value(), 0.0)) tab.degenerate.insert({n, k, l});
        tab.cells.emplace(Site{n, k, l}, std::move(v));
      }
  return tab;
}

template <class T>
T bilinear_residual(LatticeId id, const TauTable<T>& tab, const Site& s) {
  int n = s.n, k = s.k, l = s.l;
  auto t = [&](int a, int b, int c) { return tab.at(a, b, c); };
  switch (id) {
    case LatticeId::GLV_1p2: {
      T lhs = t(n + 1, k, 0).value() * t(n, k + 1, 0).dt() - t(n, k + 1, 0).value() * t(n + 1, k, 0).dt();
      T rhs = t(n + 2, k, 0).value() * t(n - 1, k + 1, 0).value() - t(n, k, 0).value() * t(n + 1, k + 1, 0).value();
      return lhs - rhs;
    }
    case LatticeId::GLV_3D: {
      T lhs = t(n + 2, k, l).value() * t(n - 1, k + 1, l + 1).value() -
              t(n, k, l + 1).value() * t(n + 1, k + 1, l).value();
      T rhs = t(n, k + 1, l + 1).value() * t(n + 1, k, l).value() -
              t(n, k + 1, l).value() * t(n + 1, k, l + 1).value();
      return lhs - rhs;
    }
    case LatticeId::BTODA_2p1: {
      Jet<T> a = t(n, 0, 0), m = t(n - 1, 0, 0), p = t(n + 1, 0, 0);
      T lhs = a.dts() * a.value() - a.dt() * a.ds();
      T rhs = m.ds() * p.value() - p.ds() * m.value();
      return lhs - rhs;
    }
    case LatticeId::BTODA_1p1: {
      Jet<T> a = t(n, 0, 0), m = t(n - 1, 0, 0), p = t(n + 1, 0, 0);
      T lhs = a.dtt() * a.value() - a.dt() * a.dt();
      T rhs = m.dt() * p.value() - p.dt() * m.value();
      return lhs - rhs;
    }
    case LatticeId::BTODA_1p2: {
      Jet<T> a1 = t(n, k + 1, 0), a0 = t(n, k, 0);
      T lhs = a1.dt() * a0.value() - a0.dt() * a1.value();
      T rhs = t(n + 1, k, 0).value() * t(n - 1, k + 1, 0).value() - t(n + 1, k + 1, 0).value() * t(n - 1, k, 0).value();
      return lhs - rhs;
    }
    case LatticeId::BTODA_3D: {
      T lhs = t(n, k + 1, l + 1).value() * t(n, k, l).value() - t(n, k, l + 1).value() * t(n, k + 1, l).value();
      T rhs = t(n - 1, k + 1, l + 1).value() * t(n + 1, k, l).value() -
              t(n + 1, k + 1, l).value() * t(n - 1, k, l + 1).value();
      return lhs - rhs;
    }
    case LatticeId::BTODA_2D: {
      T mid = t(n, k + 1, 0).value();
      T lhs = t(n, k + 2, 0).value() * t(n, k, 0).value() - mid * mid;
      T rhs = t(n + 1, k, 0).value() * t(n - 1, k + 2, 0).value() -
              t(n + 1, k + 1, 0).value() * t(n - 1, k + 1, 0).value();
      return lhs - rhs;
    }
  }
  return T(0);
}

std::vector<Site> interior_sites(LatticeId id, int n_max, int k_max, int l_max) {
  Reach r = bilinear_reach(id);
  int km = uses_k(id) ? k_max - r.k : 0;
  int lm = uses_l(id) ? l_max - r.l : 0;
  std::vector<Site> out;
  for (int n = 0; n + r.n <= n_max; ++n)
    for (int k = 0; k <= km; ++k)
      for (int l = 0; l <= lm; ++l) out.push_back({n, k, l});
  return out;
}

template <class T>
std::vector<SiteResidual<T>> bilinear_sweep(LatticeId id, const MomentSystem<T>& sys, int n_max, int k_max,
                                            int l_max) {
  Reach r = bilinear_reach(id);
  auto tab = tau_table(id, sys, n_max + r.n, k_max + r.k, l_max + r.l);
  std::vector<SiteResidual<T>> out;
  for (const auto& s : interior_sites(id, tab.n_max, tab.k_max, tab.l_max))
    out.push_back({s, bilinear_residual(id, tab, s)});
  return out;
}

// ---- nonlinear variables ----

template <class T>
bool LatticeState<T>::has(const std::string& name, const Site& s) const {
  auto it = vars.find(name);
  return it != vars.end() && it->second.count(s);
}

template <class T>
const Jet<T>& LatticeState<T>::get(const std::string& name, const Site& s) const {
  auto it = vars.find(name);
  if (it != vars.end()) {
    auto jt = it->second.find(s);
    if (jt != it->second.end()) return jt->second;
  }
  if (degenerate.count({name, s})) throw DegenerateSite(name + s.str() + " has a vanishing denominator");
  throw MissingCell(name + s.str() + " outside the state");
}

template <class T>
LatticeState<T> nonlinear_vars(LatticeId id, const TauTable<T>& tab) {
  LatticeState<T> st;
  st.id = id;
  auto t = [&](int a, int b, int c) { return tab.at(a, b, c); };
  auto ratio = [&](const std::string& name, const Site& s, const Jet<T>& num, const Jet<T>& den) {
    if (is_zero(den.value(), 0.0)) {
      st.degenerate.insert({name, s});
      return;
    }
    st.put(name, s, num / den);
  };
  int N = tab.n_max, K = tab.k_max, L = tab.l_max;
  switch (id) {
    case LatticeId::GLV_1p2:
    case LatticeId::BTODA_1p2:
      for (int k = 0; k < K; ++k) {
        for (int n = 0; n <= N; ++n) ratio("r", {n, k, 0}, t(n, k + 1, 0), t(n, k, 0));
        for (int n = 0; n < N; ++n) ratio("v", {n, k, 0}, t(n + 1, k, 0), t(n, k + 1, 0));
      }
      break;
    case LatticeId::BTODA_2p1:
    case LatticeId::BTODA_1p1: {
      bool s_flow = id == LatticeId::BTODA_2p1;
      for (int n = 0; n <= N; ++n) {
        Jet<T> a = t(n, 0, 0);
        Jet<T> da = s_flow ? derivative_s(a) : derivative_t(a);
        ratio("b", {n, 0, 0}, da, a);
        if (n < N) ratio("u", {n, 0, 0}, t(n + 1, 0, 0) * t(n - 1, 0, 0), a * a);
      }
      break;
    }
    case LatticeId::GLV_3D:
    case LatticeId::BTODA_3D:
    case LatticeId::BTODA_2D:
      for (int n = 0; n <= N; ++n)
        for (int k = 0; k <= K; ++k)
          for (int l = 0; l <= L; ++l) {
            Site s{n, k, l};
            if (n < N) ratio("v", s, t(n + 1, k, l), t(n, k, l));
            if (k < K) ratio("u", s, t(n, k + 1, l), t(n, k, l));
            if (l < L) ratio("w", s, t(n, k, l + 1), t(n, k, l));
          }
      break;
  }
  return st;
}

template <class T>
std::vector<T> nonlinear_residual(LatticeId id, const LatticeState<T>& st, const Site& s) {
  int n = s.n, k = s.k, l = s.l;
  auto g = [&](const char* name, int a, int b, int c) { return st.get(name, {a, b, c}); };
  auto val = [&](const char* name, int a, int b, int c) { return g(name, a, b, c).value(); };
  auto div = [&](const T& a, const T& b) {
    if (is_zero(b, 0.0)) throw DegenerateSite("division by zero at " + s.str());
    return T(a / b);
  };
  std::vector<T> r;
  switch (id) {
    case LatticeId::GLV_1p2: {
      Jet<T> v = g("v", n, k, 0);
      if (n == 0) {
        r.push_back(v.dt() - div(v.value() * val("r", 1, k, 0), val("r", 0, k, 0)));
      } else {
        T vm = val("v", n - 1, k, 0), vp = val("v", n + 1, k, 0);
        T coef = div(v.value() * val("r", n + 1, k, 0), vm * val("r", n, k, 0));
        r.push_back(v.dt() - coef * (vm - vp));
      }
      if (k >= 1) r.push_back(v.value() * val("r", n, k, 0) - val("r", n + 1, k - 1, 0) * val("v", n, k - 1, 0));
      break;
    }
    case LatticeId::BTODA_1p2: {
      Jet<T> rr = g("r", n, k, 0);
      if (n >= 1) {
        T rm = val("r", n - 1, k, 0), rp = val("r", n + 1, k, 0);
        T coef = div(val("v", n, k, 0) * rr.value(), val("v", n - 1, k, 0) * rm);
        r.push_back(rr.dt() - coef * (rm - rp));
      }
      if (k >= 1) r.push_back(val("v", n, k, 0) * rr.value() - val("r", n + 1, k - 1, 0) * val("v", n, k - 1, 0));
      break;
    }
    case LatticeId::BTODA_2p1:
    case LatticeId::BTODA_1p1: {
      if (n < 1) throw MissingCell("the B-Toda equations start at n = 1");
      Jet<T> u = g("u", n, 0, 0), b = g("b", n, 0, 0);
      T bm = val("b", n - 1, 0, 0), bp = val("b", n + 1, 0, 0);
      T du = id == LatticeId::BTODA_2p1 ? u.ds() : u.dt();
      r.push_back(du - u.value() * (bp - T(2) * b.value() + bm));
      r.push_back(b.dt() - u.value() * (bm - bp));
      break;
    }
    case LatticeId::GLV_3D:
    case LatticeId::BTODA_3D: {
      T v = val("v", n, k, l), u = val("u", n, k, l), w = val("w", n, k, l);
      r.push_back(val("v", n, k + 1, l) * u - v * val("u", n + 1, k, l));
      r.push_back(val("v", n, k, l + 1) * w - v * val("w", n + 1, k, l));
      if (id == LatticeId::GLV_3D) {
        if (n >= 1) {
          T lhs = div(val("v", n + 1, k, l), val("v", n - 1, k + 1, l + 1));
          T rhs = T(1) + div(val("u", n + 1, k, l), val("u", n, k, l + 1)) -
                  div(val("w", n + 1, k, l), val("w", n, k + 1, l));
          r.push_back(lhs - rhs);
        }
      } else {
        T lhs = div(val("u", n + 1, k, l + 1), val("u", n + 1, k, l));
        T rhs = T(1) +
                div(val("v", n + 1, k, l) * val("w", n, k + 1, l), val("w", n + 1, k, l) * val("v", n, k + 1, l)) -
                div(val("v", n + 1, k + 1, l), val("v", n, k, l + 1));
        r.push_back(lhs - rhs);
      }
      break;
    }
    case LatticeId::BTODA_2D: {
      T v = val("v", n, k, 0), u = val("u", n, k, 0);
      r.push_back(val("v", n, k + 1, 0) * u - v * val("u", n + 1, k, 0));
      T lhs = div(val("u", n + 1, k + 1, 0), val("u", n + 1, k, 0));
      T rhs = T(1) +
              div(val("v", n + 1, k, 0) * val("u", n, k + 1, 0), val("u", n + 1, k, 0) * val("v", n, k + 1, 0)) -
              div(val("v", n + 1, k + 1, 0), val("v", n, k + 1, 0));
      r.push_back(lhs - rhs);
      break;
    }
  }
  return r;
}

// ---- adjacent families ----

template <class T>
Poly<T> adjacent_residual(LatticeId id, const MomentSystem<T>& sys, const Site& s) {
  check_binding(id, sys);
  int n = s.n, k = s.k, l = s.l;
  std::map<std::pair<int, int>, std::unique_ptr<PsopFamily<T>>> fams;
  auto fam = [&](int kk, int ll) -> PsopFamily<T>& {
    auto& f = fams[{kk, ll}];
    if (!f) f = std::make_unique<PsopFamily<T>>(sys, kk, ll);
    return *f;
  };
  auto tau = [&](int m, int kk, int ll) { return fam(kk, ll).tau(m); };
  auto tv = [&](int m, int kk, int ll) { return tau(m, kk, ll).value(); };
  auto Pn = [&](int m, int kk, int ll) { return fam(kk, ll).P(m); };
  auto zp1 = [](const Poly<T>& p) { return p.shifted(1) + p; };
  switch (id) {
    case LatticeId::GLV_1p2: {
      T a = tv(n - 1, k + 1, 0) * tv(n + 2, k, 0) / (tv(n, k + 1, 0) * tv(n + 1, k, 0));
      T b = tv(n + 1, k + 1, 0) * tv(n, k, 0) / (tv(n, k + 1, 0) * tv(n + 1, k, 0));
      return (Pn(n, k + 1, 0) + Pn(n - 1, k + 1, 0) * a).shifted(1) - (Pn(n + 1, k, 0) + Pn(n, k, 0) * b);
    }
    case LatticeId::GLV_3D: {
      Poly<T> lhs = zp1(Pn(n, k, l + 1)) * T(tv(n + 1, k + 1, l) * tv(n, k, l + 1)) +
                    Pn(n + 1, k, l) * T(tv(n, k + 1, l + 1) * tv(n + 1, k, l));
      Poly<T> rhs = zp1(Pn(n - 1, k + 1, l + 1)).shifted(1) * T(tv(n + 2, k, l) * tv(n - 1, k + 1, l + 1)) +
                    Pn(n, k + 1, l).shifted(1) * T(tv(n + 1, k, l + 1) * tv(n, k + 1, l));
      return lhs - rhs;
    }
    case LatticeId::BTODA_2p1:
    case LatticeId::BTODA_1p1: {
      bool s_flow = id == LatticeId::BTODA_2p1;
      auto d = [&](const Jet<T>& x) { return s_flow ? x.ds() : x.dt(); };
      auto dP = [&](int m) { return s_flow ? d_ds(fam(0, 0).P_jet(m)) : d_dt(fam(0, 0).P_jet(m)); };
      Jet<T> a = tau(n, 0, 0), m = tau(n - 1, 0, 0), p = tau(n + 1, 0, 0);
      Poly<T> lhs = dP(n) * T(a.value() * a.value());
      Poly<T> rhs = Pn(n - 1, 0, 0) * T(m.value() * d(p) - p.value() * d(m)) - dP(n - 1) * T(p.value() * m.value());
      return lhs - rhs;
    }
    case LatticeId::BTODA_1p2: {
      Poly<T> lhs = (Pn(n, k + 1, 0) - Pn(n, k, 0)) * T(tv(n, k + 1, 0) * tv(n, k, 0));
      Poly<T> rhs = Pn(n - 1, k, 0) * T(tv(n + 1, k + 1, 0) * tv(n - 1, k, 0)) -
                    Pn(n - 1, k + 1, 0) * T(tv(n + 1, k, 0) * tv(n - 1, k + 1, 0));
      return lhs - rhs;
    }
    case LatticeId::BTODA_3D: {
      Poly<T> lhs = Pn(n, k, l) * T(tv(n, k + 1, l + 1) * tv(n, k, l)) -
                    Pn(n, k + 1, l) * T(tv(n, k, l + 1) * tv(n, k + 1, l));
      Poly<T> rhs = zp1(Pn(n - 1, k + 1, l + 1) * T(tv(n + 1, k, l) * tv(n - 1, k + 1, l + 1)) -
                        Pn(n - 1, k, l + 1) * T(tv(n + 1, k + 1, l) * tv(n - 1, k, l + 1)));
      return lhs - rhs;
    }
    case LatticeId::BTODA_2D: {
      T mid = tv(n, k + 1, 0);
      Poly<T> lhs = Pn(n, k, 0) * T(tv(n, k + 2, 0) * tv(n, k, 0)) - Pn(n, k + 1, 0) * T(mid * mid);
      Poly<T> rhs = zp1(Pn(n - 1, k + 2, 0) * T(tv(n + 1, k, 0) * tv(n - 1, k + 2, 0)) -
                        Pn(n - 1, k + 1, 0) * T(tv(n + 1, k + 1, 0) * tv(n - 1, k + 1, 0)));
      return lhs - rhs;
    }
  }
  return Poly<T>();
}

// ---- evolution ----

template <class T>
FlowState flow_state(const LatticeState<T>& st) {
  FlowState f;
  for (const auto& [name, grid] : st.vars)
    for (const auto& [s, v] : grid) f.vars[name][s] = to_double(v.value());
  return f;
}

namespace {

double lookup(const FlowState& f, const std::string& name, const Site& s) {
  auto it = f.vars.find(name);
  if (it != f.vars.end()) {
    auto jt = it->second.find(s);
    if (jt != it->second.end()) return jt->second;
  }
  throw ConfigError("initial state lacks " + name + s.str());
}

// A flat view of the evolving cells plus the frozen ones.
struct FlatSystem {
  std::vector<std::pair<std::string, Site>> cells;
  std::function<std::vector<double>(const std::vector<double>&)> rhs;
  std::function<FlowState(const std::vector<double>&)> unpack;
};

FlatSystem btoda11_system(const FlowState& init, int N) {
  // evolving: u_1..u_{N-1}, b_1..b_{N-1}; frozen: u_N, b_N.
  FlatSystem fs;
  int m = N - 1;
  double uN = lookup(init, "u", {N, 0, 0}), bN = lookup(init, "b", {N, 0, 0});
  for (int n = 1; n <= m; ++n) fs.cells.push_back({"u", {n, 0, 0}});
  for (int n = 1; n <= m; ++n) fs.cells.push_back({"b", {n, 0, 0}});
  fs.rhs = [m, bN](const std::vector<double>& y) {
    std::vector<double> d(y.size());
    auto u = [&](int n) { return y[n - 1]; };
    auto b = [&](int n) { return n == 0 ? 0.0 : (n > m ? bN : y[m + n - 1]); };
    for (int n = 1; n <= m; ++n) {
      d[n - 1] = u(n) * (b(n + 1) - 2 * b(n) + b(n - 1));
      d[m + n - 1] = u(n) * (b(n - 1) - b(n + 1));
    }
    return d;
  };
  fs.unpack = [m, uN, bN, N](const std::vector<double>& y) {
    FlowState f;
    f.vars["u"][{0, 0, 0}] = 0.0;
    f.vars["b"][{0, 0, 0}] = 0.0;
    for (int n = 1; n <= m; ++n) {
      f.vars["u"][{n, 0, 0}] = y[n - 1];
      f.vars["b"][{n, 0, 0}] = y[m + n - 1];
    }
    f.vars["u"][{N, 0, 0}] = uN;
    f.vars["b"][{N, 0, 0}] = bN;
    return f;
  };
  return fs;
}

FlatSystem glv12_system(const FlowState& init, int N) {
  // v_n^k on the triangle n + k <= N; the outer diagonal is frozen.
  FlatSystem fs;
  std::map<Site, int> slot;
  std::map<Site, double> frozen;
  for (int s = 0; s <= N; ++s)
    for (int n = 0; n <= s; ++n) {
      Site c{n, s - n, 0};
      double v = lookup(init, "v", c);
      if (s < N) {
        slot[c] = static_cast<int>(fs.cells.size());
        fs.cells.push_back({"v", c});
      } else {
        frozen[c] = v;
      }
    }
  auto getv = [slot, frozen](const std::vector<double>& y, int n, int k) {
    Site c{n, k, 0};
    auto it = slot.find(c);
    if (it != slot.end()) return y[it->second];
    return frozen.at(c);
  };
  // r_0^k = 1, r_{n+1}^k = v_n^{k+1} r_n^{k+1} / v_n^k.
  auto rgrid = [getv, N](const std::vector<double>& y) {
    std::map<std::pair<int, int>, double> r;
    for (int k = 0; k <= N; ++k) r[{0, k}] = 1.0;
    for (int n = 0; n < N; ++n)
      for (int k = 0; n + 1 + k <= N; ++k) r[{n + 1, k}] = getv(y, n, k + 1) * r.at({n, k + 1}) / getv(y, n, k);
    return r;
  };
  fs.rhs = [fs_cells = fs.cells, getv, rgrid](const std::vector<double>& y) {
    auto r = rgrid(y);
    std::vector<double> d(y.size());
    for (std::size_t i = 0; i < fs_cells.size(); ++i) {
      int n = fs_cells[i].second.n, k = fs_cells[i].second.k;
      double v = getv(y, n, k);
      if (n == 0) {
        d[i] = v * r.at({1, k}) / r.at({0, k});
      } else {
        double vm = getv(y, n - 1, k), vp = getv(y, n + 1, k);
        d[i] = v * r.at({n + 1, k}) / (vm * r.at({n, k})) * (vm - vp);
      }
    }
    return d;
  };
  fs.unpack = [fs_cells = fs.cells, frozen, rgrid](const std::vector<double>& y) {
    FlowState f;
    for (std::size_t i = 0; i < fs_cells.size(); ++i) f.vars["v"][fs_cells[i].second] = y[i];
    for (const auto& [c, v] : frozen) f.vars["v"][c] = v;
    for (const auto& [nk, v] : rgrid(y)) f.vars["r"][{nk.first, nk.second, 0}] = v;
    return f;
  };
  return fs;
}

}  // namespace

Trajectory evolve_semidiscrete(LatticeId id, const FlowState& init, int N, double dt, int steps, int record_every) {
  if (!(dt > 0)) throw ConfigError("dt must be positive");
  if (N < 3) throw ConfigError("truncation needs N >= 3");
  if (steps < 0 || record_every < 1) throw ConfigError("bad step counts");
  FlatSystem fs;
  Trajectory tr;
  tr.id = id;
  tr.N = N;
  tr.dt = dt;
  switch (id) {
    case LatticeId::BTODA_1p1:
      fs = btoda11_system(init, N);
      tr.closure = "u_0 = b_0 = 0; u_N, b_N frozen";
      break;
    case LatticeId::GLV_1p2:
      fs = glv12_system(init, N);
      tr.closure = "r_0 = 1; v on n + k = N frozen";
      break;
    case LatticeId::BTODA_2p1:
      throw ConfigError("BTODA_2p1 is not a closed single-time flow (u moves in s, b in t)");
    case LatticeId::BTODA_1p2:
      throw ConfigError("BTODA_1p2 needs the lowest k-row of v as extra data; not a closed flow on a finite grid");
    default: throw ConfigError(lattice_name(id) + " has no continuous time");
  }
  std::vector<double> y;
  for (const auto& [name, s] : fs.cells) y.push_back(lookup(init, name, s));
  auto axpy = [](const std::vector<double>& a, double h, const std::vector<double>& b) {
    std::vector<double> r(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r[i] = a[i] + h * b[i];
    return r;
  };
  tr.times.push_back(0.0);
  tr.frames.push_back(fs.unpack(y));
  for (int step = 1; step <= steps; ++step) {
    auto k1 = fs.rhs(y);
    auto k2 = fs.rhs(axpy(y, dt / 2, k1));
    auto k3 = fs.rhs(axpy(y, dt / 2, k2));
    auto k4 = fs.rhs(axpy(y, dt, k3));
    for (std::size_t i = 0; i < y.size(); ++i) {
      y[i] += dt / 6 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
      if (!std::isfinite(y[i]) || std::fabs(y[i]) > 1e300) throw BlowUp("non-finite state at step " + std::to_string(step));
    }
    if (step % record_every == 0 || step == steps) {
      tr.times.push_back(step * dt);
      tr.frames.push_back(fs.unpack(y));
    }
  }
  return tr;
}

// ---- discrete stepping ----

template <class T>
LatticeState<T> step_discrete(LatticeId id, const LatticeState<T>& st, int slice) {
  LatticeState<T> out;
  out.id = id;
  auto get = [&](const char* name, int n, int k, int l) -> std::optional<T> {
    if (!st.has(name, {n, k, l})) return std::nullopt;
    return st.get(name, {n, k, l}).value();
  };
  auto got = [&](const char* name, int n, int k, int l) -> std::optional<T> {
    if (!out.has(name, {n, k, l})) return std::nullopt;
    return out.get(name, {n, k, l}).value();
  };
  auto put = [&](const char* name, const Site& s, const T& v) { out.put(name, s, Jet<T>(v)); };
  auto nz = [](const std::optional<T>& x) { return x && !is_zero(*x, 0.0); };

  int nmax = 0, kmax = 0;
  for (const auto& [name, grid] : st.vars)
    for (const auto& [s, v] : grid) {
      nmax = std::max(nmax, s.n);
      kmax = std::max(kmax, s.k);
    }

  if (id == LatticeId::BTODA_2D) {
    int k = slice;
    for (int n = 0; n <= nmax; ++n) {
      auto v = get("v", n, k, 0), u1 = get("u", n + 1, k, 0), u = get("u", n, k, 0);
      if (v && u1 && nz(u)) put("v", {n, k + 1, 0}, *v * *u1 / *u);
    }
    put("u", {0, k + 1, 0}, T(1));
    for (int n = 0; n <= nmax; ++n) {
      auto u1 = get("u", n + 1, k, 0), v1 = get("v", n + 1, k, 0);
      auto un = got("u", n, k + 1, 0), vn = got("v", n, k + 1, 0), v1n = got("v", n + 1, k + 1, 0);
      if (!(nz(u1) && v1 && un && nz(vn) && v1n)) continue;
      T x = *u1 * (T(1) + *v1 * *un / (*u1 * *vn) - *v1n / *vn);
      put("u", {n + 1, k + 1, 0}, x);
    }
    return out;
  }
  if (id != LatticeId::GLV_3D && id != LatticeId::BTODA_3D)
    throw ConfigError(lattice_name(id) + " is not a discrete-time lattice");

  int l = slice;
  for (int n = 0; n <= nmax; ++n)
    for (int k = 0; k <= kmax; ++k) {
      auto v = get("v", n, k, l), w1 = get("w", n + 1, k, l), w = get("w", n, k, l);
      if (v && w1 && nz(w)) put("v", {n, k, l + 1}, *v * *w1 / *w);
    }
  for (int k = 0; k <= kmax; ++k)
    if (get("u", 0, k, l)) put("u", {0, k, l + 1}, T(1));
  for (int n = 0; n <= nmax; ++n)
    for (int k = 0; k <= kmax; ++k) {
      if (id == LatticeId::GLV_3D) {
        // v_{n+1}/v_{n-1}^{k+1,l+1} = 1 + u_{n+1}/u_n^{k,l+1} - w_{n+1}/w_n^{k+1,l}, solved for u_n^{k,l+1}
        if (n < 1) continue;
        auto u1 = get("u", n + 1, k, l), v1 = get("v", n + 1, k, l), w1 = get("w", n + 1, k, l);
        auto wk = get("w", n, k + 1, l), vm = got("v", n - 1, k + 1, l + 1);
        if (!(u1 && v1 && w1 && nz(wk) && nz(vm))) continue;
        T den = *v1 / *vm - T(1) + *w1 / *wk;
        if (is_zero(den, 0.0)) continue;
        put("u", {n, k, l + 1}, *u1 / den);
      } else {
        auto u1 = get("u", n + 1, k, l), v1 = get("v", n + 1, k, l), w1 = get("w", n + 1, k, l);
        auto wk = get("w", n, k + 1, l), vk = get("v", n, k + 1, l), v1k = get("v", n + 1, k + 1, l);
        auto vl = got("v", n, k, l + 1);
        if (!(u1 && v1 && nz(w1) && wk && nz(vk) && v1k && nz(vl))) continue;
        T x = *u1 * (T(1) + *v1 * *wk / (*w1 * *vk) - *v1k / *vl);
        put("u", {n + 1, k, l + 1}, x);
      }
    }
  return out;
}

double glv_continuum_ratio(const Measure<Rational>& m, const Kernel& kernel, int n, int k, const Rational& eps) {
  Binding b3 = lattice_binding(LatticeId::GLV_3D);
  b3.l_base = lin(1, eps);
  MomentSystem<Rational> s3(m, kernel, b3);
  MomentSystem<Rational> s1(m, kernel, lattice_binding(LatticeId::GLV_1p2));
  auto t3 = [&](int a, int kk, int ll) { return tau_pfaffian(s3, a, kk, ll).value(); };
  auto t1 = [&](int a, int kk) { return tau_pfaffian(s1, a, kk, 0).value(); };
  Rational A = t3(n + 2, k, 0) * t3(n - 1, k + 1, 1) - t3(n, k, 1) * t3(n + 1, k + 1, 0);
  Rational c = t1(n + 2, k) * t1(n - 1, k + 1) - t1(n, k) * t1(n + 1, k + 1);
  if (c == 0) throw DegenerateSite("continuous-time term vanishes at " + Site{n, k, 0}.str());
  return Rational(A / c).get_d();
}

#define PSK_INSTANTIATE(T)                                                                                    \
  template void check_binding(LatticeId, const MomentSystem<T>&);                                             \
  template struct TauTable<T>;                                                                                \
  template TauTable<T> tau_table(LatticeId, const MomentSystem<T>&, int, int, int);                           \
  template T bilinear_residual(LatticeId, const TauTable<T>&, const Site&);                                   \
  template std::vector<SiteResidual<T>> bilinear_sweep(LatticeId, const MomentSystem<T>&, int, int, int);     \
  template struct LatticeState<T>;                                                                            \
  template LatticeState<T> nonlinear_vars(LatticeId, const TauTable<T>&);                                     \
  template std::vector<T> nonlinear_residual(LatticeId, const LatticeState<T>&, const Site&);                 \
  template Poly<T> adjacent_residual(LatticeId, const MomentSystem<T>&, const Site&);                         \
  template FlowState flow_state(const LatticeState<T>&);                                                      \
  template LatticeState<T> step_discrete(LatticeId, const LatticeState<T>&, int);

PSK_INSTANTIATE(Rational)
PSK_INSTANTIATE(double)

}  // namespace psk
