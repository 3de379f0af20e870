#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "psk/lattices.hpp"
#include "psk/measures.hpp"

namespace psk {

// Weight x^k (1-x)^l, Pf(c0, i) = 1, d0 row from the double-integral beta.
Binding accel_binding();

template <class T>
MomentSystem<T> accel_system(Measure<T> m, const Kernel& kernel) {
  return MomentSystem<T>(std::move(m), kernel, accel_binding());
}

// sigma_n = Pf(c0, d0, 0..n-1); sigma_0 = 0.
template <class T>
T accel_sigma(const MomentSystem<T>& sys, int n, int k, int l);

template <class T>
struct AccelTables {
  int n_max = 0, k_max = 0, l_max = 0;  // bilinear sites 0..n_max etc.
  std::map<Site, T> tau;                // (n, k, l) with l >= -1 where defined
  std::map<Site, T> sigma;

  // tau_{n<0} = 0, tau_0 = 1, sigma_0 = 0.
  T t(int n, int k, int l) const;
  T s(int n, int k, int l) const;
};

// Tables wide enough for every bilinear site n <= n_max, k <= k_max, 1 <= l <= l_max.
template <class T>
AccelTables<T> tau_sigma_tables(const MomentSystem<T>& sys, int n_max, int k_max, int l_max);

// Both lines of the bilinear system at (n, k, l), l >= 1.
template <class T>
std::pair<T, T> bilinear_residual_accel(const AccelTables<T>& tab, const Site& s);

// u, v, r from tau/sigma ratios, then the residuals of the three recurrences
// advancing n -> n+1 at (k, l).
template <class T>
std::vector<T> accel_recurrence_residual(const AccelTables<T>& tab, int n, int k, int l);

template <class T>
struct AccelRun {
  std::vector<T> S;
  int n_max = 0;
  std::map<Site, T> u, v, r;
  // (grid name, site): division by zero or a quarantined input
  std::set<std::pair<std::string, Site>> unavailable;
  std::map<std::pair<int, int>, T> out;   // (n, k) -> T_n^(k) = u_n^{k,0} / r_n^{k,1}
  std::string extraction = "T_n^(k) = u_n^{k,0} / r_n^{k,1}";

  std::optional<T> transformed(int n, int k) const;
};

// Fills n = 0..n_max. Seeds cover k <= k_max, l <= l_max with k + 2l < |S|;
// negative k_max / l_max mean "as far as the sequence allows".
template <class T>
AccelRun<T> run_acceleration(const std::vector<T>& S, int n_max, int k_max = -1, int l_max = -1);

// Forward difference Delta^m S_k.
template <class T>
T forward_difference(const std::vector<T>& S, int m, int k);

}  // namespace psk
