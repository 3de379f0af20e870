#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "psk/measures.hpp"
#include "psk/psop.hpp"

namespace psk {

enum class LatticeId { GLV_1p2, GLV_3D, BTODA_2p1, BTODA_1p1, BTODA_1p2, BTODA_3D, BTODA_2D };

const std::vector<LatticeId>& all_lattices();
std::string lattice_name(LatticeId id);
LatticeId parse_lattice_id(const std::string& s);
bool is_semidiscrete(LatticeId id);

// Moment binding for a lattice. lambda is the l-base constant for BTODA_3D
// ((1+x)^k (lambda+x)^l); q is the s-flow function for BTODA_2p1.
Binding lattice_binding(LatticeId id, const Rational& lambda = 1,
                        const Poly<Rational>& q = Poly<Rational>(std::vector<Rational>{0, 0, 1}));
// Kernel the lattice is built on; the gLV lattices accept any kernel and
// default to the one passed in.
Kernel lattice_kernel(LatticeId id, const Kernel& generic_default = Kernel::sgn(),
                      const Poly<Rational>& q = Poly<Rational>(std::vector<Rational>{0, 0, 1}));
// Throws ConfigError if the system cannot carry the lattice.
template <class T>
void check_binding(LatticeId id, const MomentSystem<T>& sys);

template <class T>
MomentSystem<T> lattice_system(LatticeId id, Measure<T> m, const Kernel& kernel, const Rational& lambda = 1) {
  Poly<Rational> q = kernel.id == KernelId::QRatio ? kernel.q : Poly<Rational>(std::vector<Rational>{0, 0, 1});
  return MomentSystem<T>(std::move(m), kernel, lattice_binding(id, lambda, q));
}

struct Site {
  int n = 0, k = 0, l = 0;
  friend bool operator<(const Site& a, const Site& b) {
    if (a.n != b.n) return a.n < b.n;
    if (a.k != b.k) return a.k < b.k;
    return a.l < b.l;
  }
  friend bool operator==(const Site& a, const Site& b) { return a.n == b.n && a.k == b.k && a.l == b.l; }
  std::string str() const;
};

// How far past a site the bilinear equation reaches.
struct Reach {
  int n, k, l;
};
Reach bilinear_reach(LatticeId id);

template <class T>
struct TauTable {
  LatticeId id{};
  int n_max = 0, k_max = 0, l_max = 0;
  std::map<Site, Jet<T>> cells;
  std::set<Site> degenerate;  // cells whose value vanishes

  // tau_{-1} = 0 and tau_0 = 1 at every (k, l).
  Jet<T> at(int n, int k = 0, int l = 0) const;
};

template <class T>
TauTable<T> tau_table(LatticeId id, const MomentSystem<T>& sys, int n_max, int k_max, int l_max = 0);

template <class T>
T bilinear_residual(LatticeId id, const TauTable<T>& tab, const Site& s);

// Sites whose stencil fits inside the table, row-major in n, k, l.
std::vector<Site> interior_sites(LatticeId id, int n_max, int k_max, int l_max);

template <class T>
struct SiteResidual {
  Site site;
  T value;
};

// Builds a table wide enough for sites n <= n_max, k <= k_max, l <= l_max and
// returns every residual.
template <class T>
std::vector<SiteResidual<T>> bilinear_sweep(LatticeId id, const MomentSystem<T>& sys, int n_max, int k_max,
                                            int l_max = 0);

// Named ratio grids (jets where the lattice has continuous times).
template <class T>
struct LatticeState {
  LatticeId id{};
  std::map<std::string, std::map<Site, Jet<T>>> vars;
  std::set<std::pair<std::string, Site>> degenerate;

  bool has(const std::string& name, const Site& s) const;
  // Throws DegenerateSite for quarantined cells and MissingCell otherwise.
  const Jet<T>& get(const std::string& name, const Site& s) const;
  void put(const std::string& name, const Site& s, Jet<T> v) { vars[name][s] = std::move(v); }
};

template <class T>
LatticeState<T> nonlinear_vars(LatticeId id, const TauTable<T>& tab);

// Residual of each equation of the nonlinear system at a site.
template <class T>
std::vector<T> nonlinear_residual(LatticeId id, const LatticeState<T>& st, const Site& s);

// Adjacent-family relation between PSOP families, as a residual polynomial.
template <class T>
Poly<T> adjacent_residual(LatticeId id, const MomentSystem<T>& sys, const Site& s);

// ---- time evolution ----

struct FlowState {
  std::map<std::string, std::map<Site, double>> vars;
};

struct Trajectory {
  LatticeId id{};
  int N = 0;
  double dt = 0;
  std::string closure;
  std::vector<double> times;
  std::vector<FlowState> frames;
};

template <class T>
FlowState flow_state(const LatticeState<T>& st);

// RK4 on the truncated system.
//   BTODA_1p1: u_n, b_n for n = 0..N; u_0 = b_0 = 0, n = N frozen.
//   GLV_1p2:   v_n^k on n + k <= N; r from the k-constraint with r_0 = 1,
//              cells with n + k = N frozen.
// The other two semi-discrete lattices are rejected (see README).
Trajectory evolve_semidiscrete(LatticeId id, const FlowState& init, int N, double dt, int steps,
                               int record_every = 1);

// Advance a discrete lattice one slice with its nonlinear recurrences:
// l -> l+1 for GLV_3D / BTODA_3D (u, v from u, v, w), k -> k+1 for BTODA_2D.
template <class T>
LatticeState<T> step_discrete(LatticeId id, const LatticeState<T>& st, int slice);

// A_eps / (tau_{n+2} tau_{n-1}^{k+1} - tau_n tau_{n+1}^{k+1}) where A_eps is the
// left side of the 3D gLV bilinear equation with l-base 1 + eps x and the
// denominator comes from the continuous-time lattice at t = 0. Tends to 1.
double glv_continuum_ratio(const Measure<Rational>& m, const Kernel& kernel, int n, int k, const Rational& eps);

}  // namespace psk
