#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "psk/errors.hpp"
#include "psk/measures.hpp"
#include "psk/poly.hpp"
#include "psk/scalar.hpp"

namespace psk {

// Vector power series f(z) = sum_m f_m z^m with f_m in T^d.
template <class T>
struct VectorSeries {
  int d = 0;
  std::vector<std::vector<T>> coeffs;  // coeffs[m][c]

  int order() const { return static_cast<int>(coeffs.size()) - 1; }
  // f_m, zero past the stored order.
  T at(int m, int c) const { return m >= 0 && m <= order() ? coeffs[m][c] : T(0); }
  Poly<T> component(int c) const;
};

template <class T>
VectorSeries<T> vector_series(std::vector<std::vector<T>> coeffs);

// Net power of x multiplying x^{2K-i} in the residue integrand.
inline int gipa_exponent(int N) { return -N - 1; }

// Coefficient of x^-1 y^-1 in -2 x^a y^b f(x).f(y) / (x - y), expanded for |x| > |y|.
template <class T>
T residue_entry(const VectorSeries<T>& f, int a, int b);

template <class T>
struct SeriesMoments {
  int N = 0, K = 0;
  std::vector<std::vector<T>> raw;   // (2K+1)^2, before antisymmetrizing
  std::vector<std::vector<T>> skew;  // antisymmetric part
  double defect = 0;                 // max |raw_ij + raw_ji|
};

template <class T>
SeriesMoments<T> series_moments(const VectorSeries<T>& f, int N, int K);

// Raw entries by trapezoid quadrature on |x| = rx, |y| = ry.
std::vector<std::vector<double>> contour_moments(const VectorSeries<double>& f, int N, int K, int points = 512,
                                                 double rx = 2.0, double ry = 0.5);

struct AxiomReport {
  bool degree_q = false;      // deg Q <= N
  bool degree_p = false;      // deg P = 2K
  bool divisibility = false;  // P | |Q|^2
  bool order = false;         // P f - Q = O(z^{N+1})
  bool p0_nonzero = false;
  double divisibility_residual = 0;
  double order_residual = 0;
  std::vector<std::string> failures;

  bool ok() const { return failures.empty(); }
};

template <class T>
AxiomReport verify_axioms(const Poly<T>& P, const std::vector<Poly<T>>& Q, const VectorSeries<T>& f, int N, int K,
                          double tol = 0.0);

template <class T>
struct GipaResult {
  int N = 0, K = 0;
  std::string path;  // "pfaffian" or "recursive"
  Poly<T> P;
  std::vector<Poly<T>> Q;
  T tau = T(1);  // Pf(0..2K-1) on the path's own table
  double defect = 0;
  bool rescaled = false;  // recursive path needed a rescale to match P(0)
  AxiomReport report;
};

// Q is always the degree-N truncation of P f.
template <class T>
std::vector<Poly<T>> numerator(const Poly<T>& P, const VectorSeries<T>& f, int N);

// Throws DegenerateTau, InsufficientOrder, or AxiomViolation.
template <class T>
GipaResult<T> gipa_pfaffian(const VectorSeries<T>& f, int N, int K, double tol = 0.0);

// Discrete BKP recursion. The odd tau's on the path need a d0 row that the
// series does not supply; a fixed auxiliary sequence is used (the final P does
// not depend on it). Rescaled so that P(0) matches the Pfaffian path.
template <class T>
GipaResult<T> gipa_recursive(const VectorSeries<T>& f, int N, int K, double tol = 0.0);

// Moments of the discrete BKP (Pade) lattice:
//   mu_ij^{k,l} = sum_{s,t} C(l,s) C(l,t) base(k-i+s, k-j+t)
//   beta_i^{k,l} = sum_s C(l,s) aux(k-i+s)
// base is antisymmetric; entries are cached.
template <class T>
class PadeMoments {
 public:
  PadeMoments(std::function<T(int, int)> base, std::function<T(int)> aux);

  T base(int p, int q) const;
  T aux(int m) const;
  T mu(int i, int j, int k, int l) const;
  T beta(int i, int k, int l) const;
  // tau_{2m} = Pf(0..2m-1), tau_{2m+1} = Pf(d0, 0..2m) at (k, l).
  T tau(int n, int k, int l) const;

 private:
  struct Cache {
    std::function<T(int, int)> base;
    std::function<T(int)> aux;
    std::map<std::pair<int, int>, T> b;
    std::map<int, T> a;
  };
  std::shared_ptr<Cache> c_;
};

// Antisymmetrized residue entries of a series, with a fixed auxiliary d0 row.
template <class T>
PadeMoments<T> pade_moments(const VectorSeries<T>& f, int N);
// base(p, q) = sum_{a,b} w_a w_b x_a^p x_b^q omega(a, b), aux(m) = sum_a w_a x_a^m.
// Nodes must be nonzero.
template <class T>
PadeMoments<T> pade_moments(const Measure<T>& m, const Kernel& kernel);

// tau(m+2,k,l) tau(m-1,k-2,l+1) - tau(m+1,k,l) tau(m,k-2,l+1)
//   + tau(m+1,k-1,l+1) tau(m,k-1,l) - tau(m+1,k-1,l) tau(m,k-1,l+1)
template <class T>
T pade_bilinear_residual(const PadeMoments<T>& mom, int m, int k, int l);

// Indices of P's coefficients whose unit perturbation (Q held fixed) leaves
// every axiom satisfied. Empty means every perturbation is caught.
template <class T>
std::vector<int> perturbation_probe(const GipaResult<T>& r, const VectorSeries<T>& f, double tol = 0.0);

}  // namespace psk
