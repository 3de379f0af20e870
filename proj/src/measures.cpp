#include "psk/measures.hpp"

#include <cmath>

namespace psk {

std::string Kernel::name() const {
  switch (id) {
    case KernelId::Sgn: return "sgn";
    case KernelId::Bures: return "bures";
    case KernelId::Shifted: return "shifted";
    case KernelId::QRatio: return "qratio";
    case KernelId::Generic: return "generic";
  }
  return "?";
}

KernelId parse_kernel_id(const std::string& s) {
  if (s == "sgn") return KernelId::Sgn;
  if (s == "bures") return KernelId::Bures;
  if (s == "shifted") return KernelId::Shifted;
  if (s == "qratio") return KernelId::QRatio;
  if (s == "generic") return KernelId::Generic;
  throw ConfigError("unknown kernel '" + s + "'");
}

namespace {

// Generalized Gauss-Laguerre: roots of L_n^{(alpha)} by Newton from the
// usual asymptotic starting guesses.
Measure<double> laguerre_rule(int n, double alpha) {
  Measure<double> m;
  m.discrete = false;
  m.label = "laguerre";
  m.nodes.resize(n);
  m.weights.resize(n);
  double z = 0;
  for (int i = 0; i < n; ++i) {
    if (i == 0) {
      z = (1.0 + alpha) * (3.0 + 0.92 * alpha) / (1.0 + 2.4 * n + 1.8 * alpha);
    } else if (i == 1) {
      z += (15.0 + 6.25 * alpha) / (1.0 + 0.9 * alpha + 2.5 * n);
    } else {
      double ai = i - 1;
      z += ((1.0 + 2.55 * ai) / (1.9 * ai) + 1.26 * ai * alpha / (1.0 + 3.5 * ai)) *
           (z - m.nodes[i - 2]) / (1.0 + 0.3 * alpha);
    }
    double p1 = 0, p2 = 0, pp = 0;
    for (int it = 0; it < 200; ++it) {
      p1 = 1.0;
      p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2 * j + 1 + alpha - z) * p2 - (j + alpha) * p3) / (j + 1);
      }
      pp = (n * p1 - (n + alpha) * p2) / z;
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-15 * std::fabs(z)) break;
    }
    m.nodes[i] = z;
    m.weights[i] = -std::exp(std::lgamma(alpha + n) - std::lgamma(static_cast<double>(n))) / (pp * n * p2);
  }
  return m;
}

}  // namespace

// Gauss-Legendre on [0, 1].
Measure<double> gauss_legendre01(int n) {
  Measure<double> m;
  m.discrete = false;
  m.label = "legendre";
  m.nodes.assign(n, 0.0);
  m.weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(M_PI * (i + 0.75) / (n + 0.5)), pp = 0;
    for (int it = 0; it < 100; ++it) {
      double p1 = 1.0, p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1);
      }
      pp = n * (z * p1 - p2) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-15) break;
    }
    m.nodes[i] = 0.5 * (1.0 - z);
    m.nodes[n - 1 - i] = 0.5 * (1.0 + z);
    m.weights[i] = m.weights[n - 1 - i] = 1.0 / ((1.0 - z * z) * pp * pp);
  }
  return m;
}

// The double integral uses x = r c, y = r (1 - c): the homogeneous kernels
// become smooth in c and the radial part is again a Laguerre integral.
Measure<double> gauss_laguerre(int n, double alpha) {
  Measure<double> m = laguerre_rule(n, alpha);
  Measure<double> rad = laguerre_rule(n, 2 * alpha + 1);
  Measure<double> ang = gauss_legendre01(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      double r = rad.nodes[a], c = ang.nodes[b];
      double w = rad.weights[a] * ang.weights[b] * std::pow(c * (1 - c), alpha);
      m.pairs.push_back({r * c, r * (1 - c), w});
    }
  return m;
}

Measure<double> gauss_hermite(int n) {
  Measure<double> m;
  m.discrete = false;
  m.label = "hermite";
  m.nodes.assign(n, 0.0);
  m.weights.assign(n, 0.0);
  const double pim4 = 0.7511255444649425;
  int half = (n + 1) / 2;
  double z = 0, pp = 0;
  for (int i = 0; i < half; ++i) {
    if (i == 0) z = std::sqrt(2.0 * n + 1) - 1.85575 * std::pow(2.0 * n + 1, -0.16667);
    else if (i == 1) z -= 1.14 * std::pow(static_cast<double>(n), 0.426) / z;
    else if (i == 2) z = 1.86 * z - 0.86 * m.nodes[n - 1];
    else if (i == 3) z = 1.91 * z - 0.91 * m.nodes[n - 2];
    else z = 2.0 * z - m.nodes[n - i + 1];
    double p1 = 0, p2 = 0;
    for (int it = 0; it < 200; ++it) {
      p1 = pim4;
      p2 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p3 = p2;
        p2 = p1;
        p1 = z * std::sqrt(2.0 / (j + 1)) * p2 - std::sqrt(static_cast<double>(j) / (j + 1)) * p3;
      }
      pp = std::sqrt(2.0 * n) * p2;
      double z1 = z;
      z = z1 - p1 / pp;
      if (std::fabs(z - z1) <= 1e-15 * (1.0 + std::fabs(z))) break;
    }
    m.nodes[n - 1 - i] = z;
    m.nodes[i] = -z;
    m.weights[i] = m.weights[n - 1 - i] = 2.0 / (pp * pp);
  }
  return m;
}

Measure<double> reweighted(const Measure<double>& m, double t0, double s0, const Poly<Rational>& q) {
  if (m.label == "laguerre" && t0 >= 1.0) throw DivergentMoment("exp(t x) with t >= 1 is not integrable against e^{-x}");
  if (m.label == "hermite" && s0 != 0 && q.degree() >= 2 && (q.degree() > 2 || s0 * to_double(q.c[2]) >= 1.0))
    throw DivergentMoment("exp(s q(x)) is not integrable against e^{-x^2}");
  Measure<double> r = m;
  for (std::size_t a = 0; a < m.size(); ++a) {
    double x = m.nodes[a];
    r.weights[a] *= std::exp(t0 * x + s0 * poly_at<double>(q, x));
  }
  for (auto& p : r.pairs)
    p[2] *= std::exp(t0 * (p[0] + p[1]) + s0 * (poly_at<double>(q, p[0]) + poly_at<double>(q, p[1])));
  return r;
}

Measure<Rational> exact_copy(const Measure<double>& m) {
  Measure<Rational> r;
  r.discrete = m.discrete;
  r.label = m.label;
  for (double x : m.nodes) r.nodes.emplace_back(x);
  for (double w : m.weights) r.weights.emplace_back(w);
  for (const auto& p : m.pairs) r.pairs.push_back({Rational(p[0]), Rational(p[1]), Rational(p[2])});
  return r;
}

}  // namespace psk
