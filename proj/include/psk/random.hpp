#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "psk/scalar.hpp"

namespace psk {

// Deterministic instance generator. Engine: std::mt19937_64 (its output
// sequence is fixed by the standard). Integers in [lo, hi] are taken as
// lo + (raw mod (hi - lo + 1)), so results do not depend on the standard
// library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t raw() { return eng_(); }
  long uniform(long lo, long hi) {
    auto span = static_cast<std::uint64_t>(hi - lo + 1);
    return lo + static_cast<long>(eng_() % span);
  }
  // p/q with p in [-num, num], q in [1, den].
  Rational rational(long num, long den) {
    long p = uniform(-num, num);
    long q = uniform(1, den);
    Rational r(p, q);
    r.canonicalize();
    return r;
  }
  Rational positive_rational(long num, long den) {
    long p = uniform(1, num);
    long q = uniform(1, den);
    Rational r(p, q);
    r.canonicalize();
    return r;
  }
  double uniform_real(double lo, double hi) {
    double u = static_cast<double>(eng_() >> 11) * 0x1.0p-53;
    return lo + (hi - lo) * u;
  }

  // Distinct positive rationals, sorted increasing.
  std::vector<Rational> distinct_nodes(int count, long num, long den);

 private:
  std::mt19937_64 eng_;
};

}  // namespace psk
