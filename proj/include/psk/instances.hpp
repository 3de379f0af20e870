#pragma once

#include <map>
#include <memory>
#include <vector>

#include "psk/measures.hpp"
#include "psk/pfaffian.hpp"
#include "psk/random.hpp"

// Random instances shared by the validation suites and the tests. Every draw
// goes through Rng, so a seed fixes the instance.
namespace psk {

// Random antisymmetric table over integer labels lo..hi and the characters.
// Pairs listed in `zero_pairs` are forced to zero.
inline EntryOracle<Rational> random_oracle(Rng& rng, int lo, int hi,
                                           std::vector<std::pair<ExtIndex, ExtIndex>> zero_pairs = {}) {
  IndexList labels = {ExtIndex::c0(), ExtIndex::d0(), ExtIndex::d1()};
  for (int i = lo; i <= hi; ++i) labels.push_back(ExtIndex::I(i));
  auto key = [](const ExtIndex& x) { return static_cast<int>(x.kind) * 1000 + x.n + 500; };
  auto table = std::make_shared<std::map<std::pair<int, int>, Rational>>();
  for (std::size_t i = 0; i < labels.size(); ++i)
    for (std::size_t j = i + 1; j < labels.size(); ++j) {
      Rational v = rng.rational(9, 5);
      for (auto& [a, b] : zero_pairs)
        if ((a == labels[i] && b == labels[j]) || (a == labels[j] && b == labels[i])) v = 0;
      (*table)[{key(labels[i]), key(labels[j])}] = v;
      (*table)[{key(labels[j]), key(labels[i])}] = -v;
    }
  EntryOracle<Rational> o;
  o.entry = [table, key](const ExtIndex& a, const ExtIndex& b) -> Rational {
    if (a == b) return 0;
    auto it = table->find({key(a), key(b)});
    if (it == table->end()) throw InvalidIndexList("label outside random table: " + a.str() + "," + b.str());
    return it->second;
  };
  return o;
}

inline std::vector<std::vector<Rational>> random_skew(Rng& rng, int m) {
  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(m, Rational(0)));
  for (int i = 0; i < m; ++i)
    for (int j = i + 1; j < m; ++j) {
      a[i][j] = rng.rational(9, 5);
      a[j][i] = -a[i][j];
    }
  return a;
}

inline Kernel random_generic_kernel(Rng& rng, int n) {
  return Kernel::generic(random_skew(rng, n));
}

inline Measure<Rational> random_discrete(Rng& rng, int n, long num = 12, long den = 4) {
  auto nodes = rng.distinct_nodes(n, num, den);
  std::vector<Rational> w;
  for (int i = 0; i < n; ++i) w.push_back(rng.positive_rational(5, 4));
  return discrete_measure(std::move(nodes), std::move(w));
}

// Distinct positive nodes avoiding 1 (needed where (1-x)^{-1} appears).
inline Measure<Rational> random_discrete_not_one(Rng& rng, int n) {
  while (true) {
    auto m = random_discrete(rng, n);
    bool ok = true;
    for (auto& x : m.nodes) ok = ok && x != 1;
    if (ok) return m;
  }
}

}  // namespace psk
