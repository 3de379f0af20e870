#include <cmath>

#include "doctest.h"

#include "psk/measures.hpp"
#include "test_util.hpp"

using namespace psk;
using psk::testing::random_discrete;

namespace {
MomentSystem<Rational> two_node_bures(int t_order = 0) {
  Binding b;
  b.t_order = t_order;
  return MomentSystem<Rational>(discrete_measure<Rational>({1, 2}, {1, 1}), Kernel::bures(), b);
}
}  // namespace

TEST_CASE("moments on two nodes") {
  auto sys = two_node_bures();
  CHECK(sys.mu(0, 1).value() == Rational(-1, 3));
  CHECK(sys.mu(1, 0).value() == Rational(1, 3));
  for (int i = 0; i < 5; ++i) CHECK(sys.mu(i, i).value() == 0);
  CHECK(sys.beta(0).value() == 2);
  CHECK(sys.beta(1).value() == 3);

  MomentSystem<Rational> empty(discrete_measure<Rational>({}, {}), Kernel::bures(), Binding{});
  CHECK(empty.beta(3).value() == 0);
  CHECK(empty.mu(0, 1).value() == 0);
}

TEST_CASE("t-jet moments follow the derivative law") {
  auto sys = two_node_bures(1);
  CHECK(sys.mu(0, 1).dt() == sys.mu(1, 1).value() + sys.mu(0, 2).value());
  CHECK(sys.mu(0, 1).dt() == sys.mu(0, 2).value());
  CHECK(sys.beta(0).dt() == sys.beta(1).value());

  Rng rng(21);
  Binding b;
  b.t_order = 2;
  MomentSystem<Rational> s2(random_discrete(rng, 5), Kernel::shifted(), b);
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      CHECK(s2.mu(i, j).dt() == s2.mu(i + 1, j).value() + s2.mu(i, j + 1).value());
      CHECK(s2.mu(i, j).dtt() ==
            s2.mu(i + 2, j).value() + 2 * s2.mu(i + 1, j + 1).value() + s2.mu(i, j + 2).value());
    }
}

TEST_CASE("s-jet moments follow the Gram law for the q-ratio kernel") {
  Rng rng(22);
  Binding b;
  b.s_order = 1;
  b.d1 = Binding::D1::QMoment;
  MomentSystem<Rational> sys(random_discrete(rng, 5), Kernel::qratio(Poly<Rational>(std::vector<Rational>{0, 1, 1})), b);
  for (int i = 0; i < 4; ++i) {
    CHECK(sys.beta(i).ds() == sys.d1(i).value());
    for (int j = 0; j < 4; ++j)
      CHECK(sys.mu(i, j).ds() == sys.d1(i).value() * sys.beta(j).value() - sys.beta(i).value() * sys.d1(j).value());
  }
}

TEST_CASE("structural shift laws") {
  Rng rng(23);
  for (int trial = 0; trial < 3; ++trial) {
    auto m = random_discrete(rng, 6);
    MomentSystem<Rational> sys(m, psk::testing::random_generic_kernel(rng, 6), Binding{});
    for (int i = 0; i < 6; ++i) {
      for (int k = 0; k < 3; ++k) {
        CHECK(sys.beta(i, k + 1).value() == sys.beta(i + 1, k).value());
        for (int j = 0; j < 6; ++j) {
          CHECK(sys.mu(i, j, k).value() + sys.mu(j, i, k).value() == 0);
          CHECK(sys.mu(i, j, k + 1).value() == sys.mu(i + 1, j + 1, k).value());
          CHECK(sys.mu(i, j, k, 1).value() == sys.mu(i, j, k).value() + sys.mu(i + 1, j, k).value() +
                                                  sys.mu(i, j + 1, k).value() + sys.mu(i + 1, j + 1, k).value());
        }
      }
    }
  }
}

TEST_CASE("de Bruijn sums equal the Pfaffian tau") {
  auto sys = two_node_bures();
  CHECK(debruijn_even(sys, 1).value() == pf_indexed(sys.scalar_oracle(), irange(0, 1)));
  CHECK(debruijn_even(sys, 2).value() == 0);
  CHECK(debruijn_odd(sys, 1).value() == 0);

  Rng rng(24);
  std::vector<Kernel> kernels = {Kernel::bures(), Kernel::shifted(), Kernel::sgn(),
                                 Kernel::qratio(Poly<Rational>(std::vector<Rational>{0, 0, 1}))};
  for (const auto& k : kernels)
    for (int nodes = 2; nodes <= 6; ++nodes) {
      MomentSystem<Rational> s(random_discrete(rng, nodes), k, Binding{});
      for (int n = 0; 2 * n <= nodes; ++n) {
        CHECK(debruijn_even(s, n).value() == tau_pfaffian(s, 2 * n).value());
        if (2 * n + 1 <= nodes) CHECK(debruijn_odd(s, n).value() == tau_pfaffian(s, 2 * n + 1).value());
      }
    }
}

TEST_CASE("multiple-integral tau and its sign") {
  auto sys = two_node_bures();
  auto r1 = tau_multi_integral(sys, 1);
  CHECK(r1.unsigned_sum.value() == sys.beta(0).value());
  CHECK(r1.sign == 1);
  CHECK(tau_multi_integral(sys, 0).unsigned_sum.value() == 1);
  CHECK_THROWS_AS(tau_multi_integral(sys, 3), InsufficientSupport);

  Rng rng(25);
  MomentSystem<Rational> three(random_discrete(rng, 3), Kernel::bures(), Binding{});
  auto r2 = tau_multi_integral(three, 2);
  CHECK(r2.pfaffian.value() == pf_indexed(three.scalar_oracle(), irange(0, 1)));
  CHECK(r2.sign == -1);

  for (int n = 0; n <= 5; ++n) {
    MomentSystem<Rational> s(random_discrete(rng, 5), Kernel::bures(), Binding{});
    auto r = tau_multi_integral(s, n);
    CHECK(r.sign == ((n / 2) % 2 == 0 ? 1 : -1));
    MomentSystem<Rational> g(random_discrete(rng, 5), psk::testing::random_generic_kernel(rng, 5), Binding{});
    CHECK(tau_multi_integral(g, n).sign == 1);
    MomentSystem<Rational> q(random_discrete(rng, 5), Kernel::qratio(Poly<Rational>(std::vector<Rational>{0, 0, 1})),
                             Binding{});
    CHECK(tau_multi_integral(q, n).sign == 1);
  }
}

TEST_CASE("Gauss rules") {
  auto lag = gauss_laguerre(20);
  double s0 = 0, s3 = 0;
  for (std::size_t a = 0; a < lag.size(); ++a) {
    s0 += lag.weights[a];
    s3 += lag.weights[a] * std::pow(lag.nodes[a], 3);
  }
  CHECK(s0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s3 == doctest::Approx(6.0).epsilon(1e-12));
  auto her = gauss_hermite(16);
  double h0 = 0, h2 = 0;
  for (std::size_t a = 0; a < her.size(); ++a) {
    h0 += her.weights[a];
    h2 += her.weights[a] * her.nodes[a] * her.nodes[a];
  }
  CHECK(h0 == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-12));
  CHECK(h2 == doctest::Approx(std::sqrt(M_PI) / 2).epsilon(1e-12));
}

TEST_CASE("continuous Bures moments converge under refinement") {
  MomentSystem<double> coarse(gauss_laguerre(64), Kernel::bures(), Binding{});
  MomentSystem<double> fine(gauss_laguerre(256), Kernel::bures(), Binding{});
  for (int i = 0; i <= 10; ++i)
    for (int j = 0; i + j <= 10; ++j) {
      if (i == j) continue;
      double a = coarse.mu(i, j).value(), b = fine.mu(i, j).value();
      CHECK(std::abs(a - b) <= 1e-8 * std::abs(b));
    }
}

TEST_CASE("float jets match finite differences") {
  Binding b;
  b.t_order = 2;
  auto lag = gauss_laguerre(64);
  MomentSystem<double> sys(lag, Kernel::bures(), b);
  Poly<Rational> q(std::vector<Rational>{0, 0, 1});
  auto at = [&](double t, int i, int j) {
    return MomentSystem<double>(reweighted(lag, t, 0, q), Kernel::bures(), Binding{}).mu(i, j).value();
  };
  // Richardson-extrapolated central differences
  auto d1 = [&](double h, int i, int j) { return (at(h, i, j) - at(-h, i, j)) / (2 * h); };
  auto d2 = [&](double h, int i, int j) { return (at(h, i, j) - 2 * at(0, i, j) + at(-h, i, j)) / (h * h); };
  double h = 1e-2;
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j < 4; ++j) {
      double fd1 = (4 * d1(h / 2, i, j) - d1(h, i, j)) / 3;
      double fd2 = (4 * d2(h / 2, i, j) - d2(h, i, j)) / 3;
      double e1 = sys.mu(i, j).dt(), e2 = sys.mu(i, j).dtt();
      CHECK(std::abs(fd1 - e1) <= 1e-6 * (1 + std::abs(e1)));
      CHECK(std::abs(fd2 - e2) <= 1e-6 * (1 + std::abs(e2)));
    }
  CHECK_THROWS_AS(reweighted(lag, 1.0, 0, q), DivergentMoment);
}

TEST_CASE("kernel config errors") {
  CHECK(parse_kernel_id("bures") == KernelId::Bures);
  CHECK_THROWS_AS(parse_kernel_id("nope"), ConfigError);
  CHECK_THROWS_AS(discrete_measure<Rational>({2, 1}, {1, 1}), ConfigError);
}
