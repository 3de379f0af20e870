#include "doctest.h"

#include <cmath>

#include "psk/accel.hpp"
#include "test_util.hpp"

using namespace psk;
using psk::testing::random_discrete_not_one;
using psk::testing::random_generic_kernel;

namespace {

MomentSystem<Rational> random_accel(Rng& rng, int nodes) {
  auto m = random_discrete_not_one(rng, nodes);
  return accel_system(m, random_generic_kernel(rng, nodes));
}

std::vector<double> alternating_harmonic(int terms) {
  std::vector<double> S;
  double s = 0;
  for (int j = 1; j <= terms; ++j) {
    s += (j % 2 ? 1.0 : -1.0) / j;
    S.push_back(s);
  }
  return S;
}

}  // namespace

TEST_CASE("moment shift laws") {
  Rng rng(71);
  for (int trial = 0; trial < 3; ++trial) {
    auto sys = random_accel(rng, 5);
    auto mu = [&](int i, int j, int k, int l) { return sys.mu(i, j, k, l).value(); };
    auto beta = [&](int i, int k, int l) { return sys.beta(i, k, l).value(); };
    for (int k = 0; k <= 2; ++k)
      for (int l = 0; l <= 2; ++l)
        for (int i = 0; i <= 2; ++i) {
          for (int j = 0; j <= 2; ++j) {
            CHECK(mu(i, j, k + 1, l) == mu(i + 1, j + 1, k, l));
            CHECK(mu(i, j, k, l + 1) == mu(i, j, k, l) - mu(i + 1, j, k, l) - mu(i, j + 1, k, l) +
                                            mu(i + 1, j + 1, k, l));
          }
          CHECK(beta(i, k + 1, l) == beta(i + 1, k, l) + mu(0, i + 1, k, l));
          CHECK(beta(i, k, l + 1) == mu(0, i + 1, k, l) - mu(0, i, k, l));
        }
  }
}

TEST_CASE("tau and sigma conventions") {
  Rng rng(72);
  auto sys = random_accel(rng, 6);
  CHECK(accel_sigma(sys, 0, 1, 1) == 0);
  auto b = [&](int i) { return sys.beta(i, 0, 1).value(); };
  CHECK(accel_sigma(sys, 2, 0, 1) == b(0) - b(1));
  CHECK(tau_pfaffian(sys, 2, 0, 1).value() == sys.mu(0, 1, 0, 1).value());
  for (int n = 0; n <= 2; ++n)
    for (int k = 0; k <= 2; ++k)
      for (int l = 1; l <= 2; ++l)
        CHECK(tau_pfaffian(sys, 2 * n + 1, k, l).value() == tau_pfaffian(sys, 2 * n + 2, k, l - 1).value());
  MomentSystem<Rational> plain(random_discrete_not_one(rng, 4), Kernel::bures(), Binding{});
  CHECK_THROWS_AS(tau_sigma_tables(plain, 1, 1, 1), ConfigError);
}

TEST_CASE("bilinear equations and recurrences on moment tables") {
  Rng rng(73);
  for (int trial = 0; trial < 3; ++trial) {
    auto sys = random_accel(rng, 6);
    auto tab = tau_sigma_tables(sys, 2, 3, 3);
    for (int n = 0; n <= 2; ++n)
      for (int k = 0; k <= 3; ++k)
        for (int l = 1; l <= 3; ++l) {
          auto [r1, r2] = bilinear_residual_accel(tab, {n, k, l});
          CHECK(r1 == 0);
          CHECK(r2 == 0);
        }
    for (int n = 0; n <= 1; ++n)
      for (int k = 0; k <= 1; ++k)
        for (int l = 0; l <= 1; ++l)
          for (const auto& x : accel_recurrence_residual(tab, n, k, l)) CHECK(x == 0);
    CHECK_THROWS_AS(bilinear_residual_accel(tab, {0, 0, 0}), MissingCell);
    CHECK_THROWS_AS(bilinear_residual_accel(tab, {5, 0, 1}), MissingCell);
  }
  // a corrupted sigma is caught
  auto sys = random_accel(rng, 6);
  auto tab = tau_sigma_tables(sys, 1, 1, 1);
  tab.sigma.at({2, 1, 1}) += 1;
  CHECK(bilinear_residual_accel(tab, {1, 0, 1}).first != 0);
}

TEST_CASE("seeding row") {
  std::vector<Rational> S = {1, Rational(1, 2), Rational(5, 6), Rational(7, 12), Rational(47, 60)};
  auto run = run_acceleration(S, 0);
  CHECK(run.u.at({0, 0, 0}) == 1);
  CHECK(run.u.at({0, 0, 1}) == Rational(5, 6));
  CHECK(run.u.at({0, 1, 1}) == S[3] - 2 * S[2] + S[1]);
  CHECK(run.u.at({0, 0, 2}) == S[4] - 4 * S[3] + 6 * S[2] - 4 * S[1] + S[0]);
  CHECK(run.u.count({0, 1, 2}) == 0);
  for (const auto& [s, v] : run.v) CHECK(v == 0);
  for (const auto& [s, r] : run.r) CHECK(r == 1);
  CHECK(forward_difference(S, 0, 3) == S[3]);
  CHECK_THROWS_AS(forward_difference(S, 2, 3), MissingCell);
}

TEST_CASE("constant sequence") {
  std::vector<Rational> S(10, Rational(7, 3));
  auto run = run_acceleration(S, 2);
  for (int k = 0; k <= 7; ++k) {
    REQUIRE(run.transformed(0, k));
    CHECK(*run.transformed(0, k) == Rational(7, 3));
  }
  CHECK(!run.transformed(0, 8));
  CHECK(!run.unavailable.empty());
  for (const auto& [nk, t] : run.out) CHECK(t == Rational(7, 3));
}

TEST_CASE("exact on geometric modes") {
  std::vector<Rational> S;
  for (int k = 0; k < 14; ++k) {
    mpz_class p;
    mpz_ui_pow_ui(p.get_mpz_t(), 2, k);
    S.push_back(1 - Rational(1) / Rational(p));
  }
  auto run = run_acceleration(S, 1);
  for (int k = 0; k <= 6; ++k) {
    CAPTURE(k);
    REQUIRE(run.transformed(1, k));
    CHECK(*run.transformed(1, k) == 1);
  }
}

TEST_CASE("acceleration on model sequences") {
  auto alt = alternating_harmonic(16);
  std::vector<double> geo;
  for (int k = 0; k < 16; ++k) geo.push_back(1.0 - std::ldexp(1.0, -k));
  struct Case {
    const char* name;
    std::vector<double> S;
    double limit;
  };
  for (const auto& c : {Case{"alternating harmonic", alt, std::log(2.0)}, Case{"geometric", geo, 1.0}}) {
    CAPTURE(c.name);
    auto run = run_acceleration(c.S, 1);
    for (int k = 0; k <= 6; ++k) {
      CAPTURE(k);
      auto t = run.transformed(1, k);
      REQUIRE(t);
      CHECK(std::fabs(*t - c.limit) < std::fabs(c.S[k + 2] - c.limit));
    }
  }
  CHECK_THROWS_AS(run_acceleration(std::vector<double>{}, 1), ConfigError);
}
