#include "doctest.h"

#include "psk/identities.hpp"
#include "psk/measures.hpp"
#include "test_util.hpp"

using namespace psk;
using psk::testing::random_oracle;
using psk::testing::random_skew;

using Mat = std::vector<std::vector<Rational>>;

TEST_CASE("pf conventions and small cases") {
  CHECK(pf(Mat{}) == 1);
  Rational a(7, 3);
  CHECK(pf(Mat{{0, a}, {-a, 0}}) == a);

  Rng rng(11);
  auto m = random_skew(rng, 4);
  Rational expect = m[0][1] * m[2][3] - m[0][2] * m[1][3] + m[0][3] * m[1][2];
  CHECK(pf(m) == expect);

  CHECK_THROWS_AS(pf(random_skew(rng, 3)), InvalidOrder);
}

TEST_CASE("pf squared equals det, both pivots") {
  Rng rng(1);
  for (int trial = 0; trial < 60; ++trial) {
    int m = 2 * static_cast<int>(rng.uniform(1, 6));
    auto a = random_skew(rng, m);
    Rational p = pf(a, Pivot::Last);
    CHECK(p == pf(a, Pivot::First));
    CHECK(p * p == det(a));
  }
}

TEST_CASE("row scaling and simultaneous swap") {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    auto a = random_skew(rng, 6);
    Rational c = rng.rational(7, 3);
    auto b = a;
    for (int j = 0; j < 6; ++j) {
      b[2][j] *= c;
      b[j][2] *= c;
    }
    CHECK(pf(b) == c * pf(a));
    auto s = a;
    std::swap(s[1], s[4]);
    for (auto& row : s) std::swap(row[1], row[4]);
    CHECK(pf(s) == -pf(a));
  }
}

TEST_CASE("pf_indexed on a measure") {
  auto meas = discrete_measure<Rational>({1, 2}, {1, 1});
  MomentSystem<Rational> sys(meas, Kernel::bures(), Binding{});
  auto o = sys.scalar_oracle();
  CHECK(pf_indexed(o, {ExtIndex::d0(), ExtIndex::I(0)}) == 2);
  CHECK_THROWS_AS(pf_indexed(o, {ExtIndex::d0()}), InvalidOrder);

  Rng rng(3);
  auto r = random_oracle(rng, 0, 6);
  auto idx = irange(0, 3);
  CHECK(pf_indexed(r, idx) == pf(materialize(r, idx)));
  CHECK(pf_indexed(r, irange(0, 5), Pivot::First) == pf_indexed(r, irange(0, 5), Pivot::Last));
}

TEST_CASE("bad oracle is rejected") {
  EntryOracle<Rational> bad;
  bad.entry = [](const ExtIndex&, const ExtIndex&) { return Rational(1); };
  CHECK_THROWS_AS(pf_indexed(bad, irange(0, 3)), BadOracle);
}

TEST_CASE("pf_poly symbolic expansions") {
  Rng rng(4);
  auto o = random_oracle(rng, 0, 6);
  auto d0 = ExtIndex::d0(), z = ExtIndex::z();
  auto I = [](int n) { return ExtIndex::I(n); };
  auto p = pf_poly(o, {d0, I(0), I(1), z});
  REQUIRE(p.size() == 2);
  CHECK(p.c[1] == o(d0, I(0)));
  CHECK(p.c[0] == -o(d0, I(1)));

  auto q = pf_poly(o, {I(0), I(1), I(2), z});
  CHECK(q.c[2] == o(I(0), I(1)));
  CHECK(q.c[1] == -o(I(0), I(2)));
  CHECK(q.c[0] == o(I(1), I(2)));

  CHECK_THROWS_AS(pf_poly(o, {I(0), z, I(1), z}), InvalidIndexList);

  // evaluation at z0 equals a concrete z row
  Rational z0(3, 2);
  auto idx = IndexList{d0, I(0), I(1), I(2), I(3), z};
  auto poly = pf_poly(o, idx);
  EntryOracle<Rational> conc;
  conc.entry = [o, z0](const ExtIndex& a, const ExtIndex& b) -> Rational {
    if (b.kind == ExtIndex::Kind::Z) return a.is_int() ? ipow(z0, a.n) : Rational(0);
    if (a.kind == ExtIndex::Kind::Z) return b.is_int() ? Rational(-ipow(z0, b.n)) : Rational(0);
    return o(a, b);
  };
  CHECK(poly(z0) == pf(materialize(conc, idx)));
}

TEST_CASE("pf1 and pf2 identities") {
  Rng rng(5);
  auto zero = EntryOracle<Rational>{[](const ExtIndex&, const ExtIndex&) { return Rational(0); }, {}};
  auto I = [](int n) { return ExtIndex::I(n); };
  CHECK(pf1_residual(zero, irange(1, 4), {I(5), I(6), I(7), I(8)}) == 0);
  for (int trial = 0; trial < 10; ++trial) {
    auto o = random_oracle(rng, 0, 12);
    CHECK(pf1_residual(o, irange(1, 4), {I(9), ExtIndex::d0(), I(10), ExtIndex::c0()}) == 0);
    CHECK(pf1_residual(o, irange(1, 6), {I(7), I(8), ExtIndex::d1(), I(10)}) == 0);
    CHECK(pf2_residual(o, irange(1, 3), I(4), {ExtIndex::d0(), I(8), I(9)}) == 0);
    CHECK(pf2_residual(o, irange(1, 5), I(6), {I(7), ExtIndex::c0(), I(11)}) == 0);
  }
}

TEST_CASE("Schur Pfaffian identity") {
  using V = std::vector<Rational>;
  auto m = schur_oracle(V{1, 2});
  CHECK(pf_indexed(m, irange(1, 2)) == Rational(-1, 3));
  CHECK(schur_residual(V{1, 2}) == 0);
  CHECK(schur_product(V{1, 2, 3, 4}) == Rational(1, 1050));
  CHECK(pf_indexed(schur_oracle(V{1, 2, 3, 4}), irange(1, 4)) == Rational(1, 1050));
  CHECK(schur_residual(V{5, 5, 2, 7}) == 0);
  CHECK(schur_product(V{5, 5, 2, 7}) == 0);
  CHECK(schur_odd_residual(V{1}) == 0);
  CHECK(schur_odd_residual(V{1, 2, 3}) == 0);
  CHECK(schur_odd_residual(V{2, 9, 2}) == 0);
  Rng rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    auto s = rng.distinct_nodes(6, 20, 7);
    CHECK(schur_residual(s) == 0);
    s.pop_back();
    CHECK(schur_odd_residual(s) == 0);
  }
}

TEST_CASE("bordered determinant factorizations") {
  Rng rng(7);
  for (int m : {3, 4, 5, 6}) {
    Mat z0(m, std::vector<Rational>(m, Rational(0)));
    std::vector<Rational> zv(m, Rational(0));
    CHECK(det_pf_border_residual(z0, zv, zv, Rational(0)) == 0);
    for (int trial = 0; trial < 5; ++trial) {
      auto a = random_skew(rng, m);
      std::vector<Rational> x, y;
      for (int i = 0; i < m; ++i) {
        x.push_back(rng.rational(9, 4));
        y.push_back(rng.rational(9, 4));
      }
      CHECK(det_pf_border_residual(a, x, y, rng.rational(9, 4)) == 0);
    }
  }
}

namespace {
MomentSystem<Rational> t_flow_system(Rng& rng, int nodes) {
  Binding b;
  b.t_order = 1;
  return MomentSystem<Rational>(psk::testing::random_discrete(rng, nodes),
                                psk::testing::random_generic_kernel(rng, nodes), b);
}
}  // namespace

TEST_CASE("Wronski-type derivative formulas") {
  EntryOracle<Jet<Rational>> zero;
  zero.entry = [](const ExtIndex&, const ExtIndex&) { return Jet<Rational>(Rational(0), JetShape::T1); };
  CHECK(der1_gen_residual(zero, irange(0, 3)) == 0);
  CHECK(der1_odd_residual(zero, ExtIndex::d0(), 0, 2) == 0);

  Rng rng(8);
  for (int trial = 0; trial < 6; ++trial) {
    auto sys = t_flow_system(rng, 7);
    auto o = sys.oracle();
    CHECK(der1_gen_residual(o, irange(0, 3)) == 0);
    CHECK(der1_gen_residual(o, {ExtIndex::I(0), ExtIndex::I(2), ExtIndex::I(3), ExtIndex::I(5)}) == 0);
    CHECK(der1_gen_residual(o, with({ExtIndex::d0()}, irange(0, 4))) == 0);
    CHECK(der1_residual(o, 0, 3) == 0);
    CHECK(der1_residual(o, 1, 2) == 0);
    CHECK(der1_odd_residual(o, ExtIndex::d0(), 0, 3) == 0);
    CHECK(der1_odd_residual(o, ExtIndex::d0(), 1, 2) == 0);
  }
}

TEST_CASE("Gram-type derivative formulas") {
  Rng rng(9);
  for (int trial = 0; trial < 4; ++trial) {
    Binding b;
    b.s_order = 1;
    b.d1 = Binding::D1::QMoment;
    MomentSystem<Rational> sys(psk::testing::random_discrete(rng, 6),
                               Kernel::qratio(Poly<Rational>(std::vector<Rational>{0, 0, 1})), b);
    auto o = sys.oracle();
    auto d0 = ExtIndex::d0(), d1 = ExtIndex::d1();
    CHECK(der2_1_residual(o, d0, d1, irange(0, 3), Deriv::S) == 0);
    CHECK(der2_1_residual(o, d0, d1, irange(0, 5), Deriv::S) == 0);
    CHECK(der2_2_residual(o, d0, d1, irange(0, 2), Deriv::S) == 0);
    CHECK(der2_2_residual(o, d0, d1, irange(0, 4), Deriv::S) == 0);

    Binding bb;
    bb.t_order = 1;
    bb.d1 = Binding::D1::Shift;
    MomentSystem<Rational> bures(psk::testing::random_discrete(rng, 6), Kernel::bures(), bb);
    CHECK(der2_1_residual(bures.oracle(), d0, d1, irange(0, 3), Deriv::T) == 0);
    CHECK(der2_2_residual(bures.oracle(), d0, d1, irange(0, 4), Deriv::T) == 0);
  }
  // premise violation: generic kernel does not follow the Gram rule
  Rng r2(10);
  auto sys = t_flow_system(r2, 6);
  CHECK_THROWS_AS(der2_1_residual(sys.oracle(), ExtIndex::d0(), ExtIndex::d1(), irange(0, 3), Deriv::T),
                  std::exception);
}

TEST_CASE("addition formulas") {
  Rng rng(12);
  auto a0 = ExtIndex::d0(), b0 = ExtIndex::d1();
  for (int trial = 0; trial < 6; ++trial) {
    auto o = random_oracle(rng, 0, 12, {{a0, b0}});
    Rational lam = rng.rational(5, 3);
    for (int N = 1; N <= 3; ++N) {
      CHECK(add_g1_residual(o, a0, b0, lam, irange(1, 2 * N)) == 0);
      CHECK(add_g2_residual(o, a0, b0, lam, irange(1, 2 * N - 1)) == 0);
      CHECK(add_w1_residual(o, lam, N) == 0);
      CHECK(add_w2_residual(o, a0, lam, N) == 0);
    }
  }
  auto bad = random_oracle(rng, 0, 8);
  CHECK_THROWS_AS(add_g1_residual(bad, a0, b0, Rational(1), irange(1, 2)), PremiseViolation);
}

TEST_CASE("jet arithmetic") {
  using J = Jet<Rational>;
  J t = J::variable_t(Rational(2), 2);
  J sq = t * t;  // (2+e)^2 = 4 + 4e + e^2
  CHECK(sq.value() == 4);
  CHECK(sq.dt() == 4);
  CHECK(sq.dtt() == 2);
  J inv = J(Rational(1)) / t;  // 1/(2+e) = 1/2 - e/4 + e^2/8
  CHECK(inv.coef(1, 0) == Rational(-1, 4));
  CHECK(inv.coef(2, 0) == Rational(1, 8));
  CHECK((inv * t) == J(Rational(1)));
  auto e = exp_jet(Rational(3), Rational(5), 1, 1);
  CHECK(e.dt() == 3);
  CHECK(e.ds() == 5);
  CHECK(e.dts() == 15);
}
