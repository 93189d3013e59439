#include <hfl/builtins.hpp>
#include <hfl/uniformity.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hfl;

namespace {

using C = std::complex<double>;

FiniteObservable random_observable(std::mt19937_64& g, std::size_t m, std::uint64_t shift = 1) {
  std::uniform_real_distribution<double> u(-1, 1);
  FiniteObservable h;
  h.shift = shift;
  for (std::size_t x = 0; x < m; ++x) h.values.push_back(C(u(g), u(g)));
  return h;
}

FiniteObservable character(std::size_t m, std::uint64_t (*phase)(std::uint64_t)) {
  FiniteObservable h;
  for (std::uint64_t x = 0; x < m; ++x) h.values.push_back(unit(static_cast<double>(phase(x) % m) / static_cast<double>(m)));
  return h;
}

HardyExpr t(const Rational& c) { return HardyExpr::power(c); }

}  // namespace

TEST(Seminorm, ConstantOne) {
  for (std::size_t m : {1u, 5u, 12u})
    for (int s = 0; s <= 4; ++s) EXPECT_EQ(gowers_seminorm({std::vector<C>(m, 1.0)}, s), 1.0) << m << " " << s;
}

TEST(Seminorm, IndicatorOfZero) {
  for (std::size_t m : {2u, 7u, 16u, 31u}) {
    FiniteObservable h{std::vector<C>(m, 0.0)};
    h.values[0] = 1;
    EXPECT_NEAR(gowers_seminorm(h, 2), std::pow(static_cast<double>(m), -0.75), 1e-9) << m;
    EXPECT_NEAR(gowers_box_oracle(h, 2), std::pow(static_cast<double>(m), -0.75), 1e-9) << m;
  }
}

TEST(Seminorm, Characters) {
  for (std::size_t m : {5u, 8u, 13u}) {
    FiniteObservable lin = character(m, [](std::uint64_t x) { return x; });
    EXPECT_NEAR(gowers_seminorm(lin, 1), 0.0, 1e-9) << m;
    EXPECT_NEAR(gowers_seminorm(lin, 2), 1.0, 1e-9) << m;
  }
  // Quadratic phase on Z_p: only n = 0 contributes at s = 2, giving p^(-1/4).
  for (std::size_t p : {5u, 7u, 11u, 13u}) {
    FiniteObservable q = character(p, [](std::uint64_t x) { return x * x; });
    double r = gowers_seminorm(q, 2);
    EXPECT_NEAR(r, gowers_box_oracle(q, 2), 1e-9) << p;
    EXPECT_NEAR(r, std::pow(static_cast<double>(p), -0.25), 1e-9) << p;
    EXPECT_NEAR(gowers_seminorm(q, 3), 1.0, 1e-9) << p;
  }
}

TEST(Seminorm, BoxOracleOfConstant) {
  for (C c : {C(0.5, 0), C(-2, 0), C(0.3, -0.4)})
    for (int s = 1; s <= 3; ++s) EXPECT_NEAR(gowers_box_oracle({std::vector<C>(6, c)}, s), std::abs(c), 1e-12);
  EXPECT_THROW(gowers_box_oracle({std::vector<C>(3, 1.0)}, 0), Error);
  EXPECT_THROW(gowers_seminorm({{}}, 1), Error);
}

TEST(Seminorm, RecursionMatchesBoxOracle) {
  std::mt19937_64 g(21);
  std::uniform_int_distribution<std::size_t> mm(1, 16);
  std::uniform_int_distribution<int> ss(1, 3);
  for (int trial = 0; trial < 100; ++trial) {
    std::size_t m = mm(g);
    std::uint64_t a = std::uniform_int_distribution<std::uint64_t>(1, m)(g);
    FiniteObservable h = random_observable(g, m, a);
    int s = ss(g);
    ASSERT_NEAR(gowers_seminorm(h, s), gowers_box_oracle(h, s), 1e-9) << "m=" << m << " a=" << a << " s=" << s;
  }
  std::mt19937_64 g8(8);
  for (int trial = 0; trial < 20; ++trial) {
    FiniteObservable h = random_observable(g8, 8);
    EXPECT_NEAR(gowers_seminorm(h, 2), gowers_box_oracle(h, 2), 1e-9);
  }
}

TEST(Seminorm, MonotoneShiftInvariantHomogeneous) {
  std::mt19937_64 g(4);
  for (int trial = 0; trial < 50; ++trial) {
    std::size_t m = std::uniform_int_distribution<std::size_t>(2, 24)(g);
    std::uint64_t a = 0;
    do a = std::uniform_int_distribution<std::uint64_t>(1, m - 1)(g);
    while (std::gcd(a, m) != 1);
    FiniteObservable h = random_observable(g, m, a);
    FiniteObservable Th = h;
    for (std::size_t x = 0; x < m; ++x) Th.values[x] = h.values[(x + a) % m];
    C c(std::uniform_real_distribution<double>(-3, 3)(g), std::uniform_real_distribution<double>(-3, 3)(g));
    FiniteObservable ch = h;
    for (auto& v : ch.values) v *= c;
    for (int s = 0; s <= 3; ++s) {
      double v = gowers_seminorm(h, s);
      EXPECT_LE(v, gowers_seminorm(h, s + 1) + 1e-9) << m << " " << s;
      EXPECT_NEAR(gowers_seminorm(Th, s), v, 1e-9);
      EXPECT_NEAR(gowers_seminorm(ch, s), std::abs(c) * v, 1e-9);
    }
  }
}

TEST(Weyl, Examples) {
  WeightFn lin(Weight::cesaro());
  Phase s2 = phase_of("sqrt(2)");
  DiscrepancyReport r = weyl_discrepancy([&](std::uint64_t n) { return s2.times_u128(n); }, lin, 1000000, 10);
  EXPECT_LT(r.max_value, 0.01);
  EXPECT_EQ(r.values.size(), 10u);

  Phase half = Phase::from_rational(Rational(1, 2));
  DiscrepancyReport h = weyl_discrepancy([&](std::uint64_t n) { return half.times_u128(n); }, lin, 1000, 4);
  EXPECT_GE(h.values[1], 0.99);
  EXPECT_GE(h.values[3], 0.99);

  DiscrepancyReport lg =
      weyl_discrepancy([](std::uint64_t n) { return Phase::from_double(std::log(static_cast<double>(n))); }, lin,
                       1000000, 1);
  EXPECT_GT(lg.max_value, 0.1);

  DiscrepancyReport z = weyl_discrepancy([](std::uint64_t) { return Phase{}; }, lin, 1000, 5);
  for (double v : z.values) EXPECT_NEAR(v, 1.0, 1e-12);
}

TEST(Weyl, ThreadCountDoesNotChangeResult) {
  WeightFn lin(Weight::cesaro());
  Phase s3 = phase_of("sqrt(3)");
  auto x = [&](std::uint64_t n) { return s3.times_u128(n * n); };
  DiscrepancyReport a = weyl_discrepancy(x, lin, 200000, 5, 1);
  DiscrepancyReport b = weyl_discrepancy(x, lin, 200000, 5, 4);
  EXPECT_EQ(a.values, b.values);
}

TEST(JointOrbit, FractionalPowersAreHaarDistributed) {
  System rot = builtin_system("torus_sqrt2");
  Family F = {t(Rational(3, 2)), t(Rational(4, 3))};
  DiscrepancyReport r = joint_orbit_discrepancy(rot, F, RoundingMode::Floor, WeightFn(Weight::cesaro()), 1000000);
  EXPECT_LT(r.max_value, 0.02);
  EXPECT_EQ(r.values.size(), 4u);
}

TEST(JointOrbit, SupportProbeApproachesIdentity) {
  System rot = builtin_system("torus_sqrt2");
  DiscrepancyReport r = joint_orbit_discrepancy(rot, example1_family().family, RoundingMode::Nearest,
                                                WeightFn(Weight::cesaro()), 100000);
  EXPECT_LT(r.min_distance_to_identity, 0.05);
}

TEST(JointOrbit, RationalRotationIsNotEquidistributed) {
  TorusRotation quarter;
  quarter.alpha.push_back(Phase::from_rational(Rational(1, 4)));
  DiscrepancyReport r = joint_orbit_discrepancy(quarter, {t(1)}, RoundingMode::Floor, WeightFn(Weight::cesaro()), 10000);
  // Four atoms against 16 cells at level 4: each atom carries 1/4 where Haar gives 1/16.
  EXPECT_NEAR(r.max_value, 0.25 - 1.0 / 16, 1e-3);
  EXPECT_EQ(r.min_distance_to_identity, 0.0);

  try {
    joint_orbit_discrepancy(CyclicRotation{5, 1}, {t(1)}, RoundingMode::Floor, WeightFn(Weight::cesaro()), 10);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::wrong_variant);
  }
}
