#include <hfl/builtins.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace hfl;

namespace {

HardyExpr t(const Rational& c) { return HardyExpr::power(c); }

bool is_square(std::uint64_t n) {
  auto r = static_cast<std::uint64_t>(std::llround(std::sqrt(static_cast<double>(n))));
  return r * r == n;
}

void expect_members(const IntegerSet& E, const PatternWitness& w) {
  auto a = static_cast<std::int64_t>(w.a);
  EXPECT_TRUE(E.contains(a));
  for (auto k : w.offsets) EXPECT_TRUE(E.contains(a + k)) << k;
}

}  // namespace

TEST(FindPattern, WholeSetGivesFirstPair) {
  PatternSearchResult r = find_pattern(IntegerSet::all(), {t(2), t(Rational(3, 2))}, RoundingMode::Floor, 1, 100, 100);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->n, 1u);
  EXPECT_EQ(r.witness->a, 1u);
  EXPECT_EQ(r.witness->offsets, std::vector<std::int64_t>({1, 1}));
}

TEST(FindPattern, ExampleOneFloorHasNoConfiguration) {
  FamilyDoc ex1 = example1_family();
  PatternSearchResult r = find_pattern(IntegerSet::odds(), ex1.family, RoundingMode::Floor, 2, 100000, 100000);
  EXPECT_FALSE(r.witness);
  EXPECT_EQ(r.n_min, 2u);
  EXPECT_EQ(r.n_max, 100000u);
  // Floor values sum to 2n - 1.
  FamilyRounder fr(ex1.family, RoundingMode::Floor);
  for (std::uint64_t n = 2; n <= 20000; ++n) {
    auto k = fr(n);
    ASSERT_EQ(k[0] + k[1], static_cast<std::int64_t>(2 * n - 1)) << n;
  }
}

TEST(FindPattern, ExampleOneNearestHasSmallWitness) {
  FamilyDoc ex1 = example1_family();
  PatternSearchResult r = find_pattern(IntegerSet::odds(), ex1.family, RoundingMode::Nearest, 2, 100, 1000);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->n, 2u);
  EXPECT_EQ(r.witness->a, 1u);
  EXPECT_EQ(r.witness->offsets, std::vector<std::int64_t>({0, 4}));
  expect_members(IntegerSet::odds(), *r.witness);
  // 2 - 2^(sqrt(2)/2) and 2 + 2^(sqrt(2)/2) at 64 digits.
  BigFloat c = constant_from_text("sqrt(2)/2", 256);
  BigFloat e = exp(c * log(BigFloat(2.0, 256)));
  EXPECT_EQ(std::floor((BigFloat(2.0, 256) - e).to_double() * 1000), 367);
  EXPECT_EQ(std::floor((BigFloat(2.0, 256) + e).to_double() * 1000), 3632);
}

TEST(FindPattern, SearchOrderStability) {
  FamilyDoc ex1 = example1_family();
  for (unsigned threads : {1u, 3u, 8u}) {
    EXPECT_FALSE(find_pattern(IntegerSet::odds(), ex1.family, RoundingMode::Floor, 2, 20000, 20000, threads).witness);
    auto w = find_pattern(IntegerSet::odds(), ex1.family, RoundingMode::Nearest, 2, 20000, 20000, threads).witness;
    ASSERT_TRUE(w);
    EXPECT_EQ(w->n, 2u);
  }
  // Searching the sub-ranges in reverse order also finds nothing.
  for (std::uint64_t lo = 18001; lo >= 2; lo = lo > 2000 ? lo - 2000 : 2) {
    EXPECT_FALSE(find_pattern(IntegerSet::odds(), ex1.family, RoundingMode::Floor, lo, lo + 1999, 20000).witness) << lo;
    if (lo == 2) break;
  }
  // First witness in (n, a) order is independent of thread count.
  IntegerSet E = IntegerSet::predicate("mod7", [](std::uint64_t x) { return x % 7 == 3 || x % 7 == 5; });
  Family F = {t(Rational(3, 2)), t(Rational(4, 3))};
  auto a = find_pattern(E, F, RoundingMode::Floor, 1, 5000, 5000, 1).witness;
  auto b = find_pattern(E, F, RoundingMode::Floor, 1, 5000, 5000, 8).witness;
  ASSERT_TRUE(a && b);
  EXPECT_EQ(a->n, b->n);
  EXPECT_EQ(a->a, b->a);
  expect_members(E, *a);
}

TEST(FindPattern, ExplicitSetEnumeration) {
  IntegerSet E = IntegerSet::explicit_set({3, 10, 12, 20}, 100);
  PatternSearchResult r = find_pattern(E, {t(2)}, RoundingMode::Floor, 1, 10, 100);
  ASSERT_TRUE(r.witness);
  // 10 - 1 = 9 = 3^2 is the first square difference in n order.
  EXPECT_EQ(r.witness->n, 3u);
  EXPECT_EQ(r.witness->a, 3u);
  EXPECT_FALSE(find_pattern(IntegerSet::explicit_set({}, 10), {t(1)}, RoundingMode::Floor, 1, 10, 10).witness);
}

TEST(Density, Examples) {
  for (double d : upper_density_estimate(IntegerSet::odds(), {2, 10, 1000, 100000})) EXPECT_EQ(d, 0.5);
  IntegerSet bohr = IntegerSet::bohr({constant_from_text("sqrt(2)-1")}, {{Rational(0), Rational(1, 8)}});
  EXPECT_NEAR(upper_density_estimate(bohr, {1000000})[0], 0.125, 0.01);
  for (double d : upper_density_estimate(IntegerSet::explicit_set({}, 100), {1, 50, 100})) EXPECT_EQ(d, 0.0);
  EXPECT_THROW(upper_density_estimate(IntegerSet::odds(), {10, 5}), Error);
}

TEST(Bohr, MembershipMatchesHighPrecision) {
  BigFloat a = constant_from_text("sqrt(2)-1", 320);
  IntegerSet bohr = IntegerSet::bohr({a}, {{Rational(1, 3), Rational(1, 2)}});
  for (std::uint64_t x = 1; x <= 20000; ++x) {
    BigFloat y = frac(BigFloat(static_cast<double>(x), 320) * a);
    bool in = !(y < BigFloat(Rational(1, 3), 320)) && y < BigFloat(Rational(1, 2), 320);
    ASSERT_EQ(bohr.contains(static_cast<std::int64_t>(x)), in) << x;
  }
}

TEST(ReturnSet, Examples) {
  System two = builtin_system("two_point");
  auto all = return_set(two, CyclicSubset{{0, 1}}, {t(1)}, RoundingMode::Floor, 1000);
  ASSERT_EQ(all.size(), 1000u);
  for (std::uint64_t n = 1; n <= 1000; ++n) EXPECT_EQ(all[n - 1], n);
  auto evens = return_set(two, CyclicSubset{{0}}, {t(1)}, RoundingMode::Floor, 1000, 4);
  ASSERT_EQ(evens.size(), 500u);
  for (std::size_t i = 0; i < evens.size(); ++i) EXPECT_EQ(evens[i], 2 * (i + 1));
  EXPECT_THROW(return_set(builtin_system("skew_sqrt2"), BoxSet{}, {t(1)}, RoundingMode::Floor, 10), Error);
}

TEST(ReturnSet, ExampleEightMatchesFractionalPartRule) {
  // Nearest rounding makes both offsets even exactly when {n alpha} < C/n (n >= 2C).
  FamilyDoc ex8 = example8_family("sqrt(2)-1", "3");
  auto R = return_set(builtin_system("two_point"), CyclicSubset{{0}}, ex8.family, RoundingMode::Nearest, 100000, 4);
  BigFloat a = constant_from_text("sqrt(2)-1", 256);
  std::vector<std::uint64_t> expect;
  for (std::uint64_t n = 6; n <= 100000; ++n) {
    BigFloat nn(static_cast<double>(n), 256);
    if (frac(nn * a) < BigFloat(3.0, 256) / nn) expect.push_back(n);
  }
  std::vector<std::uint64_t> tail;
  for (auto n : R)
    if (n >= 6) tail.push_back(n);
  EXPECT_EQ(tail, expect);
  EXPECT_FALSE(expect.empty());
  EXPECT_LT(banach_density_probe(R, 100000, {1000})[0], 0.02);
}

TEST(BanachProbe, Examples) {
  std::vector<std::uint64_t> evens, full;
  for (std::uint64_t n = 1; n <= 10000; ++n) {
    full.push_back(n);
    if (n % 2 == 0) evens.push_back(n);
  }
  EXPECT_EQ(banach_density_probe(evens, 10000, {100})[0], 0.5);
  EXPECT_EQ(banach_density_probe(full, 10000, {1, 100, 10000}), std::vector<double>({1.0, 1.0, 1.0}));
  EXPECT_EQ(banach_density_probe({5}, 10, {1, 10}), std::vector<double>({1.0, 0.1}));
  EXPECT_THROW(banach_density_probe(full, 100, {0}), Error);
}

TEST(ExampleFour, ParityLaw) {
  FamilyRounder fr(example4_family().family, RoundingMode::Floor);
  for (std::uint64_t n = 1; n <= 100000; ++n) {
    auto k = fr(n);
    if (is_square(n)) {
      ASSERT_EQ(k[0] % 2, 0) << n;
      ASSERT_EQ(k[1] % 2, 0) << n;
    } else {
      ASSERT_NE((k[0] - k[1]) % 2, 0) << n;
      ASSERT_EQ(k[0] + k[1], static_cast<std::int64_t>(2 * n - 1)) << n;
    }
  }
}

TEST(CorA4, SquareWithOneShift) {
  PatternSearchResult r = cor_a4_probe({t(2)}, 1, IntegerSet::all(), RoundingMode::Floor, 1, 10, 10);
  ASSERT_TRUE(r.witness);
  EXPECT_EQ(r.witness->n, 1u);
  EXPECT_EQ(r.witness->a, 1u);
  EXPECT_EQ(r.witness->offsets, std::vector<std::int64_t>({1, 4}));
  OffsetFn off = shifted_offsets({t(1), t(2)}, 2, RoundingMode::Floor);
  EXPECT_EQ(off(3), std::vector<std::int64_t>({3, 4, 5, 9, 16, 25}));
}

TEST(CorA4, ExampleFiveBohrProbeSmallBounds) {
  PatternSearchResult r =
      cor_a4_probe(example5_family().family, 1, example5_set(), RoundingMode::Floor, 1, 2000, 2000);
  EXPECT_FALSE(r.witness);
}

TEST(ShiftedCombination, ExampleFive) {
  // f1(t+2) - 2 f1(t+1) + f1(t) - f2(t+1) + f2(t) = -1 + (15/16) t^(-1/2) + O(t^(-3/2)).
  std::vector<ShiftTerm> terms = {{0, 2, 1}, {0, 1, -2}, {0, 0, 1}, {1, 1, -1}, {1, 0, 1}};
  Family F = example5_family().family;
  for (double x : {1e4, 1e6}) {
    ShiftedCombination c = shifted_combination(F, terms, BigFloat(x, 256), Rational(-1, 2));
    double v = c.value.to_double();
    EXPECT_LT(c.error, 1e-30);
    EXPECT_NEAR(v, -1 + 15.0 / 16 / std::sqrt(x), 2 / std::pow(x, 1.5)) << x;
    // Direct high-precision oracle.
    BigFloat T(x, 256);
    auto f1 = [&](double j) { return pow(T + BigFloat(j, 256), BigFloat(2.5, 256)); };
    auto f2 = [&](double j) {
      BigFloat s = T + BigFloat(j, 256);
      return BigFloat(2.5, 256) * pow(s, BigFloat(1.5, 256)) + s;
    };
    BigFloat direct = f1(2) - BigFloat(2.0, 256) * f1(1) + f1(0) - f2(1) + f2(0);
    EXPECT_NEAR(v, direct.to_double(), 1e-12);
    EXPECT_EQ(c.expansion, HardyExpr::power(0, -1) + HardyExpr::power(Rational(-1, 2), Rational(15, 16)));
  }
  EXPECT_NEAR(shifted_combination(F, terms, BigFloat(1e4, 256)).value.to_double(), -0.990625, 1e-6);
}
