#include <hfl/builtins.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hfl;

namespace {

Arc arc(const char* u, const char* v) { return Arc::from_rationals(parse_rational(u), parse_rational(v)); }

double start_of(const Arc& a) { return a.start.to_double(); }
double end_of(const Arc& a) { return (a.start + Phase{a.length}).to_double(); }

System torus(const std::vector<std::string>& alphas) {
  TorusRotation t;
  for (auto& a : alphas) t.alpha.push_back(phase_of(a));
  return t;
}

}  // namespace

TEST(ApplyPower, Examples) {
  System two = CyclicRotation{2, 1};
  EXPECT_EQ(apply_power(two, origin(two), 3).residue, 1u);
  EXPECT_EQ(apply_power(two, origin(two), -3).residue, 1u);

  System rot = builtin_system("torus_sqrt2");
  Point p = apply_power(rot, origin(rot), 5);
  BigFloat ref = frac(BigFloat(5.0, 320) * sqrt(BigFloat(2.0, 320)));
  EXPECT_NEAR(p.coords[0].to_double(), ref.to_double(), 1e-16);
  EXPECT_NEAR(p.coords[0].to_double(), 0.07106781186547524, 1e-16);
}

TEST(ApplyPower, SkewClosedFormMatchesIteration) {
  System sk = builtin_system("skew_sqrt2");
  Phase a = std::get<QuadraticSkew>(sk).alpha;
  Point p = apply_power(sk, origin(sk), 3);
  EXPECT_EQ(p.coords[0], a.times(3));
  EXPECT_EQ(p.coords[1], a.times(9));

  Point x{0, {Phase::from_double(0.3141), Phase::from_double(0.2718)}};
  Point it = x;
  for (int k = 1; k <= 1000; ++k) {
    it = apply_power(sk, it, 1);
    ASSERT_EQ(apply_power(sk, x, k), it) << k;
  }
  it = x;
  for (int k = 1; k <= 1000; ++k) {
    it = apply_power(sk, it, -1);
    ASSERT_EQ(apply_power(sk, x, -k), it) << k;
  }
}

TEST(ApplyPower, SkewAgreesWithHighPrecisionIteration) {
  System sk = builtin_system("skew_sqrt2");
  constexpr mpfr_prec_t bits = 170;  // about 50 digits
  BigFloat a = constant_from_text("sqrt(2)-1", bits);
  BigFloat x(bits), y(bits);
  for (int k = 1; k <= 1000; ++k) {
    y = frac(y + BigFloat(2.0, bits) * x + a);
    x = frac(x + a);
  }
  Point p = apply_power(sk, origin(sk), 1000);
  EXPECT_NEAR(p.coords[0].to_double(), x.to_double(), 1e-15);
  EXPECT_NEAR(p.coords[1].to_double(), y.to_double(), 1e-15);
}

TEST(ApplyPower, GroupAction) {
  std::mt19937_64 g(7);
  std::uniform_int_distribution<std::int64_t> k(-1000000, 1000000);
  std::vector<System> systems = {CyclicRotation{97, 13}, torus({"sqrt(2)-1", "sqrt(3)-1"}), builtin_system("skew_sqrt2")};
  for (auto& sys : systems) {
    for (int trial = 0; trial < 200; ++trial) {
      Point x = origin(sys);
      x.residue = static_cast<std::uint64_t>(trial) % 97;
      for (auto& c : x.coords) c = Phase{(static_cast<u128>(g()) << 64) | g()};
      std::int64_t m1 = k(g), m2 = k(g);
      ASSERT_EQ(apply_power(sys, x, m1 + m2), apply_power(sys, apply_power(sys, x, m1), m2));
    }
  }
}

TEST(PreimageBox, Examples) {
  System rot = torus({"1/4"});
  BoxSet A = {arc("0", "3/10")};
  BoxSet B = preimage_box(rot, A, 1);
  EXPECT_NEAR(start_of(B[0]), 0.75, 1e-15);
  EXPECT_NEAR(end_of(B[0]), 0.05, 1e-15);
  BoxSet Z = preimage_box(rot, A, 0);
  EXPECT_EQ(Z[0].start, A[0].start);
  EXPECT_EQ(Z[0].length, A[0].length);

  System r2 = torus({"1/5"});
  BoxSet C = preimage_box(r2, {arc("9/10", "1/10")}, 2);
  EXPECT_NEAR(start_of(C[0]), 0.5, 1e-15);
  EXPECT_NEAR(end_of(C[0]), 0.7, 1e-15);

  try {
    preimage_box(CyclicRotation{2, 1}, A, 1);
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::wrong_variant);
  }
}

TEST(PreimageBox, PreservesMeasure) {
  System rot = torus({"sqrt(2)-1", "sqrt(5)"});
  BoxSet A = {arc("1/10", "7/10"), arc("9/10", "1/5")};
  for (std::int64_t m : {-1000, -3, 0, 1, 17, 123456789}) {
    EXPECT_NEAR(measure_intersection({preimage_box(rot, A, m)}), measure_intersection({A}), 1e-15) << m;
  }
}

TEST(MeasureIntersection, Examples) {
  EXPECT_NEAR(measure_intersection({{arc("0", "3/10")}, {arc("1/5", "1/2")}}), 0.1, 1e-15);
  EXPECT_NEAR(measure_intersection({{arc("9/10", "1/10")}, {arc("0", "1/20")}}), 0.05, 1e-15);
  EXPECT_NEAR(measure_intersection({{arc("0", "1/2")}, {arc("1/4", "3/4")}, {arc("2/5", "9/10")}}), 0.1, 1e-15);
}

TEST(MeasureIntersection, SplitArcsAndDisjointness) {
  // [0.8, 0.3) and [0.2, 0.9) meet in [0.8, 0.9) and [0.2, 0.3).
  EXPECT_NEAR(measure_intersection({{arc("4/5", "3/10")}, {arc("1/5", "9/10")}}), 0.2, 1e-15);
  IntersectionMeasure none = measure_intersection_exact({{arc("0", "1/4")}, {arc("1/4", "1/2")}});
  EXPECT_FALSE(none.positive);
  EXPECT_EQ(none.value, 0.0);
  EXPECT_NEAR(measure_intersection({{arc("0", "1/2"), arc("0", "1/2")}, {arc("1/4", "1"), arc("0", "1/10")}}),
              0.025, 1e-15);
}

TEST(MeasureIntersection, MatchesGridCount) {
  std::mt19937_64 g(3);
  std::uniform_int_distribution<int> u(0, 999);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<BoxSet> boxes;
    std::vector<std::pair<int, int>> ends;
    for (int j = 0; j < 3; ++j) {
      int a = u(g), b = u(g);
      ends.push_back({a, b});
      boxes.push_back({Arc::from_rationals(Rational(a, 1000), Rational(b, 1000) + (b < a ? 1 : 0))});
    }
    int count = 0;
    for (int x = 0; x < 1000; ++x) {
      bool in = true;
      for (auto [a, b] : ends) in = in && ((x - a + 1000) % 1000 < (b - a + 1000) % 1000);
      count += in;
    }
    EXPECT_NEAR(measure_intersection(boxes), count / 1000.0, 1e-12);
  }
}

TEST(Birkhoff, Examples) {
  System rot = builtin_system("torus_sqrt2");
  EXPECT_EQ(birkhoff_projection(rot, Tabulated{{1.0}}, origin(rot), 1000), std::complex<double>(1.0));
  std::complex<double> v = birkhoff_projection(rot, Character{{1}}, origin(rot), 1000000);
  double a = std::sqrt(2.0) - 1;
  double dist = std::min(a, 1 - a);
  EXPECT_LT(std::abs(v), 2.0 / (1e6 * dist));

  System two = CyclicRotation{2, 1};
  EXPECT_EQ(birkhoff_projection(two, Tabulated{{1.0, -1.0}}, origin(two), 1000), std::complex<double>(0.0));
  EXPECT_THROW(birkhoff_projection(two, Character{{1}}, origin(two), 10), Error);
  EXPECT_THROW(birkhoff_projection(two, Tabulated{{1.0}}, origin(two), 0), Error);
}
