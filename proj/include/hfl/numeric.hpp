#pragma once

// Numeric foundation: exact integers/rationals (GMP), an RAII wrapper over
// MPFR with explicit per-object precision, 128-bit fixed-point circle phases,
// compensated summation and a counter-based random stream.

#include <gmpxx.h>
#include <mpfr.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace hfl {

using BigInt = mpz_class;
using Rational = mpq_class;

enum class Errc {
  schema_error,
  precondition_violation,
  wrong_variant,
  uncertifiable_rounding,
  precision_exhausted,
  no_compatible_weight,
  undeclared_product,
  truncation_uncertified,
  domain_error,
};

inline const char* errc_name(Errc c) {
  switch (c) {
    case Errc::schema_error: return "schema-error";
    case Errc::precondition_violation: return "precondition-violation";
    case Errc::wrong_variant: return "wrong-variant";
    case Errc::uncertifiable_rounding: return "uncertifiable-rounding";
    case Errc::precision_exhausted: return "precision-exhausted";
    case Errc::no_compatible_weight: return "no-compatible-weight";
    case Errc::undeclared_product: return "undeclared-product";
    case Errc::truncation_uncertified: return "truncation-uncertified";
    case Errc::domain_error: return "domain-error";
  }
  return "error";
}

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

// ---------------------------------------------------------------------------
// Rationals

/// Parses "p", "p/q", or a plain decimal such as "-0.05" or "1.5e-3" exactly.
inline Rational parse_rational(std::string_view text) {
  std::string s(text);
  auto trim = [](std::string& x) {
    while (!x.empty() && std::isspace(static_cast<unsigned char>(x.back()))) x.pop_back();
    std::size_t i = 0;
    while (i < x.size() && std::isspace(static_cast<unsigned char>(x[i]))) ++i;
    x.erase(0, i);
  };
  trim(s);
  if (s.empty()) throw Error(Errc::schema_error, "empty rational literal");
  try {
    if (auto slash = s.find('/'); slash != std::string::npos) {
      Rational q(s.substr(0, slash) + "/" + s.substr(slash + 1), 10);
      if (q.get_den() == 0) throw Error(Errc::schema_error, "zero denominator in '" + s + "'");
      q.canonicalize();
      return q;
    }
    bool neg = false;
    std::size_t i = 0;
    if (s[0] == '-' || s[0] == '+') {
      neg = s[0] == '-';
      i = 1;
    }
    std::string mant;
    long exp10 = 0;
    bool seen_dot = false, seen_digit = false;
    for (; i < s.size(); ++i) {
      char ch = s[i];
      if (std::isdigit(static_cast<unsigned char>(ch))) {
        mant.push_back(ch);
        seen_digit = true;
        if (seen_dot) --exp10;
      } else if (ch == '.' && !seen_dot) {
        seen_dot = true;
      } else if (ch == 'e' || ch == 'E') {
        exp10 += std::stol(s.substr(i + 1));
        break;
      } else {
        throw Error(Errc::schema_error, "malformed rational literal '" + s + "'");
      }
    }
    if (!seen_digit) throw Error(Errc::schema_error, "malformed rational literal '" + s + "'");
    BigInt num(mant, 10);
    BigInt scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
    Rational q = exp10 < 0 ? Rational(num, scale) : Rational(num * scale);
    q.canonicalize();
    return neg ? Rational(-q) : q;
  } catch (const std::invalid_argument&) {
    throw Error(Errc::schema_error, "malformed rational literal '" + s + "'");
  }
}

inline std::string to_string(const Rational& q) { return q.get_str(10); }

inline BigInt floor_div(const Rational& q) {
  BigInt r;
  mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
  return r;
}

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

/// Exact n-th root test: returns r with r^k == n when it exists.
inline bool exact_root(const BigInt& n, unsigned long k, BigInt& out) {
  if (n < 0) return false;
  return mpz_root(out.get_mpz_t(), n.get_mpz_t(), k) != 0;
}

// ---------------------------------------------------------------------------
// BigFloat: MPFR value with its own precision. Results of binary operations
// take the larger operand precision.

inline mpfr_prec_t digits_to_bits(unsigned digits) {
  return static_cast<mpfr_prec_t>(std::ceil(digits * 3.3219280948873623)) + 8;
}

class BigFloat {
 public:
  explicit BigFloat(mpfr_prec_t bits = 256) {
    mpfr_init2(v_, bits);
    mpfr_set_zero(v_, 1);
  }
  BigFloat(double x, mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_d(v_, x, MPFR_RNDN);
  }
  BigFloat(const BigInt& x, mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_z(v_, x.get_mpz_t(), MPFR_RNDN);
  }
  BigFloat(const Rational& x, mpfr_prec_t bits) {
    mpfr_init2(v_, bits);
    mpfr_set_q(v_, x.get_mpq_t(), MPFR_RNDN);
  }
  BigFloat(const BigFloat& o) {
    mpfr_init2(v_, mpfr_get_prec(o.v_));
    mpfr_set(v_, o.v_, MPFR_RNDN);
  }
  BigFloat(BigFloat&& o) noexcept {
    mpfr_init2(v_, MPFR_PREC_MIN);
    mpfr_swap(v_, o.v_);
  }
  BigFloat& operator=(const BigFloat& o) {
    if (this != &o) {
      mpfr_set_prec(v_, mpfr_get_prec(o.v_));
      mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    return *this;
  }
  BigFloat& operator=(BigFloat&& o) noexcept {
    mpfr_swap(v_, o.v_);
    return *this;
  }
  ~BigFloat() { mpfr_clear(v_); }

  static BigFloat from_string(const std::string& s, mpfr_prec_t bits) {
    BigFloat r(bits);
    if (mpfr_set_str(r.v_, s.c_str(), 10, MPFR_RNDN) != 0 && !mpfr_number_p(r.v_))
      throw Error(Errc::schema_error, "not a decimal number: '" + s + "'");
    return r;
  }
  static BigFloat pi(mpfr_prec_t bits) {
    BigFloat r(bits);
    mpfr_const_pi(r.v_, MPFR_RNDN);
    return r;
  }

  mpfr_prec_t precision() const { return mpfr_get_prec(v_); }
  mpfr_srcptr get() const { return v_; }
  mpfr_ptr get() { return v_; }

  double to_double() const { return mpfr_get_d(v_, MPFR_RNDN); }
  int sign() const { return mpfr_sgn(v_); }
  bool is_finite() const { return mpfr_number_p(v_) != 0; }
  long exponent2() const { return mpfr_zero_p(v_) ? 0 : mpfr_get_exp(v_); }

  BigInt floor() const {
    BigInt z;
    mpfr_get_z(z.get_mpz_t(), v_, MPFR_RNDD);
    return z;
  }
  std::string to_string(int digits = 20) const {
    char* buf = nullptr;
    std::string fmt = "%." + std::to_string(digits) + "Rg";
    mpfr_asprintf(&buf, fmt.c_str(), v_);
    std::string s(buf);
    mpfr_free_str(buf);
    return s;
  }

#define HFL_BIGFLOAT_BINOP(op, fn)                                                   \
  friend BigFloat operator op(const BigFloat& a, const BigFloat& b) {                \
    BigFloat r(std::max(a.precision(), b.precision()));                              \
    fn(r.v_, a.v_, b.v_, MPFR_RNDN);                                                 \
    return r;                                                                        \
  }                                                                                  \
  BigFloat& operator op##=(const BigFloat& b) {                                      \
    if (b.precision() > precision()) mpfr_prec_round(v_, b.precision(), MPFR_RNDN); \
    fn(v_, v_, b.v_, MPFR_RNDN);                                                     \
    return *this;                                                                    \
  }
  HFL_BIGFLOAT_BINOP(+, mpfr_add)
  HFL_BIGFLOAT_BINOP(-, mpfr_sub)
  HFL_BIGFLOAT_BINOP(*, mpfr_mul)
  HFL_BIGFLOAT_BINOP(/, mpfr_div)
#undef HFL_BIGFLOAT_BINOP

  friend BigFloat operator-(const BigFloat& a) {
    BigFloat r(a.precision());
    mpfr_neg(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  friend bool operator<(const BigFloat& a, const BigFloat& b) { return mpfr_less_p(a.v_, b.v_); }
  friend bool operator>(const BigFloat& a, const BigFloat& b) { return mpfr_greater_p(a.v_, b.v_); }
  friend bool operator<=(const BigFloat& a, const BigFloat& b) { return mpfr_lessequal_p(a.v_, b.v_); }
  friend bool operator==(const BigFloat& a, const BigFloat& b) { return mpfr_equal_p(a.v_, b.v_); }

  friend BigFloat abs(const BigFloat& a) { return unary(a, mpfr_abs); }
  friend BigFloat log(const BigFloat& a) { return unary(a, mpfr_log); }
  friend BigFloat exp(const BigFloat& a) { return unary(a, mpfr_exp); }
  friend BigFloat sqrt(const BigFloat& a) { return unary(a, mpfr_sqrt); }
  friend BigFloat cbrt(const BigFloat& a) { return unary(a, mpfr_cbrt); }
  friend BigFloat sin(const BigFloat& a) { return unary(a, mpfr_sin); }
  friend BigFloat cos(const BigFloat& a) { return unary(a, mpfr_cos); }
  friend BigFloat pow(const BigFloat& a, const BigFloat& b) {
    BigFloat r(std::max(a.precision(), b.precision()));
    mpfr_pow(r.v_, a.v_, b.v_, MPFR_RNDN);
    return r;
  }
  /// Fractional part in [0, 1).
  friend BigFloat frac(const BigFloat& a) {
    BigFloat fl(a.precision());
    mpfr_floor(fl.v_, a.v_);
    return a - fl;
  }
  /// 2^e at the given precision.
  static BigFloat pow2(long e, mpfr_prec_t bits) {
    BigFloat r(bits);
    mpfr_set_ui_2exp(r.v_, 1, e, MPFR_RNDN);
    return r;
  }

 private:
  template <class F>
  static BigFloat unary(const BigFloat& a, F fn) {
    BigFloat r(a.precision());
    fn(r.v_, a.v_, MPFR_RNDN);
    return r;
  }
  mpfr_t v_;
};

// ---------------------------------------------------------------------------
// Phase: a point of R/Z stored as a 128-bit binary fraction. Addition and
// integer multiples are exact ring operations modulo 1.

struct Phase {
  using u128 = unsigned __int128;
  u128 bits = 0;

  static constexpr double two64 = 18446744073709551616.0;

  static Phase from_double(double x) {
    double f = x - std::floor(x);
    double hi_d = std::ldexp(f, 64);
    auto hi = static_cast<std::uint64_t>(hi_d);
    double rest = hi_d - static_cast<double>(hi);
    auto lo = static_cast<std::uint64_t>(std::ldexp(rest, 64));
    return Phase{(static_cast<u128>(hi) << 64) | lo};
  }
  static Phase from_real(const BigFloat& x) {
    BigFloat f = frac(x);
    mpfr_prec_t p = std::max<mpfr_prec_t>(f.precision(), 160);
    BigFloat scaled = BigFloat(f) * BigFloat::pow2(128, p);
    BigInt z = scaled.floor();
    return from_bigint(z);
  }
  static Phase from_rational(const Rational& q) {
    Rational f = q - Rational(floor_div(q));
    BigInt z = floor_div(Rational(f * Rational(BigInt(1) << 128)));
    return from_bigint(z);
  }
  static Phase from_bigint(const BigInt& z0) {
    BigInt two128 = BigInt(1) << 128;
    BigInt z = z0 % two128;
    if (z < 0) z += two128;
    BigInt hi = z >> 64;
    BigInt lo = z - (hi << 64);
    return Phase{(static_cast<u128>(hi.get_ui()) << 64) | static_cast<u128>(lo.get_ui())};
  }

  double to_double() const {
    return static_cast<double>(static_cast<std::uint64_t>(bits >> 64)) / two64 +
           static_cast<double>(static_cast<std::uint64_t>(bits)) / two64 / two64;
  }
  /// Distance to 0 on the circle, in [0, 1/2].
  double norm() const {
    Phase neg{static_cast<u128>(0) - bits};
    return std::min(to_double(), neg.to_double());
  }
  Phase times(std::int64_t m) const {
    return Phase{bits * static_cast<u128>(static_cast<__int128>(m))};
  }
  Phase times_u128(u128 m) const { return Phase{bits * m}; }

  friend Phase operator+(Phase a, Phase b) { return Phase{a.bits + b.bits}; }
  friend Phase operator-(Phase a, Phase b) { return Phase{a.bits - b.bits}; }
  friend Phase operator-(Phase a) { return Phase{static_cast<u128>(0) - a.bits}; }
  friend bool operator==(Phase a, Phase b) { return a.bits == b.bits; }
  friend bool operator<(Phase a, Phase b) { return a.bits < b.bits; }
};

/// Ulp of the phase representation as a real number.
inline constexpr double phase_ulp = 2.9387358770557188e-39;  // 2^-128

// ---------------------------------------------------------------------------
// Compensated (Neumaier) accumulation; merge() folds another accumulator in
// so that chunk results can be reduced in a fixed order.

struct CompensatedSum {
  double sum = 0.0;
  double comp = 0.0;

  void add(double x) {
    double t = sum + x;
    if (std::abs(sum) >= std::abs(x))
      comp += (sum - t) + x;
    else
      comp += (x - t) + sum;
    sum = t;
  }
  void merge(const CompensatedSum& o) {
    add(o.sum);
    add(o.comp);
  }
  double value() const { return sum + comp; }
};

struct ComplexSum {
  CompensatedSum re, im;
  void add(std::complex<double> z) {
    re.add(z.real());
    im.add(z.imag());
  }
  void merge(const ComplexSum& o) {
    re.merge(o.re);
    im.merge(o.im);
  }
  std::complex<double> value() const { return {re.value(), im.value()}; }
};

/// e(x) = exp(2 pi i x).
inline std::complex<double> unit(double x) {
  double f = x - std::floor(x);
  double a = 2.0 * std::numbers::pi * f;
  return {std::cos(a), std::sin(a)};
}

// ---------------------------------------------------------------------------
// Counter-based stream: value k of stream `seed` is a pure function of both.

inline std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::uint64_t counter_random(std::uint64_t seed, std::uint64_t counter) {
  return mix64(mix64(seed) ^ (counter * 0xd1b54a32d192ed03ULL));
}

inline double counter_uniform(std::uint64_t seed, std::uint64_t counter) {
  return static_cast<double>(counter_random(seed, counter) >> 11) * 0x1.0p-53;
}

}  // namespace hfl
