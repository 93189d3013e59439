#pragma once

// Germs at infinity of the form  sum_k a_k * t^{c_k} * prod_j log_j(t)^{r_{k,j}}
// where log_1 = log and log_{j+1} = log o log_j. Coefficients and the power of t
// are SymbolicReal; iterated-log exponents are rationals.

#include <hfl/symbolic.hpp>

#include <functional>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace hfl {

struct Signature {
  SymbolicReal t_exp;
  std::vector<Rational> log_exps;  // [r_1, r_2, ...], trailing zeros trimmed

  Signature() = default;
  Signature(SymbolicReal c, std::vector<Rational> logs = {}) : t_exp(std::move(c)), log_exps(std::move(logs)) {
    trim();
  }
  static Signature power(const Rational& c) { return Signature(SymbolicReal(c)); }
  /// t^c * log_depth(t)^r, the single-log form of the interchange schema.
  static Signature single(SymbolicReal c, const Rational& r, int depth) {
    std::vector<Rational> logs;
    if (depth > 0 && r != 0) {
      logs.assign(static_cast<std::size_t>(depth), Rational(0));
      logs.back() = r;
    }
    return Signature(std::move(c), std::move(logs));
  }

  void trim() {
    while (!log_exps.empty() && log_exps.back() == 0) log_exps.pop_back();
  }
  Rational log_exp(std::size_t j) const { return j < log_exps.size() ? log_exps[j] : Rational(0); }
  bool has_logs() const { return !log_exps.empty(); }

  /// Sign of the log part in the growth order (0 when absent).
  int log_sign() const {
    for (auto& r : log_exps)
      if (r != 0) return sgn(r);
    return 0;
  }
  bool is_constant() const { return t_exp.is_zero() && log_exps.empty(); }
  /// t^d with d a non-negative integer.
  bool is_polynomial() const {
    return log_exps.empty() && t_exp.is_rational() && is_integer(t_exp.rational_value()) &&
           t_exp.rational_value() >= 0;
  }
  int poly_degree() const { return static_cast<int>(t_exp.rational_value().get_num().get_si()); }
  /// Tends to 0.
  bool is_decaying() const {
    int c = t_exp.sign();
    return c < 0 || (c == 0 && log_sign() < 0);
  }

  friend bool operator==(const Signature& a, const Signature& b) {
    return a.t_exp == b.t_exp && a.log_exps == b.log_exps;
  }
};

/// Growth order of monomials: -1, 0, 1 for a < b, a = b, a > b.
inline int compare(const Signature& a, const Signature& b) {
  if (int s = compare(a.t_exp, b.t_exp)) return s;
  std::size_t n = std::max(a.log_exps.size(), b.log_exps.size());
  for (std::size_t j = 0; j < n; ++j) {
    int c = cmp(a.log_exp(j), b.log_exp(j));
    if (c) return c > 0 ? 1 : -1;
  }
  return 0;
}

struct GermTerm {
  SymbolicReal coeff;
  Signature sig;
};

class HardyExpr {
 public:
  HardyExpr() = default;
  HardyExpr(std::vector<GermTerm> terms, BasisPtr basis = nullptr) : basis_(std::move(basis)), terms_(std::move(terms)) {
    normalize();
  }
  static HardyExpr constant(const SymbolicReal& c) { return HardyExpr({{c, Signature()}}, c.basis()); }
  static HardyExpr monomial(const SymbolicReal& coeff, Signature sig, BasisPtr basis = nullptr) {
    BasisPtr b = SymbolicReal::merge_basis(SymbolicReal::merge_basis(basis, coeff.basis()), sig.t_exp.basis());
    return HardyExpr({{coeff, std::move(sig)}}, b);
  }
  /// t^c for rational c.
  static HardyExpr power(const Rational& c, const Rational& coeff = 1) {
    return HardyExpr({{SymbolicReal(coeff), Signature::power(c)}});
  }
  /// Integer polynomial / rational polynomial from coefficients, constant first.
  static HardyExpr polynomial(const std::vector<Rational>& coeffs) {
    std::vector<GermTerm> ts;
    for (std::size_t i = 0; i < coeffs.size(); ++i)
      ts.push_back({SymbolicReal(coeffs[i]), Signature::power(static_cast<long>(i))});
    return HardyExpr(std::move(ts));
  }

  const std::vector<GermTerm>& terms() const { return terms_; }
  const BasisPtr& basis() const { return basis_; }
  bool is_zero() const { return terms_.empty(); }
  const GermTerm& leading() const {
    if (terms_.empty()) throw Error(Errc::precondition_violation, "zero germ has no leading term");
    return terms_.front();
  }

  friend HardyExpr operator+(const HardyExpr& a, const HardyExpr& b) {
    std::vector<GermTerm> ts = a.terms_;
    ts.insert(ts.end(), b.terms_.begin(), b.terms_.end());
    return HardyExpr(std::move(ts), SymbolicReal::merge_basis(a.basis_, b.basis_));
  }
  friend HardyExpr operator-(const HardyExpr& a) {
    HardyExpr r = a;
    for (auto& t : r.terms_) t.coeff = -t.coeff;
    return r;
  }
  friend HardyExpr operator-(const HardyExpr& a, const HardyExpr& b) { return a + (-b); }
  friend HardyExpr operator*(const SymbolicReal& s, const HardyExpr& a) {
    std::vector<GermTerm> ts;
    for (auto& t : a.terms_) ts.push_back({s * t.coeff, t.sig});
    return HardyExpr(std::move(ts), SymbolicReal::merge_basis(a.basis_, s.basis()));
  }
  friend bool operator==(const HardyExpr& a, const HardyExpr& b) { return (a - b).is_zero(); }

  /// Terms whose signature is t^d with d >= 0 an integer.
  HardyExpr polynomial_part() const {
    std::vector<GermTerm> ts;
    for (auto& t : terms_)
      if (t.sig.is_polynomial()) ts.push_back(t);
    return HardyExpr(std::move(ts), basis_);
  }
  HardyExpr non_polynomial_part() const {
    std::vector<GermTerm> ts;
    for (auto& t : terms_)
      if (!t.sig.is_polynomial()) ts.push_back(t);
    return HardyExpr(std::move(ts), basis_);
  }
  bool is_polynomial() const {
    return std::all_of(terms_.begin(), terms_.end(), [](auto& t) { return t.sig.is_polynomial(); });
  }
  bool all_rational() const {
    return std::all_of(terms_.begin(), terms_.end(), [](auto& t) { return t.coeff.is_rational(); });
  }
  /// Coefficient of t^d (zero when absent).
  SymbolicReal poly_coeff(int d) const {
    for (auto& t : terms_)
      if (t.sig.is_polynomial() && t.sig.poly_degree() == d) return t.coeff;
    return {};
  }

  std::string to_string() const;

 private:
  void normalize() {
    for (auto& t : terms_) {
      t.sig.trim();
      basis_ = SymbolicReal::merge_basis(basis_, t.coeff.basis());
      basis_ = SymbolicReal::merge_basis(basis_, t.sig.t_exp.basis());
    }
    std::erase_if(terms_, [](const GermTerm& t) { return t.coeff.is_zero(); });
    std::stable_sort(terms_.begin(), terms_.end(),
                     [](const GermTerm& a, const GermTerm& b) { return compare(a.sig, b.sig) > 0; });
    std::vector<GermTerm> merged;
    for (auto& t : terms_) {
      if (!merged.empty() && merged.back().sig == t.sig)
        merged.back().coeff = merged.back().coeff + t.coeff;
      else
        merged.push_back(t);
    }
    std::erase_if(merged, [](const GermTerm& t) { return t.coeff.is_zero(); });
    terms_ = std::move(merged);
  }

  BasisPtr basis_;
  std::vector<GermTerm> terms_;
};

inline std::string signature_to_string(const Signature& s) {
  std::ostringstream os;
  bool any = false;
  if (!s.t_exp.is_zero()) {
    os << "t";
    if (!(s.t_exp.is_rational() && s.t_exp.rational_value() == 1)) os << "^(" << s.t_exp.to_string() << ")";
    any = true;
  }
  for (std::size_t j = 0; j < s.log_exps.size(); ++j) {
    if (s.log_exps[j] == 0) continue;
    if (any) os << "*";
    os << "log";
    if (j > 0) os << "_" << j + 1;
    os << "(t)";
    if (s.log_exps[j] != 1) os << "^(" << s.log_exps[j].get_str() << ")";
    any = true;
  }
  return any ? os.str() : "1";
}

inline std::string HardyExpr::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (auto& t : terms_) {
    std::string c = t.coeff.to_string();
    bool compound = t.coeff.coords().size() > 1;
    if (!first) os << " + ";
    if (t.sig.is_constant()) {
      os << c;
    } else if (c == "1") {
      os << signature_to_string(t.sig);
    } else if (c == "-1") {
      os << "-" << signature_to_string(t.sig);
    } else {
      os << (compound ? "(" + c + ")" : c) << "*" << signature_to_string(t.sig);
    }
    first = false;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// Differentiation

/// d/dt of a t^c prod_j L_j^{r_j}, using dL_j/dt = 1 / (t L_1 ... L_{j-1}).
inline HardyExpr derivative(const HardyExpr& f) {
  std::vector<GermTerm> out;
  for (auto& term : f.terms()) {
    const Signature& s = term.sig;
    SymbolicReal cm1 = s.t_exp - SymbolicReal(Rational(1));
    if (!s.t_exp.is_zero()) out.push_back({term.coeff * s.t_exp, Signature(cm1, s.log_exps)});
    for (std::size_t j = 0; j < s.log_exps.size(); ++j) {
      if (s.log_exps[j] == 0) continue;
      std::vector<Rational> logs = s.log_exps;
      for (std::size_t i = 0; i <= j; ++i) logs[i] -= 1;
      out.push_back({term.coeff * s.log_exps[j], Signature(cm1, std::move(logs))});
    }
  }
  return HardyExpr(std::move(out), f.basis());
}

inline HardyExpr derivative(const HardyExpr& f, int order) {
  HardyExpr g = f;
  for (int i = 0; i < order; ++i) g = derivative(g);
  return g;
}

// ---------------------------------------------------------------------------
// Growth comparison

struct GrowthComparison {
  enum class Kind { Precedes, Dominates, SameOrder } kind;
  std::optional<SymbolicReal> ratio;  // exact lim f/g when expressible
  double ratio_value = 0.0;           // numeric lim f/g

  bool same_order_one() const {
    return kind == Kind::SameOrder && ratio && ratio->is_rational() && ratio->rational_value() == 1;
  }
};

inline const char* to_string(GrowthComparison::Kind k) {
  switch (k) {
    case GrowthComparison::Kind::Precedes: return "Precedes";
    case GrowthComparison::Kind::Dominates: return "Dominates";
    case GrowthComparison::Kind::SameOrder: return "SameOrder";
  }
  return "?";
}

/// Exact quotient a/b when b is rational or a is a rational multiple of b.
inline std::optional<SymbolicReal> exact_ratio(const SymbolicReal& a, const SymbolicReal& b) {
  if (b.is_zero()) return std::nullopt;
  if (b.is_rational()) return a * Rational(1 / b.rational_value());
  if (a.coords().size() != b.coords().size()) return std::nullopt;
  Rational q = a.coords()[0].second / b.coords()[0].second;
  for (std::size_t i = 0; i < a.coords().size(); ++i) {
    if (a.coords()[i].first != b.coords()[i].first) return std::nullopt;
    if (a.coords()[i].second != q * b.coords()[i].second) return std::nullopt;
  }
  return SymbolicReal(q);
}

inline GrowthComparison compare(const HardyExpr& f, const HardyExpr& g) {
  if (f.is_zero() || g.is_zero()) throw Error(Errc::precondition_violation, "compare requires nonzero germs");
  int s = compare(f.leading().sig, g.leading().sig);
  if (s < 0) return {GrowthComparison::Kind::Precedes, std::nullopt, 0.0};
  if (s > 0) return {GrowthComparison::Kind::Dominates, std::nullopt, 0.0};
  auto ratio = exact_ratio(f.leading().coeff, g.leading().coeff);
  double rv = ratio ? ratio->to_double() : f.leading().coeff.to_double() / g.leading().coeff.to_double();
  return {GrowthComparison::Kind::SameOrder, ratio, rv};
}

/// f << g in the Hardy sense: |f| <= C|g| eventually.
inline bool ll(const HardyExpr& f, const HardyExpr& g) {
  return compare(f, g).kind != GrowthComparison::Kind::Dominates;
}
inline bool prec(const HardyExpr& f, const HardyExpr& g) {
  return compare(f, g).kind == GrowthComparison::Kind::Precedes;
}

/// Smallest d >= 1 with |f| << t^d.
inline int degree(const HardyExpr& f) {
  const Signature& s = f.leading().sig;
  if (s.t_exp.sign() <= 0) return 1;
  if (s.t_exp.is_rational()) {
    Rational c = s.t_exp.rational_value();
    if (is_integer(c)) {
      long d = c.get_num().get_si();
      return static_cast<int>(s.log_sign() > 0 ? d + 1 : d);
    }
    return static_cast<int>(floor_div(c).get_si()) + 1;
  }
  // Irrational exponent: ceil of the certified value.
  for (unsigned digits : {64u, 128u, 256u}) {
    Enclosure e = s.t_exp.enclose(digits_to_bits(digits));
    BigFloat lo = e.value - BigFloat(e.error, e.value.precision());
    BigFloat hi = e.value + BigFloat(e.error, e.value.precision());
    if (lo.floor() == hi.floor()) return std::max(1, static_cast<int>(hi.floor().get_si()) + 1);
  }
  throw Error(Errc::precision_exhausted, "cannot certify the degree of " + f.to_string());
}

// ---------------------------------------------------------------------------
// Evaluation

struct EvalResult {
  BigFloat value;
  double error;  // rigorous absolute bound (first-order model, doubled)
};

struct DoubleEval {
  double value;
  double error;
};

/// Compiled evaluator with cached constants per precision.
class GermEvaluator {
 public:
  explicit GermEvaluator(HardyExpr f) : f_(std::move(f)) {
    for (auto& t : f_.terms()) {
      Compiled c;
      Enclosure a = t.coeff.enclose(128);
      c.coeff = a.value.to_double();
      c.coeff_rel_err = a.error / std::max(std::abs(c.coeff), 1e-300);
      Enclosure e = t.sig.t_exp.enclose(128);
      c.t_exp = e.value.to_double();
      c.t_exp_err = t.sig.t_exp.is_rational() ? 0.0 : e.error;
      c.t_exp_rational = t.sig.t_exp.is_rational();
      for (auto& r : t.sig.log_exps) c.log_exps.push_back(r.get_d());
      max_depth_ = std::max(max_depth_, c.log_exps.size());
      compiled_.push_back(std::move(c));
    }
    exact_ok_ = f_.all_rational() && std::all_of(f_.terms().begin(), f_.terms().end(), [](auto& t) {
                  return t.sig.t_exp.is_rational() && !t.sig.has_logs();
                });
  }

  const HardyExpr& expr() const { return f_; }
  std::size_t max_log_depth() const { return max_depth_; }

  /// Double-precision value with a conservative error bound (libm results are
  /// assumed within 2 ulp).
  DoubleEval eval_double(double t) const {
    check_domain(t);
    constexpr double u = 0x1.0p-52;
    if (log_vanishes(t)) {
      double sum = 0, err = 0;
      for (auto& c : compiled_)
        if (c.log_exps.empty() || c.log_exps[0] == 0.0) {
          sum += c.coeff;
          err += std::abs(c.coeff) * (c.coeff_rel_err + 2 * u);
        }
      return {sum, 2.0 * err + std::abs(sum) * u + 1e-300};
    }
    double L[8];
    double Lrel[8];
    std::size_t depth = std::min<std::size_t>(max_depth_, 8);
    double x = t;
    double rel = 0.0;
    for (std::size_t j = 0; j < depth; ++j) {
      double l = std::log(x);
      rel = (rel + 2 * u) / std::abs(l) + 2 * u;
      L[j] = l;
      Lrel[j] = rel;
      x = l;
    }
    double lt = std::log(t);
    double sum = 0.0, abs_sum = 0.0, err = 0.0;
    for (auto& c : compiled_) {
      double v = c.coeff;
      double r = c.coeff_rel_err + 2 * u;
      if (c.t_exp != 0.0) {
        v *= std::pow(t, c.t_exp);
        r += 2 * u * (1 + std::abs(c.t_exp) * lt) + c.t_exp_err * lt;
      }
      for (std::size_t j = 0; j < c.log_exps.size(); ++j) {
        double e = c.log_exps[j];
        if (e == 0.0) continue;
        if (e == 1.0) {
          v *= L[j];
          r += Lrel[j] + u;
        } else {
          v *= std::pow(L[j], e);
          r += std::abs(e) * Lrel[j] + 2 * u * (1 + std::abs(e * std::log(std::abs(L[j]))));
        }
      }
      sum += v;
      abs_sum += std::abs(v);
      err += std::abs(v) * r;
    }
    err += abs_sum * u * static_cast<double>(compiled_.size() + 1);
    return {sum, 2.0 * err + 1e-300};
  }

  /// Multi-precision value at `bits` with a rigorous error bound.
  EvalResult eval(const BigFloat& t, mpfr_prec_t bits) const {
    check_domain(t.to_double());
    auto data = at_precision(bits);
    double u = std::ldexp(1.0, -static_cast<int>(bits) + 1);
    if (log_vanishes(t.to_double())) {
      BigFloat sum(bits);
      double err = 0;
      for (std::size_t k = 0; k < compiled_.size(); ++k)
        if (compiled_[k].log_exps.empty() || compiled_[k].log_exps[0] == 0.0) {
          auto& d = data->terms[k];
          sum += d.coeff;
          err += std::abs(d.coeff.to_double()) * (d.coeff_rel_err + u);
        }
      return {std::move(sum), 2.0 * err + std::abs(sum.to_double()) * u};
    }
    BigFloat tt(bits);
    mpfr_set(tt.get(), t.get(), MPFR_RNDN);
    std::vector<BigFloat> L;
    std::vector<double> Lrel;
    BigFloat x = tt;
    double rel = 0.0;
    for (std::size_t j = 0; j < max_depth_; ++j) {
      BigFloat l = log(x);
      double ld = std::abs(l.to_double());
      rel = (rel + u) / ld + u;
      L.push_back(l);
      Lrel.push_back(rel);
      x = l;
    }
    double lt = std::log(t.to_double());
    BigFloat sum(bits);
    double abs_sum = 0.0, err = 0.0;
    for (std::size_t k = 0; k < compiled_.size(); ++k) {
      auto& c = compiled_[k];
      auto& d = data->terms[k];
      BigFloat v = d.coeff;
      double r = d.coeff_rel_err + u;
      if (c.t_exp != 0.0) {
        v *= pow(tt, d.t_exp);
        r += u * (1 + std::abs(c.t_exp) * lt) + d.t_exp_err * lt;
      }
      for (std::size_t j = 0; j < c.log_exps.size(); ++j) {
        double e = c.log_exps[j];
        if (e == 0.0) continue;
        if (e == 1.0) {
          v *= L[j];
          r += Lrel[j] + u;
        } else {
          v *= pow(L[j], d.log_exps[j]);
          r += std::abs(e) * Lrel[j] + u * (1 + std::abs(e * std::log(std::abs(L[j].to_double()))));
        }
      }
      double vd = std::abs(v.to_double());
      sum += v;
      abs_sum += vd;
      err += vd * r;
    }
    err += abs_sum * u * static_cast<double>(compiled_.size() + 1);
    return {std::move(sum), 2.0 * err};
  }

  EvalResult eval(const BigInt& n, mpfr_prec_t bits) const { return eval(BigFloat(n, bits), bits); }

  /// Exact value when all data are rational and every power of n is rational.
  std::optional<Rational> eval_exact(const BigInt& n) const {
    if (n <= 0) return std::nullopt;
    if (n == 1 && f_.all_rational() &&
        std::none_of(f_.terms().begin(), f_.terms().end(), [](auto& t) { return t.sig.has_logs(); })) {
      Rational one = 0;
      for (auto& t : f_.terms()) one += t.coeff.rational_value();
      return one;
    }
    if (!exact_ok_) return std::nullopt;
    Rational sum = 0;
    for (auto& t : f_.terms()) {
      Rational c = t.sig.t_exp.rational_value();
      BigInt root;
      unsigned long q = c.get_den().get_ui();
      if (n == 1) {
        root = 1;
      } else if (!exact_root(n, q, root)) {
        return std::nullopt;
      }
      BigInt p = c.get_num();
      BigInt pw;
      mpz_pow_ui(pw.get_mpz_t(), root.get_mpz_t(), BigInt(abs(p)).get_ui());
      Rational v = p >= 0 ? Rational(pw) : Rational(BigInt(1), pw);
      sum += t.coeff.rational_value() * v;
    }
    return sum;
  }

 private:
  struct Compiled {
    double coeff = 0, coeff_rel_err = 0, t_exp = 0, t_exp_err = 0;
    bool t_exp_rational = true;
    std::vector<double> log_exps;
  };
  struct PrecTerm {
    BigFloat coeff, t_exp;
    double coeff_rel_err = 0, t_exp_err = 0;
    std::vector<BigFloat> log_exps;
  };
  struct PrecData {
    std::vector<PrecTerm> terms;
  };

  /// At t = 1 a single logarithm level vanishes; terms with a positive power
  /// of log t are then 0.
  bool log_vanishes(double t) const {
    if (t != 1.0 || max_depth_ != 1) return false;
    for (auto& c : compiled_)
      if (!c.log_exps.empty() && c.log_exps[0] < 0)
        throw Error(Errc::domain_error, "negative power of log t at t = 1");
    return true;
  }

  void check_domain(double t) const {
    if (!(t >= 1.0)) throw Error(Errc::precondition_violation, "germ evaluation requires t >= 1");
    if (log_vanishes(t)) return;
    double x = t;
    for (std::size_t j = 0; j < max_depth_; ++j) {
      if (!(x > 0.0)) throw Error(Errc::domain_error, "iterated logarithm not positive at t = " + std::to_string(t));
      x = std::log(x);
      if (x == 0.0) throw Error(Errc::domain_error, "iterated logarithm vanishes at t = " + std::to_string(t));
    }
  }

  std::shared_ptr<const PrecData> at_precision(mpfr_prec_t bits) const {
    std::lock_guard lock(mutex_);
    auto& slot = cache_[bits];
    if (slot) return slot;
    auto data = std::make_shared<PrecData>();
    for (auto& t : f_.terms()) {
      PrecTerm p;
      Enclosure a = t.coeff.enclose(bits);
      p.coeff_rel_err = a.error / std::max(std::abs(a.value.to_double()), 1e-300);
      p.coeff = std::move(a.value);
      Enclosure e = t.sig.t_exp.enclose(bits);
      p.t_exp_err = t.sig.t_exp.is_rational() ? 0.0 : e.error;
      p.t_exp = std::move(e.value);
      for (auto& r : t.sig.log_exps) p.log_exps.emplace_back(r, bits);
      data->terms.push_back(std::move(p));
    }
    slot = data;
    return slot;
  }

  HardyExpr f_;
  std::vector<Compiled> compiled_;
  std::size_t max_depth_ = 0;
  bool exact_ok_ = false;
  mutable std::mutex mutex_;
  mutable std::map<mpfr_prec_t, std::shared_ptr<const PrecData>> cache_;
};

/// One-shot evaluation at `digits` decimal digits.
inline EvalResult eval(const HardyExpr& f, const BigFloat& t, unsigned digits = 64) {
  return GermEvaluator(f).eval(t, digits_to_bits(digits));
}
inline double eval_double(const HardyExpr& f, double t) { return GermEvaluator(f).eval_double(t).value; }

// ---------------------------------------------------------------------------
// Shift t -> t + j by binomial expansion

struct ShiftExpansion {
  HardyExpr expr;
  Rational remainder_coeff;  // |f(t+j) - expr(t)| <= remainder_coeff * t^remainder_exp for t >= 2|j|
  Rational remainder_exp;
};

/// Expands f(t + j) keeping every term with exponent >= min_exp. Only power
/// terms with rational exponent >= -1 are supported; anything else cannot be
/// given a certified remainder.
inline ShiftExpansion shift(const HardyExpr& f, long j, const Rational& min_exp) {
  std::vector<GermTerm> out;
  Rational rem_coeff = 0;
  Rational rem_exp = min_exp;
  for (auto& term : f.terms()) {
    if (term.sig.has_logs() || !term.sig.t_exp.is_rational())
      throw Error(Errc::truncation_uncertified, "shift expansion needs rational power terms: " + f.to_string());
    Rational c = term.sig.t_exp.rational_value();
    if (c < -1) throw Error(Errc::truncation_uncertified, "shift expansion needs exponents >= -1");
    Rational binom = 1;
    Rational jpow = 1;
    for (long k = 0;; ++k) {
      Rational e = c - k;
      if (is_integer(c) && c >= 0 && k > c) break;  // finite binomial
      if (e < min_exp && k > c) {
        // Tail sum_{i>=k} binom(c,i) j^i t^{c-i}: consecutive ratios are at
        // most |j|/t <= 1/2, so the tail is at most twice its first term.
        Enclosure a = term.coeff.enclose(128);
        Rational amag(std::abs(a.value.to_double()) * (1 + 1e-12) + a.error);
        rem_coeff += 2 * abs(binom) * abs(jpow) * amag;
        if (e > rem_exp || rem_coeff == 0) rem_exp = std::max(rem_exp, e);
        break;
      }
      if (binom != 0) out.push_back({term.coeff * Rational(binom * jpow), Signature::power(e)});
      binom = binom * (c - k) / (k + 1);
      jpow *= Rational(j);
    }
  }
  return {HardyExpr(std::move(out), f.basis()), rem_coeff, rem_exp};
}

}  // namespace hfl
