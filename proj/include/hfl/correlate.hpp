#pragma once

// Weighted averaging engine: certified rounding of germ values, discrete
// weights w = W(n+1) - W(n), chunked weighted averages, multicorrelation
// sequences and the finite-N diagnostics built on them.

#include <hfl/germ_analysis.hpp>
#include <hfl/parallel.hpp>
#include <hfl/systems.hpp>

#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hfl {

// ---------------------------------------------------------------------------
// Rounding

enum class RoundingMode { Floor, Ceil, Nearest };

inline const char* to_string(RoundingMode m) {
  switch (m) {
    case RoundingMode::Floor: return "floor";
    case RoundingMode::Ceil: return "ceil";
    case RoundingMode::Nearest: return "nearest";
  }
  return "?";
}

inline RoundingMode parse_rounding_mode(const std::string& s) {
  if (s == "floor") return RoundingMode::Floor;
  if (s == "ceil") return RoundingMode::Ceil;
  if (s == "nearest") return RoundingMode::Nearest;
  throw Error(Errc::schema_error, "unknown rounding mode '" + s + "' (expected floor, ceil or nearest)");
}

/// Exact rounding of a rational: Nearest(x) = Floor(x + 1/2), Ceil(x) = -Floor(-x).
inline BigInt round_rational(const Rational& x, RoundingMode mode) {
  switch (mode) {
    case RoundingMode::Floor: return floor_div(x);
    case RoundingMode::Ceil: return -floor_div(Rational(-x));
    case RoundingMode::Nearest: return floor_div(Rational(x + Rational(1, 2)));
  }
  return 0;
}

inline constexpr unsigned default_digits = 64;
inline constexpr unsigned max_digits = 512;

/// Largest digit count any multiprecision rounding in this process needed.
inline std::atomic<unsigned>& precision_peak() {
  static std::atomic<unsigned> peak{0};
  return peak;
}

inline void note_precision(unsigned digits) {
  auto& p = precision_peak();
  unsigned cur = p.load();
  while (digits > cur && !p.compare_exchange_weak(cur, digits)) {
  }
}

/// Germ compiled for repeated certified rounding at integer arguments.
class Rounder {
 public:
  explicit Rounder(HardyExpr f, unsigned start_digits = default_digits)
      : eval_(std::make_shared<GermEvaluator>(std::move(f))), start_digits_(start_digits) {}

  const HardyExpr& expr() const { return eval_->expr(); }

  /// The integer Floor/Ceil/Nearest of f(n), certified by the evaluation
  /// error bound: double fast path, exact rational path, then multiprecision
  /// with doubling digits up to 512.
  std::int64_t operator()(std::uint64_t n, RoundingMode mode) const {
    if (n < 1) throw Error(Errc::precondition_violation, "round_value requires n >= 1");
    auto nd = static_cast<double>(n);
    if (n < (1ULL << 53)) {
      DoubleEval d = eval_->eval_double(nd);
      if (auto r = from_double(d.value, d.error, mode)) return *r;
    }
    if (auto q = eval_->eval_exact(BigInt(static_cast<unsigned long>(n)))) return to_int64(round_rational(*q, mode));
    BigInt nb(static_cast<unsigned long>(n));
    unsigned digits = std::max(1u, start_digits_);
    double last_err = 0;
    for (;;) {
      mpfr_prec_t bits = digits_to_bits(digits);
      EvalResult r = eval_->eval(nb, bits);
      BigFloat y = r.value;
      if (mode == RoundingMode::Nearest) y += BigFloat(0.5, bits);
      if (mode == RoundingMode::Ceil) y = -y;
      BigFloat slack = abs(y) * BigFloat::pow2(-static_cast<long>(bits) + 2, bits) + BigFloat(r.error * (1 + 1e-9), bits);
      BigInt lo = (y - slack).floor(), hi = (y + slack).floor();
      note_precision(digits);
      if (lo == hi) return to_int64(mode == RoundingMode::Ceil ? BigInt(-lo) : lo);
      last_err = r.error;
      if (digits >= max_digits) break;
      digits = std::min(max_digits, digits * 2);
    }
    throw Error(Errc::uncertifiable_rounding,
                "f(" + std::to_string(n) + ") for f = " + expr().to_string() + " is within " + std::to_string(last_err) +
                    " of a rounding boundary at " + std::to_string(max_digits) + " digits");
  }

 private:
  static std::optional<std::int64_t> from_double(double v, double err, RoundingMode mode) {
    if (!std::isfinite(v) || std::abs(v) >= 0x1.0p50) return std::nullopt;
    double y = v;
    if (mode == RoundingMode::Nearest) y += 0.5;  // exact below 2^52
    if (mode == RoundingMode::Ceil) y = -y;
    double e = err + std::abs(y) * 0x1.0p-50;
    double lo = std::floor(y - e), hi = std::floor(y + e);
    if (lo != hi) return std::nullopt;
    auto r = static_cast<std::int64_t>(lo);
    return mode == RoundingMode::Ceil ? -r : r;
  }
  static std::int64_t to_int64(const BigInt& z) {
    if (!z.fits_slong_p()) throw Error(Errc::domain_error, "rounded value " + z.get_str() + " exceeds 64 bits");
    return z.get_si();
  }

  std::shared_ptr<GermEvaluator> eval_;
  unsigned start_digits_;
};

inline std::int64_t round_value(const HardyExpr& f, std::uint64_t n, RoundingMode mode,
                                unsigned start_digits = default_digits) {
  return Rounder(f, start_digits)(n, mode);
}

/// Rounds every member of a family at the same n.
class FamilyRounder {
 public:
  FamilyRounder(const Family& F, RoundingMode mode, unsigned start_digits = default_digits) : mode_(mode) {
    for (auto& f : F) r_.emplace_back(f, start_digits);
  }
  std::size_t size() const { return r_.size(); }
  RoundingMode mode() const { return mode_; }
  std::vector<std::int64_t> operator()(std::uint64_t n) const {
    std::vector<std::int64_t> out(r_.size());
    for (std::size_t i = 0; i < r_.size(); ++i) out[i] = r_[i](n, mode_);
    return out;
  }

 private:
  std::vector<Rounder> r_;
  RoundingMode mode_;
};

// ---------------------------------------------------------------------------
// Weights

/// W evaluated in extended precision and its discrete derivative
/// w(n) = max(0, W(n+1) - W(n)); points where W is undefined contribute 0.
class WeightFn {
 public:
  explicit WeightFn(Weight W) : W_(std::move(W)) {
    W_.check_growth();
    if (W_.kind == Weight::Kind::Germ) {
      for (auto& t : W_.germ.terms()) {
        Term c;
        c.coeff = static_cast<long double>(t.coeff.to_double());
        c.t_exp = static_cast<long double>(t.sig.t_exp.to_double());
        for (auto& r : t.sig.log_exps) c.logs.push_back(static_cast<long double>(r.get_d()));
        depth_ = std::max(depth_, c.logs.size());
        terms_.push_back(std::move(c));
      }
      // Affine W = a t + b has the exact constant derivative a.
      bool affine = W_.germ.is_polynomial() && W_.germ.all_rational() && W_.germ.leading().sig.poly_degree() <= 1;
      if (affine) affine_slope_ = W_.germ.poly_coeff(1).to_double();
    }
  }

  const Weight& weight() const { return W_; }
  const std::string& name() const { return W_.name; }

  long double W(long double t) const {
    if (W_.kind == Weight::Kind::ExpSqrtLog) {
      long double l = std::log(t);
      return l < 0 ? std::numeric_limits<long double>::quiet_NaN() : std::exp(std::sqrt(l));
    }
    long double L[8];
    long double x = t;
    for (std::size_t j = 0; j < std::min<std::size_t>(depth_, 8); ++j) {
      x = std::log(x);
      L[j] = x;
    }
    long double s = 0;
    for (auto& c : terms_) {
      long double v = c.coeff;
      if (c.t_exp != 0) v *= std::pow(t, c.t_exp);
      for (std::size_t j = 0; j < c.logs.size(); ++j)
        if (c.logs[j] != 0) v *= std::pow(L[j], c.logs[j]);
      s += v;
    }
    return s;
  }

  double w(std::uint64_t n) const {
    if (affine_slope_) return std::max(0.0, *affine_slope_);
    auto t = static_cast<long double>(n);
    long double d = W(t + 1) - W(t);
    if (!std::isfinite(d) || d < 0) return 0.0;
    return static_cast<double>(d);
  }

 private:
  struct Term {
    long double coeff = 0, t_exp = 0;
    std::vector<long double> logs;
  };
  Weight W_;
  std::vector<Term> terms_;
  std::size_t depth_ = 0;
  std::optional<double> affine_slope_;
};

// ---------------------------------------------------------------------------
// Weighted averages

struct SeqValue {
  std::complex<double> v;
  double var = 0;  // variance of a sampled estimate, 0 when exact
};

/// A pure function of n >= 1.
using Sequence = std::function<SeqValue(std::uint64_t)>;

struct CorrelationReport {
  std::vector<std::uint64_t> grid;
  std::vector<std::complex<double>> averages;
  std::vector<double> weight_totals;
  std::vector<double> std_errors;
  std::string mode;
  std::string weight;
  std::string engine = "exact";
};

struct AvgOptions {
  unsigned threads = 1;
};

/// (1/P_N) sum_{n<=N} w(n) a(n) with P_N = sum_{n<=N} w(n), at every grid
/// point. Chunks are summed with compensation and reduced in order.
inline CorrelationReport weighted_avg(const Sequence& a, const WeightFn& W, std::vector<std::uint64_t> grid,
                                      const AvgOptions& opt = {}) {
  if (grid.empty()) throw Error(Errc::precondition_violation, "empty N grid");
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] < 1 || (i && grid[i] <= grid[i - 1]))
      throw Error(Errc::precondition_violation, "N grid must be positive and strictly ascending");
  struct Acc {
    ComplexSum s;
    CompensatedSum wsum, var;
  };
  auto chunks = make_chunks(1, grid.back(), grid);
  auto parts = run_chunks<Acc>(chunks, opt.threads, [&](const Chunk& c) {
    Acc acc;
    for (std::uint64_t n = c.begin; n <= c.end; ++n) {
      double wn = W.w(n);
      if (wn == 0) continue;
      SeqValue x = a(n);
      acc.s.add(wn * x.v);
      acc.wsum.add(wn);
      if (x.var != 0) acc.var.add(wn * wn * x.var);
    }
    return acc;
  });
  CorrelationReport rep;
  rep.grid = grid;
  rep.weight = W.name();
  Acc total;
  std::size_t g = 0;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    total.s.merge(parts[i].s);
    total.wsum.merge(parts[i].wsum);
    total.var.merge(parts[i].var);
    if (g < grid.size() && chunks[i].end == grid[g]) {
      double P = total.wsum.value();
      rep.weight_totals.push_back(P);
      rep.averages.push_back(P > 0 ? total.s.value() / P : std::complex<double>(0));
      rep.std_errors.push_back(P > 0 ? std::sqrt(std::max(0.0, total.var.value())) / P : 0.0);
      ++g;
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Multicorrelation sequences

struct CyclicSubset {
  std::vector<std::uint64_t> elements;
};

using EventSet = std::variant<CyclicSubset, BoxSet>;

/// mu(A ∩ T^{-k_1}A ∩ ... ∩ T^{-k_r}A) for a cyclic rotation, exactly.
inline double alpha_cyclic(const CyclicRotation& sys, const std::vector<bool>& member,
                           const std::vector<std::uint64_t>& elements, const std::vector<std::int64_t>& k) {
  std::vector<std::uint64_t> shift(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) shift[i] = sys.power(0, k[i]);
  std::uint64_t count = 0;
  for (auto x : elements) {
    bool in = true;
    for (auto s : shift) {
      std::uint64_t y = x + s;
      if (y >= sys.m) y -= sys.m;
      if (!member[y]) {
        in = false;
        break;
      }
    }
    if (in) ++count;
  }
  return static_cast<double>(count) / static_cast<double>(sys.m);
}

/// Exact intersection measure for a torus rotation.
inline IntersectionMeasure alpha_torus(const System& sys, const BoxSet& A, const std::vector<std::int64_t>& k) {
  std::vector<BoxSet> boxes{A};
  for (auto ki : k) boxes.push_back(preimage_box(sys, A, ki));
  return measure_intersection_exact(boxes);
}

/// Sampled estimate of mu(A ∩ T^{-k_1}A ∩ ...) for any phase system. With
/// `stratified` and dimension 2 the samples are one per cell of a G x G grid.
inline SeqValue alpha_sampled(const System& sys, const BoxSet& A, const std::vector<std::int64_t>& k,
                              std::uint64_t samples, std::uint64_t seed, bool stratified) {
  std::size_t d = dimension(sys);
  if (d == 0 || A.size() != d) throw Error(Errc::precondition_violation, "sampled engine needs a box of matching dimension");
  std::uint64_t G = 0;
  if (stratified && d == 2) {
    G = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(samples)));
    G = std::max<std::uint64_t>(G, 1);
    samples = G * G;
  }
  std::uint64_t hits = 0;
  Point x{0, std::vector<Phase>(d)};
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < d; ++i) {
      double u = counter_uniform(seed, s * d + i);
      if (G) u = (static_cast<double>(i == 0 ? s / G : s % G) + u) / static_cast<double>(G);
      x.coords[i] = Phase::from_double(u);
    }
    if (!box_contains(A, x.coords)) continue;
    bool in = true;
    for (auto ki : k)
      if (!box_contains(A, apply_power(sys, x, ki).coords)) {
        in = false;
        break;
      }
    if (in) ++hits;
  }
  double p = static_cast<double>(hits) / static_cast<double>(samples);
  return {p, p * (1 - p) / static_cast<double>(samples)};
}

struct MulticorrOptions {
  unsigned threads = 1;
  unsigned digits = default_digits;
  std::uint64_t samples = 4096;  // per n, sampled engine
  std::uint64_t seed = 0;
};

/// The multicorrelation a(n) = mu(A ∩ T^{-[f_1(n)]}A ∩ ...) as a sequence.
inline Sequence multicorrelation_sequence(const System& sys, const EventSet& A, const Family& F, RoundingMode mode,
                                          const MulticorrOptions& opt = {}) {
  if (F.empty()) throw Error(Errc::precondition_violation, "multicorrelation needs a nonempty family");
  auto rounder = std::make_shared<FamilyRounder>(F, mode, opt.digits);
  if (auto* cyc = std::get_if<CyclicRotation>(&sys)) {
    auto* sub = std::get_if<CyclicSubset>(&A);
    if (!sub) throw Error(Errc::wrong_variant, "cyclic systems take a residue subset");
    auto member = std::make_shared<std::vector<bool>>(cyc->m, false);
    for (auto x : sub->elements) {
      if (x >= cyc->m) throw Error(Errc::precondition_violation, "subset element outside Z_m");
      (*member)[x] = true;
    }
    std::vector<std::uint64_t> elems;
    for (std::uint64_t x = 0; x < cyc->m; ++x)
      if ((*member)[x]) elems.push_back(x);
    auto e = std::make_shared<std::vector<std::uint64_t>>(std::move(elems));
    CyclicRotation c = *cyc;
    return [=](std::uint64_t n) -> SeqValue {
      if (e->empty()) return {0.0};
      return {alpha_cyclic(c, *member, *e, (*rounder)(n))};
    };
  }
  auto* box = std::get_if<BoxSet>(&A);
  if (!box) throw Error(Errc::wrong_variant, "phase systems take a box set");
  if (box->size() != dimension(sys)) throw Error(Errc::precondition_violation, "box dimension mismatch");
  BoxSet B = *box;
  if (std::holds_alternative<TorusRotation>(sys))
    return [=](std::uint64_t n) -> SeqValue { return {alpha_torus(sys, B, (*rounder)(n)).value}; };
  std::uint64_t samples = opt.samples, seed = opt.seed;
  return [=](std::uint64_t n) -> SeqValue {
    return alpha_sampled(sys, B, (*rounder)(n), samples, mix64(seed ^ mix64(n)), true);
  };
}

inline CorrelationReport multicorrelation(const System& sys, const EventSet& A, const Family& F, RoundingMode mode,
                                          const WeightFn& W, const std::vector<std::uint64_t>& grid,
                                          const MulticorrOptions& opt = {}) {
  auto seq = multicorrelation_sequence(sys, A, F, mode, opt);
  CorrelationReport rep = weighted_avg(seq, W, grid, {opt.threads});
  rep.mode = to_string(mode);
  rep.engine = std::holds_alternative<QuadraticSkew>(sys) ? "sampled" : "exact";
  return rep;
}

// ---------------------------------------------------------------------------
// Diagnostics

struct ProductLimitReport {
  std::complex<double> average;
  std::complex<double> projection;
  double distance = 0;
};

/// Weighted average of prod_i h_i(T^{[f_i(n)]} x) against prod_i of the
/// Birkhoff projections of h_i at x.
inline ProductLimitReport product_limit_test(const System& sys, const std::vector<Observable>& h, const Family& F,
                                             RoundingMode mode, const WeightFn& W, std::uint64_t N, const Point& x,
                                             unsigned threads = 1, unsigned digits = default_digits) {
  if (h.size() != F.size()) throw Error(Errc::precondition_violation, "one observable per family member");
  auto rounder = std::make_shared<FamilyRounder>(F, mode, digits);
  Sequence a = [&, rounder](std::uint64_t n) -> SeqValue {
    auto k = (*rounder)(n);
    std::complex<double> p = 1.0;
    for (std::size_t i = 0; i < h.size(); ++i) p *= observe(h[i], apply_power(sys, x, k[i]));
    return {p};
  };
  ProductLimitReport r;
  r.average = weighted_avg(a, W, {N}, {threads}).averages[0];
  r.projection = 1.0;
  for (auto& hi : h) r.projection *= birkhoff_projection(sys, hi, x, N);
  r.distance = std::abs(r.average - r.projection);
  return r;
}

struct VdcReport {
  double lhs = 0, rhs = 0, gap = 0;
};

/// lhs = |(1/P_N) sum p_n u(n)|^2 and rhs = |(1/H) sum_{m=1}^H (1/P_N) sum p_n
/// <u(n+m), u(n)>| for n = 1..N, where N = p.size() and u holds u(1..N+H).
inline VdcReport vdc_check(const std::vector<std::complex<double>>& u, const std::vector<double>& p, std::size_t H) {
  std::size_t N = p.size();
  if (H < 1 || N < 1) throw Error(Errc::precondition_violation, "vdc_check needs N, H >= 1");
  if (u.size() < N + H) throw Error(Errc::precondition_violation, "u must hold N + H terms");
  CompensatedSum P;
  ComplexSum s;
  for (std::size_t n = 0; n < N; ++n) {
    P.add(p[n]);
    s.add(p[n] * u[n]);
  }
  double PN = P.value();
  if (!(PN > 0)) throw Error(Errc::precondition_violation, "weights must have positive total");
  VdcReport r;
  r.lhs = std::norm(s.value() / PN);
  ComplexSum outer;
  for (std::size_t m = 1; m <= H; ++m) {
    ComplexSum c;
    for (std::size_t n = 0; n < N; ++n) c.add(p[n] * u[n + m] * std::conj(u[n]));
    outer.add(c.value() / PN);
  }
  r.rhs = std::abs(outer.value() / static_cast<double>(H));
  r.gap = r.rhs - r.lhs;
  return r;
}

struct PartitionRow {
  std::uint64_t j = 0;
  std::uint64_t size = 0;  // |K_j|
  double p = 0;            // sum of w over K_j
  double P = 0;            // sum_{i <= j} p_i
  double ratio1 = 0;       // (W(g^-1(j+1)) - W(g^-1(j))) / p_j
  double ratio2 = 0;       // W(g^-1(j)) / P_j
  double ratio4 = 0;       // p_j / P_j
};

struct PartitionReport {
  std::vector<PartitionRow> rows;  // complete K_j only
};

/// K_j = {n : j-1 < g(n) <= j} for n <= N and the weight sums over them.
inline PartitionReport partition_weights(const WeightFn& W, const HardyExpr& g, std::uint64_t N,
                                         unsigned digits = default_digits) {
  if (!prec(W.weight().log_germ(), g) || !ll(g, HardyExpr::power(1)))
    throw Error(Errc::precondition_violation, "partition_weights needs log W < g << t");
  if (g.leading().coeff.sign() <= 0) throw Error(Errc::precondition_violation, "g must be eventually positive");
  Rounder ceil_g(g, digits);
  GermEvaluator ge(g);
  std::int64_t J = ceil_g(N + 1, RoundingMode::Ceil) - 1;  // K_j complete for j <= J
  PartitionReport rep;
  if (J < 1) return rep;
  std::vector<CompensatedSum> p(static_cast<std::size_t>(J) + 1);
  std::vector<std::uint64_t> size(static_cast<std::size_t>(J) + 1, 0);
  for (std::uint64_t n = 1; n <= N; ++n) {
    std::int64_t j = ceil_g(n, RoundingMode::Ceil);
    if (j < 1 || j > J) continue;
    p[static_cast<std::size_t>(j)].add(W.w(n));
    ++size[static_cast<std::size_t>(j)];
  }
  // g^{-1}(y) by bisection on the double evaluation of g.
  auto ginv = [&](double y) {
    double lo = 1, hi = 2;
    while (ge.eval_double(hi).value < y) hi *= 2;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
      double mid = 0.5 * (lo + hi);
      (ge.eval_double(mid).value < y ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  CompensatedSum P;
  for (std::int64_t j = 1; j <= J; ++j) {
    auto ju = static_cast<std::size_t>(j);
    PartitionRow r;
    r.j = static_cast<std::uint64_t>(j);
    r.size = size[ju];
    r.p = p[ju].value();
    P.add(r.p);
    r.P = P.value();
    auto Wd = [&](double y) { return static_cast<double>(W.W(static_cast<long double>(ginv(y)))); };
    double Wj = Wd(static_cast<double>(j)), Wj1 = Wd(static_cast<double>(j + 1));
    r.ratio1 = r.p > 0 ? (Wj1 - Wj) / r.p : std::numeric_limits<double>::quiet_NaN();
    r.ratio2 = r.P > 0 ? Wj / r.P : std::numeric_limits<double>::quiet_NaN();
    r.ratio4 = r.P > 0 ? r.p / r.P : std::numeric_limits<double>::quiet_NaN();
    rep.rows.push_back(r);
  }
  return rep;
}

/// |avg_{n<=RN} a(n) - (1/R) sum_{d<R} avg_{n<=N} a(Rn+d)| with W-averages.
inline double ap_decomposition_check(const Sequence& a, const WeightFn& W, std::uint64_t R, std::uint64_t N,
                                     unsigned threads = 1) {
  if (R < 1 || N < 1) throw Error(Errc::precondition_violation, "ap_decomposition_check needs R, N >= 1");
  std::complex<double> full = weighted_avg(a, W, {R * N}, {threads}).averages[0];
  ComplexSum sub;
  for (std::uint64_t d = 0; d < R; ++d) {
    Sequence ad = [&, d](std::uint64_t n) { return a(R * n + d); };
    sub.add(weighted_avg(ad, W, {N}, {threads}).averages[0]);
  }
  return std::abs(full - sub.value() / static_cast<double>(R));
}

}  // namespace hfl
