#pragma once

// Integer sets, configuration search {a, a+[f_1(n)], ..., a+[f_k(n)]},
// density estimates and return sets.

#include <hfl/correlate.hpp>

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace hfl {

/// A subset of the positive integers with a pure membership test.
class IntegerSet {
 public:
  enum class Kind { All, Explicit, Odds, Bohr, Predicate };

  static IntegerSet all() { return IntegerSet(Kind::All, "all"); }
  static IntegerSet odds() { return IntegerSet(Kind::Odds, "odds"); }

  /// Elements above n_max are ignored.
  static IntegerSet explicit_set(std::vector<std::uint64_t> elems, std::uint64_t n_max) {
    IntegerSet s(Kind::Explicit, "explicit");
    s.n_max_ = n_max;
    s.bits_ = std::make_shared<std::vector<bool>>(n_max + 1, false);
    for (auto x : elems)
      if (x >= 1 && x <= n_max) (*s.bits_)[x] = true;
    return s;
  }

  /// {n : {n alpha_i} in [lo_i, hi_i) for every i}, arcs may wrap.
  static IntegerSet bohr(const std::vector<BigFloat>& alpha, const std::vector<std::pair<Rational, Rational>>& windows) {
    if (alpha.empty() || alpha.size() != windows.size())
      throw Error(Errc::precondition_violation, "Bohr set needs one window per constant");
    IntegerSet s(Kind::Bohr, "bohr");
    auto b = std::make_shared<BohrData>();
    for (std::size_t i = 0; i < alpha.size(); ++i) {
      BigFloat a(320);
      mpfr_set(a.get(), alpha[i].get(), MPFR_RNDN);
      b->phase.push_back(Phase::from_real(a));
      b->alpha.push_back(std::move(a));
      b->arcs.push_back(Arc::from_rationals(windows[i].first, windows[i].second));
      b->lo.push_back(windows[i].first);
      b->len.push_back(windows[i].second - windows[i].first);
    }
    s.bohr_ = std::move(b);
    return s;
  }

  static IntegerSet predicate(std::string name, std::function<bool(std::uint64_t)> rule) {
    IntegerSet s(Kind::Predicate, std::move(name));
    s.rule_ = std::move(rule);
    return s;
  }

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }

  bool contains(std::int64_t x) const {
    if (x < 1) return false;
    auto u = static_cast<std::uint64_t>(x);
    switch (kind_) {
      case Kind::All: return true;
      case Kind::Odds: return (u & 1) == 1;
      case Kind::Explicit: return u <= n_max_ && (*bits_)[u];
      case Kind::Predicate: return rule_(u);
      case Kind::Bohr:
        for (std::size_t i = 0; i < bohr_->arcs.size(); ++i)
          if (!bohr_member(i, u)) return false;
        return true;
    }
    return false;
  }

  /// Members in [lo, hi], ascending.
  std::vector<std::uint64_t> members(std::uint64_t lo, std::uint64_t hi) const {
    std::vector<std::uint64_t> out;
    lo = std::max<std::uint64_t>(lo, 1);
    if (kind_ == Kind::Explicit) hi = std::min(hi, n_max_);
    for (std::uint64_t x = lo; x <= hi; ++x)
      if (contains(static_cast<std::int64_t>(x))) out.push_back(x);
    return out;
  }

  /// Necessary condition for a and a + d both lying in a Bohr set.
  bool bohr_difference_possible(std::int64_t d) const {
    if (kind_ != Kind::Bohr) return true;
    for (std::size_t i = 0; i < bohr_->arcs.size(); ++i) {
      const Arc& arc = bohr_->arcs[i];
      if (arc.full) continue;
      double dist = bohr_->phase[i].times(d).norm();
      double slack = (std::abs(static_cast<double>(d)) + 8) * phase_ulp;
      if (dist >= arc.measure() + slack) return false;
    }
    return true;
  }

 private:
  struct BohrData {
    std::vector<BigFloat> alpha;
    std::vector<Phase> phase;
    std::vector<Arc> arcs;
    std::vector<Rational> lo, len;
  };

  IntegerSet(Kind k, std::string name) : kind_(k), name_(std::move(name)) {}

  bool bohr_member(std::size_t i, std::uint64_t x) const {
    const Arc& arc = bohr_->arcs[i];
    if (arc.full) return true;
    Phase p = bohr_->phase[i].times(static_cast<std::int64_t>(x));
    u128 off = (p - arc.start).bits;
    u128 margin = static_cast<u128>(x) + 8;
    bool near = off < margin || static_cast<u128>(0) - off < margin ||
                (off > arc.length ? off - arc.length : arc.length - off) < margin;
    if (!near) return off < arc.length;
    // Close to an endpoint: decide from the 320-bit value of x alpha.
    BigFloat y = frac(BigFloat(BigInt(static_cast<unsigned long>(x)), 320) * bohr_->alpha[i] -
                      BigFloat(bohr_->lo[i], 320));
    BigFloat len(bohr_->len[i], 320);
    BigFloat eps = BigFloat::pow2(-300, 320);
    if (abs(y) < eps || abs(y - BigFloat(1.0, 320)) < eps || abs(y - len) < eps)
      throw Error(Errc::uncertifiable_rounding, "Bohr membership of " + std::to_string(x) + " is on a window boundary");
    return y < len;
  }

  Kind kind_;
  std::string name_;
  std::uint64_t n_max_ = 0;
  std::shared_ptr<std::vector<bool>> bits_;
  std::shared_ptr<BohrData> bohr_;
  std::function<bool(std::uint64_t)> rule_;
};

// ---------------------------------------------------------------------------
// Pattern search

struct PatternWitness {
  std::uint64_t a = 0;
  std::uint64_t n = 0;
  std::vector<std::int64_t> offsets;
};

struct PatternSearchResult {
  std::optional<PatternWitness> witness;
  std::uint64_t n_min = 1, n_max = 0, a_max = 0;
};

/// Offsets [f_i(n)] as a function of n.
using OffsetFn = std::function<std::vector<std::int64_t>(std::uint64_t)>;

/// Least a in [1, a_max] with a and every a + k_i in E.
inline std::optional<std::uint64_t> first_base(const IntegerSet& E, const std::vector<std::int64_t>& k,
                                               std::uint64_t a_max, const std::vector<std::uint64_t>* members = nullptr) {
  std::int64_t kmin = 0;
  for (auto x : k) kmin = std::min(kmin, x);
  std::int64_t lo_signed = std::max<std::int64_t>(1, 1 - kmin);
  if (static_cast<std::uint64_t>(lo_signed) > a_max) return std::nullopt;
  auto lo = static_cast<std::uint64_t>(lo_signed);
  switch (E.kind()) {
    case IntegerSet::Kind::All: return lo;
    case IntegerSet::Kind::Odds: {
      for (auto x : k)
        if (x % 2 != 0) return std::nullopt;
      std::uint64_t a = lo | 1;
      return a <= a_max ? std::optional<std::uint64_t>(a) : std::nullopt;
    }
    default: break;
  }
  if (E.kind() == IntegerSet::Kind::Bohr) {
    for (std::size_t i = 0; i < k.size(); ++i) {
      if (!E.bohr_difference_possible(k[i])) return std::nullopt;
      for (std::size_t j = 0; j < i; ++j)
        if (!E.bohr_difference_possible(k[i] - k[j])) return std::nullopt;
    }
  }
  std::vector<std::uint64_t> local;
  if (!members) {
    local = E.members(lo, a_max);
    members = &local;
  }
  for (auto it = std::lower_bound(members->begin(), members->end(), lo); it != members->end() && *it <= a_max; ++it) {
    auto a = static_cast<std::int64_t>(*it);
    if (std::all_of(k.begin(), k.end(), [&](std::int64_t x) { return E.contains(a + x); })) return *it;
  }
  return std::nullopt;
}

/// First (n, a) in lexicographic order with {a, a + k_1(n), ...} in E.
inline PatternSearchResult find_pattern_offsets(const IntegerSet& E, const OffsetFn& offsets, std::uint64_t n_min,
                                                std::uint64_t n_max, std::uint64_t a_max, unsigned threads = 1) {
  if (n_min < 1) throw Error(Errc::precondition_violation, "pattern search needs n >= 1");
  PatternSearchResult res;
  res.n_min = n_min;
  res.n_max = n_max;
  res.a_max = a_max;
  bool enumerate = E.kind() != IntegerSet::Kind::All && E.kind() != IntegerSet::Kind::Odds;
  std::vector<std::uint64_t> members;
  if (enumerate) members = E.members(1, a_max);
  struct Outcome {
    std::optional<PatternWitness> w;
    std::exception_ptr err;
  };
  auto chunks = make_chunks(n_min, n_max);
  std::atomic<std::size_t> best{std::numeric_limits<std::size_t>::max()};
  auto parts = run_chunks<Outcome>(chunks, threads, [&](const Chunk& c) {
    Outcome o;
    auto idx = static_cast<std::size_t>(&c - chunks.data());
    if (idx > best.load()) return o;
    try {
      for (std::uint64_t n = c.begin; n <= c.end; ++n) {
        auto k = offsets(n);
        if (auto a = first_base(E, k, a_max, enumerate ? &members : nullptr)) {
          o.w = PatternWitness{*a, n, std::move(k)};
          break;
        }
      }
    } catch (...) {
      o.err = std::current_exception();
    }
    if (o.w || o.err) {
      std::size_t cur = best.load();
      while (idx < cur && !best.compare_exchange_weak(cur, idx)) {
      }
    }
    return o;
  });
  for (auto& o : parts) {
    if (o.err) std::rethrow_exception(o.err);
    if (o.w) {
      auto a = static_cast<std::int64_t>(o.w->a);
      if (!E.contains(a) || !std::all_of(o.w->offsets.begin(), o.w->offsets.end(),
                                         [&](std::int64_t x) { return E.contains(a + x); }))
        throw Error(Errc::precondition_violation, "pattern witness failed re-verification");
      res.witness = o.w;
      break;
    }
  }
  return res;
}

inline PatternSearchResult find_pattern(const IntegerSet& E, const Family& F, RoundingMode mode, std::uint64_t n_min,
                                        std::uint64_t n_max, std::uint64_t a_max, unsigned threads = 1,
                                        unsigned digits = default_digits) {
  auto r = std::make_shared<FamilyRounder>(F, mode, digits);
  return find_pattern_offsets(E, [r](std::uint64_t n) { return (*r)(n); }, n_min, n_max, a_max, threads);
}

/// |E ∩ [1, N]| / N at every grid point.
inline std::vector<double> upper_density_estimate(const IntegerSet& E, const std::vector<std::uint64_t>& grid) {
  std::vector<double> out;
  std::uint64_t count = 0, n = 0;
  for (auto N : grid) {
    if (N < n) throw Error(Errc::precondition_violation, "N grid must be ascending");
    for (; n < N; ++n)
      if (E.contains(static_cast<std::int64_t>(n + 1))) ++count;
    out.push_back(N ? static_cast<double>(count) / static_cast<double>(N) : 0.0);
  }
  return out;
}

/// {n <= N : mu(A ∩ T^{-[f_1(n)]}A ∩ ...) > 0} with an exact engine.
inline std::vector<std::uint64_t> return_set(const System& sys, const EventSet& A, const Family& F, RoundingMode mode,
                                             std::uint64_t N, unsigned threads = 1, unsigned digits = default_digits) {
  if (std::holds_alternative<QuadraticSkew>(sys))
    throw Error(Errc::wrong_variant, "return sets need an exact engine (cyclic or torus)");
  MulticorrOptions opt;
  opt.digits = digits;
  Sequence a = multicorrelation_sequence(sys, A, F, mode, opt);
  auto parts = run_chunks<std::vector<std::uint64_t>>(make_chunks(1, N), threads, [&](const Chunk& c) {
    std::vector<std::uint64_t> v;
    for (std::uint64_t n = c.begin; n <= c.end; ++n)
      if (a(n).v.real() > 0) v.push_back(n);
    return v;
  });
  std::vector<std::uint64_t> out;
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

/// For each window length L: max over M in [1, N - L + 1] of |R ∩ [M, M+L)| / L.
inline std::vector<double> banach_density_probe(const std::vector<std::uint64_t>& R, std::uint64_t N,
                                                const std::vector<std::uint64_t>& windows) {
  std::vector<std::uint64_t> prefix(N + 1, 0);  // prefix[x] = |R ∩ [1, x]|
  for (auto r : R)
    if (r >= 1 && r <= N) prefix[r] = 1;
  for (std::uint64_t x = 1; x <= N; ++x) prefix[x] += prefix[x - 1];
  std::vector<double> out;
  for (auto L : windows) {
    if (L < 1 || L > N) throw Error(Errc::precondition_violation, "window length must be in [1, N]");
    std::uint64_t best = 0;
    for (std::uint64_t M = 1; M + L - 1 <= N; ++M) best = std::max(best, prefix[M + L - 1] - prefix[M - 1]);
    out.push_back(static_cast<double>(best) / static_cast<double>(L));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shifted families

/// Offsets [f_i(n + j)] for i = 1..k, j = 0..l, evaluated directly.
inline OffsetFn shifted_offsets(const Family& F, int l, RoundingMode mode, unsigned digits = default_digits) {
  if (l < 0) throw Error(Errc::precondition_violation, "shift length must be >= 0");
  auto r = std::make_shared<FamilyRounder>(F, mode, digits);
  return [r, l](std::uint64_t n) {
    std::vector<std::int64_t> out;
    for (int j = 0; j <= l; ++j) {
      auto k = (*r)(n + static_cast<std::uint64_t>(j));
      out.insert(out.end(), k.begin(), k.end());
    }
    // Reorder to f_1(n), f_1(n+1), ..., f_2(n), ...
    std::size_t K = out.size() / static_cast<std::size_t>(l + 1);
    std::vector<std::int64_t> ordered;
    for (std::size_t i = 0; i < K; ++i)
      for (int j = 0; j <= l; ++j) ordered.push_back(out[static_cast<std::size_t>(j) * K + i]);
    return ordered;
  };
}

inline PatternSearchResult cor_a4_probe(const Family& F, int l, const IntegerSet& E, RoundingMode mode,
                                        std::uint64_t n_min, std::uint64_t n_max, std::uint64_t a_max,
                                        unsigned threads = 1, unsigned digits = default_digits) {
  return find_pattern_offsets(E, shifted_offsets(F, l, mode, digits), n_min, n_max, a_max, threads);
}

/// sum_m coeff_m f_{i_m}(t + j_m).
struct ShiftTerm {
  std::size_t function;
  long shift;
  Rational coeff;
};

struct ShiftedCombination {
  BigFloat value;
  double error = 0;
  HardyExpr expansion;      // symbolic expansion down to t^min_exp
  Rational remainder_coeff;  // |combination - expansion| <= remainder_coeff * t^remainder_exp
  Rational remainder_exp;
};

inline ShiftedCombination shifted_combination(const Family& F, const std::vector<ShiftTerm>& terms, const BigFloat& t,
                                              const Rational& min_exp = 0, unsigned digits = 77) {
  mpfr_prec_t bits = digits_to_bits(digits);
  ShiftedCombination out;
  out.value = BigFloat(bits);
  out.remainder_exp = min_exp;
  HardyExpr acc;
  for (auto& st : terms) {
    if (st.function >= F.size()) throw Error(Errc::precondition_violation, "shift term names a missing function");
    BigFloat ts = t + BigFloat(static_cast<double>(st.shift), bits);
    EvalResult v = GermEvaluator(F[st.function]).eval(ts, bits);
    out.value += BigFloat(st.coeff, bits) * v.value;
    out.error += std::abs(st.coeff.get_d()) * v.error;
    ShiftExpansion e = shift(F[st.function], st.shift, min_exp);
    acc = acc + SymbolicReal(st.coeff) * e.expr;
    out.remainder_coeff += abs(st.coeff) * e.remainder_coeff;
    out.remainder_exp = std::max(out.remainder_exp, e.remainder_exp);
  }
  out.expansion = acc;
  return out;
}

}  // namespace hfl
