#pragma once

// Measure-preserving systems with closed-form powers: cyclic rotations,
// torus rotations and the quadratic skew product T(x,y) = (x+a, y+2x+a).

#include <hfl/constants.hpp>

#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <variant>
#include <vector>

namespace hfl {

using u128 = unsigned __int128;

struct CyclicRotation {
  std::uint64_t m = 1;
  std::uint64_t a = 0;
  std::uint64_t power(std::uint64_t x, std::int64_t k) const {
    __int128 r = (static_cast<__int128>(x) + static_cast<__int128>(k) * static_cast<__int128>(a)) %
                 static_cast<__int128>(m);
    if (r < 0) r += m;
    return static_cast<std::uint64_t>(r);
  }
};

struct TorusRotation {
  std::vector<Phase> alpha;
  std::size_t dim() const { return alpha.size(); }
  std::vector<Phase> power(const std::vector<Phase>& x, std::int64_t k) const {
    std::vector<Phase> r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + alpha[i].times(k);
    return r;
  }
};

struct QuadraticSkew {
  Phase alpha;
  /// T^k(x, y) = (x + k a, y + 2 k x + k^2 a), exact in 128-bit phase arithmetic.
  std::vector<Phase> power(const std::vector<Phase>& p, std::int64_t k) const {
    u128 k2 = static_cast<u128>(static_cast<__int128>(k) * static_cast<__int128>(k));
    return {p[0] + alpha.times(k), p[1] + p[0].times(2 * k) + alpha.times_u128(k2)};
  }
};

using System = std::variant<CyclicRotation, TorusRotation, QuadraticSkew>;

/// A point: a residue for cyclic systems, phases otherwise.
struct Point {
  std::uint64_t residue = 0;
  std::vector<Phase> coords;
  friend bool operator==(const Point& a, const Point& b) { return a.residue == b.residue && a.coords == b.coords; }
};

inline std::size_t dimension(const System& sys) {
  return std::visit(
      [](auto& s) -> std::size_t {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, CyclicRotation>) return 0;
        else if constexpr (std::is_same_v<S, TorusRotation>) return s.dim();
        else return 2;
      },
      sys);
}

inline Point origin(const System& sys) { return Point{0, std::vector<Phase>(dimension(sys))}; }

inline Point apply_power(const System& sys, const Point& x, std::int64_t k) {
  return std::visit(
      [&](auto& s) -> Point {
        using S = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<S, CyclicRotation>) return Point{s.power(x.residue, k), {}};
        else return Point{0, s.power(x.coords, k)};
      },
      sys);
}

/// Phase of a constant given by name in `basis` or by a closed-form expression.
inline Phase phase_of(const std::string& name_or_expr, const ConstantBasis* basis = nullptr) {
  constexpr mpfr_prec_t bits = 320;
  if (basis) {
    if (auto i = basis->index_of(name_or_expr)) return Phase::from_real(basis->value(*i, bits));
  }
  return Phase::from_real(eval_constant_expr(name_or_expr, bits));
}

// ---------------------------------------------------------------------------
// Arcs and boxes

/// Half-open arc [start, start+length) on R/Z; `full` marks the whole circle.
struct Arc {
  Phase start;
  u128 length = 0;
  bool full = false;

  /// [u, v) with v < u (or v > 1) wrapping around; v - u >= 1 is the circle.
  static Arc from_rationals(const Rational& u, const Rational& v) {
    Arc a;
    if (v - u >= 1) {
      a.full = true;
      return a;
    }
    a.start = Phase::from_rational(u);
    a.length = (Phase::from_rational(v) - a.start).bits;
    return a;
  }
  static Arc from_doubles(double u, double v) {
    return from_rationals(Rational(u), Rational(v));
  }
  double measure() const { return full ? 1.0 : Phase{length}.to_double(); }
  bool contains(Phase x) const { return full || (x - start).bits < length; }
};

using BoxSet = std::vector<Arc>;

inline double box_measure(const BoxSet& b) {
  double m = 1.0;
  for (auto& a : b) m *= a.measure();
  return m;
}

inline bool box_contains(const BoxSet& b, const std::vector<Phase>& x) {
  for (std::size_t i = 0; i < b.size(); ++i)
    if (!b[i].contains(x[i])) return false;
  return true;
}

/// T^{-k} A for a torus rotation: the box translated by -k alpha.
inline BoxSet preimage_box(const System& sys, const BoxSet& A, std::int64_t k) {
  auto* tr = std::get_if<TorusRotation>(&sys);
  if (!tr) throw Error(Errc::wrong_variant, "preimage_box needs a torus rotation");
  if (tr->dim() != A.size()) throw Error(Errc::precondition_violation, "box dimension mismatch");
  BoxSet r = A;
  for (std::size_t i = 0; i < A.size(); ++i) r[i].start = A[i].start - tr->alpha[i].times(k);
  return r;
}

/// Exact length of the intersection of arcs, in units of 2^-127 (the lowest
/// phase bit is dropped so that the full circle 2^127 is representable).
inline u128 arc_intersection_units(const std::vector<const Arc*>& arcs) {
  constexpr u128 full = static_cast<u128>(1) << 127;
  const Arc* ref = nullptr;
  for (auto* a : arcs)
    if (!a->full) {
      ref = a;
      break;
    }
  if (!ref) return full;
  struct Iv {
    u128 lo, hi;  // [lo, hi) within [0, 2^127]
  };
  std::vector<Iv> cur{{0, ref->length >> 1}};
  for (auto* a : arcs) {
    if (a == ref || a->full) continue;
    u128 s = (a->start - ref->start).bits >> 1;
    u128 len = a->length >> 1;
    std::vector<Iv> pieces;
    if (s + len <= full) {
      pieces.push_back({s, s + len});
    } else {
      pieces.push_back({s, full});
      pieces.push_back({0, s + len - full});
    }
    std::vector<Iv> next;
    for (auto& c : cur)
      for (auto& p : pieces) {
        u128 lo = std::max(c.lo, p.lo), hi = std::min(c.hi, p.hi);
        if (lo < hi) next.push_back({lo, hi});
      }
    cur = std::move(next);
    if (cur.empty()) return 0;
  }
  u128 total = 0;
  for (auto& c : cur) total += c.hi - c.lo;
  return total;
}

struct IntersectionMeasure {
  double value = 0;
  bool positive = false;  // exact
};

inline IntersectionMeasure measure_intersection_exact(const std::vector<BoxSet>& boxes) {
  if (boxes.empty()) return {1.0, true};
  std::size_t d = boxes[0].size();
  for (auto& b : boxes)
    if (b.size() != d) throw Error(Errc::precondition_violation, "box dimension mismatch");
  IntersectionMeasure r{1.0, true};
  std::vector<const Arc*> col(boxes.size());
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < boxes.size(); ++j) col[j] = &boxes[j][i];
    u128 u = arc_intersection_units(col);
    if (u == 0) return {0.0, false};
    r.value *= std::ldexp(static_cast<double>(static_cast<std::uint64_t>(u >> 64)), -63) +
               std::ldexp(static_cast<double>(static_cast<std::uint64_t>(u)), -127);
  }
  return r;
}

inline double measure_intersection(const std::vector<BoxSet>& boxes) {
  return measure_intersection_exact(boxes).value;
}

// ---------------------------------------------------------------------------
// Observables

struct Character {
  std::vector<long> h;
};
struct BoxIndicator {
  BoxSet box;
};
struct Tabulated {
  std::vector<std::complex<double>> values;
};
using Observable = std::variant<Character, BoxIndicator, Tabulated>;

inline std::complex<double> observe(const Observable& obs, const Point& x) {
  return std::visit(
      [&](auto& o) -> std::complex<double> {
        using O = std::decay_t<decltype(o)>;
        if constexpr (std::is_same_v<O, Character>) {
          if (x.coords.empty()) {
            // Character of Z_m is not defined by a frequency vector alone.
            throw Error(Errc::wrong_variant, "character observable needs a torus point");
          }
          Phase s;
          for (std::size_t i = 0; i < o.h.size() && i < x.coords.size(); ++i) s = s + x.coords[i].times(o.h[i]);
          return unit(s.to_double());
        } else if constexpr (std::is_same_v<O, BoxIndicator>) {
          return box_contains(o.box, x.coords) ? 1.0 : 0.0;
        } else {
          if (o.values.empty()) throw Error(Errc::precondition_violation, "empty table");
          return o.values[x.residue % o.values.size()];
        }
      },
      obs);
}

/// (1/N) sum_{n=1}^N h(T^n x).
inline std::complex<double> birkhoff_projection(const System& sys, const Observable& h, const Point& x,
                                                std::uint64_t N) {
  if (N == 0) throw Error(Errc::precondition_violation, "birkhoff_projection needs N >= 1");
  ComplexSum s;
  Point p = x;
  for (std::uint64_t n = 1; n <= N; ++n) {
    p = apply_power(sys, p, 1);
    s.add(observe(h, p));
  }
  return s.value() / static_cast<double>(N);
}

}  // namespace hfl
