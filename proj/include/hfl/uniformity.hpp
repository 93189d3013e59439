#pragma once

// Uniformity seminorms on cyclic groups (recursion and brute-force cube
// average) and weighted equidistribution tests mod 1 and on tori.

#include <hfl/correlate.hpp>

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numeric>
#include <vector>

namespace hfl {

/// A function on Z_m together with the acting shift x -> x + a.
struct FiniteObservable {
  std::vector<std::complex<double>> values;
  std::uint64_t shift = 1;

  std::size_t m() const { return values.size(); }
  void validate() const {
    if (values.empty()) throw Error(Errc::precondition_violation, "observable needs m >= 1");
  }
};

namespace detail {

using CVec = std::vector<std::complex<double>>;

inline std::complex<double> mean(const CVec& h) {
  ComplexSum s;
  for (auto& v : h) s.add(v);
  return s.value() / static_cast<double>(h.size());
}

/// conj(h(x)) * h(x + n a).
inline CVec difference(const CVec& h, std::size_t step) {
  std::size_t m = h.size();
  CVec d(m);
  for (std::size_t x = 0; x < m; ++x) {
    std::size_t y = x + step;
    if (y >= m) y -= m;
    d[x] = std::conj(h[x]) * h[y];
  }
  return d;
}

/// G(h, s) with |||h|||_s^{2^s} = Re G(h, s).
inline std::complex<double> gowers_power(const CVec& h, std::uint64_t a, int s, bool ergodic) {
  std::size_t m = h.size();
  if (s == 0) return mean(h);
  if (s == 1 && ergodic) return std::norm(mean(h));
  // Steps n and m - n give conjugate-shifted differences with equal value.
  CompensatedSum acc;
  for (std::size_t n = 0; n <= m / 2; ++n) {
    std::size_t step = static_cast<std::size_t>((static_cast<unsigned __int128>(n) * a) % m);
    double v = gowers_power(difference(h, step), a, s - 1, ergodic).real();
    bool paired = n != 0 && 2 * n != m;
    acc.add(paired ? 2 * v : v);
  }
  return acc.value() / static_cast<double>(m);
}

}  // namespace detail

/// |||h|||_s on Z_m. For s = 0 this is |mean(h)|.
inline double gowers_seminorm(const FiniteObservable& h, int s) {
  h.validate();
  if (s < 0) throw Error(Errc::precondition_violation, "seminorm order must be >= 0");
  std::uint64_t m = h.m();
  std::uint64_t a = h.shift % m;
  if (s == 0) return std::abs(detail::mean(h.values));
  bool ergodic = std::gcd(a, m) == 1;
  double g = detail::gowers_power(h.values, a, s, ergodic).real();
  return std::pow(std::max(0.0, g), 1.0 / std::ldexp(1.0, s));
}

/// Brute-force cube average over x, n_1..n_s of prod_w C^{s-|w|} h(x + (w.n) a).
inline double gowers_box_oracle(const FiniteObservable& h, int s) {
  h.validate();
  if (s < 1) throw Error(Errc::precondition_violation, "box oracle needs s >= 1");
  std::uint64_t m = h.m();
  std::uint64_t a = h.shift % m;
  std::vector<std::uint64_t> n(static_cast<std::size_t>(s), 0);
  std::size_t corners = std::size_t{1} << s;
  ComplexSum acc;
  double total = 0;
  for (;;) {
    for (std::uint64_t x = 0; x < m; ++x) {
      std::complex<double> prod = 1.0;
      for (std::size_t w = 0; w < corners; ++w) {
        unsigned __int128 off = x;
        int weight = 0;
        for (int i = 0; i < s; ++i)
          if (w >> i & 1) {
            off += static_cast<unsigned __int128>(n[static_cast<std::size_t>(i)]) * a;
            ++weight;
          }
        auto v = h.values[static_cast<std::size_t>(off % m)];
        prod *= ((s - weight) % 2) ? std::conj(v) : v;
      }
      acc.add(prod);
    }
    total += static_cast<double>(m);
    int i = 0;
    while (i < s && ++n[static_cast<std::size_t>(i)] == m) n[static_cast<std::size_t>(i++)] = 0;
    if (i == s) break;
  }
  double g = acc.value().real() / total;
  return std::pow(std::max(0.0, g), 1.0 / std::ldexp(1.0, s));
}

// ---------------------------------------------------------------------------
// Equidistribution

struct DiscrepancyReport {
  std::uint64_t N = 0;
  double weight_total = 0;
  std::vector<double> values;  // per frequency h = 1..H, or per dyadic level
  double max_value = 0;
  std::size_t argmax = 0;       // frequency or level attaining the maximum
  double min_distance_to_identity = 1;  // joint orbits only
};

/// A sequence of points of R/Z.
using PhaseSequence = std::function<Phase(std::uint64_t)>;

/// max_{1<=h<=H} |(1/P_N) sum_{n<=N} w(n) e(h x_n)|.
inline DiscrepancyReport weyl_discrepancy(const PhaseSequence& x, const WeightFn& W, std::uint64_t N,
                                          std::size_t H, unsigned threads = 1) {
  if (H < 1 || N < 1) throw Error(Errc::precondition_violation, "weyl_discrepancy needs N, H >= 1");
  struct Acc {
    std::vector<ComplexSum> s;
    CompensatedSum P;
  };
  auto chunks = make_chunks(1, N);
  auto parts = run_chunks<Acc>(chunks, threads, [&](const Chunk& c) {
    Acc acc;
    acc.s.resize(H);
    for (std::uint64_t n = c.begin; n <= c.end; ++n) {
      double wn = W.w(n);
      if (wn == 0) continue;
      Phase p = x(n);
      acc.P.add(wn);
      for (std::size_t h = 1; h <= H; ++h) acc.s[h - 1].add(wn * unit(p.times(static_cast<std::int64_t>(h)).to_double()));
    }
    return acc;
  });
  std::vector<ComplexSum> s(H);
  CompensatedSum P;
  for (auto& part : parts) {
    P.merge(part.P);
    for (std::size_t h = 0; h < H; ++h) s[h].merge(part.s[h]);
  }
  DiscrepancyReport rep;
  rep.N = N;
  rep.weight_total = P.value();
  if (!(rep.weight_total > 0)) throw Error(Errc::precondition_violation, "weights vanish on [1, N]");
  for (std::size_t h = 0; h < H; ++h) {
    double v = std::abs(s[h].value()) / rep.weight_total;
    rep.values.push_back(v);
    if (v > rep.max_value) {
      rep.max_value = v;
      rep.argmax = h + 1;
    }
  }
  return rep;
}

/// Weighted distribution of (T^{[f_1(n)]}0, ..., T^{[f_k(n)]}0) against Haar
/// measure on dyadic cells of side 2^-L, L = 1..max_level; also the least
/// sup-distance of the tuple to the origin.
inline DiscrepancyReport joint_orbit_discrepancy(const System& sys, const Family& F, RoundingMode mode,
                                                 const WeightFn& W, std::uint64_t N, int max_level = 4,
                                                 unsigned threads = 1, unsigned digits = default_digits) {
  std::size_t d = dimension(sys);
  std::size_t D = d * F.size();
  if (d == 0) throw Error(Errc::wrong_variant, "joint orbits need a torus or skew system");
  if (D == 0 || D > 4) throw Error(Errc::precondition_violation, "joint orbit dimension must be 1..4");
  if (max_level < 1 || max_level > 4) throw Error(Errc::precondition_violation, "dyadic level must be 1..4");
  FamilyRounder rounder(F, mode, digits);
  Point o = origin(sys);
  std::vector<std::size_t> cells(static_cast<std::size_t>(max_level));
  for (int L = 1; L <= max_level; ++L) cells[static_cast<std::size_t>(L - 1)] = std::size_t{1} << (L * D);
  struct Acc {
    std::vector<std::vector<double>> mass;
    CompensatedSum P;
    double min_dist = 1;
  };
  auto chunks = make_chunks(1, N);
  auto parts = run_chunks<Acc>(chunks, threads, [&](const Chunk& c) {
    Acc acc;
    for (auto sz : cells) acc.mass.emplace_back(sz, 0.0);
    std::vector<Phase> pt(D);
    for (std::uint64_t n = c.begin; n <= c.end; ++n) {
      auto k = rounder(n);
      double dist = 0;
      for (std::size_t i = 0; i < k.size(); ++i) {
        Point p = apply_power(sys, o, k[i]);
        for (std::size_t j = 0; j < d; ++j) {
          pt[i * d + j] = p.coords[j];
          dist = std::max(dist, p.coords[j].norm());
        }
      }
      acc.min_dist = std::min(acc.min_dist, dist);
      double wn = W.w(n);
      if (wn == 0) continue;
      acc.P.add(wn);
      for (int L = 1; L <= max_level; ++L) {
        std::size_t cell = 0;
        for (std::size_t j = 0; j < D; ++j)
          cell = (cell << L) | static_cast<std::size_t>(static_cast<std::uint64_t>(pt[j].bits >> (128 - L)));
        acc.mass[static_cast<std::size_t>(L - 1)][cell] += wn;
      }
    }
    return acc;
  });
  DiscrepancyReport rep;
  rep.N = N;
  std::vector<std::vector<double>> mass;
  for (auto sz : cells) mass.emplace_back(sz, 0.0);
  CompensatedSum P;
  for (auto& part : parts) {
    P.merge(part.P);
    rep.min_distance_to_identity = std::min(rep.min_distance_to_identity, part.min_dist);
    for (std::size_t L = 0; L < mass.size(); ++L)
      for (std::size_t c = 0; c < mass[L].size(); ++c) mass[L][c] += part.mass[L][c];
  }
  rep.weight_total = P.value();
  if (!(rep.weight_total > 0)) throw Error(Errc::precondition_violation, "weights vanish on [1, N]");
  for (std::size_t L = 0; L < mass.size(); ++L) {
    double haar = 1.0 / static_cast<double>(mass[L].size());
    double dev = 0;
    for (double mc : mass[L]) dev = std::max(dev, std::abs(mc / rep.weight_total - haar));
    rep.values.push_back(dev);
    if (dev > rep.max_value) {
      rep.max_value = dev;
      rep.argmax = L + 1;
    }
  }
  return rep;
}

}  // namespace hfl
