#pragma once

// Roots of integer polynomials modulo m (CRT over prime powers, Hensel
// lifting from roots mod p) and bounded (joint) intersectivity screening.

#include <hfl/numeric.hpp>

#include <algorithm>
#include <cstdint>
#include <sstream>
#include <vector>

namespace hfl {

class IntPoly {
 public:
  IntPoly() = default;
  IntPoly(std::vector<BigInt> coeffs) : c_(std::move(coeffs)) { trim(); }  // NOLINT
  IntPoly(std::initializer_list<long> coeffs) {
    for (long x : coeffs) c_.emplace_back(x);
    trim();
  }

  const std::vector<BigInt>& coeffs() const { return c_; }
  bool is_zero() const { return c_.empty(); }
  int degree() const { return static_cast<int>(c_.size()) - 1; }

  /// q(x) mod m, x in [0, m).
  std::uint64_t eval_mod(std::uint64_t x, std::uint64_t m) const {
    if (m == 1) return 0;
    unsigned __int128 acc = 0;
    for (auto it = c_.rbegin(); it != c_.rend(); ++it)
      acc = (acc * x + coeff_mod(*it, m)) % m;
    return static_cast<std::uint64_t>(acc);
  }
  IntPoly derivative() const {
    std::vector<BigInt> d;
    for (std::size_t i = 1; i < c_.size(); ++i) d.push_back(c_[i] * static_cast<unsigned long>(i));
    return IntPoly(std::move(d));
  }
  IntPoly operator*(const IntPoly& o) const {
    if (is_zero() || o.is_zero()) return {};
    std::vector<BigInt> r(c_.size() + o.c_.size() - 1, BigInt(0));
    for (std::size_t i = 0; i < c_.size(); ++i)
      for (std::size_t j = 0; j < o.c_.size(); ++j) r[i + j] += c_[i] * o.c_[j];
    return IntPoly(std::move(r));
  }
  friend bool operator==(const IntPoly& a, const IntPoly& b) { return a.c_ == b.c_; }

  std::string to_string() const {
    if (c_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (int i = degree(); i >= 0; --i) {
      const BigInt& a = c_[static_cast<std::size_t>(i)];
      if (a == 0) continue;
      BigInt aa = abs(a);
      if (!first) os << (a > 0 ? " + " : " - ");
      else if (a < 0) os << "-";
      if (i == 0 || aa != 1) os << aa.get_str();
      if (i > 0 && aa != 1) os << "*";
      if (i > 0) os << "t";
      if (i > 1) os << "^" << i;
      first = false;
    }
    return os.str();
  }

 private:
  static std::uint64_t coeff_mod(const BigInt& a, std::uint64_t m) {
    if (a.fits_slong_p()) {
      long v = a.get_si();
      long r = v % static_cast<long>(m);
      return static_cast<std::uint64_t>(r < 0 ? r + static_cast<long>(m) : r);
    }
    BigInt r;
    mpz_fdiv_r_ui(r.get_mpz_t(), a.get_mpz_t(), m);
    return r.get_ui();
  }
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }
  std::vector<BigInt> c_;
};

namespace detail {

inline std::vector<std::pair<std::uint64_t, int>> factor(std::uint64_t m) {
  std::vector<std::pair<std::uint64_t, int>> f;
  for (std::uint64_t p = 2; p * p <= m; ++p) {
    if (m % p) continue;
    int k = 0;
    while (m % p == 0) {
      m /= p;
      ++k;
    }
    f.emplace_back(p, k);
  }
  if (m > 1) f.emplace_back(m, 1);
  return f;
}

inline std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t m) {
  BigInt r;
  BigInt aa(static_cast<unsigned long>(a)), mm(static_cast<unsigned long>(m));
  if (!mpz_invert(r.get_mpz_t(), aa.get_mpz_t(), mm.get_mpz_t())) return 0;
  return r.get_ui();
}

/// Roots mod p^k for all polys jointly, lifting level by level; every lift of
/// a root mod p^j is tested, so the result is exhaustive.
inline std::vector<std::uint64_t> joint_roots_prime_power(const std::vector<IntPoly>& qs, std::uint64_t p, int k) {
  std::vector<std::uint64_t> roots;
  for (std::uint64_t x = 0; x < p; ++x)
    if (std::all_of(qs.begin(), qs.end(), [&](const IntPoly& q) { return q.eval_mod(x, p) == 0; }))
      roots.push_back(x);
  std::uint64_t pj = p;
  for (int j = 1; j < k && !roots.empty(); ++j) {
    std::uint64_t next = pj * p;
    std::vector<std::uint64_t> lifted;
    for (auto r : roots)
      for (std::uint64_t t = 0; t < p; ++t) {
        std::uint64_t x = r + t * pj;
        if (std::all_of(qs.begin(), qs.end(), [&](const IntPoly& q) { return q.eval_mod(x, next) == 0; }))
          lifted.push_back(x);
      }
    roots = std::move(lifted);
    pj = next;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// Roots of one polynomial mod p^k: brute force mod p, then Hensel lifting
/// (unique lift when q'(r) is a unit mod p, all p candidates otherwise).
inline std::vector<std::uint64_t> roots_prime_power(const IntPoly& q, std::uint64_t p, int k) {
  std::vector<std::uint64_t> roots;
  for (std::uint64_t x = 0; x < p; ++x)
    if (q.eval_mod(x, p) == 0) roots.push_back(x);
  IntPoly dq = q.derivative();
  std::uint64_t pj = p;
  for (int j = 1; j < k && !roots.empty(); ++j) {
    std::uint64_t next = pj * p;
    std::vector<std::uint64_t> lifted;
    for (auto r : roots) {
      std::uint64_t d = dq.eval_mod(r % p, p);
      if (d != 0) {
        // q(r + t p^j) = q(r) + t p^j q'(r) mod p^{j+1}; q(r) = p^j * s.
        std::uint64_t s = q.eval_mod(r, next) / pj;
        std::uint64_t t = (p - (s % p) * inverse_mod(d, p) % p) % p;
        lifted.push_back(r + t * pj);
      } else {
        for (std::uint64_t t = 0; t < p; ++t) {
          std::uint64_t x = r + t * pj;
          if (q.eval_mod(x, next) == 0) lifted.push_back(x);
        }
      }
    }
    roots = std::move(lifted);
    pj = next;
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

/// Combines residue sets mod m1 and m2 (coprime) into residues mod m1*m2.
inline std::vector<std::uint64_t> crt_combine(const std::vector<std::uint64_t>& a, std::uint64_t m1,
                                              const std::vector<std::uint64_t>& b, std::uint64_t m2) {
  std::uint64_t inv = inverse_mod(m1 % m2, m2);
  std::vector<std::uint64_t> out;
  for (auto x : a)
    for (auto y : b) {
      // z = x + m1 * ((y - x) * inv mod m2)
      unsigned __int128 diff = (y + m2 - x % m2) % m2;
      std::uint64_t t = static_cast<std::uint64_t>(diff * inv % m2);
      out.push_back(x + m1 * t);
    }
  std::sort(out.begin(), out.end());
  return out;
}

/// All prime powers p^k <= M, ascending, grouped as (p^k, p, k).
struct PrimePower {
  std::uint64_t value, p;
  int k;
};
inline std::vector<PrimePower> prime_powers_up_to(std::uint64_t M) {
  std::vector<PrimePower> out;
  if (M < 2) return out;
  std::vector<bool> composite(M + 1, false);
  for (std::uint64_t p = 2; p <= M; ++p) {
    if (composite[p]) continue;
    for (std::uint64_t j = p * p; j <= M; j += p) composite[j] = true;
    std::uint64_t v = p;
    for (int k = 1;; ++k) {
      out.push_back({v, p, k});
      if (v > M / p) break;
      v *= p;
    }
  }
  std::sort(out.begin(), out.end(), [](auto& a, auto& b) { return a.value < b.value; });
  return out;
}

}  // namespace detail

/// Exactly {n mod m : q(n) = 0 mod m}, ascending.
inline std::vector<std::uint64_t> roots_mod(const IntPoly& q, std::uint64_t m) {
  if (m == 0) throw Error(Errc::precondition_violation, "roots_mod requires m >= 1");
  std::vector<std::uint64_t> acc{0};
  std::uint64_t mod = 1;
  for (auto [p, k] : detail::factor(m)) {
    std::uint64_t pk = 1;
    for (int i = 0; i < k; ++i) pk *= p;
    auto r = detail::roots_prime_power(q, p, k);
    acc = detail::crt_combine(acc, mod, r, pk);
    mod *= pk;
    if (acc.empty()) break;
  }
  return acc;
}

struct IntersectivityReport {
  bool all_pass = true;
  std::uint64_t bound = 0;                                      // M
  std::vector<std::pair<std::uint64_t, std::uint64_t>> witnesses;  // (p^k, common root)
  std::uint64_t failing_modulus = 0;                             // valid when !all_pass
};

/// Screens prime powers p^k <= M in ascending order for a common root.
inline IntersectivityReport jointly_intersective_up_to(const std::vector<IntPoly>& qs, std::uint64_t M) {
  if (qs.empty()) throw Error(Errc::precondition_violation, "empty polynomial family");
  IntersectivityReport rep;
  rep.bound = M;
  for (auto& pp : detail::prime_powers_up_to(M)) {
    auto roots = detail::joint_roots_prime_power(qs, pp.p, pp.k);
    if (roots.empty()) {
      rep.all_pass = false;
      rep.failing_modulus = pp.value;
      return rep;
    }
    rep.witnesses.emplace_back(pp.value, roots.front());
  }
  return rep;
}

inline IntersectivityReport is_intersective_up_to(const IntPoly& q, std::uint64_t M) {
  if (q.is_zero()) throw Error(Errc::precondition_violation, "zero polynomial");
  return jointly_intersective_up_to({q}, M);
}

}  // namespace hfl
