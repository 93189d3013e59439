#pragma once

// Small dense linear algebra: exact over Q, exact integer kernels (saturated
// lattices) and a high-precision rank lower bound over R.

#include <hfl/numeric.hpp>

#include <vector>

namespace hfl {

using QMatrix = std::vector<std::vector<Rational>>;
using QVector = std::vector<Rational>;
using ZVector = std::vector<BigInt>;

/// In-place reduced row echelon form; returns pivot columns.
inline std::vector<std::size_t> rref(QMatrix& a, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t row = 0;
  for (std::size_t c = 0; c < cols && row < a.size(); ++c) {
    std::size_t p = row;
    while (p < a.size() && a[p][c] == 0) ++p;
    if (p == a.size()) continue;
    std::swap(a[p], a[row]);
    Rational inv = 1 / a[row][c];
    for (auto& x : a[row]) x *= inv;
    for (std::size_t r = 0; r < a.size(); ++r) {
      if (r == row || a[r][c] == 0) continue;
      Rational f = a[r][c];
      for (std::size_t k = c; k < cols; ++k) a[r][k] -= f * a[row][k];
    }
    pivots.push_back(c);
    ++row;
  }
  return pivots;
}

/// Basis of {x in Q^cols : a x = 0}.
inline std::vector<QVector> kernel(QMatrix a, std::size_t cols) {
  auto pivots = rref(a, cols);
  std::vector<bool> is_pivot(cols, false);
  for (auto p : pivots) is_pivot[p] = true;
  std::vector<QVector> basis;
  for (std::size_t free = 0; free < cols; ++free) {
    if (is_pivot[free]) continue;
    QVector v(cols, Rational(0));
    v[free] = 1;
    for (std::size_t r = 0; r < pivots.size(); ++r) v[pivots[r]] = -a[r][free];
    basis.push_back(std::move(v));
  }
  return basis;
}

inline std::size_t rank(QMatrix a, std::size_t cols) { return rref(a, cols).size(); }

/// Scales a rational vector to a primitive integer vector whose first nonzero
/// entry is positive.
inline ZVector primitive_integer(const QVector& v) {
  BigInt l = 1;
  for (auto& x : v) l = lcm(l, BigInt(x.get_den()));
  ZVector z;
  BigInt g = 0;
  for (auto& x : v) {
    BigInt zi = BigInt(x.get_num()) * (l / BigInt(x.get_den()));
    g = gcd(g, zi);
    z.push_back(zi);
  }
  if (g == 0) return z;
  int sign = 0;
  for (auto& zi : z)
    if (zi != 0) {
      sign = sgn(zi);
      break;
    }
  for (auto& zi : z) zi = zi / g * sign;
  return z;
}

/// Z-basis of {x in Z^cols : a x = 0} for an integer matrix, by unimodular
/// column operations. The result is a basis of the saturated lattice.
inline std::vector<ZVector> integer_kernel(const std::vector<ZVector>& a, std::size_t cols) {
  std::vector<ZVector> m = a;  // rows
  // U starts as the identity; columns of U track the column operations.
  std::vector<ZVector> u(cols, ZVector(cols, BigInt(0)));
  for (std::size_t i = 0; i < cols; ++i) u[i][i] = 1;
  auto col_op = [&](std::size_t i, std::size_t j, const BigInt& p, const BigInt& q, const BigInt& r,
                    const BigInt& s) {
    // (col_i, col_j) <- (p col_i + q col_j, r col_i + s col_j)
    for (auto& row : m) {
      BigInt x = row[i], y = row[j];
      row[i] = p * x + q * y;
      row[j] = r * x + s * y;
    }
    for (auto& row : u) {
      BigInt x = row[i], y = row[j];
      row[i] = p * x + q * y;
      row[j] = r * x + s * y;
    }
  };
  std::size_t lead = 0;  // columns [0, lead) hold pivots
  for (std::size_t r = 0; r < m.size() && lead < cols; ++r) {
    for (std::size_t j = lead + 1; j < cols; ++j) {
      if (m[r][j] == 0) continue;
      BigInt x = m[r][lead], y = m[r][j];
      if (x == 0) {
        col_op(lead, j, 0, 1, 1, 0);  // swap
        continue;
      }
      BigInt g, s, t;
      mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), x.get_mpz_t(), y.get_mpz_t());
      // [x y] * [[s, -y/g], [t, x/g]] = [g 0], determinant 1.
      col_op(lead, j, s, t, -y / g, x / g);
    }
    if (m[r][lead] != 0) ++lead;
  }
  std::vector<ZVector> basis;
  for (std::size_t j = lead; j < cols; ++j) {
    ZVector v(cols);
    for (std::size_t i = 0; i < cols; ++i) v[i] = u[i][j];
    basis.push_back(std::move(v));
  }
  return basis;
}

/// Certified lower bound on the real rank of a matrix given by high-precision
/// entries with absolute error at most `entry_error`: full-pivoting
/// elimination, stopping once the best remaining pivot is not provably
/// nonzero.
inline std::size_t certified_rank_lower_bound(std::vector<std::vector<BigFloat>> a, double entry_error) {
  if (a.empty()) return 0;
  std::size_t rows = a.size(), cols = a[0].size();
  std::size_t r = 0;
  double err = entry_error;
  double growth = 1.0;
  for (; r < std::min(rows, cols); ++r) {
    std::size_t pi = r, pj = r;
    double best = -1;
    for (std::size_t i = r; i < rows; ++i)
      for (std::size_t j = r; j < cols; ++j) {
        double v = std::abs(a[i][j].to_double());
        if (v > best) {
          best = v;
          pi = i;
          pj = j;
        }
      }
    if (best <= err * 4.0 * growth + 1e-40) break;
    std::swap(a[pi], a[r]);
    for (auto& row : a) std::swap(row[pj], row[r]);
    double maxf = 0;
    for (std::size_t i = r + 1; i < rows; ++i) {
      BigFloat f = a[i][r] / a[r][r];
      maxf = std::max(maxf, std::abs(f.to_double()));
      for (std::size_t j = r; j < cols; ++j) a[i][j] -= f * a[r][j];
    }
    // Error in eliminated entries grows by at most (1 + max multiplier) per
    // step, plus the pivot's own error through the multiplier.
    growth *= (2.0 + 2.0 * maxf);
  }
  return r;
}

}  // namespace hfl
