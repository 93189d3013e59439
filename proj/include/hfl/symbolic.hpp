#pragma once

// SymbolicReal: a real number written as a rational combination of declared
// constants. Zero testing is exact on coordinates; ordering uses certified
// numeric evaluation with precision escalation.

#include <hfl/constants.hpp>

#include <algorithm>
#include <sstream>

namespace hfl {

struct Enclosure {
  BigFloat value;
  double error;  // absolute
};

class SymbolicReal {
 public:
  SymbolicReal() = default;
  SymbolicReal(const Rational& q) {  // NOLINT(google-explicit-constructor)
    if (q != 0) coords_.emplace_back(0, q);
  }
  SymbolicReal(long q) : SymbolicReal(Rational(q)) {}  // NOLINT
  SymbolicReal(Coords c, BasisPtr basis) : coords_(std::move(c)), basis_(std::move(basis)) {
    std::sort(coords_.begin(), coords_.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    Coords merged;
    for (auto& [s, q] : coords_) {
      if (!merged.empty() && merged.back().first == s)
        merged.back().second += q;
      else
        merged.emplace_back(s, q);
    }
    std::erase_if(merged, [](const auto& p) { return p.second == 0; });
    coords_ = std::move(merged);
    if (basis_ && is_rational()) basis_.reset();
  }
  static SymbolicReal symbol(int index, BasisPtr basis, const Rational& scale = 1) {
    return SymbolicReal(Coords{{index, scale}}, std::move(basis));
  }

  const Coords& coords() const { return coords_; }
  const BasisPtr& basis() const { return basis_; }

  bool is_zero() const { return coords_.empty(); }
  bool is_rational() const { return coords_.empty() || (coords_.size() == 1 && coords_[0].first == 0); }
  Rational rational_value() const {
    if (!is_rational()) throw Error(Errc::domain_error, "symbolic real is not rational");
    return coords_.empty() ? Rational(0) : coords_[0].second;
  }
  Rational coord(int s) const {
    for (auto& [i, q] : coords_)
      if (i == s) return q;
    return 0;
  }

  friend SymbolicReal operator+(const SymbolicReal& a, const SymbolicReal& b) {
    SymbolicReal r = a;
    r.basis_ = merge_basis(a.basis_, b.basis_);
    add_scaled(r.coords_, b.coords_, 1);
    if (r.is_rational()) r.basis_.reset();
    return r;
  }
  friend SymbolicReal operator-(const SymbolicReal& a) {
    SymbolicReal r = a;
    for (auto& [s, q] : r.coords_) q = -q;
    return r;
  }
  friend SymbolicReal operator-(const SymbolicReal& a, const SymbolicReal& b) { return a + (-b); }
  friend SymbolicReal operator*(const SymbolicReal& a, const Rational& s) {
    if (s == 0) return {};
    SymbolicReal r = a;
    for (auto& [i, q] : r.coords_) q *= s;
    return r;
  }
  friend SymbolicReal operator*(const Rational& s, const SymbolicReal& a) { return a * s; }

  /// Product through the declared product table.
  friend SymbolicReal operator*(const SymbolicReal& a, const SymbolicReal& b) {
    if (a.is_rational()) return b * a.rational_value();
    if (b.is_rational()) return a * b.rational_value();
    BasisPtr basis = merge_basis(a.basis_, b.basis_);
    Coords acc;
    for (auto& [i, p] : a.coords_) {
      for (auto& [j, q] : b.coords_) {
        if (i == 0) {
          add_scaled(acc, Coords{{j, q}}, p);
        } else if (j == 0) {
          add_scaled(acc, Coords{{i, p}}, q);
        } else {
          const Coords* prod = basis->product(i, j);
          if (!prod)
            throw Error(Errc::undeclared_product, basis->symbol(i).name + " * " + basis->symbol(j).name);
          add_scaled(acc, *prod, p * q);
        }
      }
    }
    return SymbolicReal(std::move(acc), basis);
  }

  friend bool operator==(const SymbolicReal& a, const SymbolicReal& b) { return (a - b).is_zero(); }

  /// Value at `bits` with a rigorous absolute error bound.
  Enclosure enclose(mpfr_prec_t bits) const {
    BigFloat v(bits);
    double err = 0.0;
    for (auto& [s, q] : coords_) {
      if (s == 0) {
        v += BigFloat(q, bits);
      } else {
        v += basis_->value(s, bits) * BigFloat(q, bits);
        err += std::abs(q.get_d()) * basis_->error_bound(s, bits);
      }
    }
    double mag = std::abs(v.to_double());
    err += (static_cast<double>(coords_.size()) * 2.0 + 1.0) * mag * std::ldexp(1.0, -static_cast<int>(bits));
    return {std::move(v), err * 2.0};
  }

  double to_double() const {
    if (is_rational()) return rational_value().get_d();
    return enclose(128).value.to_double();
  }

  /// Certified sign. Nonzero coordinates over an all-independent basis denote
  /// a nonzero real, so escalation always terminates in that case.
  int sign() const {
    if (is_zero()) return 0;
    if (is_rational()) return sgn(coords_[0].second);
    for (unsigned digits : {64u, 128u, 256u, 512u}) {
      Enclosure e = enclose(digits_to_bits(digits));
      double v = e.value.to_double();
      if (std::abs(v) > e.error) return v > 0 ? 1 : -1;
    }
    throw Error(Errc::precision_exhausted, "cannot certify the sign of " + to_string());
  }

  std::string to_string() const {
    if (coords_.empty()) return "0";
    std::ostringstream os;
    bool first = true;
    for (auto& [s, q] : coords_) {
      if (!first) os << (q > 0 ? " + " : " - ");
      else if (q < 0) os << "-";
      Rational aq = abs(q);
      if (s == 0) {
        os << aq.get_str();
      } else {
        if (aq != 1) os << aq.get_str() << "*";
        os << basis_->symbol(s).name;
      }
      first = false;
    }
    return os.str();
  }

  static BasisPtr merge_basis(const BasisPtr& a, const BasisPtr& b) {
    if (a && b && a != b) throw Error(Errc::schema_error, "mixing constants from different bases");
    return a ? a : b;
  }

 private:
  Coords coords_;
  BasisPtr basis_;
};

inline int compare(const SymbolicReal& a, const SymbolicReal& b) { return (a - b).sign(); }

}  // namespace hfl
