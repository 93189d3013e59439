#pragma once

// Declared real constants. Symbol 0 is always "1". Each further symbol has a
// defining expression (a decimal literal or a closed form such as
// "(sqrt(2)-1)/4") and a declared rational-independence flag. Products of
// symbols are not computed implicitly; they must be declared.

#include <hfl/numeric.hpp>

#include <algorithm>
#include <cctype>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace hfl {

namespace detail {

/// Recursive-descent evaluator for closed-form constant expressions.
/// Grammar: sum := prod (('+'|'-') prod)*; prod := unary (('*'|'/') unary)*;
/// unary := '-' unary | power; power := atom ('^' unary)?;
/// atom := number | name '(' sum ')' | 'pi' | 'e' | '(' sum ')'.
class ExprEval {
 public:
  ExprEval(std::string_view text, mpfr_prec_t bits) : s_(text), bits_(bits) {}

  BigFloat parse() {
    BigFloat v = sum();
    skip();
    if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return v;
  }

  /// True when the text is a plain decimal literal; `frac_digits` receives the
  /// number of digits after the point.
  static bool is_decimal_literal(std::string_view t, int& frac_digits) {
    std::size_t i = 0;
    while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
    if (i < t.size() && (t[i] == '-' || t[i] == '+')) ++i;
    bool digit = false, dot = false;
    frac_digits = 0;
    for (; i < t.size(); ++i) {
      char c = t[i];
      if (std::isdigit(static_cast<unsigned char>(c))) {
        digit = true;
        if (dot) ++frac_digits;
      } else if (c == '.' && !dot) {
        dot = true;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        continue;
      } else {
        return false;
      }
    }
    return digit;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(Errc::schema_error, "constant expression '" + std::string(s_) + "': " + msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool eat(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  BigFloat sum() {
    BigFloat v = prod();
    for (;;) {
      if (eat('+')) v = v + prod();
      else if (eat('-')) v = v - prod();
      else return v;
    }
  }
  BigFloat prod() {
    BigFloat v = unary();
    for (;;) {
      if (eat('*')) v = v * unary();
      else if (eat('/')) v = v / unary();
      else return v;
    }
  }
  BigFloat unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    BigFloat base = atom();
    if (eat('^')) return pow(base, unary());
    return base;
  }
  BigFloat atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end");
    if (eat('(')) {
      BigFloat v = sum();
      if (!eat(')')) fail("missing ')'");
      return v;
    }
    char c = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
        ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E') && pos_ + 1 < s_.size() &&
          (std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])) || s_[pos_ + 1] == '-' ||
           s_[pos_ + 1] == '+')) {
        pos_ += 2;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
      return BigFloat::from_string(std::string(s_.substr(start, pos_ - start)), bits_);
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      if (name == "pi") return BigFloat::pi(bits_);
      if (name == "e" && !peek_paren()) return exp(BigFloat(1.0, bits_));
      if (!eat('(')) fail("expected '(' after " + name);
      BigFloat arg = sum();
      if (!eat(')')) fail("missing ')'");
      if (name == "sqrt") {
        if (arg.sign() < 0) fail("sqrt of negative");
        return sqrt(arg);
      }
      if (name == "cbrt") return cbrt(arg);
      if (name == "log") {
        if (arg.sign() <= 0) fail("log of non-positive");
        return log(arg);
      }
      if (name == "exp") return exp(arg);
      fail("unknown function " + name);
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }
  bool peek_paren() {
    std::size_t p = pos_;
    while (p < s_.size() && std::isspace(static_cast<unsigned char>(s_[p]))) ++p;
    return p < s_.size() && s_[p] == '(';
  }

  std::string_view s_;
  mpfr_prec_t bits_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline BigFloat eval_constant_expr(std::string_view text, mpfr_prec_t bits) {
  return detail::ExprEval(text, bits).parse();
}

/// Sparse rational coordinates over a basis: sorted (symbol, value) pairs,
/// no zero values.
using Coords = std::vector<std::pair<int, Rational>>;

inline void add_scaled(Coords& acc, const Coords& x, const Rational& s) {
  if (s == 0) return;
  Coords out;
  out.reserve(acc.size() + x.size());
  std::size_t i = 0, j = 0;
  while (i < acc.size() || j < x.size()) {
    if (j == x.size() || (i < acc.size() && acc[i].first < x[j].first)) {
      out.push_back(acc[i++]);
    } else if (i == acc.size() || x[j].first < acc[i].first) {
      out.emplace_back(x[j].first, x[j].second * s);
      ++j;
    } else {
      Rational v = acc[i].second + x[j].second * s;
      if (v != 0) out.emplace_back(acc[i].first, v);
      ++i;
      ++j;
    }
  }
  acc = std::move(out);
}

struct ConstantSymbol {
  std::string name;
  std::string expr;
  bool independent = true;
};

class ConstantBasis {
 public:
  ConstantBasis() { symbols_.push_back({"1", "1", true}); }

  int add(const std::string& name, const std::string& expr, bool independent = true) {
    if (index_of(name)) throw Error(Errc::schema_error, "duplicate constant '" + name + "'");
    if (name.empty()) throw Error(Errc::schema_error, "empty constant name");
    eval_constant_expr(expr, 64);  // validates syntax
    symbols_.push_back({name, expr, independent});
    return static_cast<int>(symbols_.size()) - 1;
  }

  /// Declares a*b = value (coordinates over this basis).
  void declare_product(int a, int b, Coords value) {
    check_index(a);
    check_index(b);
    for (auto& [s, q] : value) check_index(s);
    std::sort(value.begin(), value.end(),
              [](const auto& x, const auto& y) { return x.first < y.first; });
    products_[key(a, b)] = std::move(value);
  }

  const Coords* product(int a, int b) const {
    auto it = products_.find(key(a, b));
    return it == products_.end() ? nullptr : &it->second;
  }
  const std::map<std::pair<int, int>, Coords>& products() const { return products_; }

  std::size_t size() const { return symbols_.size(); }
  const ConstantSymbol& symbol(int i) const { return symbols_.at(static_cast<std::size_t>(i)); }

  std::optional<int> index_of(const std::string& name) const {
    for (std::size_t i = 0; i < symbols_.size(); ++i)
      if (symbols_[i].name == name) return static_cast<int>(i);
    return std::nullopt;
  }
  int require(const std::string& name) const {
    auto i = index_of(name);
    if (!i) throw Error(Errc::schema_error, "undeclared constant '" + name + "'");
    return *i;
  }

  /// Whether every non-unit symbol is declared independent, so that a nonzero
  /// coordinate vector denotes a nonzero real.
  bool all_independent() const {
    for (std::size_t i = 1; i < symbols_.size(); ++i)
      if (!symbols_[i].independent) return false;
    return true;
  }

  /// Value of symbol i at `bits` of precision.
  BigFloat value(int i, mpfr_prec_t bits) const {
    check_index(i);
    if (i == 0) return BigFloat(1.0, bits);
    std::lock_guard lock(mutex_);
    auto& slot = cache_[{i, bits}];
    if (!slot) slot = std::make_shared<BigFloat>(eval_constant_expr(symbols_[i].expr, bits + 16));
    BigFloat r(bits);
    mpfr_set(r.get(), slot->get(), MPFR_RNDN);
    return r;
  }

  double value_double(int i) const { return value(i, 64).to_double(); }

  /// Absolute error bound of value(i, bits). Closed forms are evaluated with
  /// 16 guard bits; decimal literals are exact as given but stand for a real
  /// known only to the printed digits.
  double error_bound(int i, mpfr_prec_t bits) const {
    check_index(i);
    if (i == 0) return 0.0;
    double mag = std::abs(value_double(i));
    double err = mag * std::ldexp(1.0, -static_cast<int>(bits) + 1);
    int frac = 0;
    if (detail::ExprEval::is_decimal_literal(symbols_[i].expr, frac) && frac < 300) {
      // A literal that is itself the constant (e.g. "0.05") is exact; a long
      // literal standing for an irrational carries its truncation error. We
      // cannot tell these apart, so literals longer than 30 digits are
      // treated as truncations.
      if (frac > 30) err = std::max(err, 0.5 * std::pow(10.0, -frac));
    }
    return err;
  }

  /// True when symbol i is given by a short decimal literal and is therefore
  /// an exact rational.
  std::optional<Rational> literal_rational(int i) const {
    if (i == 0) return Rational(1);
    int frac = 0;
    if (detail::ExprEval::is_decimal_literal(symbols_[i].expr, frac) && frac <= 30)
      return parse_rational(symbols_[i].expr);
    return std::nullopt;
  }

 private:
  static std::pair<int, int> key(int a, int b) { return a <= b ? std::pair{a, b} : std::pair{b, a}; }
  void check_index(int i) const {
    if (i < 0 || static_cast<std::size_t>(i) >= symbols_.size())
      throw Error(Errc::schema_error, "constant index out of range");
  }

  std::vector<ConstantSymbol> symbols_;
  std::map<std::pair<int, int>, Coords> products_;
  mutable std::mutex mutex_;
  mutable std::map<std::pair<int, mpfr_prec_t>, std::shared_ptr<BigFloat>> cache_;
};

using BasisPtr = std::shared_ptr<const ConstantBasis>;

}  // namespace hfl
