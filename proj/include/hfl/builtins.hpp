#pragma once

// Registry of named constants, example families, sets and systems.

#include <hfl/io.hpp>
#include <hfl/patterns.hpp>

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hfl {

using Params = std::map<std::string, std::string>;

struct BuiltinInfo {
  std::string name;
  std::string kind;  // constant | family | system | set
  std::string description;
  std::vector<std::pair<std::string, std::string>> params;  // slot, default
};

namespace detail {

inline std::string param(const Params& p, const std::string& key, const std::string& def) {
  auto it = p.find(key);
  return it == p.end() ? def : it->second;
}

/// A constant given by an expression: a rational when it is a short decimal
/// or "p/q" literal, otherwise a new basis symbol.
inline SymbolicReal constant_value(ConstantBasis& b, BasisPtr view, const std::string& name, const std::string& expr) {
  try {
    return SymbolicReal(parse_rational(expr));
  } catch (const Error&) {
  }
  int s = b.add(name, expr, true);
  return SymbolicReal::symbol(s, std::move(view));
}

}  // namespace detail

inline const std::vector<BuiltinInfo>& builtin_catalog() {
  static const std::vector<BuiltinInfo> catalog = {
      {"sqrt2_minus1", "constant", "sqrt(2)-1", {}},
      {"sqrt2_over_2", "constant", "sqrt(2)/2", {}},
      {"example1", "family", "{t - t^c, t + t^c} with c = sqrt(2)/2; with set odds and n >= 2", {}},
      {"example2", "family",
       "{alpha^-1 t^2 + t, beta^-1 (t^3 - alpha t + 1/2)} with alpha = (sqrt(2)-1)/4, beta = (sqrt(3)-1)/8 over the "
       "basis {1, alpha, beta, alpha*beta}; with Bohr set {n : {n alpha}, {n beta} in [0, 1/8)}",
       {}},
      {"example4", "family", "{t + t^(1/2), t - t^(1/2)}", {}},
      {"example5", "family", "{t^(5/2), (5/2) t^(3/2) + t}; with Bohr set {n : {n alpha} < eps}",
       {{"alpha", "sqrt(2)-1"}, {"eps", "1/100"}}},
      {"example8", "family", "{2 alpha t - 1/2, 2 alpha t + 1/2 - 2C/t} on the two-point rotation with A = {0}",
       {{"alpha", "sqrt(2)-1"}, {"C", "0.05"}}},
      {"corollaryA2", "family", "{t^c_1, ..., t^c_k}; exponents given as c1, c2, ... (comma list in 'c')",
       {{"c", "3/2,4/3"}}},
      {"two_point", "system", "cyclic rotation x -> x + 1 mod 2", {}},
      {"torus_sqrt2", "system", "rotation of the circle by sqrt(2)-1", {{"alpha", "sqrt(2)-1"}}},
      {"skew_sqrt2", "system", "quadratic skew product (x, y) -> (x + a, y + 2x + a), a = sqrt(2)-1",
       {{"alpha", "sqrt(2)-1"}}},
      {"odds", "set", "the odd positive integers", {}},
  };
  return catalog;
}

inline std::vector<BuiltinInfo> list_builtins(const std::string& filter = "") {
  std::vector<BuiltinInfo> out;
  for (auto& b : builtin_catalog())
    if (filter.empty() || b.name.find(filter) != std::string::npos || b.kind == filter) out.push_back(b);
  return out;
}

/// Expression of a named builtin constant.
inline std::optional<std::string> builtin_constant(const std::string& name) {
  for (auto& b : builtin_catalog())
    if (b.kind == "constant" && b.name == name) return b.description;
  return std::nullopt;
}

/// A builtin constant name or a closed-form expression, evaluated.
inline BigFloat constant_from_text(const std::string& text, mpfr_prec_t bits = 320) {
  return eval_constant_expr(builtin_constant(text).value_or(text), bits);
}

inline FamilyDoc example1_family() {
  auto b = std::make_shared<ConstantBasis>();
  BasisPtr view = b;
  int c = b->add("c", "sqrt(2)/2");
  b->declare_product(c, c, {{0, Rational(1, 2)}});
  SymbolicReal cs = SymbolicReal::symbol(c, view);
  HardyExpr t = HardyExpr::power(1);
  HardyExpr tc = HardyExpr::monomial(SymbolicReal(1), Signature(cs), view);
  return {view, {t - tc, t + tc}, {"f1", "f2"}};
}

/// alpha = (sqrt 2 - 1)/4 and beta = (sqrt 3 - 1)/8 span, with alpha*beta,
/// the field Q(sqrt 2, sqrt 3); alpha^-1 = 16 alpha + 8, beta^-1 = 32 beta + 8.
inline FamilyDoc example2_family() {
  auto b = std::make_shared<ConstantBasis>();
  BasisPtr view = b;
  int a = b->add("alpha", "(sqrt(2)-1)/4");
  int be = b->add("beta", "(sqrt(3)-1)/8");
  int ab = b->add("alpha_beta", "(sqrt(2)-1)*(sqrt(3)-1)/32");
  using R = Rational;
  b->declare_product(a, a, {{0, R(1, 16)}, {a, R(-1, 2)}});
  b->declare_product(be, be, {{0, R(1, 32)}, {be, R(-1, 4)}});
  b->declare_product(a, be, {{ab, R(1)}});
  b->declare_product(a, ab, {{be, R(1, 16)}, {ab, R(-1, 2)}});
  b->declare_product(be, ab, {{a, R(1, 32)}, {ab, R(-1, 4)}});
  b->declare_product(ab, ab, {{0, R(1, 512)}, {a, R(-1, 64)}, {be, R(-1, 64)}, {ab, R(1, 8)}});
  auto sym = [&](std::initializer_list<std::pair<int, Rational>> c) { return SymbolicReal(Coords(c), view); };
  SymbolicReal alpha_inv = sym({{0, R(8)}, {a, R(16)}});
  SymbolicReal beta_inv = sym({{0, R(8)}, {be, R(32)}});
  SymbolicReal alpha_over_beta = sym({{a, R(8)}, {ab, R(32)}});
  auto mono = [&](const SymbolicReal& c, long e) { return HardyExpr::monomial(c, Signature::power(e), view); };
  HardyExpr f1 = mono(alpha_inv, 2) + mono(SymbolicReal(1), 1);
  HardyExpr f2 = mono(beta_inv, 3) - mono(alpha_over_beta, 1) + mono(beta_inv * Rational(1, 2), 0);
  return {view, {f1, f2}, {"f1", "f2"}};
}

inline FamilyDoc example4_family() {
  HardyExpr t = HardyExpr::power(1), s = HardyExpr::power(Rational(1, 2));
  return {nullptr, {t + s, t - s}, {"f1", "f2"}};
}

inline FamilyDoc example5_family() {
  return {nullptr,
          {HardyExpr::power(Rational(5, 2)), HardyExpr::power(Rational(3, 2), Rational(5, 2)) + HardyExpr::power(1)},
          {"f1", "f2"}};
}

inline FamilyDoc example8_family(const std::string& alpha = "sqrt(2)-1", const std::string& C = "0.05") {
  auto b = std::make_shared<ConstantBasis>();
  BasisPtr view = b;
  SymbolicReal a = detail::constant_value(*b, view, "alpha", alpha);
  SymbolicReal c = detail::constant_value(*b, view, "C", C);
  auto mono = [&](const SymbolicReal& k, long e) { return HardyExpr::monomial(k, Signature::power(e), view); };
  HardyExpr lin = mono(a * Rational(2), 1);
  HardyExpr f1 = lin - mono(SymbolicReal(Rational(1, 2)), 0);
  HardyExpr f2 = lin + mono(SymbolicReal(Rational(1, 2)), 0) - mono(c * Rational(2), -1);
  return {view, {f1, f2}, {"f1", "f2"}};
}

inline FamilyDoc corollaryA2_family(const std::vector<std::string>& exps) {
  if (exps.empty()) throw Error(Errc::precondition_violation, "corollaryA2 needs at least one exponent");
  auto b = std::make_shared<ConstantBasis>();
  BasisPtr view = b;
  FamilyDoc doc{view, {}, {}};
  for (std::size_t i = 0; i < exps.size(); ++i) {
    std::string name = "c" + std::to_string(i + 1);
    SymbolicReal c = detail::constant_value(*b, view, name, exps[i]);
    if (c.sign() <= 0) throw Error(Errc::precondition_violation, "corollaryA2 exponents must be positive");
    doc.family.push_back(HardyExpr::monomial(SymbolicReal(1), Signature(c), view));
    doc.names.push_back("f" + std::to_string(i + 1));
  }
  return doc;
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

inline FamilyDoc builtin_family(const std::string& name, const Params& p = {}) {
  if (name == "example1") return example1_family();
  if (name == "example2") return example2_family();
  if (name == "example4") return example4_family();
  if (name == "example5") return example5_family();
  if (name == "example8") return example8_family(detail::param(p, "alpha", "sqrt(2)-1"), detail::param(p, "C", "0.05"));
  if (name == "corollaryA2") return corollaryA2_family(split_list(detail::param(p, "c", "3/2,4/3")));
  throw Error(Errc::schema_error, "unknown builtin family '" + name + "'");
}

inline System builtin_system(const std::string& name, const Params& p = {}) {
  if (name == "two_point") return CyclicRotation{2, 1};
  if (name == "torus_sqrt2")
    return TorusRotation{{Phase::from_real(constant_from_text(detail::param(p, "alpha", "sqrt(2)-1")))}};
  if (name == "skew_sqrt2") return QuadraticSkew{Phase::from_real(constant_from_text(detail::param(p, "alpha", "sqrt(2)-1")))};
  throw Error(Errc::schema_error, "unknown builtin system '" + name + "'");
}

/// Sets attached to the examples.
inline IntegerSet example2_set() {
  auto doc = example2_family();
  BigFloat a = doc.basis->value(*doc.basis->index_of("alpha"), 320);
  BigFloat b = doc.basis->value(*doc.basis->index_of("beta"), 320);
  return IntegerSet::bohr({a, b}, {{Rational(0), Rational(1, 8)}, {Rational(0), Rational(1, 8)}});
}

inline IntegerSet example5_set(const std::string& alpha = "sqrt(2)-1", const std::string& eps = "1/100") {
  return IntegerSet::bohr({constant_from_text(alpha)}, {{Rational(0), parse_rational(eps)}});
}

}  // namespace hfl
