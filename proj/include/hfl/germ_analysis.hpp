#pragma once

// Decision procedures over families of germs: characteristic vectors, the
// polynomial span, the normal form, the two recurrence conditions and
// Property (P), and weight selection.
//
// Real combinations sum_i c_i f_i are searched in a coordinate space: each
// c_i is written as sum_b x_{i,b} * b over basis symbols b whose products with
// every coefficient of f_i are declared, so each coefficient of the
// combination is a rational-linear function of x. When every coefficient is
// rational the only multiplier is 1 and the search is complete.

#include <hfl/germ.hpp>
#include <hfl/intersective.hpp>
#include <hfl/linalg.hpp>

#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hfl {

using Family = std::vector<HardyExpr>;

inline BasisPtr family_basis(const Family& F) {
  BasisPtr b;
  for (auto& f : F) b = SymbolicReal::merge_basis(b, f.basis());
  return b;
}

// ---------------------------------------------------------------------------
// Characteristic vector

inline std::vector<int> characteristic_vector(const Family& F) {
  int dmax = 0;
  std::vector<int> deg;
  for (auto& f : F) {
    if (f.is_zero()) throw Error(Errc::precondition_violation, "characteristic vector of a zero germ");
    deg.push_back(degree(f));
    dmax = std::max(dmax, deg.back());
  }
  std::vector<int> m(static_cast<std::size_t>(dmax), 0);
  std::vector<std::size_t> reps;  // one representative per class
  for (std::size_t i = 0; i < F.size(); ++i) {
    bool found = false;
    for (auto r : reps)
      if (deg[r] == deg[i] && compare(F[i], F[r]).same_order_one()) found = true;
    if (!found) {
      reps.push_back(i);
      ++m[static_cast<std::size_t>(deg[i] - 1)];
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Coordinate space

enum class SigClass { NonPolynomial, Polynomial, Decaying };

inline SigClass classify(const Signature& s) {
  if (s.is_polynomial()) return SigClass::Polynomial;
  if (s.is_decaying()) return SigClass::Decaying;
  return SigClass::NonPolynomial;
}

struct CoordinateSpace {
  BasisPtr basis;
  bool rational_mode = true;
  std::size_t k = 0;
  std::vector<std::pair<std::size_t, int>> unknowns;  // (function index, multiplier symbol)
  std::vector<HardyExpr> scaled;                      // multiplier * f_i
  std::vector<Signature> sigs;
  std::vector<SigClass> classes;
  // Row per (signature, coordinate symbol); entries indexed by unknown.
  std::map<std::pair<std::size_t, int>, QVector> rows;

  std::size_t sig_index(const Signature& s) const {
    for (std::size_t i = 0; i < sigs.size(); ++i)
      if (sigs[i] == s) return i;
    return sigs.size();
  }

  QMatrix select(const std::function<bool(std::size_t sig, int coord)>& pred) const {
    QMatrix m;
    for (auto& [key, row] : rows)
      if (pred(key.first, key.second)) m.push_back(row);
    return m;
  }

  /// sum_u x_u * scaled[u]
  HardyExpr combination(const QVector& x) const {
    HardyExpr g;
    for (std::size_t u = 0; u < unknowns.size(); ++u)
      if (x[u] != 0) g = g + SymbolicReal(x[u]) * scaled[u];
    return g;
  }
  /// c_i = sum_b x_{i,b} b
  std::vector<SymbolicReal> coefficients(const QVector& x) const {
    std::vector<SymbolicReal> c(k);
    for (std::size_t u = 0; u < unknowns.size(); ++u) {
      auto [i, b] = unknowns[u];
      if (x[u] == 0) continue;
      c[i] = c[i] + (b == 0 ? SymbolicReal(x[u]) : SymbolicReal::symbol(b, basis, x[u]));
    }
    return c;
  }
};

inline CoordinateSpace build_coordinates(const Family& F) {
  CoordinateSpace cs;
  cs.basis = family_basis(F);
  cs.k = F.size();
  for (auto& f : F)
    if (!f.all_rational()) cs.rational_mode = false;
  for (std::size_t i = 0; i < F.size(); ++i) {
    std::vector<int> syms;
    for (auto& t : F[i].terms())
      for (auto& [s, q] : t.coeff.coords()) syms.push_back(s);
    std::size_t nb = cs.rational_mode || !cs.basis ? 1 : cs.basis->size();
    for (std::size_t b = 0; b < nb; ++b) {
      int bi = static_cast<int>(b);
      bool ok = std::all_of(syms.begin(), syms.end(),
                            [&](int s) { return s == 0 || bi == 0 || cs.basis->product(bi, s) != nullptr; });
      if (!ok) continue;
      cs.unknowns.emplace_back(i, bi);
      cs.scaled.push_back(bi == 0 ? F[i] : SymbolicReal::symbol(bi, cs.basis) * F[i]);
    }
  }
  for (auto& g : cs.scaled)
    for (auto& t : g.terms())
      if (cs.sig_index(t.sig) == cs.sigs.size()) {
        cs.sigs.push_back(t.sig);
        cs.classes.push_back(classify(t.sig));
      }
  for (std::size_t u = 0; u < cs.scaled.size(); ++u)
    for (auto& t : cs.scaled[u].terms()) {
      std::size_t si = cs.sig_index(t.sig);
      for (auto& [s, q] : t.coeff.coords()) {
        auto& row = cs.rows[{si, s}];
        if (row.empty()) row.assign(cs.unknowns.size(), Rational(0));
        row[u] += q;
      }
    }
  return cs;
}

/// Numeric matrix of non-polynomial coefficients (rows: signatures, columns:
/// functions) and its entry error bound.
inline std::pair<std::vector<std::vector<BigFloat>>, double> numeric_np_matrix(const Family& F,
                                                                               const CoordinateSpace& cs) {
  constexpr mpfr_prec_t bits = 256;
  std::vector<std::vector<BigFloat>> m;
  double err = 0;
  for (std::size_t si = 0; si < cs.sigs.size(); ++si) {
    if (cs.classes[si] != SigClass::NonPolynomial) continue;
    std::vector<BigFloat> row;
    for (auto& f : F) {
      SymbolicReal c;
      for (auto& t : f.terms())
        if (t.sig == cs.sigs[si]) c = t.coeff;
      Enclosure e = c.enclose(bits);
      err = std::max(err, e.error);
      row.push_back(std::move(e.value));
    }
    m.push_back(std::move(row));
  }
  return {std::move(m), err};
}

/// Certified lower bound on the real rank of a set of real vectors.
inline std::size_t numeric_rank(const std::vector<std::vector<SymbolicReal>>& vecs) {
  if (vecs.empty()) return 0;
  std::vector<std::vector<BigFloat>> m;
  double err = 0;
  for (auto& v : vecs) {
    std::vector<BigFloat> row;
    for (auto& x : v) {
      Enclosure e = x.enclose(256);
      err = std::max(err, e.error);
      row.push_back(std::move(e.value));
    }
    m.push_back(std::move(row));
  }
  return certified_rank_lower_bound(std::move(m), err);
}

// ---------------------------------------------------------------------------
// Polynomial span

struct PolySpan {
  std::vector<HardyExpr> basis;                      // R-independent polynomials
  std::vector<std::vector<SymbolicReal>> witnesses;  // c with poly part of sum c_i f_i = basis[j]
  bool complete = true;
  std::string reason;
};

/// Coefficient vector (highest degree first) of a polynomial germ.
inline std::vector<SymbolicReal> poly_coeffs_desc(const HardyExpr& p, int D) {
  std::vector<SymbolicReal> v;
  for (int d = D; d >= 0; --d) v.push_back(p.poly_coeff(d));
  return v;
}

inline int max_poly_degree(const std::vector<HardyExpr>& ps) {
  int D = 0;
  for (auto& p : ps)
    for (auto& t : p.terms())
      if (t.sig.is_polynomial()) D = std::max(D, t.sig.poly_degree());
  return D;
}

inline PolySpan poly_span(const Family& F) {
  PolySpan out;
  CoordinateSpace cs = build_coordinates(F);
  QMatrix np = cs.select([&](std::size_t si, int) { return cs.classes[si] == SigClass::NonPolynomial; });
  auto K = kernel(np, cs.unknowns.size());

  if (!cs.rational_mode) {
    auto [mnp, err] = numeric_np_matrix(F, cs);
    std::size_t r_lb = certified_rank_lower_bound(mnp, err);
    std::vector<std::vector<SymbolicReal>> cvecs;
    for (auto& x : K) cvecs.push_back(cs.coefficients(x));
    std::size_t d_c = numeric_rank(cvecs);
    if (d_c < F.size() - r_lb) {
      out.complete = false;
      out.reason = "real kernel of the non-polynomial coefficients has dimension up to " +
                   std::to_string(F.size() - r_lb) + " but only " + std::to_string(d_c) +
                   " directions are expressible in the declared basis";
    }
  }

  std::vector<HardyExpr> images;
  std::vector<std::vector<SymbolicReal>> cs_of_image;
  for (auto& x : K) {
    HardyExpr p = cs.combination(x).polynomial_part();
    if (p.is_zero()) continue;
    images.push_back(p);
    cs_of_image.push_back(cs.coefficients(x));
  }
  int D = max_poly_degree(images);

  bool rational_images = std::all_of(images.begin(), images.end(), [](auto& p) { return p.all_rational(); });
  if (rational_images) {
    // Exact reduction; rows in echelon form give a normalized basis.
    QMatrix m;
    for (auto& p : images) {
      QVector row;
      for (auto& c : poly_coeffs_desc(p, D)) row.push_back(c.rational_value());
      m.push_back(row);
    }
    auto piv = rref(m, static_cast<std::size_t>(D + 1));
    for (std::size_t r = 0; r < piv.size(); ++r) {
      std::vector<Rational> asc(static_cast<std::size_t>(D + 1));
      for (int d = 0; d <= D; ++d) asc[static_cast<std::size_t>(d)] = m[r][static_cast<std::size_t>(D - d)];
      out.basis.push_back(HardyExpr::polynomial(asc));
    }
    // Witness coefficients for the echelon basis: solve against the images.
    for (auto& b : out.basis) {
      std::size_t n = images.size();
      QMatrix aug;
      for (int d = D; d >= 0; --d) {
        QVector row;
        for (auto& p : images) row.push_back(p.poly_coeff(d).rational_value());
        row.push_back(b.poly_coeff(d).rational_value());
        aug.push_back(row);
      }
      auto pv = rref(aug, n + 1);
      QVector y(n, Rational(0));
      for (std::size_t r = 0; r < pv.size(); ++r)
        if (pv[r] < n) y[pv[r]] = aug[r][n];
      std::vector<SymbolicReal> c(F.size());
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < F.size(); ++i) c[i] = c[i] + cs_of_image[j][i] * y[j];
      out.witnesses.push_back(c);
    }
  } else {
    std::vector<std::vector<SymbolicReal>> kept;
    for (std::size_t j = 0; j < images.size(); ++j) {
      auto v = poly_coeffs_desc(images[j], D);
      kept.push_back(v);
      if (numeric_rank(kept) == kept.size()) {
        out.basis.push_back(images[j]);
        out.witnesses.push_back(cs_of_image[j]);
      } else {
        kept.pop_back();
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Normal form

struct NormalForm {
  std::vector<std::size_t> J, I;
  std::map<std::pair<std::size_t, std::size_t>, SymbolicReal> lambda;  // (i, j) -> lambda_{i,j}
  std::map<std::size_t, HardyExpr> p;                                  // i -> p_i
  std::map<std::size_t, HardyExpr> remainder;                          // i -> f_i - sum lambda f_j - p_i
  bool complete = true;
  std::string reason;
};

/// Solves a y = b exactly; nullopt when inconsistent.
inline std::optional<QVector> solve(const QMatrix& a, const QVector& b, std::size_t n) {
  QMatrix aug = a;
  for (std::size_t r = 0; r < aug.size(); ++r) aug[r].push_back(b[r]);
  auto piv = rref(aug, n + 1);
  if (!piv.empty() && piv.back() == n) return std::nullopt;
  QVector y(n, Rational(0));
  for (std::size_t r = 0; r < piv.size(); ++r) y[piv[r]] = aug[r][n];
  return y;
}

inline NormalForm normal_form(const Family& F) {
  NormalForm nf;
  CoordinateSpace cs = build_coordinates(F);
  std::vector<std::pair<std::size_t, int>> np_keys;
  for (auto& [key, row] : cs.rows)
    if (cs.classes[key.first] == SigClass::NonPolynomial) np_keys.push_back(key);

  auto own_unknown = [&](std::size_t i) {
    for (std::size_t u = 0; u < cs.unknowns.size(); ++u)
      if (cs.unknowns[u] == std::pair<std::size_t, int>{i, 0}) return u;
    throw Error(Errc::precondition_violation, "missing unit multiplier");
  };

  for (std::size_t i = 0; i < F.size(); ++i) {
    std::vector<std::size_t> us;
    for (std::size_t u = 0; u < cs.unknowns.size(); ++u)
      if (std::find(nf.J.begin(), nf.J.end(), cs.unknowns[u].first) != nf.J.end()) us.push_back(u);
    std::size_t ui = own_unknown(i);
    QMatrix a;
    QVector b;
    for (auto& key : np_keys) {
      const QVector& row = cs.rows.at(key);
      QVector r;
      for (auto u : us) r.push_back(row[u]);
      a.push_back(r);
      b.push_back(row[ui]);
    }
    std::optional<QVector> y = us.empty() ? (std::all_of(b.begin(), b.end(), [](auto& x) { return x == 0; })
                                                 ? std::optional<QVector>(QVector{})
                                                 : std::nullopt)
                                          : solve(a, b, us.size());
    if (y) {
      nf.I.push_back(i);
      QVector x(cs.unknowns.size(), Rational(0));
      for (std::size_t j = 0; j < us.size(); ++j) x[us[j]] = (*y)[j];
      auto lam = cs.coefficients(x);
      for (auto j : nf.J) nf.lambda[{i, j}] = lam[j];
      HardyExpr rest = F[i] - cs.combination(x);
      nf.p[i] = rest.polynomial_part();
      nf.remainder[i] = rest - nf.p[i];
      continue;
    }
    if (!cs.rational_mode) {
      auto [m, err] = numeric_np_matrix(F, cs);
      // Columns of J plus i must be certified independent.
      std::vector<std::vector<BigFloat>> sub;
      for (auto& row : m) {
        std::vector<BigFloat> r;
        for (auto j : nf.J) r.push_back(row[j]);
        r.push_back(row[i]);
        sub.push_back(std::move(r));
      }
      if (certified_rank_lower_bound(sub, err) < nf.J.size() + 1) {
        nf.complete = false;
        nf.reason = "f_" + std::to_string(i + 1) +
                    " may depend on earlier functions through constants outside the declared basis";
      }
    }
    nf.J.push_back(i);
  }
  return nf;
}

// ---------------------------------------------------------------------------
// Verdicts

enum class VerdictKind { Holds, Fails, Unknown };

inline const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Holds: return "Holds";
    case VerdictKind::Fails: return "Fails";
    case VerdictKind::Unknown: return "Unknown";
  }
  return "?";
}

struct InfWitness {
  std::vector<SymbolicReal> c;
  IntPoly q;              // integer polynomial without constant term
  SymbolicReal residual;  // constant term of sum c_i f_i - q
  HardyExpr decay;        // terms tending to 0
};

struct IntCertificate {
  std::vector<IntPoly> q;  // Holds: jointly intersective family; Fails: saturated lattice basis
  IntersectivityReport report;
  bool shortcut = false;  // every p in poly(F) vanishes at 0
};

struct PWitness {
  Signature sig;
  std::size_t function = 0;
  int order = 0;
};

struct ConditionVerdict {
  VerdictKind kind = VerdictKind::Unknown;
  std::string detail;
  std::optional<InfWitness> inf;
  std::optional<IntCertificate> intersective;
  std::optional<PWitness> p;
};

struct WitnessCheck {
  bool ok = true;
  double max_deviation = 0;
};

/// |sum c_i f_i(t) - q(t) - r - decay(t)| at t in {1e3, 1e4, 1e5}, evaluated
/// numerically from constant values only (no product table).
inline WitnessCheck verify_inf_witness(const Family& F, const InfWitness& w, double tol = 1e-6) {
  WitnessCheck out;
  constexpr mpfr_prec_t bits = 320;
  for (double t : {1e3, 1e4, 1e5}) {
    BigFloat tt(t, bits);
    BigFloat s(bits);
    double err = 0;
    for (std::size_t i = 0; i < F.size(); ++i) {
      if (w.c[i].is_zero()) continue;
      Enclosure c = w.c[i].enclose(bits);
      EvalResult v = GermEvaluator(F[i]).eval(tt, bits);
      s += c.value * v.value;
      err += std::abs(c.value.to_double()) * v.error + c.error * std::abs(v.value.to_double());
    }
    BigFloat qv(bits), tp(1.0, bits);
    for (auto& a : w.q.coeffs()) {
      qv += BigFloat(a, bits) * tp;
      tp *= tt;
    }
    s -= qv;
    Enclosure r = w.residual.enclose(bits);
    s -= r.value;
    if (!w.decay.is_zero()) s -= GermEvaluator(w.decay).eval(tt, bits).value;
    double dev = std::abs(s.to_double()) + err;
    out.max_deviation = std::max(out.max_deviation, dev);
    if (!(dev < tol)) out.ok = false;
  }
  return out;
}

inline std::string witness_to_string(const InfWitness& w) {
  std::string s = "c=(";
  for (std::size_t i = 0; i < w.c.size(); ++i) s += (i ? ", " : "") + w.c[i].to_string();
  s += "), q=" + w.q.to_string() + ", residual=" + w.residual.to_string();
  if (!w.decay.is_zero()) s += ", decay=" + w.decay.to_string();
  return s;
}

/// Condition (1): every nonzero combination stays unboundedly far from Z[t].
inline ConditionVerdict check_condition_INF(const Family& F) {
  ConditionVerdict v;
  CoordinateSpace cs = build_coordinates(F);
  auto poly_nonunit = [&](std::size_t si, int s) {
    return cs.classes[si] == SigClass::NonPolynomial ||
           (cs.classes[si] == SigClass::Polynomial && cs.sigs[si].poly_degree() >= 1 && s != 0);
  };
  QMatrix cons = cs.select(poly_nonunit);
  auto K = kernel(cons, cs.unknowns.size());
  if (K.empty()) {
    if (cs.rational_mode) {
      v.kind = VerdictKind::Holds;
      v.detail = "no nonzero combination cancels the non-polynomial part with integer polynomial part";
      return v;
    }
    auto [m, err] = numeric_np_matrix(F, cs);
    if (certified_rank_lower_bound(m, err) == F.size()) {
      v.kind = VerdictKind::Holds;
      v.detail = "non-polynomial coefficient matrix has full column rank over R";
    } else {
      v.kind = VerdictKind::Unknown;
      v.detail = "real combinations outside the declared constant basis cannot be excluded";
    }
    return v;
  }
  // Prefer a bounded combination (q = 0).
  QMatrix cons0 = cs.select([&](std::size_t si, int s) {
    return poly_nonunit(si, s) || (cs.classes[si] == SigClass::Polynomial && cs.sigs[si].poly_degree() >= 1);
  });
  auto K0 = kernel(cons0, cs.unknowns.size());
  QVector x;
  if (!K0.empty()) {
    ZVector z = primitive_integer(K0.front());
    for (auto& zi : z) x.emplace_back(zi);
  } else {
    x = K.front();
    HardyExpr g = cs.combination(x);
    int D = max_poly_degree({g});
    QVector top;
    for (int d = D; d >= 1; --d) top.push_back(g.poly_coeff(d).rational_value());
    ZVector z = primitive_integer(top);
    Rational scale;
    for (std::size_t j = 0; j < top.size(); ++j)
      if (top[j] != 0) {
        scale = Rational(z[j]) / top[j];
        break;
      }
    for (auto& xi : x) xi *= scale;
  }
  HardyExpr g = cs.combination(x);
  InfWitness w;
  w.c = cs.coefficients(x);
  std::vector<BigInt> qc{BigInt(0)};
  for (auto& t : g.terms()) {
    if (classify(t.sig) == SigClass::Polynomial) {
      int d = t.sig.poly_degree();
      if (d == 0) {
        w.residual = t.coeff;
      } else {
        if (qc.size() <= static_cast<std::size_t>(d)) qc.resize(static_cast<std::size_t>(d) + 1, BigInt(0));
        Rational a = t.coeff.rational_value();
        qc[static_cast<std::size_t>(d)] = a.get_num();
      }
    } else if (classify(t.sig) == SigClass::Decaying) {
      w.decay = w.decay + HardyExpr({t}, g.basis());
    } else {
      throw Error(Errc::precondition_violation, "internal: witness has a non-polynomial term");
    }
  }
  w.q = IntPoly(qc);
  v.kind = VerdictKind::Fails;
  v.detail = witness_to_string(w);
  v.inf = std::move(w);
  return v;
}

/// Smallest rationally defined space containing the given polynomials
/// (requires declared independence of all constants when coefficients are
/// irrational). Returns coefficient rows, constant term first.
inline std::optional<QMatrix> rational_closure(const std::vector<HardyExpr>& ps, int D) {
  QMatrix rows;
  for (auto& p : ps) {
    std::map<int, QVector> by_symbol;
    for (auto& t : p.terms()) {
      if (!t.sig.is_polynomial()) continue;
      for (auto& [s, q] : t.coeff.coords()) {
        auto& row = by_symbol[s];
        if (row.empty()) row.assign(static_cast<std::size_t>(D + 1), Rational(0));
        row[static_cast<std::size_t>(t.sig.poly_degree())] = q;
      }
    }
    if (by_symbol.size() > 1 && p.basis() && !p.basis()->all_independent()) return std::nullopt;
    for (auto& [s, row] : by_symbol) rows.push_back(row);
  }
  return rows;
}

/// Condition (2): poly(F) lies in the span of a jointly intersective family.
/// The integer points of the rational closure of poly(F) form a lattice; a
/// jointly intersective family with the required span exists iff a lattice
/// basis is jointly intersective, which is screened up to modulus M.
inline ConditionVerdict check_condition_INT(const Family& F, std::uint64_t M = 10000) {
  ConditionVerdict v;
  PolySpan ps = poly_span(F);
  if (!ps.complete) {
    v.kind = VerdictKind::Unknown;
    v.detail = ps.reason;
    return v;
  }
  if (ps.basis.empty()) {
    v.kind = VerdictKind::Holds;
    v.detail = "poly span is empty";
    v.intersective = IntCertificate{{}, {}, true};
    return v;
  }
  int D = max_poly_degree(ps.basis);
  auto closure = rational_closure(ps.basis, D);
  if (!closure) {
    v.kind = VerdictKind::Unknown;
    v.detail = "rational closure needs independent constants";
    return v;
  }
  bool vanish = std::all_of(closure->begin(), closure->end(), [](auto& r) { return r[0] == 0; });
  if (vanish) {
    IntCertificate cert;
    cert.shortcut = true;
    for (int i = 1; i <= D; ++i) {
      std::vector<BigInt> c(static_cast<std::size_t>(i) + 1, BigInt(0));
      c.back() = 1;
      cert.q.emplace_back(c);
    }
    v.kind = VerdictKind::Holds;
    v.detail = "every p in poly span satisfies p(0)=0";
    v.intersective = std::move(cert);
    return v;
  }
  std::size_t n = static_cast<std::size_t>(D + 1);
  auto comp = kernel(*closure, n);  // orthogonal complement
  std::vector<ZVector> eqs;
  for (auto& y : comp) eqs.push_back(primitive_integer(y));
  auto lattice = integer_kernel(eqs, n);
  IntCertificate cert;
  for (auto& z : lattice) cert.q.emplace_back(z);
  cert.report = jointly_intersective_up_to(cert.q, M);
  if (cert.report.all_pass) {
    v.kind = VerdictKind::Holds;
    v.detail = "lattice basis jointly intersective for all prime powers <= " + std::to_string(M);
  } else {
    v.kind = VerdictKind::Fails;
    v.detail = "no common root modulo " + std::to_string(cert.report.failing_modulus);
  }
  v.intersective = std::move(cert);
  return v;
}

// ---------------------------------------------------------------------------
// Weights

struct Weight {
  enum class Kind { Germ, ExpSqrtLog } kind = Kind::Germ;
  HardyExpr germ;
  std::string name;

  static Weight from_germ(HardyExpr W, std::string name = "") {
    Weight w;
    w.germ = std::move(W);
    w.name = name.empty() ? w.germ.to_string() : std::move(name);
    return w;
  }
  static Weight exp_sqrt_log() {
    Weight w;
    w.kind = Kind::ExpSqrtLog;
    w.name = "exp(sqrt(log t))";
    return w;
  }
  static Weight cesaro() { return from_germ(HardyExpr::power(1), "t"); }

  /// Germ asymptotic to log W.
  HardyExpr log_germ() const {
    if (kind == Kind::ExpSqrtLog) return HardyExpr::monomial(SymbolicReal(1), Signature(SymbolicReal(), {Rational(1, 2)}));
    const GermTerm& lead = germ.leading();
    if (!lead.sig.t_exp.is_zero()) return HardyExpr::monomial(lead.sig.t_exp, Signature(SymbolicReal(), {Rational(1)}));
    for (std::size_t j = 0; j < lead.sig.log_exps.size(); ++j)
      if (lead.sig.log_exps[j] != 0) {
        std::vector<Rational> logs(j + 2, Rational(0));
        logs.back() = 1;
        return HardyExpr::monomial(SymbolicReal(lead.sig.log_exps[j]), Signature(SymbolicReal(), logs));
      }
    return HardyExpr::constant(SymbolicReal(1));
  }

  /// 1 < W << t.
  void check_growth() const {
    if (kind == Kind::ExpSqrtLog) return;
    if (germ.is_zero() || !prec(HardyExpr::constant(SymbolicReal(1)), germ) || !ll(germ, HardyExpr::power(1)))
      throw Error(Errc::precondition_violation, "weight must satisfy 1 < W << t: " + name);
    if (germ.leading().coeff.sign() <= 0) throw Error(Errc::precondition_violation, "weight must be positive");
  }
};

/// Ladder of candidate weights, fastest growth first.
inline std::vector<Weight> weight_ladder() {
  auto logt = [](int depth, const Rational& r) { return Signature::single(SymbolicReal(), r, depth); };
  return {
      Weight::from_germ(HardyExpr::power(1), "t"),
      Weight::from_germ(HardyExpr::monomial(SymbolicReal(1), Signature(SymbolicReal(1), {Rational(-1)})), "t/log t"),
      Weight::from_germ(HardyExpr::power(Rational(1, 2)), "t^(1/2)"),
      Weight::from_germ(HardyExpr::power(Rational(1, 3)), "t^(1/3)"),
      Weight::exp_sqrt_log(),
      Weight::from_germ(HardyExpr::monomial(SymbolicReal(1), logt(1, 1)), "log t"),
      Weight::from_germ(HardyExpr::monomial(SymbolicReal(1), logt(2, 1)), "log log t"),
  };
}

/// Property (P): every non-polynomial signature among derivatives of F is
/// either bounded or dominates log W.
inline ConditionVerdict check_property_P(const Family& F, const Weight& W, int max_order = 64) {
  W.check_growth();
  ConditionVerdict v;
  HardyExpr lw = W.log_germ();
  const Signature& lsig = lw.leading().sig;
  Signature one;
  for (std::size_t i = 0; i < F.size(); ++i) {
    HardyExpr g = F[i];
    int m = 0;
    for (;; ++m) {
      if (g.is_zero() || compare(g.leading().sig, one) <= 0) break;
      if (m > max_order) {
        v.kind = VerdictKind::Unknown;
        v.detail = "derivatives of f_" + std::to_string(i + 1) + " not bounded by order " + std::to_string(max_order);
        return v;
      }
      for (auto& t : g.terms()) {
        if (t.sig.is_polynomial()) continue;
        if (compare(t.sig, one) <= 0) continue;
        if (compare(t.sig, lsig) > 0) continue;
        v.kind = VerdictKind::Fails;
        v.p = PWitness{t.sig, i, m};
        v.detail = "signature " + signature_to_string(t.sig) + " in derivative " + std::to_string(m) + " of f_" +
                   std::to_string(i + 1) + " is neither bounded nor dominating log W = " + lw.to_string();
        return v;
      }
      g = derivative(g);
    }
  }
  v.kind = VerdictKind::Holds;
  v.detail = "all derivative signatures bounded or dominating log W = " + lw.to_string();
  return v;
}

inline Weight choose_weight(const Family& F) {
  for (auto& W : weight_ladder())
    if (check_property_P(F, W).kind == VerdictKind::Holds) return W;
  throw Error(Errc::no_compatible_weight, "no weight on the ladder satisfies Property (P)");
}

}  // namespace hfl
