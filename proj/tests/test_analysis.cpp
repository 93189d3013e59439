#include <hfl/builtins.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace hfl;

namespace {

HardyExpr t(const Rational& c, const Rational& coeff = 1) { return HardyExpr::power(c, coeff); }
HardyExpr logt(const Rational& tc = 0, const Rational& coeff = 1) {
  return HardyExpr::monomial(SymbolicReal(coeff), Signature(SymbolicReal(tc), {Rational(1)}));
}

bool decaying(const HardyExpr& f) {
  for (auto& term : f.terms())
    if (!term.sig.is_decaying()) return false;
  return true;
}

}  // namespace

TEST(NormalForm, SquareRootPair) {
  Family F = {t(1) - t(Rational(1, 2)), t(1) + t(Rational(1, 2))};
  NormalForm nf = normal_form(F);
  ASSERT_TRUE(nf.complete) << nf.reason;
  EXPECT_EQ(nf.J, std::vector<std::size_t>({0}));
  EXPECT_EQ(nf.I, std::vector<std::size_t>({1}));
  EXPECT_EQ(nf.lambda.at({1, 0}), SymbolicReal(-1));
  EXPECT_EQ(nf.p.at(1), t(1, 2));
  // f_2 + f_1 - 2t vanishes identically.
  EXPECT_TRUE(nf.remainder.at(1).is_zero());
}

TEST(NormalForm, SingleMembers) {
  NormalForm a = normal_form({t(Rational(3, 2))});
  EXPECT_EQ(a.J, std::vector<std::size_t>({0}));
  EXPECT_TRUE(a.I.empty());
  HardyExpr q = t(2) + t(0, Rational(1, 2));
  NormalForm b = normal_form({q});
  EXPECT_TRUE(b.J.empty());
  EXPECT_EQ(b.I, std::vector<std::size_t>({0}));
  EXPECT_EQ(b.p.at(0), q);
}

TEST(NormalForm, ReconstructionLeavesDecayingTerms) {
  Family F = {t(Rational(3, 2)) + t(1), t(Rational(3, 2), 2) + t(2) + t(Rational(-1, 2)), t(Rational(4, 3))};
  NormalForm nf = normal_form(F);
  ASSERT_TRUE(nf.complete);
  ASSERT_EQ(nf.I, std::vector<std::size_t>({1}));
  for (auto i : nf.I) {
    HardyExpr r = F[i] - nf.p.at(i);
    for (auto& [key, lam] : nf.lambda)
      if (key.first == i) r = r - lam * F[key.second];
    EXPECT_TRUE(decaying(r)) << r.to_string();
    EXPECT_EQ(r, nf.remainder.at(i));
  }
}

TEST(PolySpan, ExampleOneIsSpanOfT) {
  FamilyDoc ex1 = example1_family();
  PolySpan ps = poly_span(ex1.family);
  ASSERT_TRUE(ps.complete) << ps.reason;
  ASSERT_EQ(ps.basis.size(), 1u);
  EXPECT_TRUE(ps.basis[0].is_polynomial());
  EXPECT_EQ(degree(ps.basis[0]), 1);
  EXPECT_EQ(ps.basis[0].terms().size(), 1u);
}

TEST(PolySpan, ExampleTwoIsTwoDimensional) {
  PolySpan ps = poly_span(example2_family().family);
  ASSERT_TRUE(ps.complete) << ps.reason;
  EXPECT_EQ(ps.basis.size(), 2u);
}

TEST(PolySpan, EmptyForPurelyFractionalPower) {
  PolySpan ps = poly_span({t(Rational(3, 2))});
  EXPECT_TRUE(ps.complete);
  EXPECT_TRUE(ps.basis.empty());
}

TEST(PolySpan, WitnessesReproduceBasis) {
  FamilyDoc ex = example1_family();
  PolySpan ps = poly_span(ex.family);
  for (std::size_t j = 0; j < ps.basis.size(); ++j) {
    HardyExpr comb;
    for (std::size_t i = 0; i < ex.family.size(); ++i) comb = comb + ps.witnesses[j][i] * ex.family[i];
    EXPECT_TRUE(decaying(comb - ps.basis[j])) << (comb - ps.basis[j]).to_string();
  }
}

TEST(ConditionINF, ExampleTwoFailsWithWitness) {
  FamilyDoc ex = example2_family();
  ConditionVerdict v = check_condition_INF(ex.family);
  ASSERT_EQ(v.kind, VerdictKind::Fails) << v.detail;
  ASSERT_TRUE(v.inf);
  const InfWitness& w = *v.inf;
  // Up to scaling, c = (alpha, beta) and q = t^3 + t^2 with residual 1/2.
  int alpha = *ex.basis->index_of("alpha"), beta = *ex.basis->index_of("beta");
  ASSERT_EQ(w.c.size(), 2u);
  ASSERT_EQ(w.c[0].coords().size(), 1u);
  Rational s = w.c[0].coord(alpha);
  ASSERT_NE(s, 0);
  EXPECT_EQ(w.c[1], SymbolicReal::symbol(beta, ex.basis, s));
  EXPECT_EQ(w.q, IntPoly(std::vector<BigInt>{BigInt(0), BigInt(0), BigInt(s), BigInt(s)}));
  EXPECT_EQ(w.residual, SymbolicReal(Rational(s / 2)));
  EXPECT_TRUE(w.decay.is_zero());
  WitnessCheck chk = verify_inf_witness(ex.family, w);
  EXPECT_TRUE(chk.ok) << chk.max_deviation;
}

TEST(ConditionINF, Examples) {
  EXPECT_EQ(check_condition_INF({t(Rational(3, 2)), t(Rational(4, 3))}).kind, VerdictKind::Holds);
  ConditionVerdict sq = check_condition_INF({t(2)});
  ASSERT_EQ(sq.kind, VerdictKind::Fails);
  EXPECT_TRUE(verify_inf_witness({t(2)}, *sq.inf).ok);
  // f_1 + f_2 = 2t lies in Z[t].
  FamilyDoc ex1 = example1_family();
  ConditionVerdict e1 = check_condition_INF(ex1.family);
  ASSERT_EQ(e1.kind, VerdictKind::Fails);
  EXPECT_EQ(e1.inf->c[0], e1.inf->c[1]);
  EXPECT_TRUE(e1.inf->residual.is_zero());
  EXPECT_TRUE(verify_inf_witness(ex1.family, *e1.inf).ok);
}

TEST(ConditionINF, EveryWitnessVerifies) {
  std::vector<Family> fams = {{t(2) + t(Rational(1, 2))},
                              {t(1) - t(Rational(1, 2)), t(1) + t(Rational(1, 2))},
                              {t(3, Rational(1, 3)) + t(0, Rational(1, 5))},
                              {t(Rational(3, 2)) + t(1), t(Rational(3, 2)) + t(Rational(-1, 2))}};
  for (auto& F : fams) {
    ConditionVerdict v = check_condition_INF(F);
    if (v.kind != VerdictKind::Fails) continue;
    EXPECT_TRUE(verify_inf_witness(F, *v.inf).ok) << v.detail;
  }
  EXPECT_EQ(check_condition_INF(fams[1]).kind, VerdictKind::Fails);
}

TEST(ConditionINT, Examples) {
  ConditionVerdict e1 = check_condition_INT(example1_family().family);
  ASSERT_EQ(e1.kind, VerdictKind::Holds) << e1.detail;
  ASSERT_TRUE(e1.intersective);
  EXPECT_TRUE(e1.intersective->shortcut);
  EXPECT_EQ(e1.intersective->q, std::vector<IntPoly>({IntPoly{0, 1}}));

  ConditionVerdict third = check_condition_INT({t(1) + t(0, Rational(1, 3))});
  ASSERT_EQ(third.kind, VerdictKind::Fails) << third.detail;
  EXPECT_EQ(third.intersective->report.failing_modulus, 3u);

  EXPECT_EQ(check_condition_INT({t(Rational(3, 2))}).kind, VerdictKind::Holds);
}

TEST(PropertyP, Examples) {
  EXPECT_EQ(check_property_P({t(Rational(3, 2))}, Weight::cesaro()).kind, VerdictKind::Holds);
  ConditionVerdict v = check_property_P({logt(1)}, Weight::cesaro());
  ASSERT_EQ(v.kind, VerdictKind::Fails);
  ASSERT_TRUE(v.p);
  EXPECT_EQ(v.p->order, 1);
  EXPECT_EQ(check_property_P({t(2)}, Weight::cesaro()).kind, VerdictKind::Holds);
  EXPECT_THROW(check_property_P({t(2)}, Weight::from_germ(t(2))), Error);
}

TEST(ChooseWeight, Ladder) {
  EXPECT_EQ(choose_weight({t(Rational(3, 2))}).name, "t");
  EXPECT_EQ(choose_weight({t(2)}).name, "t");
  EXPECT_EQ(choose_weight({logt()}).name, "exp(sqrt(log t))");
  Weight w = choose_weight({logt()});
  EXPECT_EQ(check_property_P({logt()}, w).kind, VerdictKind::Holds);
}

TEST(ChooseWeight, NoCompatibleWeight) {
  HardyExpr llt = HardyExpr::monomial(SymbolicReal(1), Signature::single(SymbolicReal(), 1, 3));
  try {
    choose_weight({llt});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::no_compatible_weight);
  }
}

TEST(IO, FamilyRoundTrip) {
  for (const char* name : {"example1", "example2", "example4", "example5", "example8", "corollaryA2"}) {
    FamilyDoc doc = builtin_family(name);
    json j = family_to_json(doc);
    FamilyDoc back = parse_family(json::parse(j.dump()));
    EXPECT_EQ(family_to_json(back), j) << name;
    ASSERT_EQ(back.family.size(), doc.family.size());
    for (std::size_t i = 0; i < doc.family.size(); ++i)
      EXPECT_NEAR(eval_double(back.family[i], 1234.5), eval_double(doc.family[i], 1234.5), 1e-6) << name;
  }
}

TEST(IO, SingleLogForm) {
  json j = json::parse(R"({"functions": [{"terms": [{"coeff": "2", "t_exp": "1", "log_exp": "1", "log_depth": 2}]}]})");
  FamilyDoc doc = parse_family(j);
  EXPECT_EQ(doc.family[0], HardyExpr::monomial(SymbolicReal(2), Signature::single(SymbolicReal(1), 1, 2)));
  EXPECT_EQ(doc.names[0], "f1");
}

TEST(IO, SchemaErrorsNameThePath) {
  const char* bad[] = {
      R"({"functions": []})",
      R"({"functions": [{"terms": [{"coeff": "x"}]}]})",
      R"({"functions": [{"terms": [{"coeff": {"gamma": "1"}}]}]})",
      R"({"constants": [{"name": "a"}], "functions": [{"terms": [{"coeff": "1"}]}]})",
      R"({"schema_version": 7, "functions": [{"terms": [{"coeff": "1"}]}]})",
  };
  for (const char* s : bad) {
    try {
      parse_family(json::parse(s));
      ADD_FAILURE() << s;
    } catch (const Error& e) {
      EXPECT_EQ(e.code(), Errc::schema_error) << s;
    }
  }
  try {
    parse_family(json::parse(R"({"functions": [{"terms": [{"coeff": "1", "t_exp": "1/0"}]}]})"));
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("functions[0].terms[0].t_exp"), std::string::npos) << e.what();
  }
}
