#include "qwe/tensor_enum.hpp"

#include <gtest/gtest.h>

#include <string>
#include <vector>

#include "qwe/dense_oracle.hpp"
#include "qwe/enum_poly.hpp"
#include "qwe/macwilliams.hpp"
#include "qwe/scalar_enum.hpp"
#include "qwe/stab_group.hpp"

using namespace qwe;

namespace {

StabilizerGroup make_group(uint32_t q, std::initializer_list<const char*> gens,
                           size_t n_if_empty = 0) {
  std::vector<PhasedPauli> ops;
  size_t n = n_if_empty;
  for (const char* g : gens) {
    auto op = parse_phased_pauli("+1", g, q);
    n = op.n();
    ops.push_back(op);
  }
  return StabilizerGroup(q, n, std::move(ops));
}

StabilizerGroup bell() { return make_group(2, {"XX", "ZZ"}); }
StabilizerGroup qutrit_bell() { return make_group(3, {"X1X1", "Z1Z2"}); }
StabilizerGroup five_one_three() {
  return make_group(2, {"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"});
}
StabilizerGroup four_two_two() { return make_group(2, {"XXXX", "ZZZZ"}); }
StabilizerGroup four_one_two() {
  return make_group(2, {"IXZY", "XIYZ", "ZZZZ"});
}
// Planar surface code, distance 2: four grid qubits and one center qubit.
StabilizerGroup five_one_two() {
  return make_group(2, {"XXIIX", "IIXXX", "ZIZIZ", "IZIZZ"});
}

WeightScheme scalar_scheme(uint32_t q) {
  return WeightScheme{SchemeKind::shor_laflamme, q};
}

LegoBlock lego(StabilizerGroup g, std::vector<std::string> legs) {
  return LegoBlock{std::move(g), std::move(legs)};
}

// Single scalar-scheme monomial coeff * w^we z^ze.
EnumPoly wz(uint32_t q, uint64_t we, uint64_t ze, const Rat& coeff = Rat(1)) {
  EnumPoly p(scalar_scheme(q), true);
  p.add_term({we, ze}, Cyc(q, coeff));
  return p;
}

EnumPoly scalar_of(uint32_t q, int n,
                   const std::vector<std::pair<int, int64_t>>& z_coeffs) {
  EnumPoly p(scalar_scheme(q), true);
  for (const auto& [d, c] : z_coeffs)
    p.add_term({static_cast<uint64_t>(n - d), static_cast<uint64_t>(d)},
               Cyc(q, Rat(c)));
  return p;
}

PauliString ps(const char* text, uint32_t q = 2) {
  return parse_pauli_string(text, q);
}

// All q^2 single-site Pauli strings.
std::vector<PauliString> site_paulis(uint32_t q) {
  std::vector<PauliString> out;
  for (uint32_t a = 0; a < q; ++a)
    for (uint32_t b = 0; b < q; ++b) {
      PauliString u(q, 1);
      u.x[0] = static_cast<uint8_t>(a);
      u.z[0] = static_cast<uint8_t>(b);
      out.push_back(u);
    }
  return out;
}

TEST(TensorEnum, BellRankOneFromLego) {
  TensorEnumerator t =
      from_lego(lego(bell(), {"a", "b"}), {"b"}, scalar_scheme(2));
  EXPECT_EQ(t.rank(), 1u);
  EXPECT_EQ(t.open_legs, std::vector<std::string>({"b"}));
  EXPECT_EQ(t.entries.size(), 4u);
  EXPECT_TRUE(is_diagonal(t));
  EXPECT_TRUE(entry_of(t, ps("I"), ps("I")) == wz(2, 1, 0));
  EXPECT_TRUE(entry_of(t, ps("X"), ps("X")) == wz(2, 0, 1));
  EXPECT_TRUE(entry_of(t, ps("Y"), ps("Y")) == wz(2, 0, 1));
  EXPECT_TRUE(entry_of(t, ps("Z"), ps("Z")) == wz(2, 0, 1));
}

TEST(TensorEnum, FourOneTwoRankTwoIsDiagonal) {
  TensorEnumerator t = from_lego(lego(four_one_two(), {"p1", "p2", "p3", "p4"}),
                                 {"p3", "p4"}, scalar_scheme(2));
  EXPECT_EQ(t.rank(), 2u);
  EXPECT_EQ(t.entries.size(), 8u);
  // All eight terms are diagonal: every group element has a distinct
  // restriction to the closed legs, so no cross pairs survive.
  EXPECT_TRUE(is_diagonal(t));
  EXPECT_TRUE(reduced(t) == t);
  EXPECT_TRUE(entry_of(t, ps("II"), ps("II")) == wz(2, 2, 0));
  EXPECT_TRUE(entry_of(t, ps("ZY"), ps("ZY")) == wz(2, 1, 1));
  EXPECT_TRUE(entry_of(t, ps("YZ"), ps("YZ")) == wz(2, 1, 1));
  EXPECT_TRUE(entry_of(t, ps("IX"), ps("IX")) == wz(2, 0, 2));
  EXPECT_TRUE(entry_of(t, ps("XI"), ps("XI")) == wz(2, 0, 2));
  EXPECT_TRUE(entry_of(t, ps("XX"), ps("XX")) == wz(2, 0, 2));
  EXPECT_TRUE(entry_of(t, ps("ZZ"), ps("ZZ")) == wz(2, 0, 2));
  EXPECT_TRUE(entry_of(t, ps("YY"), ps("YY")) == wz(2, 0, 2));
}

TEST(TensorEnum, FiveOneThreeEncodingRankZero) {
  StabilizerGroup g = five_one_three();
  StabilizerGroup enc = encoding_state(g, logical_operators(g));
  TensorEnumerator t = from_lego(
      lego(enc, {"p1", "p2", "p3", "p4", "p5", "L"}), {}, scalar_scheme(2));
  EXPECT_EQ(t.rank(), 0u);
  EnumPoly s = scalar_value(t);
  EXPECT_TRUE(s == scalar_of(2, 6, {{0, 1}, {4, 45}, {6, 18}}));
  EXPECT_TRUE(s == enumerators_by_counting(enc, scalar_scheme(2)).a);
  // Pure stabilizer lego: the dual transform fixes its tensor.
  EXPECT_TRUE(psi_transform(t) == t);
}

TEST(TensorEnum, FiveOneThreeLogicalLegTensor) {
  StabilizerGroup g = five_one_three();
  StabilizerGroup enc = encoding_state(g, logical_operators(g));
  TensorEnumerator t = from_lego(
      lego(enc, {"p1", "p2", "p3", "p4", "p5", "L"}), {"L"}, scalar_scheme(2));
  EXPECT_EQ(t.rank(), 1u);
  EXPECT_TRUE(is_diagonal(t));
  // (I, I) entry is the count-convention a-polynomial of the code...
  EXPECT_TRUE(entry_of(t, ps("I"), ps("I")) ==
              scalar_of(2, 5, {{0, 1}, {4, 15}}));
  // ...and the diagonal sum is the count-convention b-polynomial.
  EnumPoly diag_sum(scalar_scheme(2), true);
  for (const PauliString& p : site_paulis(2))
    diag_sum.accumulate_scaled(entry_of(t, p, p), 0, Cyc::one(2));
  EXPECT_TRUE(diag_sum ==
              scalar_of(2, 5, {{0, 1}, {3, 30}, {4, 15}, {5, 18}}));

  // Encoding tensors are pure legos, so the dual transform fixes t and the
  // diagonal sum of the image is again the b-polynomial.
  TensorEnumerator u = psi_transform(t);
  EXPECT_TRUE(u == t);
  EnumPoly diag_sum_u(scalar_scheme(2), true);
  for (const PauliString& p : site_paulis(2))
    diag_sum_u.accumulate_scaled(entry_of(u, p, p), 0, Cyc::one(2));
  EXPECT_TRUE(diag_sum_u ==
              scalar_of(2, 5, {{0, 1}, {3, 30}, {4, 15}, {5, 18}}));
}

TEST(TensorEnum, PsiRankZeroIsScalarMacWilliams) {
  // k = 1 lego: all five legs closed gives the count a-polynomial; the dual
  // transform of the rank-0 tensor is exactly the scalar MacWilliams image.
  TensorEnumerator t = from_lego(
      lego(five_one_three(), {"p1", "p2", "p3", "p4", "p5"}), {},
      scalar_scheme(2));
  EnumPoly s = scalar_value(t);
  EXPECT_TRUE(s == scalar_of(2, 5, {{0, 1}, {4, 15}}));
  TensorEnumerator u = psi_transform(t);
  EXPECT_TRUE(scalar_value(u) == mw_scalar(s, 5, 2));
  EXPECT_TRUE(psi_transform(u) == t);  // involution at rank 0
}

TEST(TensorEnum, PsiDiagonalMatchesWignerKernel) {
  TensorEnumerator t =
      from_lego(lego(bell(), {"a", "b"}), {"b"}, scalar_scheme(2));
  TensorEnumerator u = psi_transform(t);
  EXPECT_TRUE(u == t);  // pure lego fixed point

  // Independent check of the diagonal action: (1/q) sum_E zeta^{<E,F>} p_E
  // with the variables already substituted.
  const auto forms = mw_transform(scalar_scheme(2)).forms;
  for (const PauliString& f : site_paulis(2)) {
    EnumPoly expect(scalar_scheme(2), true);
    for (const PauliString& e : site_paulis(2)) {
      EnumPoly sub = entry_of(t, e, e).substitute_linear(forms);
      Cyc c = Cyc::root_of_unity(2, 4 * omega_exp(e, f));
      c.scale(Rat(1, 2));
      expect.accumulate_scaled(sub, 0, c);
    }
    EXPECT_TRUE(entry_of(u, f, f) == expect)
        << "Wigner mismatch at F = " << pauli_string_to_text(f);
  }

  // A maximally mixed single site spreads uniformly under the transform.
  TensorEnumerator triv =
      from_lego(lego(make_group(2, {}, 1), {"a"}), {"a"}, scalar_scheme(2));
  EXPECT_EQ(triv.entries.size(), 1u);
  TensorEnumerator tu = psi_transform(triv);
  EXPECT_EQ(tu.entries.size(), 4u);
  for (const PauliString& f : site_paulis(2)) {
    EnumPoly c(scalar_scheme(2), true);
    c.add_term({0, 0}, Cyc(2, Rat(1, 2)));
    EXPECT_TRUE(entry_of(tu, f, f) == c);
  }
}

TEST(TensorEnum, PsiInvolutionOnMixedAndQutritLegos) {
  StabilizerGroup g = five_one_three();
  StabilizerGroup enc = encoding_state(g, logical_operators(g));
  TensorEnumerator t = from_lego(
      lego(enc, {"p1", "p2", "p3", "p4", "p5", "L"}), {"L"}, scalar_scheme(2));

  // Mixed-state analogue: drop to the code lego itself (k = 1) with one leg
  // open; the dual image differs but the double image returns the original.
  TensorEnumerator code = from_lego(
      lego(five_one_three(), {"p1", "p2", "p3", "p4", "p5"}), {"p5"},
      scalar_scheme(2));
  TensorEnumerator code_dual = psi_transform(code);
  EXPECT_FALSE(code_dual == code);
  EXPECT_TRUE(psi_transform(code_dual) == code);

  TensorEnumerator tq =
      from_lego(lego(qutrit_bell(), {"a", "b"}), {"b"}, scalar_scheme(3));
  EXPECT_EQ(tq.entries.size(), 9u);
  EXPECT_TRUE(is_diagonal(tq));
  EXPECT_TRUE(entry_of(tq, ps("X0Z0", 3), ps("X0Z0", 3)) == wz(3, 1, 0));
  EXPECT_TRUE(entry_of(tq, ps("X1Z2", 3), ps("X1Z2", 3)) == wz(3, 0, 1));
  EXPECT_TRUE(psi_transform(tq) == tq);  // pure fixed point at q = 3
  EXPECT_TRUE(psi_transform(psi_transform(tq)) == tq);
  (void)t;
}

TEST(TensorEnum, PsiRankCap) {
  TensorEnumerator t = from_lego(
      lego(make_group(2, {}, 7), {"a", "b", "c", "d", "e", "f", "g"}),
      {"a", "b", "c", "d", "e", "f", "g"}, scalar_scheme(2));
  EXPECT_EQ(t.rank(), 7u);
  EXPECT_THROW(psi_transform(t), ResourceError);
  TensorEnumerator u = psi_transform(t, 7);  // explicit opt-in
  EXPECT_EQ(u.entries.size(), 16384u);  // 4^7 diagonal pairs
}

TEST(TensorEnum, TensorProductUnitAndBellPair) {
  TensorEnumerator t =
      from_lego(lego(bell(), {"a", "b"}), {"b"}, scalar_scheme(2));
  TensorEnumerator unit;
  unit.scheme = scalar_scheme(2);
  unit.entries.emplace(PairKey{}, EnumPoly::one(scalar_scheme(2), true));
  EXPECT_TRUE(tensor_product(t, unit) == t);
  EXPECT_TRUE(tensor_product(unit, t) == t);

  TensorEnumerator t1 =
      from_lego(lego(bell(), {"a1", "o1"}), {"o1"}, scalar_scheme(2));
  TensorEnumerator t2 =
      from_lego(lego(bell(), {"a2", "o2"}), {"o2"}, scalar_scheme(2));
  TensorEnumerator prod = tensor_product(t1, t2);
  EXPECT_EQ(prod.rank(), 2u);
  EXPECT_EQ(prod.entries.size(), 16u);
  EXPECT_TRUE(is_diagonal(prod));
  EXPECT_TRUE(entry_of(prod, ps("II"), ps("II")) == wz(2, 2, 0));
  EXPECT_TRUE(entry_of(prod, ps("XY"), ps("XY")) == wz(2, 0, 2));
  EXPECT_TRUE(entry_of(prod, ps("IZ"), ps("IZ")) == wz(2, 1, 1));

  EXPECT_THROW(tensor_product(t1, t1), ValidationError);

  // Rank-0 product is plain polynomial multiplication.
  TensorEnumerator s1 =
      from_lego(lego(bell(), {"a", "b"}), {}, scalar_scheme(2));
  TensorEnumerator s2 = tensor_product(s1, unit);
  EXPECT_TRUE(scalar_value(s2) == scalar_value(s1));
  TensorEnumerator s3 = tensor_product(s1, s1);
  EXPECT_TRUE(scalar_value(s3) == scalar_value(s1) * scalar_value(s1));
}

TEST(TensorEnum, TraceLegsEntanglementSwap) {
  TensorEnumerator t1 =
      from_lego(lego(bell(), {"a", "b"}), {"a", "b"}, scalar_scheme(2));
  EXPECT_EQ(t1.entries.size(), 16u);  // all-open tensor of a 4-element group
  TensorEnumerator t2 =
      from_lego(lego(bell(), {"c", "d"}), {"c", "d"}, scalar_scheme(2));
  TensorEnumerator tr = trace_legs(tensor_product(t1, t2), "b", "c");
  TensorEnumerator expect =
      from_lego(lego(bell(), {"a", "d"}), {"a", "d"}, scalar_scheme(2));
  EXPECT_TRUE(tr == expect);

  TensorEnumerator s = weighted_trace(tr, {"a", "d"});
  EXPECT_TRUE(scalar_value(s) == scalar_of(2, 2, {{0, 1}, {2, 3}}));
  EXPECT_TRUE(scalar_value(s) ==
              enumerators_by_counting(bell(), scalar_scheme(2)).a);
}

TEST(TensorEnum, TraceLegsQutritSwap) {
  TensorEnumerator t1 =
      from_lego(lego(qutrit_bell(), {"a", "b"}), {"a", "b"}, scalar_scheme(3));
  EXPECT_EQ(t1.entries.size(), 81u);
  TensorEnumerator t2 =
      from_lego(lego(qutrit_bell(), {"c", "d"}), {"c", "d"}, scalar_scheme(3));
  TensorEnumerator tr = trace_legs(tensor_product(t1, t2), "b", "c");
  TensorEnumerator expect =
      from_lego(lego(qutrit_bell(), {"a", "d"}), {"a", "d"}, scalar_scheme(3));
  EXPECT_TRUE(tr == expect);
}

TEST(TensorEnum, TraceIdentityOnlyLegsDropsThem) {
  TensorEnumerator t_id =
      from_lego(lego(make_group(2, {}, 2), {"u", "v"}), {"u", "v"},
                scalar_scheme(2));
  EXPECT_EQ(t_id.entries.size(), 1u);
  TensorEnumerator dropped = trace_legs(t_id, "u", "v");
  EXPECT_EQ(dropped.rank(), 0u);
  EXPECT_TRUE(scalar_value(dropped) == EnumPoly::one(scalar_scheme(2), true));

  TensorEnumerator t =
      from_lego(lego(bell(), {"a", "b"}), {"b"}, scalar_scheme(2));
  TensorEnumerator prod = tensor_product(t, t_id);
  TensorEnumerator back = trace_legs(prod, "u", "v");
  EXPECT_TRUE(back == t);
}

TEST(TensorEnum, TraceAnnihilationAndNormalization) {
  // |0> glued to |1>: the contraction postselects on an impossible outcome
  // and every term cancels exactly.
  TensorEnumerator t0 =
      from_lego(lego(make_group(2, {"Z"}), {"a"}), {"a"}, scalar_scheme(2));
  StabilizerGroup minus_z(2, 1, {parse_phased_pauli("-1", "Z", 2)});
  TensorEnumerator t1 =
      from_lego(lego(minus_z, {"b"}), {"b"}, scalar_scheme(2));
  TensorEnumerator tr = trace_legs(tensor_product(t0, t1), "a", "b");
  EXPECT_TRUE(tr.entries.empty());
  EXPECT_TRUE(scalar_value(tr).is_zero());
  EXPECT_THROW(normalize_identity(tr), ValidationError);

  // Gluing |0> to |0> keeps a consistent state and normalizes to 1.
  TensorEnumerator t0b =
      from_lego(lego(make_group(2, {"Z"}), {"b"}), {"b"}, scalar_scheme(2));
  TensorEnumerator ok = trace_legs(tensor_product(t0, t0b), "a", "b");
  TensorEnumerator okn = normalize_identity(ok);
  EXPECT_TRUE(scalar_value(okn) == EnumPoly::one(scalar_scheme(2), true));

  // normalize_identity divides a uniformly scaled tensor back to counts.
  TensorEnumerator bell_t =
      from_lego(lego(bell(), {"a", "b"}), {"b"}, scalar_scheme(2));
  TensorEnumerator unit3;
  unit3.scheme = scalar_scheme(2);
  unit3.entries.emplace(PairKey{},
                        EnumPoly::constant(scalar_scheme(2), true, Cyc(2, Rat(3))));
  TensorEnumerator scaled = tensor_product(bell_t, unit3);
  EXPECT_TRUE(normalize_identity(scaled) == bell_t);
}

TEST(TensorEnum, WeightedTraceFullEqualsCountingA) {
  TensorEnumerator t =
      from_lego(lego(four_two_two(), {"p1", "p2", "p3", "p4"}), {"p1", "p3"},
                scalar_scheme(2));
  TensorEnumerator s = weighted_trace(t, {"p1", "p3"});
  EXPECT_TRUE(scalar_value(s) ==
              enumerators_by_counting(four_two_two(), scalar_scheme(2)).a);

  // Reducing one leg at a time composes to the same scalar.
  TensorEnumerator s2 = weighted_trace(weighted_trace(t, {"p1"}), {"p3"});
  EXPECT_TRUE(scalar_value(s2) == scalar_value(s));

  // Empty reduction and rank-0 reduction are identities.
  EXPECT_TRUE(weighted_trace(t, {}) == t);
  EXPECT_TRUE(weighted_trace(s, {}) == s);
}

TEST(TensorEnum, WeightedTraceCommutesWithTraceLegs) {
  StabilizerGroup ghz = make_group(2, {"XXX", "ZZI", "IZZ"});
  TensorEnumerator tg = from_lego(lego(ghz, {"g1", "g2", "g3"}),
                                  {"g1", "g2", "g3"}, scalar_scheme(2));
  TensorEnumerator tb =
      from_lego(lego(bell(), {"c", "d"}), {"c", "d"}, scalar_scheme(2));
  TensorEnumerator prod = tensor_product(tg, tb);

  TensorEnumerator a = trace_legs(weighted_trace(prod, {"g1"}), "g3", "c");
  TensorEnumerator b = weighted_trace(trace_legs(prod, "g3", "c"), {"g1"});
  EXPECT_TRUE(a == b);
}

TEST(TensorEnum, TraceProductMatchesMergedLego) {
  // Teleporting one GHZ leg through a Bell pair leaves the GHZ state: the
  // contraction must equal the directly built lego exactly, including phases.
  StabilizerGroup ghz = make_group(2, {"XXX", "ZZI", "IZZ"});
  TensorEnumerator tg = from_lego(lego(ghz, {"g1", "g2", "g3"}),
                                  {"g1", "g2", "g3"}, scalar_scheme(2));
  TensorEnumerator tb =
      from_lego(lego(bell(), {"c", "d"}), {"c", "d"}, scalar_scheme(2));
  TensorEnumerator tr = trace_legs(tensor_product(tg, tb), "g3", "c");
  TensorEnumerator expect = from_lego(lego(ghz, {"g1", "g2", "d"}),
                                      {"g1", "g2", "d"}, scalar_scheme(2));
  EXPECT_TRUE(tr == expect);
}

TEST(TensorEnum, TwoFiveOneTwoLegosAgainstDenseOracle) {
  // Contract one leg pair between two distance-2 surface-code legos and
  // compare the fully reduced scalar enumerator with the dense oracle of the
  // merged 8-qubit operator.
  StabilizerGroup g = five_one_two();
  TensorEnumerator t1 =
      from_lego(lego(g, {"a1", "a2", "a3", "a4", "a5"}),
                {"a1", "a2", "a3", "a4", "a5"}, scalar_scheme(2));
  TensorEnumerator t2 =
      from_lego(lego(g, {"b1", "b2", "b3", "b4", "b5"}),
                {"b1", "b2", "b3", "b4", "b5"}, scalar_scheme(2));
  TensorEnumerator tr = trace_legs(tensor_product(t1, t2), "a5", "b5");
  EXPECT_EQ(tr.rank(), 8u);
  TensorEnumerator s = weighted_trace(
      tr, {"a1", "a2", "a3", "a4", "b1", "b2", "b3", "b4"});
  EnumPoly a_tensor = scalar_value(normalize_identity(s));

  // Dense side: glue the last site of each projector with a Bell pair.  Site
  // 4 is the least significant base-2 digit of the matrix index.
  DMat m1 = projector_from_group(g);
  DMat m2 = projector_from_group(g);
  const size_t half = 16;  // 2^4 remaining basis states per lego
  DMat merged(half * half);
  for (size_t r1 = 0; r1 < half; ++r1)
    for (size_t r2 = 0; r2 < half; ++r2)
      for (size_t c1 = 0; c1 < half; ++c1)
        for (size_t c2 = 0; c2 < half; ++c2) {
          Cx v = 0;
          for (size_t a = 0; a < 2; ++a)
            for (size_t c = 0; c < 2; ++c)
              v += m1.at(2 * r1 + a, 2 * c1 + c) *
                   m2.at(2 * r2 + a, 2 * c2 + c);
          merged.at(r1 * half + r2, c1 * half + c2) = 0.5 * v;
        }
  DenseOracleResult oracle =
      enumerators_dense_oracle(merged, merged, scalar_scheme(2), 256);
  EXPECT_LT(oracle.residual, 1e-9);

  // Compare after normalizing both sides to constant term 1.
  EnumPoly a_oracle = oracle.pair.a;
  const Cyc a0 = a_oracle.coeff_of({8, 0});
  ASSERT_FALSE(a0.is_zero());
  EnumPoly a_oracle_norm(scalar_scheme(2), true);
  a_oracle_norm.accumulate_scaled(a_oracle, 0,
                                  Cyc(2, Rat(1) / a0.as_rational()));
  EXPECT_TRUE(a_tensor == a_oracle_norm);
}

TEST(TensorEnum, OffDiagonalEntriesExtendToStabilizers) {
  // For a fully open lego, entry (E, E') is nonzero exactly when E - E'
  // (unsigned) is a group element; check every entry constructively.
  StabilizerGroup ghz = make_group(2, {"XXX", "ZZI", "IZZ"});
  TensorEnumerator t = from_lego(lego(ghz, {"g1", "g2", "g3"}),
                                 {"g1", "g2", "g3"}, scalar_scheme(2));
  EXPECT_FALSE(is_diagonal(t));
  size_t checked = 0;
  std::vector<PhasedPauli> elems = ghz.elements();
  for (const auto& [key, poly] : t.entries) {
    (void)poly;
    const auto [e, ep] = detail::split_pair_key(key, 2);
    const PauliString v = mul_unsigned(e, neg_unsigned(ep));
    bool in_group = false;
    for (const PhasedPauli& s : elems)
      if (s.u == v) in_group = true;
    EXPECT_TRUE(in_group) << pauli_string_to_text(e) << " vs "
                          << pauli_string_to_text(ep);
    ++checked;
  }
  EXPECT_EQ(checked, 64u);

  // Same property on a partially open lego (one closed leg).
  TensorEnumerator t2 = from_lego(lego(ghz, {"g1", "g2", "g3"}), {"g1", "g2"},
                                  scalar_scheme(2));
  for (const auto& [key, poly] : t2.entries) {
    (void)poly;
    const auto [e, ep] = detail::split_pair_key(key, 2);
    const PauliString diff = mul_unsigned(e, neg_unsigned(ep));
    PauliString padded(2, 3);
    padded.x[0] = diff.x[0];
    padded.z[0] = diff.z[0];
    padded.x[1] = diff.x[1];
    padded.z[1] = diff.z[1];
    bool in_group = false;
    for (const PhasedPauli& s : elems)
      if (s.u == padded) in_group = true;
    EXPECT_TRUE(in_group);
  }
}

TEST(TensorEnum, ConjugateSymmetryWithComplexEntries) {
  // A qutrit group with a zeta-phased generator produces genuinely complex
  // entry coefficients; (E, E') and (E', E) must be complex conjugates.
  StabilizerGroup g(3, 1, {parse_phased_pauli("w1", "X1Z0", 3)});
  TensorEnumerator t = from_lego(lego(g, {"a"}), {"a"}, scalar_scheme(3));
  EXPECT_EQ(t.entries.size(), 9u);
  bool saw_complex = false;
  for (const auto& [key, poly] : t.entries) {
    const auto [e, ep] = detail::split_pair_key(key, 3);
    const Cyc c = poly.coeff_of({0, 0});
    if (!c.is_rational()) saw_complex = true;
    EXPECT_TRUE(entry_of(t, ep, e).coeff_of({0, 0}) == c.conj());
  }
  EXPECT_TRUE(saw_complex);

  // The dual transform preserves the symmetry.
  TensorEnumerator u = psi_transform(t);
  for (const auto& [key, poly] : u.entries) {
    const auto [e, ep] = detail::split_pair_key(key, 3);
    EXPECT_TRUE(entry_of(u, ep, e).coeff_of({0, 0}) ==
                poly.coeff_of({0, 0}).conj());
  }
}

TEST(TensorEnum, LambdaCliffordIdentityAndHadamard) {
  TensorEnumerator t =
      from_lego(lego(bell(), {"a", "b"}), {"b"}, scalar_scheme(2));

  SingleSiteClifford id{parse_phased_pauli("+1", "X", 2),
                        parse_phased_pauli("+1", "Z", 2)};
  EXPECT_TRUE(lambda_clifford(t, "b", id) == t);

  // Hadamard-like exchange X <-> Z fixes the Bell tensor.
  SingleSiteClifford had{parse_phased_pauli("+1", "Z", 2),
                         parse_phased_pauli("+1", "X", 2)};
  EXPECT_TRUE(lambda_clifford(t, "b", had) == t);

  // A non-Clifford image set is rejected: X -> X, Z -> X cannot preserve the
  // commutation phase.
  SingleSiteClifford bad{parse_phased_pauli("+1", "X", 2),
                         parse_phased_pauli("+1", "X", 2)};
  EXPECT_THROW(lambda_clifford(t, "b", bad), ValidationError);
}

TEST(TensorEnum, LambdaCliffordCovariance) {
  // Conjugating one leg of the lego by the phase gate (X -> Y, Z -> Z) must
  // match building the tensor from the conjugated group directly.
  StabilizerGroup g = four_one_two();
  TensorEnumerator t = from_lego(lego(g, {"p1", "p2", "p3", "p4"}),
                                 {"p3", "p4"}, scalar_scheme(2));
  SingleSiteClifford phase{parse_phased_pauli("+1", "Y", 2),
                           parse_phased_pauli("+1", "Z", 2)};
  TensorEnumerator lhs = lambda_clifford(t, "p3", phase);

  // Build S g S^dagger generator by generator (site index 2).
  std::vector<PhasedPauli> conj_gens;
  for (const PhasedPauli& gen : g.generators()) {
    PhasedPauli w = identity_op(2, 1);
    for (uint8_t i = 0; i < gen.u.x[2]; ++i) w = mul(w, phase.image_x);
    for (uint8_t i = 0; i < gen.u.z[2]; ++i) w = mul(w, phase.image_z);
    PhasedPauli out = gen;
    out.u.x[2] = w.u.x[0];
    out.u.z[2] = w.u.z[0];
    out.set_phase(static_cast<int64_t>(gen.phase) + w.phase);
    conj_gens.push_back(out);
  }
  StabilizerGroup gc(2, 4, std::move(conj_gens));
  TensorEnumerator rhs = from_lego(lego(gc, {"p1", "p2", "p3", "p4"}),
                                   {"p3", "p4"}, scalar_scheme(2));
  EXPECT_TRUE(lhs == rhs);
}

TEST(TensorEnum, ValidationErrors) {
  StabilizerGroup g = bell();
  EXPECT_THROW(from_lego(lego(g, {"a"}), {}, scalar_scheme(2)),
               ValidationError);  // wrong leg count
  EXPECT_THROW(from_lego(lego(g, {"a", "a"}), {}, scalar_scheme(2)),
               ValidationError);  // duplicate labels
  EXPECT_THROW(from_lego(lego(g, {"a", "b"}), {"zz"}, scalar_scheme(2)),
               ValidationError);  // unknown tensor leg
  EXPECT_THROW(from_lego(lego(g, {"a", "b"}), {"a", "a"}, scalar_scheme(2)),
               ValidationError);  // duplicated tensor leg
  EXPECT_THROW(from_lego(lego(g, {"a", "b"}), {}, scalar_scheme(3)),
               ValidationError);  // scheme q mismatch

  TensorEnumerator t = from_lego(lego(g, {"a", "b"}), {"a", "b"},
                                 scalar_scheme(2));
  EXPECT_THROW(trace_legs(t, "a", "zz"), ValidationError);
  EXPECT_THROW(trace_legs(t, "a", "a"), ValidationError);
  EXPECT_THROW(weighted_trace(t, {"zz"}), ValidationError);
  EXPECT_THROW(weighted_trace(t, {"a", "a"}), ValidationError);
  EXPECT_THROW(scalar_value(t), ValidationError);
}

TEST(TensorEnum, DumpFormat) {
  TensorEnumerator t =
      from_lego(lego(bell(), {"a", "b"}), {"b"}, scalar_scheme(2));
  const std::string d = dump(t);
  EXPECT_NE(d.find("I | I | "), std::string::npos);
  EXPECT_NE(d.find("X | X | "), std::string::npos);
  EXPECT_NE(d.find("Y | Y | "), std::string::npos);

  TensorEnumerator s =
      from_lego(lego(bell(), {"a", "b"}), {}, scalar_scheme(2));
  const std::string ds = dump(s);
  EXPECT_NE(ds.find("- | - | "), std::string::npos);
}

}  // namespace
