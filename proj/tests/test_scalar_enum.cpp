#include "qwe/scalar_enum.hpp"

#include <gtest/gtest.h>

#include <vector>

#include "qwe/enum_poly.hpp"
#include "qwe/stab_group.hpp"

using namespace qwe;

namespace {

StabilizerGroup make_group(uint32_t q, std::initializer_list<const char*> gens) {
  std::vector<PhasedPauli> ops;
  size_t n = 0;
  for (const char* g : gens) {
    auto op = parse_phased_pauli("+1", g, q);
    n = op.n();
    ops.push_back(op);
  }
  return StabilizerGroup(q, n, std::move(ops));
}

StabilizerGroup five_one_three() {
  return make_group(2, {"XZZXI", "IXZZX", "XIXZZ", "ZXIXZ"});
}

StabilizerGroup four_two_two() { return make_group(2, {"XXXX", "ZZZZ"}); }

EnumPoly scalar_of(uint32_t q, int n,
                   const std::vector<std::pair<int, int64_t>>& z_coeffs) {
  EnumPoly p(WeightScheme{SchemeKind::shor_laflamme, q}, true);
  for (const auto& [d, c] : z_coeffs)
    p.add_term({static_cast<uint64_t>(n - d), static_cast<uint64_t>(d)},
               Cyc(q, Rat(c)));
  return p;
}

WeightScheme scalar_scheme(uint32_t q) {
  return WeightScheme{SchemeKind::shor_laflamme, q};
}

TEST(ScalarEnum, FiveOneThreeKnownValues) {
  EnumeratorPair pair =
      enumerators_by_counting(five_one_three(), scalar_scheme(2));
  EXPECT_EQ(pair.n, 5);
  EXPECT_EQ(pair.k, 1);
  EXPECT_EQ(pair.convention, Convention::count);
  EXPECT_TRUE(pair.a == scalar_of(2, 5, {{0, 1}, {4, 15}}));
  EXPECT_TRUE(pair.b == scalar_of(2, 5, {{0, 1}, {3, 30}, {4, 15}, {5, 18}}));
  EXPECT_EQ(distance(pair), std::optional<int>(3));
  EXPECT_FALSE(purity_check(pair));
}

TEST(ScalarEnum, FourTwoTwoKnownValues) {
  EnumeratorPair pair =
      enumerators_by_counting(four_two_two(), scalar_scheme(2));
  EXPECT_EQ(pair.k, 2);
  EXPECT_TRUE(pair.a == scalar_of(2, 4, {{0, 1}, {4, 3}}));
  EXPECT_TRUE(pair.b == scalar_of(2, 4, {{0, 1}, {2, 18}, {3, 24}, {4, 21}}));
  EXPECT_EQ(distance(pair), std::optional<int>(2));
  EXPECT_FALSE(purity_check(pair));
}

TEST(ScalarEnum, NormalizerSweepAgreesWithMacWilliamsFallback) {
  // Cap below q^{n+k} = 64 but above the group order 16 forces the
  // MacWilliams route for B; results must match the direct sweep exactly.
  CountingOptions small_cap;
  small_cap.group_cap = 32;
  EnumeratorPair via_mw =
      enumerators_by_counting(five_one_three(), scalar_scheme(2), small_cap);
  EnumeratorPair via_sweep =
      enumerators_by_counting(five_one_three(), scalar_scheme(2));
  EXPECT_TRUE(via_mw.b == via_sweep.b);

  // Same cross-check for the double scheme on [[4,2,2]] (q^{n+k} = 64).
  WeightScheme ds{SchemeKind::double_, 2};
  small_cap.group_cap = 16;
  EnumeratorPair d_mw = enumerators_by_counting(four_two_two(), ds, small_cap);
  EnumeratorPair d_sweep = enumerators_by_counting(four_two_two(), ds);
  EXPECT_TRUE(d_mw.b == d_sweep.b);
}

TEST(ScalarEnum, BellAndSingleQubitStates) {
  EnumeratorPair bell =
      enumerators_by_counting(make_group(2, {"XX", "ZZ"}), scalar_scheme(2));
  EXPECT_EQ(bell.k, 0);
  EXPECT_TRUE(bell.a == scalar_of(2, 2, {{0, 1}, {2, 3}}));  // w^2 + 3z^2
  EXPECT_TRUE(purity_check(bell));
  EXPECT_EQ(distance(bell), std::optional<int>(2));

  EnumeratorPair zero =
      enumerators_by_counting(make_group(2, {"Z"}), scalar_scheme(2));
  EXPECT_TRUE(zero.a == scalar_of(2, 1, {{0, 1}, {1, 1}}));  // w + z
  EXPECT_TRUE(purity_check(zero));
  EXPECT_EQ(distance(zero), std::optional<int>(1));
}

TEST(ScalarEnum, EncodingStateOfFiveOneThree) {
  StabilizerGroup g = five_one_three();
  LogicalFrame frame = logical_operators(g);
  StabilizerGroup enc = encoding_state(g, frame);
  EnumeratorPair pair = enumerators_by_counting(enc, scalar_scheme(2));
  EXPECT_EQ(pair.n, 6);
  EXPECT_EQ(pair.k, 0);
  EXPECT_TRUE(pair.a == scalar_of(2, 6, {{0, 1}, {4, 45}, {6, 18}}));
  EXPECT_TRUE(purity_check(pair));
  EXPECT_EQ(distance(pair), std::optional<int>(4));
}

TEST(ScalarEnum, EncodingStateOfFourTwoTwo) {
  StabilizerGroup g = four_two_two();
  LogicalFrame frame = logical_operators(g);
  StabilizerGroup enc = encoding_state(g, frame);
  EnumeratorPair pair = enumerators_by_counting(enc, scalar_scheme(2));
  EXPECT_EQ(pair.n, 6);
  EXPECT_EQ(pair.k, 0);
  EXPECT_TRUE(pair.a ==
              scalar_of(2, 6, {{0, 1}, {3, 8}, {4, 21}, {5, 24}, {6, 10}}));
  EXPECT_EQ(distance(pair), std::optional<int>(3));
}

TEST(ScalarEnum, TrivialCodeDistanceOne) {
  StabilizerGroup g(2, 1, {});
  EnumeratorPair pair = enumerators_by_counting(g, scalar_scheme(2));
  EXPECT_EQ(pair.k, 1);
  EXPECT_TRUE(pair.a == scalar_of(2, 1, {{0, 1}}));          // w
  EXPECT_TRUE(pair.b == scalar_of(2, 1, {{0, 1}, {1, 3}}));  // w + 3z
  EXPECT_EQ(distance(pair), std::optional<int>(1));
}

TEST(ScalarEnum, UndetectedWhenNoDifference) {
  // Exercise the "undetected" branch with a hand-built pair whose a and b
  // never differ and whose a has no support above degree 0.
  EnumeratorPair p;
  p.q = 2;
  p.n = 2;
  p.k = 0;
  p.a = scalar_of(2, 2, {{0, 1}});
  p.b = p.a;
  EXPECT_EQ(distance(p), std::nullopt);
}

TEST(ScalarEnum, QutritBellPair) {
  StabilizerGroup g = make_group(3, {"X1X1", "Z1Z2"});
  EnumeratorPair pair = enumerators_by_counting(g, scalar_scheme(3));
  EXPECT_EQ(pair.k, 0);
  EXPECT_TRUE(pair.a == scalar_of(3, 2, {{0, 1}, {2, 8}}));
  EXPECT_TRUE(purity_check(pair));
  EXPECT_EQ(distance(pair), std::optional<int>(2));

  // Complete-scheme pair: b equals a, and both collapse to the scalar a.
  WeightScheme cs{SchemeKind::complete, 3};
  EnumeratorPair cpair = enumerators_by_counting(g, cs);
  EXPECT_TRUE(purity_check(cpair));
  EXPECT_TRUE(collapse_complete_to_scalar(cpair.a) == pair.a);
  EXPECT_EQ(distance(cpair), std::optional<int>(2));

  // Forcing the MacWilliams route for the complete scheme must agree.
  CountingOptions small_cap;
  small_cap.group_cap = 40;  // 3^2 group fits, 3^4 = 81 span does not
  EnumeratorPair cpair_mw = enumerators_by_counting(g, cs, small_cap);
  EXPECT_TRUE(cpair_mw.b == cpair.b);
}

TEST(ScalarEnum, DoubleSchemeProfiles) {
  WeightScheme ds{SchemeKind::double_, 2};
  EnumeratorPair pair = enumerators_by_counting(four_two_two(), ds);
  // Variables (w, x, y, z): I^4 -> w^4 y^4, X^4 -> w^4 x^4, Z^4 -> y^4 z^4,
  // Y^4 -> x^4 z^4.
  EnumPoly expect(ds, true);
  expect.add_term({4, 0, 4, 0}, Cyc::one(2));
  expect.add_term({4, 4, 0, 0}, Cyc::one(2));
  expect.add_term({0, 0, 4, 4}, Cyc::one(2));
  expect.add_term({0, 4, 0, 4}, Cyc::one(2));
  EXPECT_TRUE(pair.a == expect);
  // Double pairs cannot be fed to distance: the scheme loses site weights.
  EXPECT_THROW(distance(pair), ValidationError);
}

TEST(ScalarEnum, RawConventionRoundTrip) {
  EnumeratorPair pair =
      enumerators_by_counting(five_one_three(), scalar_scheme(2));
  EnumeratorPair raw = with_convention(pair, Convention::raw);
  EXPECT_EQ(raw.convention, Convention::raw);
  // raw a = 4(w^5 + 15 w z^4), raw b = 2(w^5 + 30w^2z^3 + 15wz^4 + 18z^5).
  EXPECT_TRUE(raw.a == scalar_of(2, 5, {{0, 4}, {4, 60}}));
  EXPECT_TRUE(raw.b ==
              scalar_of(2, 5, {{0, 2}, {3, 60}, {4, 30}, {5, 36}}));
  EnumeratorPair back = with_convention(raw, Convention::count);
  EXPECT_TRUE(back.a == pair.a);
  EXPECT_TRUE(back.b == pair.b);
  EXPECT_THROW(distance(raw), ValidationError);
}

TEST(ScalarEnum, ThreadedSweepMatchesSingleThread) {
  CountingOptions par;
  par.threads = 4;
  EnumeratorPair s =
      enumerators_by_counting(five_one_three(), scalar_scheme(2));
  EnumeratorPair p =
      enumerators_by_counting(five_one_three(), scalar_scheme(2), par);
  EXPECT_TRUE(s.a == p.a);
  EXPECT_TRUE(s.b == p.b);
}

TEST(ScalarEnum, InvariantsOnBundledCodes) {
  for (auto make : {+[] { return five_one_three(); },
                    +[] { return four_two_two(); },
                    +[] { return make_group(2, {"XX", "ZZ"}); }}) {
    StabilizerGroup g = make();
    EnumeratorPair pair = enumerators_by_counting(g, scalar_scheme(2));
    // a_0 = b_0 = 1 and b - a has no negative coefficients.
    EXPECT_EQ(pair.a.coeff_of({static_cast<uint64_t>(pair.n), 0}).as_rational(),
              Rat(1));
    EXPECT_EQ(pair.b.coeff_of({static_cast<uint64_t>(pair.n), 0}).as_rational(),
              Rat(1));
    for (int d = 0; d <= pair.n; ++d) {
      const std::vector<uint64_t> e = {static_cast<uint64_t>(pair.n - d),
                                       static_cast<uint64_t>(d)};
      EXPECT_GE(pair.b.coeff_of(e).as_rational(),
                pair.a.coeff_of(e).as_rational());
    }
    // Totals: sum a_d = q^{n-k}, sum b_d = q^{n+k}.
    Cyc ones = Cyc::one(2);
    EXPECT_EQ(pair.a.evaluate({ones, ones}).as_rational(),
              q_power(2, pair.n - pair.k));
    EXPECT_EQ(pair.b.evaluate({ones, ones}).as_rational(),
              q_power(2, pair.n + pair.k));
  }
}

}  // namespace
