#include "dpsym/seqform.hpp"

#include <doctest.h>

#include <cmath>
#include <complex>

using namespace dpsym;

namespace {

GaussianRational gr(long re) { return GaussianRational(re); }
GaussianRational gri(const Rational& re, const Rational& im) { return GaussianRational(re, im); }

CoefField half() { return CoefField::from_rational(Rational(1, 2)); }
CoefField half_i(int sign) {
    return CoefField::from_gaussian(gri(Rational(0), Rational(sign, 2)));
}

SequenceClosedForm cos_two_thirds() {  // cos(2*pi*n/3)
    return SequenceClosedForm::term(half(), RootOfUnityScalar::root(1, 3)) +
           SequenceClosedForm::term(half(), RootOfUnityScalar::root(2, 3));
}

SequenceClosedForm cos_quarter() {  // cos(pi*n/2)
    return SequenceClosedForm::term(half(), RootOfUnityScalar::root(1, 4)) +
           SequenceClosedForm::term(half(), RootOfUnityScalar::root(3, 4));
}

SequenceClosedForm sin_quarter() {  // sin(pi*n/2)
    return SequenceClosedForm::term(half_i(-1), RootOfUnityScalar::root(1, 4)) +
           SequenceClosedForm::term(half_i(+1), RootOfUnityScalar::root(3, 4));
}

}  // namespace

TEST_CASE("root-of-unity scalars canonicalize") {
    // i presented as a scale folds into the exponent
    auto as_scale = RootOfUnityScalar::from_gaussian(gri(0, 1));
    CHECK(as_scale.scale == gr(1));
    CHECK(as_scale.k == 1);
    CHECK(as_scale.m == 4);
    CHECK(as_scale == RootOfUnityScalar::root(1, 4));

    // -zeta_3 = e^(2*pi*i*5/6)
    auto neg_zeta3 = RootOfUnityScalar::make(gr(-1), 1, 3);
    CHECK(neg_zeta3.scale == gr(1));
    CHECK(neg_zeta3.k == 5);
    CHECK(neg_zeta3.m == 6);

    // 2i = 2 * e^(2*pi*i/4)
    auto two_i = RootOfUnityScalar::from_gaussian(gri(0, 2));
    CHECK(two_i.scale == gr(2));
    CHECK(two_i.k == 1);
    CHECK(two_i.m == 4);
    CHECK(two_i == RootOfUnityScalar::make(gr(2), 1, 4));

    // -2 = 2 * e^(pi*i)
    auto neg_two = RootOfUnityScalar::from_gaussian(gr(-2));
    CHECK(neg_two.scale == gr(2));
    CHECK(neg_two.k == 1);
    CHECK(neg_two.m == 2);

    // exponent reduction
    CHECK(RootOfUnityScalar::make(gr(1), 4, 4) == RootOfUnityScalar::one());
    CHECK(RootOfUnityScalar::make(gr(1), 3, 6) == RootOfUnityScalar::root(1, 2));
    CHECK(RootOfUnityScalar::make(gr(1), -1, 4) == RootOfUnityScalar::root(3, 4));

    // a unit-modulus but non-root scale stays a scale
    auto aperiodic = RootOfUnityScalar::from_gaussian(gri(Rational(3, 5), Rational(4, 5)));
    CHECK(aperiodic.scale == gri(Rational(3, 5), Rational(4, 5)));
    CHECK(aperiodic.m == 1);
    CHECK(!aperiodic.is_unit_modulus());

    CHECK_THROWS_AS(RootOfUnityScalar::make(gr(0), 0, 1), std::invalid_argument);
}

TEST_CASE("root-of-unity scalar arithmetic re-canonicalizes") {
    auto i4 = RootOfUnityScalar::root(1, 4);
    CHECK(i4 * i4 == RootOfUnityScalar::root(1, 2));
    CHECK(i4.pow(4) == RootOfUnityScalar::one());
    CHECK(i4.pow(-1) == RootOfUnityScalar::root(3, 4));
    CHECK(i4.inverse() == RootOfUnityScalar::root(3, 4));

    // (1+i)^2 = 2i, so the square re-enters canonical form with a rotated scale
    auto one_plus_i = RootOfUnityScalar::from_gaussian(gri(1, 1));
    CHECK(one_plus_i.scale == gri(1, 1));
    CHECK(one_plus_i.m == 1);
    auto sq = one_plus_i.pow(2);
    CHECK(sq.scale == gr(2));
    CHECK(sq.k == 1);
    CHECK(sq.m == 4);

    CHECK(RootOfUnityScalar::root(1, 3) * RootOfUnityScalar::root(1, 2) ==
          RootOfUnityScalar::root(5, 6));

    // exact value and powers
    CHECK(i4.value_pow(4) == CoefField::integer(1));
    CHECK(i4.value_pow(2) == CoefField::integer(-1));
    CHECK(i4.value_pow(-1) == RootOfUnityScalar::root(3, 4).value());
    CHECK(RootOfUnityScalar::from_gaussian(gr(2)).value_pow(-2) ==
          CoefField::from_rational(Rational(1, 4)));

    // numeric value
    auto z = RootOfUnityScalar::make(gr(2), 1, 4).to_complex();
    CHECK(std::abs(z - std::complex<double>(0.0, 2.0)) < 1e-12);

    CHECK(RootOfUnityScalar::root(1, 4).to_string() == "rou(1,4)");
    CHECK(RootOfUnityScalar::make(gr(2), 1, 3).to_string() == "2*rou(1,3)");
    CHECK(RootOfUnityScalar::one().to_string() == "1");
}

TEST_CASE("closed forms evaluate exactly") {
    auto c = cos_two_thirds();
    CHECK(c.eval_exact(0) == CoefField::integer(1));
    CHECK(c.eval_exact(1) == CoefField::from_rational(Rational(-1, 2)));
    CHECK(c.eval_exact(2) == CoefField::from_rational(Rational(-1, 2)));
    CHECK(c.eval_exact(3) == CoefField::integer(1));
    CHECK(c.eval_exact(-1) == CoefField::from_rational(Rational(-1, 2)));

    // 2 * n * 1^n at n = 3
    auto lin = SequenceClosedForm::monomial(gr(2), 1);
    CHECK(lin.eval_exact(3) == CoefField::integer(6));
    CHECK(lin.eval_exact(0).is_zero());

    // i^n at n = 4k + 1
    auto iseq = SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::root(1, 4));
    CHECK(iseq.eval_exact(5) == CoefField::from_gaussian(gri(0, 1)));

    for (long n = -4; n <= 8; ++n) {
        auto exact = c.eval_exact(n).eval_complex();
        double expect = std::cos(2.0 * M_PI * n / 3.0);
        CHECK(std::abs(exact - std::complex<double>(expect, 0.0)) < 1e-12);
        CHECK(std::abs(c.eval_complex(n) - std::complex<double>(expect, 0.0)) < 1e-12);
    }
}

TEST_CASE("closed-form linear combinations merge and cancel") {
    auto c = cos_two_thirds();
    auto z = c - c;
    CHECK(z.is_zero());
    CHECK(z.to_string() == "0");

    auto doubled = c + c;
    CHECK(doubled == c.scaled_exact(CoefField::integer(2)));
    CHECK(doubled.terms().size() == 2);

    // scaling by zero collapses
    CHECK(c.scaled_exact(CoefField()).is_zero());
}

TEST_CASE("closed forms shift exactly") {
    // shift of i^n by 1 multiplies the coefficient by i
    auto iseq = SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::root(1, 4));
    auto shifted = iseq.shifted(1);
    CHECK(shifted == SequenceClosedForm::term(CoefField::from_gaussian(gri(0, 1)),
                                              RootOfUnityScalar::root(1, 4)));

    // shift of n by 1 is n + 1
    auto lin = SequenceClosedForm::monomial(gr(1), 1);
    CHECK(lin.shifted(1) == lin + SequenceClosedForm::constant(gr(1)));

    // cos(2*pi*n/3) has period 3 under shifts
    auto c = cos_two_thirds();
    CHECK(c.shifted(3) == c);
    CHECK(c.shifted(1) != c);

    // round trip through a mixed term with degree 2
    auto mixed = SequenceClosedForm::term(CoefField::integer(5), RootOfUnityScalar::root(1, 3), 2) +
                 SequenceClosedForm::monomial(gr(-3), 1);
    CHECK(mixed.shifted(2).shifted(-2) == mixed);

    // shift agrees with evaluation
    for (long n = 0; n <= 6; ++n) CHECK(mixed.shifted(2).eval_exact(n) == mixed.eval_exact(n + 2));
}

TEST_CASE("periods require degree zero and unit scale") {
    auto iseq = SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::root(1, 4));
    CHECK(iseq.period() == 4);
    CHECK(cos_two_thirds().period() == 3);
    CHECK(SequenceClosedForm::zero().period() == 1);
    CHECK(SequenceClosedForm::constant(gr(7)).period() == 1);

    auto mixed = iseq + SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::root(1, 2));
    CHECK(mixed.period() == 4);

    CHECK(!SequenceClosedForm::monomial(gr(1), 1).period().has_value());
    CHECK(!SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::from_gaussian(gr(2)))
               .period()
               .has_value());
    // |3/5 + 4/5 i| = 1 numerically, yet the sequence never returns to 1
    auto unit_but_aperiodic = SequenceClosedForm::term(
        CoefField::integer(1),
        RootOfUnityScalar::from_gaussian(gri(Rational(3, 5), Rational(4, 5))));
    CHECK(!unit_but_aperiodic.period().has_value());
}

TEST_CASE("closed-form rendering") {
    CHECK(SequenceClosedForm::term(CoefField::integer(2), RootOfUnityScalar::root(1, 3))
              .to_string() == "2 * rou(1,3)^n");
    CHECK(SequenceClosedForm::monomial(gr(1), 1).to_string() == "1 * n");
    CHECK(SequenceClosedForm::monomial(gr(3), 2).to_string() == "3 * n^2");
    CHECK(SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::from_gaussian(gr(2)))
              .to_string() == "1 * 2^n");
    CHECK(SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::make(gr(2), 1, 4))
              .to_string() == "1 * 2^n * rou(1,4)^n");
    CHECK(SequenceClosedForm::constant(gr(5)).to_string() == "5");
}

TEST_CASE("recurrence constraints validate their shape") {
    CHECK_THROWS_AS(RecurrenceConstraint({gr(1)}), ValidationError);
    CHECK_THROWS_AS(RecurrenceConstraint({gr(1), gr(0)}), ValidationError);
    RecurrenceConstraint rc({gr(1), gr(0), gr(1)});
    CHECK(rc.order() == 2);
    CHECK(rc.to_string() == "s(n+2) + s(n) = 0");
    RecurrenceConstraint rc2({gr(-1), gr(2), gr(1)});
    CHECK(rc2.to_string() == "s(n+2) + 2*s(n+1) + (-1)*s(n) = 0");
}

TEST_CASE("recurrence solver: s(n+2) + s(n) = 0") {
    auto basis = solve_recurrence(RecurrenceConstraint({gr(1), gr(0), gr(1)}));
    REQUIRE(basis.size() == 2);
    CHECK(basis[0] ==
          SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::root(1, 4)));
    CHECK(basis[1] ==
          SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::root(3, 4)));
    CHECK(basis[0].period() == 4);
}

TEST_CASE("recurrence solver: s(n+2) + s(n+1) + s(n) = 0") {
    auto basis = solve_recurrence(RecurrenceConstraint({gr(1), gr(1), gr(1)}));
    REQUIRE(basis.size() == 2);
    CHECK(basis[0] ==
          SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::root(1, 3)));
    CHECK(basis[1] ==
          SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::root(2, 3)));
}

TEST_CASE("recurrence solver: simple and repeated real roots") {
    auto ones = solve_recurrence(RecurrenceConstraint({gr(-1), gr(1)}));
    REQUIRE(ones.size() == 1);
    CHECK(ones[0] == SequenceClosedForm::constant(gr(1)));

    // (S - 1)^2: basis {1, n}
    auto rep = solve_recurrence(RecurrenceConstraint({gr(1), gr(-2), gr(1)}));
    REQUIRE(rep.size() == 2);
    CHECK(rep[0] == SequenceClosedForm::constant(gr(1)));
    CHECK(rep[1] == SequenceClosedForm::monomial(gr(1), 1));

    // S - 2: basis {2^n}
    auto geo = solve_recurrence(RecurrenceConstraint({gr(-2), gr(1)}));
    REQUIRE(geo.size() == 1);
    CHECK(geo[0] ==
          SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::from_gaussian(gr(2))));
}

TEST_CASE("recurrence solver: S^4 - 1 and a mixed cubic") {
    auto quartic = solve_recurrence(RecurrenceConstraint({gr(-1), gr(0), gr(0), gr(0), gr(1)}));
    REQUIRE(quartic.size() == 4);
    CHECK(quartic[0] == SequenceClosedForm::constant(gr(1)));
    CHECK(quartic[1] ==
          SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::root(1, 2)));
    CHECK(quartic[2] ==
          SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::root(1, 4)));
    CHECK(quartic[3] ==
          SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::root(3, 4)));

    // (S - 2)^2 (S + 1) = S^3 - 3 S^2 + 4
    auto cubic = solve_recurrence(RecurrenceConstraint({gr(4), gr(0), gr(-3), gr(1)}));
    REQUIRE(cubic.size() == 3);
    auto two = RootOfUnityScalar::from_gaussian(gr(2));
    CHECK(cubic[0] == SequenceClosedForm::term(CoefField::integer(1), two));
    CHECK(cubic[1] == SequenceClosedForm::term(CoefField::integer(1), two, 1));
    CHECK(cubic[2] ==
          SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::root(1, 2)));

    // the basis really solves the recurrence, spot-checked independently
    for (auto& b : cubic)
        for (long n = 0; n <= 10; ++n) {
            CoefField acc = b.eval_exact(n + 3) - CoefField::integer(3) * b.eval_exact(n + 2) +
                            CoefField::integer(4) * b.eval_exact(n);
            CHECK(acc.is_zero());
        }
}

TEST_CASE("recurrence solver: gaussian scales off the unit circle") {
    // S^2 - 2S + 2 = (S - (1+i))(S - (1-i))
    auto basis = solve_recurrence(RecurrenceConstraint({gr(2), gr(-2), gr(1)}));
    REQUIRE(basis.size() == 2);
    auto lam0 = RootOfUnityScalar::from_gaussian(gri(1, 1));
    auto lam1 = RootOfUnityScalar::make(gri(1, 1), 3, 4);  // 1 - i
    CHECK(basis[0] == SequenceClosedForm::term(CoefField::integer(1), lam0));
    CHECK(basis[1] == SequenceClosedForm::term(CoefField::integer(1), lam1));
    CHECK(std::abs(lam1.to_complex() - std::complex<double>(1.0, -1.0)) < 1e-12);
}

TEST_CASE("recurrence solver: sqrt(2) is the gaussian scale 1+i times an 8th root") {
    // S^2 - 2 has roots +-sqrt(2) = (1+i) * e^(2*pi*i*{7,3}/8): inside the class
    auto basis = solve_recurrence(RecurrenceConstraint({gr(-2), gr(0), gr(1)}));
    REQUIRE(basis.size() == 2);
    auto neg_rt2 = RootOfUnityScalar::make(gri(1, 1), 3, 8);
    auto pos_rt2 = RootOfUnityScalar::make(gri(1, 1), 7, 8);
    CHECK(basis[0] == SequenceClosedForm::term(CoefField::integer(1), neg_rt2));
    CHECK(basis[1] == SequenceClosedForm::term(CoefField::integer(1), pos_rt2));
    CHECK(pos_rt2.value_pow(2) == CoefField::integer(2));
    CHECK(std::abs(pos_rt2.to_complex() - std::complex<double>(std::sqrt(2.0), 0.0)) < 1e-12);
}

TEST_CASE("recurrence solver rejects general algebraic and zero roots") {
    try {
        // Fibonacci: roots (1 +- sqrt(5))/2 are not scaled roots of unity
        solve_recurrence(RecurrenceConstraint({gr(-1), gr(-1), gr(1)}));
        FAIL("expected NonCyclotomicRootError for S^2 - S - 1");
    } catch (const NonCyclotomicRootError& e) {
        CHECK(std::string(e.what()).find("x^2") != std::string::npos);
    }

    try {
        solve_recurrence(RecurrenceConstraint({gr(0), gr(1), gr(1)}));
        FAIL("expected NonCyclotomicRootError for S^2 + S");
    } catch (const NonCyclotomicRootError& e) {
        CHECK(std::string(e.what()).find("factor") != std::string::npos);
    }
}

TEST_CASE("equal-span comparison of sequence families") {
    std::vector<SequenceClosedForm> exp_pair = {
        SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::root(1, 4)),
        SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::root(3, 4))};
    std::vector<SequenceClosedForm> trig_pair = {cos_quarter(), sin_quarter()};
    CHECK(seq_equal_span(exp_pair, trig_pair));
    CHECK(seq_equal_span(trig_pair, exp_pair));
    CHECK(seq_equal_span(exp_pair, exp_pair));

    // the order-3 pair: {zeta3^n, zeta3^2n} vs {(-1)^n cos(n pi/3), (-1)^n sin(n pi/3)}
    std::vector<SequenceClosedForm> zeta_pair = {
        SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::root(1, 3)),
        SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::root(2, 3))};
    std::vector<SequenceClosedForm> alt_trig = {
        cos_two_thirds(),
        SequenceClosedForm::term(half_i(+1), RootOfUnityScalar::root(1, 3)) +
            SequenceClosedForm::term(half_i(-1), RootOfUnityScalar::root(2, 3))};
    CHECK(seq_equal_span(zeta_pair, alt_trig));

    // different spaces
    std::vector<SequenceClosedForm> ones = {SequenceClosedForm::constant(gr(1))};
    std::vector<SequenceClosedForm> eye = {
        SequenceClosedForm::term(CoefField::integer(1), RootOfUnityScalar::root(1, 4))};
    CHECK(!seq_equal_span(ones, eye));

    // proper subspace
    CHECK(!seq_equal_span(eye, exp_pair));

    // affine re-basing of {1, n}
    std::vector<SequenceClosedForm> poly = {SequenceClosedForm::constant(gr(1)),
                                            SequenceClosedForm::monomial(gr(1), 1)};
    std::vector<SequenceClosedForm> poly2 = {
        SequenceClosedForm::constant(gr(1)) + SequenceClosedForm::monomial(gr(1), 1),
        SequenceClosedForm::constant(gr(1)) - SequenceClosedForm::monomial(gr(1), 1)};
    CHECK(seq_equal_span(poly, poly2));

    // degenerate rows are fine
    CHECK(seq_equal_span({}, {}));
    CHECK(seq_equal_span({SequenceClosedForm::zero()}, {}));

    // floating coefficients are refused
    std::vector<SequenceClosedForm> inexact = {
        SequenceClosedForm::term(SeqCoeff(std::complex<double>(0.5, 0.0)),
                                 RootOfUnityScalar::root(1, 4))};
    CHECK_THROWS_AS(seq_equal_span(inexact, eye), ValidationError);
}

TEST_CASE("closed forms built from recurrences match their float evaluations") {
    auto basis = solve_recurrence(RecurrenceConstraint({gr(1), gr(1), gr(1)}));
    for (auto& b : basis)
        for (long n = 0; n <= 12; ++n) {
            auto v = b.eval_complex(n);
            auto w = b.eval_exact(n).eval_complex();
            CHECK(std::abs(v - w) < 1e-12);
        }
}
