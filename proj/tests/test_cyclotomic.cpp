#include "doctest.h"

#include "dpsym/cyclotomic.hpp"

using namespace dpsym;

namespace {
Rational Q(long n, long d = 1) { return Rational(n, d); }
}  // namespace

TEST_CASE("cyclotomic polynomials") {
    CHECK(cyclotomic_poly(1) == std::vector<Rational>{Q(-1), Q(1)});
    CHECK(cyclotomic_poly(2) == std::vector<Rational>{Q(1), Q(1)});
    CHECK(cyclotomic_poly(3) == std::vector<Rational>{Q(1), Q(1), Q(1)});
    CHECK(cyclotomic_poly(4) == std::vector<Rational>{Q(1), Q(0), Q(1)});
    CHECK(cyclotomic_poly(6) == std::vector<Rational>{Q(1), Q(-1), Q(1)});
    CHECK(cyclotomic_poly(12) == std::vector<Rational>{Q(1), Q(0), Q(-1), Q(0), Q(1)});
    // phi(105) has a coefficient of -2 — first order where +-1 fails
    auto c105 = cyclotomic_poly(105);
    bool has_minus2 = false;
    for (auto& c : c105) has_minus2 = has_minus2 || c == Q(-2);
    CHECK(has_minus2);
    CHECK(euler_phi(1) == 1);
    CHECK(euler_phi(12) == 4);
    CHECK(euler_phi(105) == 48);
    CHECK(c105.size() == 49);
}

TEST_CASE("roots of unity multiply by exponent arithmetic") {
    CoefField z3 = CoefField::root_of_unity(1, 3);
    CHECK(z3.pow(3) == CoefField::integer(1));
    CHECK(z3 * z3 == CoefField::root_of_unity(2, 3));
    CHECK_FALSE(z3.is_zero());

    // 1 + z3 + z3^2 = 0
    CHECK((CoefField::integer(1) + z3 + z3 * z3).is_zero());

    CoefField i = CoefField::root_of_unity(1, 4);
    CHECK(i * i == CoefField::integer(-1));
    CHECK(i.pow(4) == CoefField::integer(1));

    // mixed orders rebase automatically: z3 * i has order 12
    CoefField z12 = CoefField::root_of_unity(1, 12);
    CHECK(z3 * i == z12.pow(7));  // e^(2pi i/3) * e^(pi i/2) = e^(7 pi i/6·...)
    CHECK(z12.pow(12) == CoefField::integer(1));

    // negative exponents
    CHECK(CoefField::root_of_unity(-1, 3) == z3.pow(2));
}

TEST_CASE("field arithmetic and inverse") {
    CoefField z3 = CoefField::root_of_unity(1, 3);
    CoefField x = CoefField::integer(2) + z3;   // 2 + z3
    CHECK(x * x.inverse() == CoefField::integer(1));

    CoefField i = CoefField::root_of_unity(1, 4);
    CoefField y = CoefField::integer(1) + i;
    CHECK(y * y == CoefField::integer(2) * i);
    CHECK((y / y) == CoefField::integer(1));
    CHECK_THROWS_AS(CoefField().inverse(), std::domain_error);

    // inverse with parameters in the coordinates
    VarId a = Symbols::intern("a");
    CoefField pa = CoefField::from_ratfunc(RatFunc::variable(a)) + z3;
    CHECK(pa * pa.inverse() == CoefField::integer(1));
    CHECK(pa.depends_on_params());
}

TEST_CASE("gaussian embedding and extraction") {
    GaussianRational g(Q(1, 2), Q(-3, 4));
    CoefField x = CoefField::from_gaussian(g);
    CHECK(x.is_gaussian());
    CHECK(x.to_gaussian() == g);

    // i as zeta_12^3
    CoefField z12 = CoefField::root_of_unity(1, 12);
    CoefField i12 = z12.pow(3);
    CHECK(i12.is_gaussian());
    CHECK(i12.to_gaussian() == GaussianRational::unit_i());

    // the dual-representation trap: i - zeta_12^3 must be exactly zero
    CoefField diff = CoefField::from_gaussian(GaussianRational::unit_i()) - i12;
    CHECK(diff.is_zero());

    // z3 is not in Q(i)
    CHECK_FALSE(CoefField::root_of_unity(1, 3).is_gaussian());
    CHECK_THROWS_AS(CoefField::root_of_unity(1, 3).to_gaussian(), std::domain_error);

    // 2*z6 - 1 = 2*e^(i pi/3) - 1 = i*sqrt(3): not in Q(i)
    CoefField z6 = CoefField::root_of_unity(1, 6);
    CHECK_FALSE((CoefField::integer(2) * z6 - CoefField::integer(1)).is_gaussian());

    // but z6 + z6^-1 = 1 is rational
    CoefField sym = z6 + z6.pow(-1);
    CHECK(sym.is_gaussian());
    CHECK(sym.to_gaussian() == GaussianRational(1));
}

TEST_CASE("ratfunc coordinates split real and imaginary parts") {
    VarId a = Symbols::intern("a");
    // f = (i*a + 1)/(a - i): coefficients involve i, coordinates must not
    RatFunc f(Poly::variable(a).scaled(GaussianRational::unit_i()) + Poly(1),
              Poly::variable(a) - Poly(GaussianRational::unit_i()));
    CoefField x = CoefField::from_ratfunc(f);
    for (auto& c : x.coords())
        for (auto& [mono, coef] : c.num().terms()) CHECK(coef.im.is_zero());

    // value check: f * (a - i) == i*a + 1 inside the field
    CoefField va = CoefField::from_ratfunc(RatFunc::variable(a));
    CoefField i = CoefField::root_of_unity(1, 4);
    CHECK(x * (va - i) == i * va + CoefField::integer(1));

    // (i*a)/(i) = a
    RatFunc g(Poly::variable(a).scaled(GaussianRational::unit_i()),
              Poly(GaussianRational::unit_i()));
    CHECK(CoefField::from_ratfunc(g) == va);
}

TEST_CASE("numeric evaluation") {
    CoefField z3 = CoefField::root_of_unity(1, 3);
    auto v = z3.eval_complex();
    CHECK(std::abs(v - std::complex<double>(-0.5, std::sqrt(3.0) / 2)) < 1e-12);

    VarId a = Symbols::intern("a");
    CoefField x = CoefField::from_ratfunc(RatFunc::variable(a)) * z3;
    CHECK_THROWS_AS(x.eval_complex(), EvalError);
    auto bound = x.eval_complex([&](VarId) { return std::complex<double>(2.0, 0.0); });
    CHECK(std::abs(bound - 2.0 * v) < 1e-12);
}

TEST_CASE("rebase round trips") {
    CoefField z3 = CoefField::root_of_unity(1, 3);
    CoefField lifted = z3.rebased(12);
    CHECK(lifted == z3);
    CHECK(lifted.order() == 12);
    CHECK(lifted.pow(3) == CoefField::integer(1));
    CHECK_THROWS_AS(z3.rebased(8), std::invalid_argument);
}
