#include "doctest.h"

#include "dpsym/poly.hpp"

#include <complex>

using namespace dpsym;

namespace {
Poly var(VarId v, int e = 1) { return Poly::variable(v, e); }
}  // namespace

TEST_CASE("monomial graded lex order") {
    VarId n = Symbols::n();
    VarId u0 = Symbols::u(0);
    VarId u1 = Symbols::u(1);

    Monomial one;
    Monomial mn = Monomial::var(n, 1);
    Monomial mu0 = Monomial::var(u0, 1);
    Monomial mu1 = Monomial::var(u1, 1);
    Monomial mn2 = Monomial::var(n, 2);

    CHECK(Monomial::cmp(one, mn) < 0);      // lower degree first
    CHECK(Monomial::cmp(mn, mn2) < 0);      // degree dominates
    CHECK(Monomial::cmp(mn, mu0) < 0);      // same degree: later VarId is larger
    CHECK(Monomial::cmp(mu0, mu1) < 0);
    CHECK(Monomial::cmp(mn2, mu0 * mu1) < 0);
    CHECK(Monomial::cmp(mu0 * mu0, mu0 * mu1) < 0);
    CHECK(Monomial::cmp(mn, mn) == 0);
}

TEST_CASE("monomial multiply and divide") {
    VarId n = Symbols::n(), u0 = Symbols::u(0);
    Monomial a = Monomial::var(n, 2) * Monomial::var(u0, 1);
    Monomial b = Monomial::var(n, 1);
    CHECK((a / b) == Monomial::var(n, 1) * Monomial::var(u0, 1));
    CHECK(b.divides(a));
    CHECK_FALSE(Monomial::var(u0, 2).divides(a));
    CHECK_THROWS_AS(b / a, std::domain_error);
}

TEST_CASE("polynomial arithmetic") {
    VarId n = Symbols::n(), u0 = Symbols::u(0);
    Poly p = var(n) + var(u0);          // n + u0
    Poly q = var(n) - var(u0);          // n - u0
    Poly prod = p * q;                  // n^2 - u0^2
    CHECK(prod == var(n, 2) - var(u0, 2));
    CHECK((p + q) == var(n).scaled(GaussianRational(2)));
    CHECK((p - p).is_zero());
    CHECK(p.pow(2) == var(n, 2) + var(n) * var(u0) * Poly(2) + var(u0, 2));
    CHECK(p.total_degree() == 1);
    CHECK(prod.total_degree() == 2);
    CHECK(Poly().total_degree() == -1);
}

TEST_CASE("polynomial derivative") {
    VarId n = Symbols::n(), u0 = Symbols::u(0);
    Poly p = var(n, 3) * var(u0) + var(u0, 2);
    CHECK(p.derivative(n) == var(n, 2) * var(u0) * Poly(3));
    CHECK(p.derivative(u0) == var(n, 3) + var(u0) * Poly(2));
    CHECK(p.derivative(Symbols::intern("a")).is_zero());
}

TEST_CASE("shift renames u and expands n") {
    VarId n = Symbols::n(), u0 = Symbols::u(0);
    Poly p = var(n, 2) * var(u0);
    Poly s = p.shifted(1);
    // (n+1)^2 u1 = (n^2 + 2n + 1) u1
    Poly expect = (var(n, 2) + var(n).scaled(GaussianRational(2)) + Poly(1)) * var(Symbols::u(1));
    CHECK(s == expect);
    CHECK(p.shifted(2).shifted(-2) == p);
    CHECK(p.shifted(0) == p);
}

TEST_CASE("coefficient collection") {
    VarId n = Symbols::n(), u0 = Symbols::u(0), u1 = Symbols::u(1);
    Poly p = var(u1, 2) * var(n) + var(u1) * var(u0) + Poly(5);
    auto cs = p.coeffs_in(u1);
    REQUIRE(cs.size() == 3);
    CHECK(cs[0] == Poly(5));
    CHECK(cs[1] == var(u0));
    CHECK(cs[2] == var(n));

    auto grouped = p.coeffs_in_vars({u0, u1});
    CHECK(grouped.at({0, 2}) == var(n));
    CHECK(grouped.at({1, 1}) == Poly(1));
    CHECK(grouped.at({0, 0}) == Poly(5));
}

TEST_CASE("exact division") {
    VarId n = Symbols::n(), u0 = Symbols::u(0);
    Poly p = var(n) + var(u0);
    Poly q = var(n) - var(u0);
    CHECK(poly_divexact(p * q, q) == p);
    CHECK(poly_divexact(p * p * q, p) == p * q);
    CHECK_THROWS_AS(poly_divexact(p, q), std::domain_error);
    CHECK(poly_divexact(p.scaled(GaussianRational(Rational(3, 2))), Poly(3)) ==
          p.scaled(GaussianRational(Rational(1, 2))));
}

TEST_CASE("multivariate gcd") {
    VarId n = Symbols::n(), u0 = Symbols::u(0), u1 = Symbols::u(1);
    Poly p = var(n) + var(u0);
    Poly q = var(n) - var(u0);
    Poly r = var(u1) + Poly(1);

    CHECK(poly_gcd(p * q, p * r) == p);
    CHECK(poly_gcd(p, q) == Poly(1));
    CHECK(poly_gcd(Poly(), p) == p);
    CHECK(poly_gcd(p.scaled(GaussianRational(4)), p.scaled(GaussianRational(6))) == p);
    // gcd over Q(i): (n^2 + u0^2) = (n + i u0)(n - i u0); the monic form of
    // n + i u0 (leading coefficient i on u0) is its -i multiple.
    Poly pi = var(n) + var(u0).scaled(GaussianRational::unit_i());
    Poly mi = var(n) - var(u0).scaled(GaussianRational::unit_i());
    CHECK(poly_gcd(pi * mi, pi * r) == pi.scaled(-GaussianRational::unit_i()));
    // result is monic even when inputs are not
    Poly g = poly_gcd((p * q).scaled(GaussianRational(10)), (p * r).scaled(GaussianRational(15)));
    CHECK(g == p);
}

TEST_CASE("gcd stress on common factors with content") {
    VarId n = Symbols::n(), u0 = Symbols::u(0), u1 = Symbols::u(1);
    Poly f = var(n, 2) * var(u0) + var(u1);     // irreducible-ish
    Poly a = f * (var(n) + Poly(3)) * var(u0);
    Poly b = f * (var(n) - Poly(2)) * var(u0, 2);
    Poly g = poly_gcd(a, b);
    CHECK(g == f * var(u0));
}

TEST_CASE("templated evaluation") {
    VarId n = Symbols::n(), u0 = Symbols::u(0);
    Poly p = var(n, 2) + var(u0).scaled(GaussianRational::unit_i());
    auto exact = p.eval<GaussianRational>([&](VarId v) {
        return v == n ? GaussianRational(3) : GaussianRational(2);
    });
    CHECK(exact == GaussianRational(Rational(9), Rational(2)));
    auto fl = p.eval<std::complex<double>>([&](VarId v) {
        return v == n ? std::complex<double>(3.0, 0.0) : std::complex<double>(2.0, 0.0);
    });
    CHECK(std::abs(fl - std::complex<double>(9.0, 2.0)) < 1e-14);
}

TEST_CASE("poly rendering") {
    VarId n = Symbols::n(), u0 = Symbols::u(0);
    CHECK(poly_to_string(Poly()) == "0");
    CHECK(poly_to_string(Poly(7)) == "7");
    Poly p = var(n, 2).scaled(GaussianRational(3)) - var(u0) + Poly(1);
    CHECK(poly_to_string(p) == "3*n^2 - u(0) + 1");
    Poly q = var(n).scaled(GaussianRational(Rational(0), Rational(-1)));
    CHECK(poly_to_string(q) == "-i*n");
    Poly r = var(n).scaled(GaussianRational(Rational(1, 2), Rational(1, 2)));
    CHECK(poly_to_string(r) == "(1/2+1/2*i)*n");
}
