#include "doctest.h"

#include "dpsym/rational.hpp"

using namespace dpsym;

TEST_CASE("rational helpers") {
    Rational r(3, 6);
    CHECK(rat_num(r) == 1);
    CHECK(rat_den(r) == 2);
    CHECK(rat_to_string(r) == "1/2");
    CHECK(rat_to_string(Rational(-4, 2)) == "-2");
    CHECK(rat_to_double(Rational(1, 4)) == doctest::Approx(0.25));
}

TEST_CASE("decimal parsing is exact") {
    CHECK(rational_from_decimal("12") == Rational(12));
    CHECK(rational_from_decimal("1.25") == Rational(5, 4));
    CHECK(rational_from_decimal("0.1") == Rational(1, 10));
    CHECK(rational_from_decimal("007.500") == Rational(15, 2));
    CHECK_THROWS(rational_from_decimal("1.2.3"));
    CHECK_THROWS(rational_from_decimal(""));
    CHECK_THROWS(rational_from_decimal("abc"));
}

TEST_CASE("gaussian rational arithmetic") {
    GaussianRational i = GaussianRational::unit_i();
    CHECK((i * i) == GaussianRational(-1));
    GaussianRational z(Rational(1, 2), Rational(3, 2));
    GaussianRational w(Rational(2), Rational(-1));
    CHECK((z + w) == GaussianRational(Rational(5, 2), Rational(1, 2)));
    CHECK((z * w) == GaussianRational(Rational(5, 2), Rational(5, 2)));
    CHECK((z / w) * w == z);
    CHECK(z * z.inverse() == GaussianRational(1));
    CHECK(z.conj().im == -z.im);
    CHECK(z.norm2() == Rational(1, 4) + Rational(9, 4));
    CHECK_THROWS_AS(z / GaussianRational(0), std::domain_error);
}

TEST_CASE("gaussian rational powers") {
    GaussianRational i = GaussianRational::unit_i();
    CHECK(i.pow(4) == GaussianRational(1));
    CHECK(i.pow(-1) == -i);
    GaussianRational z(Rational(1), Rational(1));
    CHECK(z.pow(2) == GaussianRational(Rational(0), Rational(2)));
    CHECK(z.pow(0) == GaussianRational(1));
    CHECK(z.pow(-2) * z.pow(2) == GaussianRational(1));
}

TEST_CASE("gaussian rational rendering") {
    CHECK(GaussianRational(0).to_string() == "0");
    CHECK(GaussianRational(1).to_string() == "1");
    CHECK(GaussianRational::unit_i().to_string() == "i");
    CHECK((-GaussianRational::unit_i()).to_string() == "-i");
    CHECK(GaussianRational(Rational(1, 2), Rational(0)).to_string() == "1/2");
    CHECK(GaussianRational(Rational(0), Rational(3, 2)).to_string() == "3/2*i");
    CHECK(GaussianRational(Rational(1, 2), Rational(3, 2)).to_string() == "1/2+3/2*i");
    CHECK(GaussianRational(Rational(1, 2), Rational(-3, 2)).to_string() == "1/2-3/2*i");
}
