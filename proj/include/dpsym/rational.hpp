#pragma once

// Exact scalar arithmetic: arbitrary-precision rationals and Gaussian
// rationals (complex numbers with rational real/imaginary parts, kept in
// lowest terms).  All symbolic layers of the library sit on top of this type.

#include <boost/multiprecision/cpp_int.hpp>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace dpsym {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline BigInt rat_num(const Rational& r) { return boost::multiprecision::numerator(r); }
inline BigInt rat_den(const Rational& r) { return boost::multiprecision::denominator(r); }

/// Render a rational as "p" or "p/q" (q > 0, lowest terms).
inline std::string rat_to_string(const Rational& r) {
    if (rat_den(r) == 1) return rat_num(r).str();
    return rat_num(r).str() + "/" + rat_den(r).str();
}

inline double rat_to_double(const Rational& r) { return static_cast<double>(r); }

/// A complex number with exact rational real and imaginary parts.
struct GaussianRational {
    Rational re;
    Rational im;

    GaussianRational() : re(0), im(0) {}
    GaussianRational(long v) : re(v), im(0) {}
    GaussianRational(const Rational& r) : re(r), im(0) {}
    GaussianRational(Rational r, Rational i) : re(std::move(r)), im(std::move(i)) {}

    static GaussianRational unit_i() { return {Rational(0), Rational(1)}; }

    bool is_zero() const { return re == 0 && im == 0; }
    bool is_one() const { return re == 1 && im == 0; }
    bool is_real() const { return im == 0; }

    GaussianRational conj() const { return {re, -im}; }

    /// Squared modulus, an exact non-negative rational.
    Rational norm2() const { return re * re + im * im; }

    GaussianRational operator-() const { return {-re, -im}; }

    GaussianRational& operator+=(const GaussianRational& o) {
        re += o.re;
        im += o.im;
        return *this;
    }
    GaussianRational& operator-=(const GaussianRational& o) {
        re -= o.re;
        im -= o.im;
        return *this;
    }
    GaussianRational& operator*=(const GaussianRational& o) {
        Rational r = re * o.re - im * o.im;
        Rational i = re * o.im + im * o.re;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }
    GaussianRational& operator/=(const GaussianRational& o) {
        Rational n2 = o.norm2();
        if (n2 == 0) throw std::domain_error("GaussianRational: division by zero");
        Rational r = (re * o.re + im * o.im) / n2;
        Rational i = (im * o.re - re * o.im) / n2;
        re = std::move(r);
        im = std::move(i);
        return *this;
    }

    friend GaussianRational operator+(GaussianRational a, const GaussianRational& b) { return a += b; }
    friend GaussianRational operator-(GaussianRational a, const GaussianRational& b) { return a -= b; }
    friend GaussianRational operator*(GaussianRational a, const GaussianRational& b) { return a *= b; }
    friend GaussianRational operator/(GaussianRational a, const GaussianRational& b) { return a /= b; }

    friend bool operator==(const GaussianRational& a, const GaussianRational& b) {
        return a.re == b.re && a.im == b.im;
    }
    friend bool operator!=(const GaussianRational& a, const GaussianRational& b) { return !(a == b); }

    /// Total order (lexicographic on re, im); used only as a tie-breaker for
    /// deterministic container ordering, not as a numeric comparison.
    friend bool operator<(const GaussianRational& a, const GaussianRational& b) {
        if (a.re != b.re) return a.re < b.re;
        return a.im < b.im;
    }

    GaussianRational inverse() const {
        GaussianRational one(1);
        return one / *this;
    }

    /// Integer power; negative exponents invert (zero base rejected).
    GaussianRational pow(long e) const {
        if (e < 0) return inverse().pow(-e);
        GaussianRational acc(1), base = *this;
        while (e > 0) {
            if (e & 1) acc *= base;
            base *= base;
            e >>= 1;
        }
        return acc;
    }

    std::complex<double> to_complex() const { return {rat_to_double(re), rat_to_double(im)}; }

    /// Canonical literal form: "p/q", "r/s*i", "p/q+r/s*i", "p/q-r/s*i", "i", "-i", "0".
    std::string to_string() const {
        if (is_zero()) return "0";
        std::string out;
        if (re != 0) out = rat_to_string(re);
        if (im != 0) {
            std::string imag;
            if (im == 1) imag = "i";
            else if (im == -1) imag = "-i";
            else imag = rat_to_string(im) + "*i";
            if (out.empty()) out = imag;
            else if (imag[0] == '-') out += imag;
            else out += "+" + imag;
        }
        return out;
    }
};

/// Parse a decimal or integer literal ("12", "1.25") into an exact rational.
inline Rational rational_from_decimal(const std::string& s) {
    if (s.empty()) throw std::invalid_argument("bad decimal literal: empty string");
    for (size_t k = 0; k < s.size(); ++k) {
        bool digit = s[k] >= '0' && s[k] <= '9';
        bool sign = k == 0 && (s[k] == '-' || s[k] == '+');
        if (!digit && !sign && s[k] != '.')
            throw std::invalid_argument("bad decimal literal: " + s);
    }
    auto dot = s.find('.');
    if (dot == std::string::npos) return Rational(BigInt(s));
    if (s.find('.', dot + 1) != std::string::npos)
        throw std::invalid_argument("bad decimal literal: " + s);
    bool neg = s[0] == '-';
    std::string body = (s[0] == '-' || s[0] == '+') ? s.substr(1) : s;
    dot = body.find('.');
    std::string whole = body.substr(0, dot), frac = body.substr(dot + 1);
    if (whole.empty() && frac.empty()) throw std::invalid_argument("bad decimal literal: " + s);
    BigInt scale = 1;
    for (size_t k = 0; k < frac.size(); ++k) scale *= 10;
    BigInt numer = (whole.empty() ? BigInt(0) : BigInt(whole)) * scale + (frac.empty() ? BigInt(0) : BigInt(frac));
    if (neg) numer = -numer;
    return Rational(numer, scale);
}

}  // namespace dpsym
