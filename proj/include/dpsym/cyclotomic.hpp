#pragma once

// Exact arithmetic in Q(zeta_M)(a, b, ...): elements are vectors of
// coordinates over the power basis 1, zeta, ..., zeta^(phi(M)-1), with each
// coordinate a rational function of the parameters whose coefficients are
// plain rationals (no i).  The imaginary unit is embedded as zeta_M^(M/4)
// (so it requires 4 | M); keeping i out of the coordinate ring is what makes
// the zero test sound: an element is zero iff every coordinate is zero.

#include "dpsym/ratfunc.hpp"

#include <complex>
#include <functional>
#include <vector>

namespace dpsym {

/// Coefficients of the M-th cyclotomic polynomial, index = degree (monic).
std::vector<Rational> cyclotomic_poly(long m);

/// Euler phi.
long euler_phi(long m);

class CoefField {
public:
    CoefField() : CoefField(1) {}
    explicit CoefField(long order) : m_(check_order(order)), coords_(basis_size(m_)) {}

    static CoefField from_rational(const Rational& r);
    static CoefField from_gaussian(const GaussianRational& g);
    /// Split a rational function with Gaussian-rational coefficients into
    /// real-coefficient coordinates (i becomes zeta_4).
    static CoefField from_ratfunc(const RatFunc& f);
    /// zeta_m^k.
    static CoefField root_of_unity(long k, long m);
    static CoefField integer(long v) { return from_rational(Rational(v)); }

    long order() const { return m_; }
    const std::vector<RatFunc>& coords() const { return coords_; }

    bool is_zero() const;
    bool depends_on_params() const;

    /// Same element of the larger field Q(zeta_target), m_ | target.
    CoefField rebased(long target) const;

    CoefField operator-() const;
    friend CoefField operator+(const CoefField& x, const CoefField& y);
    friend CoefField operator-(const CoefField& x, const CoefField& y);
    friend CoefField operator*(const CoefField& x, const CoefField& y);
    friend CoefField operator/(const CoefField& x, const CoefField& y);
    CoefField& operator+=(const CoefField& o) { return *this = *this + o; }
    CoefField& operator-=(const CoefField& o) { return *this = *this - o; }
    CoefField& operator*=(const CoefField& o) { return *this = *this * o; }
    CoefField& operator/=(const CoefField& o) { return *this = *this / o; }

    CoefField inverse() const;
    CoefField pow(long e) const;

    friend bool operator==(const CoefField& x, const CoefField& y) { return (x - y).is_zero(); }
    friend bool operator!=(const CoefField& x, const CoefField& y) { return !(x == y); }

    /// True if the element is a constant lying in Q(i).
    bool is_gaussian() const;
    /// Extract the Q(i) value; throws std::domain_error unless is_gaussian().
    GaussianRational to_gaussian() const;

    /// Numeric value with the parameters bound.
    std::complex<double> eval_complex(
        const std::function<std::complex<double>(VarId)>& value_of) const;
    std::complex<double> eval_complex() const;  // no free parameters allowed

    std::string to_string() const;

private:
    static long check_order(long m);
    static std::size_t basis_size(long m);

    long m_;
    std::vector<RatFunc> coords_;  // size phi(m_)
};

inline bool scalar_is_zero(const CoefField& x) { return x.is_zero(); }
inline void scalar_convert(const GaussianRational& g, CoefField& out) {
    out = CoefField::from_gaussian(g);
}
inline CoefField unit_scalar(const CoefField&) { return CoefField::integer(1); }

}  // namespace dpsym
