#pragma once

// Rational functions num/den over GaussianRational coefficients, kept in
// canonical form: den != 0, gcd(num, den) = 1, den monic in graded-lex order.
// This is the coefficient field for shift-operator elimination and the value
// type of exact substitution.

#include "dpsym/errors.hpp"
#include "dpsym/poly.hpp"

#include <complex>
#include <map>
#include <string>

namespace dpsym {

class RatFunc;

// Zero tests visible to RatFunc::eval below.  The GaussianRational/CoefField
// overloads are found by argument-dependent lookup; std::complex needs this
// one declared before the template.
inline bool scalar_is_zero(const GaussianRational& x) { return x.is_zero(); }
inline bool scalar_is_zero(const std::complex<double>& x) {
    return x == std::complex<double>(0.0, 0.0);
}
bool scalar_is_zero(const RatFunc& x);

class RatFunc {
public:
    RatFunc() : num_(), den_(GaussianRational(1)) {}
    explicit RatFunc(const GaussianRational& c) : num_(c), den_(GaussianRational(1)) {}
    explicit RatFunc(long v) : RatFunc(GaussianRational(v)) {}
    explicit RatFunc(Poly n) : num_(std::move(n)), den_(GaussianRational(1)) {}
    RatFunc(Poly n, Poly d);  // normalizes

    static RatFunc variable(VarId v, int e = 1) { return RatFunc(Poly::variable(v, e)); }

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }

    bool is_zero() const { return num_.is_zero(); }
    bool is_poly() const { return den_.is_constant(); }
    bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
    GaussianRational constant_value() const {
        return num_.constant_value() / den_.constant_value();
    }

    bool depends_on(VarId v) const { return num_.depends_on(v) || den_.depends_on(v); }
    std::set<VarId> vars() const;

    RatFunc operator-() const;
    RatFunc inverse() const;
    RatFunc pow(int e) const;

    friend RatFunc operator+(const RatFunc& x, const RatFunc& y);
    friend RatFunc operator-(const RatFunc& x, const RatFunc& y);
    friend RatFunc operator*(const RatFunc& x, const RatFunc& y);
    friend RatFunc operator/(const RatFunc& x, const RatFunc& y);
    RatFunc& operator+=(const RatFunc& o) { return *this = *this + o; }
    RatFunc& operator-=(const RatFunc& o) { return *this = *this - o; }
    RatFunc& operator*=(const RatFunc& o) { return *this = *this * o; }
    RatFunc& operator/=(const RatFunc& o) { return *this = *this / o; }

    friend bool operator==(const RatFunc& x, const RatFunc& y) {
        return x.num_ == y.num_ && x.den_ == y.den_;
    }
    friend bool operator!=(const RatFunc& x, const RatFunc& y) { return !(x == y); }
    friend bool operator<(const RatFunc& x, const RatFunc& y) {
        if (x.num_ != y.num_) return x.num_ < y.num_;
        return x.den_ < y.den_;
    }

    RatFunc derivative(VarId v) const;

    /// n -> n+i, u(k) -> u(k+i); other variables fixed.
    RatFunc shifted(long i) const { return RatFunc(num_.shifted(i), den_.shifted(i)); }

    /// Replace the listed variables by rational functions (others untouched).
    /// Throws SingularSubstitutionError if the denominator collapses to zero.
    RatFunc substitute(const std::map<VarId, RatFunc>& bind) const;

    /// Evaluate with all variables bound to field values.  Throws EvalError
    /// on an exactly zero denominator.
    template <class F, class Lookup>
    F eval(Lookup&& value_of) const {
        F n = num_.template eval<F>(value_of);
        F d = den_.template eval<F>(value_of);
        if (scalar_is_zero(d)) throw EvalError("RatFunc::eval: denominator vanished");
        return n / d;
    }

    std::string to_string() const;

private:
    Poly num_, den_;
};

inline bool scalar_is_zero(const RatFunc& x) { return x.is_zero(); }

inline void scalar_convert(const GaussianRational& g, RatFunc& out) { out = RatFunc(g); }

// "One" of each scalar field, for generic linear algebra.
inline GaussianRational unit_scalar(const GaussianRational&) { return GaussianRational(1); }
inline RatFunc unit_scalar(const RatFunc&) { return RatFunc(1); }

}  // namespace dpsym
