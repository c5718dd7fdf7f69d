#include "dpsym/ratfunc.hpp"

namespace dpsym {

namespace {

/// Divide out gcd and make the denominator monic in graded-lex order.
void normalize(Poly& num, Poly& den) {
    if (den.is_zero()) throw std::domain_error("RatFunc: zero denominator");
    if (num.is_zero()) {
        den = Poly(GaussianRational(1));
        return;
    }
    Poly g = poly_gcd(num, den);
    if (!g.is_constant() || !g.constant_value().is_one()) {
        num = poly_divexact(num, g);
        den = poly_divexact(den, g);
    }
    GaussianRational lead = den.leading().second;
    if (!lead.is_one()) {
        GaussianRational inv = lead.inverse();
        num = num.scaled(inv);
        den = den.scaled(inv);
    }
}

}  // namespace

RatFunc::RatFunc(Poly n, Poly d) : num_(std::move(n)), den_(std::move(d)) {
    normalize(num_, den_);
}

std::set<VarId> RatFunc::vars() const {
    std::set<VarId> out = num_.vars();
    auto dv = den_.vars();
    out.insert(dv.begin(), dv.end());
    return out;
}

RatFunc RatFunc::operator-() const {
    RatFunc out;
    out.num_ = -num_;
    out.den_ = den_;
    return out;
}

RatFunc RatFunc::inverse() const {
    if (is_zero()) throw std::domain_error("RatFunc: inverse of zero");
    return RatFunc(den_, num_);
}

RatFunc RatFunc::pow(int e) const {
    if (e < 0) return inverse().pow(-e);
    RatFunc out;
    out.num_ = num_.pow(e);
    out.den_ = den_.pow(e);
    // Powers of a coprime pair stay coprime; only re-normalize the leading unit.
    GaussianRational lead = out.den_.leading().second;
    if (!lead.is_one()) {
        GaussianRational inv = lead.inverse();
        out.num_ = out.num_.scaled(inv);
        out.den_ = out.den_.scaled(inv);
    }
    return out;
}

RatFunc operator+(const RatFunc& x, const RatFunc& y) {
    if (x.is_zero()) return y;
    if (y.is_zero()) return x;
    Poly g = poly_gcd(x.den_, y.den_);
    Poly dy = poly_divexact(y.den_, g);
    Poly dx = poly_divexact(x.den_, g);
    return RatFunc(x.num_ * dy + y.num_ * dx, x.den_ * dy);
}

RatFunc operator-(const RatFunc& x, const RatFunc& y) { return x + (-y); }

RatFunc operator*(const RatFunc& x, const RatFunc& y) {
    if (x.is_zero() || y.is_zero()) return RatFunc();
    Poly g1 = poly_gcd(x.num_, y.den_);
    Poly g2 = poly_gcd(y.num_, x.den_);
    return RatFunc(poly_divexact(x.num_, g1) * poly_divexact(y.num_, g2),
                   poly_divexact(x.den_, g2) * poly_divexact(y.den_, g1));
}

RatFunc operator/(const RatFunc& x, const RatFunc& y) {
    if (y.is_zero()) throw std::domain_error("RatFunc: division by zero");
    return x * y.inverse();
}

RatFunc RatFunc::derivative(VarId v) const {
    // (n/d)' = (n'd - nd')/d^2
    return RatFunc(num_.derivative(v) * den_ - num_ * den_.derivative(v), den_ * den_);
}

RatFunc RatFunc::substitute(const std::map<VarId, RatFunc>& bind) const {
    auto lookup = [&](VarId v) -> RatFunc {
        auto it = bind.find(v);
        return it != bind.end() ? it->second : RatFunc::variable(v);
    };
    RatFunc n = num_.eval<RatFunc>(lookup);
    RatFunc d = den_.eval<RatFunc>(lookup);
    if (d.is_zero())
        throw SingularSubstitutionError("substitution made the denominator identically zero");
    return n / d;
}

std::string RatFunc::to_string() const {
    if (is_poly()) {
        GaussianRational c = den_.constant_value();
        if (c.is_one()) return poly_to_string(num_);
        return poly_to_string(num_.scaled(c.inverse()));
    }
    std::string n = poly_to_string(num_);
    std::string d = poly_to_string(den_);
    bool n_atom = num_.terms().size() == 1;
    bool d_atom = den_.terms().size() == 1 && den_.leading().first.total_degree() <= 1;
    std::string out = n_atom ? n : "(" + n + ")";
    out += " / ";
    out += d_atom ? d : "(" + d + ")";
    return out;
}

}  // namespace dpsym
