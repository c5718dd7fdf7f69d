#pragma once

// Sparse multivariate polynomials over GaussianRational, ordered by graded
// lexicographic monomial order (total degree first; ties broken on the
// exponent of the highest variable, then downwards).  This is the engine
// under RationalFunction: arithmetic, exact division, and a recursive
// primitive-PRS gcd.

#include "dpsym/rational.hpp"
#include "dpsym/symbols.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace dpsym {

/// Exponent vector, sparse: (variable, exponent>0) pairs sorted by VarId.
struct Monomial {
    std::vector<std::pair<VarId, int>> exps;

    bool empty() const { return exps.empty(); }

    int total_degree() const {
        int d = 0;
        for (auto& [v, e] : exps) d += e;
        return d;
    }

    int degree_in(VarId v) const {
        for (auto& [w, e] : exps)
            if (w == v) return e;
        return 0;
    }

    static Monomial var(VarId v, int e = 1) {
        Monomial m;
        if (e < 0) throw std::invalid_argument("Monomial: negative exponent");
        if (e > 0) m.exps.emplace_back(v, e);
        return m;
    }

    friend Monomial operator*(const Monomial& x, const Monomial& y) {
        Monomial out;
        out.exps.reserve(x.exps.size() + y.exps.size());
        size_t i = 0, j = 0;
        while (i < x.exps.size() || j < y.exps.size()) {
            if (j >= y.exps.size() || (i < x.exps.size() && x.exps[i].first < y.exps[j].first))
                out.exps.push_back(x.exps[i++]);
            else if (i >= x.exps.size() || y.exps[j].first < x.exps[i].first)
                out.exps.push_back(y.exps[j++]);
            else {
                out.exps.emplace_back(x.exps[i].first, x.exps[i].second + y.exps[j].second);
                ++i, ++j;
            }
        }
        return out;
    }

    /// Exact quotient; throws if y does not divide x.
    friend Monomial operator/(const Monomial& x, const Monomial& y) {
        Monomial out;
        size_t i = 0;
        for (auto& [v, e] : y.exps) {
            while (i < x.exps.size() && x.exps[i].first < v) out.exps.push_back(x.exps[i++]);
            if (i >= x.exps.size() || x.exps[i].first != v || x.exps[i].second < e)
                throw std::domain_error("Monomial: not divisible");
            if (x.exps[i].second > e) out.exps.emplace_back(v, x.exps[i].second - e);
            ++i;
        }
        while (i < x.exps.size()) out.exps.push_back(x.exps[i++]);
        return out;
    }

    bool divides(const Monomial& x) const {
        size_t i = 0;
        for (auto& [v, e] : exps) {
            while (i < x.exps.size() && x.exps[i].first < v) ++i;
            if (i >= x.exps.size() || x.exps[i].first != v || x.exps[i].second < e) return false;
        }
        return true;
    }

    friend bool operator==(const Monomial& x, const Monomial& y) { return x.exps == y.exps; }

    /// Graded lex: by total degree, then by exponent of the highest variable
    /// downwards (a higher power of a later variable makes the monomial larger).
    static int cmp(const Monomial& x, const Monomial& y) {
        int dx = x.total_degree(), dy = y.total_degree();
        if (dx != dy) return dx < dy ? -1 : 1;
        auto i = x.exps.rbegin();
        auto j = y.exps.rbegin();
        while (i != x.exps.rend() && j != y.exps.rend()) {
            if (i->first != j->first) return i->first < j->first ? -1 : 1;
            if (i->second != j->second) return i->second < j->second ? -1 : 1;
            ++i, ++j;
        }
        if (i != x.exps.rend()) return 1;
        if (j != y.exps.rend()) return -1;
        return 0;
    }
};

/// Comparator putting the graded-lex largest monomial first.
struct MonomialGrlexDesc {
    bool operator()(const Monomial& x, const Monomial& y) const { return Monomial::cmp(x, y) > 0; }
};

class Poly {
public:
    using TermMap = std::map<Monomial, GaussianRational, MonomialGrlexDesc>;

    Poly() = default;
    explicit Poly(const GaussianRational& c) {
        if (!c.is_zero()) terms_.emplace(Monomial{}, c);
    }
    explicit Poly(long v) : Poly(GaussianRational(v)) {}

    static Poly variable(VarId v, int e = 1) {
        Poly p;
        p.terms_.emplace(Monomial::var(v, e), GaussianRational(1));
        return p;
    }
    static Poly term(const GaussianRational& c, const Monomial& m) {
        Poly p;
        if (!c.is_zero()) p.terms_.emplace(m, c);
        return p;
    }

    const TermMap& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const { return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty()); }

    GaussianRational constant_value() const {
        if (terms_.empty()) return GaussianRational(0);
        if (!is_constant()) throw std::domain_error("Poly: not a constant");
        return terms_.begin()->second;
    }

    int total_degree() const { return terms_.empty() ? -1 : terms_.begin()->first.total_degree(); }

    int degree_in(VarId v) const {
        int d = 0;
        for (auto& [m, c] : terms_) d = std::max(d, m.degree_in(v));
        return d;
    }

    bool depends_on(VarId v) const {
        for (auto& [m, c] : terms_)
            if (m.degree_in(v) > 0) return true;
        return false;
    }

    std::set<VarId> vars() const {
        std::set<VarId> out;
        for (auto& [m, c] : terms_)
            for (auto& [v, e] : m.exps) out.insert(v);
        return out;
    }

    /// Leading (graded-lex greatest) term.
    const std::pair<const Monomial, GaussianRational>& leading() const {
        if (terms_.empty()) throw std::domain_error("Poly: leading term of zero");
        return *terms_.begin();
    }

    void add_term(const Monomial& m, const GaussianRational& c) {
        if (c.is_zero()) return;
        auto [it, fresh] = terms_.emplace(m, c);
        if (!fresh) {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    Poly operator-() const {
        Poly out;
        for (auto& [m, c] : terms_) out.terms_.emplace(m, -c);
        return out;
    }

    Poly& operator+=(const Poly& o) {
        for (auto& [m, c] : o.terms_) add_term(m, c);
        return *this;
    }
    Poly& operator-=(const Poly& o) {
        for (auto& [m, c] : o.terms_) add_term(m, -c);
        return *this;
    }

    friend Poly operator+(Poly x, const Poly& y) { return x += y; }
    friend Poly operator-(Poly x, const Poly& y) { return x -= y; }

    friend Poly operator*(const Poly& x, const Poly& y) {
        Poly out;
        for (auto& [mx, cx] : x.terms_)
            for (auto& [my, cy] : y.terms_) out.add_term(mx * my, cx * cy);
        return out;
    }
    Poly& operator*=(const Poly& o) { return *this = *this * o; }

    Poly scaled(const GaussianRational& c) const {
        Poly out;
        if (c.is_zero()) return out;
        for (auto& [m, k] : terms_) out.terms_.emplace(m, k * c);
        return out;
    }

    Poly pow(int e) const {
        if (e < 0) throw std::invalid_argument("Poly::pow: negative exponent");
        Poly acc(GaussianRational(1)), base = *this;
        while (e > 0) {
            if (e & 1) acc *= base;
            if (e >>= 1) base *= base;
        }
        return acc;
    }

    friend bool operator==(const Poly& x, const Poly& y) {
        if (x.terms_.size() != y.terms_.size()) return false;
        auto i = x.terms_.begin();
        auto j = y.terms_.begin();
        for (; i != x.terms_.end(); ++i, ++j)
            if (!(i->first == j->first) || i->second != j->second) return false;
        return true;
    }
    friend bool operator!=(const Poly& x, const Poly& y) { return !(x == y); }

    /// Deterministic total order (for use as map keys).
    friend bool operator<(const Poly& x, const Poly& y) {
        auto i = x.terms_.begin();
        auto j = y.terms_.begin();
        for (; i != x.terms_.end() && j != y.terms_.end(); ++i, ++j) {
            int c = Monomial::cmp(i->first, j->first);
            if (c != 0) return c < 0;
            if (i->second != j->second) return i->second < j->second;
        }
        return i == x.terms_.end() && j != y.terms_.end();
    }

    Poly derivative(VarId v) const {
        Poly out;
        for (auto& [m, c] : terms_) {
            int e = m.degree_in(v);
            if (e == 0) continue;
            Monomial q = m / Monomial::var(v, 1);
            out.add_term(q, c * GaussianRational(e));
        }
        return out;
    }

    /// n -> n+i (binomial expansion), u(k) -> u(k+i); other variables fixed.
    Poly shifted(long i) const {
        if (i == 0) return *this;
        Poly out;
        const VarId nv = Symbols::n();
        for (auto& [m, c] : terms_) {
            Monomial rest;
            int en = 0;
            for (auto& [v, e] : m.exps) {
                if (v == nv) en = e;
                else rest = rest * Monomial::var(Symbols::shifted(v, i), e);
            }
            if (en == 0) {
                out.add_term(rest, c);
            } else {
                // (n+i)^en = sum_k C(en,k) i^(en-k) n^k
                BigInt binom = 1;
                std::vector<Rational> coef(en + 1);
                for (int k = 0; k <= en; ++k) {
                    // C(en,k)
                    coef[k] = Rational(binom);
                    binom = binom * (en - k) / (k + 1);
                }
                Rational ipow = 1;
                std::vector<Rational> shift_pow(en + 1);
                for (int k = 0; k <= en; ++k) {
                    shift_pow[k] = ipow;
                    ipow *= i;
                }
                for (int k = 0; k <= en; ++k) {
                    GaussianRational ck = c * GaussianRational(coef[k] * shift_pow[en - k]);
                    out.add_term(rest * Monomial::var(nv, k), ck);
                }
            }
        }
        return out;
    }

    /// Coefficients of powers of `v`: result[e] is the coefficient of v^e.
    std::vector<Poly> coeffs_in(VarId v) const {
        std::vector<Poly> out(static_cast<size_t>(degree_in(v)) + 1);
        for (auto& [m, c] : terms_) {
            int e = m.degree_in(v);
            Monomial rest = e ? m / Monomial::var(v, e) : m;
            out[e].add_term(rest, c);
        }
        return out;
    }

    /// Group terms by joint exponents of `vs`; key = exponent tuple in vs-order.
    std::map<std::vector<int>, Poly> coeffs_in_vars(const std::vector<VarId>& vs) const {
        std::map<std::vector<int>, Poly> out;
        for (auto& [m, c] : terms_) {
            std::vector<int> key(vs.size());
            Monomial rest = m;
            for (size_t k = 0; k < vs.size(); ++k) {
                int e = m.degree_in(vs[k]);
                key[k] = e;
                if (e) rest = rest / Monomial::var(vs[k], e);
            }
            auto [it, fresh] = out.emplace(key, Poly::term(c, rest));
            if (!fresh) it->second.add_term(rest, c);
        }
        return out;
    }

    /// Evaluate with every variable bound; F is any field-like scalar that
    /// scalar_convert can target (GaussianRational, std::complex<double>, ...).
    template <class F, class Lookup>
    F eval(Lookup&& value_of) const {
        F acc{};
        scalar_convert(GaussianRational(0), acc);
        for (auto& [m, c] : terms_) {
            F t{};
            scalar_convert(c, t);
            for (auto& [v, e] : m.exps) {
                F base = value_of(v);
                for (int k = 0; k < e; ++k) t = t * base;
            }
            acc = acc + t;
        }
        return acc;
    }

private:
    TermMap terms_;
};

inline void scalar_convert(const GaussianRational& g, GaussianRational& out) { out = g; }
inline void scalar_convert(const GaussianRational& g, std::complex<double>& out) { out = g.to_complex(); }

// --- exact division and gcd ---------------------------------------------

namespace detail {

/// View of a polynomial as univariate in `x` with Poly coefficients.
inline std::vector<Poly> univ(const Poly& p, VarId x) { return p.coeffs_in(x); }

inline Poly assemble(const std::vector<Poly>& cs, VarId x) {
    Poly out;
    for (size_t e = 0; e < cs.size(); ++e) out += cs[e] * Poly::variable(x, static_cast<int>(e));
    return out;
}

inline int udeg(const std::vector<Poly>& cs) {
    for (int e = static_cast<int>(cs.size()) - 1; e >= 0; --e)
        if (!cs[e].is_zero()) return e;
    return -1;
}

}  // namespace detail

/// Exact quotient p/q; throws std::domain_error unless q divides p.
Poly poly_divexact(const Poly& p, const Poly& q);

/// Monic (leading graded-lex coefficient 1) gcd; gcd(0,0) = 0.
Poly poly_gcd(const Poly& a, const Poly& b);

/// Render in re-parseable form, terms in graded-lex descending order,
/// e.g. "3*n^2*u(0) - 1/2*u(1) + 1".
std::string poly_to_string(const Poly& p);

}  // namespace dpsym
