#include "dpsym/seqform.hpp"

#include "dpsym/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace dpsym {

namespace {

long gcd_long(long a, long b) { return std::gcd(a, b); }

std::complex<double> ipow_complex(std::complex<double> b, long e) {
    if (e < 0) {
        b = 1.0 / b;
        e = -e;
    }
    std::complex<double> acc(1.0, 0.0);
    while (e > 0) {
        if (e & 1) acc *= b;
        b *= b;
        e >>= 1;
    }
    return acc;
}

Rational rational_ipow(const Rational& b, long e) {
    Rational acc(1);
    for (long k = 0; k < e; ++k) acc *= b;
    return acc;
}

}  // namespace

// --- RootOfUnityScalar ----------------------------------------------------

RootOfUnityScalar RootOfUnityScalar::make(const GaussianRational& scale, long k, long m) {
    if (m < 1) throw std::invalid_argument("RootOfUnityScalar: order must be positive");
    if (scale.is_zero()) throw std::invalid_argument("RootOfUnityScalar: zero scale");
    k %= m;
    if (k < 0) k += m;

    // Fold the unit factor of scale into the exponent: scale = s' * i^j with
    // s' in the closed first quadrant (re > 0, im >= 0).
    GaussianRational s = scale;
    long j = 0;
    for (; j < 4; ++j) {
        if (s.re > 0 && !(s.im < 0)) break;
        s = s * (-GaussianRational::unit_i());  // rotate by i^-1
    }
    if (j == 4) throw std::logic_error("RootOfUnityScalar: unit folding failed");

    // exponent k/m + j/4
    long num = 4 * k + j * m;
    long den = 4 * m;
    num %= den;
    long g = gcd_long(num, den);
    if (g > 0) num /= g, den /= g;
    if (num == 0) den = 1;

    RootOfUnityScalar out;
    out.scale = s;
    out.k = num;
    out.m = den;
    return out;
}

RootOfUnityScalar operator*(const RootOfUnityScalar& x, const RootOfUnityScalar& y) {
    long m = x.m * y.m;
    long k = x.k * y.m + y.k * x.m;
    return RootOfUnityScalar::make(x.scale * y.scale, k, m);
}

RootOfUnityScalar RootOfUnityScalar::pow(long e) const {
    long er = e % m;
    if (er < 0) er += m;
    return make(scale.pow(e), er * k, m);
}

CoefField RootOfUnityScalar::value() const {
    return CoefField::from_gaussian(scale) * CoefField::root_of_unity(k, m);
}

CoefField RootOfUnityScalar::value_pow(long n) const {
    long nr = n % m;
    if (nr < 0) nr += m;
    return CoefField::from_gaussian(scale.pow(n)) * CoefField::root_of_unity(nr * k, m);
}

std::complex<double> RootOfUnityScalar::to_complex() const {
    const double tau = 6.283185307179586476925286766559;
    return scale.to_complex() *
           std::polar(1.0, tau * static_cast<double>(k) / static_cast<double>(m));
}

std::string RootOfUnityScalar::to_string() const {
    std::string root = k == 0 ? "" : "rou(" + std::to_string(k) + "," + std::to_string(m) + ")";
    if (scale.is_one()) return root.empty() ? "1" : root;
    std::string s = scale.to_string();
    if (!scale.im.is_zero() || scale.re < 0 || rat_den(scale.re) != 1) s = "(" + s + ")";
    return root.empty() ? s : s + "*" + root;
}

// --- coefficients ---------------------------------------------------------

bool seq_coeff_is_zero(const SeqCoeff& c) {
    if (std::holds_alternative<CoefField>(c)) return std::get<CoefField>(c).is_zero();
    return std::get<std::complex<double>>(c) == std::complex<double>(0.0, 0.0);
}

std::string seq_coeff_to_string(const SeqCoeff& c) {
    if (std::holds_alternative<std::complex<double>>(c)) {
        auto z = std::get<std::complex<double>>(c);
        std::ostringstream out;
        out.precision(17);
        out << "(" << z.real();
        if (z.imag() >= 0) out << "+";
        out << z.imag() << "*i)";
        return out.str();
    }
    const CoefField& x = std::get<CoefField>(c);
    if (x.is_gaussian()) {
        GaussianRational g = x.to_gaussian();
        std::string s = g.to_string();
        if (!g.im.is_zero() || g.re < 0 || rat_den(g.re) != 1) return "(" + s + ")";
        return s;
    }
    if (!x.depends_on_params() || x.order() == 1) {
        // Rational function of parameters (possibly with i), Expr-grammar text.
        if (x.order() == 1) return "(" + x.coords()[0].to_string() + ")";
    }
    return "(" + x.to_string() + ")";
}

namespace {

SeqCoeff coeff_add(const SeqCoeff& x, const SeqCoeff& y) {
    if (std::holds_alternative<CoefField>(x) && std::holds_alternative<CoefField>(y))
        return std::get<CoefField>(x) + std::get<CoefField>(y);
    auto as_complex = [](const SeqCoeff& c) {
        if (std::holds_alternative<std::complex<double>>(c))
            return std::get<std::complex<double>>(c);
        return std::get<CoefField>(c).eval_complex();
    };
    return as_complex(x) + as_complex(y);
}

SeqCoeff coeff_mul(const SeqCoeff& x, const SeqCoeff& y) {
    if (std::holds_alternative<CoefField>(x) && std::holds_alternative<CoefField>(y))
        return std::get<CoefField>(x) * std::get<CoefField>(y);
    auto as_complex = [](const SeqCoeff& c) {
        if (std::holds_alternative<std::complex<double>>(c))
            return std::get<std::complex<double>>(c);
        return std::get<CoefField>(c).eval_complex();
    };
    return as_complex(x) * as_complex(y);
}

SeqCoeff coeff_neg(const SeqCoeff& x) {
    if (std::holds_alternative<CoefField>(x)) return -std::get<CoefField>(x);
    return -std::get<std::complex<double>>(x);
}

bool coeff_equal(const SeqCoeff& x, const SeqCoeff& y) {
    if (x.index() != y.index()) return false;
    if (std::holds_alternative<CoefField>(x))
        return std::get<CoefField>(x) == std::get<CoefField>(y);
    return std::get<std::complex<double>>(x) == std::get<std::complex<double>>(y);
}

bool term_key_less(const SeqTerm& a, const SeqTerm& b) {
    if (a.lambda != b.lambda) return a.lambda < b.lambda;
    return a.deg < b.deg;
}

}  // namespace

// --- SequenceClosedForm ---------------------------------------------------

SequenceClosedForm SequenceClosedForm::term(SeqCoeff c, const RootOfUnityScalar& lambda,
                                            long deg) {
    SequenceClosedForm out;
    if (deg < 0) throw std::invalid_argument("SequenceClosedForm: negative degree");
    out.add_term(SeqTerm{std::move(c), lambda, deg});
    return out;
}

void SequenceClosedForm::add_term(SeqTerm t) {
    if (seq_coeff_is_zero(t.c)) return;
    auto it = std::lower_bound(terms_.begin(), terms_.end(), t, term_key_less);
    if (it != terms_.end() && it->lambda == t.lambda && it->deg == t.deg) {
        it->c = coeff_add(it->c, t.c);
        if (seq_coeff_is_zero(it->c)) terms_.erase(it);
    } else {
        terms_.insert(it, std::move(t));
    }
}

bool SequenceClosedForm::is_exact() const {
    for (auto& t : terms_)
        if (!std::holds_alternative<CoefField>(t.c)) return false;
    return true;
}

SequenceClosedForm SequenceClosedForm::operator-() const {
    SequenceClosedForm out = *this;
    for (auto& t : out.terms_) t.c = coeff_neg(t.c);
    return out;
}

SequenceClosedForm operator+(const SequenceClosedForm& x, const SequenceClosedForm& y) {
    SequenceClosedForm out = x;
    for (auto& t : y.terms_) out.add_term(t);
    return out;
}

SequenceClosedForm operator-(const SequenceClosedForm& x, const SequenceClosedForm& y) {
    return x + (-y);
}

SequenceClosedForm SequenceClosedForm::scaled(const SeqCoeff& c) const {
    if (seq_coeff_is_zero(c)) return {};
    SequenceClosedForm out;
    for (auto& t : terms_) out.add_term(SeqTerm{coeff_mul(t.c, c), t.lambda, t.deg});
    return out;
}

SequenceClosedForm SequenceClosedForm::shifted(long j) const {
    if (j == 0) return *this;
    SequenceClosedForm out;
    for (auto& t : terms_) {
        // c * lambda^(n+j) * (n+j)^deg
        SeqCoeff base;
        if (std::holds_alternative<CoefField>(t.c)) {
            base = std::get<CoefField>(t.c) * t.lambda.value_pow(j);
        } else {
            base = std::get<std::complex<double>>(t.c) * ipow_complex(t.lambda.to_complex(), j);
        }
        for (long s = t.deg; s >= 0; --s) {
            // C(deg, s) * j^(deg - s), building binomials from the top down
            BigInt c_binom = 1;
            for (long idx = 0; idx < s; ++idx) c_binom = c_binom * (t.deg - idx) / (idx + 1);
            Rational factor = Rational(c_binom) * rational_ipow(Rational(j), t.deg - s);
            if (factor == 0) continue;
            SeqCoeff c2;
            if (std::holds_alternative<CoefField>(base)) {
                c2 = std::get<CoefField>(base) * CoefField::from_rational(factor);
            } else {
                c2 = std::get<std::complex<double>>(base) * rat_to_double(factor);
            }
            out.add_term(SeqTerm{std::move(c2), t.lambda, s});
        }
    }
    return out;
}

CoefField SequenceClosedForm::eval_exact(long n) const {
    CoefField acc;
    for (auto& t : terms_) {
        if (!std::holds_alternative<CoefField>(t.c))
            throw EvalError("SequenceClosedForm: floating coefficient in exact evaluation");
        CoefField v = std::get<CoefField>(t.c) * t.lambda.value_pow(n);
        if (t.deg > 0) v *= CoefField::from_rational(rational_ipow(Rational(n), t.deg));
        acc += v;
    }
    return acc;
}

std::complex<double> SequenceClosedForm::eval_complex(
    long n, const std::function<std::complex<double>(VarId)>& value_of) const {
    std::complex<double> acc(0.0, 0.0);
    for (auto& t : terms_) {
        std::complex<double> c = std::holds_alternative<CoefField>(t.c)
                                     ? std::get<CoefField>(t.c).eval_complex(value_of)
                                     : std::get<std::complex<double>>(t.c);
        std::complex<double> v = c * ipow_complex(t.lambda.to_complex(), n);
        for (long s = 0; s < t.deg; ++s) v *= static_cast<double>(n);
        acc += v;
    }
    return acc;
}

std::complex<double> SequenceClosedForm::eval_complex(long n) const {
    return eval_complex(n, [](VarId v) -> std::complex<double> {
        throw EvalError("SequenceClosedForm: unbound symbol '" + Symbols::name(v) + "'");
    });
}

std::optional<long> SequenceClosedForm::period() const {
    long l = 1;
    for (auto& t : terms_) {
        if (t.deg != 0) return std::nullopt;
        if (!t.lambda.is_unit_modulus()) return std::nullopt;
        l = std::lcm(l, t.lambda.m);
    }
    return l;
}

bool operator==(const SequenceClosedForm& x, const SequenceClosedForm& y) {
    if (x.terms_.size() != y.terms_.size()) return false;
    for (std::size_t j = 0; j < x.terms_.size(); ++j) {
        const SeqTerm& s = x.terms_[j];
        const SeqTerm& t = y.terms_[j];
        if (s.lambda != t.lambda || s.deg != t.deg || !coeff_equal(s.c, t.c)) return false;
    }
    return true;
}

std::string SequenceClosedForm::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    for (auto& t : terms_) {
        std::string piece = seq_coeff_to_string(t.c);
        if (!t.lambda.is_one()) {
            const auto& l = t.lambda;
            if (!l.scale.is_one()) {
                std::string s = l.scale.to_string();
                if (!l.scale.im.is_zero() || l.scale.re < 0 || rat_den(l.scale.re) != 1)
                    s = "(" + s + ")";
                piece += " * " + s + "^n";
            }
            if (l.k != 0)
                piece += " * rou(" + std::to_string(l.k) + "," + std::to_string(l.m) + ")^n";
        }
        if (t.deg == 1) piece += " * n";
        if (t.deg > 1) piece += " * n^" + std::to_string(t.deg);
        out += out.empty() ? piece : " + " + piece;
    }
    return out;
}

// --- recurrences ----------------------------------------------------------

RecurrenceConstraint::RecurrenceConstraint(std::vector<GaussianRational> coeffs)
    : coefficients(std::move(coeffs)) {
    if (coefficients.size() < 2)
        throw ValidationError("RecurrenceConstraint: order must be at least 1");
    if (coefficients.back().is_zero())
        throw ValidationError("RecurrenceConstraint: leading coefficient must be nonzero");
}

std::string RecurrenceConstraint::to_string() const {
    std::string out;
    for (std::size_t j = coefficients.size(); j-- > 0;) {
        if (coefficients[j].is_zero()) continue;
        std::string c = coefficients[j].to_string();
        if (!coefficients[j].im.is_zero() || coefficients[j].re < 0) c = "(" + c + ")";
        std::string arg = j == 0 ? "n" : "n+" + std::to_string(j);
        std::string piece = c == "1" ? "s(" + arg + ")" : c + "*s(" + arg + ")";
        out += out.empty() ? piece : " + " + piece;
    }
    return out + " = 0";
}

namespace {

using UPoly = std::vector<GaussianRational>;  // univariate over Q(i), index = degree

void up_trim(UPoly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

UPoly up_deriv(const UPoly& p) {
    UPoly out;
    for (std::size_t j = 1; j < p.size(); ++j) out.push_back(p[j] * GaussianRational(static_cast<long>(j)));
    up_trim(out);
    return out;
}

std::pair<UPoly, UPoly> up_divmod(UPoly a, const UPoly& b) {
    up_trim(a);
    if (b.empty()) throw std::domain_error("up_divmod: zero divisor");
    if (a.size() < b.size()) return {UPoly{}, std::move(a)};
    UPoly q(a.size() - b.size() + 1);
    GaussianRational lead = b.back();
    while (a.size() >= b.size()) {
        GaussianRational c = a.back() / lead;
        std::size_t k = a.size() - b.size();
        q[k] = c;
        for (std::size_t j = 0; j < b.size(); ++j) a[k + j] -= c * b[j];
        a.pop_back();
        up_trim(a);
        if (a.empty()) break;
    }
    up_trim(q);
    return {std::move(q), std::move(a)};
}

UPoly up_gcd(UPoly a, UPoly b) {
    up_trim(a);
    up_trim(b);
    while (!b.empty()) {
        UPoly r = up_divmod(a, b).second;
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        GaussianRational inv = a.back().inverse();
        for (auto& c : a) c *= inv;
    }
    return a;
}

CoefField up_eval(const UPoly& p, const CoefField& x) {
    CoefField acc;
    for (std::size_t j = p.size(); j-- > 0;)
        acc = acc * x + CoefField::from_gaussian(p[j]);
    return acc;
}

std::complex<double> up_eval_c(const std::vector<std::complex<double>>& p,
                               std::complex<double> x) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t j = p.size(); j-- > 0;) acc = acc * x + p[j];
    return acc;
}

/// Durand-Kerner root finding for a monic complex polynomial.
std::vector<std::complex<double>> numeric_roots(std::vector<std::complex<double>> p) {
    std::size_t deg = p.size() - 1;
    std::complex<double> lead = p.back();
    for (auto& c : p) c /= lead;
    std::vector<std::complex<double>> z(deg);
    std::complex<double> seed(0.4, 0.9);
    z[0] = seed;
    for (std::size_t j = 1; j < deg; ++j) z[j] = z[j - 1] * seed;
    for (int iter = 0; iter < 200; ++iter) {
        double worst = 0.0;
        for (std::size_t j = 0; j < deg; ++j) {
            std::complex<double> denom(1.0, 0.0);
            for (std::size_t l = 0; l < deg; ++l)
                if (l != j) denom *= z[j] - z[l];
            std::complex<double> delta = up_eval_c(p, z[j]) / denom;
            z[j] -= delta;
            worst = std::max(worst, std::abs(delta));
        }
        if (worst < 1e-14) break;
    }
    return z;
}

/// Best rational p/q with q <= qmax within tol of x (continued fractions).
/// The denominator cap matters: a root that merely happens to be near some
/// large-denominator rational must fall through to the non-cyclotomic error,
/// and the cap rejects those cheaply before any exact arithmetic runs.
std::optional<Rational> rationalize(double x, double tol, long qmax = 1000) {
    if (!std::isfinite(x)) return std::nullopt;
    double v = x;
    long p0 = 1, q0 = 0;  // previous convergent
    long p1 = static_cast<long>(std::floor(v)), q1 = 1;
    for (int iter = 0; iter < 64; ++iter) {
        double approx = static_cast<double>(p1) / static_cast<double>(q1);
        if (std::abs(approx - x) <= tol) return Rational(p1, q1);
        double frac = v - std::floor(v);
        if (frac < 1e-15) break;
        v = 1.0 / frac;
        double fl = std::floor(v);
        if (fl > 1e15) break;
        long a = static_cast<long>(fl);
        long p2 = a * p1 + p0;
        long q2 = a * q1 + q0;
        if (q2 > qmax) break;
        p0 = p1, q0 = q1, p1 = p2, q1 = q2;
    }
    return std::nullopt;
}

/// Recognize z as a canonical scaled root of unity that is an exact root of p.
std::optional<RootOfUnityScalar> recognize_root(std::complex<double> z, const UPoly& p) {
    const double tau = 6.283185307179586476925286766559;
    double mag = std::max(1.0, std::abs(z));
    for (long m = 1; m <= 64; ++m) {
        for (long k = 0; k < m; ++k) {
            if (m == 1) {
                if (k != 0) continue;
            } else if (k == 0 || gcd_long(k, m) != 1) {
                continue;
            }
            std::complex<double> w =
                z * std::polar(1.0, -tau * static_cast<double>(k) / static_cast<double>(m));
            auto re = rationalize(w.real(), 1e-7 * mag);
            auto im = rationalize(w.imag(), 1e-7 * mag);
            if (!re || !im) continue;
            GaussianRational scale(*re, *im);
            if (scale.is_zero()) continue;
            RootOfUnityScalar cand = RootOfUnityScalar::make(scale, k, m);
            if (std::abs(cand.to_complex() - z) > 1e-6 * mag) continue;
            if (!up_eval(p, cand.value()).is_zero()) continue;
            return cand;
        }
    }
    return std::nullopt;
}

/// Render the unexplained factor after exact synthetic division by the
/// recognized roots (coefficients live in the cyclotomic field).
std::string leftover_factor_string(const UPoly& p,
                                   const std::vector<std::pair<RootOfUnityScalar, long>>& roots) {
    std::vector<CoefField> cur;
    cur.reserve(p.size());
    for (auto& c : p) cur.push_back(CoefField::from_gaussian(c));
    for (auto& [lambda, mult] : roots) {
        CoefField lv = lambda.value();
        for (long t = 0; t < mult; ++t) {
            // synthetic division by (x - lambda)
            std::vector<CoefField> next(cur.size() - 1);
            CoefField carry;
            for (std::size_t j = cur.size(); j-- > 1;) {
                carry = cur[j] + carry * lv;
                next[j - 1] = carry;
            }
            // remainder cur[0] + carry*lv must vanish; roots were verified
            cur = std::move(next);
        }
    }
    std::string out;
    for (std::size_t j = cur.size(); j-- > 0;) {
        if (cur[j].is_zero()) continue;
        std::string piece;
        std::string c = "(" + cur[j].to_string() + ")";
        if (j == 0) piece = c;
        else {
            piece = c + "*";
            piece += j == 1 ? "x" : "x^" + std::to_string(j);
        }
        out += out.empty() ? piece : " + " + piece;
    }
    return out.empty() ? "0" : out;
}

}  // namespace

std::vector<SequenceClosedForm> solve_recurrence(const RecurrenceConstraint& rc) {
    UPoly p = rc.coefficients;
    up_trim(p);
    std::size_t r = p.size() - 1;

    if (p[0].is_zero()) {
        std::size_t t = 0;
        while (t < p.size() && p[t].is_zero()) ++t;
        throw NonCyclotomicRootError(
            "characteristic root 0 is not a scaled root of unity",
            t == 1 ? "x" : "x^" + std::to_string(t));
    }

    // Distinct roots live in the squarefree part p / gcd(p, p').
    UPoly sf = up_divmod(p, up_gcd(p, up_deriv(p))).first;
    std::vector<std::complex<double>> sfc;
    sfc.reserve(sf.size());
    for (auto& c : sf) sfc.push_back(c.to_complex());
    std::vector<std::complex<double>> roots = numeric_roots(sfc);

    // Precompute derivatives for exact multiplicity tests.
    std::vector<UPoly> derivs{p};
    for (std::size_t j = 0; j < r; ++j) derivs.push_back(up_deriv(derivs.back()));

    std::vector<std::pair<RootOfUnityScalar, long>> found;
    std::size_t covered = 0;
    bool all_recognized = true;
    for (auto& z : roots) {
        auto cand = recognize_root(z, p);
        if (!cand) {
            all_recognized = false;
            continue;
        }
        bool duplicate = false;
        for (auto& [known, mult] : found) duplicate = duplicate || known == *cand;
        if (duplicate) continue;
        CoefField lv = cand->value();
        long mult = 0;
        while (mult < static_cast<long>(r) && up_eval(derivs[mult], lv).is_zero()) ++mult;
        if (mult == 0) continue;  // not actually a root (cannot happen after the gate)
        found.emplace_back(*cand, mult);
        covered += static_cast<std::size_t>(mult);
    }

    if (!all_recognized || covered != r) {
        throw NonCyclotomicRootError(
            "a characteristic root is not expressible as a scaled root of unity",
            leftover_factor_string(p, found));
    }

    // Deterministic order.
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });

    std::vector<SequenceClosedForm> basis;
    for (auto& [lambda, mult] : found)
        for (long s = 0; s < mult; ++s)
            basis.push_back(SequenceClosedForm::term(CoefField::integer(1), lambda, s));

    // Internal exactness check: every basis element satisfies the recurrence
    // at n = 0..4r.
    for (auto& b : basis) {
        for (long n = 0; n <= static_cast<long>(4 * r); ++n) {
            CoefField acc;
            for (std::size_t j = 0; j < rc.coefficients.size(); ++j)
                acc += CoefField::from_gaussian(rc.coefficients[j]) *
                       b.eval_exact(n + static_cast<long>(j));
            if (!acc.is_zero())
                throw Error("internal: recurrence basis failed its own equation");
        }
    }
    return basis;
}

bool seq_equal_span(const std::vector<SequenceClosedForm>& a,
                    const std::vector<SequenceClosedForm>& b) {
    for (auto& s : a)
        if (!s.is_exact()) throw ValidationError("seq_equal_span: inexact coefficient");
    for (auto& s : b)
        if (!s.is_exact()) throw ValidationError("seq_equal_span: inexact coefficient");

    // Enough sample points that evaluation is injective on the joint span: a
    // nonzero closed form with T distinct (lambda, deg) pairs solves an
    // order-T recurrence with nonzero trailing coefficient, so it cannot
    // vanish at T consecutive integers.
    std::vector<std::pair<RootOfUnityScalar, long>> keys;
    auto collect = [&](const std::vector<SequenceClosedForm>& list) {
        for (auto& s : list)
            for (auto& t : s.terms()) {
                std::pair<RootOfUnityScalar, long> key{t.lambda, t.deg};
                bool seen = false;
                for (auto& k : keys) seen = seen || (k.first == key.first && k.second == key.second);
                if (!seen) keys.push_back(key);
            }
    };
    collect(a);
    collect(b);
    std::size_t points = std::max(a.size() + b.size() + 1, keys.size());

    auto rows_of = [&](const std::vector<SequenceClosedForm>& list) {
        std::vector<std::vector<CoefField>> rows;
        for (auto& s : list) {
            std::vector<CoefField> row;
            row.reserve(points);
            for (std::size_t n = 0; n < points; ++n) row.push_back(s.eval_exact(static_cast<long>(n)));
            rows.push_back(std::move(row));
        }
        return rows;
    };

    auto rows_a = rows_of(a);
    auto rows_b = rows_of(b);
    std::size_t rank_a = matrix_rank(rows_a);
    std::size_t rank_b = matrix_rank(rows_b);
    if (rank_a != rank_b) return false;

    std::vector<std::vector<CoefField>> joint = rows_a;
    joint.insert(joint.end(), rows_b.begin(), rows_b.end());
    return matrix_rank(std::move(joint)) == rank_a;
}

}  // namespace dpsym
