#include "dpsym/cyclotomic.hpp"

#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace dpsym {

namespace {

using QPoly = std::vector<Rational>;  // univariate over Q, index = degree
using FPoly = std::vector<RatFunc>;   // univariate over the parameter field

void qp_trim(QPoly& p) {
    while (!p.empty() && p.back() == 0) p.pop_back();
}

/// Exact division of a by monic b (remainder must come out zero).
QPoly qp_divexact_monic(QPoly a, const QPoly& b) {
    qp_trim(a);
    if (a.empty()) return {};
    if (a.size() < b.size()) throw std::domain_error("cyclotomic division left a remainder");
    QPoly q(a.size() - b.size() + 1);
    for (std::size_t k = q.size(); k-- > 0;) {
        Rational c = a[k + b.size() - 1];
        q[k] = c;
        if (c != 0)
            for (std::size_t j = 0; j < b.size(); ++j) a[k + j] -= c * b[j];
    }
    qp_trim(a);
    if (!a.empty()) throw std::domain_error("cyclotomic division left a remainder");
    return q;
}

void fp_trim(FPoly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

FPoly fp_mul(const FPoly& a, const FPoly& b) {
    if (a.empty() || b.empty()) return {};
    FPoly out(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].is_zero()) continue;
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    }
    fp_trim(out);
    return out;
}

/// Division with remainder over the coefficient field; b must be nonzero.
std::pair<FPoly, FPoly> fp_divmod(FPoly a, const FPoly& b) {
    fp_trim(a);
    if (b.empty()) throw std::domain_error("fp_divmod: zero divisor");
    RatFunc lead = b.back();
    if (a.size() < b.size()) return {FPoly{}, std::move(a)};
    FPoly q(a.size() - b.size() + 1);
    while (a.size() >= b.size()) {
        RatFunc c = a.back() / lead;
        std::size_t k = a.size() - b.size();
        q[k] = c;
        if (!c.is_zero())
            for (std::size_t j = 0; j < b.size(); ++j) a[k + j] -= c * b[j];
        a.pop_back();
        fp_trim(a);
        if (a.size() < b.size()) break;
    }
    fp_trim(q);
    return {std::move(q), std::move(a)};
}

std::mutex cache_mutex;
std::map<long, QPoly> phi_cache;

QPoly cyclotomic_locked(long m) {
    auto it = phi_cache.find(m);
    if (it != phi_cache.end()) return it->second;
    QPoly result;
    if (m == 1) {
        result = {Rational(-1), Rational(1)};
    } else {
        QPoly xm1(static_cast<std::size_t>(m) + 1);
        xm1[0] = -1;
        xm1[static_cast<std::size_t>(m)] = 1;
        for (long d = 1; d < m; ++d)
            if (m % d == 0) xm1 = qp_divexact_monic(std::move(xm1), cyclotomic_locked(d));
        result = std::move(xm1);
    }
    phi_cache.emplace(m, result);
    return result;
}

/// Coordinates of x^e mod Phi_m over Q (length phi(m)).
QPoly power_mod_phi(long e, long m, const QPoly& phi) {
    std::size_t deg = phi.size() - 1;  // = euler_phi(m)
    // zeta^m = 1, so reduce the exponent first.
    e %= m;
    if (e < 0) e += m;
    QPoly acc{Rational(1)};
    for (long step = 0; step < e; ++step) {
        acc.insert(acc.begin(), Rational(0));  // multiply by x
        if (acc.size() == deg + 1) {
            Rational c = acc.back();
            acc.pop_back();
            if (c != 0)
                for (std::size_t j = 0; j < deg; ++j) acc[j] -= c * phi[j];
        }
        qp_trim(acc);
    }
    acc.resize(deg);
    return acc;
}

}  // namespace

std::vector<Rational> cyclotomic_poly(long m) {
    if (m < 1) throw std::invalid_argument("cyclotomic_poly: order must be positive");
    std::lock_guard<std::mutex> lock(cache_mutex);
    return cyclotomic_locked(m);
}

long euler_phi(long m) {
    long result = m;
    for (long p = 2; p * p <= m; ++p) {
        if (m % p == 0) {
            while (m % p == 0) m /= p;
            result -= result / p;
        }
    }
    if (m > 1) result -= result / m;
    return result;
}

long CoefField::check_order(long m) {
    if (m < 1 || m > 4096) throw std::invalid_argument("CoefField: unsupported root order");
    return m;
}

std::size_t CoefField::basis_size(long m) { return static_cast<std::size_t>(euler_phi(m)); }

CoefField CoefField::from_rational(const Rational& r) {
    CoefField out(1);
    out.coords_[0] = RatFunc(GaussianRational(r));
    return out;
}

CoefField CoefField::from_gaussian(const GaussianRational& g) {
    if (g.im.is_zero()) return from_rational(g.re);
    CoefField out(4);  // basis 1, zeta_4 = i
    out.coords_[0] = RatFunc(GaussianRational(g.re));
    out.coords_[1] = RatFunc(GaussianRational(g.im));
    return out;
}

CoefField CoefField::from_ratfunc(const RatFunc& f) {
    // Make the denominator real-coefficient by multiplying through with its
    // coefficient-wise conjugate, then split the numerator.
    auto conj_poly = [](const Poly& p) {
        Poly out;
        for (auto& [mono, c] : p.terms()) out.add_term(mono, c.conj());
        return out;
    };
    Poly cden = conj_poly(f.den());
    Poly realden = f.den() * cden;
    Poly realnum = f.num() * cden;
    Poly re_part, im_part;
    for (auto& [mono, c] : realnum.terms()) {
        if (!c.re.is_zero()) re_part.add_term(mono, GaussianRational(c.re));
        if (!c.im.is_zero()) im_part.add_term(mono, GaussianRational(c.im));
    }
    if (im_part.is_zero()) {
        CoefField out(1);
        out.coords_[0] = RatFunc(re_part, realden);
        return out;
    }
    CoefField out(4);
    out.coords_[0] = RatFunc(re_part, realden);
    out.coords_[1] = RatFunc(im_part, realden);
    return out;
}

CoefField CoefField::root_of_unity(long k, long m) {
    if (m < 1) throw std::invalid_argument("root_of_unity: order must be positive");
    CoefField out(m);
    QPoly phi = cyclotomic_poly(m);
    QPoly coords = power_mod_phi(k, m, phi);
    for (std::size_t j = 0; j < coords.size(); ++j)
        out.coords_[j] = RatFunc(GaussianRational(coords[j]));
    return out;
}

bool CoefField::is_zero() const {
    for (auto& c : coords_)
        if (!c.is_zero()) return false;
    return true;
}

bool CoefField::depends_on_params() const {
    for (auto& c : coords_)
        if (!c.is_constant()) return true;
    return false;
}

CoefField CoefField::rebased(long target) const {
    if (target == m_) return *this;
    if (target % m_ != 0) throw std::invalid_argument("CoefField::rebased: order must divide target");
    CoefField out(target);
    long t = target / m_;
    QPoly phi = cyclotomic_poly(target);
    for (std::size_t j = 0; j < coords_.size(); ++j) {
        if (coords_[j].is_zero()) continue;
        QPoly pw = power_mod_phi(static_cast<long>(j) * t, target, phi);
        for (std::size_t k = 0; k < pw.size(); ++k) {
            if (pw[k] == 0) continue;
            out.coords_[k] += coords_[j] * RatFunc(GaussianRational(pw[k]));
        }
    }
    return out;
}

CoefField CoefField::operator-() const {
    CoefField out = *this;
    for (auto& c : out.coords_) c = -c;
    return out;
}

CoefField operator+(const CoefField& x, const CoefField& y) {
    long target = std::lcm(x.m_, y.m_);
    if (x.m_ != target) return x.rebased(target) + y;
    if (y.m_ != target) return x + y.rebased(target);
    CoefField out = x;
    for (std::size_t j = 0; j < out.coords_.size(); ++j) out.coords_[j] += y.coords_[j];
    return out;
}

CoefField operator-(const CoefField& x, const CoefField& y) { return x + (-y); }

CoefField operator*(const CoefField& x, const CoefField& y) {
    long target = std::lcm(x.m_, y.m_);
    if (x.m_ != target) return x.rebased(target) * y;
    if (y.m_ != target) return x * y.rebased(target);
    FPoly a(x.coords_.begin(), x.coords_.end());
    FPoly b(y.coords_.begin(), y.coords_.end());
    fp_trim(a);
    fp_trim(b);
    FPoly prod = fp_mul(a, b);
    QPoly phi = cyclotomic_poly(target);
    FPoly fphi(phi.size());
    for (std::size_t j = 0; j < phi.size(); ++j) fphi[j] = RatFunc(GaussianRational(phi[j]));
    FPoly rem = fp_divmod(std::move(prod), fphi).second;
    CoefField out(target);
    for (std::size_t j = 0; j < rem.size(); ++j) out.coords_[j] = rem[j];
    return out;
}

CoefField CoefField::inverse() const {
    if (is_zero()) throw std::domain_error("CoefField: inverse of zero");
    QPoly phi = cyclotomic_poly(m_);
    FPoly fphi(phi.size());
    for (std::size_t j = 0; j < phi.size(); ++j) fphi[j] = RatFunc(GaussianRational(phi[j]));
    FPoly a(coords_.begin(), coords_.end());
    fp_trim(a);

    // Extended Euclid tracking the coefficient of `a` only: r = s*a mod phi.
    FPoly r0 = fphi, r1 = a;
    FPoly s0, s1{RatFunc(1)};
    while (!r1.empty()) {
        auto [q, r2] = fp_divmod(r0, r1);
        FPoly s2 = s0;
        FPoly qs1 = fp_mul(q, s1);
        s2.resize(std::max(s2.size(), qs1.size()));
        for (std::size_t j = 0; j < qs1.size(); ++j) s2[j] -= qs1[j];
        fp_trim(s2);
        r0 = std::move(r1);
        r1 = std::move(r2);
        s0 = std::move(s1);
        s1 = std::move(s2);
    }
    // Phi_m is irreducible over Q(params), so the gcd is a nonzero constant.
    if (r0.size() != 1)
        throw std::domain_error("CoefField: inverse hit a non-constant gcd");
    RatFunc g_inv = r0[0].inverse();
    FPoly inv = s0;
    for (auto& c : inv) c *= g_inv;
    FPoly rem = fp_divmod(std::move(inv), fphi).second;
    CoefField out(m_);
    for (std::size_t j = 0; j < rem.size(); ++j) out.coords_[j] = rem[j];
    return out;
}

CoefField operator/(const CoefField& x, const CoefField& y) {
    long target = std::lcm(x.m_, y.m_);
    return x.rebased(target) * y.rebased(target).inverse();
}

CoefField CoefField::pow(long e) const {
    if (e < 0) return inverse().pow(-e);
    CoefField acc = CoefField::integer(1);
    CoefField base = *this;
    while (e > 0) {
        if (e & 1) acc *= base;
        base *= base;
        e >>= 1;
    }
    return acc;
}

bool CoefField::is_gaussian() const {
    for (auto& c : coords_)
        if (!c.is_constant()) return false;
    if (m_ % 4 != 0) {
        for (std::size_t j = 1; j < coords_.size(); ++j)
            if (!coords_[j].is_zero()) return false;
        return true;
    }
    // Solve x = r + s*zeta^(m/4) on the coordinates.
    QPoly phi = cyclotomic_poly(m_);
    QPoly v = power_mod_phi(m_ / 4, m_, phi);
    v.resize(coords_.size());
    Rational s;
    bool have_s = false;
    for (std::size_t j = 1; j < coords_.size(); ++j) {
        Rational xj = coords_[j].constant_value().re;
        if (v[j] == 0) {
            if (xj != 0) return false;
        } else if (!have_s) {
            s = xj / v[j];
            have_s = true;
        } else if (xj != s * v[j]) {
            return false;
        }
    }
    return true;
}

GaussianRational CoefField::to_gaussian() const {
    for (auto& c : coords_)
        if (!c.is_constant())
            throw std::domain_error("CoefField: not a Q(i) constant (parameters present)");
    if (m_ % 4 != 0) {
        for (std::size_t j = 1; j < coords_.size(); ++j)
            if (!coords_[j].is_zero())
                throw std::domain_error("CoefField: not a Q(i) constant");
        return GaussianRational(coords_[0].constant_value().re);
    }
    QPoly phi = cyclotomic_poly(m_);
    QPoly v = power_mod_phi(m_ / 4, m_, phi);
    v.resize(coords_.size());
    Rational s;
    bool have_s = false;
    for (std::size_t j = 1; j < coords_.size(); ++j) {
        Rational xj = coords_[j].constant_value().re;
        if (v[j] == 0) {
            if (xj != 0) throw std::domain_error("CoefField: not a Q(i) constant");
        } else if (!have_s) {
            s = xj / v[j];
            have_s = true;
        } else if (xj != s * v[j]) {
            throw std::domain_error("CoefField: not a Q(i) constant");
        }
    }
    Rational r = coords_[0].constant_value().re - s * v[0];
    return GaussianRational(r, s);
}

std::complex<double> CoefField::eval_complex(
    const std::function<std::complex<double>(VarId)>& value_of) const {
    std::complex<double> acc(0.0, 0.0);
    const double tau = 6.283185307179586476925286766559;
    for (std::size_t j = 0; j < coords_.size(); ++j) {
        if (coords_[j].is_zero()) continue;
        std::complex<double> c = coords_[j].eval<std::complex<double>>(value_of);
        double angle = tau * static_cast<double>(j) / static_cast<double>(m_);
        acc += c * std::polar(1.0, angle);
    }
    return acc;
}

std::complex<double> CoefField::eval_complex() const {
    if (depends_on_params())
        throw EvalError("CoefField: free parameters present; bindings required");
    return eval_complex([](VarId v) -> std::complex<double> {
        throw EvalError("CoefField: unbound symbol '" + Symbols::name(v) + "'");
    });
}

std::string CoefField::to_string() const {
    if (is_zero()) return "0";
    std::ostringstream out;
    bool first = true;
    for (std::size_t j = 0; j < coords_.size(); ++j) {
        if (coords_[j].is_zero()) continue;
        if (!first) out << " + ";
        first = false;
        out << "(" << coords_[j].to_string() << ")";
        if (j > 0) out << "*zeta(" << m_ << ")^" << j;
    }
    return out.str();
}

}  // namespace dpsym
