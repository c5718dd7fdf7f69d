#include "dpsym/poly.hpp"

namespace dpsym {

namespace {

using detail::assemble;
using detail::udeg;
using detail::univ;

VarId highest_var(const Poly& a, const Poly& b) {
    VarId best = 0;
    bool found = false;
    for (const Poly* p : {&a, &b})
        for (VarId v : p->vars())
            if (!found || v > best) best = v, found = true;
    if (!found) throw std::domain_error("highest_var: both constant");
    return best;
}

/// Pseudo-remainder of a by b w.r.t. main variable x (b != 0 in x).
Poly prem(const Poly& a, const Poly& b, VarId x) {
    std::vector<Poly> ra = univ(a, x), rb = univ(b, x);
    int db = udeg(rb);
    if (db < 0) throw std::domain_error("prem: zero divisor");
    Poly lb = rb[db];
    int da = udeg(ra);
    while (da >= db) {
        Poly la = ra[da];
        // ra = lb*ra - la*x^(da-db)*rb  (kills the degree-da term)
        for (int e = 0; e <= da; ++e) ra[e] = ra[e] * lb;
        for (int e = 0; e <= db; ++e) ra[e + da - db] -= la * rb[e];
        int nd = -1;
        for (int e = da; e >= 0; --e)
            if (!ra[e].is_zero()) { nd = e; break; }
        da = nd;
        if (da >= 0) ra.resize(da + 1);
        else ra.clear();
    }
    return assemble(ra, x);
}

/// Trim trailing zeros of a dense univariate coefficient vector.
void uni_trim(std::vector<GaussianRational>& v) {
    while (!v.empty() && v.back().is_zero()) v.pop_back();
}

/// Monic Euclid on dense univariate polynomials over Q(i).  Keeping every
/// remainder monic avoids the coefficient explosion of pseudo-division.
/// Returns the monic gcd ({} iff both inputs are zero).
std::vector<GaussianRational> uni_gcd(std::vector<GaussianRational> a,
                                      std::vector<GaussianRational> b) {
    uni_trim(a);
    uni_trim(b);
    while (!b.empty()) {
        GaussianRational lb = b.back().inverse();
        for (auto& c : b) c = c * lb;
        while (true) {
            uni_trim(a);
            if (a.size() < b.size()) break;
            GaussianRational q = a.back();
            std::size_t off = a.size() - b.size();
            for (std::size_t j = 0; j + 1 < b.size(); ++j) a[off + j] -= q * b[j];
            a.pop_back();
        }
        std::swap(a, b);
    }
    if (!a.empty()) {
        GaussianRational la = a.back().inverse();
        for (auto& c : a) c = c * la;
    }
    return a;
}

/// Dense coefficients of p when p is univariate in x; nullopt otherwise.
std::optional<std::vector<GaussianRational>> dense_univariate(const Poly& p, VarId x) {
    std::vector<GaussianRational> out;
    for (const auto& [m, c] : p.terms()) {
        int e = 0;
        for (const auto& [v, k] : m.exps) {
            if (v != x) return std::nullopt;
            e = k;
        }
        if (static_cast<int>(out.size()) <= e) out.resize(e + 1);
        out[e] += c;
    }
    uni_trim(out);
    return out;
}

/// Evaluate every variable of p except x at vals, producing dense univariate
/// coefficients in x.
std::vector<GaussianRational> eval_to_univariate(const Poly& p, VarId x,
                                                 const std::map<VarId, GaussianRational>& vals) {
    std::vector<GaussianRational> out;
    for (const auto& [m, c] : p.terms()) {
        GaussianRational cc = c;
        int e = 0;
        for (const auto& [v, k] : m.exps) {
            if (v == x) {
                e = k;
                continue;
            }
            cc = cc * vals.at(v).pow(k);
        }
        if (static_cast<int>(out.size()) <= e) out.resize(e + 1);
        out[e] += cc;
    }
    uni_trim(out);
    return out;
}

/// Certificate that two polynomials, both primitive w.r.t. x, are coprime:
/// an evaluation of the other variables maps any common factor (necessarily
/// of positive x-degree) into the univariate image gcd, so a constant image
/// gcd at a point where either leading coefficient survives proves
/// coprimality.  Returns false when undecided (fall back to the PRS).
bool coprime_by_evaluation(const Poly& pa, const Poly& pb, VarId x) {
    std::set<VarId> others;
    for (const Poly* p : {&pa, &pb})
        for (VarId v : p->vars())
            if (v != x) others.insert(v);
    if (others.empty()) return false;  // univariate: handled exactly elsewhere

    int da = pa.degree_in(x), db = pb.degree_in(x);
    // Deterministic sample points; retried on degree-killing evaluations.
    static const long primes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};
    for (int attempt = 0; attempt < 3; ++attempt) {
        std::map<VarId, GaussianRational> vals;
        std::size_t idx = static_cast<std::size_t>(attempt);
        for (VarId v : others) {
            vals.emplace(v, GaussianRational(primes[idx % std::size(primes)]));
            idx += 1 + static_cast<std::size_t>(attempt);
        }
        auto ia = eval_to_univariate(pa, x, vals);
        auto ib = eval_to_univariate(pb, x, vals);
        bool lead_alive = (static_cast<int>(ia.size()) - 1 == da) ||
                          (static_cast<int>(ib.size()) - 1 == db);
        if (!lead_alive) continue;
        if (ia.empty() || ib.empty()) continue;
        if (uni_gcd(ia, ib).size() == 1) return true;
        return false;  // nonconstant image gcd: a common factor is plausible
    }
    return false;
}

/// Content of p w.r.t. x: gcd of its Poly coefficients.
Poly content_in(const Poly& p, VarId x) {
    Poly g;
    for (const Poly& c : univ(p, x)) {
        if (c.is_zero()) continue;
        g = g.is_zero() ? c : poly_gcd(g, c);
        if (g.is_constant()) break;
    }
    if (g.is_zero()) return g;
    return g.scaled(g.leading().second.inverse());  // monic
}

}  // namespace

Poly poly_divexact(const Poly& p, const Poly& q) {
    if (q.is_zero()) throw std::domain_error("poly_divexact: division by zero");
    if (p.is_zero()) return Poly();
    if (q.is_constant()) return p.scaled(q.constant_value().inverse());

    VarId x = *q.vars().rbegin();
    std::vector<Poly> rp = univ(p, x), rq = univ(q, x);
    int dq = udeg(rq);
    const Poly& lq = rq[dq];
    std::vector<Poly> quot;
    int dp = udeg(rp);
    if (dp < dq) throw std::domain_error("poly_divexact: not divisible");
    quot.assign(dp - dq + 1, Poly());
    while (dp >= dq) {
        Poly c = poly_divexact(rp[dp], lq);  // recursive in fewer variables
        quot[dp - dq] = c;
        for (int e = 0; e <= dq; ++e) rp[e + dp - dq] -= c * rq[e];
        if (!rp[dp].is_zero()) throw std::domain_error("poly_divexact: not divisible");
        int nd = -1;
        for (int e = dp - 1; e >= 0; --e)
            if (!rp[e].is_zero()) { nd = e; break; }
        dp = nd;
    }
    for (const Poly& r : rp)
        if (!r.is_zero()) throw std::domain_error("poly_divexact: not divisible");
    return assemble(quot, x);
}

Poly poly_gcd(const Poly& a, const Poly& b) {
    if (a.is_zero() && b.is_zero()) return Poly();
    if (a.is_zero()) return b.scaled(b.leading().second.inverse());
    if (b.is_zero()) return a.scaled(a.leading().second.inverse());
    if (a.is_constant() || b.is_constant()) return Poly(GaussianRational(1));

    VarId x = highest_var(a, b);
    if (!a.depends_on(x) || !b.depends_on(x)) {
        // x occurs in only one argument: gcd divides the other's content.
        const Poly& with = a.depends_on(x) ? a : b;
        const Poly& without = a.depends_on(x) ? b : a;
        Poly c = content_in(with, x);
        return c.is_zero() ? Poly(GaussianRational(1)) : poly_gcd(c, without);
    }

    Poly ca = content_in(a, x), cb = content_in(b, x);
    Poly pa = poly_divexact(a, ca), pb = poly_divexact(b, cb);
    Poly cg = poly_gcd(ca, cb);

    // Univariate inputs: dense monic Euclid, exact and explosion-free.
    if (auto da = dense_univariate(pa, x)) {
        if (auto db = dense_univariate(pb, x)) {
            std::vector<GaussianRational> u = uni_gcd(*da, *db);
            Poly gp;
            for (std::size_t e = 0; e < u.size(); ++e) {
                if (u[e].is_zero()) continue;
                gp.add_term(e ? Monomial::var(x, static_cast<int>(e)) : Monomial{}, u[e]);
            }
            Poly g = cg * gp;
            return g.scaled(g.leading().second.inverse());
        }
    }

    // Multivariate: certify the common case (coprime primitive parts)
    // cheaply before falling back to the pseudo-remainder sequence.
    if (coprime_by_evaluation(pa, pb, x)) return cg.scaled(cg.leading().second.inverse());

    // Primitive PRS on the primitive parts.
    Poly r0 = pa, r1 = pb;
    if (r0.degree_in(x) < r1.degree_in(x)) std::swap(r0, r1);
    while (!r1.is_zero()) {
        Poly r = prem(r0, r1, x);
        r0 = std::move(r1);
        if (r.is_zero()) {
            r1 = Poly();
        } else {
            Poly c = content_in(r, x);
            r1 = poly_divexact(r, c);
            // Rescaling by the leading coefficient (a unit) keeps the
            // rational magnitudes from compounding across prem steps.
            r1 = r1.scaled(r1.leading().second.inverse());
        }
    }
    Poly g = cg * r0;
    return g.scaled(g.leading().second.inverse());
}

std::string poly_to_string(const Poly& p) {
    if (p.is_zero()) return "0";
    std::string out;
    for (auto& [m, c] : p.terms()) {
        std::string mono;
        for (auto& [v, e] : m.exps) {
            if (!mono.empty()) mono += "*";
            mono += Symbols::name(v);
            if (e > 1) mono += "^" + std::to_string(e);
        }
        std::string coef;
        bool coef_needed = mono.empty() || !(c.is_one() || (-c).is_one());
        if (coef_needed) {
            coef = c.to_string();
            bool composite = !c.im.is_zero() && !c.re.is_zero();
            if (composite) coef = "(" + coef + ")";
        } else if ((-c).is_one()) {
            coef = "-";
        }
        std::string term = coef;
        if (!mono.empty()) {
            if (!term.empty() && term != "-") term += "*";
            term += mono;
        }
        if (out.empty()) {
            out = term;
        } else if (!term.empty() && term[0] == '-') {
            out += " - " + term.substr(1);
        } else {
            out += " + " + term;
        }
    }
    return out;
}

}  // namespace dpsym
