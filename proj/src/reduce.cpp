#include "dpsym/reduce.hpp"

#include <json.hpp>

#include <algorithm>
#include <climits>
#include <cmath>
#include <complex>
#include <map>
#include <sstream>
#include <utility>

namespace dpsym {

using ordered_json = nlohmann::ordered_json;

namespace {

CoefField param_field(const char* name) {
    return CoefField::from_ratfunc(RatFunc::variable(Symbols::intern(name)));
}

/// Recognize a parameter-free constant as scale * zeta_m^k with scale in Q(i).
std::optional<RootOfUnityScalar> as_rou_scalar(const CoefField& c) {
    if (c.is_zero() || c.depends_on_params()) return std::nullopt;
    if (c.is_gaussian()) return RootOfUnityScalar::from_gaussian(c.to_gaussian());
    long m = c.order();
    for (long k = 1; k < m; ++k) {
        CoefField g = c * CoefField::root_of_unity((m - k) % m, m);
        if (g.is_gaussian()) return RootOfUnityScalar::make(g.to_gaussian(), k, m);
    }
    return std::nullopt;
}

long ceil_div(long a, long b) {  // b > 0
    return a >= 0 ? (a + b - 1) / b : -((-a) / b);
}

SequenceClosedForm seq_const_field(const CoefField& c) {
    if (c.is_zero()) return SequenceClosedForm::zero();
    return SequenceClosedForm::term(SeqCoeff(c), RootOfUnityScalar::one(), 0);
}

/// The single CoefField a constant closed form carries, if it is one.
std::optional<CoefField> constant_of(const SequenceClosedForm& f) {
    if (f.is_zero()) return CoefField();
    const auto& ts = f.terms();
    if (ts.size() != 1 || ts[0].deg != 0 || !ts[0].lambda.is_one()) return std::nullopt;
    if (!std::holds_alternative<CoefField>(ts[0].c)) return std::nullopt;
    return std::get<CoefField>(ts[0].c);
}

/// One exact forward step of a second-order equation: the value of u at
/// index n0+2 from u(n0) = a, u(n0+1) = b.  Free parameters stay symbolic.
CoefField equation_step(const DifferenceEquation& eq, long n0, const CoefField& a,
                        const CoefField& b) {
    return eq.omega.eval<CoefField>([&](VarId w) -> CoefField {
        if (w == Symbols::u(0)) return a;
        if (w == Symbols::u(1)) return b;
        if (w == Symbols::n()) return CoefField::integer(n0);
        return CoefField::from_ratfunc(RatFunc::variable(w));
    });
}

std::vector<CoefField> iterate_equation(const DifferenceEquation& eq, const CoefField& x0,
                                        const CoefField& x1, long n_max) {
    std::vector<CoefField> out{x0, x1};
    out.reserve(static_cast<std::size_t>(n_max) + 1);
    for (long n = 2; n <= n_max; ++n) out.push_back(equation_step(eq, n - 2, out[n - 2], out[n - 1]));
    return out;
}

struct Mat2 {
    GaussianRational a, b, c, d;
    friend Mat2 operator*(const Mat2& x, const Mat2& y) {
        return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d, x.c * y.a + x.d * y.c,
                x.c * y.b + x.d * y.d};
    }
    bool is_scalar() const { return b.is_zero() && c.is_zero() && a == d; }
};

/// Classify v(n+1) = g(n, v) given as a rational function with Gaussian
/// coefficients.  Moebius/linear require the v-coefficients to be constants.
ReducedMap classify_ratfunc(const RatFunc& g, VarId vv, std::string note) {
    ReducedMap out;
    out.rhs = g;
    out.vvar = vv;
    out.domain_notes = std::move(note);
    int dn = g.num().degree_in(vv), dd = g.den().degree_in(vv);
    if (dn <= 1 && dd <= 1) {
        auto coeff = [&](const Poly& p, int i) -> std::optional<GaussianRational> {
            std::vector<Poly> c = p.coeffs_in(vv);
            if (i >= static_cast<int>(c.size())) return GaussianRational(0);
            if (!c[i].is_constant()) return std::nullopt;
            return c[i].constant_value();
        };
        auto A = coeff(g.num(), 1), B = coeff(g.num(), 0);
        auto C = coeff(g.den(), 1), D = coeff(g.den(), 0);
        if (A && B && C && D) {
            if (C->is_zero()) {
                out.cls = ReducedMap::Class::Linear;
                out.r = SequenceClosedForm::constant(*A / *D);
                out.s = SequenceClosedForm::constant(*B / *D);
            } else if ((*A * *D - *B * *C).is_zero()) {
                // rank-one matrix: the map is the constant A/C
                out.cls = ReducedMap::Class::Linear;
                out.r = SequenceClosedForm::zero();
                out.s = SequenceClosedForm::constant(*A / *C);
            } else {
                out.cls = ReducedMap::Class::Moebius;
                out.matrix = {*A, *B, *C, *D};
            }
            return out;
        }
    }
    out.cls = ReducedMap::Class::General;
    return out;
}

ReducedMap reduce_ratio(const DifferenceEquation& eq) {
    VarId vv = Symbols::intern("v");
    RatFunc v = RatFunc::variable(vv);
    RatFunc u0 = RatFunc::variable(Symbols::u(0));
    RatFunc g;
    try {
        g = eq.omega.substitute({{Symbols::u(1), v * u0}}) / (v * u0);
    } catch (const SingularSubstitutionError&) {
        throw NotClosedError("the substitution u(1) = v*u(0) makes the equation singular");
    }
    if (g.depends_on(Symbols::u(0)))
        throw NotClosedError(
            "u(0) does not cancel from v(n+1) = omega / (v*u(0)); "
            "the ratio invariant does not close this equation");
    return classify_ratfunc(g, vv, "reduced through v(n) = u(n+1)/u(n)");
}

ReducedMap reduce_translation(const DifferenceEquation& eq, const RootOfUnityScalar& rho) {
    VarId vv = Symbols::intern("v");
    CoefField rhoF = rho.value();

    if (rhoF.is_gaussian()) {
        // rho lies in Q(i): eliminate directly over rational functions.
        RatFunc v = RatFunc::variable(vv);
        RatFunc u0 = RatFunc::variable(Symbols::u(0));
        RatFunc rr(rhoF.to_gaussian());
        RatFunc u1 = v + rr * u0;
        RatFunc g;
        try {
            g = eq.omega.substitute({{Symbols::u(1), u1}}) - rr * u1;
        } catch (const SingularSubstitutionError&) {
            throw NotClosedError("the substitution u(1) = v + rho*u(0) makes the equation singular");
        }
        if (g.depends_on(Symbols::u(0)))
            throw NotClosedError(
                "u(0) does not cancel from v(n+1) = omega - rho*u(1); "
                "the translation invariant does not close this equation");
        return classify_ratfunc(g, vv,
                                "reduced through v(n) = u(n+1) - (" + rho.to_string() + ")*u(n)");
    }

    // Cyclotomic rho: eliminate inside the coefficient field, where the
    // cancellation (e.g. 1 + rho + rho^2 = 0) is visible.
    CoefField vF = CoefField::from_ratfunc(RatFunc::variable(vv));
    CoefField u0F = CoefField::from_ratfunc(RatFunc::variable(Symbols::u(0)));
    auto eliminated = [&](const CoefField& vval) {
        CoefField u1F = vval + rhoF * u0F;
        CoefField om = eq.omega.eval<CoefField>([&](VarId w) -> CoefField {
            if (w == Symbols::u(0)) return u0F;
            if (w == Symbols::u(1)) return u1F;
            return CoefField::from_ratfunc(RatFunc::variable(w));
        });
        return om - rhoF * u1F;
    };
    CoefField g = eliminated(vF);
    for (const RatFunc& c : g.coords())
        if (c.depends_on(Symbols::u(0)))
            throw NotClosedError(
                "u(0) does not cancel from v(n+1) = omega - rho*u(1); "
                "the translation invariant does not close this equation");
    CoefField s, r;
    try {
        s = eliminated(CoefField());
        r = eliminated(CoefField::integer(1)) - s;
    } catch (const EvalError&) {
        throw UnsupportedFamilyError(
            "the translation-reduced map is not affine in v; only affine maps are "
            "representable over a cyclotomic translation ratio");
    }
    if (g != r * vF + s)
        throw UnsupportedFamilyError(
            "the translation-reduced map is not affine in v; only affine maps are "
            "representable over a cyclotomic translation ratio");
    auto constant_in_n = [&](const CoefField& x) {
        for (const RatFunc& c : x.coords())
            if (c.depends_on(Symbols::n()) || c.depends_on(vv)) return false;
        return true;
    };
    if (!constant_in_n(r) || !constant_in_n(s))
        throw UnsupportedFamilyError(
            "the translation-reduced coefficients vary with n; "
            "only constant coefficients are representable here");
    ReducedMap out;
    out.cls = ReducedMap::Class::Linear;
    out.vvar = vv;
    out.r = seq_const_field(r);
    out.s = seq_const_field(s);
    out.domain_notes = "reduced through v(n) = u(n+1) - (" + rho.to_string() + ")*u(n)";
    return out;
}

ClosedFormSolution lazy_linear(const ReducedMap& m, const CoefField& v0, std::string note) {
    if (!m.r.is_exact() || !m.s.is_exact())
        throw ValidationError("lazy iteration of a linear map needs exact coefficients");
    ClosedFormSolution sol;
    sol.rep = ClosedFormSolution::Rep::Lazy;
    sol.x0 = v0;
    SequenceClosedForm r = m.r, s = m.s;
    sol.step = [r, s](long k, const CoefField& x) { return r.eval_exact(k) * x + s.eval_exact(k); };
    sol.validity_notes = std::move(note);
    return sol;
}

ClosedFormSolution solve_linear(const ReducedMap& m, const CoefField& v0) {
    auto rc = constant_of(m.r), sc = constant_of(m.s);
    if (!rc || !sc)
        return lazy_linear(m, v0, "non-constant linear coefficients; exact lazy iteration");
    if (rc->is_zero())
        return lazy_linear(m, v0, "degenerate linear map (r = 0); exact lazy iteration");
    auto lr = as_rou_scalar(*rc);
    if (!lr)
        return lazy_linear(m, v0,
                           "warning: the coefficient " + rc->to_string() +
                               " is not a scaled root of unity; no closed form is emitted and "
                               "values come from exact lazy iteration");
    ClosedFormSolution sol;
    sol.rep = ClosedFormSolution::Rep::Exact;
    sol.x0 = v0;
    SequenceClosedForm form = SequenceClosedForm::term(SeqCoeff(v0), *lr, 0);
    if (!sc->is_zero()) {
        RootOfUnityScalar ls = RootOfUnityScalar::one();
        if (ls != *lr) {
            CoefField d = ls.value() - lr->value();
            form = form + SequenceClosedForm::term(SeqCoeff(*sc / d), ls, 0) +
                   SequenceClosedForm::term(SeqCoeff(-(*sc / d)), *lr, 0);
        } else {
            form = form + SequenceClosedForm::term(SeqCoeff(*sc / lr->value()), *lr, 1);
        }
    }
    if (form.eval_exact(0) != v0)
        throw Error("internal: linear closed form does not reproduce v(0)");
    for (long k = 0; k < 6; ++k)
        if (form.eval_exact(k + 1) != *rc * form.eval_exact(k) + *sc)
            throw Error("internal: linear closed form fails its defining recurrence");
    sol.form = form;
    sol.orbit_period = form.period();
    return sol;
}

ClosedFormSolution solve_moebius(const ReducedMap& m, const CoefField& v0) {
    const GaussianRational &A = m.matrix[0], &B = m.matrix[1], &C = m.matrix[2], &D = m.matrix[3];
    GaussianRational tau = A + D, delta = A * D - B * C;
    if (delta.is_zero()) throw ValidationError("Moebius reduction with a singular matrix");
    ClosedFormSolution sol;
    sol.x0 = v0;
    std::vector<SequenceClosedForm> basis;
    try {
        basis = solve_recurrence(RecurrenceConstraint({delta, -tau, GaussianRational(1)}));
    } catch (const NonCyclotomicRootError& e) {
        sol.rep = ClosedFormSolution::Rep::Lazy;
        sol.step = [A, B, C, D](long, const CoefField& x) {
            CoefField den = CoefField::from_gaussian(C) * x + CoefField::from_gaussian(D);
            if (den.is_zero()) throw EvalError("Moebius orbit hits a pole");
            return (CoefField::from_gaussian(A) * x + CoefField::from_gaussian(B)) / den;
        };
        sol.validity_notes = std::string("warning: matrix-power closed form unavailable (") +
                             e.what() + "); values come from exact lazy iteration";
        return sol;
    }
    CoefField b00 = basis[0].eval_exact(0), b01 = basis[0].eval_exact(1);
    CoefField b10 = basis[1].eval_exact(0), b11 = basis[1].eval_exact(1);
    CoefField det = b00 * b11 - b10 * b01;
    auto fit = [&](const GaussianRational& e0g, const GaussianRational& e1g) {
        CoefField e0 = CoefField::from_gaussian(e0g), e1 = CoefField::from_gaussian(e1g);
        CoefField c0 = (e0 * b11 - b10 * e1) / det;
        CoefField c1 = (b00 * e1 - e0 * b01) / det;
        return basis[0].scaled_exact(c0) + basis[1].scaled_exact(c1);
    };
    sol.power_entries = {fit(GaussianRational(1), A), fit(GaussianRational(0), B),
                         fit(GaussianRational(0), C), fit(GaussianRational(1), D)};
    Mat2 M{A, B, C, D};
    Mat2 P = M;
    for (long n = 2; n <= 3; ++n) {
        P = P * M;
        const GaussianRational* want[4] = {&P.a, &P.b, &P.c, &P.d};
        for (int i = 0; i < 4; ++i)
            if (sol.power_entries[i].eval_exact(n) != CoefField::from_gaussian(*want[i]))
                throw Error("internal: closed-form matrix power disagrees with multiplication");
    }
    sol.rep = ClosedFormSolution::Rep::MoebiusPower;
    Mat2 acc{GaussianRational(1), GaussianRational(0), GaussianRational(0), GaussianRational(1)};
    for (long p = 1; p <= 60; ++p) {
        acc = acc * M;
        if (acc.is_scalar()) {
            sol.orbit_period = p;
            break;
        }
    }
    sol.validity_notes = "undefined at initial values where C(n)*v0 + D(n) = 0 (orbit pole)";
    return sol;
}

ClosedFormSolution solve_general(const ReducedMap& m, const CoefField& v0) {
    ClosedFormSolution sol;
    sol.rep = ClosedFormSolution::Rep::Lazy;
    sol.x0 = v0;
    RatFunc rhs = m.rhs;
    VarId vv = m.vvar;
    sol.step = [rhs, vv](long k, const CoefField& x) {
        return rhs.eval<CoefField>([&](VarId w) -> CoefField {
            if (w == vv) return x;
            if (w == Symbols::n()) return CoefField::integer(k);
            return CoefField::from_ratfunc(RatFunc::variable(w));
        });
    };
    sol.validity_notes = "no closed form for a general first-order map; exact lazy iteration";
    return sol;
}

std::string gauss_str(const GaussianRational& g) { return g.to_string(); }

std::string render_term(const SeqTerm& t) {
    std::ostringstream os;
    os << "(" << seq_coeff_to_string(t.c) << ")";
    if (!t.lambda.scale.is_one()) os << "*(" << gauss_str(t.lambda.scale) << ")^n";
    if (t.lambda.k != 0)
        os << "*exp(2*pi*i*" << t.lambda.k << "*n/" << t.lambda.m << ")";
    if (t.deg == 1)
        os << "*n";
    else if (t.deg > 1)
        os << "*n^" << t.deg;
    return os.str();
}

}  // namespace

std::string Invariant::to_string() const {
    if (kind == InvariantKind::Ratio) return "v(n) = u(n+1)/u(n)";
    return "v(n) = u(n+1) - (" + rho.to_string() + ")*u(n)";
}

Invariant invariant_from_generator(const DifferenceEquation& eq, const SymmetryGenerator& g) {
    (void)eq;
    if (!g.xi.is_zero())
        throw UnsupportedFamilyError(
            "order reduction is implemented for vertical generators only (xi = 0); "
            "a shift component does not induce a first-order invariant here");
    auto nonzero = [&](std::size_t j) { return j < g.q_coeffs.size() && !g.q_coeffs[j].is_zero(); };
    for (std::size_t j = 2; j < g.q_coeffs.size(); ++j)
        if (nonzero(j))
            throw UnsupportedFamilyError(
                "characteristics quadratic or higher in u do not induce the implemented "
                "ratio/translation invariants");
    bool has_const = nonzero(0), has_lin = nonzero(1);
    if (has_lin && !has_const) {
        const auto& ts = g.q_coeffs[1].terms();
        if (ts.size() == 1 && ts[0].deg == 0 && ts[0].lambda.is_one()) {
            Invariant inv;
            inv.kind = InvariantKind::Ratio;
            return inv;
        }
        throw UnsupportedFamilyError(
            "the ratio invariant v = u(n+1)/u(n) needs a scaling Q = c*u with c constant "
            "in n; this scaling's coefficient moves with n");
    }
    if (has_const && !has_lin) {
        const auto& ts = g.q_coeffs[0].terms();
        if (ts.size() == 1 && ts[0].deg == 0) {
            Invariant inv;
            inv.kind = InvariantKind::Translation;
            inv.rho = ts[0].lambda;
            return inv;
        }
        throw UnsupportedFamilyError(
            "the translation invariant v = u(n+1) - rho*u(n) needs Q = c*lambda^n "
            "(one exponential term, nowhere zero)");
    }
    throw UnsupportedFamilyError("no invariant family is implemented for this generator shape");
}

std::string ReducedMap::to_string() const {
    std::ostringstream os;
    switch (cls) {
        case Class::Linear:
            os << "v(n+1) = (" << r.to_string() << ")*v(n) + (" << s.to_string() << ")";
            break;
        case Class::Moebius:
            os << "v(n+1) = ((" << gauss_str(matrix[0]) << ")*v(n) + (" << gauss_str(matrix[1])
               << ")) / ((" << gauss_str(matrix[2]) << ")*v(n) + (" << gauss_str(matrix[3])
               << "))";
            break;
        case Class::General:
            os << "v(n+1) = " << rhs.to_string();
            break;
    }
    if (!domain_notes.empty()) os << "   [" << domain_notes << "]";
    return os.str();
}

ReducedMap reduced_map(const DifferenceEquation& eq, const Invariant& inv) {
    if (eq.order != 2)
        throw ValidationError("order reduction is implemented for second-order equations");
    if (inv.kind == InvariantKind::Ratio) return reduce_ratio(eq);
    return reduce_translation(eq, inv.rho);
}

CoefField ClosedFormSolution::value(long n) const {
    if (n < 0) throw EvalError("solution values are defined for n >= 0");
    switch (rep) {
        case Rep::Exact:
            return form.eval_exact(n);
        case Rep::MoebiusPower: {
            CoefField An = power_entries[0].eval_exact(n), Bn = power_entries[1].eval_exact(n);
            CoefField Cn = power_entries[2].eval_exact(n), Dn = power_entries[3].eval_exact(n);
            CoefField den = Cn * x0 + Dn;
            if (den.is_zero())
                throw EvalError("Moebius orbit pole at n = " + std::to_string(n));
            return (An * x0 + Bn) / den;
        }
        case Rep::Lazy: {
            if (!step) throw EvalError("lazy solution carries no iteration rule");
            if (!lazy_cache_) lazy_cache_ = std::make_shared<std::vector<CoefField>>(1, x0);
            auto& cache = *lazy_cache_;
            while (static_cast<long>(cache.size()) <= n) {
                long k = static_cast<long>(cache.size()) - 1;
                cache.push_back(step(k, cache.back()));
            }
            return cache[static_cast<std::size_t>(n)];
        }
    }
    throw EvalError("unknown solution representation");
}

std::string ClosedFormSolution::display_exponential() const {
    switch (rep) {
        case Rep::Exact: {
            if (form.is_zero()) return "0";
            std::string out;
            for (const SeqTerm& t : form.terms()) {
                if (!out.empty()) out += " + ";
                out += render_term(t);
            }
            return out;
        }
        case Rep::MoebiusPower: {
            std::ostringstream os;
            os << "v(n) = ((" << power_entries[0].to_string() << ")*v0 + ("
               << power_entries[1].to_string() << ")) / ((" << power_entries[2].to_string()
               << ")*v0 + (" << power_entries[3].to_string() << "))";
            return os.str();
        }
        case Rep::Lazy:
            return "<exact lazy iteration: " + validity_notes + ">";
    }
    return "";
}

std::string ClosedFormSolution::display_trig() const {
    if (rep != Rep::Exact) return display_exponential();
    if (form.is_zero()) return "0";
    const auto& ts = form.terms();
    std::vector<bool> used(ts.size(), false);
    std::string out;
    auto append = [&](const std::string& piece) {
        if (!out.empty()) out += " + ";
        out += piece;
    };
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (used[i]) continue;
        used[i] = true;
        const SeqTerm& t = ts[i];
        bool exact = std::holds_alternative<CoefField>(t.c);
        if (!exact || t.lambda.k == 0) {
            append(render_term(t));
            continue;
        }
        const CoefField& c = std::get<CoefField>(t.c);
        RootOfUnityScalar conj_lambda =
            RootOfUnityScalar::make(t.lambda.scale.conj(), (t.lambda.m - t.lambda.k) % t.lambda.m,
                                    t.lambda.m);
        std::size_t partner = ts.size();
        for (std::size_t j = i + 1; j < ts.size(); ++j) {
            if (used[j] || ts[j].deg != t.deg) continue;
            if (!std::holds_alternative<CoefField>(ts[j].c)) continue;
            if (ts[j].lambda == conj_lambda &&
                std::get<CoefField>(ts[j].c) == conj_exact(c)) {
                partner = j;
                break;
            }
        }
        if (partner == ts.size() || !(t.lambda.scale == t.lambda.scale.conj())) {
            append(render_term(t));
            continue;
        }
        used[partner] = true;
        CoefField cosc = c + conj_exact(c);
        CoefField sinc = CoefField::root_of_unity(1, 4) * (c - conj_exact(c));
        std::ostringstream os;
        std::string prefix;
        if (!t.lambda.scale.is_one()) prefix = "(" + gauss_str(t.lambda.scale) + ")^n*";
        std::string arg =
            "2*pi*" + std::to_string(t.lambda.k) + "*n/" + std::to_string(t.lambda.m);
        bool first = true;
        if (!cosc.is_zero()) {
            os << prefix << "(" << cosc.to_string() << ")*cos(" << arg << ")";
            first = false;
        }
        if (!sinc.is_zero()) {
            if (!first) os << " + ";
            os << prefix << "(" << sinc.to_string() << ")*sin(" << arg << ")";
        }
        std::string piece = os.str();
        if (t.deg > 0) piece = "(" + piece + ")*n" + (t.deg > 1 ? "^" + std::to_string(t.deg) : "");
        append(piece);
    }
    return out;
}

ClosedFormSolution solve_first_order(const ReducedMap& m, const CoefField& v0) {
    switch (m.cls) {
        case ReducedMap::Class::Linear:
            return solve_linear(m, v0);
        case ReducedMap::Class::Moebius:
            return solve_moebius(m, v0);
        case ReducedMap::Class::General:
            return solve_general(m, v0);
    }
    throw ValidationError("unknown reduced-map class");
}

ClosedFormSolution reconstruct(const DifferenceEquation& eq, const Invariant& inv,
                               const ClosedFormSolution& v_solution, const CoefField& u0,
                               const CoefField& u1) {
    if (eq.order != 2)
        throw ValidationError("reconstruction is implemented for second-order equations");
    CoefField v0_expected;
    if (inv.kind == InvariantKind::Ratio) {
        if (u0.is_zero())
            throw SingularInitialDataError(
                "u(0) = 0 lies outside the chart of the ratio invariant v = u(n+1)/u(n)");
        v0_expected = u1 / u0;
    } else {
        v0_expected = u1 - inv.rho.value() * u0;
    }
    CoefField v_at_0;
    try {
        v_at_0 = v_solution.value(0);
    } catch (const EvalError& e) {
        throw SingularInitialDataError(std::string("the v-solution is singular at n = 0: ") +
                                       e.what());
    }
    if (v_at_0 != v0_expected)
        throw ValidationError(
            "the v-solution's value at n = 0 does not match v(0) computed from u(0), u(1)");

    ClosedFormSolution sol;
    sol.x0 = u0;
    if (inv.kind == InvariantKind::Ratio) {
        std::optional<long> p = v_solution.orbit_period;
        if (!p && v_solution.rep == ClosedFormSolution::Rep::Exact) p = v_solution.form.period();
        bool built = false;
        if (p) {
            std::vector<CoefField> vv;
            try {
                for (long k = 0; k < *p; ++k) vv.push_back(v_solution.value(k));
            } catch (const EvalError& e) {
                throw SingularInitialDataError(
                    std::string("the v-orbit hits a pole inside one period: ") + e.what());
            }
            CoefField P = CoefField::integer(1);
            for (const CoefField& x : vv) P *= x;
            auto Ps = as_rou_scalar(P);
            if (Ps && Ps->is_unit_modulus()) {
                long L = *p * Ps->m;
                std::vector<CoefField> uu{u0};
                for (long k = 0; k < L; ++k)
                    uu.push_back(uu.back() * vv[static_cast<std::size_t>(k % *p)]);
                if (uu[static_cast<std::size_t>(L)] != u0)
                    throw Error("internal: the periodic trajectory failed to close after L steps");
                SequenceClosedForm form = SequenceClosedForm::zero();
                CoefField invL = CoefField::from_rational(Rational(1, L));
                for (long j = 0; j < L; ++j) {
                    CoefField cj;
                    for (long r = 0; r < L; ++r)
                        cj += uu[static_cast<std::size_t>(r)] *
                              CoefField::root_of_unity((L - (j * r) % L) % L, L);
                    cj *= invL;
                    if (!cj.is_zero())
                        form = form +
                               SequenceClosedForm::term(SeqCoeff(cj), RootOfUnityScalar::root(j, L),
                                                        0);
                }
                for (long r = 0; r < L; ++r)
                    if (form.eval_exact(r) != uu[static_cast<std::size_t>(r)])
                        throw Error("internal: interpolation of the periodic trajectory failed");
                sol.rep = ClosedFormSolution::Rep::Exact;
                sol.form = form;
                sol.orbit_period = form.period();
                built = true;
            }
        }
        if (!built) {
            sol.rep = ClosedFormSolution::Rep::Lazy;
            ClosedFormSolution vcopy = v_solution;
            sol.step = [vcopy](long k, const CoefField& x) { return x * vcopy.value(k); };
            sol.validity_notes =
                "the v-trajectory does not collapse to a root-of-unity period; "
                "u(n) = u(0) * prod_{k<n} v(k) by exact lazy iteration";
        }
    } else {
        RootOfUnityScalar lrho = inv.rho;
        bool exact_ok =
            v_solution.rep == ClosedFormSolution::Rep::Exact && v_solution.form.is_exact();
        if (exact_ok)
            for (const SeqTerm& t : v_solution.form.terms())
                if (t.deg != 0) exact_ok = false;
        if (exact_ok) {
            CoefField rhoV = lrho.value();
            SequenceClosedForm form = SequenceClosedForm::term(SeqCoeff(u0), lrho, 0);
            for (const SeqTerm& t : v_solution.form.terms()) {
                const CoefField& cs = std::get<CoefField>(t.c);
                if (t.lambda != lrho) {
                    CoefField d = t.lambda.value() - rhoV;
                    form = form + SequenceClosedForm::term(SeqCoeff(cs / d), t.lambda, 0) +
                           SequenceClosedForm::term(SeqCoeff(-(cs / d)), lrho, 0);
                } else {
                    form = form + SequenceClosedForm::term(SeqCoeff(cs / rhoV), lrho, 1);
                }
            }
            sol.rep = ClosedFormSolution::Rep::Exact;
            sol.form = form;
            sol.orbit_period = form.period();
        } else {
            sol.rep = ClosedFormSolution::Rep::Lazy;
            ClosedFormSolution vcopy = v_solution;
            CoefField rhoV = lrho.value();
            sol.step = [vcopy, rhoV](long k, const CoefField& x) {
                return rhoV * x + vcopy.value(k);
            };
            sol.validity_notes =
                "v is not an exact degree-0 closed form; u(n+1) = rho*u(n) + v(n) by "
                "exact lazy iteration";
        }
    }

    std::vector<CoefField> ref;
    try {
        ref = iterate_equation(eq, u0, u1, 30);
    } catch (const EvalError& e) {
        throw SingularInitialDataError(
            std::string("the trajectory from this initial data is singular: ") + e.what());
    }
    for (long n = 0; n <= 30; ++n) {
        CoefField got;
        try {
            got = sol.value(n);
        } catch (const EvalError& e) {
            throw SingularInitialDataError(std::string("the reconstructed solution is singular "
                                                       "at n = ") +
                                           std::to_string(n) + ": " + e.what());
        }
        if (got != ref[static_cast<std::size_t>(n)])
            throw ValidationError("the reconstructed solution fails the equation check at n = " +
                                  std::to_string(n) +
                                  "; the proposed v-solution is not conjugate to the dynamics");
    }
    return sol;
}

std::vector<std::string> builtin_solution_formula_ids() {
    return {"dp1_zero_multivalued_form", "dp2_zero_closed_form", "dp4_zero_ceiling_form"};
}

std::vector<SolutionFormula> builtin_solution_formulas(const std::string& id) {
    CoefField U0 = param_field("u0"), U1 = param_field("u1");
    if (id == "dp1_zero_multivalued_form") {
        auto make = [&](bool conjugate) {
            SolutionFormula f;
            f.id = "dp1_zero_multivalued_form";
            f.branch = conjugate ? "conjugate" : "principal";
            f.nominal_u0 = U0;
            f.nominal_u1 = U1;
            f.value = [U0, U1, conjugate](long n) -> CoefField {
                // The published display contains the multivalued powers
                // (-1)^(2(n-1)/3) and (-1)^(2/3); the two branches read them
                // through exp(i*pi*x) and exp(-i*pi*x) respectively.  The
                // remaining exponentials exp(+-4*i*n*pi/3) are single-valued.
                auto mv = [conjugate](long e) {
                    long r = ((e % 3) + 3) % 3;
                    return CoefField::root_of_unity(conjugate ? (3 - r) % 3 : r, 3);
                };
                CoefField zeta = CoefField::root_of_unity(1, 3);
                CoefField pref = mv(n - 1);
                CoefField V = U1 - zeta * U0;
                CoefField wN = CoefField::root_of_unity(((n % 3) + 3) % 3, 3);
                CoefField w2 = CoefField::root_of_unity(((2 * n % 3) + 3) % 3, 3);
                CoefField B = conjugate ? CoefField::root_of_unity(2, 3) : zeta;
                CoefField one = CoefField::integer(1);
                CoefField bracket = one + wN * (one - w2) / (B - one);
                return pref * V * bracket;
            };
            return f;
        };
        return {make(false), make(true)};
    }
    if (id == "dp2_zero_closed_form") {
        SolutionFormula f;
        f.id = id;
        f.branch = "-";
        f.nominal_u0 = U0;
        f.nominal_u1 = U1;
        f.value = [U0, U1](long n) -> CoefField {
            CoefField i = CoefField::root_of_unity(1, 4);
            CoefField sign = CoefField::integer(n % 2 == 0 ? 1 : -1);
            CoefField bracket = CoefField::from_rational(Rational(3, 2)) -
                                CoefField::from_rational(Rational(1, 2)) * sign;
            long e = (((n - 1) % 4) + 4) % 4;
            return (U1 - i * U0) * bracket * CoefField::root_of_unity(e, 4);
        };
        return {f};
    }
    if (id == "dp4_zero_ceiling_form") {
        SolutionFormula f;
        f.id = id;
        f.branch = "-";
        f.nominal_u0 = U0;
        f.nominal_u1 = U1;
        f.value = [U0, U1](long n) -> CoefField {
            long e2 = n + ceil_div(1 - n, 2) - 1;
            long e1 = ceil_div(2 - n, 2) - 1;
            long e0 = ceil_div(1 - n, 2) + 1;
            CoefField sign = CoefField::integer((n - 1) % 2 == 0 ? 1 : -1);
            CoefField r = U0 / U1;
            CoefField two = CoefField::integer(2);
            return sign * two.pow(e2) * (two - two * r).pow(e1) * r.pow(e0);
        };
        return {f};
    }
    throw ValidationError("unknown audited formula id: " + id);
}

CoefField conj_exact(const CoefField& x) {
    // Coordinates over the power basis are real rational functions, so
    // conjugation only inverts the root of unity: sum c_j zeta^j -> sum
    // c_j zeta^(-j).  Parameters are treated as real symbols.
    long m = x.order();
    const auto& co = x.coords();
    CoefField out = CoefField::integer(0);
    for (std::size_t j = 0; j < co.size(); ++j) {
        if (co[j].is_zero()) continue;
        out += CoefField::from_ratfunc(co[j]) *
               CoefField::root_of_unity((m - static_cast<long>(j)) % m, m);
    }
    return out;
}

SolutionFormula conjugate_formula(const SolutionFormula& f) {
    SolutionFormula out;
    out.id = f.id;
    out.branch = f.branch + "-conjugated";
    auto val = f.value;
    out.value = [val](long n) { return conj_exact(val(n)); };
    out.nominal_u0 = conj_exact(f.nominal_u0);
    out.nominal_u1 = conj_exact(f.nominal_u1);
    return out;
}

std::string AuditReport::to_json() const {
    ordered_json j;
    j["formula_id"] = formula_id;
    j["branch"] = branch;
    j["verdict"] = verdict;
    auto phase = [](const AuditPhase& p) {
        ordered_json q;
        q["match"] = p.match;
        q["first_fail"] = p.first_fail ? ordered_json(*p.first_fail) : ordered_json(nullptr);
        return q;
    };
    j["initial_data"] = phase(initial_data);
    j["equation"] = phase(equation);
    j["first_fail_n"] = first_fail_n ? ordered_json(*first_fail_n) : ordered_json(nullptr);
    j["max_abs_err"] = max_abs_err;
    j["range"] = ordered_json::array({n_begin, n_end});
    if (!detail.empty()) j["detail"] = detail;
    return j.dump(2);
}

AuditReport audit_solution_formula(const DifferenceEquation& eq, const SolutionFormula& formula,
                                 long n_max, double tol) {
    if (eq.order != 2)
        throw ValidationError("the audit is implemented for second-order equations");
    if (n_max < 1) throw ValidationError("the audit range must contain n = 0 and n = 1");
    AuditReport rep;
    rep.formula_id = formula.id;
    rep.branch = formula.branch;
    rep.n_begin = 0;
    rep.n_end = n_max;

    std::vector<CoefField> diffs;
    auto num_abs = [](const CoefField& d) -> double {
        std::complex<double> z = d.eval_complex([](VarId v) -> std::complex<double> {
            std::string nm = Symbols::name(v);
            if (nm == "u0") return {1.0, 0.0};
            if (nm == "u1") return {2.0, 0.0};
            throw EvalError("the audit's numeric sample has no value for symbol '" + nm + "'");
        });
        return std::abs(z);
    };
    auto mismatch = [&](const CoefField& d) {
        if (tol <= 0.0) return !d.is_zero();
        return !(num_abs(d) <= tol);
    };
    auto record = [&](AuditPhase& ph, long n, const CoefField& got, const CoefField& want) {
        CoefField d = got - want;
        if (mismatch(d)) {
            if (ph.match) {
                ph.match = false;
                ph.first_fail = n;
            }
            diffs.push_back(d);
        }
    };

    CoefField f0 = formula.value(0), f1 = formula.value(1);
    record(rep.initial_data, 0, f0, formula.nominal_u0);
    record(rep.initial_data, 1, f1, formula.nominal_u1);

    std::vector<CoefField> sim{f0, f1};
    for (long n = 2; n <= n_max; ++n) {
        CoefField next;
        try {
            next = equation_step(eq, n - 2, sim[static_cast<std::size_t>(n - 2)],
                                 sim[static_cast<std::size_t>(n - 1)]);
        } catch (const EvalError& e) {
            rep.detail = "exact iteration became singular at n = " + std::to_string(n) + ": " +
                         e.what();
            if (rep.equation.match) {
                rep.equation.match = false;
                rep.equation.first_fail = n;
            }
            break;
        }
        sim.push_back(next);
        record(rep.equation, n, formula.value(n), next);
    }

    rep.verdict = (rep.initial_data.match && rep.equation.match) ? "match" : "mismatch";
    if (!rep.initial_data.match || !rep.equation.match) {
        long ff = LONG_MAX;
        if (rep.initial_data.first_fail) ff = std::min(ff, *rep.initial_data.first_fail);
        if (rep.equation.first_fail) ff = std::min(ff, *rep.equation.first_fail);
        rep.first_fail_n = ff;
    }
    double mx = 0.0;
    for (const CoefField& d : diffs) mx = std::max(mx, num_abs(d));
    rep.max_abs_err = mx;
    return rep;
}

}  // namespace dpsym
