#include "dpsym/symmetry.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "dpsym/expr.hpp"
#include "dpsym/linalg.hpp"

namespace dpsym {

namespace {

using ordered_json = nlohmann::ordered_json;

VarId slot_var(int j, int i) {
    return Symbols::intern("alpha" + std::to_string(j) + "_" + std::to_string(i));
}
VarId xi_var(int i) { return Symbols::intern(i == 0 ? "xi0" : "xi1"); }

RatFunc imag_unit_rf() { return RatFunc(Poly(GaussianRational(Rational(0), Rational(1)))); }

/// Embed a field element into Q(i)(parameters) when it lies there.
std::optional<RatFunc> coef_to_ratfunc(const CoefField& c) {
    if (c.order() == 1) return c.coords()[0];
    if (c.is_gaussian()) return RatFunc(Poly(c.to_gaussian()));
    if (c.order() % 4 == 0) {
        long iq = c.order() / 4;
        if (iq < static_cast<long>(c.coords().size())) {
            bool only = true;
            for (long j = 0; j < static_cast<long>(c.coords().size()); ++j)
                if (j != 0 && j != iq && !c.coords()[static_cast<size_t>(j)].is_zero()) {
                    only = false;
                    break;
                }
            if (only)
                return c.coords()[0] + imag_unit_rf() * c.coords()[static_cast<size_t>(iq)];
        }
    }
    return std::nullopt;
}

/// A closed form with lambda = 1 everywhere and embeddable coefficients is a
/// plain polynomial in n over Q(i)(parameters).
std::optional<RatFunc> seq_to_ratfunc(const SequenceClosedForm& s) {
    RatFunc acc;
    for (auto& t : s.terms()) {
        if (!t.lambda.is_one()) return std::nullopt;
        auto* ex = std::get_if<CoefField>(&t.c);
        if (!ex) return std::nullopt;
        auto r = coef_to_ratfunc(*ex);
        if (!r) return std::nullopt;
        acc += *r * RatFunc(Poly::variable(Symbols::n(), static_cast<int>(t.deg)));
    }
    return acc;
}

void validate_xi_shape(const SequenceClosedForm& xi) {
    for (auto& t : xi.terms())
        if (!t.lambda.is_one() || t.deg > 1)
            throw ValidationError("xi must be an affine polynomial in n");
}

struct ResidualBuild {
    std::vector<RatFunc> components;
    RatFunc expr;
};

template <class SymOf>
ResidualBuild build_residual(const DifferenceEquation& eq, SymOf&& sym, int degree,
                             const RatFunc& xi_expr) {
    if (eq.order != 2)
        throw ValidationError("symmetry analysis requires a second-order equation");
    for (VarId p : eq.parameters) {
        std::string nm = Symbols::name(p);
        if (nm.rfind("alpha", 0) == 0 || nm == "xi0" || nm == "xi1")
            throw ValidationError("parameter name '" + nm + "' collides with internal unknowns");
    }
    const RatFunc& w = eq.omega;
    RatFunc w_n = w.derivative(Symbols::n());
    RatFunc w_u0 = w.derivative(Symbols::u(0));
    RatFunc w_u1 = w.derivative(Symbols::u(1));
    RatFunc s2q, q_at_0, q_at_1;
    for (int j = 0; j <= degree; ++j) {
        s2q += sym(j, 2) * w.pow(j);
        q_at_0 += sym(j, 0) * RatFunc(Poly::variable(Symbols::u(0), j));
        q_at_1 += sym(j, 1) * RatFunc(Poly::variable(Symbols::u(1), j));
    }
    ResidualBuild out;
    out.components = {s2q, xi_expr * w_n, q_at_0 * w_u0, q_at_1 * w_u1};
    out.expr = out.components[0] - out.components[1] - out.components[2] - out.components[3];
    return out;
}

}  // namespace

// --- generators -----------------------------------------------------------

int SymmetryGenerator::degree() const {
    for (int j = static_cast<int>(q_coeffs.size()) - 1; j >= 0; --j)
        if (!q_coeffs[static_cast<size_t>(j)].is_zero()) return j;
    return -1;
}

bool SymmetryGenerator::is_zero() const { return xi.is_zero() && degree() < 0; }

std::string SymmetryGenerator::to_string() const {
    std::ostringstream os;
    os << "xi = " << xi.to_string() << "; Q = ";
    if (degree() < 0) {
        os << "0";
    } else {
        bool first = true;
        for (size_t j = 0; j < q_coeffs.size(); ++j) {
            if (q_coeffs[j].is_zero()) continue;
            if (!first) os << " + ";
            first = false;
            os << "(" << q_coeffs[j].to_string() << ")";
            if (j == 1) os << " * u";
            else if (j > 1) os << " * u^" << j;
        }
    }
    return os.str();
}

SymmetryGenerator make_generator(SequenceClosedForm xi, std::vector<SequenceClosedForm> q_coeffs,
                                 std::string provenance) {
    validate_xi_shape(xi);
    while (!q_coeffs.empty() && q_coeffs.back().is_zero()) q_coeffs.pop_back();
    SymmetryGenerator g{std::move(xi), std::move(q_coeffs), std::move(provenance)};
    if (g.is_zero()) throw ValidationError("generator must have a nonzero component");
    return g;
}

SymmetryGenerator generator_sum(const SymmetryGenerator& g, const SymmetryGenerator& h) {
    SymmetryGenerator out;
    out.xi = g.xi + h.xi;
    out.q_coeffs.resize(std::max(g.q_coeffs.size(), h.q_coeffs.size()));
    for (size_t j = 0; j < out.q_coeffs.size(); ++j) {
        if (j < g.q_coeffs.size()) out.q_coeffs[j] += g.q_coeffs[j];
        if (j < h.q_coeffs.size()) out.q_coeffs[j] += h.q_coeffs[j];
    }
    while (!out.q_coeffs.empty() && out.q_coeffs.back().is_zero()) out.q_coeffs.pop_back();
    out.provenance = g.provenance + " + " + h.provenance;
    return out;
}

// --- residual -------------------------------------------------------------

ResidualForm residual(const DifferenceEquation& eq, const SymmetryGenerator& g, int max_degree) {
    validate_xi_shape(g.xi);
    int d = g.degree();
    if (d > max_degree)
        throw ValidationError("generator degree exceeds configured max (" +
                              std::to_string(max_degree) + ")");
    std::vector<ResidualSlot> slots;
    auto sym = [&](int j, int i) -> RatFunc {
        SequenceClosedForm val = g.q_coeffs[static_cast<size_t>(j)].shifted(i);
        if (val.is_zero()) return RatFunc();
        if (auto r = seq_to_ratfunc(val)) return *r;
        VarId v = slot_var(j, i);
        slots.push_back({v, j, i, std::move(val)});
        return RatFunc::variable(v);
    };
    RatFunc xi_expr;
    if (auto r = seq_to_ratfunc(g.xi)) {
        xi_expr = *r;
    } else {
        CoefField c0, c1;
        for (auto& t : g.xi.terms()) {
            auto* ex = std::get_if<CoefField>(&t.c);
            if (!ex)
                throw ValidationError("xi with float coefficients is not supported");
            if (t.deg == 0) c0 += *ex;
            else c1 += *ex;
        }
        if (!c0.is_zero()) {
            slots.push_back({xi_var(0), -1, 0,
                             SequenceClosedForm::term(SeqCoeff(c0), RootOfUnityScalar::one(), 0)});
            xi_expr += RatFunc::variable(xi_var(0));
        }
        if (!c1.is_zero()) {
            slots.push_back({xi_var(1), -1, 0,
                             SequenceClosedForm::term(SeqCoeff(c1), RootOfUnityScalar::one(), 0)});
            xi_expr += RatFunc::variable(xi_var(1)) * RatFunc::variable(Symbols::n());
        }
    }
    auto b = build_residual(eq, sym, d, xi_expr);
    return ResidualForm{std::move(b.expr), std::move(b.components), std::move(slots)};
}

// --- verification ---------------------------------------------------------

VerificationReport verify_symbolic(const DifferenceEquation& eq, const SymmetryGenerator& g,
                                   int max_degree) {
    ResidualForm r = residual(eq, g, max_degree);
    VerificationReport rep;
    rep.mode = VerificationReport::Mode::Symbolic;
    long period_lcm = 1;
    for (auto& s : r.slots) {
        if (!s.value.is_exact())
            throw ValidationError("symbolic verification requires exact coefficients");
        auto p = s.value.period();
        if (!p)
            throw ValidationError("aperiodic coefficient sequence in symbolic verification: " +
                                  s.value.to_string());
        period_lcm = std::lcm(period_lcm, *p);
    }
    const Poly& num = r.expr.num();
    for (long residue = 0; residue < period_lcm; ++residue) {
        std::map<Monomial, CoefField, MonomialGrlexDesc> buckets;
        for (auto& [m, c] : num.terms()) {
            CoefField factor = CoefField::from_gaussian(c);
            Monomial rest;
            for (auto& [v, e] : m.exps) {
                const ResidualSlot* hit = nullptr;
                for (auto& s : r.slots)
                    if (s.var == v) {
                        hit = &s;
                        break;
                    }
                if (hit)
                    factor *= hit->value.eval_exact(residue).pow(e);
                else if (v == Symbols::n() || Symbols::is_u(v))
                    rest = rest * Monomial::var(v, e);
                else
                    // Parameter: fold it into the coefficient-field factor so that
                    // parameter occurrences inside slot values cancel against it.
                    factor *= CoefField::from_ratfunc(RatFunc::variable(v)).pow(e);
            }
            auto [it, fresh] = buckets.emplace(rest, factor);
            if (!fresh) it->second += factor;
        }
        bool ok = true;
        for (auto& [m, c] : buckets)
            if (!c.is_zero()) {
                ok = false;
                break;
            }
        rep.residues_checked.push_back(residue);
        if (!ok) {
            rep.pass = false;
            rep.failing_residue = residue;
            rep.detail = "residual does not vanish on the residue class n = " +
                         std::to_string(residue) + " (mod " + std::to_string(period_lcm) + ")";
            return rep;
        }
    }
    rep.pass = true;
    rep.detail = r.slots.empty()
                     ? "residual is canonically zero as a rational function"
                     : "residual vanishes identically on every residue class mod " +
                           std::to_string(period_lcm);
    return rep;
}

VerificationReport verify_numeric(const DifferenceEquation& eq, const SymmetryGenerator& g,
                                  const std::map<VarId, std::complex<double>>& params,
                                  int samples, double tol, unsigned long seed, int max_degree) {
    if (samples <= 0) throw ValidationError("sample count must be positive");
    ResidualForm r = residual(eq, g, max_degree);

    std::set<VarId> needed;
    auto collect = [&](const RatFunc& f) {
        for (VarId v : f.vars()) needed.insert(v);
    };
    collect(r.expr);
    for (auto& c : r.components) collect(c);
    for (auto& s : r.slots)
        for (auto& t : s.value.terms())
            if (auto* ex = std::get_if<CoefField>(&t.c))
                for (auto& coord : ex->coords()) collect(coord);
    needed.erase(Symbols::n());
    needed.erase(Symbols::u(0));
    needed.erase(Symbols::u(1));
    for (auto& s : r.slots) needed.erase(s.var);
    for (VarId v : needed)
        if (!params.count(v))
            throw EvalError("parameter '" + Symbols::name(v) +
                            "' must be bound for numeric verification");

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> ndist(-50, 50);
    std::uniform_real_distribution<double> cdist(-2.0, 2.0);

    VerificationReport rep;
    rep.mode = VerificationReport::Mode::Numeric;
    int successes = 0;
    double worst = 0.0;
    for (int s = 0; s < samples; ++s) {
        for (int attempt = 0; attempt < 100; ++attempt) {
            long nv = ndist(rng);
            std::complex<double> u0(cdist(rng), cdist(rng));
            std::complex<double> u1(cdist(rng), cdist(rng));
            auto par = [&](VarId v) -> std::complex<double> {
                auto it = params.find(v);
                if (it == params.end())
                    throw EvalError("parameter '" + Symbols::name(v) + "' is not bound");
                return it->second;
            };
            auto look = [&](VarId v) -> std::complex<double> {
                if (v == Symbols::n()) return {static_cast<double>(nv), 0.0};
                if (v == Symbols::u(0)) return u0;
                if (v == Symbols::u(1)) return u1;
                for (auto& sl : r.slots)
                    if (sl.var == v) return sl.value.eval_complex(nv, par);
                return par(v);
            };
            try {
                double scale = 1.0;
                bool usable = true;
                for (auto& comp : r.components) {
                    std::complex<double> cv = comp.eval<std::complex<double>>(look);
                    double mag = std::abs(cv);
                    if (!std::isfinite(mag) || mag > 1e12) {
                        usable = false;
                        break;
                    }
                    scale = std::max(scale, mag);
                }
                if (!usable) continue;
                std::complex<double> rv = r.expr.eval<std::complex<double>>(look);
                if (!std::isfinite(std::abs(rv))) continue;
                double rel = std::abs(rv) / scale;
                ++successes;
                if (rel > worst) {
                    worst = rel;
                    if (rel > tol) rep.witness = NumericWitness{nv, u0, u1, rv};
                }
            } catch (const EvalError&) {
                continue;
            }
            break;
        }
    }
    if (successes == 0) throw EvalError("all sample points were singular for this equation");
    rep.residual_norm = worst;
    rep.pass = worst <= tol;
    if (rep.pass) rep.witness.reset();
    std::ostringstream os;
    os << "worst relative residual " << worst << " over " << successes << " samples (tol " << tol
       << ")";
    rep.detail = os.str();
    return rep;
}

// --- determining system ---------------------------------------------------

std::string DeterminingSystem::to_string() const {
    std::ostringstream os;
    os << "unknowns:";
    for (auto& u : unknowns) os << ' ' << Symbols::name(u.var);
    os << '\n';
    for (auto& e : equations) os << poly_to_string(e) << " = 0\n";
    return os.str();
}

DeterminingSystem extract_determining_system(const DifferenceEquation& eq, int degree,
                                             bool with_xi) {
    if (degree < 0 || degree > 4)
        throw ValidationError("ansatz degree must be between 0 and 4");
    DeterminingSystem out;
    out.equation = eq;
    out.degree = degree;
    out.with_xi = with_xi;
    auto sym = [&](int j, int i) { return RatFunc::variable(slot_var(j, i)); };
    RatFunc xi_expr;
    if (with_xi)
        xi_expr = RatFunc::variable(xi_var(0)) +
                  RatFunc::variable(xi_var(1)) * RatFunc::variable(Symbols::n());
    auto b = build_residual(eq, sym, degree, xi_expr);
    for (int j = 0; j <= degree; ++j)
        for (int i = 0; i <= 2; ++i) out.unknowns.push_back({slot_var(j, i), j, i});
    if (with_xi) {
        out.unknowns.push_back({xi_var(0), -1, 0});
        out.unknowns.push_back({xi_var(1), -1, 1});
    }
    auto grouped = b.expr.num().coeffs_in_vars({Symbols::u(0), Symbols::u(1)});
    for (auto& [key, p] : grouped)
        if (!p.is_zero()) out.equations.push_back(p);
    return out;
}

// --- solver ---------------------------------------------------------------

namespace {

/// Polynomial in the shift operator S with coefficients in Q(i)(parameters);
/// index = power of S.  Over n-free coefficients S commutes with scalars, so
/// this is an ordinary commutative polynomial ring over a field.
using SPoly = std::vector<RatFunc>;

int spoly_deg(const SPoly& p) {
    for (int i = static_cast<int>(p.size()) - 1; i >= 0; --i)
        if (!p[static_cast<size_t>(i)].is_zero()) return i;
    return -1;
}

struct ShiftRow {
    std::vector<SPoly> cols;
};

int row_lead(const ShiftRow& r) {
    for (size_t j = 0; j < r.cols.size(); ++j)
        if (spoly_deg(r.cols[j]) >= 0) return static_cast<int>(j);
    return -1;
}

/// r -= f * S^t * piv, columnwise.
void row_axpy(ShiftRow& r, const RatFunc& f, int t, const ShiftRow& piv) {
    for (size_t j = 0; j < r.cols.size(); ++j) {
        const SPoly& p = piv.cols[j];
        int dp = spoly_deg(p);
        if (dp < 0) continue;
        if (static_cast<int>(r.cols[j].size()) < dp + t + 1)
            r.cols[j].resize(static_cast<size_t>(dp + t + 1));
        for (int i = 0; i <= dp; ++i)
            if (!p[static_cast<size_t>(i)].is_zero())
                r.cols[j][static_cast<size_t>(i + t)] -= f * p[static_cast<size_t>(i)];
    }
}

}  // namespace

DeterminingSolution solve_determining_system(const DeterminingSystem& ds,
                                             const std::vector<std::string>& extra_assumptions) {
    DeterminingSolution out;
    const int d = ds.degree;
    const VarId nvar = Symbols::n();

    // Stage 0: combine assumptions, read off parameter bindings, substitute.
    std::vector<Assumption> assume = ds.equation.assumptions;
    for (auto& t : extra_assumptions)
        assume.push_back(parse_assumption(t, ds.equation.parameters));
    check_assumption_consistency(assume);

    std::map<VarId, RatFunc> bind;
    for (auto& a : assume) {
        if (!a.is_equality) {
            out.notes.push_back("inequation '" + a.text + "' taken as generic nonvanishing");
            continue;
        }
        Poly p = bind.empty() ? a.lhs : RatFunc(a.lhs).substitute(bind).num();
        if (p.is_zero()) continue;
        if (p.is_constant())
            throw ValidationError("assumption '" + a.text + "' contradicts the other assumptions");
        bool found = false;
        VarId best = 0;
        for (VarId v : ds.equation.parameters) {
            if (p.degree_in(v) != 1) continue;
            if (!p.coeffs_in(v)[1].is_constant()) continue;
            if (!found || v > best) {
                best = v;
                found = true;
            }
        }
        if (!found) {
            out.notes.push_back("assumption '" + a.text + "' not usable for substitution");
            continue;
        }
        auto cs = p.coeffs_in(best);
        RatFunc rhs = RatFunc(-cs[0]) / RatFunc(cs[1]);
        std::map<VarId, RatFunc> single{{best, rhs}};
        for (auto& [v, val] : bind) val = val.substitute(single);
        bind.emplace(best, rhs);
        out.notes.push_back("using " + Symbols::name(best) + " = " + rhs.to_string());
    }

    DifferenceEquation bound_eq = ds.equation;
    if (!bind.empty()) bound_eq.omega = bound_eq.omega.substitute(bind);
    if (bound_eq.omega.derivative(nvar).is_zero())
        out.notes.push_back(
            "equation is autonomous on this branch: the shift symmetry (xi = 1, Q = 0) applies");

    // Decompose each substituted equation as a linear form in the unknowns.
    std::vector<VarId> uvars;
    std::map<VarId, DeterminingUnknown> meta;
    for (auto& u : ds.unknowns) {
        uvars.push_back(u.var);
        meta[u.var] = u;
    }
    struct LinEq {
        std::map<VarId, Poly> coeff;
    };
    std::vector<LinEq> lin;
    for (auto& e : ds.equations) {
        Poly p = bind.empty() ? e : RatFunc(e).substitute(bind).num();
        if (p.is_zero()) continue;
        LinEq le;
        for (auto& [key, cp] : p.coeffs_in_vars(uvars)) {
            int tot = 0;
            int which = -1;
            for (size_t k = 0; k < key.size(); ++k) {
                tot += key[k];
                if (key[k]) which = static_cast<int>(k);
            }
            if (tot == 0) {
                if (!cp.is_zero())
                    throw Error("internal: determining system has an unknown-free term");
            } else if (tot == 1) {
                le.coeff[uvars[static_cast<size_t>(which)]] = cp;
            } else {
                throw Error("internal: determining system is not linear in the unknowns");
            }
        }
        if (!le.coeff.empty()) lin.push_back(std::move(le));
    }

    // Stage 1: split off the shift-module equations (n-free coefficients,
    // no xi) from the rest.
    std::vector<ShiftRow> pool;
    std::vector<LinEq> rest;
    for (auto& le : lin) {
        bool module_eq = true;
        for (auto& [v, cp] : le.coeff) {
            if (meta.at(v).j < 0 || cp.depends_on(nvar)) {
                module_eq = false;
                break;
            }
        }
        if (module_eq) {
            ShiftRow r;
            r.cols.assign(static_cast<size_t>(d) + 1, SPoly{});
            for (auto& [v, cp] : le.coeff) {
                auto& u = meta.at(v);
                auto& col = r.cols[static_cast<size_t>(u.j)];
                if (static_cast<int>(col.size()) < u.shift + 1)
                    col.resize(static_cast<size_t>(u.shift) + 1);
                col[static_cast<size_t>(u.shift)] += RatFunc(cp);
            }
            pool.push_back(std::move(r));
        } else {
            rest.push_back(std::move(le));
        }
    }

    // Stage 2: Euclidean triangularization over the shift-operator ring.
    std::vector<std::optional<ShiftRow>> pivot(static_cast<size_t>(d) + 1);
    for (int guard = 0; guard < 100000; ++guard) {
        bool progress = false;
        for (auto it = pool.begin(); it != pool.end();) {
            int lc = row_lead(*it);
            if (lc < 0) {
                it = pool.erase(it);
                progress = true;
                continue;
            }
            auto& pv = pivot[static_cast<size_t>(lc)];
            if (!pv) {
                pv = std::move(*it);
                it = pool.erase(it);
                progress = true;
                continue;
            }
            int dit = spoly_deg(it->cols[static_cast<size_t>(lc)]);
            int dpv = spoly_deg(pv->cols[static_cast<size_t>(lc)]);
            if (dit < dpv) {
                std::swap(*it, *pv);
                std::swap(dit, dpv);
            }
            RatFunc f = it->cols[static_cast<size_t>(lc)][static_cast<size_t>(dit)] /
                        pv->cols[static_cast<size_t>(lc)][static_cast<size_t>(dpv)];
            row_axpy(*it, f, dit - dpv, *pv);
            progress = true;
            ++it;
        }
        if (!progress) break;
        if (guard == 99999) throw Error("internal: shift elimination did not terminate");
    }

    // Back-substitution, last column first.
    std::vector<std::map<int, SequenceClosedForm>> sol(static_cast<size_t>(d) + 1);
    std::vector<bool> resolved(static_cast<size_t>(d) + 1, false);
    int nparams = 0;
    for (int col = d; col >= 0; --col) {
        if (!pivot[static_cast<size_t>(col)]) continue;
        ShiftRow& r = *pivot[static_cast<size_t>(col)];
        std::map<int, SequenceClosedForm> rhs;
        for (int k = col + 1; k <= d; ++k) {
            int dk = spoly_deg(r.cols[static_cast<size_t>(k)]);
            if (dk < 0) continue;
            if (!resolved[static_cast<size_t>(k)])
                throw UnsupportedFamilyError(
                    "shift elimination left a cross-coupled constraint outside the supported "
                    "families");
            for (int i = 0; i <= dk; ++i) {
                const RatFunc& ci = r.cols[static_cast<size_t>(k)][static_cast<size_t>(i)];
                if (ci.is_zero()) continue;
                CoefField c = CoefField::from_ratfunc(ci);
                for (auto& [pi, F] : sol[static_cast<size_t>(k)]) {
                    SequenceClosedForm add = F.shifted(i).scaled_exact(c);
                    auto [jt, fresh] = rhs.emplace(pi, add);
                    if (!fresh) jt->second += add;
                }
            }
        }
        for (auto it = rhs.begin(); it != rhs.end();) {
            if (it->second.is_zero()) it = rhs.erase(it);
            else ++it;
        }
        SPoly& charpoly = r.cols[static_cast<size_t>(col)];
        int dP = spoly_deg(charpoly);
        if (dP == 0) {
            CoefField neg_inv = -(CoefField::from_ratfunc(charpoly[0]).inverse());
            for (auto& [pi, F] : rhs)
                sol[static_cast<size_t>(col)][pi] = F.scaled_exact(neg_inv);
            resolved[static_cast<size_t>(col)] = true;
        } else {
            if (!rhs.empty())
                throw UnsupportedFamilyError(
                    "inhomogeneous shift constraint of positive order is outside the supported "
                    "families");
            int t0 = 0;
            while (charpoly[static_cast<size_t>(t0)].is_zero()) ++t0;
            if (t0 == dP) {
                // c * S^t x = 0 forces x = 0 (sequences are bi-infinite).
                resolved[static_cast<size_t>(col)] = true;
                continue;
            }
            const RatFunc& lead = charpoly[static_cast<size_t>(dP)];
            std::vector<GaussianRational> cs;
            for (int i = t0; i <= dP; ++i) {
                RatFunc q = charpoly[static_cast<size_t>(i)] / lead;
                if (!q.is_constant())
                    throw UnsupportedFamilyError(
                        "shift constraint with parameter-dependent characteristic polynomial");
                cs.push_back(q.constant_value());
            }
            RecurrenceConstraint rc(std::move(cs));
            out.recurrences.push_back(rc);
            for (auto& b : solve_recurrence(rc)) sol[static_cast<size_t>(col)][nparams++] = b;
            resolved[static_cast<size_t>(col)] = true;
        }
    }
    for (int col = 0; col <= d; ++col)
        if (!resolved[static_cast<size_t>(col)])
            throw UnsupportedFamilyError("coefficient q_" + std::to_string(col) +
                                         " is not pinned by shift-resolvable equations");

    // Stage 3: expand the remaining equations per (root-of-unity, n-power)
    // bucket and solve the scalar system.
    bool xi_used = false;
    if (ds.with_xi)
        for (auto& le : rest)
            for (auto& [v, cp] : le.coeff)
                if (meta.at(v).j < 0) xi_used = true;
    const int ncols = nparams + (xi_used ? 2 : 0);
    const int col_xi0 = nparams, col_xi1 = nparams + 1;

    std::vector<std::vector<CoefField>> mat;
    for (auto& le : rest) {
        std::map<std::pair<RootOfUnityScalar, long>, std::vector<CoefField>> buckets;
        auto add_contrib = [&](int col_idx, const SequenceClosedForm& F, const Poly& cpoly) {
            auto ncs = cpoly.coeffs_in(nvar);
            for (size_t t = 0; t < ncs.size(); ++t) {
                if (ncs[t].is_zero()) continue;
                CoefField kt = CoefField::from_ratfunc(RatFunc(ncs[t]));
                for (auto& term : F.terms()) {
                    auto* ex = std::get_if<CoefField>(&term.c);
                    if (!ex)
                        throw ValidationError(
                            "float coefficients cannot enter the determining-system solver");
                    auto key = std::make_pair(term.lambda, term.deg + static_cast<long>(t));
                    auto [bit, fresh] =
                        buckets.emplace(key, std::vector<CoefField>(static_cast<size_t>(ncols)));
                    bit->second[static_cast<size_t>(col_idx)] += kt * *ex;
                }
            }
        };
        for (auto& [v, cp] : le.coeff) {
            auto& u = meta.at(v);
            if (u.j < 0) {
                add_contrib(u.shift == 0 ? col_xi0 : col_xi1,
                            SequenceClosedForm::constant(GaussianRational(1)), cp);
            } else {
                for (auto& [pi, F] : sol[static_cast<size_t>(u.j)])
                    add_contrib(pi, F.shifted(u.shift), cp);
            }
        }
        for (auto& [key, row] : buckets) {
            bool nz = false;
            for (auto& c : row)
                if (!c.is_zero()) {
                    nz = true;
                    break;
                }
            if (nz) mat.push_back(row);
        }
    }

    std::vector<std::vector<CoefField>> null;
    if (ncols > 0) {
        if (mat.empty()) {
            for (int c = 0; c < ncols; ++c) {
                std::vector<CoefField> v(static_cast<size_t>(ncols));
                v[static_cast<size_t>(c)] = CoefField::integer(1);
                null.push_back(std::move(v));
            }
        } else {
            auto ls = solve_linear_system<CoefField>(mat, std::vector<CoefField>(mat.size()));
            null = std::move(ls.nullspace);
        }
    }
    if (ds.with_xi && !xi_used)
        out.notes.push_back(
            "xi does not enter the determining system; the shift direction is reported "
            "separately");

    // Assemble basis generators, clearing parameter denominators.
    int idx = 0;
    for (auto& v0 : null) {
        auto v = v0;
        for (int guard = 0; guard < 100; ++guard) {
            Poly denp;
            bool found = false;
            for (auto& c : v) {
                for (auto& coord : c.coords())
                    if (!coord.den().is_constant()) {
                        denp = coord.den();
                        found = true;
                        break;
                    }
                if (found) break;
            }
            if (!found) break;
            CoefField mult = CoefField::from_ratfunc(RatFunc(denp));
            for (auto& c : v) c *= mult;
        }
        BigInt denom_lcm = 1;
        for (auto& c : v)
            for (auto& coord : c.coords())
                for (auto& [m, g] : coord.num().terms()) {
                    denom_lcm = boost::multiprecision::lcm(denom_lcm, rat_den(g.re));
                    denom_lcm = boost::multiprecision::lcm(denom_lcm, rat_den(g.im));
                }
        if (denom_lcm != 1) {
            CoefField mult = CoefField::from_rational(Rational(denom_lcm));
            for (auto& c : v) c *= mult;
        }
        SequenceClosedForm xi = SequenceClosedForm::zero();
        if (xi_used) {
            if (!v[static_cast<size_t>(col_xi0)].is_zero())
                xi += SequenceClosedForm::term(SeqCoeff(v[static_cast<size_t>(col_xi0)]),
                                               RootOfUnityScalar::one(), 0);
            if (!v[static_cast<size_t>(col_xi1)].is_zero())
                xi += SequenceClosedForm::term(SeqCoeff(v[static_cast<size_t>(col_xi1)]),
                                               RootOfUnityScalar::one(), 1);
        }
        std::vector<SequenceClosedForm> q(static_cast<size_t>(d) + 1);
        for (int j = 0; j <= d; ++j)
            for (auto& [pi, F] : sol[static_cast<size_t>(j)])
                if (!v[static_cast<size_t>(pi)].is_zero())
                    q[static_cast<size_t>(j)] += F.scaled_exact(v[static_cast<size_t>(pi)]);
        while (!q.empty() && q.back().is_zero()) q.pop_back();
        bool all_zero = xi.is_zero();
        if (all_zero)
            for (auto& s : q)
                if (!s.is_zero()) all_zero = false;
        if (all_zero) continue;
        ++idx;
        out.generators.push_back(
            make_generator(std::move(xi), std::move(q), "determining-system basis " +
                                                            std::to_string(idx)));
    }

    // Translation-by-solution family for linear homogeneous equations.
    if (is_linear_homogeneous(bound_eq)) {
        const Poly& wn = bound_eq.omega.num();
        GaussianRational dc = bound_eq.omega.den().constant_value();
        auto parts = wn.coeffs_in_vars({Symbols::u(0), Symbols::u(1)});
        Poly g0p, g1p;
        if (auto f0 = parts.find({1, 0}); f0 != parts.end()) g0p = f0->second;
        if (auto f1 = parts.find({0, 1}); f1 != parts.end()) g1p = f1->second;
        if (g0p.is_constant() && g1p.is_constant()) {
            GaussianRational g0 = g0p.constant_value() / dc;
            GaussianRational g1 = g1p.constant_value() / dc;
            RecurrenceConstraint rc(
                std::vector<GaussianRational>{-g0, -g1, GaussianRational(1)});
            bool tagged = false;
            for (auto& g : out.generators) {
                if (!g.xi.is_zero()) continue;
                if (g.q_coeffs.empty() || g.q_coeffs[0].is_zero()) continue;
                bool pure = true;
                for (size_t j = 1; j < g.q_coeffs.size(); ++j)
                    if (!g.q_coeffs[j].is_zero()) pure = false;
                if (!pure) continue;
                bool solves = true;
                for (long n0 = 0; n0 <= 5 && solves; ++n0) {
                    CoefField lhs = g.q_coeffs[0].eval_exact(n0 + 2) -
                                    CoefField::from_gaussian(g1) * g.q_coeffs[0].eval_exact(n0 + 1) -
                                    CoefField::from_gaussian(g0) * g.q_coeffs[0].eval_exact(n0);
                    if (!lhs.is_zero()) solves = false;
                }
                if (solves) {
                    g.provenance += " [translation-by-solution]";
                    tagged = true;
                }
            }
            if (tagged) {
                out.notes.push_back(
                    "linear homogeneous equation: translation-by-solution family satisfies " +
                    rc.to_string());
                bool have = false;
                for (auto& r : out.recurrences)
                    if (r.coefficients == rc.coefficients) have = true;
                if (!have) out.recurrences.push_back(rc);
            }
        }
    }
    return out;
}

std::optional<SymmetryGenerator> autonomous_shift_symmetry(const DifferenceEquation& eq) {
    if (!eq.omega.derivative(Symbols::n()).is_zero()) return std::nullopt;
    SymmetryGenerator g;
    g.xi = SequenceClosedForm::constant(GaussianRational(1));
    g.provenance = "shift in n (autonomous equation)";
    return g;
}

// --- span comparison ------------------------------------------------------

bool generator_span_equal(const std::vector<SymmetryGenerator>& a,
                          const std::vector<SymmetryGenerator>& b) {
    int dmax = -1;
    for (auto* lst : {&a, &b})
        for (auto& g : *lst) dmax = std::max(dmax, static_cast<int>(g.q_coeffs.size()) - 1);
    const int comps = dmax + 2;  // xi plus q_0..q_dmax
    auto comp_of = [&](const SymmetryGenerator& g, int c) -> SequenceClosedForm {
        if (c == 0) return g.xi;
        size_t j = static_cast<size_t>(c - 1);
        return j < g.q_coeffs.size() ? g.q_coeffs[j] : SequenceClosedForm::zero();
    };
    size_t max_keys = 1;
    for (int c = 0; c < comps; ++c) {
        std::set<std::pair<RootOfUnityScalar, long>> keys;
        for (auto* lst : {&a, &b})
            for (auto& g : *lst)
                for (auto& t : comp_of(g, c).terms()) {
                    if (!std::holds_alternative<CoefField>(t.c))
                        throw ValidationError("span comparison requires exact coefficients");
                    keys.insert({t.lambda, t.deg});
                }
        max_keys = std::max(max_keys, keys.size());
    }
    const size_t pts = std::max(a.size() + b.size() + 1, max_keys);
    auto row_of = [&](const SymmetryGenerator& g) {
        std::vector<CoefField> row;
        row.reserve(static_cast<size_t>(comps) * pts);
        for (int c = 0; c < comps; ++c) {
            SequenceClosedForm s = comp_of(g, c);
            for (size_t t = 0; t < pts; ++t) row.push_back(s.eval_exact(static_cast<long>(t)));
        }
        return row;
    };
    std::vector<std::vector<CoefField>> ra, rb, rab;
    for (auto& g : a) {
        ra.push_back(row_of(g));
        rab.push_back(ra.back());
    }
    for (auto& g : b) {
        rb.push_back(row_of(g));
        rab.push_back(rb.back());
    }
    size_t rka = matrix_rank(std::move(ra));
    size_t rkb = matrix_rank(std::move(rb));
    size_t rkab = matrix_rank(std::move(rab));
    return rka == rkb && rkb == rkab;
}

// --- JSON -----------------------------------------------------------------

namespace {

std::string coef_str(const CoefField& c) {
    if (auto r = coef_to_ratfunc(c)) return r->to_string();
    throw ValidationError("coefficient outside Q(i)(parameters) cannot be serialized");
}

ordered_json term_json(const SeqTerm& t) {
    ordered_json o;
    if (auto* ex = std::get_if<CoefField>(&t.c)) {
        o["c"] = coef_str(*ex);
    } else {
        auto z = std::get<std::complex<double>>(t.c);
        o["c"] = ordered_json{{"re", z.real()}, {"im", z.imag()}};
    }
    if (!t.lambda.scale.is_one()) o["scale"] = t.lambda.scale.to_string();
    o["k"] = t.lambda.k;
    o["m_root"] = t.lambda.m;
    o["deg"] = t.deg;
    return o;
}

CoefField parse_coef(const std::string& s) {
    return CoefField::from_ratfunc(to_rational(parse_expr(s)));
}

SeqTerm term_from_json(const ordered_json& o) {
    SeqTerm t;
    if (!o.contains("c")) throw ValidationError("term is missing its coefficient");
    if (o["c"].is_string()) {
        t.c = SeqCoeff(parse_coef(o["c"].get<std::string>()));
    } else if (o["c"].is_object()) {
        t.c = SeqCoeff(std::complex<double>(o["c"].value("re", 0.0), o["c"].value("im", 0.0)));
    } else {
        throw ValidationError("term coefficient must be a string or an {re, im} object");
    }
    GaussianRational scale(1);
    if (o.contains("scale")) {
        RatFunc r = to_rational(parse_expr(o["scale"].get<std::string>()));
        if (!r.is_constant()) throw ValidationError("term scale must be a constant");
        scale = r.constant_value();
    }
    long k = o.value("k", 0L);
    long m = o.value("m_root", 1L);
    t.lambda = RootOfUnityScalar::make(scale, k, m);
    t.deg = o.value("deg", 0L);
    if (t.deg < 0) throw ValidationError("term degree must be nonnegative");
    return t;
}

}  // namespace

std::string generator_to_json(const SymmetryGenerator& g) {
    ordered_json o;
    CoefField c0, c1;
    for (auto& t : g.xi.terms()) {
        auto* ex = std::get_if<CoefField>(&t.c);
        if (!ex) throw ValidationError("xi with float coefficients cannot be serialized");
        if (t.deg == 0) c0 += *ex;
        else c1 += *ex;
    }
    o["xi"] = ordered_json::array({coef_str(c0), coef_str(c1)});
    ordered_json qs = ordered_json::array();
    for (auto& s : g.q_coeffs) {
        ordered_json terms = ordered_json::array();
        for (auto& t : s.terms()) terms.push_back(term_json(t));
        qs.push_back(terms);
    }
    o["q"] = qs;
    o["provenance"] = g.provenance;
    return o.dump();
}

SymmetryGenerator generator_from_json(const std::string& text) {
    ordered_json o;
    try {
        o = ordered_json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("invalid generator JSON: ") + e.what(), 0);
    }
    if (!o.is_object() || !o.contains("xi") || !o.contains("q"))
        throw ValidationError("generator JSON must contain 'xi' and 'q'");
    if (!o["xi"].is_array() || o["xi"].size() != 2)
        throw ValidationError("'xi' must be a two-element array [xi0, xi1]");
    SequenceClosedForm xi;
    CoefField c0 = parse_coef(o["xi"][0].get<std::string>());
    CoefField c1 = parse_coef(o["xi"][1].get<std::string>());
    if (!c0.is_zero()) xi += SequenceClosedForm::term(SeqCoeff(c0), RootOfUnityScalar::one(), 0);
    if (!c1.is_zero()) xi += SequenceClosedForm::term(SeqCoeff(c1), RootOfUnityScalar::one(), 1);
    std::vector<SequenceClosedForm> q;
    for (auto& arr : o["q"]) {
        SequenceClosedForm s;
        for (auto& t : arr) {
            SeqTerm term = term_from_json(t);
            s += SequenceClosedForm::term(term.c, term.lambda, term.deg);
        }
        q.push_back(std::move(s));
    }
    return make_generator(std::move(xi), std::move(q), o.value("provenance", std::string{}));
}

std::string report_to_json(const VerificationReport& r) {
    ordered_json o;
    o["mode"] = r.mode == VerificationReport::Mode::Symbolic ? "symbolic" : "numeric";
    o["verdict"] = r.pass ? "pass" : "fail";
    o["residual_norm"] = r.residual_norm;
    o["residues_checked"] = r.residues_checked;
    if (r.failing_residue) o["failing_residue"] = *r.failing_residue;
    else o["failing_residue"] = nullptr;
    if (r.witness) {
        o["witness"] = ordered_json{
            {"n", r.witness->n},
            {"u0", {r.witness->u0.real(), r.witness->u0.imag()}},
            {"u1", {r.witness->u1.real(), r.witness->u1.imag()}},
            {"residual", {r.witness->residual_value.real(), r.witness->residual_value.imag()}}};
    } else {
        o["witness"] = nullptr;
    }
    o["detail"] = r.detail;
    return o.dump();
}

}  // namespace dpsym
