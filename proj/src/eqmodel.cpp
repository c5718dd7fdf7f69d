#include "dpsym/eqmodel.hpp"

#include "dpsym/expr.hpp"
#include "dpsym/symbols.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dpsym {

namespace {

bool is_declared(VarId v, const std::vector<VarId>& params) {
    return std::find(params.begin(), params.end(), v) != params.end();
}

/// lhs - rhs as a polynomial over the parameters (numerator of the
/// difference; the rational-function denominator never vanishes).
Poly constraint_poly(const std::string& text, std::size_t split, std::size_t op_len,
                     const std::vector<VarId>& params) {
    std::string l = text.substr(0, split);
    std::string r = text.substr(split + op_len);
    RatFunc diff = to_rational(parse_expr(l)) - to_rational(parse_expr(r));
    for (VarId v : diff.vars())
        if (!is_declared(v, params))
            throw ValidationError("assumption '" + text + "' uses undeclared symbol '" +
                                  Symbols::name(v) + "'");
    return diff.num();
}

/// Same polynomial up to a nonzero constant factor?
bool proportional(const Poly& p, const Poly& q) {
    if (p.is_zero() || q.is_zero()) return p.is_zero() && q.is_zero();
    return p.scaled(q.leading().second) == q.scaled(p.leading().second);
}

}  // namespace

Assumption parse_assumption(const std::string& text, const std::vector<VarId>& params) {
    auto neq = text.find("!=");
    if (neq != std::string::npos)
        return Assumption{constraint_poly(text, neq, 2, params), false, text};
    auto eq = text.find('=');
    if (eq == std::string::npos)
        throw ValidationError("assumption '" + text + "' has no '=' or '!='");
    return Assumption{constraint_poly(text, eq, 1, params), true, text};
}

std::optional<GaussianRational> DifferenceEquation::pinned_value(VarId param) const {
    for (auto& a : assumptions) {
        if (!a.is_equality) continue;
        // Match c*param - c*value = 0.
        if (a.lhs.degree_in(param) != 1) continue;
        auto by_power = a.lhs.coeffs_in(param);
        if (by_power.size() != 2) continue;
        if (!by_power[0].is_constant() || !by_power[1].is_constant()) continue;
        GaussianRational slope = by_power[1].constant_value();
        if (slope.is_zero()) continue;
        return -(by_power[0].constant_value() / slope);
    }
    return std::nullopt;
}

DifferenceEquation make_equation(const std::string& omega_text, int p,
                                 const std::vector<std::string>& params,
                                 const std::vector<std::string>& assumptions) {
    if (p < 1) throw ValidationError("equation order must be positive");
    DifferenceEquation eq;
    eq.order = p;
    for (auto& name : params) eq.parameters.push_back(Symbols::intern(name));

    eq.omega = to_rational(parse_expr(omega_text));
    for (VarId v : eq.omega.vars()) {
        if (v == Symbols::n()) continue;
        if (Symbols::is_u(v)) {
            long k = Symbols::u_index(v);
            if (k < 0 || k >= p)
                throw ValidationError("omega refers to u(" + std::to_string(k) +
                                      ") but the order is " + std::to_string(p));
            continue;
        }
        if (!is_declared(v, eq.parameters))
            throw ValidationError("omega uses undeclared symbol '" + Symbols::name(v) + "'");
    }

    for (auto& text : assumptions) eq.assumptions.push_back(parse_assumption(text, eq.parameters));
    check_assumption_consistency(eq.assumptions);
    return eq;
}

void check_assumption_consistency(const std::vector<Assumption>& assumptions) {
    for (auto& a : assumptions) {
        if (a.is_equality && !a.lhs.is_zero() && a.lhs.is_constant())
            throw ValidationError("assumption '" + a.text + "' is identically false");
        if (!a.is_equality && a.lhs.is_zero())
            throw ValidationError("assumption '" + a.text + "' is identically false");
    }
    for (auto& a : assumptions)
        for (auto& b : assumptions) {
            if (a.is_equality == b.is_equality) continue;
            if (a.is_equality && proportional(a.lhs, b.lhs))
                throw ValidationError("assumptions '" + a.text + "' and '" + b.text +
                                      "' contradict each other");
        }
}

std::string entry_flag_name(EntryFlag f) {
    switch (f) {
        case EntryFlag::Ok: return "ok";
        case EntryFlag::Singular: return "singular";
        default: return "post-singular";
    }
}

namespace {

template <class V>
struct Numerics;

template <>
struct Numerics<GaussianRational> {
    static GaussianRational from_long(long v) { return GaussianRational(v); }
    static bool singular(const GaussianRational& den, const GaussianRational&, double) {
        return den.is_zero();
    }
    static GaussianRational div(const GaussianRational& n, const GaussianRational& d) {
        return n / d;
    }
};

template <>
struct Numerics<std::complex<double>> {
    static std::complex<double> from_long(long v) { return {static_cast<double>(v), 0.0}; }
    static bool singular(const std::complex<double>& den, const std::complex<double>& num,
                         double tol) {
        return std::abs(den) < tol * (1.0 + std::abs(num));
    }
    static std::complex<double> div(const std::complex<double>& n,
                                    const std::complex<double>& d) {
        return n / d;
    }
};

template <class V>
TrajectoryT<V> simulate_impl(const DifferenceEquation& eq, const std::map<VarId, V>& param_values,
                             const std::vector<V>& init, long n0, long steps, double tol) {
    const std::size_t p = static_cast<std::size_t>(eq.order);
    if (init.size() != p)
        throw ValidationError("initial data must list exactly " + std::to_string(eq.order) +
                              " values");
    if (steps < 0) throw ValidationError("step count must be nonnegative");
    for (VarId v : eq.omega.vars()) {
        if (v == Symbols::n() || Symbols::is_u(v)) continue;
        if (!param_values.count(v))
            throw EvalError("unbound parameter '" + Symbols::name(v) + "'");
    }

    TrajectoryT<V> out;
    out.n0 = n0;
    const std::size_t total = static_cast<std::size_t>(steps);
    bool dead = false;
    for (std::size_t j = 0; j < total; ++j) {
        if (j < p) {
            out.values.push_back(init[j]);
            out.flags.push_back(EntryFlag::Ok);
            continue;
        }
        if (dead) {
            out.values.push_back(V{});
            out.flags.push_back(EntryFlag::PostSingular);
            continue;
        }
        long n = n0 + static_cast<long>(j) - eq.order;
        auto lookup = [&](VarId v) -> V {
            if (v == Symbols::n()) return Numerics<V>::from_long(n);
            if (Symbols::is_u(v)) {
                std::size_t base = j - p + static_cast<std::size_t>(Symbols::u_index(v));
                return out.values[base];
            }
            return param_values.at(v);
        };
        V num = eq.omega.num().template eval<V>(lookup);
        V den = eq.omega.den().template eval<V>(lookup);
        if (Numerics<V>::singular(den, num, tol)) {
            out.values.push_back(V{});
            out.flags.push_back(EntryFlag::Singular);
            dead = true;
            continue;
        }
        out.values.push_back(Numerics<V>::div(num, den));
        out.flags.push_back(EntryFlag::Ok);
    }
    return out;
}

}  // namespace

ExactTrajectory simulate_exact(const DifferenceEquation& eq,
                               const std::map<VarId, GaussianRational>& param_values,
                               const std::vector<GaussianRational>& init, long n0, long steps) {
    return simulate_impl<GaussianRational>(eq, param_values, init, n0, steps, 0.0);
}

FloatTrajectory simulate_float(const DifferenceEquation& eq,
                               const std::map<VarId, std::complex<double>>& param_values,
                               const std::vector<std::complex<double>>& init, long n0, long steps,
                               double singular_tol) {
    return simulate_impl<std::complex<double>>(eq, param_values, init, n0, steps, singular_tol);
}

namespace {

TransformResult transform_reciprocal(const DifferenceEquation& eq) {
    if (eq.omega.is_zero())
        throw ValidationError("reciprocal transform of the identically-zero map");
    std::map<VarId, RatFunc> bind;
    for (int k = 0; k < eq.order; ++k)
        bind[Symbols::u(k)] = RatFunc::variable(Symbols::u(k)).inverse();
    TransformResult out;
    out.equation = eq;
    out.equation.omega = eq.omega.substitute(bind).inverse();
    out.forward.exact = [](const GaussianRational& u) {
        if (u.is_zero()) throw EvalError("reciprocal of zero");
        return u.inverse();
    };
    out.forward.numeric = [](std::complex<double> u, const ParamLookup&) { return 1.0 / u; };
    out.backward = out.forward;  // self-inverse
    return out;
}

TransformResult transform_affine(const DifferenceEquation& eq, const GaussianRational& s,
                                 const GaussianRational& t) {
    std::map<VarId, RatFunc> bind;
    RatFunc rs{s}, rt{t};
    for (int k = 0; k < eq.order; ++k)
        bind[Symbols::u(k)] = (RatFunc::variable(Symbols::u(k)) - rt) / rs;
    TransformResult out;
    out.equation = eq;
    out.equation.omega = eq.omega.substitute(bind) * rs + rt;
    out.forward.exact = [s, t](const GaussianRational& u) { return s * u + t; };
    auto sc = s.to_complex();
    auto tc = t.to_complex();
    out.forward.numeric = [sc, tc](std::complex<double> u, const ParamLookup&) {
        return sc * u + tc;
    };
    out.backward.exact = [s, t](const GaussianRational& w) { return (w - t) / s; };
    out.backward.numeric = [sc, tc](std::complex<double> w, const ParamLookup&) {
        return (w - tc) / sc;
    };
    return out;
}

TransformResult transform_log(const DifferenceEquation& eq) {
    // omega must be C * prod u(k)^e_k with C a constant in the parameters:
    // single terms on top and bottom, no n.
    const Poly& num = eq.omega.num();
    const Poly& den = eq.omega.den();
    if (eq.omega.is_zero() || num.terms().size() != 1 || den.terms().size() != 1)
        throw NotLogLinearError("omega is not a single monomial ratio");
    if (num.degree_in(Symbols::n()) > 0 || den.degree_in(Symbols::n()) > 0)
        throw NotLogLinearError("omega's monomial factor depends on n");

    auto strip_u = [](const std::pair<const Monomial, GaussianRational>& term) {
        Poly out{term.second};
        for (auto& [v, e] : term.first.exps)
            if (!Symbols::is_u(v)) out = out * Poly::variable(v, e);
        return out;
    };
    auto u_exponent = [](const Monomial& m, VarId v) {
        return static_cast<long>(m.degree_in(v));
    };

    const auto& nt = *num.terms().begin();
    const auto& dt = *den.terms().begin();
    RatFunc constant{strip_u(nt), strip_u(dt)};

    TransformResult out;
    out.equation = eq;
    RatFunc image;
    long exp_sum = 0;
    for (int k = 0; k < eq.order; ++k) {
        long e = u_exponent(nt.first, Symbols::u(k)) - u_exponent(dt.first, Symbols::u(k));
        exp_sum += e;
        if (e != 0)
            image += RatFunc(GaussianRational(e)) * RatFunc::variable(Symbols::u(k));
    }
    out.equation.omega = image;

    LogOffset offset;
    offset.constant = constant;
    if (constant.is_constant() && constant.constant_value().is_one()) {
        offset.factor = Rational(0);
    } else if (exp_sum == 1) {
        throw NotLogLinearError("additive constant cannot be normalized away");
    } else {
        offset.factor = Rational(1) / Rational(1 - exp_sum);
    }
    out.log_offset = offset;

    auto delta = [offset](const ParamLookup& params) -> std::complex<double> {
        if (offset.factor == 0) return {0.0, 0.0};
        std::complex<double> c = offset.constant.eval<std::complex<double>>(
            [&](VarId v) { return params(v); });
        return rat_to_double(offset.factor) * std::log(c);
    };
    out.forward.numeric = [delta](std::complex<double> u, const ParamLookup& params) {
        return std::log(u) - delta(params);
    };
    out.backward.numeric = [delta](std::complex<double> w, const ParamLookup& params) {
        return std::exp(w + delta(params));
    };
    return out;
}

}  // namespace

TransformResult transform_equation(const DifferenceEquation& eq, const TransformSpec& t) {
    switch (t.kind) {
        case TransformSpec::Kind::Reciprocal: return transform_reciprocal(eq);
        case TransformSpec::Kind::Log: return transform_log(eq);
        default: return transform_affine(eq, t.scale, t.shift);
    }
}

bool is_linear_homogeneous(const DifferenceEquation& eq) {
    if (!eq.omega.is_poly() || eq.omega.is_zero()) return false;
    for (auto& [mono, coeff] : eq.omega.num().terms()) {
        long u_degree = 0;
        for (auto& [v, e] : mono.exps)
            if (Symbols::is_u(v)) u_degree += e;
        if (u_degree != 1) return false;
    }
    return true;
}

// --- import/export --------------------------------------------------------

namespace {

using ordered_json = nlohmann::ordered_json;

template <class V>
std::string csv_impl(const TrajectoryT<V>& t, void (*emit)(std::ostringstream&, const V&)) {
    std::ostringstream out;
    out << "n,re,im,flag\n";
    for (std::size_t j = 0; j < t.values.size(); ++j) {
        out << (t.n0 + static_cast<long>(j)) << ",";
        emit(out, t.values[j]);
        out << "," << entry_flag_name(t.flags[j]) << "\n";
    }
    return out.str();
}

void emit_exact(std::ostringstream& out, const GaussianRational& v) {
    out << rat_to_string(v.re) << "," << rat_to_string(v.im);
}

void emit_float(std::ostringstream& out, const std::complex<double>& v) {
    out.precision(17);
    out << v.real() << "," << v.imag();
}

}  // namespace

std::string trajectory_to_csv(const ExactTrajectory& t) { return csv_impl(t, emit_exact); }
std::string trajectory_to_csv(const FloatTrajectory& t) { return csv_impl(t, emit_float); }

std::string trajectory_to_json(const ExactTrajectory& t) {
    ordered_json arr = ordered_json::array();
    for (std::size_t j = 0; j < t.values.size(); ++j) {
        ordered_json row;
        row["n"] = t.n0 + static_cast<long>(j);
        row["re"] = rat_to_string(t.values[j].re);
        row["im"] = rat_to_string(t.values[j].im);
        row["flag"] = entry_flag_name(t.flags[j]);
        arr.push_back(row);
    }
    return arr.dump(2);
}

std::string trajectory_to_json(const FloatTrajectory& t) {
    ordered_json arr = ordered_json::array();
    for (std::size_t j = 0; j < t.values.size(); ++j) {
        ordered_json row;
        row["n"] = t.n0 + static_cast<long>(j);
        row["re"] = t.values[j].real();
        row["im"] = t.values[j].imag();
        row["flag"] = entry_flag_name(t.flags[j]);
        arr.push_back(row);
    }
    return arr.dump(2);
}

EquationImport equation_from_json(const std::string& json_text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(json_text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("equation JSON: ") + e.what(), 0);
    }
    if (!doc.is_object() || !doc.contains("omega") || !doc.contains("p"))
        throw ValidationError("equation JSON needs 'omega' and 'p'");

    std::vector<std::string> params;
    std::map<std::string, GaussianRational> bound;
    if (doc.contains("params")) {
        for (auto& [name, value] : doc["params"].items()) {
            params.push_back(name);
            if (value.is_null()) continue;
            if (value.is_number_integer()) {
                bound.emplace(name, GaussianRational(value.get<long>()));
            } else if (value.is_number()) {
                bound.emplace(name,
                              GaussianRational(rational_from_decimal(value.dump())));
            } else if (value.is_string()) {
                RatFunc r = to_rational(parse_expr(value.get<std::string>()));
                if (!r.is_constant())
                    throw ValidationError("parameter '" + name + "' value is not constant");
                bound.emplace(name, r.constant_value());
            } else {
                throw ValidationError("parameter '" + name + "' value has unsupported type");
            }
        }
    }
    std::vector<std::string> assumptions;
    if (doc.contains("assumptions"))
        for (auto& a : doc["assumptions"]) assumptions.push_back(a.get<std::string>());

    EquationImport out;
    out.equation =
        make_equation(doc["omega"].get<std::string>(), doc["p"].get<int>(), params, assumptions);
    for (auto& [name, value] : bound) out.bound_values.emplace(Symbols::intern(name), value);
    return out;
}

std::string equation_to_json(const DifferenceEquation& eq) {
    ordered_json doc;
    doc["omega"] = eq.omega.to_string();
    doc["p"] = eq.order;
    ordered_json params = ordered_json::object();
    for (VarId v : eq.parameters) params[Symbols::name(v)] = nullptr;
    doc["params"] = params;
    ordered_json assumptions = ordered_json::array();
    for (auto& a : eq.assumptions) assumptions.push_back(a.text);
    doc["assumptions"] = assumptions;
    return doc.dump(2);
}

}  // namespace dpsym
