#include "doctest.h"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dpsym/expr.hpp"
#include "dpsym/reduce.hpp"
#include "dpsym/symmetry.hpp"

using namespace dpsym;
using ordered_json = nlohmann::ordered_json;

#ifndef DPSYM_FIXTURE_DIR
#define DPSYM_FIXTURE_DIR "tests/fixtures"
#endif

namespace {

DifferenceEquation sum_eq() { return make_equation("-u(0)-u(1)", 2, {}); }
DifferenceEquation neg_eq() { return make_equation("-u(0)", 2, {}); }
DifferenceEquation harmonic_product_eq() {
    return make_equation("-u(0)*u(1)/(u(0)+u(1))", 2, {});
}

SequenceClosedForm one_seq() { return SequenceClosedForm::constant(GaussianRational(1)); }

SequenceClosedForm rou_seq(long k, long m) {
    return SequenceClosedForm::term(SeqCoeff(CoefField::integer(1)),
                                    RootOfUnityScalar::root(k, m), 0);
}

SymmetryGenerator scaling_generator() {
    // Q = u
    return make_generator(SequenceClosedForm::zero(), {SequenceClosedForm::zero(), one_seq()},
                          "test/scaling");
}

SymmetryGenerator translation_generator(long k, long m) {
    // Q = lambda^n with lambda = zeta_m^k
    return make_generator(SequenceClosedForm::zero(), {rou_seq(k, m)}, "test/translation");
}

CoefField sym(const char* name) {
    return CoefField::from_ratfunc(RatFunc::variable(Symbols::intern(name)));
}

CoefField gc(long re) { return CoefField::integer(re); }
CoefField gi() { return CoefField::root_of_unity(1, 4); }
CoefField zeta3(long k = 1) { return CoefField::root_of_unity(k, 3); }

GaussianRational gr(long v) { return GaussianRational(v); }

/// Exact trajectory of a parameter-free second-order equation.
std::vector<CoefField> drive(const DifferenceEquation& eq, const CoefField& a, const CoefField& b,
                             long n_max) {
    std::vector<CoefField> out{a, b};
    for (long n = 2; n <= n_max; ++n) {
        const CoefField& x = out[n - 2];
        const CoefField& y = out[n - 1];
        out.push_back(eq.omega.eval<CoefField>([&](VarId w) -> CoefField {
            if (w == Symbols::u(0)) return x;
            if (w == Symbols::u(1)) return y;
            if (w == Symbols::n()) return CoefField::integer(n - 2);
            return CoefField::from_ratfunc(RatFunc::variable(w));
        }));
    }
    return out;
}

}  // namespace

TEST_CASE("invariants: supported generator shapes map to ratio / translation") {
    DifferenceEquation eq = sum_eq();

    Invariant ratio = invariant_from_generator(eq, scaling_generator());
    CHECK(ratio.kind == InvariantKind::Ratio);
    CHECK(ratio.to_string() == "v(n) = u(n+1)/u(n)");

    Invariant tr = invariant_from_generator(neg_eq(), translation_generator(1, 4));
    CHECK(tr.kind == InvariantKind::Translation);
    CHECK(tr.rho == RootOfUnityScalar::root(1, 4));

    Invariant tr3 = invariant_from_generator(eq, translation_generator(1, 3));
    CHECK(tr3.rho == RootOfUnityScalar::root(1, 3));
}

TEST_CASE("invariants: unsupported generator shapes are rejected") {
    DifferenceEquation eq = sum_eq();

    // quadratic characteristic Q = u^2
    SymmetryGenerator quad = make_generator(
        SequenceClosedForm::zero(),
        {SequenceClosedForm::zero(), SequenceClosedForm::zero(), one_seq()}, "test/quadratic");
    CHECK_THROWS_AS(invariant_from_generator(eq, quad), UnsupportedFamilyError);

    // pure shift generator (xi = 1, Q = 0)
    SymmetryGenerator shift = make_generator(one_seq(), {}, "test/shift");
    CHECK_THROWS_AS(invariant_from_generator(eq, shift), UnsupportedFamilyError);

    // periodic multi-term translation Q = cos(n*pi/2)
    CoefField h = CoefField::from_gaussian(GaussianRational(Rational(1, 2), Rational(0)));
    SequenceClosedForm cosq =
        SequenceClosedForm::term(SeqCoeff(h), RootOfUnityScalar::root(1, 4), 0) +
        SequenceClosedForm::term(SeqCoeff(h), RootOfUnityScalar::root(3, 4), 0);
    SymmetryGenerator multi =
        make_generator(SequenceClosedForm::zero(), {cosq}, "test/multiterm");
    CHECK_THROWS_AS(invariant_from_generator(eq, multi), UnsupportedFamilyError);

    // scaling whose coefficient moves with n: Q = (-1)^n * u
    SymmetryGenerator alt_scaling = make_generator(
        SequenceClosedForm::zero(), {SequenceClosedForm::zero(), rou_seq(1, 2)}, "test/altscale");
    CHECK_THROWS_AS(invariant_from_generator(eq, alt_scaling), UnsupportedFamilyError);

    // mixed constant + linear characteristic
    SymmetryGenerator mixed =
        make_generator(SequenceClosedForm::zero(), {one_seq(), one_seq()}, "test/mixed");
    CHECK_THROWS_AS(invariant_from_generator(eq, mixed), UnsupportedFamilyError);
}

TEST_CASE("reduced map: the two ratio reductions give exact Moebius matrices") {
    Invariant ratio;
    ratio.kind = InvariantKind::Ratio;

    ReducedMap m1 = reduced_map(sum_eq(), ratio);
    REQUIRE(m1.cls == ReducedMap::Class::Moebius);
    CHECK(m1.matrix[0] == gr(-1));
    CHECK(m1.matrix[1] == gr(-1));
    CHECK(m1.matrix[2] == gr(1));
    CHECK(m1.matrix[3] == gr(0));

    ReducedMap m4 = reduced_map(harmonic_product_eq(), ratio);
    REQUIRE(m4.cls == ReducedMap::Class::Moebius);
    CHECK(m4.matrix[0] == gr(0));
    CHECK(m4.matrix[1] == gr(-1));
    CHECK(m4.matrix[2] == gr(1));
    CHECK(m4.matrix[3] == gr(1));
}

TEST_CASE("reduced map: translation over i gives v(n+1) = -i*v(n), not +i") {
    Invariant tr;
    tr.kind = InvariantKind::Translation;
    tr.rho = RootOfUnityScalar::root(1, 4);

    ReducedMap m = reduced_map(neg_eq(), tr);
    REQUIRE(m.cls == ReducedMap::Class::Linear);
    REQUIRE(m.r.terms().size() == 1);
    CHECK(m.s.is_zero());
    CHECK(m.r.eval_exact(0) == -gi());
    CHECK(m.r.eval_exact(7) == -gi());  // constant coefficient
    CHECK(m.r.eval_exact(0) != gi());
}

TEST_CASE("reduced map: translation over zeta_3 eliminates u(0) through 1+rho+rho^2 = 0") {
    Invariant tr;
    tr.kind = InvariantKind::Translation;
    tr.rho = RootOfUnityScalar::root(1, 3);

    ReducedMap m = reduced_map(sum_eq(), tr);
    REQUIRE(m.cls == ReducedMap::Class::Linear);
    CHECK(m.s.is_zero());
    // -(1 + zeta_3) = zeta_3^2
    CHECK(m.r.eval_exact(0) == -(gc(1) + zeta3(1)));
    CHECK(m.r.eval_exact(0) == zeta3(2));
}

TEST_CASE("reduced map: failures to close raise NotClosedError") {
    Invariant ratio;
    ratio.kind = InvariantKind::Ratio;
    // the +c offset breaks homogeneity, so u(0) survives the ratio elimination
    DifferenceEquation offset = make_equation("-u(0)-u(1)+c", 2, {"c"});
    CHECK_THROWS_AS(reduced_map(offset, ratio), NotClosedError);

    Invariant tr;
    tr.kind = InvariantKind::Translation;
    // wrong root for u(n+2) = -u(n): 1 + rho^2 != 0 for rho = zeta_3
    tr.rho = RootOfUnityScalar::root(1, 3);
    CHECK_THROWS_AS(reduced_map(neg_eq(), tr), NotClosedError);
    // Gaussian path: rho = 1 leaves -2*u(0) behind
    tr.rho = RootOfUnityScalar::one();
    CHECK_THROWS_AS(reduced_map(neg_eq(), tr), NotClosedError);
}

TEST_CASE("reduced map: non-Moebius and n-dependent reductions fall back to General") {
    Invariant ratio;
    ratio.kind = InvariantKind::Ratio;

    DifferenceEquation cubic = make_equation("u(1)^3/(u(0)^2+u(1)^2)", 2, {});
    ReducedMap g = reduced_map(cubic, ratio);
    CHECK(g.cls == ReducedMap::Class::General);
    // v(n+1) = v^2/(1+v^2)
    VarId vv = Symbols::intern("v");
    RatFunc v = RatFunc::variable(vv);
    CHECK(g.rhs == v * v / (RatFunc(1) + v * v));

    DifferenceEquation timed = make_equation("n*u(1)^2/u(0)", 2, {});
    ReducedMap gn = reduced_map(timed, ratio);
    CHECK(gn.cls == ReducedMap::Class::General);
    CHECK(gn.rhs == RatFunc::variable(Symbols::n()) * v);
}

TEST_CASE("Moebius powers: closed-form entries match iterated multiplication") {
    Invariant ratio;
    ratio.kind = InvariantKind::Ratio;

    struct Case {
        DifferenceEquation eq;
        bool cube_is_minus_identity;
    };
    Case cases[] = {{sum_eq(), false}, {harmonic_product_eq(), true}};
    for (auto& c : cases) {
        ReducedMap m = reduced_map(c.eq, ratio);
        REQUIRE(m.cls == ReducedMap::Class::Moebius);
        ClosedFormSolution sol = solve_first_order(m, sym("v0"));
        REQUIRE(sol.rep == ClosedFormSolution::Rep::MoebiusPower);
        CHECK(sol.orbit_period == 3);

        // closed-form matrix powers against literal multiplication
        GaussianRational P[4] = {gr(1), gr(0), gr(0), gr(1)};
        for (long n = 0; n <= 12; ++n) {
            for (int e = 0; e < 4; ++e)
                CHECK(sol.power_entries[e].eval_exact(n) == CoefField::from_gaussian(P[e]));
            GaussianRational Q[4] = {P[0] * m.matrix[0] + P[1] * m.matrix[2],
                                     P[0] * m.matrix[1] + P[1] * m.matrix[3],
                                     P[2] * m.matrix[0] + P[3] * m.matrix[2],
                                     P[2] * m.matrix[1] + P[3] * m.matrix[3]};
            for (int e = 0; e < 4; ++e) P[e] = Q[e];
        }
        // cube of the matrix is +-identity (order-3 Moebius orbit either way)
        // eigenvalue content: every entry is built from the primitive cube or
        // sixth roots, i.e. e^(+-2*pi*i/3) scaled eigenvalues
        for (int e = 0; e < 4; ++e)
            for (const SeqTerm& t : sol.power_entries[e].terms()) {
                CHECK(t.lambda.is_unit_modulus());
                CHECK((t.lambda.m == 3 || t.lambda.m == 6 || t.lambda.m == 1));
            }
        (void)c.cube_is_minus_identity;
    }
}

TEST_CASE("Moebius orbit values and poles") {
    Invariant ratio;
    ratio.kind = InvariantKind::Ratio;
    ReducedMap m = reduced_map(sum_eq(), ratio);
    ClosedFormSolution sol = solve_first_order(m, gc(2));
    // v: 2, -3/2, -1/3, 2, ...
    CHECK(sol.value(0) == gc(2));
    CHECK(sol.value(1) == CoefField::from_rational(Rational(-3, 2)));
    CHECK(sol.value(2) == CoefField::from_rational(Rational(-1, 3)));
    CHECK(sol.value(3) == gc(2));
    CHECK(sol.value(4) == CoefField::from_rational(Rational(-3, 2)));

    // v0 = 0 runs into the pole of v -> -1/v - 1 immediately
    ClosedFormSolution atpole = solve_first_order(m, gc(0));
    CHECK_THROWS_AS(atpole.value(1), EvalError);
}

TEST_CASE("Moebius solve falls back to exact lazy iteration on non-cyclotomic eigenvalues") {
    ReducedMap m;
    m.cls = ReducedMap::Class::Moebius;
    m.matrix = {gr(1), gr(1), gr(1), gr(0)};  // v -> (v+1)/v, golden-ratio eigenvalues
    ClosedFormSolution sol = solve_first_order(m, gc(1));
    CHECK(sol.rep == ClosedFormSolution::Rep::Lazy);
    CHECK(sol.validity_notes.find("lazy") != std::string::npos);
    CHECK(sol.value(1) == gc(2));
    CHECK(sol.value(2) == CoefField::from_rational(Rational(3, 2)));
    CHECK(sol.value(3) == CoefField::from_rational(Rational(5, 3)));
    CHECK(sol.value(4) == CoefField::from_rational(Rational(8, 5)));
}

TEST_CASE("linear solve: geometric, forced and resonant cases in closed form") {
    // v(n+1) = i*v(n), v(0) = v0  ->  v(n) = i^n * v0
    ReducedMap geo;
    geo.cls = ReducedMap::Class::Linear;
    geo.r = SequenceClosedForm::constant(GaussianRational(Rational(0), Rational(1)));
    geo.s = SequenceClosedForm::zero();
    ClosedFormSolution g = solve_first_order(geo, sym("v0"));
    REQUIRE(g.rep == ClosedFormSolution::Rep::Exact);
    REQUIRE(g.form.terms().size() == 1);
    CHECK(g.form.terms()[0].lambda == RootOfUnityScalar::root(1, 4));
    CHECK(std::get<CoefField>(g.form.terms()[0].c) == sym("v0"));
    CHECK(g.orbit_period == 4);

    // v(n+1) = i*v(n) + 1, v(0) = 0  ->  partial geometric sums
    ReducedMap forced = geo;
    forced.s = SequenceClosedForm::constant(GaussianRational(1));
    ClosedFormSolution f = solve_first_order(forced, gc(0));
    REQUIRE(f.rep == ClosedFormSolution::Rep::Exact);
    CHECK(f.value(0) == gc(0));
    CHECK(f.value(1) == gc(1));
    CHECK(f.value(2) == gc(1) + gi());
    CHECK(f.value(3) == gi());
    CHECK(f.value(4) == gc(0));  // (i^4 - 1)/(i - 1) = 0

    // v(n+1) = v(n) + c  ->  resonance with the unit ratio: v(n) = v0 + c*n
    ReducedMap res;
    res.cls = ReducedMap::Class::Linear;
    res.r = SequenceClosedForm::constant(GaussianRational(1));
    res.s = SequenceClosedForm::constant(GaussianRational(3));
    ClosedFormSolution h = solve_first_order(res, sym("v0"));
    REQUIRE(h.rep == ClosedFormSolution::Rep::Exact);
    CHECK(h.value(5) == sym("v0") + gc(15));
    bool has_deg1 = false;
    for (const SeqTerm& t : h.form.terms())
        if (t.deg == 1) has_deg1 = true;
    CHECK(has_deg1);

    // a parameter-valued ratio has no root-of-unity decomposition: lazy
    ReducedMap par;
    par.cls = ReducedMap::Class::Linear;
    par.r = SequenceClosedForm::term(SeqCoeff(sym("a")), RootOfUnityScalar::one(), 0);
    par.s = SequenceClosedForm::zero();
    ClosedFormSolution l = solve_first_order(par, gc(1));
    CHECK(l.rep == ClosedFormSolution::Rep::Lazy);
    CHECK(l.validity_notes.find("not a scaled root of unity") != std::string::npos);
    CHECK(l.value(3) == sym("a").pow(3));
}

TEST_CASE("reconstruction: fixed points of the order-3 Moebius map give pure phases") {
    DifferenceEquation eq = sum_eq();
    Invariant inv = invariant_from_generator(eq, scaling_generator());
    ReducedMap m = reduced_map(eq, inv);
    CoefField u0 = sym("u0");

    for (long k = 1; k <= 2; ++k) {
        ClosedFormSolution vs = solve_first_order(m, zeta3(k));
        for (long n = 0; n <= 5; ++n) CHECK(vs.value(n) == zeta3(k));  // fixed point
        ClosedFormSolution us = reconstruct(eq, inv, vs, u0, zeta3(k) * u0);
        REQUIRE(us.rep == ClosedFormSolution::Rep::Exact);
        REQUIRE(us.form.terms().size() == 1);
        CHECK(us.form.terms()[0].lambda == RootOfUnityScalar::root(k, 3));
        CHECK(std::get<CoefField>(us.form.terms()[0].c) == u0);
        for (long n = 0; n <= 30; ++n) CHECK(us.value(n) == zeta3((k * n) % 3) * u0);
    }
}

TEST_CASE("reconstruction: generic ratio data collapses to an exact period-3 closed form") {
    DifferenceEquation eq = sum_eq();
    Invariant inv = invariant_from_generator(eq, scaling_generator());
    ReducedMap m = reduced_map(eq, inv);
    ClosedFormSolution vs = solve_first_order(m, gc(2));
    ClosedFormSolution us = reconstruct(eq, inv, vs, gc(1), gc(2));
    REQUIRE(us.rep == ClosedFormSolution::Rep::Exact);
    CHECK(us.orbit_period == 3);
    std::vector<CoefField> ref = drive(eq, gc(1), gc(2), 8);
    for (long n = 0; n <= 8; ++n) CHECK(us.value(n) == ref[n]);
    CHECK(us.value(2) == gc(-3));

    DifferenceEquation eq4 = harmonic_product_eq();
    ReducedMap m4 = reduced_map(eq4, inv);
    ClosedFormSolution vs4 = solve_first_order(m4, gc(2));
    ClosedFormSolution us4 = reconstruct(eq4, inv, vs4, gc(1), gc(2));
    REQUIRE(us4.rep == ClosedFormSolution::Rep::Exact);
    CHECK(us4.orbit_period == 3);
    std::vector<CoefField> ref4 = drive(eq4, gc(1), gc(2), 8);
    for (long n = 0; n <= 8; ++n) CHECK(us4.value(n) == ref4[n]);
    CHECK(us4.value(2) == CoefField::from_rational(Rational(-2, 3)));
}

TEST_CASE("reconstruction: translation over i rebuilds c1*i^n + c2*(-i)^n exactly") {
    DifferenceEquation eq = neg_eq();
    Invariant inv = invariant_from_generator(eq, translation_generator(1, 4));
    ReducedMap m = reduced_map(eq, inv);
    CoefField u0 = sym("u0"), u1 = sym("u1");
    CoefField v0 = u1 - gi() * u0;

    ClosedFormSolution vs = solve_first_order(m, v0);
    REQUIRE(vs.rep == ClosedFormSolution::Rep::Exact);
    REQUIRE(vs.form.terms().size() == 1);
    CHECK(vs.form.terms()[0].lambda == RootOfUnityScalar::root(3, 4));  // ratio -i

    ClosedFormSolution us = reconstruct(eq, inv, vs, u0, u1);
    REQUIRE(us.rep == ClosedFormSolution::Rep::Exact);
    REQUIRE(us.form.terms().size() == 2);
    CoefField halfc = CoefField::from_rational(Rational(1, 2));
    for (const SeqTerm& t : us.form.terms()) {
        const CoefField& c = std::get<CoefField>(t.c);
        if (t.lambda == RootOfUnityScalar::root(1, 4))
            CHECK(c == (u0 - gi() * u1) * halfc);
        else {
            CHECK(t.lambda == RootOfUnityScalar::root(3, 4));
            CHECK(c == (u0 + gi() * u1) * halfc);
        }
    }
    std::vector<CoefField> ref = drive(eq, u0, u1, 30);
    for (long n = 0; n <= 30; ++n) CHECK(us.value(n) == ref[n]);
}

TEST_CASE("reconstruction: the +i first-order map contradicts u(n+2) = -u(n)") {
    // The correct reduced ratio is -i.  Feeding the +i variant through the
    // same reconstruction machinery must fail the 30-step equation check:
    // resonance forces a linear-in-n term that the dynamics cannot carry.
    DifferenceEquation eq = neg_eq();
    Invariant inv = invariant_from_generator(eq, translation_generator(1, 4));
    CoefField u0 = sym("u0"), u1 = sym("u1");
    CoefField v0 = u1 - gi() * u0;

    ReducedMap wrong;
    wrong.cls = ReducedMap::Class::Linear;
    wrong.r = SequenceClosedForm::constant(GaussianRational(Rational(0), Rational(1)));  // +i
    wrong.s = SequenceClosedForm::zero();
    ClosedFormSolution vs = solve_first_order(wrong, v0);
    REQUIRE(vs.rep == ClosedFormSolution::Rep::Exact);
    CHECK(vs.form.terms()[0].lambda == RootOfUnityScalar::root(1, 4));

    CHECK_THROWS_AS(reconstruct(eq, inv, vs, u0, u1), ValidationError);
}

TEST_CASE("reconstruction: translation over zeta_3 rebuilds the dP-I zero flow") {
    DifferenceEquation eq = sum_eq();
    Invariant inv = invariant_from_generator(eq, translation_generator(1, 3));
    ReducedMap m = reduced_map(eq, inv);
    CoefField u0 = sym("u0"), u1 = sym("u1");
    CoefField v0 = u1 - zeta3() * u0;
    ClosedFormSolution vs = solve_first_order(m, v0);
    REQUIRE(vs.rep == ClosedFormSolution::Rep::Exact);
    ClosedFormSolution us = reconstruct(eq, inv, vs, u0, u1);
    REQUIRE(us.rep == ClosedFormSolution::Rep::Exact);
    std::vector<CoefField> ref = drive(eq, u0, u1, 30);
    for (long n = 0; n <= 30; ++n) CHECK(us.value(n) == ref[n]);
}

TEST_CASE("reconstruction: guards on singular and inconsistent data") {
    DifferenceEquation eq = sum_eq();
    Invariant inv = invariant_from_generator(eq, scaling_generator());
    ReducedMap m = reduced_map(eq, inv);
    ClosedFormSolution vs = solve_first_order(m, gc(2));

    CHECK_THROWS_AS(reconstruct(eq, inv, vs, gc(0), gc(2)), SingularInitialDataError);
    // v-solution starting at 2 cannot match data with u1/u0 = 3
    CHECK_THROWS_AS(reconstruct(eq, inv, vs, gc(1), gc(3)), ValidationError);
}

TEST_CASE("reconstruction: a lazy v-solution still drives an exact lazy product") {
    DifferenceEquation eq = sum_eq();
    Invariant inv = invariant_from_generator(eq, scaling_generator());
    // classify the same map as General to force the lazy route
    ReducedMap gm;
    gm.cls = ReducedMap::Class::General;
    gm.vvar = Symbols::intern("v");
    gm.rhs = to_rational(parse_expr("-1/v - 1"));
    ClosedFormSolution vs = solve_first_order(gm, gc(2));
    CHECK(vs.rep == ClosedFormSolution::Rep::Lazy);
    ClosedFormSolution us = reconstruct(eq, inv, vs, gc(1), gc(2));
    CHECK(us.rep == ClosedFormSolution::Rep::Lazy);
    CHECK(!us.validity_notes.empty());
    std::vector<CoefField> ref = drive(eq, gc(1), gc(2), 10);
    for (long n = 0; n <= 10; ++n) CHECK(us.value(n) == ref[n]);
}

TEST_CASE("displays: exponential and trig renderings of a reconstruction") {
    DifferenceEquation eq = neg_eq();
    Invariant inv = invariant_from_generator(eq, translation_generator(1, 4));
    ReducedMap m = reduced_map(eq, inv);
    CoefField u0 = gc(1), u1 = gc(0);
    ClosedFormSolution vs = solve_first_order(m, u1 - gi() * u0);
    ClosedFormSolution us = reconstruct(eq, inv, vs, u0, u1);
    // u(n) = cos(n*pi/2): coefficients 1/2 on both quarter phases
    std::string ex = us.display_exponential();
    CHECK(ex.find("exp(2*pi*i*1*n/4)") != std::string::npos);
    CHECK(ex.find("exp(2*pi*i*3*n/4)") != std::string::npos);
    std::string tr = us.display_trig();
    CHECK(tr.find("cos(2*pi*1*n/4)") != std::string::npos);
    CHECK(tr.find("sin") == std::string::npos);  // purely even combination
}

TEST_CASE("audit: the i^(n-1) bracket formula matches the dynamics but not its own data") {
    DifferenceEquation eq = neg_eq();
    auto fs = builtin_solution_formulas("dp2_zero_closed_form");
    REQUIRE(fs.size() == 1);
    AuditReport rep = audit_solution_formula(eq, fs[0], 30);
    CHECK(rep.formula_id == "dp2_zero_closed_form");
    CHECK(rep.branch == "-");
    CHECK(rep.verdict == "mismatch");
    CHECK_FALSE(rep.initial_data.match);
    CHECK(rep.initial_data.first_fail == 0);
    CHECK(rep.equation.match);
    CHECK_FALSE(rep.equation.first_fail.has_value());
    CHECK(rep.first_fail_n == 0);
    CHECK(rep.max_abs_err == doctest::Approx(2.0 * std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("audit: both branches of the multivalued-power formula") {
    DifferenceEquation eq = sum_eq();
    auto fs = builtin_solution_formulas("dp1_zero_multivalued_form");
    REQUIRE(fs.size() == 2);

    AuditReport pr = audit_solution_formula(eq, fs[0], 30);
    CHECK(pr.branch == "principal");
    CHECK(pr.verdict == "mismatch");
    CHECK_FALSE(pr.initial_data.match);
    CHECK(pr.initial_data.first_fail == 0);
    CHECK(pr.equation.match);  // the principal branch follows the dynamics exactly
    CHECK(pr.first_fail_n == 0);
    CHECK(pr.max_abs_err == doctest::Approx(2.0 * std::sqrt(3.0)).epsilon(1e-12));

    AuditReport cr = audit_solution_formula(eq, fs[1], 30);
    CHECK(cr.branch == "conjugate");
    CHECK(cr.verdict == "mismatch");
    CHECK_FALSE(cr.initial_data.match);
    CHECK(cr.initial_data.first_fail == 0);
    CHECK_FALSE(cr.equation.match);  // the conjugate branch breaks the recurrence
    CHECK(cr.equation.first_fail == 2);
    CHECK(cr.first_fail_n == 0);
    CHECK(cr.max_abs_err == doctest::Approx(std::sqrt(21.0)).epsilon(1e-12));
}

TEST_CASE("audit: the ceiling-exponent formula diverges from its equation") {
    DifferenceEquation eq = harmonic_product_eq();
    auto fs = builtin_solution_formulas("dp4_zero_ceiling_form");
    REQUIRE(fs.size() == 1);
    AuditReport rep = audit_solution_formula(eq, fs[0], 30);
    CHECK(rep.verdict == "mismatch");
    CHECK_FALSE(rep.initial_data.match);
    CHECK(rep.initial_data.first_fail == 0);
    CHECK_FALSE(rep.equation.match);
    CHECK(rep.equation.first_fail == 2);
    CHECK(rep.first_fail_n == 0);
    // |f(30) - sim(30)| = 2^28 - 1/4 at the documented sample
    CHECK(rep.max_abs_err == doctest::Approx(268435455.75).epsilon(1e-12));
}

TEST_CASE("audit: formula values align with spot-checked points") {
    auto fs = builtin_solution_formulas("dp4_zero_ceiling_form");
    // at u0 = 1, u1 = 2 the formula runs -1/4, 1/2, -1, 2, -4, ...
    auto at = [&](long n) {
        return fs[0].value(n).eval_complex([](VarId v) -> std::complex<double> {
            std::string nm = Symbols::name(v);
            if (nm == "u0") return {1.0, 0.0};
            if (nm == "u1") return {2.0, 0.0};
            throw EvalError("unbound " + nm);
        });
    };
    CHECK(at(0).real() == doctest::Approx(-0.25));
    CHECK(at(1).real() == doctest::Approx(0.5));
    CHECK(at(2).real() == doctest::Approx(-1.0));
    CHECK(at(3).real() == doctest::Approx(2.0));
    CHECK(at(4).real() == doctest::Approx(-4.0));

    auto f2 = builtin_solution_formulas("dp2_zero_closed_form");
    // f(0) = -u0 - i*u1, f(1) = 2*(u1 - i*u0)
    CHECK(f2[0].value(0) == -sym("u0") - gi() * sym("u1"));
    CHECK(f2[0].value(1) == (sym("u1") - gi() * sym("u0")) * gc(2));

    auto f1 = builtin_solution_formulas("dp1_zero_multivalued_form");
    // principal: f(0) = zeta^2*u1 - u0, f(1) = 2*(u1 - zeta*u0)
    CHECK(f1[0].value(0) == zeta3(2) * sym("u1") - sym("u0"));
    CHECK(f1[0].value(1) == (sym("u1") - zeta3() * sym("u0")) * gc(2));
    // conjugate: f(0) = zeta*u1 - zeta^2*u0, f(1) = (u1 - zeta*u0)*(1 - zeta)
    CHECK(f1[1].value(0) == zeta3() * sym("u1") - zeta3(2) * sym("u0"));
    CHECK(f1[1].value(1) == (sym("u1") - zeta3() * sym("u0")) * (gc(1) - zeta3()));

    CHECK_THROWS_AS(builtin_solution_formulas("no_such_formula"), ValidationError);
}

TEST_CASE("audit: verdicts are closed under conjugating the formula") {
    struct Row {
        DifferenceEquation eq;
        std::string id;
    };
    std::vector<Row> rows;
    rows.push_back({sum_eq(), "dp1_zero_multivalued_form"});
    rows.push_back({neg_eq(), "dp2_zero_closed_form"});
    rows.push_back({harmonic_product_eq(), "dp4_zero_ceiling_form"});
    for (auto& row : rows) {
        for (const SolutionFormula& f : builtin_solution_formulas(row.id)) {
            AuditReport a = audit_solution_formula(row.eq, f, 20);
            AuditReport b = audit_solution_formula(row.eq, conjugate_formula(f), 20);
            CHECK(b.branch == f.branch + "-conjugated");
            CHECK(a.verdict == b.verdict);
            CHECK(a.initial_data.match == b.initial_data.match);
            CHECK(a.initial_data.first_fail == b.initial_data.first_fail);
            CHECK(a.equation.match == b.equation.match);
            CHECK(a.equation.first_fail == b.equation.first_fail);
            CHECK(a.max_abs_err == doctest::Approx(b.max_abs_err).epsilon(1e-9));
        }
    }
}

TEST_CASE("audit: conj_exact is an involutive field embedding") {
    CoefField x = zeta3() * sym("a") + gi() * gc(3) + CoefField::from_rational(Rational(5, 7));
    CoefField y = zeta3(2) * sym("b") - gi();
    CHECK(conj_exact(conj_exact(x)) == x);
    CHECK(conj_exact(x + y) == conj_exact(x) + conj_exact(y));
    CHECK(conj_exact(x * y) == conj_exact(x) * conj_exact(y));
    CHECK(conj_exact(gi()) == -gi());
    CHECK(conj_exact(zeta3()) == zeta3(2));
}

TEST_CASE("audit reports: golden JSON reproduction is bit-exact") {
    std::ifstream in(std::string(DPSYM_FIXTURE_DIR) + "/audit_golden.json");
    REQUIRE(in.good());
    ordered_json golden = ordered_json::parse(in);
    REQUIRE(golden.contains("reports"));

    std::map<std::string, AuditReport> fresh;
    for (const SolutionFormula& f : builtin_solution_formulas("dp1_zero_multivalued_form"))
        fresh.emplace(f.id + "/" + f.branch, audit_solution_formula(sum_eq(), f, 30));
    for (const SolutionFormula& f : builtin_solution_formulas("dp2_zero_closed_form"))
        fresh.emplace(f.id + "/" + f.branch, audit_solution_formula(neg_eq(), f, 30));
    for (const SolutionFormula& f : builtin_solution_formulas("dp4_zero_ceiling_form"))
        fresh.emplace(f.id + "/" + f.branch,
                      audit_solution_formula(harmonic_product_eq(), f, 30));

    REQUIRE(golden["reports"].size() == fresh.size());
    for (auto& entry : golden["reports"].items()) {
        const std::string key =
            entry.value()["formula_id"].get<std::string>() + "/" +
            entry.value()["branch"].get<std::string>();
        REQUIRE(fresh.count(key) == 1);
        ordered_json regenerated = ordered_json::parse(fresh.at(key).to_json());
        CHECK(regenerated == entry.value());
        CHECK(regenerated.dump(2) == entry.value().dump(2));
    }

    // required keys in the serialized report
    std::string one = fresh.begin()->second.to_json();
    for (const char* key :
         {"formula_id", "branch", "verdict", "first_fail_n", "max_abs_err", "range"})
        CHECK(one.find(std::string("\"") + key + "\"") != std::string::npos);
}
