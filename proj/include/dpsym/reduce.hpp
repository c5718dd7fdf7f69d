#pragma once

// Order reduction through invariants of one-parameter symmetry groups.  Two
// invariant families are mechanized: the ratio invariant v = u(1)/u(0) for
// scalings Q = c*u with c constant in n, and the translation invariant
// v = u(1) - rho*u(0) for exponential translation flows Q = c*lambda^n (then
// rho = lambda).  The induced first-order map v(n+1) = g(n, v(n)) is derived
// by exact elimination and classified (linear / Moebius / general); linear and
// Moebius maps are solved in closed form; u is reconstructed from v; and
// published closed-form solutions are audited against exact iteration.

#include "dpsym/eqmodel.hpp"
#include "dpsym/seqform.hpp"
#include "dpsym/symmetry.hpp"

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dpsym {

enum class InvariantKind { Ratio, Translation };

struct Invariant {
    InvariantKind kind = InvariantKind::Ratio;
    /// Translation only: v = u(1) - rho*u(0) with rho the constant ratio
    /// alpha(n+1)/alpha(n) of the flow Q = alpha(n) = c*lambda^n, i.e. lambda.
    RootOfUnityScalar rho;

    std::string to_string() const;
};

/// Derive the invariant for a supported generator (xi must be zero):
///   - Q = c*u with c constant in n  ->  ratio invariant.  A scaling with
///     n-dependent coefficient is rejected: v = u(1)/u(0) is only invariant
///     under the flow when the coefficient does not move with n.
///   - Q = c*lambda^n (degree 0, single exponential, never zero)  ->
///     translation invariant with rho = lambda.
/// Everything else (quadratic characteristics, shift symmetries, periodic
/// multi-term translations) throws UnsupportedFamilyError.
Invariant invariant_from_generator(const DifferenceEquation& eq, const SymmetryGenerator& g);

struct ReducedMap {
    enum class Class { Linear, Moebius, General };
    Class cls = Class::General;

    // Linear: v(n+1) = r(n)*v(n) + s(n); here always constant closed forms.
    SequenceClosedForm r, s;

    // Moebius: v(n+1) = (A v + B)/(C v + D) with constant entries {A, B, C, D}.
    std::array<GaussianRational, 4> matrix{GaussianRational(1), GaussianRational(0),
                                           GaussianRational(0), GaussianRational(1)};

    // General: the right-hand side as a rational function of n and `vvar`.
    RatFunc rhs;
    VarId vvar = 0;

    std::string domain_notes;
    std::string to_string() const;
};

/// Substitute u(2) = omega, eliminate u(0) through the invariant, classify.
/// Throws NotClosedError when u(0) fails to cancel (the invariant does not
/// reduce this equation), UnsupportedFamilyError when the eliminated map needs
/// coefficients outside the representable classes.
ReducedMap reduced_map(const DifferenceEquation& eq, const Invariant& inv);

/// A solved first-order sequence, exact in all three representations:
///   Exact        - `form` holds the closed form (coefficients may carry
///                  symbolic initial-data parameters).
///   MoebiusPower - value(n) is the Moebius action of the closed-form matrix
///                  power [A(n) B(n); C(n) D(n)] on the initial value x0.
///   Lazy         - value(n) only by exact iteration (with a warning note
///                  when a closed form was not available).
struct ClosedFormSolution {
    enum class Rep { Exact, MoebiusPower, Lazy };
    Rep rep = Rep::Exact;

    SequenceClosedForm form;                          // Exact
    std::array<SequenceClosedForm, 4> power_entries;  // MoebiusPower: A,B,C,D
    CoefField x0;                                     // initial value (may be symbolic)
    /// Lazy: maps (k, x(k)) to x(k+1).
    std::function<CoefField(long, const CoefField&)> step;
    std::optional<long> orbit_period;                 // least p with v(n+p) = v(n), if known
    std::string validity_notes;

    /// Exact value at n >= 0; throws EvalError on a singular orbit point.
    CoefField value(long n) const;

    std::string display_exponential() const;  // e^(2*pi*i*k*n/m) rendering
    std::string display_trig() const;         // cos/sin rendering of conjugate pairs

private:
    mutable std::shared_ptr<std::vector<CoefField>> lazy_cache_;
};

/// Solve v(n+1) = g(n, v(n)) from v(0) = v0 (symbolic initial values enter as
/// parameter symbols inside the coefficient field).  Linear maps with constant
/// r, s collapse to closed forms; Moebius maps diagonalize through the
/// recurrence solver (matrix powers in closed form, checked against one
/// manual multiplication); anything else falls back to an exact lazy solution
/// with a warning note, including Moebius maps with non-cyclotomic eigenvalues.
ClosedFormSolution solve_first_order(const ReducedMap& m, const CoefField& v0);

/// Rebuild u from the solved invariant and initial data u(0) = u0, u(1) = u1
/// (symbolic values allowed).  Ratio: u(n) = u0 * prod_{k<n} v(k), collapsed
/// to a closed form when v is periodic and the full-period product is a root
/// of unity (otherwise an exact lazy product).  Translation:
/// u(n+1) = rho*u(n) + v(n) summed in closed form.  The result is checked to
/// reproduce u0, u1 and to satisfy the equation exactly for n = 0..30;
/// a failed check means the v-solution does not match the dynamics and
/// raises ValidationError.  Singular data (u0 = 0 for ratio, v-orbit poles)
/// raises SingularInitialDataError.
ClosedFormSolution reconstruct(const DifferenceEquation& eq, const Invariant& inv,
                               const ClosedFormSolution& v_solution, const CoefField& u0,
                               const CoefField& u1);

/// A published closed-form solution under audit: value(n) exact, typically
/// over the symbolic initial-data parameters u0, u1 so verdicts hold for
/// generic data.  `nominal_u0`/`nominal_u1` are what the formula claims its
/// n = 0, 1 values are.
struct SolutionFormula {
    std::string id;
    std::string branch;  // "principal" / "conjugate" / "-"
    std::function<CoefField(long)> value;
    CoefField nominal_u0, nominal_u1;
};

/// The built-in audited formulas:
///   dp1_zero_multivalued_form  (branches: principal, conjugate)
///   dp2_zero_closed_form       (branch: -)
///   dp4_zero_ceiling_form      (branch: -)
std::vector<std::string> builtin_solution_formula_ids();
std::vector<SolutionFormula> builtin_solution_formulas(const std::string& id);

/// Entrywise complex conjugate (parameter symbols are treated as real).
CoefField conj_exact(const CoefField& x);
/// The formula n -> conj(value(n)), same id, branch suffixed "-conjugated".
SolutionFormula conjugate_formula(const SolutionFormula& f);

struct AuditPhase {
    bool match = true;
    std::optional<long> first_fail;
};

/// Verdict of comparing a formula against exact iteration of the equation
/// seeded with the formula's own n = 0, 1 values.  `initial_data` asks
/// whether those values actually equal the nominal u0, u1; `equation` asks
/// whether the formula follows the dynamics from them.  `max_abs_err` is the
/// largest |difference| over every comparison, evaluated at the documented
/// numeric sample u0 = 1, u1 = 2 (0 when everything matches).
struct AuditReport {
    std::string formula_id;
    std::string branch;
    AuditPhase initial_data;
    AuditPhase equation;
    std::string verdict;  // "match" | "mismatch"
    std::optional<long> first_fail_n;
    double max_abs_err = 0.0;
    long n_begin = 0, n_end = 0;
    std::string detail;

    std::string to_json() const;
};

/// Audit over n = 0..n_max.  tol = 0 compares exactly (the built-in formulas
/// are exact); a positive tol compares |difference| at the numeric sample.
AuditReport audit_solution_formula(const DifferenceEquation& eq, const SolutionFormula& formula,
                                 long n_max, double tol = 0.0);

}  // namespace dpsym
