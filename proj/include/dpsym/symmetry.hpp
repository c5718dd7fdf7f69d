#pragma once

#include <complex>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "dpsym/eqmodel.hpp"
#include "dpsym/seqform.hpp"

namespace dpsym {

/// A Lie point symmetry generator for a second-order difference equation:
///
///   characteristic  Q(n, u) = sum_j q_coeffs[j](n) * u^j
///   shift part      xi(n)   = affine polynomial in n
///
/// xi is stored as a SequenceClosedForm but is restricted to terms with
/// root-of-unity part 1 and n-degree <= 1 (an affine polynomial in n whose
/// coefficients may involve equation parameters).  q_coeffs[j] may be any
/// closed-form coefficient sequence (constants, periodic cyclotomic
/// combinations, ...).
struct SymmetryGenerator {
    SequenceClosedForm xi;
    std::vector<SequenceClosedForm> q_coeffs;
    std::string provenance;

    /// Polynomial degree of Q in u (-1 when Q == 0).
    int degree() const;
    bool is_zero() const;
    std::string to_string() const;
};

/// Validating constructor: checks the xi shape, trims trailing zero
/// q-coefficients, and requires at least one nonzero component.
SymmetryGenerator make_generator(SequenceClosedForm xi, std::vector<SequenceClosedForm> q_coeffs,
                                 std::string provenance);

/// Componentwise sum (the generator space is linear).
SymmetryGenerator generator_sum(const SymmetryGenerator& g, const SymmetryGenerator& h);

/// The linearized symmetry condition residual of a generator against
/// u(n+2) = omega(n, u(n), u(n+1)):
///
///   R = Q(n+2, omega) - xi(n) * d(omega)/dn
///                     - Q(n, u(0)) * d(omega)/du(0)
///                     - Q(n+1, u(1)) * d(omega)/du(1)
///
/// R is returned as a rational function in n, the parameters, u(0), u(1) and
/// -- for coefficient sequences that are not plain constants -- opaque slot
/// symbols standing for the shifted sequence values q_j(n+i).  Each slot
/// records the exact closed form it stands for, so verification can resolve
/// them residue-by-residue.  Constant coefficients are substituted directly,
/// so e.g. a generator with Q = a*u on an equation it generates canonically
/// collapses to the zero rational function.
struct ResidualSlot {
    VarId var;                ///< the opaque symbol appearing in expr
    int j;                    ///< u-power of Q this coefficient belongs to (-1 for xi)
    int shift;                ///< evaluation offset: the slot stands for q_j(n + shift)
    SequenceClosedForm value; ///< already-shifted closed form (evaluate at n)
};

struct ResidualForm {
    RatFunc expr;                  ///< full residual
    std::vector<RatFunc> components; ///< {Q(n+2,omega), xi*d/dn, Q0*d/du0, Q1*d/du1}
    std::vector<ResidualSlot> slots;
    bool canonically_zero() const { return expr.is_zero(); }
};

ResidualForm residual(const DifferenceEquation& eq, const SymmetryGenerator& g,
                      int max_degree = 2);

/// Result of checking a generator against an equation.
struct NumericWitness {
    long n = 0;
    std::complex<double> u0, u1;
    std::complex<double> residual_value;
};

struct VerificationReport {
    enum class Mode { Symbolic, Numeric };
    Mode mode = Mode::Symbolic;
    bool pass = false;
    double residual_norm = 0.0;              ///< numeric: worst relative residual
    std::vector<long> residues_checked;      ///< symbolic: residues mod L examined
    std::optional<long> failing_residue;     ///< symbolic: first residue that failed
    std::optional<NumericWitness> witness;   ///< numeric: worst failing sample
    std::string detail;
};

/// Exact check.  All periodic slot sequences are resolved residue-by-residue
/// modulo the lcm L of their periods; within each residue class n is kept
/// symbolic, so a pass is a proof (a polynomial vanishing on an arithmetic
/// progression of integers vanishes identically).  Throws ValidationError if
/// some coefficient sequence is aperiodic or carries float coefficients.
VerificationReport verify_symbolic(const DifferenceEquation& eq, const SymmetryGenerator& g,
                                   int max_degree = 2);

/// Sampled check.  Draws `samples` random points (integer n in [-50,50],
/// complex u(0), u(1) in a box), skipping points too close to a denominator
/// zero, and compares each |R| against the magnitudes of the residual's four
/// constituent terms.  All parameters appearing in the equation or the
/// generator must be bound in `params`.
VerificationReport verify_numeric(const DifferenceEquation& eq, const SymmetryGenerator& g,
                                  const std::map<VarId, std::complex<double>>& params,
                                  int samples = 100, double tol = 1e-9,
                                  unsigned long seed = 20240901, int max_degree = 2);

/// Determining system for an undetermined generator ansatz of polynomial
/// degree `degree` in u (plus, when with_xi, an affine shift part
/// xi = xi1*n + xi0).  Unknowns are the slot symbols alpha{j}_{i} standing
/// for q_j(n+i), i = 0,1,2, and xi0, xi1.  Each equation is a polynomial in
/// n and the parameters, linear and homogeneous in the unknowns; it arises
/// as one coefficient of the cleared-denominator residual with respect to
/// the powers of u(0), u(1).
struct DeterminingUnknown {
    VarId var;
    int j;      ///< u-power (-1 for the xi coefficients)
    int shift;  ///< 0,1,2 for alpha{j}_{shift}; for xi: the n-power it multiplies
};

struct DeterminingSystem {
    DifferenceEquation equation;
    int degree = 0;
    bool with_xi = false;
    std::vector<DeterminingUnknown> unknowns;
    std::vector<Poly> equations;

    std::string to_string() const;
};

DeterminingSystem extract_determining_system(const DifferenceEquation& eq, int degree,
                                             bool with_xi);

/// Solution of a determining system under branch assumptions.
struct DeterminingSolution {
    std::vector<SymmetryGenerator> generators;      ///< basis of the solution space
    std::vector<RecurrenceConstraint> recurrences;  ///< shift constraints that were solved
    std::vector<std::string> notes;
};

/// Solve the linear functional system:
///   1. substitute parameter bindings read off the combined assumption set,
///   2. split off equations whose unknown-coefficients are free of n: those
///      form a module over the shift-operator polynomial ring and are
///      triangularized by Euclidean elimination, the pivot constraints being
///      solved by solve_recurrence (or by direct back-substitution for
///      shift-free pivots),
///   3. substitute the resulting closed forms into the remaining equations
///      and match coefficients per (root-of-unity power, n-power) bucket,
///      leaving a scalar linear system whose nullspace is the answer.
/// The pure shift symmetry d/dn of autonomous equations is reported via
/// autonomous_shift_symmetry, not duplicated here.  For linear homogeneous
/// equations, basis elements whose characteristic is a solution of the
/// equation itself are tagged as the translation-by-solution family.
DeterminingSolution solve_determining_system(const DeterminingSystem& ds,
                                             const std::vector<std::string>& extra_assumptions = {});

/// xi = 1, Q = 0: a symmetry precisely when omega does not depend on n.
std::optional<SymmetryGenerator> autonomous_shift_symmetry(const DifferenceEquation& eq);

/// Exact equality of the spans of two generator lists, comparing all
/// components (xi and every q_j) simultaneously.  Exact coefficients only.
bool generator_span_equal(const std::vector<SymmetryGenerator>& a,
                          const std::vector<SymmetryGenerator>& b);

/// JSON serialization (exact coefficients only).
std::string generator_to_json(const SymmetryGenerator& g);
SymmetryGenerator generator_from_json(const std::string& text);
std::string report_to_json(const VerificationReport& r);

}  // namespace dpsym
