#pragma once

// The difference-equation object u(n+p) = omega(n, u(n), ..., u(n+p-1)):
// construction with validated variables and parameter assumptions, exact and
// floating trajectory simulation with honest singularity flags, the three
// change-of-variable transforms (reciprocal, log, affine), and import/export.

#include "dpsym/errors.hpp"
#include "dpsym/ratfunc.hpp"

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace dpsym {

/// A polynomial constraint on the parameters: poly == 0 or poly != 0.
struct Assumption {
    Poly lhs;          // constraint on parameters: lhs = 0 or lhs != 0
    bool is_equality;  // true: lhs == 0; false: lhs != 0
    std::string text;  // the input form, e.g. "c=0", "a!=0", "b=a*d"
};

/// Parse "lhs=rhs" or "lhs!=rhs" over the given parameter symbols.
Assumption parse_assumption(const std::string& text, const std::vector<VarId>& params);

/// Reject identically-false assumptions and directly contradictory pairs
/// (an equality whose polynomial is a constant multiple of an inequation's).
void check_assumption_consistency(const std::vector<Assumption>& assumptions);

struct DifferenceEquation {
    int order = 0;                        // p
    RatFunc omega;                        // in n, parameters, u(0)..u(p-1)
    std::vector<VarId> parameters;        // declared symbols
    std::vector<Assumption> assumptions;  // parameter branch

    /// True when the assumption list pins `param` to equal `value` (via an
    /// assumption of the form param - value = 0 with value constant).
    std::optional<GaussianRational> pinned_value(VarId param) const;
};

/// Validate and build: omega_text parses to a rational expression whose
/// variables are n, the declared parameters, and u(0)..u(p-1) only; the
/// assumption list must not contain a directly contradictory pair.
DifferenceEquation make_equation(const std::string& omega_text, int p,
                                 const std::vector<std::string>& params,
                                 const std::vector<std::string>& assumptions = {});

enum class EntryFlag { Ok, Singular, PostSingular };

std::string entry_flag_name(EntryFlag f);

template <class V>
struct TrajectoryT {
    long n0 = 0;
    std::vector<V> values;        // entry j is u(n0 + j); singular entries hold 0
    std::vector<EntryFlag> flags;  // same length as values
};

using ExactTrajectory = TrajectoryT<GaussianRational>;
using FloatTrajectory = TrajectoryT<std::complex<double>>;

/// Iterate the equation exactly; total `steps` entries starting at n0, the
/// first min(p, steps) taken from init.  A zero denominator flags the entry
/// Singular and everything after it PostSingular (values are never fabricated).
ExactTrajectory simulate_exact(const DifferenceEquation& eq,
                               const std::map<VarId, GaussianRational>& param_values,
                               const std::vector<GaussianRational>& init, long n0, long steps);

/// Floating counterpart; singular when |den| < tol * (1 + |num|).
FloatTrajectory simulate_float(const DifferenceEquation& eq,
                               const std::map<VarId, std::complex<double>>& param_values,
                               const std::vector<std::complex<double>>& init, long n0, long steps,
                               double singular_tol = 1e-12);

/// Which change of variable to apply.
struct TransformSpec {
    enum class Kind { Reciprocal, Log, Affine };
    Kind kind = Kind::Reciprocal;
    GaussianRational scale{1};   // affine only: w = scale*u + shift
    GaussianRational shift{0};

    static TransformSpec reciprocal() { return {}; }
    static TransformSpec log() { return {Kind::Log, GaussianRational(1), GaussianRational(0)}; }
    static TransformSpec affine(const GaussianRational& s, const GaussianRational& t) {
        if (s.is_zero()) throw ValidationError("affine transform needs a nonzero scale");
        return {Kind::Affine, s, t};
    }
};

using ParamLookup = std::function<std::complex<double>(VarId)>;

/// Per-value change of variable.  `exact` is null when the map leaves the
/// rational world (the log transform); `numeric` takes parameter values for
/// maps that depend on them.
struct ValueMap {
    std::function<GaussianRational(const GaussianRational&)> exact;
    std::function<std::complex<double>(std::complex<double>, const ParamLookup&)> numeric;
};

/// For the log transform: the dropped additive constant, as metadata.  The
/// returned equation is in coordinates w_hat = w - delta with
/// delta = factor * ln(constant); factor is 0 when the constant is 1.
struct LogOffset {
    RatFunc constant;  // the parameter-monomial factor of omega
    Rational factor;
};

struct TransformResult {
    DifferenceEquation equation;
    ValueMap forward;   // u -> w
    ValueMap backward;  // w -> u
    std::optional<LogOffset> log_offset;
};

/// Apply the change of variable to the whole equation; the value maps move
/// individual trajectory entries.  Throws NotLogLinearError when the log image
/// of omega is not rational (omega must be a monomial ratio with a constant
/// parameter factor), ValidationError for a reciprocal of the zero function.
TransformResult transform_equation(const DifferenceEquation& eq, const TransformSpec& t);

/// True iff omega is a linear form in u(0)..u(p-1): every term has total
/// u-degree exactly 1 (coefficients may involve n and parameters).
bool is_linear_homogeneous(const DifferenceEquation& eq);

// --- import/export --------------------------------------------------------

std::string trajectory_to_csv(const ExactTrajectory& t);
std::string trajectory_to_csv(const FloatTrajectory& t);
std::string trajectory_to_json(const ExactTrajectory& t);
std::string trajectory_to_json(const FloatTrajectory& t);

/// {"omega": "...", "p": 2, "params": {"a": "1/2"|null, ...}, "assumptions": [...]}
struct EquationImport {
    DifferenceEquation equation;
    std::map<VarId, GaussianRational> bound_values;  // params given as values
};

EquationImport equation_from_json(const std::string& json_text);
std::string equation_to_json(const DifferenceEquation& eq);

}  // namespace dpsym
