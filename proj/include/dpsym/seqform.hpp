#pragma once

// Closed forms for sequences in n: finite sums of c * lambda^n * n^deg where
// lambda is a Gaussian-rational multiple of a root of unity.  This class is
// closed under shifts and linear combinations and is exactly evaluable, which
// is what makes symmetry verification decidable.  Also: the solver taking a
// constant-coefficient linear recurrence to a basis of such closed forms.

#include "dpsym/cyclotomic.hpp"
#include "dpsym/errors.hpp"

#include <optional>
#include <variant>
#include <vector>

namespace dpsym {

/// lambda = scale * e^(2*pi*i*k/m), canonical: 0 <= k < m, gcd(k,m)=1
/// (k=0 forces m=1), and scale in the closed first quadrant (re > 0, im >= 0)
/// — the unit factors +-1, +-i fold into the exponent.
struct RootOfUnityScalar {
    GaussianRational scale{1};
    long k = 0;
    long m = 1;

    RootOfUnityScalar() = default;

    /// Canonicalize scale * e^(2*pi*i*k/m); scale must be nonzero.
    static RootOfUnityScalar make(const GaussianRational& scale, long k, long m);
    static RootOfUnityScalar one() { return {}; }
    static RootOfUnityScalar from_gaussian(const GaussianRational& g) { return make(g, 0, 1); }
    static RootOfUnityScalar root(long k, long m) { return make(GaussianRational(1), k, m); }

    bool is_one() const { return scale.is_one() && k == 0; }
    bool is_unit_modulus() const { return scale.is_one(); }

    friend RootOfUnityScalar operator*(const RootOfUnityScalar& x, const RootOfUnityScalar& y);
    RootOfUnityScalar pow(long e) const;
    RootOfUnityScalar inverse() const { return pow(-1); }

    friend bool operator==(const RootOfUnityScalar& x, const RootOfUnityScalar& y) {
        return x.scale == y.scale && x.k == y.k && x.m == y.m;
    }
    friend bool operator!=(const RootOfUnityScalar& x, const RootOfUnityScalar& y) {
        return !(x == y);
    }
    friend bool operator<(const RootOfUnityScalar& x, const RootOfUnityScalar& y) {
        if (x.m != y.m) return x.m < y.m;
        if (x.k != y.k) return x.k < y.k;
        return x.scale < y.scale;
    }

    /// Exact value in Q(zeta).
    CoefField value() const;
    /// Exact value of lambda^n (n may be negative).
    CoefField value_pow(long n) const;
    std::complex<double> to_complex() const;
    std::string to_string() const;  // e.g. "rou(1,4)", "2*rou(1,3)"
};

/// Term coefficient: exact (cyclotomic over the parameter field) or floating.
using SeqCoeff = std::variant<CoefField, std::complex<double>>;

bool seq_coeff_is_zero(const SeqCoeff& c);
std::string seq_coeff_to_string(const SeqCoeff& c);

struct SeqTerm {
    SeqCoeff c;
    RootOfUnityScalar lambda;
    long deg = 0;  // power of n
};

class SequenceClosedForm {
public:
    SequenceClosedForm() = default;

    static SequenceClosedForm zero() { return {}; }
    static SequenceClosedForm term(SeqCoeff c, const RootOfUnityScalar& lambda, long deg = 0);
    static SequenceClosedForm constant(const GaussianRational& c) {
        return term(CoefField::from_gaussian(c), RootOfUnityScalar::one(), 0);
    }
    /// c * n^deg with lambda = 1.
    static SequenceClosedForm monomial(const GaussianRational& c, long deg) {
        return term(CoefField::from_gaussian(c), RootOfUnityScalar::one(), deg);
    }

    const std::vector<SeqTerm>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_exact() const;

    SequenceClosedForm operator-() const;
    friend SequenceClosedForm operator+(const SequenceClosedForm& x, const SequenceClosedForm& y);
    friend SequenceClosedForm operator-(const SequenceClosedForm& x, const SequenceClosedForm& y);
    SequenceClosedForm& operator+=(const SequenceClosedForm& o) { return *this = *this + o; }
    SequenceClosedForm& operator-=(const SequenceClosedForm& o) { return *this = *this - o; }

    SequenceClosedForm scaled(const SeqCoeff& c) const;
    SequenceClosedForm scaled_exact(const CoefField& c) const { return scaled(SeqCoeff(c)); }

    /// n -> n + j, exactly.
    SequenceClosedForm shifted(long j) const;

    /// Exact evaluation; throws if any coefficient is floating.
    CoefField eval_exact(long n) const;
    /// Float evaluation; parameters bound through `value_of`.
    std::complex<double> eval_complex(
        long n, const std::function<std::complex<double>(VarId)>& value_of) const;
    std::complex<double> eval_complex(long n) const;

    /// Least period when every term has degree 0 and scale exactly 1.
    std::optional<long> period() const;

    friend bool operator==(const SequenceClosedForm& x, const SequenceClosedForm& y);
    friend bool operator!=(const SequenceClosedForm& x, const SequenceClosedForm& y) {
        return !(x == y);
    }

    std::string to_string() const;

private:
    void add_term(SeqTerm t);

    std::vector<SeqTerm> terms_;  // sorted by (lambda, deg), merged, no zeros
};

/// c_r * s(n+r) + ... + c_0 * s(n) = 0 for all n.
struct RecurrenceConstraint {
    std::vector<GaussianRational> coefficients;  // index = shift, size r+1

    explicit RecurrenceConstraint(std::vector<GaussianRational> coeffs);
    std::size_t order() const { return coefficients.size() - 1; }
    std::string to_string() const;
};

/// Basis of the solution space, each element exact and internally verified
/// against the recurrence at n = 0..4r.  Throws NonCyclotomicRootError when a
/// characteristic root is not a scaled root of unity.
std::vector<SequenceClosedForm> solve_recurrence(const RecurrenceConstraint& rc);

/// Do the two lists span the same space of sequences?  Exact; requires every
/// coefficient exact.
bool seq_equal_span(const std::vector<SequenceClosedForm>& a,
                    const std::vector<SequenceClosedForm>& b);

}  // namespace dpsym
