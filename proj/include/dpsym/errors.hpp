#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dpsym {

/// Base class for all library errors.
struct Error : std::runtime_error {
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

/// Syntax error while parsing expression text; `offset` is the 0-based
/// character position the parser was looking at.
struct ParseError : Error {
    std::size_t offset;
    ParseError(const std::string& msg, std::size_t off)
        : Error(msg + " (at offset " + std::to_string(off) + ")"), offset(off) {}
};

/// Expression contains exp/sin/cos and cannot be converted to a rational function.
struct NonRationalError : Error {
    using Error::Error;
};

/// Substitution produced an identically zero denominator.
struct SingularSubstitutionError : Error {
    using Error::Error;
};

/// Numeric or exact evaluation failed (unbound symbol, division by zero).
struct EvalError : Error {
    using Error::Error;
};

/// A characteristic root is not expressible as scale * e^(2*pi*i*k/m).
struct NonCyclotomicRootError : Error {
    std::string factor;  // offending polynomial factor, rendered
    NonCyclotomicRootError(const std::string& msg, std::string fac)
        : Error(msg + (fac.empty() ? "" : " [factor: " + fac + "]")), factor(std::move(fac)) {}
};

/// Requested operation is outside the supported families.
struct UnsupportedFamilyError : Error {
    using Error::Error;
};

/// Variable elimination during order reduction failed to close.
struct NotClosedError : Error {
    using Error::Error;
};

/// Reconstruction hit a singular configuration of the initial data.
struct SingularInitialDataError : Error {
    using Error::Error;
};

/// Equation is not a parameter-scaled monomial ratio; log transform undefined.
struct NotLogLinearError : Error {
    using Error::Error;
};

/// Invalid construction input (bad order, inconsistent assumptions, ...).
struct ValidationError : Error {
    using Error::Error;
};

}  // namespace dpsym
