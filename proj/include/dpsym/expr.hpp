#pragma once

// Expression trees for the text front end: exact constants, variables,
// n-ary sums/products, integer powers, and the three sequence functions
// exp/sin/cos.  Division and unary minus are sugar: "x/y" parses to
// Product(x, IntPower(y,-1)) and "-x" to Product(Const(-1), x).

#include "dpsym/errors.hpp"
#include "dpsym/ratfunc.hpp"

#include <complex>
#include <map>
#include <string>
#include <vector>

namespace dpsym {

struct Expr {
    enum class Kind { Const, Var, Sum, Product, IntPower, FunctionApp };

    Kind kind = Kind::Const;
    GaussianRational value;   // Const
    VarId var = 0;            // Var
    std::vector<Expr> kids;   // Sum/Product: n-ary; IntPower/FunctionApp: single child
    long exponent = 0;        // IntPower
    std::string func;         // FunctionApp: "exp" | "sin" | "cos"

    static Expr constant(const GaussianRational& c);
    static Expr integer(long v) { return constant(GaussianRational(v)); }
    static Expr variable(VarId v);
    static Expr sum(std::vector<Expr> kids);
    static Expr product(std::vector<Expr> kids);
    static Expr power(Expr base, long e);
    static Expr apply(const std::string& name, Expr arg);

    friend bool operator==(const Expr& x, const Expr& y);
    friend bool operator!=(const Expr& x, const Expr& y) { return !(x == y); }
};

/// Parse per the front-end grammar; throws ParseError with the offending offset.
Expr parse_expr(const std::string& text);

/// Render to text that re-parses to the identical tree.
std::string render(const Expr& e);

/// Collapse to a canonical rational function; throws NonRationalError if the
/// tree contains exp/sin/cos.
RatFunc to_rational(const Expr& e);

/// n -> n+i and u(k) -> u(k+i) throughout.
Expr shift(const Expr& e, long i);

/// Evaluate with every free symbol bound; throws EvalError on an unbound
/// symbol or division by zero.
std::complex<double> eval_numeric(const Expr& e,
                                  const std::map<VarId, std::complex<double>>& bindings);

/// Exact partial derivative of a rational function (delegates to RatFunc).
inline RatFunc diff(const RatFunc& f, VarId v) { return f.derivative(v); }

}  // namespace dpsym
