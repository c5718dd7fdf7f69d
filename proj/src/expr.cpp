#include "dpsym/expr.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

namespace dpsym {

Expr Expr::constant(const GaussianRational& c) {
    Expr e;
    e.kind = Kind::Const;
    e.value = c;
    return e;
}

Expr Expr::variable(VarId v) {
    Expr e;
    e.kind = Kind::Var;
    e.var = v;
    return e;
}

Expr Expr::sum(std::vector<Expr> kids) {
    if (kids.size() == 1) return std::move(kids.front());
    Expr e;
    e.kind = Kind::Sum;
    e.kids = std::move(kids);
    return e;
}

Expr Expr::product(std::vector<Expr> kids) {
    if (kids.size() == 1) return std::move(kids.front());
    Expr e;
    e.kind = Kind::Product;
    e.kids = std::move(kids);
    return e;
}

Expr Expr::power(Expr base, long e) {
    Expr out;
    out.kind = Kind::IntPower;
    out.kids.push_back(std::move(base));
    out.exponent = e;
    return out;
}

Expr Expr::apply(const std::string& name, Expr arg) {
    Expr out;
    out.kind = Kind::FunctionApp;
    out.func = name;
    out.kids.push_back(std::move(arg));
    return out;
}

bool operator==(const Expr& x, const Expr& y) {
    if (x.kind != y.kind) return false;
    switch (x.kind) {
        case Expr::Kind::Const: return x.value == y.value;
        case Expr::Kind::Var: return x.var == y.var;
        case Expr::Kind::IntPower:
            if (x.exponent != y.exponent) return false;
            break;
        case Expr::Kind::FunctionApp:
            if (x.func != y.func) return false;
            break;
        default: break;
    }
    return x.kids == y.kids;
}

// --- parser ---------------------------------------------------------------

namespace {

class Parser {
public:
    explicit Parser(const std::string& text) : s_(text) {}

    Expr run() {
        Expr e = expr();
        skip_ws();
        if (pos_ != s_.size()) fail("unexpected trailing input");
        return e;
    }

private:
    const std::string& s_;
    std::size_t pos_ = 0;

    [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

    void skip_ws() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }

    bool peek(char c) {
        skip_ws();
        return pos_ < s_.size() && s_[pos_] == c;
    }

    bool accept(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }

    void expect(char c, const char* what) {
        if (!accept(c)) fail(std::string("expected '") + c + "' " + what);
    }

    // expr := term (('+'|'-') term)*
    Expr expr() {
        std::vector<Expr> terms;
        terms.push_back(term());
        for (;;) {
            if (accept('+')) {
                terms.push_back(term());
            } else if (accept('-')) {
                terms.push_back(Expr::product({Expr::integer(-1), term()}));
            } else {
                break;
            }
        }
        return Expr::sum(std::move(terms));
    }

    // term := unary (('*'|'/') unary)*
    Expr term() {
        std::vector<Expr> factors;
        factors.push_back(unary());
        for (;;) {
            if (accept('*')) {
                factors.push_back(unary());
            } else if (accept('/')) {
                factors.push_back(Expr::power(unary(), -1));
            } else {
                break;
            }
        }
        return Expr::product(std::move(factors));
    }

    // unary := '-'? factor
    Expr unary() {
        if (accept('-')) return Expr::product({Expr::integer(-1), factor()});
        return factor();
    }

    // factor := base ('^' signed_integer)?
    Expr factor() {
        Expr b = base();
        if (accept('^')) return Expr::power(std::move(b), signed_integer());
        return b;
    }

    long signed_integer() {
        skip_ws();
        bool neg = false;
        if (pos_ < s_.size() && (s_[pos_] == '-' || s_[pos_] == '+')) {
            neg = s_[pos_] == '-';
            ++pos_;
        }
        return neg ? -unsigned_integer() : unsigned_integer();
    }

    long unsigned_integer() {
        skip_ws();
        std::size_t start = pos_;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
        if (pos_ == start) fail("expected integer");
        return std::stol(s_.substr(start, pos_ - start));
    }

    // base := rational | 'i' | 'n' | ident | 'u' '(' integer ')'
    //       | '(' expr ')' | func '(' expr ')'
    Expr base() {
        skip_ws();
        if (pos_ >= s_.size()) fail("unexpected end of input");
        char c = s_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
        if (c == '(') {
            ++pos_;
            Expr e = expr();
            expect(')', "to close parenthesis");
            return e;
        }
        if (std::islower(static_cast<unsigned char>(c))) return word();
        fail("expected a number, variable, or parenthesized expression");
    }

    Expr number() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
            ++pos_;
        std::string lit = s_.substr(start, pos_ - start);
        try {
            return Expr::constant(GaussianRational(rational_from_decimal(lit)));
        } catch (const std::invalid_argument&) {
            pos_ = start;
            fail("bad numeric literal '" + lit + "'");
        }
    }

    Expr word() {
        std::size_t start = pos_;
        while (pos_ < s_.size() &&
               (std::islower(static_cast<unsigned char>(s_[pos_])) ||
                std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
            ++pos_;
        std::string name = s_.substr(start, pos_ - start);
        if (name == "i") return Expr::constant(GaussianRational::unit_i());
        if (name == "n") return Expr::variable(Symbols::n());
        if (name == "u") {
            expect('(', "after 'u'");
            long k = unsigned_integer();
            expect(')', "to close 'u('");
            return Expr::variable(Symbols::u(k));
        }
        if (name == "exp" || name == "sin" || name == "cos") {
            expect('(', ("after '" + name + "'").c_str());
            Expr arg = expr();
            expect(')', "to close function argument");
            return Expr::apply(name, std::move(arg));
        }
        return Expr::variable(Symbols::intern(name));
    }
};

}  // namespace

Expr parse_expr(const std::string& text) { return Parser(text).run(); }

// --- rendering ------------------------------------------------------------

namespace {

// The parser only produces Const nodes from integer/decimal literals and 'i',
// so those are the cases that must render back to literal form for the tree
// round-trip to hold.  Everything else renders value-faithfully.

/// Exact decimal literal for r >= 0, when the denominator is 2^a 5^b.
std::optional<std::string> decimal_literal(const Rational& r) {
    BigInt den = rat_den(r);
    if (den == 1) return rat_num(r).str();
    int twos = 0, fives = 0;
    BigInt d = den;
    while (d % 2 == 0) d /= 2, ++twos;
    while (d % 5 == 0) d /= 5, ++fives;
    if (d != 1) return std::nullopt;
    int m = std::max(twos, fives);
    BigInt scaled = rat_num(r);
    for (int k = twos; k < m; ++k) scaled *= 2;
    for (int k = fives; k < m; ++k) scaled *= 5;
    std::string digits = scaled.str();
    if (static_cast<int>(digits.size()) <= m)
        digits.insert(0, static_cast<std::size_t>(m + 1 - digits.size()), '0');
    digits.insert(digits.size() - static_cast<std::size_t>(m), ".");
    return digits;
}

std::string render_const(const GaussianRational& c) {
    if (c.im.is_zero() && !(c.re < 0)) {
        if (auto lit = decimal_literal(c.re)) return *lit;
    }
    return c.to_string();
}

// Precedence of the rendered string: how tightly its loosest operator binds.
// -1 = leading minus, 0 = sum-level, 1 = product-level, 2 = unary operand,
// 3 = power-base atom.
int string_prec(const std::string& s) {
    if (!s.empty() && s[0] == '-') return -1;
    if (s.find('+') != std::string::npos || s.find('-') != std::string::npos) return 0;
    if (s.find('*') != std::string::npos || s.find('/') != std::string::npos) return 1;
    return 3;
}

int node_prec(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Sum: return 0;
        case Expr::Kind::Product: return 1;
        case Expr::Kind::IntPower: return 2;  // "x^2" cannot be a power base itself
        case Expr::Kind::Var:
        case Expr::Kind::FunctionApp: return 3;
        case Expr::Kind::Const: return string_prec(render_const(e.value));
    }
    return 3;
}

std::string wrap(const Expr& e, int min_prec);

std::string render_node(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Const: return render_const(e.value);
        case Expr::Kind::Var: return Symbols::name(e.var);
        case Expr::Kind::Sum: {
            std::string out;
            for (std::size_t k = 0; k < e.kids.size(); ++k) {
                std::string part = wrap(e.kids[k], 0);
                if (k == 0) {
                    out = part;
                } else if (!part.empty() && part[0] == '-') {
                    out += " - " + part.substr(1);
                } else {
                    out += " + " + part;
                }
            }
            return out;
        }
        case Expr::Kind::Product: {
            // The parser's unary-minus sugar Product(Const(-1), x) renders
            // back as "-x"; keep the special case to exactly that shape so
            // re-parsing rebuilds the identical tree.
            if (e.kids.size() == 2 && e.kids[0].kind == Expr::Kind::Const &&
                (-e.kids[0].value).is_one()) {
                return "-" + wrap(e.kids[1], 2);
            }
            std::string out;
            for (std::size_t k = 0; k < e.kids.size(); ++k) {
                const Expr& kid = e.kids[k];
                if (k > 0) {
                    if (kid.kind == Expr::Kind::IntPower && kid.exponent == -1) {
                        out += "/" + wrap(kid.kids[0], 3);
                        continue;
                    }
                    out += "*";
                }
                out += wrap(kid, 1);
            }
            return out;
        }
        case Expr::Kind::IntPower:
            return wrap(e.kids[0], 3) + "^" + std::to_string(e.exponent);
        case Expr::Kind::FunctionApp:
            return e.func + "(" + render_node(e.kids[0]) + ")";
    }
    return "";
}

std::string wrap(const Expr& e, int min_prec) {
    std::string body = render_node(e);
    if (node_prec(e) < min_prec) return "(" + body + ")";
    return body;
}

}  // namespace

std::string render(const Expr& e) { return render_node(e); }

// --- semantics ------------------------------------------------------------

RatFunc to_rational(const Expr& e) {
    switch (e.kind) {
        case Expr::Kind::Const: return RatFunc(e.value);
        case Expr::Kind::Var: return RatFunc::variable(e.var);
        case Expr::Kind::Sum: {
            RatFunc acc;
            for (auto& kid : e.kids) acc += to_rational(kid);
            return acc;
        }
        case Expr::Kind::Product: {
            RatFunc acc(1);
            for (auto& kid : e.kids) acc *= to_rational(kid);
            return acc;
        }
        case Expr::Kind::IntPower:
            return to_rational(e.kids[0]).pow(static_cast<int>(e.exponent));
        case Expr::Kind::FunctionApp:
            throw NonRationalError("expression contains " + e.func +
                                   "(...), which is not a rational function");
    }
    throw Error("unreachable");
}

Expr shift(const Expr& e, long i) {
    switch (e.kind) {
        case Expr::Kind::Const: return e;
        case Expr::Kind::Var:
            if (e.var == Symbols::n())
                return i == 0 ? e : Expr::sum({e, Expr::integer(i)});
            return Expr::variable(Symbols::shifted(e.var, i));
        default: {
            Expr out = e;
            for (auto& kid : out.kids) kid = shift(kid, i);
            return out;
        }
    }
}

std::complex<double> eval_numeric(const Expr& e,
                                  const std::map<VarId, std::complex<double>>& bindings) {
    using C = std::complex<double>;
    switch (e.kind) {
        case Expr::Kind::Const: return e.value.to_complex();
        case Expr::Kind::Var: {
            auto it = bindings.find(e.var);
            if (it == bindings.end())
                throw EvalError("unbound symbol '" + Symbols::name(e.var) + "'");
            return it->second;
        }
        case Expr::Kind::Sum: {
            C acc(0.0, 0.0);
            for (auto& kid : e.kids) acc += eval_numeric(kid, bindings);
            return acc;
        }
        case Expr::Kind::Product: {
            C acc(1.0, 0.0);
            for (auto& kid : e.kids) acc *= eval_numeric(kid, bindings);
            return acc;
        }
        case Expr::Kind::IntPower: {
            C b = eval_numeric(e.kids[0], bindings);
            long k = e.exponent;
            if (k < 0) {
                if (b == C(0.0, 0.0)) throw EvalError("division by zero");
                b = C(1.0, 0.0) / b;
                k = -k;
            }
            C acc(1.0, 0.0);
            while (k > 0) {
                if (k & 1) acc *= b;
                b *= b;
                k >>= 1;
            }
            return acc;
        }
        case Expr::Kind::FunctionApp: {
            C a = eval_numeric(e.kids[0], bindings);
            if (e.func == "exp") return std::exp(a);
            if (e.func == "sin") return std::sin(a);
            if (e.func == "cos") return std::cos(a);
            throw EvalError("unknown function '" + e.func + "'");
        }
    }
    throw Error("unreachable");
}

}  // namespace dpsym
