#include "exitspec/expression.hpp"
#include "exitspec/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <sstream>
#include <utility>

namespace exitspec {

Dual2 operator+(const Dual2& a, const Dual2& b) { return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2}; }
Dual2 operator-(const Dual2& a, const Dual2& b) { return {a.v - b.v, a.d1 - b.d1, a.d2 - b.d2}; }
Dual2 operator-(const Dual2& a) { return {-a.v, -a.d1, -a.d2}; }

Dual2 operator*(const Dual2& a, const Dual2& b) {
    return {a.v * b.v,
            a.d1 * b.v + a.v * b.d1,
            a.d2 * b.v + 2.0 * a.d1 * b.d1 + a.v * b.d2};
}

Dual2 operator/(const Dual2& a, const Dual2& b) {
    if (b.v == 0.0) throw DomainError("expression: division by zero");
    Dual2 q;
    q.v = a.v / b.v;
    q.d1 = (a.d1 - q.v * b.d1) / b.v;
    q.d2 = (a.d2 - 2.0 * q.d1 * b.d1 - q.v * b.d2) / b.v;
    return q;
}

Dual2 dual_compose(const Dual2& u, double f, double fp, double fpp) {
    return {f, fp * u.d1, fpp * u.d1 * u.d1 + fp * u.d2};
}

// local alias: f(u) for scalar f with given f(u.v), f'(u.v), f''(u.v).
static Dual2 lift(const Dual2& u, double f, double fp, double fpp) {
    return dual_compose(u, f, fp, fpp);
}

Dual2 dual_exp(const Dual2& u) {
    const double e = std::exp(u.v);
    return lift(u, e, e, e);
}

Dual2 dual_log(const Dual2& u) {
    if (!(u.v > 0.0)) throw DomainError("expression: log of non-positive value");
    return lift(u, std::log(u.v), 1.0 / u.v, -1.0 / (u.v * u.v));
}

static Dual2 dual_sqrt(const Dual2& u) {
    if (u.v < 0.0) throw DomainError("expression: sqrt of negative value");
    const double s = std::sqrt(u.v);
    if (s == 0.0) throw DomainError("expression: sqrt derivative singular at 0");
    return lift(u, s, 0.5 / s, -0.25 / (s * u.v));
}

static Dual2 powi(Dual2 a, long n) {
    if (n < 0) return Dual2{1.0, 0.0, 0.0} / powi(a, -n);
    Dual2 out{1.0, 0.0, 0.0};
    while (n > 0) {
        if (n & 1) out = out * a;
        a = a * a;
        n >>= 1;
    }
    return out;
}

Dual2 dual_pow(const Dual2& a, double p) {
    if (p == std::floor(p) && std::abs(p) <= 64.0) return powi(a, static_cast<long>(p));
    if (!(a.v > 0.0)) throw DomainError("expression: x^p needs x > 0 for non-integer p");
    const double f = std::pow(a.v, p);
    return lift(a, f, p * f / a.v, p * (p - 1.0) * f / (a.v * a.v));
}

static Dual2 dual_pow(const Dual2& a, const Dual2& b) {
    const bool const_exp = b.d1 == 0.0 && b.d2 == 0.0;
    if (const_exp && b.v == std::floor(b.v) && std::abs(b.v) <= 64.0)
        return powi(a, static_cast<long>(b.v));
    if (!(a.v > 0.0)) throw DomainError("expression: x^y needs x > 0 for non-integer y");
    return dual_exp(b * dual_log(a));
}

namespace {

using Node = std::function<Dual2(const Dual2&)>;

struct Parser {
    const std::string& s;
    size_t pos = 0;

    explicit Parser(const std::string& src) : s(src) {}

    [[noreturn]] void fail(size_t at, const std::string& why) const {
        std::ostringstream msg;
        msg << "expression parse error at position " << at << ": " << why << "\n  " << s
            << "\n  " << std::string(at, ' ') << "^";
        throw ValidationError(msg.str());
    }

    void skip_ws() {
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
    }

    bool accept(char c) {
        skip_ws();
        if (pos < s.size() && s[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    Node parse_expr() {
        Node lhs = parse_term();
        for (;;) {
            if (accept('+')) {
                Node rhs = parse_term();
                lhs = [lhs, rhs](const Dual2& r) { return lhs(r) + rhs(r); };
            } else if (accept('-')) {
                Node rhs = parse_term();
                lhs = [lhs, rhs](const Dual2& r) { return lhs(r) - rhs(r); };
            } else {
                return lhs;
            }
        }
    }

    Node parse_term() {
        Node lhs = parse_unary();
        for (;;) {
            if (accept('*')) {
                Node rhs = parse_unary();
                lhs = [lhs, rhs](const Dual2& r) { return lhs(r) * rhs(r); };
            } else if (accept('/')) {
                Node rhs = parse_unary();
                lhs = [lhs, rhs](const Dual2& r) { return lhs(r) / rhs(r); };
            } else {
                return lhs;
            }
        }
    }

    Node parse_unary() {
        if (accept('-')) {
            Node inner = parse_unary();
            return [inner](const Dual2& r) { return -inner(r); };
        }
        if (accept('+')) return parse_unary();
        return parse_power();
    }

    Node parse_power() {
        Node base = parse_atom();
        if (accept('^')) {
            Node exp = parse_unary(); // right associative, allows 2^-3
            return [base, exp](const Dual2& r) { return dual_pow(base(r), exp(r)); };
        }
        return base;
    }

    Node parse_atom() {
        skip_ws();
        if (pos >= s.size()) fail(pos, "unexpected end of expression");
        const char c = s[pos];
        if (c == '(') {
            ++pos;
            Node inner = parse_expr();
            if (!accept(')')) fail(pos, "expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
        fail(pos, std::string("unexpected character '") + c + "'");
    }

    Node parse_number() {
        const char* begin = s.c_str() + pos;
        char* end = nullptr;
        const double val = std::strtod(begin, &end);
        if (end == begin) fail(pos, "invalid number");
        pos += static_cast<size_t>(end - begin);
        return [val](const Dual2&) { return Dual2{val, 0.0, 0.0}; };
    }

    Node parse_name() {
        const size_t start = pos;
        while (pos < s.size() &&
               (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_'))
            ++pos;
        const std::string name = s.substr(start, pos - start);
        if (name == "r") return [](const Dual2& r) { return r; };
        if (name == "pi") return [](const Dual2&) { return Dual2{M_PI, 0.0, 0.0}; };

        Dual2 (*fn)(const Dual2&) = nullptr;
        if (name == "exp") fn = dual_exp;
        else if (name == "log") fn = dual_log;
        else if (name == "sqrt") fn = dual_sqrt;
        else if (name == "sin")
            fn = [](const Dual2& u) { return lift(u, std::sin(u.v), std::cos(u.v), -std::sin(u.v)); };
        else if (name == "cos")
            fn = [](const Dual2& u) { return lift(u, std::cos(u.v), -std::sin(u.v), -std::cos(u.v)); };
        else if (name == "tan")
            fn = [](const Dual2& u) {
                const double t = std::tan(u.v), sec2 = 1.0 + t * t;
                return lift(u, t, sec2, 2.0 * t * sec2);
            };
        else if (name == "sinh")
            fn = [](const Dual2& u) { return lift(u, std::sinh(u.v), std::cosh(u.v), std::sinh(u.v)); };
        else if (name == "cosh")
            fn = [](const Dual2& u) { return lift(u, std::cosh(u.v), std::sinh(u.v), std::cosh(u.v)); };
        else if (name == "tanh")
            fn = [](const Dual2& u) {
                const double t = std::tanh(u.v), sech2 = 1.0 - t * t;
                return lift(u, t, sech2, -2.0 * t * sech2);
            };
        else
            fail(start, "unknown name '" + name + "'");

        if (!accept('(')) fail(pos, "expected '(' after function name");
        Node arg = parse_expr();
        if (!accept(')')) fail(pos, "expected ')'");
        return [fn, arg](const Dual2& r) { return fn(arg(r)); };
    }
};

} // namespace

RadialExpression::RadialExpression(std::function<Dual2(const Dual2&)> fn, std::string src)
    : fn_(std::move(fn)), src_(std::move(src)) {}

double RadialExpression::value(double r) const { return fn_(Dual2{r, 1.0, 0.0}).v; }
double RadialExpression::deriv1(double r) const { return fn_(Dual2{r, 1.0, 0.0}).d1; }
double RadialExpression::deriv2(double r) const { return fn_(Dual2{r, 1.0, 0.0}).d2; }
Dual2 RadialExpression::eval(const Dual2& r) const { return fn_(r); }

RadialExpression parse_radial_expression(const std::string& src) {
    Parser p(src);
    Node root = p.parse_expr();
    p.skip_ws();
    if (p.pos != src.size()) p.fail(p.pos, "unexpected trailing input");
    return RadialExpression(root, src);
}

WarpingFunction make_warping_from_expression(const std::string& src, double domain_max,
                                             const std::string& id, bool validate) {
    RadialExpression e = parse_radial_expression(src);
    WarpingFunction w;
    w.kind = WarpingFunction::Kind::custom;
    w.domain_max = domain_max;
    w.id = id.empty() ? src : id;
    w.eval = [e](double r) { return e.value(r); };
    w.deriv1 = [e](double r) { return e.deriv1(r); };
    w.deriv2 = [e](double r) { return e.deriv2(r); };
    if (validate) validate_warping(w);
    return w;
}

} // namespace exitspec
