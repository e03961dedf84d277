#ifndef EXITSPEC_EXPRESSION_HPP
#define EXITSPEC_EXPRESSION_HPP

#include "exitspec/warp_models.hpp"

#include <functional>
#include <string>

namespace exitspec {

/// Second-order dual number: value plus first and second derivative
/// with respect to the single variable r.
struct Dual2 {
    double v = 0.0;
    double d1 = 0.0;
    double d2 = 0.0;
};

Dual2 operator+(const Dual2& a, const Dual2& b);
Dual2 operator-(const Dual2& a, const Dual2& b);
Dual2 operator-(const Dual2& a);
Dual2 operator*(const Dual2& a, const Dual2& b);
Dual2 operator/(const Dual2& a, const Dual2& b);

/// Composition u -> f(u) given f, f', f'' at u.v.
Dual2 dual_compose(const Dual2& u, double f, double fp, double fpp);
Dual2 dual_exp(const Dual2& u);
Dual2 dual_log(const Dual2& u);
/// a^p for real constant p; needs a.v > 0 unless p is a small integer.
Dual2 dual_pow(const Dual2& a, double p);

/// Compiled scalar function of r built from an expression string.
///
/// Grammar: + - * / ^ (right assoc), parentheses, numeric literals,
/// the variable r, the constant pi, and the functions
/// exp log sqrt sin cos tan sinh cosh tanh.
class RadialExpression {
public:
    RadialExpression() = default;
    RadialExpression(std::function<Dual2(const Dual2&)> fn, std::string src);

    double value(double r) const;
    double deriv1(double r) const;
    double deriv2(double r) const;
    Dual2 eval(const Dual2& r) const;
    const std::string& source() const { return src_; }
    bool valid() const { return static_cast<bool>(fn_); }

private:
    std::function<Dual2(const Dual2&)> fn_;
    std::string src_;
};

/// Parses src; throws ValidationError with a caret diagnostic on failure.
RadialExpression parse_radial_expression(const std::string& src);

/// Builds a custom warping function from an expression in r.
/// When validate is true the result is checked for w(0)=0, w'(0)=1,
/// positivity and derivative consistency.
WarpingFunction make_warping_from_expression(const std::string& src, double domain_max,
                                             const std::string& id = "", bool validate = true);

} // namespace exitspec

#endif
