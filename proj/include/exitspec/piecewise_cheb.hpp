#ifndef EXITSPEC_PIECEWISE_CHEB_HPP
#define EXITSPEC_PIECEWISE_CHEB_HPP

#include <functional>
#include <vector>

namespace exitspec {

/// Chebyshev interpolant on a single interval [a, b], stored as
/// coefficients of T_k mapped to the interval.
struct ChebPanel {
    double a = 0.0;
    double b = 1.0;
    std::vector<double> coef;

    double eval(double x) const;
    double tail_magnitude() const; // max |c_k| over the last three coefficients
};

/// Piecewise Chebyshev representation of a smooth function on [lo, hi].
///
/// Panels are refined adaptively until the coefficient tail drops below
/// tol relative to the global scale, so products, quotients with removable
/// singularities and nested antiderivatives all stay cheap and accurate.
class PiecewiseCheb {
public:
    PiecewiseCheb() = default;

    /// Adaptive construction from a callable. Extra breakpoints seed the
    /// initial subdivision (useful near a vanishing endpoint).
    static PiecewiseCheb build(const std::function<double(double)>& f, double lo, double hi,
                               double tol = 1e-12,
                               const std::vector<double>& breakpoints = {},
                               int points_per_panel = 25, int max_depth = 26);

    static PiecewiseCheb constant(double value, double lo, double hi);

    double eval(double x) const;
    double deriv(double x) const;

    /// F(x) = integral of this from lo to x; exact on the representation.
    PiecewiseCheb antiderivative() const;
    PiecewiseCheb derivative() const;

    /// alpha * this + beta, same panels.
    PiecewiseCheb affine(double alpha, double beta) const;

    double definite_integral() const;
    double domain_lo() const { return lo_; }
    double domain_hi() const { return hi_; }
    double max_abs() const; // coefficient-based bound estimate
    std::vector<double> breakpoints() const;
    bool empty() const { return panels_.empty(); }

private:
    const ChebPanel& panel_at(double x) const;

    double lo_ = 0.0;
    double hi_ = 0.0;
    std::vector<ChebPanel> panels_; // contiguous, sorted
};

} // namespace exitspec

#endif
