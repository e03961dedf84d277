#ifndef EXITSPEC_COMPARISON_HPP
#define EXITSPEC_COMPARISON_HPP

#include "exitspec/expression.hpp"
#include "exitspec/piecewise_cheb.hpp"
#include "exitspec/spectrum.hpp"
#include "exitspec/warp_models.hpp"

#include <string>
#include <vector>

namespace exitspec {

/// Tangency bound g (g(0)=1, 0<g<=1) and mean-convexity bound h.
struct BoundingFunctions {
    enum class Side { below, above };
    RadialExpression g;
    RadialExpression h;
    Side side = Side::below;
};

/// s(r) = int_0^r dt/g(t) and its inverse, both as interpolants.
struct StretchingMap {
    PiecewiseCheb forward; // s(r) on [0,R]
    PiecewiseCheb inverse; // r(s) on [0,S]
    bool identity = false;
    double R = 0.0;
    double S = 0.0; // s(R)

    double s_of_r(double r) const;
    double r_of_s(double s) const;
};

StretchingMap build_stretching(const RadialExpression& g, double R, double tol = 1e-12);

/// The W-model built from (w, g, h): Lambda solves
/// d/dr{Lambda w g} = m Lambda (w' - h w)/g, Lambda ~ r^{m-1} at 0,
/// and W(s) = Lambda^{1/(m-1)}(r(s)).
struct ComparisonSpace {
    int dim = 2;
    double R = 0.0;
    double S = 0.0;
    WarpingFunction base_w;
    BoundingFunctions bounds;
    StretchingMap stretch;
    PiecewiseCheb psi;       // regularized log-derivative of Lambda w g / r^m
    PiecewiseCheb psi_deriv;
    PiecewiseCheb E;         // antiderivative of psi
    ModelSpace model;        // W-model on [0, S]

    double lambda(double r) const;   // Lambda(r) = r^m e^{E} / (w g)
    double W_of_s(double s) const;
};

ComparisonSpace build_comparison_space(const WarpingFunction& w, BoundingFunctions bounds,
                                       int m, double R, double tol = 1e-12,
                                       std::string* warning = nullptr);

/// FD check of d/dr{Lambda w g} - m Lambda (w'-hw)/g on a grid; returns
/// max residual normalized by the scale of the right side.
double lambda_ode_residual(const ComparisonSpace& cs, int grid_points = 200);

/// Isoperimetric quotient q_W(s(r)) of the comparison model, evaluated
/// through the substitution integral (uniform accuracy down to r ~ 0).
double comparison_iso_quotient(const ComparisonSpace& cs, double r);

/// Margin q_W(s(r))(eta_w(r) - h(r)) - g(r)/m at one radius.
double balance_margin(const ComparisonSpace& cs, double r);

struct BalanceReport {
    bool balanced = false;
    bool strictly_balanced = false;
    bool eta_minus_h_positive = false;
    double min_margin = 0.0;
    double min_margin_r = 0.0;
    std::vector<double> grid_r;
    std::vector<double> margins;
};

/// Sweeps the margin over a log-spaced grid on [1e-3 R, R].
BalanceReport balance_check(const ComparisonSpace& cs, bool strict, int grid_points = 512);

struct LemmaParenReport {
    double min_value = 0.0; // min over k and grid of f_k'' - f_k' eta_w
    int min_k = 0;
    double min_r = 0.0;
};

/// Evaluates (-k f_{k-1} - m(eta_w - h) f_k') / g^2 for f_k = u^W_k(s(r)),
/// k = 1..K, over a log-spaced r grid.
LemmaParenReport lemma_paren_check(const ComparisonSpace& cs, int K, int grid_points = 256,
                                   double tol = 1e-12);

struct Constellation {
    int ambient_dim = 2;    // n
    int sub_dim = 2;        // m
    double R = 0.0;
    ComparisonSpace comparison;
};

Constellation make_constellation(int n, int m, const WarpingFunction& w,
                                 BoundingFunctions bounds, double R, double tol = 1e-12,
                                 std::string* warning = nullptr);

/// Spectrum of the bound side: ball radius s(R) for side=below, R for
/// side=above. Throws HypothesisError if the space is not balanced.
MomentSpectrum spectrum_bound(const Constellation& con, int K, double tol = 1e-12);

enum class Direction { le, ge };

struct IntrinsicComparison {
    Direction direction = Direction::le;
    std::vector<double> a_N;     // spectrum of the space under test
    std::vector<double> a_bound; // spectrum of the bound model
    std::vector<double> margins; // signed so that >= 0 means the claim holds
    bool all_hold = false;
};

/// Checks A_hat_k(N) <= / >= A_hat_k(bound) for k = 0..K after verifying
/// the radial-curvature ordering on a grid.
IntrinsicComparison compare_intrinsic(const ModelSpace& N_model, const ModelSpace& bound_model,
                                      double R, int K, Direction direction, double tol = 1e-12);

} // namespace exitspec

#endif
