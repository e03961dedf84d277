#ifndef EXITSPEC_SPECTRUM_HPP
#define EXITSPEC_SPECTRUM_HPP

#include "exitspec/piecewise_cheb.hpp"
#include "exitspec/warp_models.hpp"

#include <string>
#include <vector>

namespace exitspec {

enum class Provenance { quadrature, boundary_derivative, mesh, monte_carlo };

const char* to_string(Provenance p);

/// Radial exit-moment profiles u_0..u_K on a model-space ball of radius R.
/// u_0 == 1; u_k solves u_k'' + (m-1)(w'/w) u_k' = -k u_{k-1}, u_k(R) = 0.
struct RadialProfileSet {
    int dim = 2;
    double R = 0.0;
    int max_order = 0;
    double tol = 1e-12;
    std::string model_id;
    double boundary_factor = 0.0; // w(R)^{m-1}

    std::vector<PiecewiseCheb> u;  // profiles, size max_order+1
    std::vector<PiecewiseCheb> du; // radial derivatives (exact integral form)
    std::vector<double> inner_at_R; // int_0^R w^{m-1} u_k dt, per order

    double eval(int k, double r) const;
    double eval_deriv(int k, double r) const;
};

struct MomentSpectrum {
    std::string model_id;
    std::string b_label; // numeric b for space forms, "custom:<id>" otherwise
    int dim = 2;
    double R = 0.0;
    double tol = 0.0;
    Provenance provenance = Provenance::boundary_derivative;
    std::vector<double> A_hat; // boundary-normalized moments, k = 0..K
    std::vector<double> A_raw; // A_hat[k] * Vol(boundary sphere)
};

/// Solves the hierarchy up to order K by the closed quadrature recursion.
RadialProfileSet solve_hierarchy(const ModelSpace& model, double R, int K, double tol = 1e-12);

/// A_hat_k = -u_{k+1}'(R)/(k+1); needs k <= max_order-1.
double exit_moment(const RadialProfileSet& profiles, int k);

/// Spectrum A_hat_0..A_hat_K (solves internally to order K+1).
MomentSpectrum moment_spectrum(const ModelSpace& model, double R, int K, double tol = 1e-12);

struct DivergenceCheck {
    double volume_side = 0.0;   // int_0^R u_k w^{m-1} dt / w^{m-1}(R)
    double boundary_side = 0.0; // -u_{k+1}'(R)/(k+1)
    double rel_gap = 0.0;
    bool ok = false;
};

/// Cross-checks the two quadrature routes to A_hat_k.
DivergenceCheck verify_divergence_identity(const ModelSpace& model,
                                           const RadialProfileSet& profiles, int k,
                                           double tol = 1e-8);

/// Max |u_k'' + (m-1)(w'/w)u_k' + k u_{k-1}| over a grid in (0,R),
/// normalized by k*max|u_{k-1}|. Second derivative by finite differences.
double verify_ode_residual(const ModelSpace& model, const RadialProfileSet& profiles, int k,
                           int grid_points = 200);

} // namespace exitspec

#endif
