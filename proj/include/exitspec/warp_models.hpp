#ifndef EXITSPEC_WARP_MODELS_HPP
#define EXITSPEC_WARP_MODELS_HPP

#include <functional>
#include <string>

namespace exitspec {

/// Radial profile w(r) generating a rotationally symmetric model space.
/// Requires w(0) = 0, w'(0) = 1 and w > 0 on (0, domain_max].
struct WarpingFunction {
    enum class Kind { space_form, custom };

    std::function<double(double)> eval;
    std::function<double(double)> deriv1;
    std::function<double(double)> deriv2;
    double domain_max = 0.0;
    Kind kind = Kind::custom;
    double space_form_b = 0.0; // meaningful when kind == space_form
    std::string id;            // short label used in reports
};

struct ModelSpace {
    int dim = 2; // m >= 2
    WarpingFunction warping;
};

/// Warping function Q_b of the constant-curvature space form.
/// For b > 0 the domain must stay strictly below the pole at pi/sqrt(b).
WarpingFunction space_form_warping(double b, double domain_max = 10.0);

/// Checks w(0)=0, w'(0)=1, positivity on (0, domain_max], and that the
/// supplied derivatives match centered finite differences of eval to
/// relative tolerance fd_tol on a grid. Throws ValidationError.
void validate_warping(const WarpingFunction& w, double fd_tol = 1e-6, int grid_points = 32);

ModelSpace make_model(int dim, WarpingFunction w);

/// Radial sectional curvature -w''(r)/w(r). r = 0 is rejected.
double radial_curvature(const ModelSpace& ms, double r);

/// Mean curvature of the distance sphere, w'(r)/w(r). r = 0 is rejected.
double eta(const ModelSpace& ms, double r);

/// Area of the unit (m-1)-sphere, 2 pi^{m/2} / Gamma(m/2).
double unit_sphere_area(int m);

/// omega_{m-1} * w(r)^{m-1}.
double sphere_volume(const ModelSpace& ms, double r);

/// omega_{m-1} * int_0^r w(t)^{m-1} dt (adaptive quadrature, rel 1e-10).
double ball_volume(const ModelSpace& ms, double r);

/// q_w(r) = ball_volume / sphere_volume = int_0^r w^{m-1} / w^{m-1}(r).
double isoperimetric_quotient(const ModelSpace& ms, double r);

} // namespace exitspec

#endif
