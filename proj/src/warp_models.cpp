#include "exitspec/warp_models.hpp"
#include "exitspec/errors.hpp"
#include "exitspec/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace exitspec {

WarpingFunction space_form_warping(double b, double domain_max) {
    if (!(domain_max > 0.0)) throw ValidationError("space_form_warping: domain_max must be positive");
    WarpingFunction w;
    w.kind = WarpingFunction::Kind::space_form;
    w.space_form_b = b;
    if (b > 0.0) {
        const double sb = std::sqrt(b);
        const double pole = M_PI / sb;
        // w vanishes again at the pole; keep the domain strictly inside.
        w.domain_max = std::min(domain_max, (1.0 - 1e-9) * pole);
        w.eval = [sb](double r) { return std::sin(sb * r) / sb; };
        w.deriv1 = [sb](double r) { return std::cos(sb * r); };
        w.deriv2 = [sb](double r) { return -sb * std::sin(sb * r); };
        std::ostringstream id;
        id << "Q_" << b;
        w.id = id.str();
    } else if (b == 0.0) {
        w.domain_max = domain_max;
        w.eval = [](double r) { return r; };
        w.deriv1 = [](double) { return 1.0; };
        w.deriv2 = [](double) { return 0.0; };
        w.id = "Q_0";
    } else {
        const double sb = std::sqrt(-b);
        w.domain_max = domain_max;
        w.eval = [sb](double r) { return std::sinh(sb * r) / sb; };
        w.deriv1 = [sb](double r) { return std::cosh(sb * r); };
        w.deriv2 = [sb](double r) { return sb * std::sinh(sb * r); };
        std::ostringstream id;
        id << "Q_" << b;
        w.id = id.str();
    }
    return w;
}

void validate_warping(const WarpingFunction& w, double fd_tol, int grid_points) {
    if (!w.eval || !w.deriv1 || !w.deriv2)
        throw ValidationError("warping function: eval/deriv1/deriv2 must all be set");
    if (!(w.domain_max > 0.0))
        throw ValidationError("warping function: domain_max must be positive");

    const double v0 = w.eval(0.0);
    if (!(std::abs(v0) <= 1e-10 * std::max(1.0, w.domain_max)))
        throw ValidationError("warping function: w(0) != 0");
    const double d0 = w.deriv1(0.0);
    if (!(std::abs(d0 - 1.0) <= 1e-8))
        throw ValidationError("warping function: w'(0) != 1");

    const double L = w.domain_max;
    const double h = std::max(1e-5 * L, 1e-9);
    double scale1 = 1.0, scale2 = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double r = h + (L - 2.0 * h) * (i + 0.5) / grid_points;
        scale1 = std::max(scale1, std::abs(w.deriv1(r)));
        scale2 = std::max(scale2, std::abs(w.deriv2(r)));
    }
    scale2 = std::max(scale2, scale1 / L);

    for (int i = 0; i < grid_points; ++i) {
        const double r = h + (L - 2.0 * h) * (i + 0.5) / grid_points;
        const double v = w.eval(r);
        if (!(v > 0.0)) {
            std::ostringstream msg;
            msg << "warping function: w(" << r << ") = " << v << " is not positive";
            throw ValidationError(msg.str());
        }
        const double fd1 = (w.eval(r + h) - w.eval(r - h)) / (2.0 * h);
        if (std::abs(fd1 - w.deriv1(r)) > fd_tol * scale1) {
            std::ostringstream msg;
            msg << "warping function: deriv1 disagrees with finite difference at r=" << r
                << " (fd=" << fd1 << ", deriv1=" << w.deriv1(r) << ")";
            throw ValidationError(msg.str());
        }
        const double fd2 = (w.deriv1(r + h) - w.deriv1(r - h)) / (2.0 * h);
        if (std::abs(fd2 - w.deriv2(r)) > fd_tol * scale2) {
            std::ostringstream msg;
            msg << "warping function: deriv2 disagrees with finite difference at r=" << r
                << " (fd=" << fd2 << ", deriv2=" << w.deriv2(r) << ")";
            throw ValidationError(msg.str());
        }
    }
}

ModelSpace make_model(int dim, WarpingFunction w) {
    if (dim < 2) throw ValidationError("model space: dimension must be >= 2");
    ModelSpace ms;
    ms.dim = dim;
    ms.warping = std::move(w);
    return ms;
}

static void check_radius(const ModelSpace& ms, double r, bool allow_zero) {
    if (std::isnan(r)) throw DomainError("radius is NaN");
    if (r < 0.0) throw DomainError("radius must be nonnegative");
    if (!allow_zero && r == 0.0) throw DomainError("radius must be positive");
    if (r > ms.warping.domain_max) {
        std::ostringstream msg;
        msg << "radius " << r << " exceeds warping domain [0, " << ms.warping.domain_max << "]";
        throw DomainError(msg.str());
    }
}

double radial_curvature(const ModelSpace& ms, double r) {
    check_radius(ms, r, false);
    return -ms.warping.deriv2(r) / ms.warping.eval(r);
}

double eta(const ModelSpace& ms, double r) {
    check_radius(ms, r, false);
    return ms.warping.deriv1(r) / ms.warping.eval(r);
}

double unit_sphere_area(int m) {
    if (m < 2) throw ValidationError("unit_sphere_area: dimension must be >= 2");
    return 2.0 * std::pow(M_PI, 0.5 * m) / std::tgamma(0.5 * m);
}

double sphere_volume(const ModelSpace& ms, double r) {
    check_radius(ms, r, true);
    return unit_sphere_area(ms.dim) * std::pow(ms.warping.eval(r), ms.dim - 1);
}

double ball_volume(const ModelSpace& ms, double r) {
    check_radius(ms, r, true);
    if (r == 0.0) return 0.0;
    const auto& w = ms.warping;
    const int p = ms.dim - 1;
    auto integrand = [&w, p](double t) { return std::pow(w.eval(t), p); };
    return unit_sphere_area(ms.dim) * integrate(integrand, 0.0, r).value;
}

double isoperimetric_quotient(const ModelSpace& ms, double r) {
    check_radius(ms, r, true);
    if (r == 0.0) return 0.0;
    return ball_volume(ms, r) / sphere_volume(ms, r);
}

} // namespace exitspec
