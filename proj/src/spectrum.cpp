#include "exitspec/spectrum.hpp"
#include "exitspec/errors.hpp"
#include "exitspec/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace exitspec {

const char* to_string(Provenance p) {
    switch (p) {
        case Provenance::quadrature: return "quadrature";
        case Provenance::boundary_derivative: return "boundary_derivative";
        case Provenance::mesh: return "mesh";
        case Provenance::monte_carlo: return "monte_carlo";
    }
    return "unknown";
}

double RadialProfileSet::eval(int k, double r) const {
    if (k < 0 || k > max_order) throw UsageError("profile order out of range");
    return u[static_cast<size_t>(k)].eval(r);
}

double RadialProfileSet::eval_deriv(int k, double r) const {
    if (k < 0 || k > max_order) throw UsageError("profile order out of range");
    return du[static_cast<size_t>(k)].eval(r);
}

namespace {

// q(r) = int_0^r w^{m-1} u dt / w^{m-1}(r), evaluated through the
// substitution t = sigma*r so the removable 0/0 at r = 0 never forms:
// q(r) = r * int_0^1 (w(sigma r)/w(r))^{m-1} u(sigma r) dsigma.
double hierarchy_quotient(const WarpingFunction& w, int m, const PiecewiseCheb& u_prev,
                          double r, double R) {
    if (r <= 0.0) return 0.0;
    if (r < 1e-12 * R) return u_prev.eval(0.0) * r / m;
    const double wr = w.eval(r);
    auto integrand = [&](double sigma) {
        const double ratio = sigma == 0.0 ? 0.0 : w.eval(sigma * r) / wr;
        return std::pow(ratio, m - 1) * u_prev.eval(sigma * r);
    };
    return r * integrate(integrand, 0.0, 1.0, 1e-12, 1e-15).value;
}

} // namespace

RadialProfileSet solve_hierarchy(const ModelSpace& model, double R, int K, double tol) {
    if (!(R > 0.0)) throw DomainError("solve_hierarchy: R must be positive");
    if (R > model.warping.domain_max) {
        std::ostringstream msg;
        msg << "solve_hierarchy: R=" << R << " exceeds warping domain [0, "
            << model.warping.domain_max << "]";
        throw DomainError(msg.str());
    }
    if (K < 0) throw UsageError("solve_hierarchy: K must be >= 0");
    if (!(tol > 0.0)) throw ValidationError("solve_hierarchy: tol must be positive");

    const int m = model.dim;
    const auto& w = model.warping;

    RadialProfileSet prof;
    prof.dim = m;
    prof.R = R;
    prof.max_order = K;
    prof.tol = tol;
    prof.model_id = w.id;
    prof.boundary_factor = std::pow(w.eval(R), m - 1);

    prof.u.push_back(PiecewiseCheb::constant(1.0, 0.0, R));
    prof.du.push_back(PiecewiseCheb::constant(0.0, 0.0, R));

    auto weighted_integral = [&](const PiecewiseCheb& uk) {
        auto f = [&](double t) { return std::pow(w.eval(t), m - 1) * uk.eval(t); };
        return integrate(f, 0.0, R, 1e-12, 1e-15).value;
    };
    prof.inner_at_R.push_back(weighted_integral(prof.u[0]));

    for (int k = 1; k <= K; ++k) {
        const PiecewiseCheb& u_prev = prof.u[static_cast<size_t>(k - 1)];
        auto quot = [&](double r) { return hierarchy_quotient(w, m, u_prev, r, R); };
        PiecewiseCheb Q = PiecewiseCheb::build(quot, 0.0, R, tol, u_prev.breakpoints());
        PiecewiseCheb J = Q.antiderivative();
        // u_k(r) = k * (J(R) - J(r)),  u_k'(r) = -k * Q(r)
        prof.u.push_back(J.affine(-static_cast<double>(k), static_cast<double>(k) * J.eval(R)));
        prof.du.push_back(Q.affine(-static_cast<double>(k), 0.0));
        prof.inner_at_R.push_back(weighted_integral(prof.u[static_cast<size_t>(k)]));
    }
    return prof;
}

double exit_moment(const RadialProfileSet& profiles, int k) {
    if (k < 0 || k > profiles.max_order - 1)
        throw UsageError("exit_moment: order k must satisfy 0 <= k <= max_order-1");
    return -profiles.du[static_cast<size_t>(k + 1)].eval(profiles.R) / (k + 1);
}

MomentSpectrum moment_spectrum(const ModelSpace& model, double R, int K, double tol) {
    RadialProfileSet prof = solve_hierarchy(model, R, K + 1, tol);
    MomentSpectrum sp;
    sp.model_id = model.warping.id;
    if (model.warping.kind == WarpingFunction::Kind::space_form) {
        std::ostringstream b;
        b.precision(17);
        b << model.warping.space_form_b;
        sp.b_label = b.str();
    } else if (model.warping.id.rfind("custom:", 0) == 0) {
        sp.b_label = model.warping.id;
    } else {
        sp.b_label = "custom:" + model.warping.id;
    }
    sp.dim = model.dim;
    sp.R = R;
    sp.tol = tol;
    sp.provenance = Provenance::boundary_derivative;
    const double boundary_area = unit_sphere_area(model.dim) * prof.boundary_factor;
    for (int k = 0; k <= K; ++k) {
        const double a = exit_moment(prof, k);
        sp.A_hat.push_back(a);
        sp.A_raw.push_back(a * boundary_area);
    }
    return sp;
}

DivergenceCheck verify_divergence_identity(const ModelSpace& model,
                                           const RadialProfileSet& profiles, int k, double tol) {
    if (k < 0 || k > profiles.max_order - 1)
        throw UsageError("verify_divergence_identity: k out of range");
    const int m = model.dim;
    const auto& w = model.warping;
    const auto& uk = profiles.u[static_cast<size_t>(k)];
    auto f = [&](double t) { return std::pow(w.eval(t), m - 1) * uk.eval(t); };
    DivergenceCheck out;
    out.volume_side = integrate(f, 0.0, profiles.R, 1e-12, 1e-15).value / profiles.boundary_factor;
    out.boundary_side = exit_moment(profiles, k);
    const double scale = std::max(std::abs(out.volume_side), std::abs(out.boundary_side));
    out.rel_gap = scale == 0.0 ? 0.0 : std::abs(out.volume_side - out.boundary_side) / scale;
    out.ok = out.rel_gap <= tol;
    return out;
}

double verify_ode_residual(const ModelSpace& model, const RadialProfileSet& profiles, int k,
                           int grid_points) {
    if (k < 1 || k > profiles.max_order) throw UsageError("verify_ode_residual: k out of range");
    if (grid_points < 2) throw UsageError("verify_ode_residual: need at least 2 grid points");
    const int m = model.dim;
    const double R = profiles.R;
    const auto& uk = profiles.u[static_cast<size_t>(k)];
    const auto& uprev = profiles.u[static_cast<size_t>(k - 1)];
    const auto& duk = profiles.du[static_cast<size_t>(k)];

    const double h = 3e-3 * R;
    const double lo = std::max(1e-3 * R, 2.0 * h);
    const double hi = R - 2.0 * h;
    const double scale = static_cast<double>(k) * std::abs(uprev.eval(0.0));

    double worst = 0.0;
    for (int i = 0; i < grid_points; ++i) {
        const double t = static_cast<double>(i) / (grid_points - 1);
        const double r = lo * std::pow(hi / lo, t);
        // five-point second difference keeps truncation below interpolant noise
        const double d2 = (-uk.eval(r + 2 * h) + 16 * uk.eval(r + h) - 30 * uk.eval(r) +
                           16 * uk.eval(r - h) - uk.eval(r - 2 * h)) /
                          (12 * h * h);
        const double d1 = duk.eval(r);
        const double et = model.warping.deriv1(r) / model.warping.eval(r);
        const double res = d2 + (m - 1) * et * d1 + k * uprev.eval(r);
        worst = std::max(worst, std::abs(res));
    }
    return scale == 0.0 ? worst : worst / scale;
}

} // namespace exitspec
