#include "exitspec/comparison.hpp"
#include "exitspec/errors.hpp"
#include "exitspec/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <sstream>

namespace exitspec {

double StretchingMap::s_of_r(double r) const {
    if (identity) return r;
    return forward.eval(std::clamp(r, 0.0, R));
}

double StretchingMap::r_of_s(double s) const {
    if (identity) return s;
    return std::clamp(inverse.eval(std::clamp(s, 0.0, S)), 0.0, R);
}

static void validate_tangency(const RadialExpression& g, double R) {
    if (!g.valid()) throw ValidationError("tangency bound g is not set");
    const double g0 = g.value(0.0);
    if (!(std::abs(g0 - 1.0) <= 1e-10))
        throw ValidationError("tangency bound: g(0) must equal 1");
    for (int i = 0; i <= 256; ++i) {
        const double r = R * i / 256.0;
        const double v = g.value(r);
        if (!(v > 0.0) || !(v <= 1.0 + 1e-12)) {
            std::ostringstream msg;
            msg << "tangency bound: g(" << r << ") = " << v << " outside (0, 1]";
            throw ValidationError(msg.str());
        }
    }
}

static bool is_identity_g(const RadialExpression& g, double R) {
    for (int i = 0; i <= 64; ++i)
        if (std::abs(g.value(R * i / 64.0) - 1.0) > 1e-14) return false;
    return true;
}

StretchingMap build_stretching(const RadialExpression& g, double R, double tol) {
    if (!(R > 0.0)) throw DomainError("build_stretching: R must be positive");
    validate_tangency(g, R);
    StretchingMap st;
    st.R = R;
    if (is_identity_g(g, R)) {
        st.identity = true;
        st.S = R;
        return st;
    }
    PiecewiseCheb inv_g = PiecewiseCheb::build([&g](double r) { return 1.0 / g.value(r); },
                                               0.0, R, tol);
    st.forward = inv_g.antiderivative();
    st.S = st.forward.eval(R);

    std::vector<double> seeds;
    for (double b : st.forward.breakpoints())
        if (b > 0.0 && b < R) seeds.push_back(st.forward.eval(b));
    const PiecewiseCheb& fwd = st.forward;
    auto invert = [&fwd, R](double s) {
        double lo = 0.0, hi = R;
        for (int i = 0; i < 64; ++i) {
            const double mid = 0.5 * (lo + hi);
            (fwd.eval(mid) < s ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    st.inverse = PiecewiseCheb::build(invert, 0.0, st.S, std::max(tol, 1e-13), seeds);
    return st;
}

namespace {

struct WCore {
    int m = 2;
    double R = 0.0, S = 0.0;
    WarpingFunction w;
    RadialExpression g;
    RadialExpression h;
    PiecewiseCheb psi, psi_deriv, E;
    StretchingMap stretch;

    double lambda_over_rpow(double r) const { // Lambda / r^{m-1}, benign at small r
        return (r / w.eval(r)) * std::exp(E.eval(r)) / g.value(r);
    }
    double W_value(double s) const {
        if (s <= 0.0) return 0.0;
        double r = stretch.r_of_s(std::min(s, S));
        if (r <= 0.0) return s; // W ~ s at the origin
        r = std::min(r, R);
        return r * std::pow(lambda_over_rpow(r), 1.0 / (m - 1.0));
    }
    Dual2 W_dual(double s) const {
        const double s_eps = 1e-9 * S;
        const double sc = std::clamp(s, s_eps, S);
        const double r = std::clamp(stretch.r_of_s(sc), 1e-12 * R, R);
        const double gv = g.value(r), g1 = g.deriv1(r), g2 = g.deriv2(r);
        Dual2 rd{r, gv, g1 * gv};
        Dual2 wd = dual_compose(rd, w.eval(r), w.deriv1(r), w.deriv2(r));
        Dual2 Ed = dual_compose(rd, E.eval(r), psi.eval(r), psi_deriv.eval(r));
        Dual2 gd = dual_compose(rd, gv, g1, g2);
        Dual2 base = rd / wd * dual_exp(Ed) / gd;
        return rd * dual_pow(base, 1.0 / (m - 1.0));
    }
};

} // namespace

double ComparisonSpace::lambda(double r) const {
    if (r <= 0.0) return 0.0;
    return std::pow(r, dim - 1) * (r / base_w.eval(r)) * std::exp(E.eval(r)) / bounds.g.value(r);
}

double ComparisonSpace::W_of_s(double s) const { return model.warping.eval(s); }

// coth(x) - 1/x without the 1/x cancellation.
static double coth_excess(double x) {
    if (std::abs(x) < 0.15) {
        const double x2 = x * x;
        return x * (1.0 / 3.0 +
                    x2 * (-1.0 / 45.0 + x2 * (2.0 / 945.0 + x2 * (-1.0 / 4725.0 + x2 * (2.0 / 93555.0)))));
    }
    return std::cosh(x) / std::sinh(x) - 1.0 / x;
}

// cot(x) - 1/x without the 1/x cancellation.
static double cot_excess(double x) {
    if (std::abs(x) < 0.15) {
        const double x2 = x * x;
        return -x * (1.0 / 3.0 +
                     x2 * (1.0 / 45.0 + x2 * (2.0 / 945.0 + x2 * (1.0 / 4725.0 + x2 * (2.0 / 93555.0)))));
    }
    return std::cos(x) / std::sin(x) - 1.0 / x;
}

// D(r) = w'(r)/w(r) - 1/r. Space forms get exact series/closed forms;
// generic w is bridged linearly below r_c where the direct quotient
// loses digits to cancellation.
static std::function<double(double)> make_eta_excess(const WarpingFunction& w, double R) {
    if (w.kind == WarpingFunction::Kind::space_form) {
        const double b = w.space_form_b;
        if (b == 0.0) return [](double) { return 0.0; };
        if (b < 0.0) {
            const double sb = std::sqrt(-b);
            return [sb](double r) { return sb * coth_excess(sb * r); };
        }
        const double sb = std::sqrt(b);
        return [sb](double r) { return sb * cot_excess(sb * r); };
    }
    auto direct = [&w](double r) {
        return (r * w.deriv1(r) - w.eval(r)) / (r * w.eval(r));
    };
    const double rc = 1e-3 * R;
    const double D0 = 0.5 * w.deriv2(0.0);
    const double Drc = direct(rc);
    WarpingFunction wc = w;
    return [wc, rc, D0, Drc](double r) {
        if (r >= rc) return (r * wc.deriv1(r) - wc.eval(r)) / (r * wc.eval(r));
        return D0 + (Drc - D0) * (r / rc);
    };
}

// Gq(r) = (1 - g(r)^2)/r, with the same near-zero bridging.
static std::function<double(double)> make_tangency_excess(const RadialExpression& g, double R) {
    auto direct = [&g](double r) {
        const double gv = g.value(r);
        return (1.0 - gv * gv) / r;
    };
    const double rc = 1e-3 * R;
    const double G0 = -2.0 * g.deriv1(0.0);
    const double Grc = direct(rc);
    RadialExpression gc = g;
    return [gc, rc, G0, Grc](double r) {
        if (r >= rc) {
            const double gv = gc.value(r);
            return (1.0 - gv * gv) / r;
        }
        if (r <= 0.0) return G0;
        return G0 + (Grc - G0) * (r / rc);
    };
}

ComparisonSpace build_comparison_space(const WarpingFunction& w, BoundingFunctions bounds,
                                       int m, double R, double tol, std::string* warning) {
    if (m < 2) throw ValidationError("build_comparison_space: m must be >= 2");
    if (!(R > 0.0)) throw DomainError("build_comparison_space: R must be positive");
    if (R > w.domain_max) throw DomainError("build_comparison_space: R exceeds warping domain");
    if (!bounds.g.valid()) bounds.g = parse_radial_expression("1");
    if (!bounds.h.valid()) bounds.h = parse_radial_expression("0");

    if (bounds.side == BoundingFunctions::Side::above && !is_identity_g(bounds.g, R)) {
        if (warning)
            *warning = "side=above fixes the tangency bound g == 1; ignoring g = " +
                       bounds.g.source();
        bounds.g = parse_radial_expression("1");
    }
    validate_tangency(bounds.g, R);

    // psi = m[(w' - hw)/(wg^2) - 1/r] recombined as m(D + Gq - h)/g^2,
    // where D and Gq are the cancellation-free pieces above.
    auto D = make_eta_excess(w, R);
    auto Gq = make_tangency_excess(bounds.g, R);
    const RadialExpression h = bounds.h;
    const RadialExpression g = bounds.g;
    auto psi_fn = [D, Gq, h, g, m](double r) {
        const double gv = g.value(r);
        return m * (D(r) + Gq(r) - h.value(r)) / (gv * gv);
    };

    {
        // reject h so singular at 0 that the regularized log-derivative
        // cannot be represented (e.g. h ~ c/r)
        const double eps = 1e-6 * R;
        double prev = std::abs(psi_fn(16.0 * eps));
        bool growing = true;
        double first = 0.0;
        for (double f : {8.0, 4.0, 2.0, 1.0}) {
            const double cur = std::abs(psi_fn(f * eps));
            if (cur < 1.2 * prev) growing = false;
            prev = cur;
            if (f == 1.0) first = cur;
        }
        if (!std::isfinite(first))
            throw ValidationError("comparison space: singular data near r = 0");
        if (growing && first > 100.0 * (1.0 + std::abs(psi_fn(0.5 * R))))
            throw ValidationError(
                "comparison space: h is too singular near r = 0 (log-derivative blows up)");
    }

    ComparisonSpace cs;
    cs.dim = m;
    cs.R = R;
    cs.base_w = w;
    cs.bounds = bounds;
    cs.stretch = build_stretching(bounds.g, R, tol);
    cs.S = cs.stretch.S;
    std::vector<double> seeds{1e-3 * R}; // bridging points of D and Gq
    if (w.kind == WarpingFunction::Kind::space_form && w.space_form_b != 0.0)
        seeds.push_back(0.15 / std::sqrt(std::abs(w.space_form_b))); // series switch
    cs.psi = PiecewiseCheb::build(psi_fn, 0.0, R, std::min(tol, 1e-12), seeds);
    cs.psi_deriv = cs.psi.derivative();
    cs.E = cs.psi.antiderivative();

    auto core = std::make_shared<WCore>();
    core->m = m;
    core->R = R;
    core->S = cs.S;
    core->w = w;
    core->g = bounds.g;
    core->h = bounds.h;
    core->psi = cs.psi;
    core->psi_deriv = cs.psi_deriv;
    core->E = cs.E;
    core->stretch = cs.stretch;

    // sanity: Lambda must stay positive and finite across the domain
    for (int i = 1; i <= 64; ++i) {
        const double r = R * i / 64.0;
        const double lam = std::pow(r, m - 1) * core->lambda_over_rpow(r);
        if (!std::isfinite(lam) || !(lam > 0.0)) {
            std::ostringstream msg;
            msg << "comparison space: Lambda(" << r << ") = " << lam << " is not positive";
            throw NumericError(msg.str());
        }
    }

    WarpingFunction W;
    W.kind = WarpingFunction::Kind::custom;
    W.domain_max = cs.S;
    {
        std::ostringstream id;
        id << "C" << m << "[" << w.id << ";g=" << bounds.g.source() << ";h=" << bounds.h.source()
           << "]";
        W.id = id.str();
    }
    W.eval = [core](double s) { return core->W_value(s); };
    W.deriv1 = [core](double s) {
        if (s < 1e-9 * core->S) return 1.0;
        return core->W_dual(s).d1;
    };
    W.deriv2 = [core](double s) { return core->W_dual(s).d2; };

    cs.model = make_model(m, W);
    return cs;
}

double lambda_ode_residual(const ComparisonSpace& cs, int grid_points) {
    const double R = cs.R;
    const auto& w = cs.base_w;
    const auto& g = cs.bounds.g;
    const auto& h = cs.bounds.h;
    const int m = cs.dim;
    auto F = [&](double r) { return cs.lambda(r) * w.eval(r) * g.value(r); };
    auto rhs = [&](double r) {
        return m * cs.lambda(r) * (w.deriv1(r) - h.value(r) * w.eval(r)) / g.value(r);
    };
    const double hstep = 1e-5 * R;
    const double lo = 1e-2 * R, hi = R - 2.0 * hstep;
    double scale = 0.0, worst = 0.0;
    std::vector<double> rs, residuals;
    for (int i = 0; i < grid_points; ++i) {
        const double t = static_cast<double>(i) / (grid_points - 1);
        const double r = lo * std::pow(hi / lo, t);
        const double fd = (F(r + hstep) - F(r - hstep)) / (2.0 * hstep);
        const double v = rhs(r);
        scale = std::max(scale, std::abs(v));
        rs.push_back(r);
        residuals.push_back(fd - v);
    }
    for (double res : residuals) worst = std::max(worst, std::abs(res));
    return scale > 0.0 ? worst / scale : worst;
}

double comparison_iso_quotient(const ComparisonSpace& cs, double r) {
    if (r < 0.0) throw DomainError("comparison_iso_quotient: r must be nonnegative");
    if (r == 0.0) return 0.0;
    if (r > cs.R) throw DomainError("comparison_iso_quotient: r exceeds the domain");
    const int m = cs.dim;
    const auto& w = cs.base_w;
    const auto& g = cs.bounds.g;
    const double wr = w.eval(r), gr = g.value(r), Er = cs.E.eval(r);
    auto integrand = [&](double sigma) {
        if (sigma <= 0.0) return 0.0;
        const double t = sigma * r;
        const double lam_ratio = std::pow(sigma, m) * (wr / w.eval(t)) * (gr / g.value(t)) *
                                 std::exp(cs.E.eval(t) - Er);
        return lam_ratio / g.value(t);
    };
    return r * integrate(integrand, 0.0, 1.0, 1e-11, 1e-15).value;
}

double balance_margin(const ComparisonSpace& cs, double r) {
    const double q = comparison_iso_quotient(cs, r);
    const double et = cs.base_w.deriv1(r) / cs.base_w.eval(r);
    return q * (et - cs.bounds.h.value(r)) - cs.bounds.g.value(r) / cs.dim;
}

BalanceReport balance_check(const ComparisonSpace& cs, bool strict, int grid_points) {
    if (grid_points < 2) throw UsageError("balance_check: need at least 2 grid points");
    BalanceReport rep;
    rep.eta_minus_h_positive = true;
    rep.min_margin = std::numeric_limits<double>::infinity();
    const double lo = 1e-3 * cs.R, hi = cs.R;
    for (int i = 0; i < grid_points; ++i) {
        const double t = static_cast<double>(i) / (grid_points - 1);
        const double r = lo * std::pow(hi / lo, t);
        const double margin = balance_margin(cs, r);
        const double et = cs.base_w.deriv1(r) / cs.base_w.eval(r);
        if (!(et - cs.bounds.h.value(r) > 0.0)) rep.eta_minus_h_positive = false;
        rep.grid_r.push_back(r);
        rep.margins.push_back(margin);
        if (margin < rep.min_margin) {
            rep.min_margin = margin;
            rep.min_margin_r = r;
        }
    }
    rep.balanced = rep.min_margin >= -1e-11;
    rep.strictly_balanced = rep.min_margin > 1e-11;
    (void)strict;
    return rep;
}

LemmaParenReport lemma_paren_check(const ComparisonSpace& cs, int K, int grid_points,
                                   double tol) {
    if (K < 1) throw UsageError("lemma_paren_check: K must be >= 1");
    RadialProfileSet prof = solve_hierarchy(cs.model, cs.S, K, tol);
    LemmaParenReport rep;
    rep.min_value = std::numeric_limits<double>::infinity();
    const double lo = 1e-3 * cs.R, hi = cs.R;
    const int m = cs.dim;
    for (int k = 1; k <= K; ++k) {
        for (int i = 0; i < grid_points; ++i) {
            const double t = static_cast<double>(i) / (grid_points - 1);
            const double r = lo * std::pow(hi / lo, t);
            const double s = cs.stretch.s_of_r(r);
            const double gv = cs.bounds.g.value(r);
            const double f_prev = prof.eval(k - 1, s);
            const double fk_prime = prof.eval_deriv(k, s) / gv;
            const double et = cs.base_w.deriv1(r) / cs.base_w.eval(r);
            const double v =
                (-k * f_prev - m * (et - cs.bounds.h.value(r)) * fk_prime) / (gv * gv);
            if (v < rep.min_value) {
                rep.min_value = v;
                rep.min_k = k;
                rep.min_r = r;
            }
        }
    }
    return rep;
}

Constellation make_constellation(int n, int m, const WarpingFunction& w,
                                 BoundingFunctions bounds, double R, double tol,
                                 std::string* warning) {
    if (n < m) throw ValidationError("constellation: ambient dimension n must be >= m");
    if (m < 2) throw ValidationError("constellation: submanifold dimension m must be >= 2");
    Constellation con;
    con.ambient_dim = n;
    con.sub_dim = m;
    con.R = R;
    con.comparison = build_comparison_space(w, std::move(bounds), m, R, tol, warning);
    return con;
}

MomentSpectrum spectrum_bound(const Constellation& con, int K, double tol) {
    BalanceReport br = balance_check(con.comparison, false, 512);
    if (br.min_margin < -1e-9) {
        std::ostringstream msg;
        msg << "comparison space is not balanced: min margin " << br.min_margin << " at r="
            << br.min_margin_r << "; the bound is not asserted";
        throw HypothesisError(msg.str());
    }
    const bool below = con.comparison.bounds.side == BoundingFunctions::Side::below;
    const double ball_R = below ? con.comparison.S : con.comparison.R;
    return moment_spectrum(con.comparison.model, ball_R, K, tol);
}

IntrinsicComparison compare_intrinsic(const ModelSpace& N_model, const ModelSpace& bound_model,
                                      double R, int K, Direction direction, double tol) {
    if (N_model.dim != bound_model.dim)
        throw ValidationError("compare_intrinsic: models must share the dimension");
    const double lo = 1e-3 * R;
    for (int i = 0; i < 64; ++i) {
        const double t = static_cast<double>(i) / 63.0;
        const double r = lo * std::pow(R / lo, t);
        const double kN = radial_curvature(N_model, r);
        const double kB = radial_curvature(bound_model, r);
        const double ctol = 1e-9 * (1.0 + std::abs(kB));
        const bool ok = direction == Direction::le ? kN <= kB + ctol : kN >= kB - ctol;
        if (!ok) {
            std::ostringstream msg;
            msg << "curvature ordering contradicts the asserted direction at r=" << r << " (K_N="
                << kN << ", K_bound=" << kB << ")";
            throw HypothesisError(msg.str());
        }
    }
    MomentSpectrum spN = moment_spectrum(N_model, R, K, tol);
    MomentSpectrum spB = moment_spectrum(bound_model, R, K, tol);
    IntrinsicComparison out;
    out.direction = direction;
    out.a_N = spN.A_hat;
    out.a_bound = spB.A_hat;
    out.all_hold = true;
    for (int k = 0; k <= K; ++k) {
        const double aN = out.a_N[static_cast<size_t>(k)];
        const double aB = out.a_bound[static_cast<size_t>(k)];
        const double margin = direction == Direction::le ? aB - aN : aN - aB;
        out.margins.push_back(margin);
        if (margin < -1e-10 * std::max(std::abs(aN), std::abs(aB))) out.all_hold = false;
    }
    return out;
}

} // namespace exitspec
