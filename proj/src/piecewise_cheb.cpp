#include "exitspec/piecewise_cheb.hpp"
#include "exitspec/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace exitspec {

namespace {

// Chebyshev coefficients from values at Lobatto points x_j = cos(pi j / n),
// j = 0..n, such that p(y) = sum_k c_k T_k(y) interpolates.
std::vector<double> lobatto_to_coef(const std::vector<double>& values) {
    const int n = static_cast<int>(values.size()) - 1;
    std::vector<double> coef(n + 1, 0.0);
    for (int k = 0; k <= n; ++k) {
        double acc = 0.0;
        for (int j = 0; j <= n; ++j) {
            const double wj = (j == 0 || j == n) ? 0.5 : 1.0;
            acc += wj * values[j] * std::cos(std::numbers::pi * j * k / n);
        }
        const double fk = (k == 0 || k == n) ? 1.0 : 2.0;
        coef[k] = fk * acc / n;
    }
    return coef;
}

double clenshaw(const std::vector<double>& c, double y) {
    double b1 = 0.0, b2 = 0.0;
    for (int k = static_cast<int>(c.size()) - 1; k >= 1; --k) {
        const double b = 2.0 * y * b1 - b2 + c[k];
        b2 = b1;
        b1 = b;
    }
    return y * b1 - b2 + c[0];
}

// Coefficients of the derivative on [-1, 1].
std::vector<double> deriv_coef(const std::vector<double>& c) {
    const int n = static_cast<int>(c.size()) - 1;
    std::vector<double> d(n + 1, 0.0);
    if (n == 0) return d;
    for (int k = n; k >= 1; --k) {
        d[k - 1] = (k + 1 <= n ? d[k + 1] : 0.0) + 2.0 * k * c[k];
    }
    d[0] *= 0.5;
    d[n] = 0.0;
    return d;
}

// Coefficients of the antiderivative on [-1, 1] with F(-1) = 0.
std::vector<double> antideriv_coef(const std::vector<double>& c) {
    const int n = static_cast<int>(c.size()) - 1;
    std::vector<double> b(n + 2, 0.0);
    auto cc = [&](int k) { return (k >= 0 && k <= n) ? c[k] : 0.0; };
    for (int k = 1; k <= n + 1; ++k) {
        b[k] = (cc(k - 1) - cc(k + 1)) / (2.0 * k);
    }
    b[1] = cc(0) - 0.5 * cc(2);
    double at_minus1 = 0.0;
    for (int k = 1; k <= n + 1; ++k) at_minus1 += b[k] * ((k % 2 == 0) ? 1.0 : -1.0);
    b[0] = -at_minus1;
    return b;
}

} // namespace

double ChebPanel::eval(double x) const {
    const double y = (2.0 * x - a - b) / (b - a);
    return clenshaw(coef, y);
}

double ChebPanel::tail_magnitude() const {
    const int n = static_cast<int>(coef.size());
    double t = 0.0;
    for (int k = std::max(0, n - 3); k < n; ++k) t = std::max(t, std::abs(coef[k]));
    return t;
}

PiecewiseCheb PiecewiseCheb::constant(double value, double lo, double hi) {
    PiecewiseCheb out;
    out.lo_ = lo;
    out.hi_ = hi;
    ChebPanel p;
    p.a = lo;
    p.b = hi;
    p.coef = {value};
    out.panels_.push_back(std::move(p));
    return out;
}

PiecewiseCheb PiecewiseCheb::build(const std::function<double(double)>& f, double lo, double hi,
                                   double tol, const std::vector<double>& breakpoints,
                                   int points_per_panel, int max_depth) {
    if (!(hi > lo)) throw UsageError("PiecewiseCheb::build: empty interval");
    const int n = points_per_panel - 1;

    std::vector<double> edges{lo, hi};
    for (double bp : breakpoints) {
        if (bp > lo && bp < hi) edges.push_back(bp);
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());

    auto sample_panel = [&](double a, double b) {
        ChebPanel p;
        p.a = a;
        p.b = b;
        std::vector<double> values(n + 1);
        for (int j = 0; j <= n; ++j) {
            const double y = std::cos(std::numbers::pi * j / n);
            values[j] = f(0.5 * (a + b) + 0.5 * (b - a) * y);
        }
        p.coef = lobatto_to_coef(values);
        return p;
    };

    // First pass over seed panels to estimate the global scale.
    std::vector<std::pair<ChebPanel, int>> work; // panel, depth
    double scale = 0.0;
    for (size_t i = 0; i + 1 < edges.size(); ++i) {
        ChebPanel p = sample_panel(edges[i], edges[i + 1]);
        for (double c : p.coef) scale = std::max(scale, std::abs(c));
        work.emplace_back(std::move(p), 0);
    }
    scale = std::max(scale, 1e-300);

    PiecewiseCheb out;
    out.lo_ = lo;
    out.hi_ = hi;
    std::vector<ChebPanel> done;
    while (!work.empty()) {
        auto [p, depth] = std::move(work.back());
        work.pop_back();
        for (double c : p.coef) scale = std::max(scale, std::abs(c));
        if (p.tail_magnitude() <= tol * scale || depth >= max_depth) {
            if (depth >= max_depth && p.tail_magnitude() > 1e3 * tol * scale) {
                throw NumericError("PiecewiseCheb::build: panel refinement stalled near [" +
                                   std::to_string(p.a) + ", " + std::to_string(p.b) + "]");
            }
            done.push_back(std::move(p));
        } else {
            const double mid = 0.5 * (p.a + p.b);
            work.emplace_back(sample_panel(mid, p.b), depth + 1);
            work.emplace_back(sample_panel(p.a, mid), depth + 1);
        }
    }
    std::sort(done.begin(), done.end(),
              [](const ChebPanel& x, const ChebPanel& y) { return x.a < y.a; });
    out.panels_ = std::move(done);
    return out;
}

const ChebPanel& PiecewiseCheb::panel_at(double x) const {
    if (panels_.empty()) throw UsageError("PiecewiseCheb: empty");
    auto it = std::upper_bound(panels_.begin(), panels_.end(), x,
                               [](double v, const ChebPanel& p) { return v < p.b; });
    if (it == panels_.end()) --it;
    return *it;
}

double PiecewiseCheb::eval(double x) const { return panel_at(x).eval(x); }

double PiecewiseCheb::deriv(double x) const {
    const ChebPanel& p = panel_at(x);
    const double y = (2.0 * x - p.a - p.b) / (p.b - p.a);
    return clenshaw(deriv_coef(p.coef), y) * 2.0 / (p.b - p.a);
}

PiecewiseCheb PiecewiseCheb::antiderivative() const {
    PiecewiseCheb out;
    out.lo_ = lo_;
    out.hi_ = hi_;
    out.panels_.reserve(panels_.size());
    double offset = 0.0;
    for (const ChebPanel& p : panels_) {
        ChebPanel q;
        q.a = p.a;
        q.b = p.b;
        q.coef = antideriv_coef(p.coef);
        const double h = 0.5 * (p.b - p.a);
        for (double& c : q.coef) c *= h;
        q.coef[0] += offset;
        offset = q.eval(p.b);
        out.panels_.push_back(std::move(q));
    }
    return out;
}

PiecewiseCheb PiecewiseCheb::derivative() const {
    PiecewiseCheb out;
    out.lo_ = lo_;
    out.hi_ = hi_;
    out.panels_.reserve(panels_.size());
    for (const ChebPanel& p : panels_) {
        ChebPanel q;
        q.a = p.a;
        q.b = p.b;
        q.coef = deriv_coef(p.coef);
        const double s = 2.0 / (p.b - p.a);
        for (double& c : q.coef) c *= s;
        out.panels_.push_back(std::move(q));
    }
    return out;
}

PiecewiseCheb PiecewiseCheb::affine(double alpha, double beta) const {
    PiecewiseCheb out = *this;
    for (ChebPanel& p : out.panels_) {
        for (double& c : p.coef) c *= alpha;
        p.coef[0] += beta;
    }
    return out;
}

double PiecewiseCheb::definite_integral() const {
    double total = 0.0;
    for (const ChebPanel& p : panels_) {
        // Integral of sum c_k T_k over [-1,1]: only even k contribute.
        double acc = 0.0;
        for (size_t k = 0; k < p.coef.size(); k += 2) {
            const double kk = static_cast<double>(k);
            acc += p.coef[k] * 2.0 / (1.0 - kk * kk);
        }
        total += acc * 0.5 * (p.b - p.a);
    }
    return total;
}

double PiecewiseCheb::max_abs() const {
    double m = 0.0;
    for (const ChebPanel& p : panels_) {
        double s = 0.0;
        for (double c : p.coef) s += std::abs(c);
        m = std::max(m, s);
    }
    return m;
}

std::vector<double> PiecewiseCheb::breakpoints() const {
    std::vector<double> out;
    out.reserve(panels_.size() + 1);
    for (const ChebPanel& p : panels_) out.push_back(p.a);
    if (!panels_.empty()) out.push_back(panels_.back().b);
    return out;
}

} // namespace exitspec
