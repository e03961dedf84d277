#ifndef EXITSPEC_TEST_SUPPORT_HPP
#define EXITSPEC_TEST_SUPPORT_HPP

// Independent reference solver for the exit-moment hierarchy, used to
// cross-check the production quadrature path. Deliberately shares no code
// with the library: uniform grid + cumulative Simpson only.

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace testsupport {

// C[i] = integral of f from x_0 to x_i on a uniform grid of spacing h.
inline std::vector<double> cumulative_simpson(const std::vector<double>& f, double h) {
    const size_t n = f.size();
    std::vector<double> C(n, 0.0);
    for (size_t i = 2; i < n; i += 2)
        C[i] = C[i - 2] + h / 3.0 * (f[i - 2] + 4.0 * f[i - 1] + f[i]);
    for (size_t i = 1; i < n; i += 2) {
        if (i + 1 < n)
            C[i] = C[i - 1] + h / 12.0 * (5.0 * f[i - 1] + 8.0 * f[i] - f[i + 1]);
        else
            C[i] = C[i - 1] + h / 12.0 * (-f[i - 2] + 8.0 * f[i - 1] + 5.0 * f[i]);
    }
    return C;
}

struct OracleHierarchy {
    int m = 2;
    double R = 1.0;
    int N = 4096; // even interval count
    std::vector<double> r;
    std::vector<double> wpow; // w^{m-1} on the grid
    std::vector<std::vector<double>> u; // u[k][i]
    std::vector<double> a_hat;          // volume-route moments, k = 0..K

    OracleHierarchy(const std::function<double(double)>& w, int m_, double R_, int K,
                    int N_ = 4096)
        : m(m_), R(R_), N(N_) {
        if (N % 2 != 0) throw std::invalid_argument("N must be even");
        const double h = R / N;
        r.resize(N + 1);
        wpow.resize(N + 1);
        for (int i = 0; i <= N; ++i) {
            r[i] = i * h;
            wpow[i] = std::pow(w(r[i]), m - 1);
        }
        u.assign(K + 1, std::vector<double>(N + 1, 0.0));
        for (int i = 0; i <= N; ++i) u[0][i] = 1.0;
        a_hat.resize(K + 1, 0.0);
        std::vector<double> f(N + 1), q(N + 1);
        for (int k = 0; k <= K; ++k) {
            for (int i = 0; i <= N; ++i) f[i] = wpow[i] * u[k][i];
            auto I = cumulative_simpson(f, h);
            a_hat[k] = I[N] / wpow[N];
            if (k + 1 <= K) {
                q[0] = 0.0;
                for (int i = 1; i <= N; ++i) q[i] = I[i] / wpow[i];
                auto J = cumulative_simpson(q, h);
                for (int i = 0; i <= N; ++i) u[k + 1][i] = (k + 1) * (J[N] - J[i]);
            }
        }
    }

    // piecewise-linear read-back for spot checks
    double eval(int k, double x) const {
        const double h = R / N;
        double t = x / h;
        int i = std::min(static_cast<int>(t), N - 1);
        double frac = t - i;
        return u[k][i] * (1.0 - frac) + u[k][i + 1] * frac;
    }
};

} // namespace testsupport

#endif
