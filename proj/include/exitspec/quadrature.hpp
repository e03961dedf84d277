#ifndef EXITSPEC_QUADRATURE_HPP
#define EXITSPEC_QUADRATURE_HPP

#include <functional>

namespace exitspec {

struct QuadratureResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int intervals = 0;
};

/// Adaptive Gauss7/Kronrod15 integration of f over [a, b].
///
/// Intervals are bisected (worst first) until the summed Kronrod error
/// estimate meets rel_tol * |integral| or the absolute floor. Throws
/// NumericError when the interval budget is exhausted, carrying the worst
/// remaining interval in the message.
QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double rel_tol = 1e-10, double abs_floor = 1e-14,
                           int max_intervals = 2000);

} // namespace exitspec

#endif
