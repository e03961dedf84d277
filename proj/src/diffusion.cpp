#include "exitspec/diffusion.hpp"
#include "exitspec/errors.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

namespace exitspec {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
// Broadie-Glasserman-Kou barrier correction constant, -zeta(1/2)/sqrt(2*pi).
constexpr double kBarrierShift = 0.5826;

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

// Counter-based stream: draw n of path p depends only on (seed, p, n), so
// results are identical under any thread schedule.
struct CounterRng {
    std::uint64_t base;
    std::uint64_t counter = 0;
    bool have_spare = false;
    double spare = 0.0;

    CounterRng(std::uint64_t seed, std::uint64_t path) {
        base = splitmix64(splitmix64(seed ^ 0xD1B54A32D192ED03ull) +
                          0x9E3779B97F4A7C15ull * (path + 1));
    }

    std::uint64_t next_u64() { return splitmix64(base + 0x9E3779B97F4A7C15ull * (++counter)); }

    double next_uniform() { // in (0,1)
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double next_normal() {
        if (have_spare) {
            have_spare = false;
            return spare;
        }
        double u1 = next_uniform();
        double u2 = next_uniform();
        double mag = std::sqrt(-2.0 * std::log(u1));
        double ang = kTwoPi * u2;
        spare = mag * std::sin(ang);
        have_spare = true;
        return mag * std::cos(ang);
    }
};

struct PathParams {
    const WarpingFunction* w;
    int m;
    double dt;
    double sqrt_2dt;
    double r_absorb;  // barrier pulled in by the continuity correction
    double r_center;  // below this, switch to the isotropic-norm update
    double r0;
    long max_steps;
};

// Returns the exit time of one path; throws NumericError on budget overrun.
double simulate_path(const PathParams& p, CounterRng& rng, std::uint64_t& steps_out) {
    double r = p.r0;
    double t = 0.0;
    long steps = 0;
    const int m = p.m;
    while (true) {
        if (++steps > p.max_steps)
            throw NumericError("diffusion path exceeded the step budget; "
                               "reduce dt or raise max_steps_per_path");
        double r_new;
        if (r < p.r_center) {
            // Norm of an m-dimensional Gaussian step from a point at radius r.
            double s = 0.0;
            double first = r + p.sqrt_2dt * rng.next_normal();
            s += first * first;
            for (int i = 1; i < m; ++i) {
                double g = p.sqrt_2dt * rng.next_normal();
                s += g * g;
            }
            r_new = std::sqrt(s);
        } else {
            double eta = p.w->deriv1(r) / p.w->eval(r);
            r_new = r + (m - 1) * eta * p.dt + p.sqrt_2dt * rng.next_normal();
            if (r_new < 0.0) r_new = -r_new;
        }
        if (r_new >= p.r_absorb) {
            double gap = r_new - r;
            double theta = gap > 0.0 ? (p.r_absorb - r) / gap : 1.0;
            theta = std::clamp(theta, 0.0, 1.0);
            t += theta * p.dt;
            break;
        }
        t += p.dt;
        r = r_new;
    }
    steps_out += static_cast<std::uint64_t>(steps);
    return t;
}

} // namespace

int worker_count(long jobs) {
    unsigned hw = std::thread::hardware_concurrency();
    long n = hw == 0 ? 1 : static_cast<long>(hw);
    if (const char* env = std::getenv("EXITSPEC_THREADS")) {
        char* end = nullptr;
        long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) n = std::min(n, cap);
    }
    n = std::min(n, std::max<long>(jobs, 1));
    return static_cast<int>(n);
}

double pairwise_sum(const double* v, std::size_t n) {
    if (n <= 16) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += v[i];
        return s;
    }
    std::size_t h = n / 2;
    return pairwise_sum(v, h) + pairwise_sum(v + h, n - h);
}

DiffusionResult sample_exit_moments(const DiffusionConfig& cfg) {
    const int m = cfg.model.dim;
    if (!(cfg.R > 0.0) || cfg.R > cfg.model.warping.domain_max)
        throw DomainError("ball radius must lie in (0, domain_max]");
    if (!(cfg.dt > 0.0)) throw ValidationError("dt must be positive");
    if (cfg.paths < 2) throw ValidationError("need at least 2 paths");
    if (cfg.max_order < 0 || cfg.max_order > 10)
        throw ValidationError("moment order must be in [0, 10]");
    if (!(cfg.r0 >= 0.0) || cfg.r0 >= cfg.R)
        throw DomainError("start radius must lie in [0, R)");

    DiffusionResult res;
    res.model_id = cfg.model.warping.id;
    res.dim = m;
    res.R = cfg.R;
    res.r0 = cfg.r0;
    res.dt = cfg.dt;
    res.paths = cfg.paths;
    res.seed = cfg.seed;

    PathParams p;
    p.w = &cfg.model.warping;
    p.m = m;
    p.dt = cfg.dt;
    p.sqrt_2dt = std::sqrt(2.0 * cfg.dt);
    p.r_absorb = cfg.R - kBarrierShift * p.sqrt_2dt;
    p.r_center = 10.0 * std::sqrt(cfg.dt);
    p.r0 = cfg.r0;
    p.max_steps = cfg.max_steps_per_path > 0
                      ? cfg.max_steps_per_path
                      : std::max<long>(100000000L / cfg.paths, 1000000L);

    if (p.r_absorb <= cfg.r0)
        throw ValidationError("dt too coarse: the corrected barrier falls at or "
                              "below the start radius");
    if (p.sqrt_2dt > 0.05 * cfg.R)
        res.warnings.push_back("dt is coarse relative to the ball radius; "
                               "discretization bias may dominate");

    const long n = cfg.paths;
    std::vector<double> tau(static_cast<std::size_t>(n));
    const int workers = worker_count(n);
    std::vector<std::thread> pool;
    std::vector<std::uint64_t> steps_per_worker(static_cast<std::size_t>(workers), 0);
    std::exception_ptr first_error;
    std::mutex error_mutex;

    auto run_range = [&](int widx, long lo, long hi) {
        try {
            std::uint64_t steps = 0;
            for (long i = lo; i < hi; ++i) {
                CounterRng rng(cfg.seed, static_cast<std::uint64_t>(i));
                tau[static_cast<std::size_t>(i)] = simulate_path(p, rng, steps);
            }
            steps_per_worker[static_cast<std::size_t>(widx)] = steps;
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    if (workers == 1) {
        run_range(0, 0, n);
    } else {
        pool.reserve(static_cast<std::size_t>(workers));
        for (int t = 0; t < workers; ++t) {
            long lo = n * t / workers;
            long hi = n * (t + 1) / workers;
            pool.emplace_back(run_range, t, lo, hi);
        }
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    for (auto s : steps_per_worker) res.total_steps += s;

    std::vector<double> powed(static_cast<std::size_t>(n));
    std::vector<double> squared(static_cast<std::size_t>(n));
    for (int k = 1; k <= cfg.max_order; ++k) {
        for (long i = 0; i < n; ++i) {
            double x = std::pow(tau[static_cast<std::size_t>(i)], k);
            powed[static_cast<std::size_t>(i)] = x;
            squared[static_cast<std::size_t>(i)] = x * x;
        }
        double s1 = pairwise_sum(powed.data(), powed.size());
        double s2 = pairwise_sum(squared.data(), squared.size());
        double mean = s1 / static_cast<double>(n);
        double var = (s2 - static_cast<double>(n) * mean * mean) / static_cast<double>(n - 1);
        if (var < 0.0) var = 0.0;
        MomentEstimate est;
        est.k = k;
        est.mean = mean;
        est.std_error = std::sqrt(var / static_cast<double>(n));
        est.paths_used = n;
        res.moments.push_back(est);
    }
    return res;
}

std::vector<MomentComparison> compare_to_quadrature(const DiffusionResult& mc,
                                                    const RadialProfileSet& profiles) {
    if (profiles.model_id != mc.model_id)
        throw UsageError("quadrature profiles come from a different model (" +
                         profiles.model_id + " vs " + mc.model_id + ")");
    if (profiles.dim != mc.dim)
        throw UsageError("dimension mismatch between simulation and profiles");
    if (std::abs(profiles.R - mc.R) > 1e-12 * std::max(1.0, mc.R))
        throw UsageError("ball radius mismatch between simulation and profiles");

    std::vector<MomentComparison> out;
    for (const auto& est : mc.moments) {
        if (est.k == 0) continue;
        if (est.k > profiles.max_order)
            throw UsageError("profile set does not reach moment order " +
                             std::to_string(est.k));
        MomentComparison c;
        c.k = est.k;
        c.mc_mean = est.mean;
        c.std_err = est.std_error;
        c.quad_value = profiles.eval(est.k, mc.r0);
        c.z = est.std_error > 0.0 ? (est.mean - c.quad_value) / est.std_error
                                  : std::numeric_limits<double>::infinity();
        out.push_back(c);
    }
    return out;
}

} // namespace exitspec
