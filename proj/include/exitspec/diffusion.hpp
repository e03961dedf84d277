#pragma once

#include "exitspec/spectrum.hpp"
#include "exitspec/warp_models.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace exitspec {

struct DiffusionConfig {
    ModelSpace model;
    double R = 1.0;
    double r0 = 0.0;
    double dt = 1e-4;
    long paths = 100000;
    std::uint64_t seed = 0;
    int max_order = 2; // moments k = 1..max_order are estimated
    // 0 picks the default budget; a path that runs longer raises NumericError.
    long max_steps_per_path = 0;
};

struct MomentEstimate {
    int k = 0;
    double mean = 0.0;
    double std_error = 0.0;
    long paths_used = 0;
};

struct DiffusionResult {
    std::string model_id;
    int dim = 0;
    double R = 0.0;
    double r0 = 0.0;
    double dt = 0.0;
    long paths = 0;
    std::uint64_t seed = 0;
    std::vector<MomentEstimate> moments;
    std::uint64_t total_steps = 0;
    std::vector<std::string> warnings;
};

// Simulates the radial diffusion generated by the Laplacian,
//   dr = sqrt(2) dB + (m-1) eta_w(r) dt,
// absorbed at the sphere of radius R, and estimates exit-time moments.
// Boundary absorption uses a first-order continuity correction (the
// barrier is pulled in by 0.5826*sigma*sqrt(dt)); steps landing near the
// pole switch to an isotropic-norm update in the tangent space, which is
// exact for the flat model and reflects at 0 automatically.
DiffusionResult sample_exit_moments(const DiffusionConfig& cfg);

struct MomentComparison {
    int k = 0;
    double mc_mean = 0.0;
    double std_err = 0.0;
    double quad_value = 0.0;
    double z = 0.0;
};

// z-scores of the Monte-Carlo means against the quadrature hierarchy,
// z_k = (mc_mean_k - u_k(r0)) / std_err_k.  The profile set must come from
// the same model and radius; k = 0 is trivially exact and skipped.
std::vector<MomentComparison> compare_to_quadrature(const DiffusionResult& mc,
                                                    const RadialProfileSet& profiles);

// Worker count: min(hardware, EXITSPEC_THREADS if set, paths).
int worker_count(long jobs);

// Order-independent sum used for all Monte-Carlo reductions.
double pairwise_sum(const double* v, std::size_t n);

} // namespace exitspec
