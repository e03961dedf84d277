#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "exitspec/diffusion.hpp"
#include "exitspec/errors.hpp"
#include "exitspec/spectrum.hpp"
#include "exitspec/warp_models.hpp"

#include <cmath>
#include <cstdlib>
#include <vector>

using namespace exitspec;

namespace {

DiffusionConfig quick_config(double b, int m, double R, double r0) {
    DiffusionConfig cfg;
    cfg.model = make_model(m, space_form_warping(b));
    cfg.R = R;
    cfg.r0 = r0;
    cfg.dt = 1e-3;
    cfg.paths = 2000;
    cfg.seed = 99;
    cfg.max_order = 2;
    return cfg;
}

} // namespace

TEST_CASE("pairwise sum is deterministic and exact on a known series") {
    std::vector<double> v(1000);
    for (size_t i = 0; i < v.size(); ++i) v[i] = 1.0 / (1.0 + i);
    double a = pairwise_sum(v.data(), v.size());
    double b = pairwise_sum(v.data(), v.size());
    CHECK(a == b);
    double naive = 0.0;
    for (double x : v) naive += x;
    CHECK(std::abs(a - naive) < 1e-10);
    CHECK(pairwise_sum(v.data(), 0) == 0.0);
    CHECK(pairwise_sum(v.data(), 1) == v[0]);
}

TEST_CASE("same seed reproduces results bit for bit") {
    auto cfg = quick_config(0.0, 2, 1.0, 0.0);
    auto r1 = sample_exit_moments(cfg);
    auto r2 = sample_exit_moments(cfg);
    REQUIRE(r1.moments.size() == r2.moments.size());
    for (size_t i = 0; i < r1.moments.size(); ++i) {
        CHECK(r1.moments[i].mean == r2.moments[i].mean);
        CHECK(r1.moments[i].std_error == r2.moments[i].std_error);
    }
    CHECK(r1.total_steps == r2.total_steps);

    cfg.seed = 100;
    auto r3 = sample_exit_moments(cfg);
    CHECK(r3.moments[0].mean != r1.moments[0].mean);
}

TEST_CASE("results do not depend on the thread count") {
    auto cfg = quick_config(-1.0, 2, 1.0, 0.3);
    setenv("EXITSPEC_THREADS", "1", 1);
    auto serial = sample_exit_moments(cfg);
    setenv("EXITSPEC_THREADS", "8", 1);
    auto parallel = sample_exit_moments(cfg);
    unsetenv("EXITSPEC_THREADS");
    for (size_t i = 0; i < serial.moments.size(); ++i) {
        CHECK(serial.moments[i].mean == parallel.moments[i].mean);
        CHECK(serial.moments[i].std_error == parallel.moments[i].std_error);
    }
}

TEST_CASE("flat-model means agree with the quadrature hierarchy") {
    DiffusionConfig cfg;
    cfg.model = make_model(2, space_form_warping(0.0));
    cfg.R = 1.0;
    cfg.r0 = 0.0;
    cfg.dt = 5e-4;
    cfg.paths = 20000;
    cfg.seed = 7;
    cfg.max_order = 2;
    auto mc = sample_exit_moments(cfg);
    auto prof = solve_hierarchy(cfg.model, cfg.R, 2);
    auto cmp = compare_to_quadrature(mc, prof);
    REQUIRE(cmp.size() == 2);
    for (const auto& c : cmp) {
        CHECK(std::abs(c.z) < 4.0);
        CHECK(c.std_err > 0.0);
        CHECK(c.std_err < 0.05 * c.quad_value + 1e-3);
    }
    // E tau from the pole is R^2/4 = 0.25
    CHECK(std::abs(cmp[0].quad_value - 0.25) < 1e-12);
}

TEST_CASE("mismatched reference is flagged by large z") {
    auto cfg = quick_config(0.0, 2, 1.0, 0.0);
    cfg.paths = 20000;
    cfg.dt = 5e-4;
    auto mc = sample_exit_moments(cfg);
    auto wrong = solve_hierarchy(cfg.model, 1.1, 2);
    double z = (mc.moments[0].mean - wrong.eval(1, cfg.r0)) / mc.moments[0].std_error;
    CHECK(std::abs(z) > 10.0);
}

TEST_CASE("mean exit time decreases in the start radius") {
    double prev = 1e300;
    for (double r0 : {0.0, 0.4, 0.8}) {
        auto cfg = quick_config(0.0, 2, 1.0, r0);
        cfg.paths = 4000;
        auto mc = sample_exit_moments(cfg);
        CHECK(mc.moments[0].mean < prev);
        prev = mc.moments[0].mean;
    }
}

TEST_CASE("configuration guards") {
    auto cfg = quick_config(0.0, 2, 1.0, 0.0);
    cfg.r0 = 1.0;
    CHECK_THROWS_AS(sample_exit_moments(cfg), DomainError);
    cfg.r0 = 1.5;
    CHECK_THROWS_AS(sample_exit_moments(cfg), DomainError);
    cfg = quick_config(0.0, 2, 1.0, 0.0);
    cfg.dt = 2.0; // shifted barrier would sit below the start point
    CHECK_THROWS_AS(sample_exit_moments(cfg), ValidationError);
    cfg = quick_config(0.0, 2, 1.0, 0.0);
    cfg.dt = 0.0;
    CHECK_THROWS_AS(sample_exit_moments(cfg), ValidationError);
    cfg = quick_config(0.0, 2, 1.0, 0.0);
    cfg.paths = 1;
    CHECK_THROWS_AS(sample_exit_moments(cfg), ValidationError);
    cfg = quick_config(0.0, 2, 1.0, 0.0);
    cfg.max_order = 11;
    CHECK_THROWS_AS(sample_exit_moments(cfg), ValidationError);

    // comparing against a different model or radius is a usage error
    auto mc = sample_exit_moments(quick_config(0.0, 2, 1.0, 0.0));
    auto other_R = solve_hierarchy(make_model(2, space_form_warping(0.0)), 2.0, 2);
    CHECK_THROWS_AS(compare_to_quadrature(mc, other_R), UsageError);
    auto other_model = solve_hierarchy(make_model(2, space_form_warping(-1.0)), 1.0, 2);
    CHECK_THROWS_AS(compare_to_quadrature(mc, other_model), UsageError);
}

TEST_CASE("coarse dt warns but still runs") {
    auto cfg = quick_config(0.0, 2, 1.0, 0.0);
    cfg.dt = 5e-2;
    cfg.paths = 500;
    auto mc = sample_exit_moments(cfg);
    CHECK(!mc.warnings.empty());
    CHECK(mc.moments[0].mean > 0.0);
}
