#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "exitspec/cli_app.hpp"
#include "exitspec/comparison.hpp"
#include "exitspec/errors.hpp"
#include "exitspec/expression.hpp"
#include "exitspec/piecewise_cheb.hpp"
#include "exitspec/quadrature.hpp"
#include "exitspec/report.hpp"
#include "exitspec/spectrum.hpp"
#include "exitspec/warp_models.hpp"

#include "test_support.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

using namespace exitspec;

namespace {

double rel(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

BoundingFunctions bounds_of(const std::string& g, const std::string& h) {
    BoundingFunctions b;
    b.g = parse_radial_expression(g);
    b.h = parse_radial_expression(h);
    return b;
}

} // namespace

TEST_CASE("adaptive quadrature on closed forms") {
    auto one = integrate([](double x) { return x * x; }, 0.0, 1.0);
    CHECK(rel(one.value, 1.0 / 3.0) < 1e-14);
    auto two = integrate([](double x) { return std::sin(x); }, 0.0, 3.14159265358979323846);
    CHECK(rel(two.value, 2.0) < 1e-12);
    auto sharp = integrate([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0);
    CHECK(rel(sharp.value, 2.0 / 1e-2 * std::atan(1.0 / 1e-2)) < 1e-9);
    CHECK_THROWS_AS(integrate([](double x) { return std::abs(x - 1.0 / 3.0); }, 0.0, 1.0,
                              1e-15, 1e-300, 1),
                    NumericError);
}

TEST_CASE("piecewise chebyshev basics") {
    auto f = PiecewiseCheb::build([](double x) { return std::exp(x) * std::sin(3 * x); }, 0.0,
                                  2.0, 1e-13);
    for (double x : {0.0, 0.1, 0.77, 1.5, 2.0}) {
        double want = std::exp(x) * std::sin(3 * x);
        CHECK(std::abs(f.eval(x) - want) < 1e-11 * (1.0 + std::abs(want)));
    }
    auto F = f.antiderivative();
    CHECK(std::abs(F.eval(0.0)) < 1e-13);
    auto g = F.derivative();
    for (double x : {0.25, 1.0, 1.9})
        CHECK(rel(g.eval(x), std::exp(x) * std::sin(3 * x)) < 1e-9);
    double direct = integrate([](double x) { return std::exp(x) * std::sin(3 * x); }, 0.0, 2.0)
                        .value;
    CHECK(rel(f.definite_integral(), direct) < 1e-11);
}

TEST_CASE("space-form warpings and ball geometry") {
    auto q0 = space_form_warping(0.0);
    CHECK(q0.eval(0.7) == doctest::Approx(0.7).epsilon(1e-15));
    auto qm1 = space_form_warping(-1.0);
    CHECK(rel(qm1.eval(1.3), std::sinh(1.3)) < 1e-14);
    auto qp = space_form_warping(4.0);
    CHECK(rel(qp.eval(0.5), std::sin(1.0) / 2.0) < 1e-14);
    CHECK(qp.domain_max < 3.14159265358979323846 / 2.0);

    auto model = make_model(2, q0);
    CHECK(rel(unit_sphere_area(2), 2 * 3.14159265358979323846) < 1e-14);
    CHECK(rel(unit_sphere_area(3), 4 * 3.14159265358979323846) < 1e-14);
    CHECK(rel(ball_volume(model, 1.0), 3.14159265358979323846) < 1e-12);
    CHECK(rel(isoperimetric_quotient(model, 2.0), 1.0) < 1e-12);

    // validation rejects profiles that are not warpings
    WarpingFunction bad = q0;
    bad.eval = [](double r) { return r + 0.1; };
    bad.kind = WarpingFunction::Kind::custom;
    CHECK_THROWS_AS(validate_warping(bad), ValidationError);
}

TEST_CASE("expression parser values and derivatives") {
    auto e = parse_radial_expression("sinh(r)");
    CHECK(rel(e.value(1.0), 1.1752011936438014) < 1e-15);
    CHECK(rel(e.deriv1(1.0), 1.5430806348152437) < 1e-15);
    CHECK(rel(e.deriv2(1.0), 1.1752011936438014) < 1e-15);

    auto p = parse_radial_expression("r*exp(-0.1*r)");
    CHECK(p.value(0.0) == doctest::Approx(0.0));
    CHECK(p.deriv1(0.0) == doctest::Approx(1.0).epsilon(1e-14));

    auto pw = parse_radial_expression("r^3 / (1 + r^2)");
    double r = 0.8;
    double want = std::pow(r, 3) / (1 + r * r);
    CHECK(rel(pw.value(r), want) < 1e-14);

    // caret diagnostics carry the position
    try {
        parse_radial_expression("sin(r");
        CHECK(false);
    } catch (const ValidationError& err) {
        CHECK(std::string(err.what()).find('^') != std::string::npos);
    }
    CHECK_THROWS_AS(parse_radial_expression("bogus(r)"), ValidationError);
    auto div = parse_radial_expression("1/(r-1)");
    CHECK_THROWS_AS(div.value(1.0), DomainError);

    auto w = make_warping_from_expression("sinh(r)", 3.0, "sinh");
    CHECK(rel(w.eval(0.5), std::sinh(0.5)) < 1e-14);
    CHECK_THROWS_AS(make_warping_from_expression("2*r", 3.0), ValidationError);
    CHECK_THROWS_AS(make_warping_from_expression("r+0.1", 3.0), ValidationError);
}

TEST_CASE("hierarchy matches flat closed forms") {
    auto model = make_model(2, space_form_warping(0.0));
    auto prof = solve_hierarchy(model, 1.0, 2);
    for (double r : {0.0, 0.3, 0.9}) {
        CHECK(rel(prof.eval(1, r), (1.0 - r * r) / 4.0) < 1e-12);
        CHECK(rel(prof.eval(2, r), (3.0 - 4.0 * r * r + std::pow(r, 4)) / 32.0) < 1e-12);
    }
    auto spec = moment_spectrum(model, 1.0, 3);
    const double expect[] = {0.5, 0.0625, 1.0 / 48.0, 11.0 / 1024.0};
    for (int k = 0; k <= 3; ++k) CHECK(rel(spec.A_hat[k], expect[k]) < 1e-12);
    CHECK(spec.provenance == Provenance::boundary_derivative);
    CHECK(rel(spec.A_raw[0], 0.5 * 2 * 3.14159265358979323846) < 1e-12);
}

TEST_CASE("hierarchy matches hyperbolic closed forms") {
    auto model = make_model(2, space_form_warping(-1.0));
    for (double R : {0.5, 1.0, 1.5}) {
        auto prof = solve_hierarchy(model, R, 1);
        CHECK(rel(prof.eval(1, 0.0), 2.0 * std::log(std::cosh(R / 2))) < 1e-11);
        auto spec = moment_spectrum(model, R, 0);
        CHECK(rel(spec.A_hat[0], std::tanh(R / 2)) < 1e-11);
    }
}

TEST_CASE("spherical space form quotient") {
    auto model = make_model(2, space_form_warping(1.0));
    auto spec = moment_spectrum(model, 1.2, 0);
    CHECK(rel(spec.A_hat[0], std::tan(0.6)) < 1e-11);
    CHECK_THROWS_AS(moment_spectrum(model, 4.0, 0), DomainError);
}

TEST_CASE("spectra agree with the independent Simpson oracle") {
    struct Case {
        double b;
        int m;
        double R;
    };
    for (const Case& c : {Case{0.0, 3, 1.0}, Case{-1.0, 2, 1.5}, Case{-4.0, 3, 0.8},
                          Case{0.25, 5, 1.2}}) {
        auto w = space_form_warping(c.b);
        auto spec = moment_spectrum(make_model(c.m, w), c.R, 4);
        testsupport::OracleHierarchy oracle([&](double r) { return w.eval(r); }, c.m, c.R, 4);
        for (int k = 0; k <= 4; ++k)
            CHECK(rel(spec.A_hat[k], oracle.a_hat[k]) < 1e-9);
    }
    // custom warping through the expression path
    auto w = make_warping_from_expression("sinh(r)*exp(-0.2*r)", 2.0, "damped");
    auto spec = moment_spectrum(make_model(3, w), 1.0, 3);
    testsupport::OracleHierarchy oracle(
        [](double r) { return std::sinh(r) * std::exp(-0.2 * r); }, 3, 1.0, 3);
    for (int k = 0; k <= 3; ++k) CHECK(rel(spec.A_hat[k], oracle.a_hat[k]) < 1e-9);
}

TEST_CASE("hierarchy profile fields and guards") {
    auto model = make_model(2, space_form_warping(-1.0));
    auto prof = solve_hierarchy(model, 1.0, 3);
    CHECK(prof.eval(0, 0.5) == doctest::Approx(1.0));
    CHECK(prof.eval(3, 1.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(prof.eval_deriv(1, 1e-9) == doctest::Approx(0.0).epsilon(1e-6));
    CHECK_THROWS_AS(exit_moment(prof, 3), UsageError); // needs order k+1
    CHECK_THROWS_AS(prof.eval(7, 0.5), UsageError);
    for (int k = 1; k <= 3; ++k)
        CHECK(verify_divergence_identity(model, prof, k - 1).ok);
    CHECK(verify_ode_residual(model, prof, 2) < 1e-8);
}

TEST_CASE("comparison space reduces to the base model for trivial bounds") {
    auto w = space_form_warping(-1.0);
    auto cs = build_comparison_space(w, bounds_of("1", "0"), 2, 1.0);
    CHECK(cs.stretch.identity);
    CHECK(cs.S == doctest::Approx(1.0));
    for (double s : {0.1, 0.5, 0.9})
        CHECK(rel(cs.W_of_s(s), std::sinh(s)) < 1e-10);
}

TEST_CASE("comparison space closed form for constant h") {
    for (int m : {2, 3}) {
        auto cs = build_comparison_space(space_form_warping(0.0), bounds_of("1", "0.2"), m, 1.0);
        for (double s : {0.05, 0.3, 0.75, 1.0}) {
            double want = s * std::exp(-m * 0.2 * s / (m - 1));
            CHECK(rel(cs.W_of_s(s), want) < 1e-8);
        }
        CHECK(lambda_ode_residual(cs) < 1e-6);
    }
}

TEST_CASE("stretching map for a genuine tangency bound") {
    auto ex = parse_radial_expression("exp(-r)");
    auto map = build_stretching(ex, 1.0);
    CHECK(rel(map.S, std::exp(1.0) - 1.0) < 1e-12);
    for (double r : {0.2, 0.6, 1.0}) {
        double s = map.s_of_r(r);
        CHECK(rel(map.r_of_s(s), r) < 1e-10);
        CHECK(rel(s, std::exp(r) - 1.0) < 1e-12);
    }
    // g must satisfy g(0)=1, 0<g<=1
    CHECK_THROWS_AS(build_stretching(parse_radial_expression("2*exp(-r)"), 1.0),
                    ValidationError);
    CHECK_THROWS_AS(build_stretching(parse_radial_expression("1+r"), 1.0), ValidationError);
}

TEST_CASE("balance margins: borderline flat, strict hyperbolic, violated") {
    auto flat = build_comparison_space(space_form_warping(0.0), bounds_of("1", "0"), 2, 1.0);
    auto rep0 = balance_check(flat, false);
    CHECK(rep0.balanced);
    CHECK_FALSE(rep0.strictly_balanced);
    CHECK(std::abs(rep0.min_margin) < 1e-12);

    auto hyp = build_comparison_space(space_form_warping(-1.0), bounds_of("1", "0"), 2, 1.0);
    auto rep1 = balance_check(hyp, true);
    CHECK(rep1.balanced);
    CHECK(rep1.strictly_balanced);
    CHECK(rep1.min_margin > 0.0);

    auto broken = build_comparison_space(space_form_warping(0.0), bounds_of("1", "2"), 2, 1.0);
    auto rep2 = balance_check(broken, false);
    CHECK_FALSE(rep2.balanced);
    CHECK_FALSE(rep2.eta_minus_h_positive);
}

TEST_CASE("lemma bracket and spectrum bound") {
    auto hyp = build_comparison_space(space_form_warping(-1.0), bounds_of("1", "0"), 2, 1.0);
    auto lemma = lemma_paren_check(hyp, 3);
    CHECK(lemma.min_value > 0.0);

    auto con = make_constellation(3, 2, space_form_warping(-1.0), bounds_of("1", "0"), 1.0);
    auto bound = spectrum_bound(con, 3);
    auto direct = moment_spectrum(make_model(2, space_form_warping(-1.0)), 1.0, 3);
    for (int k = 0; k <= 3; ++k) CHECK(rel(bound.A_hat[k], direct.A_hat[k]) < 1e-9);

    auto broken = make_constellation(3, 2, space_form_warping(0.0), bounds_of("1", "2"), 1.0);
    CHECK_THROWS_AS(spectrum_bound(broken, 2), HypothesisError);
}

TEST_CASE("intrinsic comparison ordering and hypothesis guard") {
    auto N = make_model(2, space_form_warping(-1.0));
    auto upper = make_model(2, space_form_warping(0.0));
    auto lower = make_model(2, space_form_warping(-4.0));
    auto le = compare_intrinsic(N, upper, 1.0, 5, Direction::le);
    CHECK(le.all_hold);
    CHECK(rel(le.margins[0], 0.5 - std::tanh(0.5)) < 1e-10);
    auto ge = compare_intrinsic(N, lower, 1.0, 5, Direction::ge);
    CHECK(ge.all_hold);
    CHECK_THROWS_AS(compare_intrinsic(upper, N, 1.0, 2, Direction::le), HypothesisError);
}

TEST_CASE("monotonicity of the quotient in the radius") {
    auto model = make_model(3, space_form_warping(-1.0));
    double prev = 0.0;
    for (double R : {0.25, 0.5, 1.0, 1.5}) {
        auto spec = moment_spectrum(model, R, 0);
        CHECK(spec.A_hat[0] > prev);
        prev = spec.A_hat[0];
    }
}

TEST_CASE("csv round trip with quoting") {
    CsvTable t;
    t.header = {"name", "value"};
    t.rows.push_back({"plain", format_double(0.1)});
    t.rows.push_back({"with,comma", "x"});
    t.rows.push_back({"with\"quote", "y"});
    auto text = to_csv(t);
    auto back = parse_csv(text);
    REQUIRE(back.rows.size() == t.rows.size());
    CHECK(back.rows[0][1] == format_double(0.1));
    CHECK(back.rows[1][0] == "with,comma");
    CHECK(back.rows[2][0] == "with\"quote");
    CHECK(std::stod(back.rows[0][1]) == 0.1);
    CHECK_THROWS_AS(parse_csv(""), ValidationError);
}

TEST_CASE("format_double round-trips doubles exactly") {
    for (double x : {0.1, 1.0 / 3.0, 2.2250738585072014e-308, 12345.678901234567}) {
        CHECK(std::stod(format_double(x)) == x);
    }
}

static int run_argv(std::initializer_list<const char*> args) {
    std::vector<char*> argv;
    for (const char* a : args) argv.push_back(const_cast<char*>(a));
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

TEST_CASE("cli spectrum examples and determinism") {
    std::string out1 = "/tmp/exitspec_test_spec1.csv";
    std::string out2 = "/tmp/exitspec_test_spec2.csv";
    CHECK(run_argv({"exitspec", "spectrum", "--b", "-1", "--m", "2", "--R", "1", "--K", "5",
                    "--out", out1.c_str()}) == 0);
    CHECK(run_argv({"exitspec", "spectrum", "--b", "-1", "--m", "2", "--R", "1", "--K", "5",
                    "--out", out2.c_str()}) == 0);
    auto a = read_text_file(out1);
    auto b = read_text_file(out2);
    CHECK(a == b);
    auto table = parse_csv(a);
    REQUIRE(table.rows.size() == 6);
    CHECK(rel(std::stod(table.rows[0][5]), std::tanh(0.5)) < 1e-8);
    CHECK(table.rows[0][8] == "boundary_derivative");

    std::string out3 = "/tmp/exitspec_test_spec3.csv";
    CHECK(run_argv({"exitspec", "spectrum", "--b", "0", "--m", "2", "--R", "1", "--K", "0",
                    "--out", out3.c_str()}) == 0);
    auto t3 = parse_csv(read_text_file(out3));
    CHECK(std::stod(t3.rows[0][5]) == doctest::Approx(0.5).epsilon(1e-12));
    std::remove(out1.c_str());
    std::remove(out2.c_str());
    std::remove(out3.c_str());
}

TEST_CASE("cli intrinsic example and exit codes") {
    CHECK(run_argv({"exitspec", "intrinsic", "--N-b", "-1", "--bound-b", "0", "--m", "2", "--R",
                    "1", "--K", "5", "--direction", "le", "--out",
                    "/tmp/exitspec_test_intr.csv"}) == 0);
    auto t = parse_csv(read_text_file("/tmp/exitspec_test_intr.csv"));
    for (const auto& row : t.rows) CHECK(row[4] == "true");
    std::remove("/tmp/exitspec_test_intr.csv");

    // hypothesis violation -> 1
    CHECK(run_argv({"exitspec", "intrinsic", "--N-b", "0", "--bound-b", "-1", "--m", "2", "--R",
                    "1", "--K", "2", "--direction", "le"}) == 1);
    // bad expression -> 2
    CHECK(run_argv({"exitspec", "spectrum", "--w", "sin(", "--m", "2", "--R", "1"}) == 2);
    // empty expression must not fall back to the space form
    CHECK(run_argv({"exitspec", "spectrum", "--w", "", "--m", "2", "--R", "1"}) == 2);
    // unknown flag -> 2
    CHECK(run_argv({"exitspec", "spectrum", "--nope", "1"}) == 2);
    // unbalanced comparison space -> 1
    CHECK(run_argv({"exitspec", "compare-space", "--b", "0", "--h", "2", "--m", "2", "--R", "1",
                    "--out", "/tmp/exitspec_test_cs.json"}) == 1);
    std::remove("/tmp/exitspec_test_cs.json");
}

TEST_CASE("cli config file feeds subcommand flags") {
    std::string cfg_path = "/tmp/exitspec_test_cfg.ini";
    write_text_atomic(cfg_path, "[spectrum]\nb=-1\nm=2\nR=1\nK=1\nout=/tmp/exitspec_cfg_out.csv\n");
    CHECK(run_argv({"exitspec", "spectrum", "--config", cfg_path.c_str()}) == 0);
    auto t = parse_csv(read_text_file("/tmp/exitspec_cfg_out.csv"));
    CHECK(rel(std::stod(t.rows[0][5]), std::tanh(0.5)) < 1e-8);
    std::remove(cfg_path.c_str());
    std::remove("/tmp/exitspec_cfg_out.csv");
}
