#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "exitspec/comparison.hpp"
#include "exitspec/diffusion.hpp"
#include "exitspec/errors.hpp"
#include "exitspec/expression.hpp"
#include "exitspec/mesh/extrinsic_ball.hpp"
#include "exitspec/mesh/mesh_generators.hpp"
#include "exitspec/mesh/mesh_hierarchy.hpp"
#include "exitspec/spectrum.hpp"
#include "exitspec/suite.hpp"
#include "exitspec/warp_models.hpp"

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

namespace py = pybind11;
using namespace exitspec;

namespace {

ModelSpace model_from(std::optional<double> b, std::optional<std::string> w, int m, double R) {
    if (b.has_value() == w.has_value())
        throw UsageError("pass exactly one of b= or w=");
    if (b)
        return make_model(m, space_form_warping(*b, std::max(10.0, 2.0 * R)));
    return make_model(m, make_warping_from_expression(*w, R, "custom:" + *w));
}

BoundingFunctions bounds_from(const std::string& g, const std::string& h,
                              const std::string& side) {
    BoundingFunctions bounds;
    bounds.g = parse_radial_expression(g);
    bounds.h = parse_radial_expression(h);
    if (side == "below") bounds.side = BoundingFunctions::Side::below;
    else if (side == "above") bounds.side = BoundingFunctions::Side::above;
    else throw UsageError("side must be 'below' or 'above'");
    return bounds;
}

py::dict spectrum_dict(const MomentSpectrum& s) {
    py::dict d;
    d["model_id"] = s.model_id;
    d["b_or_custom"] = s.b_label;
    d["m"] = s.dim;
    d["R"] = s.R;
    d["tol"] = s.tol;
    d["provenance"] = std::string(to_string(s.provenance));
    d["A_hat"] = s.A_hat;
    d["A_raw"] = s.A_raw;
    return d;
}

SurfaceMesh generated_mesh(const std::string& kind, double size, double angle, int n) {
    if (kind == "disk") return make_disk_mesh(size, n);
    if (kind == "sphere-cap") return make_sphere_cap_mesh(size, angle, n);
    if (kind == "catenoid") return make_catenoid_mesh(size, 4 * n, 2 * n);
    if (kind == "helicoid") return make_helicoid_mesh(size, size, 2 * n, 2 * n);
    throw UsageError("unknown generator: " + kind);
}

} // namespace

PYBIND11_MODULE(_exitspec, mod) {
    mod.doc() = "exit-moment spectra of metric balls: quadrature, comparison "
                "spaces, Monte-Carlo and mesh verification";

    py::register_exception<DomainError>(mod, "DomainError");
    py::register_exception<ValidationError>(mod, "ValidationError");
    py::register_exception<NumericError>(mod, "NumericError");
    py::register_exception<UsageError>(mod, "UsageError");
    py::register_exception<HypothesisError>(mod, "HypothesisError");

    py::class_<RadialProfileSet>(mod, "RadialProfileSet")
        .def_readonly("dim", &RadialProfileSet::dim)
        .def_readonly("R", &RadialProfileSet::R)
        .def_readonly("max_order", &RadialProfileSet::max_order)
        .def_readonly("model_id", &RadialProfileSet::model_id)
        .def("eval", &RadialProfileSet::eval, py::arg("k"), py::arg("r"))
        .def("eval_deriv", &RadialProfileSet::eval_deriv, py::arg("k"), py::arg("r"));

    mod.def(
        "solve_hierarchy",
        [](std::optional<double> b, std::optional<std::string> w, int m, double R, int K,
           double tol) { return solve_hierarchy(model_from(b, w, m, R), R, K, tol); },
        py::arg("b") = py::none(), py::arg("w") = py::none(), py::arg("m") = 2,
        py::arg("R") = 1.0, py::arg("K") = 3, py::arg("tol") = 1e-12);

    mod.def(
        "moment_spectrum",
        [](std::optional<double> b, std::optional<std::string> w, int m, double R, int K,
           double tol) {
            return spectrum_dict(moment_spectrum(model_from(b, w, m, R), R, K, tol));
        },
        py::arg("b") = py::none(), py::arg("w") = py::none(), py::arg("m") = 2,
        py::arg("R") = 1.0, py::arg("K") = 3, py::arg("tol") = 1e-12);

    mod.def(
        "compare_space",
        [](std::optional<double> b, std::optional<std::string> w, const std::string& g,
           const std::string& h, const std::string& side, int m, double R, int K, double tol) {
            auto base = model_from(b, w, m, R);
            std::string warning;
            auto cs = build_comparison_space(base.warping, bounds_from(g, h, side), m, R, tol,
                                             &warning);
            auto balance = balance_check(cs, false);
            py::dict d;
            d["S"] = cs.S;
            d["balanced"] = balance.balanced;
            d["strictly_balanced"] = balance.strictly_balanced;
            d["min_margin"] = balance.min_margin;
            d["min_margin_r"] = balance.min_margin_r;
            if (!warning.empty()) d["warning"] = warning;
            auto lemma = lemma_paren_check(cs, std::max(1, K));
            d["lemma_min"] = lemma.min_value;
            if (balance.balanced) {
                auto con = make_constellation(m, m, base.warping, cs.bounds, R, tol);
                d["bound_spectrum"] = spectrum_dict(spectrum_bound(con, K, tol));
            }
            return d;
        },
        py::arg("b") = py::none(), py::arg("w") = py::none(), py::arg("g") = "1",
        py::arg("h") = "0", py::arg("side") = "below", py::arg("m") = 2, py::arg("R") = 1.0,
        py::arg("K") = 3, py::arg("tol") = 1e-12);

    mod.def(
        "compare_intrinsic",
        [](double N_b, double bound_b, int m, double R, int K, const std::string& direction) {
            auto dir = direction == "le" ? Direction::le : Direction::ge;
            auto cmp = compare_intrinsic(make_model(m, space_form_warping(N_b)),
                                         make_model(m, space_form_warping(bound_b)), R, K, dir);
            py::dict d;
            d["A_hat_N"] = cmp.a_N;
            d["A_hat_bound"] = cmp.a_bound;
            d["margins"] = cmp.margins;
            d["all_hold"] = cmp.all_hold;
            return d;
        },
        py::arg("N_b"), py::arg("bound_b"), py::arg("m") = 2, py::arg("R") = 1.0,
        py::arg("K") = 3, py::arg("direction") = "le");

    mod.def(
        "simulate",
        [](std::optional<double> b, std::optional<std::string> w, int m, double R, double r0,
           double dt, long paths, std::uint64_t seed, int K) {
            DiffusionConfig cfg;
            cfg.model = model_from(b, w, m, R);
            cfg.R = R;
            cfg.r0 = r0;
            cfg.dt = dt;
            cfg.paths = paths;
            cfg.seed = seed;
            cfg.max_order = K;
            auto mc = sample_exit_moments(cfg);
            auto prof = solve_hierarchy(cfg.model, R, K);
            auto cmp = compare_to_quadrature(mc, prof);
            py::list rows;
            for (const auto& c : cmp) {
                py::dict row;
                row["k"] = c.k;
                row["mc_mean"] = c.mc_mean;
                row["std_err"] = c.std_err;
                row["quad_value"] = c.quad_value;
                row["z"] = c.z;
                rows.append(row);
            }
            py::dict d;
            d["moments"] = rows;
            d["total_steps"] = mc.total_steps;
            d["warnings"] = mc.warnings;
            return d;
        },
        py::arg("b") = py::none(), py::arg("w") = py::none(), py::arg("m") = 2,
        py::arg("R") = 1.0, py::arg("r0") = 0.0, py::arg("dt") = 1e-4,
        py::arg("paths") = 100000, py::arg("seed") = 0, py::arg("K") = 2);

    mod.def(
        "mesh_verify",
        [](const std::string& generate, double gen_size, double gen_angle, int gen_n, double R,
           int K) {
            auto mesh = generated_mesh(generate, gen_size, gen_angle, gen_n);
            auto ball = extract_extrinsic_ball(mesh, R);
            auto h = solve_discrete_hierarchy(ball, std::max(1, K));
            auto spec = mesh_spectrum(ball, h);
            auto fields = estimate_hypothesis_fields(ball);
            py::dict d;
            d["mesh_spectrum"] = spectrum_dict(spec);
            d["boundary_length"] = ball.boundary_length;
            d["area"] = mesh_area(ball);
            d["euler_characteristic"] = ball.euler_characteristic;
            d["max_abs_C_core"] = fields.max_abs_C_core;
            d["min_T_core"] = fields.min_T_core;
            d["vertices"] = ball.vertices.size();
            return d;
        },
        py::arg("generate"), py::arg("gen_size") = 1.2, py::arg("gen_angle") = 1.0,
        py::arg("gen_n") = 12, py::arg("R") = 1.0, py::arg("K") = 3);

    mod.def(
        "run_suite",
        [](const std::vector<int>& only) {
            auto res = run_verification_suite(only);
            py::list rows;
            for (const auto& c : res.criteria) {
                py::dict row;
                row["id"] = c.id;
                row["name"] = c.name;
                row["passed"] = c.passed;
                row["seconds"] = c.seconds;
                row["detail"] = c.detail;
                rows.append(row);
            }
            py::dict d;
            d["criteria"] = rows;
            d["all_passed"] = res.all_passed;
            return d;
        },
        py::arg("only") = std::vector<int>{});
}
