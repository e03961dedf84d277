#include "exitspec/cli_app.hpp"

#include "exitspec/comparison.hpp"
#include "exitspec/diffusion.hpp"
#include "exitspec/errors.hpp"
#include "exitspec/expression.hpp"
#include "exitspec/mesh/extrinsic_ball.hpp"
#include "exitspec/mesh/mesh_generators.hpp"
#include "exitspec/mesh/mesh_hierarchy.hpp"
#include "exitspec/report.hpp"
#include "exitspec/spectrum.hpp"
#include "exitspec/suite.hpp"
#include "exitspec/warp_models.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

namespace exitspec {

namespace {

using nlohmann::ordered_json;

struct ModelFlags {
    double b = 0.0;
    bool b_set = false;
    bool w_set = false;
    std::string w_expr;

    WarpingFunction build(double R) const {
        if (w_set && w_expr.empty())
            throw ValidationError("custom warping expression must be non-empty");
        if (!w_expr.empty())
            return make_warping_from_expression(w_expr, R, "custom:" + w_expr);
        return space_form_warping(b, std::max(10.0, R));
    }
};

void add_model_flags(CLI::App* sub, ModelFlags& mf, const std::string& prefix = "") {
    auto* b_opt = sub->add_option("--" + prefix + "b", mf.b,
                                  "space-form curvature parameter (w = Q_b)");
    auto* w_opt = sub->add_option("--" + prefix + "w", mf.w_expr,
                                  "custom warping expression in r (overrides --" + prefix + "b)");
    w_opt->excludes(b_opt);
    b_opt->each([&mf](const std::string&) { mf.b_set = true; });
    w_opt->each([&mf](const std::string&) { mf.w_set = true; });
}

void emit_output(const std::string& content, const std::string& out_path) {
    if (out_path.empty()) {
        std::fputs(content.c_str(), stdout);
    } else {
        write_text_atomic(out_path, content);
    }
}

std::string spectrum_csv(const MomentSpectrum& spec) {
    CsvTable t;
    t.header = {"model_id", "b_or_custom", "m",   "R",          "k",
                "A_hat_k",  "A_raw_k",     "tol", "provenance"};
    for (size_t k = 0; k < spec.A_hat.size(); ++k) {
        t.rows.push_back({spec.model_id, spec.b_label, std::to_string(spec.dim),
                          format_double(spec.R), std::to_string(k), format_double(spec.A_hat[k]),
                          format_double(spec.A_raw[k]), format_double(spec.tol),
                          to_string(spec.provenance)});
    }
    return to_csv(t);
}

BoundingFunctions parse_bounds(const std::string& g_src, const std::string& h_src,
                               const std::string& side) {
    BoundingFunctions bounds;
    bounds.g = parse_radial_expression(g_src.empty() ? "1" : g_src);
    bounds.h = parse_radial_expression(h_src.empty() ? "0" : h_src);
    if (side == "below") bounds.side = BoundingFunctions::Side::below;
    else if (side == "above") bounds.side = BoundingFunctions::Side::above;
    else throw UsageError("side must be 'below' or 'above'");
    return bounds;
}

// ---- subcommand bodies -------------------------------------------------

int cmd_spectrum(const ModelFlags& mf, int m, double R, int K, double tol,
                 const std::string& out_path) {
    auto model = make_model(m, mf.build(R));
    auto spec = moment_spectrum(model, R, K, tol);
    emit_output(spectrum_csv(spec), out_path);
    return 0;
}

int cmd_compare_space(const ModelFlags& mf, int m, double R, int K, double tol,
                      const std::string& g_src, const std::string& h_src,
                      const std::string& side, const std::string& out_path) {
    auto bounds = parse_bounds(g_src, h_src, side);
    std::string warning;
    auto cs = build_comparison_space(mf.build(R), bounds, m, R, tol, &warning);

    ordered_json doc;
    doc["schema_version"] = "1";
    doc["inputs"] = {{"w", cs.base_w.id},
                     {"g", cs.bounds.g.source()},
                     {"h", cs.bounds.h.source()},
                     {"m", m},
                     {"R", R},
                     {"side", side}};
    if (!warning.empty()) doc["warning"] = warning;
    doc["s_R"] = cs.S;
    doc["comparison_model_id"] = cs.model.warping.id;

    auto balance = balance_check(cs, true);
    doc["balance"] = {{"balanced", balance.balanced},
                      {"strictly_balanced", balance.strictly_balanced},
                      {"min_margin", balance.min_margin},
                      {"min_margin_r", balance.min_margin_r},
                      {"eta_minus_h_positive", balance.eta_minus_h_positive}};

    int exit_code = 0;
    if (balance.balanced) {
        auto lemma = lemma_paren_check(cs, std::max(K, 1), 256, tol);
        doc["lemma"] = {{"min_value", lemma.min_value},
                        {"min_k", lemma.min_k},
                        {"min_r", lemma.min_r}};
        auto con = make_constellation(std::max(m, 3), m, cs.base_w, bounds, R, tol);
        auto spec = spectrum_bound(con, K, tol);
        doc["bound_spectrum"] = {{"model_id", spec.model_id},
                                 {"ball_radius", spec.R},
                                 {"A_hat", spec.A_hat},
                                 {"A_raw", spec.A_raw},
                                 {"provenance", to_string(spec.provenance)}};
        doc["verdict"] = "balanced";
    } else {
        doc["verdict"] = "not balanced: spectrum bound not asserted";
        exit_code = 1;
    }
    emit_output(doc.dump(2) + "\n", out_path);
    return exit_code;
}

int cmd_balance(const ModelFlags& mf, int m, double R, double tol, const std::string& g_src,
                const std::string& h_src, const std::string& side, int grid,
                const std::string& out_path) {
    auto bounds = parse_bounds(g_src, h_src, side);
    auto cs = build_comparison_space(mf.build(R), bounds, m, R, tol);
    auto rep = balance_check(cs, true, grid);
    CsvTable t;
    t.header = {"r", "margin"};
    for (size_t i = 0; i < rep.grid_r.size(); ++i)
        t.rows.push_back({format_double(rep.grid_r[i]), format_double(rep.margins[i])});
    emit_output(to_csv(t), out_path);
    std::fprintf(stdout, "balanced=%s strictly_balanced=%s min_margin=%s at r=%s\n",
                 rep.balanced ? "true" : "false", rep.strictly_balanced ? "true" : "false",
                 format_double(rep.min_margin).c_str(), format_double(rep.min_margin_r).c_str());
    return 0;
}

int cmd_intrinsic(const ModelFlags& nf, const ModelFlags& bf, int m, double R, int K,
                  double tol, const std::string& direction, const std::string& out_path) {
    Direction dir;
    if (direction == "le") dir = Direction::le;
    else if (direction == "ge") dir = Direction::ge;
    else throw UsageError("direction must be 'le' or 'ge'");
    auto N_model = make_model(m, nf.build(R));
    auto bound_model = make_model(m, bf.build(R));
    auto cmp = compare_intrinsic(N_model, bound_model, R, K, dir, tol);

    CsvTable t;
    t.header = {"k", "A_hat_N", "A_hat_bound", "margin", "holds"};
    for (size_t k = 0; k < cmp.a_N.size(); ++k)
        t.rows.push_back({std::to_string(k), format_double(cmp.a_N[k]),
                          format_double(cmp.a_bound[k]), format_double(cmp.margins[k]),
                          cmp.margins[k] >= 0.0 ? "true" : "false"});
    emit_output(to_csv(t), out_path);
    std::fprintf(stdout, "verdict %s all k\n", cmp.all_hold ? "PASS" : "FAIL");
    return cmp.all_hold ? 0 : 1;
}

int cmd_simulate(const ModelFlags& mf, int m, double R, double r0, double dt, long paths,
                 std::uint64_t seed, int K, const std::string& out_path) {
    DiffusionConfig cfg;
    cfg.model = make_model(m, mf.build(R));
    cfg.R = R;
    cfg.r0 = r0;
    cfg.dt = dt;
    cfg.paths = paths;
    cfg.seed = seed;
    cfg.max_order = K;
    auto mc = sample_exit_moments(cfg);
    for (const auto& w : mc.warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
    auto prof = solve_hierarchy(cfg.model, R, K);
    auto cmp = compare_to_quadrature(mc, prof);
    CsvTable t;
    t.header = {"model_id", "m", "R", "r0", "k", "mc_mean", "std_err", "quad_value", "z"};
    for (const auto& c : cmp)
        t.rows.push_back({mc.model_id, std::to_string(m), format_double(R), format_double(r0),
                          std::to_string(c.k), format_double(c.mc_mean),
                          format_double(c.std_err), format_double(c.quad_value),
                          format_double(c.z)});
    emit_output(to_csv(t), out_path);
    return 0;
}

struct MeshFlags {
    std::string path;
    std::string format = "auto";
    std::string generate;
    double gen_size = 1.2;
    double gen_angle = 1.2;
    int gen_n = 24;
    int pole_index = -1;
    std::vector<double> pole_near;
};

SurfaceMesh build_mesh(const MeshFlags& flags) {
    SurfaceMesh mesh;
    if (!flags.generate.empty()) {
        if (flags.generate == "disk") mesh = make_disk_mesh(flags.gen_size, flags.gen_n);
        else if (flags.generate == "sphere-cap")
            mesh = make_sphere_cap_mesh(flags.gen_size, flags.gen_angle, flags.gen_n);
        else if (flags.generate == "catenoid")
            mesh = make_catenoid_mesh(flags.gen_size, 4 * flags.gen_n, 2 * flags.gen_n);
        else if (flags.generate == "helicoid")
            mesh = make_helicoid_mesh(flags.gen_size, flags.gen_size, 2 * flags.gen_n,
                                      2 * flags.gen_n);
        else
            throw UsageError("unknown generator: " + flags.generate +
                             " (expected disk, sphere-cap, catenoid, helicoid)");
    } else if (!flags.path.empty()) {
        mesh = load_mesh(flags.path, flags.format);
    } else {
        throw UsageError("mesh-verify needs --mesh or --generate");
    }
    if (flags.pole_index >= 0) set_pole_by_index(mesh, flags.pole_index);
    else if (flags.pole_near.size() == 3)
        set_pole_nearest(mesh, Eigen::Vector3d(flags.pole_near[0], flags.pole_near[1],
                                               flags.pole_near[2]));
    if (mesh.pole_vertex < 0)
        throw UsageError("no pole: pass --pole-index or --pole-near x y z");
    validate_mesh(mesh);
    return mesh;
}

int cmd_mesh_verify(const MeshFlags& flags, double R, int K, double mesh_tol,
                    const std::string& out_path) {
    auto mesh = build_mesh(flags);
    auto ball = extract_extrinsic_ball(mesh, R);
    auto hier = solve_discrete_hierarchy(ball, std::max(K, 1));
    auto spec = mesh_spectrum(ball, hier);
    auto fields = estimate_hypothesis_fields(ball);
    auto model_spec = moment_spectrum(make_model(2, space_form_warping(0.0)), R, K);

    ordered_json doc;
    doc["schema_version"] = "1";
    doc["mesh"] = {{"label", mesh.label},
                   {"vertices", mesh.vertices.size()},
                   {"faces", mesh.faces.size()},
                   {"ball_vertices", ball.vertices.size()},
                   {"ball_faces", ball.faces.size()},
                   {"euler_characteristic", ball.euler_characteristic},
                   {"boundary_length", ball.boundary_length},
                   {"area", mesh_area(ball)},
                   {"min_cotan_weight", hier.min_cotan_weight},
                   {"quality_warning", hier.quality_warning},
                   {"max_principle_warning", hier.max_principle_warning}};
    std::vector<std::string> warnings = mesh.warnings;
    warnings.insert(warnings.end(), ball.warnings.begin(), ball.warnings.end());
    if (!warnings.empty()) doc["warnings"] = warnings;
    doc["R"] = R;
    doc["K"] = K;
    doc["mesh_spectrum"] = {{"A_hat", spec.A_hat},
                            {"A_raw", spec.A_raw},
                            {"provenance", to_string(spec.provenance)}};
    doc["flat_model_bound"] = {{"model_id", model_spec.model_id}, {"A_hat", model_spec.A_hat}};
    doc["mesh_tol"] = mesh_tol;

    bool all_hold = true;
    ordered_json verdicts = ordered_json::array();
    for (int k = 0; k <= K; ++k) {
        double bound = model_spec.A_hat[static_cast<size_t>(k)] * (1.0 + mesh_tol);
        bool ok = spec.A_hat[static_cast<size_t>(k)] <= bound;
        all_hold = all_hold && ok;
        verdicts.push_back({{"k", k},
                            {"mesh", spec.A_hat[static_cast<size_t>(k)]},
                            {"bound", bound},
                            {"holds", ok}});
    }
    doc["verdicts"] = verdicts;
    doc["diagnostics"] = {{"min_T", fields.min_T},
                          {"max_abs_C", fields.max_abs_C},
                          {"min_T_core", fields.min_T_core},
                          {"max_abs_C_core", fields.max_abs_C_core}};
    doc["all_hold"] = all_hold;
    emit_output(doc.dump(2) + "\n", out_path);
    return all_hold ? 0 : 1;
}

int cmd_suite(const std::vector<int>& only, const std::string& out_path) {
    auto result = run_verification_suite(only);
    std::string text = format_suite_report(result);
    std::fputs(text.c_str(), stdout);
    if (!out_path.empty()) write_text_atomic(out_path, text);
    return result.all_passed ? 0 : 1;
}

} // namespace

int run_cli(int argc, char** argv) {
    CLI::App app{"exit-moment spectra of model-space balls: quadrature, "
                 "comparison spaces, Monte-Carlo and mesh verification"};
    // --h is a real flag (mean-convexity bound), so help must not claim -h
    app.set_help_flag("--help", "print help and exit");
    app.require_subcommand(1);
    app.set_config("--config", "", "flat key=value config with [subcommand] sections");
    app.get_config_formatter_base()->comment('#');

    auto add_sub = [&app](const std::string& name, const std::string& desc) {
        auto* sub = app.add_subcommand(name, desc);
        sub->set_help_flag("--help", "print help and exit");
        sub->fallthrough(true); // lets --config appear after the subcommand
        return sub;
    };

    int exit_code = 0;

    // spectrum
    auto* sp = add_sub("spectrum", "moment spectrum of a model-space ball");
    ModelFlags sp_model;
    int sp_m = 2;
    double sp_R = 1.0, sp_tol = 1e-12;
    int sp_K = 5;
    std::string sp_out;
    add_model_flags(sp, sp_model);
    sp->add_option("--m", sp_m, "dimension")->check(CLI::Range(2, 16));
    sp->add_option("--R", sp_R, "ball radius")->check(CLI::PositiveNumber);
    sp->add_option("--K", sp_K, "highest moment order")->check(CLI::Range(0, 10));
    sp->add_option("--tol", sp_tol, "interpolation tolerance");
    sp->add_option("--out", sp_out, "CSV output path (default stdout)");
    sp->callback([&] { exit_code = cmd_spectrum(sp_model, sp_m, sp_R, sp_K, sp_tol, sp_out); });

    // compare-space
    auto* cs = add_sub("compare-space",
                                  "build C^m_{w,g,h}, check balance, bound the spectrum");
    ModelFlags cs_model;
    int cs_m = 2, cs_K = 5;
    double cs_R = 1.0, cs_tol = 1e-12;
    std::string cs_g = "1", cs_h = "0", cs_side = "below", cs_out;
    add_model_flags(cs, cs_model);
    cs->add_option("--m", cs_m, "submanifold dimension")->check(CLI::Range(2, 16));
    cs->add_option("--R", cs_R, "radius")->check(CLI::PositiveNumber);
    cs->add_option("--K", cs_K, "moment order")->check(CLI::Range(0, 10));
    cs->add_option("--tol", cs_tol, "tolerance");
    cs->add_option("--g", cs_g, "tangency bound expression");
    cs->add_option("--h", cs_h, "mean-convexity bound expression");
    cs->add_option("--side", cs_side, "below|above");
    cs->add_option("--out", cs_out, "JSON output path (default stdout)");
    cs->callback([&] {
        exit_code = cmd_compare_space(cs_model, cs_m, cs_R, cs_K, cs_tol, cs_g, cs_h, cs_side,
                                      cs_out);
    });

    // balance
    auto* ba = add_sub("balance", "margin sweep of the balance condition");
    ModelFlags ba_model;
    int ba_m = 2, ba_grid = 512;
    double ba_R = 1.0, ba_tol = 1e-12;
    std::string ba_g = "1", ba_h = "0", ba_side = "below", ba_out;
    add_model_flags(ba, ba_model);
    ba->add_option("--m", ba_m, "dimension")->check(CLI::Range(2, 16));
    ba->add_option("--R", ba_R, "radius")->check(CLI::PositiveNumber);
    ba->add_option("--tol", ba_tol, "tolerance");
    ba->add_option("--g", ba_g, "tangency bound expression");
    ba->add_option("--h", ba_h, "mean-convexity bound expression");
    ba->add_option("--side", ba_side, "below|above");
    ba->add_option("--grid", ba_grid, "grid points")->check(CLI::Range(8, 100000));
    ba->add_option("--out", ba_out, "CSV output path (default stdout)");
    ba->callback([&] {
        exit_code = cmd_balance(ba_model, ba_m, ba_R, ba_tol, ba_g, ba_h, ba_side, ba_grid,
                                ba_out);
    });

    // intrinsic
    auto* in = add_sub("intrinsic", "model-vs-model spectrum comparison");
    ModelFlags in_N, in_bound;
    int in_m = 2, in_K = 5;
    double in_R = 1.0, in_tol = 1e-12;
    std::string in_dir = "le", in_out;
    add_model_flags(in, in_N, "N-");
    add_model_flags(in, in_bound, "bound-");
    in->add_option("--m", in_m, "dimension")->check(CLI::Range(2, 16));
    in->add_option("--R", in_R, "radius")->check(CLI::PositiveNumber);
    in->add_option("--K", in_K, "moment order")->check(CLI::Range(0, 10));
    in->add_option("--tol", in_tol, "tolerance");
    in->add_option("--direction", in_dir, "le|ge");
    in->add_option("--out", in_out, "CSV output path (default stdout)");
    in->callback([&] {
        exit_code = cmd_intrinsic(in_N, in_bound, in_m, in_R, in_K, in_tol, in_dir, in_out);
    });

    // simulate
    auto* si = add_sub("simulate", "Monte-Carlo exit moments vs quadrature");
    ModelFlags si_model;
    int si_m = 2, si_K = 2;
    double si_R = 1.0, si_r0 = 0.0, si_dt = 1e-4;
    long si_paths = 100000;
    std::uint64_t si_seed = 0;
    std::string si_out;
    add_model_flags(si, si_model);
    si->add_option("--m", si_m, "dimension")->check(CLI::Range(2, 16));
    si->add_option("--R", si_R, "ball radius")->check(CLI::PositiveNumber);
    si->add_option("--r0", si_r0, "start radius");
    si->add_option("--dt", si_dt, "time step")->check(CLI::PositiveNumber);
    si->add_option("--paths", si_paths, "number of paths")->check(CLI::Range(2L, 100000000L));
    si->add_option("--seed", si_seed, "RNG seed");
    si->add_option("--K", si_K, "highest moment order")->check(CLI::Range(1, 10));
    si->add_option("--out", si_out, "CSV output path (default stdout)");
    si->callback([&] {
        exit_code = cmd_simulate(si_model, si_m, si_R, si_r0, si_dt, si_paths, si_seed, si_K,
                                 si_out);
    });

    // mesh-verify
    auto* me = add_sub("mesh-verify",
                                  "hierarchy on an extrinsic ball of a triangle mesh");
    MeshFlags me_flags;
    double me_R = 1.0, me_tol = 0.05;
    int me_K = 3;
    std::string me_out;
    me->add_option("--mesh", me_flags.path, "OFF/OBJ file");
    me->add_option("--format", me_flags.format, "off|obj|auto");
    me->add_option("--generate", me_flags.generate, "disk|sphere-cap|catenoid|helicoid");
    me->add_option("--gen-size", me_flags.gen_size, "generator extent");
    me->add_option("--gen-angle", me_flags.gen_angle, "sphere cap angle");
    me->add_option("--gen-n", me_flags.gen_n, "generator resolution")->check(CLI::Range(2, 512));
    me->add_option("--pole-index", me_flags.pole_index, "pole vertex index");
    me->add_option("--pole-near", me_flags.pole_near, "pole nearest to x y z")->expected(3);
    me->add_option("--R", me_R, "ambient ball radius")->check(CLI::PositiveNumber);
    me->add_option("--K", me_K, "moment order")->check(CLI::Range(1, 10));
    me->add_option("--mesh-tol", me_tol, "relative slack for inequality verdicts");
    me->add_option("--out", me_out, "JSON output path (default stdout)");
    me->callback([&] { exit_code = cmd_mesh_verify(me_flags, me_R, me_K, me_tol, me_out); });

    // suite
    auto* su = add_sub("suite", "run the acceptance verification suite");
    std::vector<int> su_only;
    std::string su_out;
    su->add_option("--only", su_only, "criterion ids to run (default all)");
    su->add_option("--out", su_out, "also write the report to this path");
    su->callback([&] { exit_code = cmd_suite(su_only, su_out); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const HypothesisError& e) {
        std::fprintf(stderr, "hypothesis violation: %s\n", e.what());
        return 1;
    } catch (const NumericError& e) {
        std::fprintf(stderr, "numeric failure: %s\n", e.what());
        return 3;
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "validation error: %s\n", e.what());
        return 2;
    } catch (const DomainError& e) {
        std::fprintf(stderr, "domain error: %s\n", e.what());
        return 2;
    } catch (const UsageError& e) {
        std::fprintf(stderr, "usage error: %s\n", e.what());
        return 2;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    }
    return exit_code;
}

} // namespace exitspec
