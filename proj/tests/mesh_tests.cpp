#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "exitspec/errors.hpp"
#include "exitspec/mesh/extrinsic_ball.hpp"
#include "exitspec/mesh/mesh_generators.hpp"
#include "exitspec/mesh/mesh_hierarchy.hpp"
#include "exitspec/mesh/surface_mesh.hpp"
#include "exitspec/spectrum.hpp"
#include "exitspec/warp_models.hpp"

#include <Eigen/Geometry>

#include <cmath>
#include <string>

using namespace exitspec;

namespace {

constexpr double kPi = 3.14159265358979323846;

double rel(double got, double want) {
    return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

ExtrinsicBallMesh flat_ball(double parent_radius, int rings, double R) {
    auto disk = make_disk_mesh(parent_radius, rings);
    return extract_extrinsic_ball(disk, R);
}

} // namespace

TEST_CASE("off parsing with comments and polygon fans") {
    std::string text = "OFF\n# a comment\n5 2 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n2 0 0\n"
                       "4 0 1 2 3\n3 1 4 2\n";
    auto mesh = parse_off(text, "quad");
    CHECK(mesh.vertices.size() == 5);
    CHECK(mesh.faces.size() == 3); // quad fans into two triangles
    CHECK(mesh.faces[0] == std::array<int, 3>{0, 1, 2});
    CHECK(mesh.faces[1] == std::array<int, 3>{0, 2, 3});
    validate_mesh(mesh);

    CHECK_THROWS_AS(parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n", "short"), ValidationError);
    try {
        parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\nx y z\n3 0 1 2\n", "badnum");
        CHECK(false);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("line 5") != std::string::npos);
    }
}

TEST_CASE("obj parsing: slash forms, negative indices, skipped records") {
    std::string text = "v 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nvt 0 0\n"
                       "f 1/1/1 2/2/1 3/3/1\nf -3 -2 -1\ns off\n";
    auto mesh = parse_obj(text, "tri");
    CHECK(mesh.vertices.size() == 3);
    REQUIRE(mesh.faces.size() == 2);
    CHECK(mesh.faces[0] == mesh.faces[1]);
    CHECK(!mesh.warnings.empty()); // vn/vt/s skipped with notes

    CHECK_THROWS_AS(parse_obj("v 0 0 0\nf 0 1 2\n", "zero-index"), ValidationError);
    CHECK_THROWS_AS(parse_obj("v 0 0 0\nv 1 0 0\nf 1 2 9\n", "range"), ValidationError);
}

TEST_CASE("mesh validation rejects broken connectivity") {
    SurfaceMesh m;
    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}};
    m.faces = {{0, 1, 2}, {0, 1, 2}};
    CHECK_THROWS_AS(validate_mesh(m), ValidationError); // repeated face

    m.faces = {{0, 1, 2}, {2, 1, 0}};
    CHECK_THROWS_AS(validate_mesh(m), ValidationError); // same face, flipped

    m.faces = {{0, 1, 1}};
    CHECK_THROWS_AS(validate_mesh(m), ValidationError); // repeated index

    m.faces = {{0, 1, 2}, {0, 1, 3}, {0, 1, 2}};
    CHECK_THROWS_AS(validate_mesh(m), ValidationError);

    m.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, -1, 0}};
    m.faces = {{0, 1, 2}, {0, 1, 3}, {0, 1, 4}}; // edge 0-1 on three faces
    CHECK_THROWS_AS(validate_mesh(m), ValidationError);

    m.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}};
    m.faces = {{0, 1, 2}};
    CHECK_THROWS_AS(validate_mesh(m), ValidationError); // collinear
}

TEST_CASE("generators produce valid meshes with sane poles") {
    auto disk = make_disk_mesh(1.0, 12);
    validate_mesh(disk);
    CHECK(disk.pole_vertex == 0);
    CHECK(disk.vertices.size() == 1 + 6 * 12 * 13 / 2);

    auto cap = make_sphere_cap_mesh(2.0, 1.0, 16);
    validate_mesh(cap);
    CHECK(cap.vertices[cap.pole_vertex].norm() < 1e-12);

    auto cat = make_catenoid_mesh(1.2, 24, 16);
    validate_mesh(cat);
    CHECK((cat.vertices[cat.pole_vertex] - Eigen::Vector3d(1, 0, 0)).norm() < 1e-12);

    auto hel = make_helicoid_mesh(1.2, 1.2, 16, 16);
    validate_mesh(hel);
    CHECK(hel.vertices[hel.pole_vertex].norm() < 1e-12);
}

TEST_CASE("extrinsic ball of a flat disk: topology and boundary length") {
    auto ball = flat_ball(1.0, 30, 0.5);
    CHECK(ball.euler_characteristic == 1);
    REQUIRE(ball.boundary_loops.size() == 1);
    CHECK(rel(ball.boundary_length, kPi) < 0.01);
    CHECK(rel(mesh_area(ball), kPi * 0.25) < 0.01);
    // rings=30 puts a vertex ring exactly at r = 0.5, so the radius gets
    // nudged; cut vertices sit on the effective sphere exactly
    CHECK(std::abs(ball.R - 0.5) < 1e-6);
    for (int v : ball.boundary_loops[0]) {
        CHECK(ball.on_boundary[v]);
        CHECK(std::abs(ball.vertices[v].norm() - ball.R) < 1e-9);
    }
}

TEST_CASE("extrinsic ball guards") {
    auto disk = make_disk_mesh(1.0, 10);
    CHECK_THROWS_AS(extract_extrinsic_ball(disk, 1.5), DomainError); // swallows the rim
    CHECK_THROWS_AS(extract_extrinsic_ball(disk, -1.0), DomainError);
    SurfaceMesh unset = disk;
    unset.pole_vertex = -1;
    CHECK_THROWS_AS(extract_extrinsic_ball(unset, 0.5), ValidationError);
}

TEST_CASE("discrete hierarchy on the flat disk hits closed forms") {
    auto ball = flat_ball(1.25, 40, 1.0);
    auto h = solve_discrete_hierarchy(ball, 3);
    // clip quads make some obtuse triangles; weights stay mild
    CHECK(h.min_cotan_weight > -5.0);
    CHECK_FALSE(h.max_principle_warning);
    CHECK(h.u[0].size() == static_cast<long>(ball.vertices.size()));
    // u_1 = (R^2 - r^2)/4, u_2 = (3 - 4r^2 + r^4)/32 at the pole
    CHECK(rel(h.u[1][ball.pole], 0.25) < 0.01);
    CHECK(rel(h.u[2][ball.pole], 3.0 / 32.0) < 0.01);
    for (int k = 1; k <= 3; ++k) CHECK(h.u[k][ball.pole] > 0.0);

    auto spec = mesh_spectrum(ball, h);
    CHECK(spec.provenance == Provenance::mesh);
    CHECK(rel(spec.A_hat[0], 0.5) < 0.02);
    CHECK(rel(spec.A_hat[1], 0.0625) < 0.02);

    // flux route differs from the mass route by boundary quadrature at k=0,
    // by solver residual only for k >= 1
    CHECK(mesh_divergence_gap(ball, h, 0) < 0.05);
    CHECK(mesh_divergence_gap(ball, h, 1) < 1e-8);
    CHECK(mesh_divergence_gap(ball, h, 2) < 1e-8);
    CHECK_THROWS_AS(mesh_divergence_gap(ball, h, 3), UsageError);
}

TEST_CASE("spectrum is invariant under rigid motion") {
    auto disk = make_disk_mesh(1.25, 24);
    Eigen::AngleAxisd rot(0.7, Eigen::Vector3d(1, 2, 3).normalized());
    Eigen::Vector3d shift(4.0, -1.0, 2.5);
    SurfaceMesh moved = disk;
    for (auto& v : moved.vertices) v = rot * v + shift;

    auto b0 = extract_extrinsic_ball(disk, 1.0);
    auto b1 = extract_extrinsic_ball(moved, 1.0);
    auto h0 = solve_discrete_hierarchy(b0, 2);
    auto h1 = solve_discrete_hierarchy(b1, 2);
    auto s0 = mesh_spectrum(b0, h0);
    auto s1 = mesh_spectrum(b1, h1);
    for (int k = 0; k <= 2; ++k) CHECK(rel(s1.A_hat[k], s0.A_hat[k]) < 1e-10);
    CHECK(rel(b1.boundary_length, b0.boundary_length) < 1e-12);
}

TEST_CASE("sphere cap curvature and tangency diagnostics") {
    // cap of the radius-2 sphere: C = <-grad r, H> = r/(2 rho^2) = r/8,
    // T = |grad r| = sqrt(1 - r^2/(4 rho^2))
    auto cap = make_sphere_cap_mesh(2.0, 1.2, 48);
    auto ball = extract_extrinsic_ball(cap, 1.0);
    CHECK(ball.euler_characteristic == 1);
    auto fields = estimate_hypothesis_fields(ball);

    double worst_C = 0.0, worst_T = 0.0;
    int checked = 0;
    for (size_t i = 0; i < ball.vertices.size(); ++i) {
        if (!fields.computed[i] || fields.near_boundary[i]) continue;
        double r = (ball.vertices[i] - ball.pole_point).norm();
        if (r < 0.15) continue; // discrete H is noisy right at the pole fan
        worst_C = std::max(worst_C, std::abs(fields.C[i] - r / 8.0));
        worst_T = std::max(worst_T, std::abs(fields.T[i] - std::sqrt(1.0 - r * r / 16.0)));
        ++checked;
    }
    CHECK(checked > 100);
    CHECK(worst_C < 5e-3);
    CHECK(worst_T < 0.02);
    CHECK(fields.min_T_core > 0.88);
}

TEST_CASE("flat disk has vanishing C and unit T") {
    auto ball = flat_ball(1.25, 24, 1.0);
    auto fields = estimate_hypothesis_fields(ball);
    CHECK(fields.max_abs_C_core < 1e-9);
    // T is exact away from the cone point of r at the pole
    double min_T_far = 1e300;
    for (size_t i = 0; i < ball.vertices.size(); ++i) {
        if (!fields.computed[i] || fields.near_boundary[i]) continue;
        if ((ball.vertices[i] - ball.pole_point).norm() < 0.2) continue;
        min_T_far = std::min(min_T_far, fields.T[i]);
    }
    CHECK(min_T_far > 0.98);
    CHECK(min_T_far <= 1.0 + 1e-9);
}

TEST_CASE("catenoid and helicoid balls are disks with minimal-surface C") {
    for (int which : {0, 1}) {
        SurfaceMesh m = which == 0 ? make_catenoid_mesh(1.2, 32, 24)
                                   : make_helicoid_mesh(1.2, 1.2, 24, 24);
        auto ball = extract_extrinsic_ball(m, 1.0);
        CHECK(ball.euler_characteristic == 1);
        CHECK(ball.boundary_loops.size() == 1);
        auto h = solve_discrete_hierarchy(ball, 2);
        CHECK_FALSE(h.max_principle_warning);
        auto spec = mesh_spectrum(ball, h);
        CHECK(spec.A_hat[0] > 0.0);
        CHECK(spec.A_hat[0] < 0.5); // flat ball value bounds minimal surfaces
        auto fields = estimate_hypothesis_fields(ball);
        CHECK(fields.max_abs_C_core < 0.05);
        CHECK(fields.min_T_core > 0.5);
    }
}

TEST_CASE("mesh spectrum converges to the flat model under refinement") {
    double prev = 1e9;
    for (int rings : {12, 24, 48}) {
        auto ball = flat_ball(1.25, rings, 1.0);
        auto h = solve_discrete_hierarchy(ball, 1);
        auto spec = mesh_spectrum(ball, h);
        double err = rel(spec.A_hat[0], 0.5);
        CHECK(err < prev);
        prev = err;
    }
    CHECK(prev < 2e-3);
}
