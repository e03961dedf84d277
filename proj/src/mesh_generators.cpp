#include "exitspec/mesh/mesh_generators.hpp"
#include "exitspec/errors.hpp"

#include <cmath>

namespace exitspec {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Hexagonal ring layout shared by the disk and the sphere cap: ring j has
// 6j vertices; the triangulation tiles each of the 6 sectors rung by rung.
template <typename Place>
SurfaceMesh build_ring_mesh(int rings, Place place, const char* label) {
    if (rings < 1) throw ValidationError("ring count must be >= 1");
    SurfaceMesh mesh;
    mesh.label = label;
    std::vector<int> ring_start(rings + 1, 0);
    mesh.vertices.push_back(place(0, 0.0));
    for (int j = 1; j <= rings; ++j) {
        ring_start[j] = static_cast<int>(mesh.vertices.size());
        int count = 6 * j;
        for (int i = 0; i < count; ++i)
            mesh.vertices.push_back(place(j, 2.0 * kPi * i / count));
    }
    for (int j = 0; j < rings; ++j) {
        int nin = j == 0 ? 1 : 6 * j;
        int nout = 6 * (j + 1);
        int in0 = j == 0 ? 0 : ring_start[j];
        int out0 = ring_start[j + 1];
        for (int s = 0; s < 6; ++s) {
            for (int t = 0; t <= j; ++t) {
                int in_t = in0 + (s * j + t) % nin;
                int out_t = out0 + (s * (j + 1) + t) % nout;
                int out_t1 = out0 + (s * (j + 1) + t + 1) % nout;
                mesh.faces.push_back({in_t, out_t, out_t1});
                if (t < j) {
                    int in_t1 = in0 + (s * j + t + 1) % nin;
                    mesh.faces.push_back({in_t, out_t1, in_t1});
                }
            }
        }
    }
    mesh.pole_vertex = 0;
    return mesh;
}

} // namespace

SurfaceMesh make_disk_mesh(double radius, int rings) {
    if (!(radius > 0.0)) throw ValidationError("disk radius must be positive");
    double h = radius / rings;
    return build_ring_mesh(
        rings,
        [&](int j, double phi) {
            return Eigen::Vector3d(j * h * std::cos(phi), j * h * std::sin(phi), 0.0);
        },
        "disk");
}

SurfaceMesh make_sphere_cap_mesh(double rho, double cap_angle, int rings) {
    if (!(rho > 0.0)) throw ValidationError("sphere radius must be positive");
    if (!(cap_angle > 0.0) || cap_angle >= kPi)
        throw ValidationError("cap angle must lie in (0, pi)");
    double dtheta = cap_angle / rings;
    return build_ring_mesh(
        rings,
        [&](int j, double phi) {
            double theta = j * dtheta;
            return Eigen::Vector3d(rho * std::sin(theta) * std::cos(phi),
                                   rho * std::sin(theta) * std::sin(phi),
                                   rho * std::cos(theta) - rho);
        },
        "sphere_cap");
}

SurfaceMesh make_catenoid_mesh(double v_extent, int nu, int nv) {
    if (!(v_extent > 0.0)) throw ValidationError("catenoid extent must be positive");
    if (nu < 8) throw ValidationError("catenoid needs nu >= 8");
    if (nv < 2 || nv % 2 != 0) throw ValidationError("catenoid needs even nv >= 2");
    SurfaceMesh mesh;
    mesh.label = "catenoid";
    double dv = 2.0 * v_extent / nv;
    double du = 2.0 * kPi / nu;
    auto vid = [&](int i, int j) { return i * nu + (j % nu); };
    for (int i = 0; i <= nv; ++i) {
        double v = -v_extent + i * dv;
        double cv = std::cosh(v);
        for (int j = 0; j < nu; ++j) {
            double u = j * du;
            mesh.vertices.emplace_back(cv * std::cos(u), cv * std::sin(u), v);
        }
    }
    for (int i = 0; i < nv; ++i) {
        for (int j = 0; j < nu; ++j) {
            int a = vid(i, j), b = vid(i, j + 1), c = vid(i + 1, j + 1), d = vid(i + 1, j);
            mesh.faces.push_back({a, b, c});
            mesh.faces.push_back({a, c, d});
        }
    }
    mesh.pole_vertex = vid(nv / 2, 0); // (cosh 0, 0, 0) = (1, 0, 0)
    return mesh;
}

SurfaceMesh make_helicoid_mesh(double u_extent, double v_extent, int nu, int nv) {
    if (!(u_extent > 0.0) || !(v_extent > 0.0))
        throw ValidationError("helicoid extents must be positive");
    if (nu < 2 || nu % 2 != 0 || nv < 2 || nv % 2 != 0)
        throw ValidationError("helicoid needs even nu, nv >= 2");
    SurfaceMesh mesh;
    mesh.label = "helicoid";
    double du = 2.0 * u_extent / nu;
    double dv = 2.0 * v_extent / nv;
    auto vid = [&](int i, int j) { return i * (nu + 1) + j; };
    for (int i = 0; i <= nv; ++i) {
        double v = -v_extent + i * dv;
        for (int j = 0; j <= nu; ++j) {
            double u = -u_extent + j * du;
            mesh.vertices.emplace_back(v * std::cos(u), v * std::sin(u), u);
        }
    }
    for (int i = 0; i < nv; ++i) {
        for (int j = 0; j < nu; ++j) {
            int a = vid(i, j), b = vid(i, j + 1), c = vid(i + 1, j + 1), d = vid(i + 1, j);
            // alternate the quad diagonal so the axis line v=0 stays symmetric
            if ((i + j) % 2 == 0) {
                mesh.faces.push_back({a, b, c});
                mesh.faces.push_back({a, c, d});
            } else {
                mesh.faces.push_back({a, b, d});
                mesh.faces.push_back({b, c, d});
            }
        }
    }
    mesh.pole_vertex = vid(nv / 2, nu / 2); // v = 0, u = 0 -> origin
    return mesh;
}

} // namespace exitspec
