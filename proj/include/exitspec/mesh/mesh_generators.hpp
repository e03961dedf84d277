#ifndef EXITSPEC_MESH_MESH_GENERATORS_HPP
#define EXITSPEC_MESH_MESH_GENERATORS_HPP

#include "exitspec/mesh/surface_mesh.hpp"

namespace exitspec {

/// Flat disk in the z=0 plane, hexagonal ring layout: ring j carries 6j
/// vertices at radius j*(radius/rings). Pole at the center.
SurfaceMesh make_disk_mesh(double radius, int rings);

/// Geodesic cap of the round sphere of radius rho, pole on the sphere at
/// the origin, rings up to polar angle cap_angle.
SurfaceMesh make_sphere_cap_mesh(double rho, double cap_angle, int rings);

/// Catenoid band (cosh v cos u, cosh v sin u, v), u wrapping [0,2pi),
/// v in [-v_extent, v_extent]. Pole on the neck at (1,0,0); nv must be even.
SurfaceMesh make_catenoid_mesh(double v_extent, int nu, int nv);

/// Helicoid patch (v cos u, v sin u, u), u in [-u_extent, u_extent],
/// v in [-v_extent, v_extent]. Pole at the origin; nu, nv must be even.
SurfaceMesh make_helicoid_mesh(double u_extent, double v_extent, int nu, int nv);

} // namespace exitspec

#endif
