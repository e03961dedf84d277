#ifndef EXITSPEC_MESH_SURFACE_MESH_HPP
#define EXITSPEC_MESH_SURFACE_MESH_HPP

#include <Eigen/Core>

#include <array>
#include <string>
#include <vector>

namespace exitspec {

/// Triangle mesh immersed in R^3 with a marked pole vertex.
struct SurfaceMesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> faces;
    int pole_vertex = -1;
    std::string label;
    std::vector<std::string> warnings; // non-fatal parse notes
};

/// Reads OFF or OBJ ("auto" picks by extension). Only vertex and face
/// records are honored; other OBJ records are skipped with a warning.
/// Polygonal faces are fan-triangulated. Parse errors carry line numbers.
SurfaceMesh load_mesh(const std::string& path, const std::string& format = "auto");

SurfaceMesh parse_off(const std::string& text, const std::string& label);
SurfaceMesh parse_obj(const std::string& text, const std::string& label);

/// Manifoldness (every edge on <= 2 faces), index ranges, no degenerate
/// or repeated faces. Throws ValidationError listing offenders.
void validate_mesh(const SurfaceMesh& mesh);

void set_pole_by_index(SurfaceMesh& mesh, int index);
void set_pole_nearest(SurfaceMesh& mesh, const Eigen::Vector3d& point);

} // namespace exitspec

#endif
