#ifndef EXITSPEC_MESH_EXTRINSIC_BALL_HPP
#define EXITSPEC_MESH_EXTRINSIC_BALL_HPP

#include "exitspec/mesh/surface_mesh.hpp"

namespace exitspec {

/// Intersection of the mesh with the ambient ball |x - p| < R: faces with a
/// vertex inside are kept, crossed edges are cut at the exact distance-R
/// point on the straight edge, and only the connected component containing
/// the pole survives.
struct ExtrinsicBallMesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> faces;
    std::vector<char> on_boundary;          // |x-p| = R vertices from edge cuts
    std::vector<int> parent_vertex;         // parent index, -1 for cut points
    std::vector<std::vector<int>> boundary_loops; // ordered vertex chains
    Eigen::Vector3d pole_point = Eigen::Vector3d::Zero();
    int pole = -1;
    double R = 0.0;
    double boundary_length = 0.0;
    int euler_characteristic = 0;
    std::string label;
    std::vector<std::string> warnings;
};

ExtrinsicBallMesh extract_extrinsic_ball(const SurfaceMesh& mesh, double R);

double mesh_area(const ExtrinsicBallMesh& ball);

} // namespace exitspec

#endif
