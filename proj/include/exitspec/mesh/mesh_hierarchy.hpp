#ifndef EXITSPEC_MESH_MESH_HIERARCHY_HPP
#define EXITSPEC_MESH_MESH_HIERARCHY_HPP

#include "exitspec/mesh/extrinsic_ball.hpp"
#include "exitspec/spectrum.hpp"

#include <Eigen/Dense>

#include <vector>

namespace exitspec {

/// Finite-element exit-moment fields on a clipped ball: cotangent stiffness,
/// barycentric lumped mass, u_k = 0 on the cut boundary,
/// L u_k = k M u_{k-1} solved order by order.
struct DiscreteHierarchy {
    int max_order = 0;
    double tol = 1e-10;
    std::vector<Eigen::VectorXd> u; // per-vertex fields, k = 0..max_order
    Eigen::VectorXd mass;           // lumped vertex areas
    double area = 0.0;
    double min_cotan_weight = 0.0;
    bool quality_warning = false;       // some cotan weight < 0
    bool max_principle_warning = false; // some interior u_k <= 0, k >= 1
    std::vector<double> boundary_flux;  // sum_{boundary i} -(L u_k)_i, per k
};

DiscreteHierarchy solve_discrete_hierarchy(const ExtrinsicBallMesh& ball, int K,
                                           double tol = 1e-10);

/// A_hat_k = (u_k^T M 1) / boundary length; provenance = mesh.
MomentSpectrum mesh_spectrum(const ExtrinsicBallMesh& ball, const DiscreteHierarchy& h);

/// |int u_k dV - flux(u_{k+1})/(k+1)| / int u_k dV; needs k < max_order.
double mesh_divergence_gap(const ExtrinsicBallMesh& ball, const DiscreteHierarchy& h, int k);

/// Pointwise hypothesis diagnostics: C = -<grad r, H> from the
/// cotan-Laplacian of the coordinates over mixed areas, T = |grad^P r| from
/// area-weighted face gradients. Boundary vertices and the pole are skipped.
struct HypothesisFields {
    std::vector<double> C;
    std::vector<double> T;
    std::vector<char> computed;
    std::vector<char> near_boundary; // one-ring of the cut: stencil distorted
    double max_abs_C = 0.0;
    double min_T = 0.0;
    double max_abs_C_core = 0.0; // max |C| away from the cut one-ring
    double min_T_core = 0.0;
};

HypothesisFields estimate_hypothesis_fields(const ExtrinsicBallMesh& ball);

} // namespace exitspec

#endif
