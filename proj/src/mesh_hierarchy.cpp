#include "exitspec/mesh/mesh_hierarchy.hpp"
#include "exitspec/errors.hpp"

#include <Eigen/Geometry>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>

#include <algorithm>
#include <cmath>

namespace exitspec {

namespace {

struct Assembly {
    Eigen::SparseMatrix<double> L; // full cotan stiffness, all vertices
    Eigen::VectorXd mass;          // barycentric lumped areas
    double min_cotan = 0.0;
};

Assembly assemble(const ExtrinsicBallMesh& ball) {
    const int n = static_cast<int>(ball.vertices.size());
    Assembly out;
    out.mass = Eigen::VectorXd::Zero(n);
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(ball.faces.size() * 12);
    double min_cotan = std::numeric_limits<double>::infinity();
    for (const auto& tri : ball.faces) {
        const Eigen::Vector3d& x0 = ball.vertices[static_cast<size_t>(tri[0])];
        const Eigen::Vector3d& x1 = ball.vertices[static_cast<size_t>(tri[1])];
        const Eigen::Vector3d& x2 = ball.vertices[static_cast<size_t>(tri[2])];
        double area2 = (x1 - x0).cross(x2 - x0).norm(); // twice the area
        if (area2 <= 0.0) throw NumericError("zero-area face in clipped ball");
        out.mass[tri[0]] += area2 / 6.0;
        out.mass[tri[1]] += area2 / 6.0;
        out.mass[tri[2]] += area2 / 6.0;
        for (int c = 0; c < 3; ++c) {
            int i = tri[(c + 1) % 3];
            int j = tri[(c + 2) % 3];
            const Eigen::Vector3d& apex = ball.vertices[static_cast<size_t>(tri[c])];
            const Eigen::Vector3d& xi = ball.vertices[static_cast<size_t>(i)];
            const Eigen::Vector3d& xj = ball.vertices[static_cast<size_t>(j)];
            Eigen::Vector3d e1 = xi - apex;
            Eigen::Vector3d e2 = xj - apex;
            double cot = e1.dot(e2) / area2; // cross-norm of (e1,e2) equals area2
            double w = 0.5 * cot;
            min_cotan = std::min(min_cotan, w);
            trips.emplace_back(i, j, -w);
            trips.emplace_back(j, i, -w);
            trips.emplace_back(i, i, w);
            trips.emplace_back(j, j, w);
        }
    }
    out.L.resize(n, n);
    out.L.setFromTriplets(trips.begin(), trips.end());
    out.min_cotan = min_cotan;
    return out;
}

} // namespace

DiscreteHierarchy solve_discrete_hierarchy(const ExtrinsicBallMesh& ball, int K, double tol) {
    if (K < 1) throw ValidationError("hierarchy order must be >= 1");
    if (K > 10) throw ValidationError("hierarchy order capped at 10");
    const int n = static_cast<int>(ball.vertices.size());

    Assembly asmb = assemble(ball);

    std::vector<int> interior; // unknown indices
    std::vector<int> slot(static_cast<size_t>(n), -1);
    for (int i = 0; i < n; ++i) {
        if (!ball.on_boundary[static_cast<size_t>(i)]) {
            slot[static_cast<size_t>(i)] = static_cast<int>(interior.size());
            interior.push_back(i);
        }
    }
    if (interior.empty()) throw NumericError("clipped ball has no interior vertices");

    const int ni = static_cast<int>(interior.size());
    std::vector<Eigen::Triplet<double>> trips;
    for (int col = 0; col < n; ++col) {
        if (slot[static_cast<size_t>(col)] < 0) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator it(asmb.L, col); it; ++it) {
            int r = static_cast<int>(it.row());
            if (slot[static_cast<size_t>(r)] >= 0)
                trips.emplace_back(slot[static_cast<size_t>(r)], slot[static_cast<size_t>(col)],
                                   it.value());
        }
    }
    Eigen::SparseMatrix<double> L_ii(ni, ni);
    L_ii.setFromTriplets(trips.begin(), trips.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(L_ii);
    if (solver.info() != Eigen::Success)
        throw NumericError("stiffness factorization failed: interior is singular");

    DiscreteHierarchy h;
    h.max_order = K;
    h.tol = tol;
    h.mass = asmb.mass;
    h.area = asmb.mass.sum();
    h.min_cotan_weight = asmb.min_cotan;
    h.quality_warning = asmb.min_cotan < 0.0;
    h.u.resize(static_cast<size_t>(K) + 1);
    h.u[0] = Eigen::VectorXd::Ones(n);
    h.boundary_flux.assign(static_cast<size_t>(K) + 1, 0.0);

    for (int k = 1; k <= K; ++k) {
        Eigen::VectorXd rhs(ni);
        for (int s = 0; s < ni; ++s) {
            int i = interior[static_cast<size_t>(s)];
            rhs[s] = k * asmb.mass[i] * h.u[static_cast<size_t>(k) - 1][i];
        }
        Eigen::VectorXd sol = solver.solve(rhs);
        if (solver.info() != Eigen::Success) throw NumericError("sparse solve failed");
        double rhs_norm = rhs.norm();
        double resid = (L_ii * sol - rhs).norm();
        if (rhs_norm > 0.0 && resid > tol * rhs_norm)
            throw NumericError("hierarchy solve residual " + std::to_string(resid / rhs_norm) +
                               " exceeds tolerance");
        Eigen::VectorXd field = Eigen::VectorXd::Zero(n);
        for (int s = 0; s < ni; ++s) field[interior[static_cast<size_t>(s)]] = sol[s];
        for (int s = 0; s < ni; ++s)
            if (sol[s] <= 0.0) h.max_principle_warning = true;
        h.u[static_cast<size_t>(k)] = std::move(field);

        // Discrete outward flux through the cut: row sums of L vanish, so
        // -sum_{boundary} (L u)_i equals sum_{interior} (L u)_i exactly.
        Eigen::VectorXd Lu = asmb.L * h.u[static_cast<size_t>(k)];
        double flux = 0.0;
        for (int i = 0; i < n; ++i)
            if (ball.on_boundary[static_cast<size_t>(i)]) flux -= Lu[i];
        h.boundary_flux[static_cast<size_t>(k)] = flux;
    }
    return h;
}

MomentSpectrum mesh_spectrum(const ExtrinsicBallMesh& ball, const DiscreteHierarchy& h) {
    if (!(ball.boundary_length > 0.0)) throw DomainError("ball has zero boundary length");
    MomentSpectrum spec;
    spec.model_id = "mesh:" + (ball.label.empty() ? std::string("unnamed") : ball.label);
    spec.b_label = "mesh";
    spec.dim = 2;
    spec.R = ball.R;
    spec.tol = h.tol;
    spec.provenance = Provenance::mesh;
    for (int k = 0; k <= h.max_order; ++k) {
        double integral = h.mass.dot(h.u[static_cast<size_t>(k)]);
        spec.A_hat.push_back(integral / ball.boundary_length);
        spec.A_raw.push_back(integral);
    }
    return spec;
}

double mesh_divergence_gap(const ExtrinsicBallMesh& ball, const DiscreteHierarchy& h, int k) {
    (void)ball;
    if (k < 0 || k >= h.max_order)
        throw UsageError("divergence gap needs 0 <= k < max_order");
    double volume = h.mass.dot(h.u[static_cast<size_t>(k)]);
    double flux = h.boundary_flux[static_cast<size_t>(k) + 1] / (k + 1);
    double scale = std::max(std::abs(volume), std::abs(flux));
    return scale > 0.0 ? std::abs(volume - flux) / scale : 0.0;
}

HypothesisFields estimate_hypothesis_fields(const ExtrinsicBallMesh& ball) {
    const int n = static_cast<int>(ball.vertices.size());
    const Eigen::Vector3d& p = ball.pole_point;

    HypothesisFields out;
    out.C.assign(static_cast<size_t>(n), 0.0);
    out.T.assign(static_cast<size_t>(n), 0.0);
    out.computed.assign(static_cast<size_t>(n), 0);

    // Mixed (Voronoi-safe) vertex areas and the cotan coordinate Laplacian.
    Eigen::VectorXd mixed = Eigen::VectorXd::Zero(n);
    Eigen::Matrix<double, Eigen::Dynamic, 3> LX =
        Eigen::Matrix<double, Eigen::Dynamic, 3>::Zero(n, 3);
    // area-weighted average of per-face tangential gradients of r
    Eigen::Matrix<double, Eigen::Dynamic, 3> grad_sum =
        Eigen::Matrix<double, Eigen::Dynamic, 3>::Zero(n, 3);
    Eigen::VectorXd grad_wsum = Eigen::VectorXd::Zero(n);

    for (const auto& tri : ball.faces) {
        const Eigen::Vector3d& x0 = ball.vertices[static_cast<size_t>(tri[0])];
        const Eigen::Vector3d& x1 = ball.vertices[static_cast<size_t>(tri[1])];
        const Eigen::Vector3d& x2 = ball.vertices[static_cast<size_t>(tri[2])];
        Eigen::Vector3d nrm = (x1 - x0).cross(x2 - x0);
        double area2 = nrm.norm();
        double area = 0.5 * area2;

        std::array<const Eigen::Vector3d*, 3> x = {&x0, &x1, &x2};
        std::array<double, 3> cot;
        for (int c = 0; c < 3; ++c) {
            Eigen::Vector3d e1 = *x[(c + 1) % 3] - *x[c];
            Eigen::Vector3d e2 = *x[(c + 2) % 3] - *x[c];
            cot[static_cast<size_t>(c)] = e1.dot(e2) / area2;
        }
        for (int c = 0; c < 3; ++c) {
            int i = tri[(c + 1) % 3];
            int j = tri[(c + 2) % 3];
            double w = 0.5 * cot[static_cast<size_t>(c)];
            Eigen::Vector3d diff = *x[(c + 1) % 3] - *x[(c + 2) % 3];
            LX.row(i) += w * diff.transpose();
            LX.row(j) -= w * diff.transpose();
        }
        // mixed areas: Voronoi split for acute faces, else 1/2-1/4-1/4
        bool obtuse = false;
        int obtuse_at = -1;
        for (int c = 0; c < 3; ++c) {
            if (cot[static_cast<size_t>(c)] < 0.0) {
                obtuse = true;
                obtuse_at = c;
            }
        }
        if (!obtuse) {
            for (int c = 0; c < 3; ++c) {
                int i = tri[(c + 1) % 3];
                int j = tri[(c + 2) % 3];
                double l2 = (*x[(c + 1) % 3] - *x[(c + 2) % 3]).squaredNorm();
                double piece = 0.125 * l2 * cot[static_cast<size_t>(c)];
                mixed[i] += piece;
                mixed[j] += piece;
            }
        } else {
            for (int c = 0; c < 3; ++c)
                mixed[tri[c]] += (c == obtuse_at ? 0.5 : 0.25) * area;
        }

        // P1 gradient of r(x) = |x - p| on the face
        std::array<double, 3> rv = {(x0 - p).norm(), (x1 - p).norm(), (x2 - p).norm()};
        Eigen::Vector3d unit_n = nrm / area2;
        Eigen::Vector3d grad = Eigen::Vector3d::Zero();
        for (int c = 0; c < 3; ++c) {
            Eigen::Vector3d opposite = *x[(c + 2) % 3] - *x[(c + 1) % 3];
            // gradient of the hat function at corner c
            Eigen::Vector3d ghat = unit_n.cross(opposite) / area2;
            grad += rv[static_cast<size_t>(c)] * ghat;
        }
        for (int c = 0; c < 3; ++c) {
            grad_sum.row(tri[c]) += area * grad.transpose();
            grad_wsum[tri[c]] += area;
        }
    }

    out.near_boundary.assign(static_cast<size_t>(n), 0);
    for (const auto& tri : ball.faces) {
        bool touches = false;
        for (int c = 0; c < 3; ++c)
            if (ball.on_boundary[static_cast<size_t>(tri[c])]) touches = true;
        if (touches)
            for (int c = 0; c < 3; ++c) out.near_boundary[static_cast<size_t>(tri[c])] = 1;
    }

    out.max_abs_C = 0.0;
    out.min_T = std::numeric_limits<double>::infinity();
    out.max_abs_C_core = 0.0;
    out.min_T_core = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        if (ball.on_boundary[static_cast<size_t>(i)] || i == ball.pole) continue;
        double r = (ball.vertices[static_cast<size_t>(i)] - p).norm();
        if (r <= 0.0 || mixed[i] <= 0.0 || grad_wsum[i] <= 0.0) continue;
        Eigen::Vector3d grad_r_dir = (ball.vertices[static_cast<size_t>(i)] - p) / r;
        // H = -(L X)_i / (2 A_i); C = -<grad r, H>
        Eigen::Vector3d H = -LX.row(i).transpose() / (2.0 * mixed[i]);
        out.C[static_cast<size_t>(i)] = -grad_r_dir.dot(H);
        Eigen::Vector3d tangent_grad = grad_sum.row(i).transpose() / grad_wsum[i];
        out.T[static_cast<size_t>(i)] = tangent_grad.norm();
        out.computed[static_cast<size_t>(i)] = 1;
        out.max_abs_C = std::max(out.max_abs_C, std::abs(out.C[static_cast<size_t>(i)]));
        out.min_T = std::min(out.min_T, out.T[static_cast<size_t>(i)]);
        if (!out.near_boundary[static_cast<size_t>(i)]) {
            out.max_abs_C_core =
                std::max(out.max_abs_C_core, std::abs(out.C[static_cast<size_t>(i)]));
            out.min_T_core = std::min(out.min_T_core, out.T[static_cast<size_t>(i)]);
        }
    }
    if (!std::isfinite(out.min_T)) out.min_T = 0.0;
    if (!std::isfinite(out.min_T_core)) out.min_T_core = 0.0;
    return out;
}

} // namespace exitspec
