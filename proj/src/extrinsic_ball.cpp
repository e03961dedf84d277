#include "exitspec/mesh/extrinsic_ball.hpp"
#include "exitspec/errors.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>

namespace exitspec {

namespace {

using Edge = std::pair<int, int>;

Edge edge_key(int a, int b) { return {std::min(a, b), std::max(a, b)}; }

// Root in (0,1) of |a + t(b-a) - p|^2 = R^2 given d(a) < R < d(b); the cut
// point lies on the straight edge and its ambient distance is exact.
double edge_cut_parameter(const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                          const Eigen::Vector3d& p, double R) {
    Eigen::Vector3d u = a - p;
    Eigen::Vector3d e = b - a;
    double A = e.squaredNorm();
    double B = u.dot(e);
    double C = u.squaredNorm() - R * R;
    // C < 0 < A; the positive root is t = (-B + sqrt(B^2 - A C)) / A,
    // computed in the cancellation-free arrangement.
    double disc = B * B - A * C;
    double sq = std::sqrt(std::max(disc, 0.0));
    double t = B <= 0.0 ? (sq - B) / A : -C / (B + sq);
    return std::clamp(t, 0.0, 1.0);
}

} // namespace

ExtrinsicBallMesh extract_extrinsic_ball(const SurfaceMesh& mesh, double R) {
    if (!(R > 0.0)) throw DomainError("ball radius must be positive");
    if (mesh.pole_vertex < 0 || mesh.pole_vertex >= static_cast<int>(mesh.vertices.size()))
        throw ValidationError("pole vertex is not set");

    ExtrinsicBallMesh ball;
    ball.label = mesh.label;
    const Eigen::Vector3d p = mesh.vertices[mesh.pole_vertex];
    ball.pole_point = p;

    // Nudge R off any vertex that sits (nearly) on the sphere. Pulling the
    // radius inward leaves such vertices just outside, so the razor-thin cut
    // elements they cause touch only boundary vertices, which the Dirichlet
    // solve eliminates; pushing outward would wedge them between interior
    // nodes instead.
    const double close_tol = 1e-7 * R;
    std::vector<double> dist(mesh.vertices.size());
    for (size_t i = 0; i < mesh.vertices.size(); ++i)
        dist[i] = (mesh.vertices[i] - p).norm();
    double R_eff = R;
    for (int pass = 0; pass < 8; ++pass) {
        bool clean = true;
        for (double d : dist) {
            if (std::abs(d - R_eff) < close_tol) {
                clean = false;
                break;
            }
        }
        if (clean) break;
        R_eff -= 4.0 * close_tol;
        ball.warnings.push_back("radius nudged off a vertex at distance R");
    }
    ball.R = R_eff;

    auto inside = [&](int v) { return dist[static_cast<size_t>(v)] < R_eff; };
    if (!inside(mesh.pole_vertex))
        throw DomainError("pole is not strictly inside the ball radius");

    // Compact containment: the mesh's own rim must stay outside the ball.
    std::map<Edge, int> parent_edge_faces;
    for (const auto& tri : mesh.faces)
        for (int c = 0; c < 3; ++c)
            ++parent_edge_faces[edge_key(tri[c], tri[(c + 1) % 3])];
    for (const auto& [edge, count] : parent_edge_faces) {
        if (count == 1 && (inside(edge.first) || inside(edge.second)))
            throw DomainError("ball of radius " + std::to_string(R) +
                              " is not compactly contained: it reaches the mesh rim");
    }

    // Copy kept vertices and create cut vertices lazily.
    std::vector<int> vertex_map(mesh.vertices.size(), -1);
    auto keep_vertex = [&](int v) {
        if (vertex_map[static_cast<size_t>(v)] < 0) {
            vertex_map[static_cast<size_t>(v)] = static_cast<int>(ball.vertices.size());
            ball.vertices.push_back(mesh.vertices[static_cast<size_t>(v)]);
            ball.parent_vertex.push_back(v);
            ball.on_boundary.push_back(0);
        }
        return vertex_map[static_cast<size_t>(v)];
    };
    std::map<Edge, int> cut_vertex;
    auto cut = [&](int in_v, int out_v) {
        Edge key = edge_key(in_v, out_v);
        auto it = cut_vertex.find(key);
        if (it != cut_vertex.end()) return it->second;
        double t = edge_cut_parameter(mesh.vertices[static_cast<size_t>(in_v)],
                                      mesh.vertices[static_cast<size_t>(out_v)], p, R_eff);
        Eigen::Vector3d q = mesh.vertices[static_cast<size_t>(in_v)] +
                            t * (mesh.vertices[static_cast<size_t>(out_v)] -
                                 mesh.vertices[static_cast<size_t>(in_v)]);
        int idx = static_cast<int>(ball.vertices.size());
        ball.vertices.push_back(q);
        ball.parent_vertex.push_back(-1);
        ball.on_boundary.push_back(1);
        cut_vertex.emplace(key, idx);
        return idx;
    };

    for (const auto& tri : mesh.faces) {
        int in_count = 0;
        for (int c = 0; c < 3; ++c) in_count += inside(tri[c]) ? 1 : 0;
        if (in_count == 0) continue;
        if (in_count == 3) {
            ball.faces.push_back({keep_vertex(tri[0]), keep_vertex(tri[1]), keep_vertex(tri[2])});
            continue;
        }
        // rotate so the pattern starts at a canonical corner
        int a = tri[0], b = tri[1], c = tri[2];
        if (in_count == 1) {
            while (!inside(a)) {
                int tmp = a;
                a = b;
                b = c;
                c = tmp;
            }
            ball.faces.push_back({keep_vertex(a), cut(a, b), cut(a, c)});
        } else { // two inside
            while (inside(a)) {
                int tmp = a;
                a = b;
                b = c;
                c = tmp;
            } // a is the single outside vertex; b, c inside
            int qb = cut(b, a);
            int qc = cut(c, a);
            ball.faces.push_back({keep_vertex(b), keep_vertex(c), qc});
            ball.faces.push_back({keep_vertex(b), qc, qb});
        }
    }
    if (ball.faces.empty()) throw DomainError("extrinsic ball has empty interior");

    // Keep only the connected component of the pole.
    int pole_new = vertex_map[static_cast<size_t>(mesh.pole_vertex)];
    if (pole_new < 0) throw DomainError("pole has no incident face inside the ball");
    {
        std::vector<std::vector<int>> vertex_faces(ball.vertices.size());
        for (size_t f = 0; f < ball.faces.size(); ++f)
            for (int c = 0; c < 3; ++c)
                vertex_faces[static_cast<size_t>(ball.faces[f][c])].push_back(
                    static_cast<int>(f));
        std::vector<char> v_keep(ball.vertices.size(), 0);
        std::queue<int> frontier;
        frontier.push(pole_new);
        v_keep[static_cast<size_t>(pole_new)] = 1;
        while (!frontier.empty()) {
            int v = frontier.front();
            frontier.pop();
            for (int f : vertex_faces[static_cast<size_t>(v)]) {
                for (int c = 0; c < 3; ++c) {
                    int u = ball.faces[static_cast<size_t>(f)][c];
                    if (!v_keep[static_cast<size_t>(u)]) {
                        v_keep[static_cast<size_t>(u)] = 1;
                        frontier.push(u);
                    }
                }
            }
        }
        bool dropped = false;
        std::vector<int> remap(ball.vertices.size(), -1);
        std::vector<Eigen::Vector3d> kept_v;
        std::vector<int> kept_parent;
        std::vector<char> kept_bnd;
        for (size_t i = 0; i < ball.vertices.size(); ++i) {
            if (!v_keep[i]) {
                dropped = true;
                continue;
            }
            remap[i] = static_cast<int>(kept_v.size());
            kept_v.push_back(ball.vertices[i]);
            kept_parent.push_back(ball.parent_vertex[i]);
            kept_bnd.push_back(ball.on_boundary[i]);
        }
        if (dropped) {
            std::vector<std::array<int, 3>> kept_f;
            for (const auto& tri : ball.faces) {
                if (remap[static_cast<size_t>(tri[0])] >= 0 &&
                    remap[static_cast<size_t>(tri[1])] >= 0 &&
                    remap[static_cast<size_t>(tri[2])] >= 0)
                    kept_f.push_back({remap[static_cast<size_t>(tri[0])],
                                      remap[static_cast<size_t>(tri[1])],
                                      remap[static_cast<size_t>(tri[2])]});
            }
            ball.vertices = std::move(kept_v);
            ball.parent_vertex = std::move(kept_parent);
            ball.on_boundary = std::move(kept_bnd);
            ball.faces = std::move(kept_f);
            ball.warnings.push_back("dropped ball components not containing the pole");
            pole_new = remap[static_cast<size_t>(pole_new)];
        }
    }
    ball.pole = pole_new;

    // Boundary loops: edges on exactly one face, walked into ordered chains.
    std::map<Edge, int> edge_faces;
    for (const auto& tri : ball.faces)
        for (int c = 0; c < 3; ++c)
            ++edge_faces[edge_key(tri[c], tri[(c + 1) % 3])];
    std::map<int, std::vector<int>> boundary_adj;
    long n_edges = 0;
    for (const auto& [edge, count] : edge_faces) {
        ++n_edges;
        if (count == 1) {
            boundary_adj[edge.first].push_back(edge.second);
            boundary_adj[edge.second].push_back(edge.first);
        }
    }
    for (const auto& [v, nbrs] : boundary_adj) {
        if (nbrs.size() != 2)
            throw NumericError("boundary vertex " + std::to_string(v) + " has " +
                               std::to_string(nbrs.size()) + " boundary edges; cut is tangled");
        if (!ball.on_boundary[static_cast<size_t>(v)])
            throw DomainError("interior mesh vertex landed on the ball boundary; "
                              "the ball is not compactly contained");
    }
    std::set<int> unvisited;
    for (const auto& [v, nbrs] : boundary_adj) unvisited.insert(v);
    while (!unvisited.empty()) {
        int start = *unvisited.begin();
        std::vector<int> loop;
        int prev = -1, cur = start;
        do {
            loop.push_back(cur);
            unvisited.erase(cur);
            const auto& nbrs = boundary_adj[cur];
            int nxt = nbrs[0] == prev ? nbrs[1] : nbrs[0];
            prev = cur;
            cur = nxt;
        } while (cur != start);
        for (size_t i = 0; i < loop.size(); ++i) {
            const Eigen::Vector3d& a = ball.vertices[static_cast<size_t>(loop[i])];
            const Eigen::Vector3d& b =
                ball.vertices[static_cast<size_t>(loop[(i + 1) % loop.size()])];
            ball.boundary_length += (a - b).norm();
        }
        ball.boundary_loops.push_back(std::move(loop));
    }
    if (ball.boundary_loops.empty())
        throw DomainError("extrinsic ball has no boundary: mesh is closed inside the ball");

    ball.euler_characteristic = static_cast<int>(ball.vertices.size()) -
                                static_cast<int>(n_edges) +
                                static_cast<int>(ball.faces.size());

    // Cut points must sit on the sphere to tight tolerance.
    for (size_t i = 0; i < ball.vertices.size(); ++i) {
        if (!ball.on_boundary[i]) continue;
        double d = (ball.vertices[i] - p).norm();
        if (std::abs(d - R_eff) > 1e-9 * std::max(1.0, R_eff))
            throw NumericError("cut vertex missed the sphere by " +
                               std::to_string(std::abs(d - R_eff)));
    }
    return ball;
}

double mesh_area(const ExtrinsicBallMesh& ball) {
    double area = 0.0;
    for (const auto& tri : ball.faces) {
        Eigen::Vector3d a = ball.vertices[static_cast<size_t>(tri[1])] -
                            ball.vertices[static_cast<size_t>(tri[0])];
        Eigen::Vector3d b = ball.vertices[static_cast<size_t>(tri[2])] -
                            ball.vertices[static_cast<size_t>(tri[0])];
        area += 0.5 * a.cross(b).norm();
    }
    return area;
}

} // namespace exitspec
