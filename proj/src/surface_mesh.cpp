#include "exitspec/mesh/surface_mesh.hpp"
#include "exitspec/errors.hpp"
#include "exitspec/report.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

namespace exitspec {

namespace {

std::string lower_ext(const std::string& path) {
    auto dot = path.find_last_of('.');
    if (dot == std::string::npos) return "";
    std::string ext = path.substr(dot + 1);
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

std::string stem_of(const std::string& path) {
    auto slash = path.find_last_of("/\\");
    std::string name = slash == std::string::npos ? path : path.substr(slash + 1);
    auto dot = name.find_last_of('.');
    return dot == std::string::npos ? name : name.substr(0, dot);
}

[[noreturn]] void parse_fail(const std::string& label, int line, const std::string& why) {
    throw ValidationError("mesh parse error (" + label + ", line " + std::to_string(line) +
                          "): " + why);
}

double parse_number(const std::string& tok, const std::string& label, int line) {
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        parse_fail(label, line, "expected a number, got '" + tok + "'");
    return v;
}

long parse_int(const std::string& tok, const std::string& label, int line) {
    char* end = nullptr;
    long v = std::strtol(tok.c_str(), &end, 10);
    if (end == tok.c_str() || *end != '\0')
        parse_fail(label, line, "expected an integer, got '" + tok + "'");
    return v;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream ss(line);
    std::string tok;
    while (ss >> tok) out.push_back(tok);
    return out;
}

void fan_triangulate(SurfaceMesh& mesh, const std::vector<int>& poly, const std::string& label,
                     int line) {
    if (poly.size() < 3) parse_fail(label, line, "face with fewer than 3 vertices");
    if (poly.size() > 3)
        mesh.warnings.push_back(label + ", line " + std::to_string(line) +
                                ": polygonal face fan-triangulated");
    for (size_t i = 1; i + 1 < poly.size(); ++i)
        mesh.faces.push_back({poly[0], poly[i], poly[i + 1]});
}

} // namespace

SurfaceMesh parse_off(const std::string& text, const std::string& label) {
    SurfaceMesh mesh;
    mesh.label = label;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    auto next_tokens = [&](std::vector<std::string>& toks) -> bool {
        while (std::getline(in, raw)) {
            ++line_no;
            auto hash = raw.find('#');
            if (hash != std::string::npos) raw.erase(hash);
            toks = split_ws(raw);
            if (!toks.empty()) return true;
        }
        return false;
    };

    std::vector<std::string> toks;
    if (!next_tokens(toks)) parse_fail(label, line_no, "empty file");
    if (toks.size() != 1 || toks[0] != "OFF") parse_fail(label, line_no, "missing OFF header");
    if (!next_tokens(toks)) parse_fail(label, line_no, "missing counts line");
    if (toks.size() < 2) parse_fail(label, line_no, "counts line needs nv nf [ne]");
    long nv = parse_int(toks[0], label, line_no);
    long nf = parse_int(toks[1], label, line_no);
    if (nv < 0 || nf < 0) parse_fail(label, line_no, "negative counts");

    for (long i = 0; i < nv; ++i) {
        if (!next_tokens(toks)) parse_fail(label, line_no, "unexpected end of vertex list");
        if (toks.size() < 3) parse_fail(label, line_no, "vertex needs 3 coordinates");
        mesh.vertices.emplace_back(parse_number(toks[0], label, line_no),
                                   parse_number(toks[1], label, line_no),
                                   parse_number(toks[2], label, line_no));
    }
    for (long i = 0; i < nf; ++i) {
        if (!next_tokens(toks)) parse_fail(label, line_no, "unexpected end of face list");
        long cnt = parse_int(toks[0], label, line_no);
        if (cnt < 3 || static_cast<long>(toks.size()) < cnt + 1)
            parse_fail(label, line_no, "face record truncated");
        std::vector<int> poly;
        for (long j = 0; j < cnt; ++j)
            poly.push_back(static_cast<int>(parse_int(toks[1 + j], label, line_no)));
        fan_triangulate(mesh, poly, label, line_no);
    }
    return mesh;
}

SurfaceMesh parse_obj(const std::string& text, const std::string& label) {
    SurfaceMesh mesh;
    mesh.label = label;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    std::set<std::string> skipped;
    while (std::getline(in, raw)) {
        ++line_no;
        auto hash = raw.find('#');
        if (hash != std::string::npos) raw.erase(hash);
        auto toks = split_ws(raw);
        if (toks.empty()) continue;
        if (toks[0] == "v") {
            if (toks.size() < 4) parse_fail(label, line_no, "vertex needs 3 coordinates");
            mesh.vertices.emplace_back(parse_number(toks[1], label, line_no),
                                       parse_number(toks[2], label, line_no),
                                       parse_number(toks[3], label, line_no));
        } else if (toks[0] == "f") {
            std::vector<int> poly;
            for (size_t j = 1; j < toks.size(); ++j) {
                // "f 3/1/2" forms: the leading integer is the vertex index
                std::string head = toks[j].substr(0, toks[j].find('/'));
                long idx = parse_int(head, label, line_no);
                if (idx == 0) parse_fail(label, line_no, "OBJ face index 0 is invalid");
                if (idx < 0) idx = static_cast<long>(mesh.vertices.size()) + idx + 1;
                if (idx < 1 || idx > static_cast<long>(mesh.vertices.size()))
                    parse_fail(label, line_no,
                               "face index " + std::to_string(idx) + " out of range");
                poly.push_back(static_cast<int>(idx - 1));
            }
            fan_triangulate(mesh, poly, label, line_no);
        } else {
            skipped.insert(toks[0]);
        }
    }
    for (const auto& rec : skipped)
        mesh.warnings.push_back(label + ": ignored OBJ record type '" + rec + "'");
    return mesh;
}

SurfaceMesh load_mesh(const std::string& path, const std::string& format) {
    std::string fmt = format;
    if (fmt == "auto") {
        std::string ext = lower_ext(path);
        if (ext == "off") fmt = "off";
        else if (ext == "obj") fmt = "obj";
        else throw ValidationError("cannot infer mesh format from extension: " + path);
    }
    std::string text = read_text_file(path);
    SurfaceMesh mesh;
    if (fmt == "off") mesh = parse_off(text, stem_of(path));
    else if (fmt == "obj") mesh = parse_obj(text, stem_of(path));
    else throw ValidationError("unknown mesh format: " + fmt);
    validate_mesh(mesh);
    return mesh;
}

void validate_mesh(const SurfaceMesh& mesh) {
    const long nv = static_cast<long>(mesh.vertices.size());
    if (nv < 3 || mesh.faces.empty())
        throw ValidationError("mesh must have at least 3 vertices and 1 face");

    double scale = 0.0;
    for (const auto& v : mesh.vertices) scale = std::max(scale, v.norm());
    if (scale == 0.0) scale = 1.0;

    std::set<std::array<int, 3>> seen;
    std::map<std::pair<int, int>, int> edge_count;
    for (size_t f = 0; f < mesh.faces.size(); ++f) {
        const auto& tri = mesh.faces[f];
        for (int c = 0; c < 3; ++c) {
            if (tri[c] < 0 || tri[c] >= nv)
                throw ValidationError("face " + std::to_string(f) + " references vertex " +
                                      std::to_string(tri[c]) + " out of range");
        }
        if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2])
            throw ValidationError("face " + std::to_string(f) + " repeats a vertex index");
        std::array<int, 3> key = tri;
        std::sort(key.begin(), key.end());
        if (!seen.insert(key).second)
            throw ValidationError("repeated face {" + std::to_string(tri[0]) + "," +
                                  std::to_string(tri[1]) + "," + std::to_string(tri[2]) + "}");
        Eigen::Vector3d a = mesh.vertices[tri[1]] - mesh.vertices[tri[0]];
        Eigen::Vector3d b = mesh.vertices[tri[2]] - mesh.vertices[tri[0]];
        double area2 = a.cross(b).norm();
        if (area2 < 1e-14 * scale * scale)
            throw ValidationError("degenerate (zero-area) face " + std::to_string(f));
        for (int c = 0; c < 3; ++c) {
            int i = tri[c], j = tri[(c + 1) % 3];
            ++edge_count[{std::min(i, j), std::max(i, j)}];
        }
    }
    std::string offenders;
    int bad = 0;
    for (const auto& [edge, count] : edge_count) {
        if (count > 2) {
            ++bad;
            if (bad <= 8)
                offenders += " (" + std::to_string(edge.first) + "," +
                             std::to_string(edge.second) + ")x" + std::to_string(count);
        }
    }
    if (bad > 0)
        throw ValidationError("non-manifold mesh: " + std::to_string(bad) +
                              " edges on more than 2 faces:" + offenders);
    if (mesh.pole_vertex < -1 || mesh.pole_vertex >= nv)
        throw ValidationError("pole vertex index out of range");
}

void set_pole_by_index(SurfaceMesh& mesh, int index) {
    if (index < 0 || index >= static_cast<int>(mesh.vertices.size()))
        throw ValidationError("pole vertex index out of range: " + std::to_string(index));
    mesh.pole_vertex = index;
}

void set_pole_nearest(SurfaceMesh& mesh, const Eigen::Vector3d& point) {
    if (mesh.vertices.empty()) throw ValidationError("mesh has no vertices");
    int best = 0;
    double best_d = (mesh.vertices[0] - point).squaredNorm();
    for (int i = 1; i < static_cast<int>(mesh.vertices.size()); ++i) {
        double d = (mesh.vertices[i] - point).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    mesh.pole_vertex = best;
}

} // namespace exitspec
