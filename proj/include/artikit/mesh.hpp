#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "artikit/errors.hpp"
#include "artikit/numeric.hpp"
#include "artikit/pointcloud.hpp"
#include "artikit/rng.hpp"

namespace artikit {

struct TriMesh {
    std::vector<Eigen::Vector3d> vertices;
    std::vector<std::array<int, 3>> faces;  // 0-based

    int vertex_count() const { return static_cast<int>(vertices.size()); }
    int face_count() const { return static_cast<int>(faces.size()); }
};

inline bool operator==(const TriMesh& a, const TriMesh& b) {
    if (a.faces != b.faces || a.vertices.size() != b.vertices.size()) return false;
    for (std::size_t i = 0; i < a.vertices.size(); ++i)
        if (!(a.vertices[i].array() == b.vertices[i].array()).all()) return false;
    return true;
}

inline void validate_mesh(const TriMesh& mesh, const std::string& context) {
    for (const auto& v : mesh.vertices)
        if (!v.allFinite()) throw DegenerateGeometryError(context + ": non-finite vertex");
    const int n = mesh.vertex_count();
    for (const auto& f : mesh.faces) {
        for (int k = 0; k < 3; ++k)
            if (f[static_cast<std::size_t>(k)] < 0 || f[static_cast<std::size_t>(k)] >= n)
                throw DegenerateGeometryError(context + ": face index out of range");
        if (f[0] == f[1] || f[1] == f[2] || f[0] == f[2])
            throw DegenerateGeometryError(context + ": degenerate face");
    }
}

// ---------------------------------------------------------------------------
// Wavefront OBJ (v/f lines only, 1-based indices)
// ---------------------------------------------------------------------------

inline TriMesh load_obj(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open " + path.string());
    TriMesh mesh;
    std::string line;
    int line_no = 0;
    while (std::getline(file, line)) {
        ++line_no;
        std::istringstream stream(line);
        std::string keyword;
        if (!(stream >> keyword)) continue;
        if (keyword[0] == '#') continue;
        if (keyword == "v") {
            std::vector<double> values;
            std::string token;
            while (stream >> token) {
                auto v = parse_double(token);
                if (!v)
                    throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad float '" +
                                     token + "'");
                values.push_back(*v);
            }
            if (values.size() < 3)
                throw ParseError(path.string() + ":" + std::to_string(line_no) +
                                 ": vertex needs 3 coordinates");
            mesh.vertices.emplace_back(values[0], values[1], values[2]);
        } else if (keyword == "f") {
            std::vector<int> indices;
            std::string token;
            while (stream >> token) {
                // accept "i", "i/j", "i/j/k" forms; only the vertex index is used
                const std::string head = token.substr(0, token.find('/'));
                int idx = 0;
                auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
                if (ec != std::errc{} || ptr != head.data() + head.size())
                    throw ParseError(path.string() + ":" + std::to_string(line_no) + ": bad face index '" +
                                     token + "'");
                if (idx <= 0)
                    throw ParseError(path.string() + ":" + std::to_string(line_no) +
                                     ": face indices are 1-based, got " + std::to_string(idx));
                indices.push_back(idx - 1);
            }
            if (indices.size() != 3)
                throw ParseError(path.string() + ":" + std::to_string(line_no) +
                                 ": only triangular faces are supported");
            mesh.faces.push_back({indices[0], indices[1], indices[2]});
        } else if (keyword == "vn" || keyword == "vt" || keyword == "o" || keyword == "g" ||
                   keyword == "s" || keyword == "usemtl" || keyword == "mtllib") {
            continue;
        } else {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": unsupported keyword '" +
                             keyword + "'");
        }
    }
    validate_mesh(mesh, path.string());
    return mesh;
}

inline void save_obj(const TriMesh& mesh, const std::filesystem::path& path) {
    validate_mesh(mesh, path.string());
    std::ofstream file(path);
    if (!file) throw IoError("cannot write " + path.string());
    for (const auto& v : mesh.vertices)
        file << "v " << format_double(v.x()) << ' ' << format_double(v.y()) << ' '
             << format_double(v.z()) << '\n';
    for (const auto& f : mesh.faces)
        file << "f " << f[0] + 1 << ' ' << f[1] + 1 << ' ' << f[2] + 1 << '\n';
}

// ---------------------------------------------------------------------------
// Measures
// ---------------------------------------------------------------------------

// Signed volume via the divergence theorem; exact for closed oriented meshes.
inline double mesh_volume(const TriMesh& mesh) {
    double volume = 0.0;
    for (const auto& f : mesh.faces) {
        const auto& a = mesh.vertices[static_cast<std::size_t>(f[0])];
        const auto& b = mesh.vertices[static_cast<std::size_t>(f[1])];
        const auto& c = mesh.vertices[static_cast<std::size_t>(f[2])];
        volume += a.dot(b.cross(c)) / 6.0;
    }
    return volume;
}

inline double mesh_surface_area(const TriMesh& mesh) {
    double area = 0.0;
    for (const auto& f : mesh.faces) {
        const auto& a = mesh.vertices[static_cast<std::size_t>(f[0])];
        const auto& b = mesh.vertices[static_cast<std::size_t>(f[1])];
        const auto& c = mesh.vertices[static_cast<std::size_t>(f[2])];
        area += 0.5 * (b - a).cross(c - a).norm();
    }
    return area;
}

struct Aabb {
    Eigen::Vector3d lower = Eigen::Vector3d::Constant(std::numeric_limits<double>::infinity());
    Eigen::Vector3d upper = Eigen::Vector3d::Constant(-std::numeric_limits<double>::infinity());

    void expand(const Eigen::Vector3d& p) {
        lower = lower.cwiseMin(p);
        upper = upper.cwiseMax(p);
    }
    bool valid() const { return (lower.array() <= upper.array()).all(); }
    std::array<Eigen::Vector3d, 8> corners() const {
        std::array<Eigen::Vector3d, 8> out;
        for (int i = 0; i < 8; ++i)
            out[static_cast<std::size_t>(i)] = {i & 1 ? upper.x() : lower.x(),
                                                i & 2 ? upper.y() : lower.y(),
                                                i & 4 ? upper.z() : lower.z()};
        return out;
    }
};

inline Aabb mesh_aabb(const TriMesh& mesh) {
    Aabb box;
    for (const auto& v : mesh.vertices) box.expand(v);
    return box;
}

// Uniform area-weighted surface sampling; colors default to mid-gray.
inline PointCloud sample_mesh_surface(const TriMesh& mesh, int n, std::uint64_t seed) {
    if (mesh.faces.empty()) throw DegenerateGeometryError("cannot sample a mesh with no faces");
    if (n < 1) throw InvalidCountError("sample count must be >= 1");
    std::vector<double> cumulative(mesh.faces.size());
    double total = 0.0;
    for (std::size_t i = 0; i < mesh.faces.size(); ++i) {
        const auto& f = mesh.faces[i];
        const auto& a = mesh.vertices[static_cast<std::size_t>(f[0])];
        const auto& b = mesh.vertices[static_cast<std::size_t>(f[1])];
        const auto& c = mesh.vertices[static_cast<std::size_t>(f[2])];
        total += 0.5 * (b - a).cross(c - a).norm();
        cumulative[i] = total;
    }
    if (total <= 0.0) throw DegenerateGeometryError("mesh has zero surface area");

    Rng rng(seed);
    PointCloud cloud;
    cloud.points.resize(n, 6);
    for (int i = 0; i < n; ++i) {
        const double pick = rng.uniform() * total;
        const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), pick);
        const std::size_t face = static_cast<std::size_t>(it - cumulative.begin());
        const auto& f = mesh.faces[face < mesh.faces.size() ? face : mesh.faces.size() - 1];
        const auto& a = mesh.vertices[static_cast<std::size_t>(f[0])];
        const auto& b = mesh.vertices[static_cast<std::size_t>(f[1])];
        const auto& c = mesh.vertices[static_cast<std::size_t>(f[2])];
        double u = rng.uniform(), v = rng.uniform();
        if (u + v > 1.0) {
            u = 1.0 - u;
            v = 1.0 - v;
        }
        const Eigen::Vector3d p = a + u * (b - a) + v * (c - a);
        cloud.points.row(i) << p.x(), p.y(), p.z(), 0.5, 0.5, 0.5;
    }
    return cloud;
}

}  // namespace artikit
