#pragma once

#include <Eigen/Dense>
#include <array>
#include <map>
#include <set>
#include <stdexcept>
#include <vector>

#include "artikit/errors.hpp"
#include "artikit/mesh.hpp"
#include "artikit/pointcloud.hpp"

namespace artikit {

enum class MeshMethod { ConvexHull, Alpha };

namespace detail {

struct HullFace {
    std::array<int, 3> v;
    Eigen::Vector3d normal;
    double offset;  // plane: normal . x = offset
    bool alive = true;
};

inline Eigen::Vector3d face_normal(const std::vector<Eigen::Vector3d>& pts, int a, int b, int c) {
    return (pts[static_cast<std::size_t>(b)] - pts[static_cast<std::size_t>(a)])
        .cross(pts[static_cast<std::size_t>(c)] - pts[static_cast<std::size_t>(a)]);
}

// Incremental convex hull. Throws DegenerateGeometryError when the input has
// no affine span of dimension 3.
inline TriMesh convex_hull(const std::vector<Eigen::Vector3d>& pts) {
    const int n = static_cast<int>(pts.size());
    if (n < 4) throw DegenerateGeometryError("convex hull needs at least 4 points, got " +
                                             std::to_string(n));

    Eigen::Vector3d lo = pts[0], hi = pts[0];
    for (const auto& p : pts) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const double scale = std::max((hi - lo).norm(), 1e-12);
    const double eps = 1e-10 * scale;

    // initial simplex: spread-out extremes
    int i0 = 0, i1 = -1;
    {
        double best = -1.0;
        for (int i = 1; i < n; ++i) {
            const double d = (pts[static_cast<std::size_t>(i)] - pts[0]).norm();
            if (d > best) {
                best = d;
                i1 = i;
            }
        }
        if (best < eps) throw DegenerateGeometryError("all points coincide");
    }
    int i2 = -1;
    {
        double best = -1.0;
        const Eigen::Vector3d dir =
            (pts[static_cast<std::size_t>(i1)] - pts[static_cast<std::size_t>(i0)]).normalized();
        for (int i = 0; i < n; ++i) {
            const Eigen::Vector3d rel = pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(i0)];
            const double d = (rel - rel.dot(dir) * dir).norm();
            if (d > best) {
                best = d;
                i2 = i;
            }
        }
        if (best < eps) throw DegenerateGeometryError("points are collinear");
    }
    int i3 = -1;
    {
        double best = -1.0;
        const Eigen::Vector3d nrm = face_normal(pts, i0, i1, i2).normalized();
        for (int i = 0; i < n; ++i) {
            const double d =
                std::fabs(nrm.dot(pts[static_cast<std::size_t>(i)] - pts[static_cast<std::size_t>(i0)]));
            if (d > best) {
                best = d;
                i3 = i;
            }
        }
        if (best < eps) throw DegenerateGeometryError("points are coplanar");
    }

    const Eigen::Vector3d interior = (pts[static_cast<std::size_t>(i0)] + pts[static_cast<std::size_t>(i1)] +
                                      pts[static_cast<std::size_t>(i2)] + pts[static_cast<std::size_t>(i3)]) /
                                     4.0;

    std::vector<HullFace> faces;
    auto push_face = [&](int a, int b, int c) {
        Eigen::Vector3d normal = face_normal(pts, a, b, c);
        double offset = normal.dot(pts[static_cast<std::size_t>(a)]);
        if (normal.dot(interior) > offset) {  // flip to outward
            std::swap(b, c);
            normal = -normal;
            offset = normal.dot(pts[static_cast<std::size_t>(a)]);
        }
        faces.push_back({{a, b, c}, normal, offset, true});
    };
    push_face(i0, i1, i2);
    push_face(i0, i1, i3);
    push_face(i0, i2, i3);
    push_face(i1, i2, i3);

    for (int p = 0; p < n; ++p) {
        if (p == i0 || p == i1 || p == i2 || p == i3) continue;
        const Eigen::Vector3d& point = pts[static_cast<std::size_t>(p)];
        std::vector<int> visible;
        for (int f = 0; f < static_cast<int>(faces.size()); ++f) {
            if (!faces[static_cast<std::size_t>(f)].alive) continue;
            const auto& face = faces[static_cast<std::size_t>(f)];
            if (face.normal.dot(point) - face.offset > eps * face.normal.norm())
                visible.push_back(f);
        }
        if (visible.empty()) continue;  // inside current hull

        // horizon = undirected edges used by exactly one visible face
        std::map<std::pair<int, int>, int> edge_use;
        for (int f : visible) {
            const auto& v = faces[static_cast<std::size_t>(f)].v;
            for (int k = 0; k < 3; ++k) {
                int a = v[static_cast<std::size_t>(k)], b = v[static_cast<std::size_t>((k + 1) % 3)];
                if (a > b) std::swap(a, b);
                edge_use[{a, b}]++;
            }
        }
        for (int f : visible) faces[static_cast<std::size_t>(f)].alive = false;
        for (const auto& [edge, uses] : edge_use)
            if (uses == 1) push_face(edge.first, edge.second, p);
    }

    // compact to the final mesh, remapping vertex indices
    TriMesh mesh;
    std::map<int, int> remap;
    for (const auto& face : faces) {
        if (!face.alive) continue;
        std::array<int, 3> out{};
        for (int k = 0; k < 3; ++k) {
            const int v = face.v[static_cast<std::size_t>(k)];
            auto it = remap.find(v);
            if (it == remap.end()) {
                it = remap.emplace(v, static_cast<int>(mesh.vertices.size())).first;
                mesh.vertices.push_back(pts[static_cast<std::size_t>(v)]);
            }
            out[static_cast<std::size_t>(k)] = it->second;
        }
        mesh.faces.push_back(out);
    }
    validate_mesh(mesh, "convex hull");
    return mesh;
}

// Largest signed distance of any point to a hull face plane; <= 0 means all
// points are on or inside the hull.
inline double hull_max_signed_distance(const TriMesh& hull, const std::vector<Eigen::Vector3d>& pts) {
    double worst = -std::numeric_limits<double>::infinity();
    for (const auto& f : hull.faces) {
        const auto& a = hull.vertices[static_cast<std::size_t>(f[0])];
        const Eigen::Vector3d normal =
            (hull.vertices[static_cast<std::size_t>(f[1])] - a)
                .cross(hull.vertices[static_cast<std::size_t>(f[2])] - a)
                .normalized();
        for (const auto& p : pts) worst = std::max(worst, normal.dot(p - a));
    }
    return worst;
}

struct Tetra {
    std::array<int, 4> v;
    Eigen::Vector3d circumcenter;
    double circumradius2;
    bool alive = true;
};

inline bool circumsphere(const std::vector<Eigen::Vector3d>& pts, const std::array<int, 4>& v,
                         Eigen::Vector3d& center, double& radius2) {
    const Eigen::Vector3d& a = pts[static_cast<std::size_t>(v[0])];
    Eigen::Matrix3d m;
    Eigen::Vector3d rhs;
    for (int i = 0; i < 3; ++i) {
        const Eigen::Vector3d d = pts[static_cast<std::size_t>(v[static_cast<std::size_t>(i + 1)])] - a;
        m.row(i) = 2.0 * d;
        rhs[i] = d.squaredNorm();
    }
    const double det = m.determinant();
    if (std::fabs(det) < 1e-18) return false;  // flat tetra
    const Eigen::Vector3d local = m.partialPivLu().solve(rhs);
    center = a + local;
    radius2 = local.squaredNorm();
    return true;
}

// Bowyer-Watson incremental Delaunay tetrahedralization. Assumes points in
// general position; flat tetra candidates are rejected during insertion.
inline std::vector<Tetra> delaunay3d(const std::vector<Eigen::Vector3d>& input) {
    const int n = static_cast<int>(input.size());
    std::vector<Eigen::Vector3d> pts = input;

    Eigen::Vector3d lo = pts[0], hi = pts[0];
    for (const auto& p : pts) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Eigen::Vector3d center = 0.5 * (lo + hi);
    const double span = std::max((hi - lo).norm(), 1e-9);

    // enclosing super-tetrahedron
    const double s = 50.0 * span;
    pts.push_back(center + Eigen::Vector3d(s, 0, -s / 2));
    pts.push_back(center + Eigen::Vector3d(-s, s, -s / 2));
    pts.push_back(center + Eigen::Vector3d(-s, -s, -s / 2));
    pts.push_back(center + Eigen::Vector3d(0, 0, s));
    const int s0 = n, s1 = n + 1, s2 = n + 2, s3 = n + 3;

    std::vector<Tetra> tetras;
    auto add_tetra = [&](const std::array<int, 4>& v) {
        Tetra t;
        t.v = v;
        if (!circumsphere(pts, v, t.circumcenter, t.circumradius2)) return;  // reject flat
        tetras.push_back(t);
    };
    add_tetra({s0, s1, s2, s3});

    static const std::array<std::array<int, 3>, 4> kFaceOf{{{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};
    for (int p = 0; p < n; ++p) {
        const Eigen::Vector3d& point = pts[static_cast<std::size_t>(p)];
        std::vector<int> bad;
        for (int t = 0; t < static_cast<int>(tetras.size()); ++t) {
            auto& tet = tetras[static_cast<std::size_t>(t)];
            if (!tet.alive) continue;
            if ((point - tet.circumcenter).squaredNorm() < tet.circumradius2) bad.push_back(t);
        }
        std::map<std::array<int, 3>, int> face_use;
        for (int t : bad) {
            const auto& v = tetras[static_cast<std::size_t>(t)].v;
            for (const auto& fo : kFaceOf) {
                std::array<int, 3> face{v[static_cast<std::size_t>(fo[0])], v[static_cast<std::size_t>(fo[1])],
                                        v[static_cast<std::size_t>(fo[2])]};
                std::sort(face.begin(), face.end());
                face_use[face]++;
            }
        }
        for (int t : bad) tetras[static_cast<std::size_t>(t)].alive = false;
        for (const auto& [face, uses] : face_use)
            if (uses == 1) add_tetra({face[0], face[1], face[2], p});
    }

    std::vector<Tetra> result;
    for (const auto& t : tetras) {
        if (!t.alive) continue;
        bool super = false;
        for (int v : t.v) super |= v >= n;
        if (!super) result.push_back(t);
    }
    return result;
}

// Boundary surface of the union of Delaunay tetrahedra with circumradius at
// most alpha.
inline TriMesh alpha_complex_surface(const std::vector<Eigen::Vector3d>& pts, double alpha) {
    auto tetras = delaunay3d(pts);
    std::vector<Tetra> kept;
    for (const auto& t : tetras)
        if (t.circumradius2 <= alpha * alpha) kept.push_back(t);
    if (kept.empty())
        throw DegenerateGeometryError("alpha complex is empty; increase alpha");

    static const std::array<std::array<int, 3>, 4> kFaceOf{{{0, 2, 1}, {0, 1, 3}, {0, 3, 2}, {1, 2, 3}}};
    std::map<std::array<int, 3>, std::pair<std::array<int, 3>, int>> boundary;  // sorted -> (oriented, count)
    std::map<std::array<int, 3>, Eigen::Vector3d> owner_centroid;
    for (const auto& t : kept) {
        const Eigen::Vector3d centroid =
            (pts[static_cast<std::size_t>(t.v[0])] + pts[static_cast<std::size_t>(t.v[1])] +
             pts[static_cast<std::size_t>(t.v[2])] + pts[static_cast<std::size_t>(t.v[3])]) /
            4.0;
        for (const auto& fo : kFaceOf) {
            std::array<int, 3> oriented{t.v[static_cast<std::size_t>(fo[0])],
                                        t.v[static_cast<std::size_t>(fo[1])],
                                        t.v[static_cast<std::size_t>(fo[2])]};
            std::array<int, 3> key = oriented;
            std::sort(key.begin(), key.end());
            auto [it, inserted] = boundary.try_emplace(key, std::make_pair(oriented, 0));
            it->second.second++;
            if (inserted) owner_centroid[key] = centroid;
        }
    }

    TriMesh mesh;
    std::map<int, int> remap;
    for (const auto& [key, entry] : boundary) {
        if (entry.second != 1) continue;  // interior face
        std::array<int, 3> oriented = entry.first;
        // orient away from the owning tetra
        const auto& a = pts[static_cast<std::size_t>(oriented[0])];
        const Eigen::Vector3d normal = (pts[static_cast<std::size_t>(oriented[1])] - a)
                                           .cross(pts[static_cast<std::size_t>(oriented[2])] - a);
        if (normal.dot(owner_centroid[key] - a) > 0.0) std::swap(oriented[1], oriented[2]);
        std::array<int, 3> out{};
        for (int k = 0; k < 3; ++k) {
            const int v = oriented[static_cast<std::size_t>(k)];
            auto it = remap.find(v);
            if (it == remap.end()) {
                it = remap.emplace(v, static_cast<int>(mesh.vertices.size())).first;
                mesh.vertices.push_back(pts[static_cast<std::size_t>(v)]);
            }
            out[static_cast<std::size_t>(k)] = it->second;
        }
        mesh.faces.push_back(out);
    }
    validate_mesh(mesh, "alpha complex");
    return mesh;
}

}  // namespace detail

// Mesh the masked subset of a cloud. ConvexHull is the deterministic default;
// Alpha keeps concavities at the cost of an alpha radius parameter.
inline TriMesh points_to_mesh(const PointCloud& cloud, const PartMask& mask, MeshMethod method,
                              double alpha = 0.0) {
    validate_mask(mask, cloud.size());
    std::vector<Eigen::Vector3d> pts;
    pts.reserve(mask.member_indices.size());
    for (int index : mask.member_indices) pts.push_back(cloud.position(index));
    if (pts.size() < 4)
        throw DegenerateGeometryError("part '" + mask.part_name + "' selects " +
                                      std::to_string(pts.size()) + " points; need at least 4");
    switch (method) {
        case MeshMethod::ConvexHull: return detail::convex_hull(pts);
        case MeshMethod::Alpha:
            if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
            return detail::alpha_complex_surface(pts, alpha);
    }
    throw std::invalid_argument("unknown mesh method");
}

}  // namespace artikit
