#include <catch2/catch_amalgamated.hpp>
#include <random>
#include <set>

#include "artikit/meshing.hpp"
#include "artikit/rng.hpp"

using namespace artikit;

namespace {

PointCloud cloud_from(const std::vector<Eigen::Vector3d>& pts) {
    PointCloud cloud;
    cloud.points.resize(static_cast<Eigen::Index>(pts.size()), 6);
    for (std::size_t i = 0; i < pts.size(); ++i)
        cloud.points.row(static_cast<Eigen::Index>(i)) << pts[i].x(), pts[i].y(), pts[i].z(), 0, 0, 0;
    return cloud;
}

PartMask full_mask(const PointCloud& cloud) {
    std::vector<int> idx(static_cast<std::size_t>(cloud.size()));
    for (int i = 0; i < cloud.size(); ++i) idx[static_cast<std::size_t>(i)] = i;
    return make_mask("part", std::move(idx));
}

int edge_count(const TriMesh& mesh) {
    std::set<std::pair<int, int>> edges;
    for (const auto& f : mesh.faces)
        for (int k = 0; k < 3; ++k) {
            int a = f[static_cast<std::size_t>(k)], b = f[static_cast<std::size_t>((k + 1) % 3)];
            if (a > b) std::swap(a, b);
            edges.insert({a, b});
        }
    return static_cast<int>(edges.size());
}

std::map<std::pair<int, int>, int> edge_uses(const TriMesh& mesh) {
    std::map<std::pair<int, int>, int> uses;
    for (const auto& f : mesh.faces)
        for (int k = 0; k < 3; ++k) {
            int a = f[static_cast<std::size_t>(k)], b = f[static_cast<std::size_t>((k + 1) % 3)];
            if (a > b) std::swap(a, b);
            uses[{a, b}]++;
        }
    return uses;
}

// edge-manifold closed surface: every edge shared by exactly two faces
bool is_watertight(const TriMesh& mesh) {
    for (const auto& [edge, count] : edge_uses(mesh)) {
        (void)edge;
        if (count != 2) return false;
    }
    return !mesh.faces.empty();
}

// closed in the weaker union-boundary sense: tetra unions may pinch at an
// edge, so counts of 4 are legal, odd counts are not
bool is_closed_union_boundary(const TriMesh& mesh) {
    for (const auto& [edge, count] : edge_uses(mesh)) {
        (void)edge;
        if (count % 2 != 0) return false;
    }
    return !mesh.faces.empty();
}

}  // namespace

TEST_CASE("cube corners hull has 8 vertices and 12 triangles", "[meshing]") {
    std::vector<Eigen::Vector3d> corners;
    for (int i = 0; i < 8; ++i)
        corners.emplace_back(i & 1 ? 1 : -1, i & 2 ? 1 : -1, i & 4 ? 1 : -1);
    const PointCloud cloud = cloud_from(corners);
    const TriMesh hull = points_to_mesh(cloud, full_mask(cloud), MeshMethod::ConvexHull);
    REQUIRE(hull.vertex_count() == 8);
    REQUIRE(hull.face_count() == 12);
    REQUIRE(hull.vertex_count() - edge_count(hull) + hull.face_count() == 2);  // Euler
    REQUIRE(mesh_volume(hull) == Catch::Approx(8.0));
}

TEST_CASE("degenerate selections are rejected", "[meshing]") {
    const PointCloud three = cloud_from({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}});
    REQUIRE_THROWS_AS(points_to_mesh(three, full_mask(three), MeshMethod::ConvexHull),
                      DegenerateGeometryError);
    const PointCloud coplanar = cloud_from({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.5, 0.5, 0}});
    REQUIRE_THROWS_AS(points_to_mesh(coplanar, full_mask(coplanar), MeshMethod::ConvexHull),
                      DegenerateGeometryError);
    const PointCloud collinear = cloud_from({{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {3, 0, 0}});
    REQUIRE_THROWS_AS(points_to_mesh(collinear, full_mask(collinear), MeshMethod::ConvexHull),
                      DegenerateGeometryError);
}

TEST_CASE("sphere hull volume approaches the ball volume", "[meshing]") {
    Rng rng(60);
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < 100; ++i) pts.push_back(rng.unit_vector());
    const PointCloud cloud = cloud_from(pts);
    const TriMesh hull = points_to_mesh(cloud, full_mask(cloud), MeshMethod::ConvexHull);
    const double ball = 4.0 / 3.0 * M_PI;
    const double volume = mesh_volume(hull);
    REQUIRE(volume <= ball);
    REQUIRE(volume >= 0.9 * ball);
}

TEST_CASE("hull contains every masked point", "[meshing]") {
    std::mt19937 gen(99);
    std::uniform_real_distribution<double> coord(-1, 1);
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<Eigen::Vector3d> pts;
        const int n = 20 + trial * 15;
        for (int i = 0; i < n; ++i) pts.emplace_back(coord(gen), coord(gen), coord(gen));
        const PointCloud cloud = cloud_from(pts);
        const TriMesh hull = points_to_mesh(cloud, full_mask(cloud), MeshMethod::ConvexHull);
        REQUIRE(detail::hull_max_signed_distance(hull, pts) <= 1e-9);
        REQUIRE(hull.vertex_count() - edge_count(hull) + hull.face_count() == 2);
        REQUIRE(is_watertight(hull));
        REQUIRE(mesh_volume(hull) > 0.0);
    }
}

TEST_CASE("alpha surfaces are closed and bounded by the hull", "[meshing]") {
    std::mt19937 gen(661);
    std::uniform_real_distribution<double> coord(-1, 1);
    for (int trial = 0; trial < 6; ++trial) {
        std::vector<Eigen::Vector3d> pts;
        for (int i = 0; i < 60; ++i) pts.emplace_back(coord(gen), coord(gen), coord(gen));
        const PointCloud cloud = cloud_from(pts);
        const TriMesh hull = points_to_mesh(cloud, full_mask(cloud), MeshMethod::ConvexHull);
        for (double alpha : {0.6, 1.0, 5.0}) {
            TriMesh surface;
            try {
                surface = points_to_mesh(cloud, full_mask(cloud), MeshMethod::Alpha, alpha);
            } catch (const DegenerateGeometryError&) {
                continue;  // alpha too small for this instance
            }
            REQUIRE(is_watertight(surface));
            const double volume = mesh_volume(surface);
            REQUIRE(volume > 0.0);
            REQUIRE(volume <= mesh_volume(hull) + 1e-9);
        }
    }
}

TEST_CASE("alpha complex collapses to the hull for huge alpha", "[meshing]") {
    std::mt19937 gen(7);
    std::uniform_real_distribution<double> coord(-1, 1);
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < 40; ++i) pts.emplace_back(coord(gen), coord(gen), coord(gen));
    const PointCloud cloud = cloud_from(pts);
    const TriMesh alpha_mesh = points_to_mesh(cloud, full_mask(cloud), MeshMethod::Alpha, 1000.0);
    const TriMesh hull = points_to_mesh(cloud, full_mask(cloud), MeshMethod::ConvexHull);
    REQUIRE(mesh_volume(alpha_mesh) == Catch::Approx(mesh_volume(hull)).margin(1e-9));
}

TEST_CASE("small alpha keeps a dumbbell's waist concave", "[meshing]") {
    // two separated blobs joined by the mask: with a small alpha the surface
    // volume is near two blobs, far below the single convex hull
    std::mt19937 gen(13);
    std::uniform_real_distribution<double> coord(-0.5, 0.5);
    std::vector<Eigen::Vector3d> pts;
    for (int i = 0; i < 120; ++i) {
        Eigen::Vector3d p{coord(gen), coord(gen), coord(gen)};
        p.x() += (i % 2 == 0) ? -2.0 : 2.0;
        pts.push_back(p);
    }
    const PointCloud cloud = cloud_from(pts);
    const TriMesh alpha_mesh = points_to_mesh(cloud, full_mask(cloud), MeshMethod::Alpha, 0.8);
    const TriMesh hull = points_to_mesh(cloud, full_mask(cloud), MeshMethod::ConvexHull);
    REQUIRE(mesh_volume(alpha_mesh) < 0.5 * mesh_volume(hull));
    REQUIRE_THROWS_AS(points_to_mesh(cloud, full_mask(cloud), MeshMethod::Alpha, 1e-6),
                      DegenerateGeometryError);
    REQUIRE_THROWS_AS(points_to_mesh(cloud, full_mask(cloud), MeshMethod::Alpha, 0.0),
                      std::invalid_argument);
}
