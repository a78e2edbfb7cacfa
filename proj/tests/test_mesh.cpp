#include <catch2/catch_amalgamated.hpp>

#include "artikit/mesh.hpp"
#include "helpers.hpp"

using namespace artikit;

TEST_CASE("single triangle writes 3 v lines and 1 f line", "[mesh]") {
    TriMesh tri;
    tri.vertices = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}};
    tri.faces = {{0, 1, 2}};
    testutil::TempDir dir("obj-tri");
    save_obj(tri, dir / "t.obj");
    const std::string text = testutil::read_file(dir / "t.obj");
    REQUIRE(std::count(text.begin(), text.end(), '\n') == 4);
    REQUIRE(text.find("v 0 0 0") != std::string::npos);
    REQUIRE(text.find("f 1 2 3") != std::string::npos);
}

TEST_CASE("obj round-trips cube hull exactly", "[mesh]") {
    const TriMesh box = testutil::make_box_mesh({0.5, -1, 2}, {0.25, 0.5, 0.125});
    testutil::TempDir dir("obj-rt");
    save_obj(box, dir / "box.obj");
    const TriMesh back = load_obj(dir / "box.obj");
    REQUIRE(back == box);
}

TEST_CASE("face index 0 is a ParseError", "[mesh]") {
    testutil::TempDir dir("obj-bad");
    testutil::write_file(dir / "bad.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 0 1 2\n");
    REQUIRE_THROWS_AS(load_obj(dir / "bad.obj"), ParseError);
    testutil::write_file(dir / "oor.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 9\n");
    REQUIRE_THROWS_AS(load_obj(dir / "oor.obj"), DegenerateGeometryError);
    testutil::write_file(dir / "quad.obj", "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n");
    REQUIRE_THROWS_AS(load_obj(dir / "quad.obj"), ParseError);
    testutil::write_file(dir / "degen.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 1 2\n");
    REQUIRE_THROWS_AS(load_obj(dir / "degen.obj"), DegenerateGeometryError);
}

TEST_CASE("comments, slashes and annotations are tolerated", "[mesh]") {
    testutil::TempDir dir("obj-slash");
    testutil::write_file(dir / "s.obj",
                         "# a comment\no thing\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf 1/1 2/2 3/3\n");
    const TriMesh mesh = load_obj(dir / "s.obj");
    REQUIRE(mesh.vertex_count() == 3);
    REQUIRE(mesh.face_count() == 1);
}

TEST_CASE("box measures", "[mesh]") {
    const TriMesh box = testutil::make_box_mesh({0, 0, 0}, {0.5, 1.0, 2.0});
    REQUIRE(mesh_volume(box) == Catch::Approx(1.0 * 2.0 * 4.0));
    REQUIRE(mesh_surface_area(box) == Catch::Approx(2 * (1 * 2 + 1 * 4 + 2 * 4)));
    const Aabb box_aabb = mesh_aabb(box);
    REQUIRE(box_aabb.lower == Eigen::Vector3d(-0.5, -1, -2));
    REQUIRE(box_aabb.upper == Eigen::Vector3d(0.5, 1, 2));
}

TEST_CASE("surface sampling is area-weighted and on the surface", "[mesh]") {
    const TriMesh box = testutil::make_box_mesh({0, 0, 0}, {1, 1, 1});
    const PointCloud cloud = sample_mesh_surface(box, 4000, 9);
    REQUIRE(cloud.size() == 4000);
    int on_boundary = 0;
    for (int i = 0; i < cloud.size(); ++i) {
        const Eigen::Vector3d p = cloud.position(i);
        REQUIRE(p.cwiseAbs().maxCoeff() <= 1.0 + 1e-12);
        if (std::fabs(p.cwiseAbs().maxCoeff() - 1.0) < 1e-9) ++on_boundary;
    }
    REQUIRE(on_boundary == cloud.size());
    // deterministic for a fixed seed
    REQUIRE(sample_mesh_surface(box, 16, 9).points == sample_mesh_surface(box, 16, 9).points);
    REQUIRE(sample_mesh_surface(box, 16, 9).points != sample_mesh_surface(box, 16, 10).points);
}
