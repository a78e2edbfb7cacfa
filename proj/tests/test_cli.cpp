#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

#include "artikit/pointcloud.hpp"
#include "helpers.hpp"

namespace {

struct CliResult {
    int exit_code;
    std::string stdout_text;
    std::string stderr_text;
};

CliResult run_cli(const std::string& args, const std::filesystem::path& scratch) {
    const auto out_path = scratch / "stdout.txt";
    const auto err_path = scratch / "stderr.txt";
    const std::string command = std::string(ARTIKIT_CLI_PATH) + " " + args + " > " +
                                out_path.string() + " 2> " + err_path.string();
    const int status = std::system(command.c_str());
    return {WEXITSTATUS(status), testutil::read_file(out_path), testutil::read_file(err_path)};
}

}  // namespace

TEST_CASE("convert: faucet json + meshes produces an executable urdf", "[cli]") {
    testutil::TempDir dir("cli-convert");
    std::filesystem::create_directories(dir / "meshes");
    for (const char* name : {"base", "link_0", "link_1", "link_2", "link_3"})
        artikit::save_obj(testutil::make_box_mesh({0, 0, 0}, {0.05, 0.05, 0.05}),
                          dir / "meshes" / (std::string(name) + ".obj"));

    const auto pred = testutil::fixture_path("faucet.json");
    const auto result = run_cli("convert --pred " + pred.string() + " --mesh-dir " +
                                    (dir / "meshes").string() + " --out-urdf " +
                                    (dir / "meshes" / "model.urdf").string() + " --json",
                                dir.path());
    CAPTURE(result.stderr_text);
    REQUIRE(result.exit_code == 0);
    const auto doc = nlohmann::json::parse(result.stdout_text);
    REQUIRE(doc["links"] == 5);
    REQUIRE(doc["joints"] == 4);

    const auto exec = run_cli("execute --urdf " + (dir / "meshes" / "model.urdf").string() + " --json",
                              dir.path());
    REQUIRE(exec.exit_code == 0);
    REQUIRE(nlohmann::json::parse(exec.stdout_text)["passed"] == true);
}

TEST_CASE("convert exit codes: format, consistency, io", "[cli]") {
    testutil::TempDir dir("cli-codes");
    std::filesystem::create_directories(dir / "meshes");

    // malformed JSON -> exit 1, stderr names the problem
    testutil::write_file(dir / "bad.json", "{nope");
    auto result = run_cli("convert --pred " + (dir / "bad.json").string() + " --mesh-dir " +
                              (dir / "meshes").string() + " --out-urdf " + (dir / "o.urdf").string(),
                          dir.path());
    REQUIRE(result.exit_code == 1);
    REQUIRE(nlohmann::json::parse(result.stderr_text)["error"] == "json-syntax");

    // schema violation carries the JSON path
    testutil::write_file(dir / "schema.json", R"({"joints": [{"id": "j"}], "links": {}})");
    result = run_cli("convert --pred " + (dir / "schema.json").string() + " --mesh-dir " +
                         (dir / "meshes").string() + " --out-urdf " + (dir / "o.urdf").string(),
                     dir.path());
    REQUIRE(result.exit_code == 1);
    REQUIRE(nlohmann::json::parse(result.stderr_text)["message"].get<std::string>().find("/joints/0") !=
            std::string::npos);

    // disconnected tree -> exit 2
    testutil::write_file(dir / "tree.json", R"({"joints": [], "links": {"lost": "a[SEG]"}})");
    artikit::save_obj(testutil::make_box_mesh({0, 0, 0}, {0.1, 0.1, 0.1}), dir / "meshes" / "base.obj");
    artikit::save_obj(testutil::make_box_mesh({0, 0, 0}, {0.1, 0.1, 0.1}), dir / "meshes" / "lost.obj");
    result = run_cli("convert --pred " + (dir / "tree.json").string() + " --mesh-dir " +
                         (dir / "meshes").string() + " --out-urdf " + (dir / "o.urdf").string(),
                     dir.path());
    REQUIRE(result.exit_code == 2);

    // missing mesh without --allow-missing-mesh -> exit 3
    const auto pred = testutil::fixture_path("faucet.json");
    result = run_cli("convert --pred " + pred.string() + " --mesh-dir " + (dir / "meshes").string() +
                         " --out-urdf " + (dir / "o.urdf").string(),
                     dir.path());
    REQUIRE(result.exit_code == 3);
    REQUIRE(nlohmann::json::parse(result.stderr_text)["error"] == "missing-mesh");

    // and succeeds with the flag
    result = run_cli("convert --pred " + pred.string() + " --mesh-dir " + (dir / "meshes").string() +
                         " --out-urdf " + (dir / "o.urdf").string() + " --allow-missing-mesh --quiet",
                     dir.path());
    REQUIRE(result.exit_code == 0);
    REQUIRE(result.stdout_text.empty());  // --quiet
}

TEST_CASE("sample-views json output", "[cli]") {
    testutil::TempDir dir("cli-views");
    auto result = run_cli("sample-views --mode equator -n 4 --json", dir.path());
    REQUIRE(result.exit_code == 0);
    auto doc = nlohmann::json::parse(result.stdout_text);
    REQUIRE(doc["views"].size() == 4);

    result = run_cli("sample-views --mode sphere -n 4 --seed 3 --json", dir.path());
    REQUIRE(result.exit_code == 0);
    doc = nlohmann::json::parse(result.stdout_text);
    REQUIRE(doc["energy"].get<double>() == Catch::Approx(3.6742346).margin(1e-4));
    // camera frames look at the origin
    const auto& view = doc["views"][0];
    Eigen::Vector3d position(view["position"][0], view["position"][1], view["position"][2]);
    Eigen::Vector3d forward(view["forward"][0], view["forward"][1], view["forward"][2]);
    REQUIRE((position.normalized() + forward).norm() < 1e-9);

    // a polar viewpoint falls back to the +x up hint
    result = run_cli("sample-views --mode equator -n 1 --elevation 1.5707963267948966 --json",
                     dir.path());
    REQUIRE(result.exit_code == 0);
    doc = nlohmann::json::parse(result.stdout_text);
    Eigen::Vector3d up(doc["views"][0]["up"][0], doc["views"][0]["up"][1], doc["views"][0]["up"][2]);
    REQUIRE(up.norm() == Catch::Approx(1.0).margin(1e-9));

    // --out writes the JSON to a file
    result = run_cli("sample-views --mode equator -n 2 --out " + (dir / "views.json").string() +
                         " --quiet",
                     dir.path());
    REQUIRE(result.exit_code == 0);
    REQUIRE(nlohmann::json::parse(testutil::read_file(dir / "views.json"))["views"].size() == 2);
}

TEST_CASE("eval commands and the full pipeline over a fixture set", "[cli]") {
    testutil::TempDir dir("cli-pipe");
    testutil::write_pipeline_fixture(dir / "in", 3, 42);
    testutil::write_file(dir / "splits.json", R"({"obj_0": "ID", "obj_1": "OOD", "obj_2": "OOD"})");

    auto result = run_cli("pipeline --in " + (dir / "in").string() + " --out " + (dir / "out").string() +
                              " --seed 11 --splits " + (dir / "splits.json").string() + " --json",
                          dir.path());
    CAPTURE(result.stderr_text);
    REQUIRE(result.exit_code == 0);
    const auto report = nlohmann::json::parse(result.stdout_text);
    REQUIRE(report["splits"]["All"]["executability_rate"] == 1.0);
    REQUIRE(report["splits"]["All"]["miou"] == 1.0);
    REQUIRE(report["splits"]["ID"]["objects"] == 1);

    // eval-joints directly against the pipeline artifacts
    const auto gt_urdf = dir / "in" / "obj_0" / "model.urdf";
    const auto pred_json = dir / "out" / "obj_0" / "prediction.json";
    // note: prediction is the image of the REGULARIZED model; obj_0 is flat already
    auto ej = run_cli("eval-joints --pred " + pred_json.string() + " --gt " + gt_urdf.string() +
                          " --policy by-id --json",
                      dir.path());
    REQUIRE(ej.exit_code == 0);
    const auto ej_doc = nlohmann::json::parse(ej.stdout_text);
    REQUIRE(ej_doc["type_error"] == 0.0);
    REQUIRE(ej_doc["axis_error_rad"] == 0.0);

    // success-rate thresholds must be given together
    ej = run_cli("eval-joints --pred " + pred_json.string() + " --gt " + gt_urdf.string() +
                     " --success-axis 0.25 --json",
                 dir.path());
    REQUIRE(ej.exit_code == 1);
    ej = run_cli("eval-joints --pred " + pred_json.string() + " --gt " + gt_urdf.string() +
                     " --success-type 0 --success-axis 0.25 --success-origin 0.1 --json",
                 dir.path());
    REQUIRE(ej.exit_code == 0);
    REQUIRE(nlohmann::json::parse(ej.stdout_text)["success_rate"] == 1.0);

    // eval-seg of the ground-truth masks against themselves
    auto es = run_cli("eval-seg --pred " + (dir / "in" / "obj_0" / "masks.json").string() + " --gt " +
                          (dir / "in" / "obj_0" / "masks.json").string() + " --points " +
                          (dir / "in" / "obj_0" / "cloud.xyzrgb").string() + " --json",
                      dir.path());
    REQUIRE(es.exit_code == 0);
    REQUIRE(nlohmann::json::parse(es.stdout_text)["miou"] == 1.0);

    // report over the pipeline output directory's report.json plus a
    // standalone per-object record
    std::filesystem::create_directories(dir / "results");
    std::filesystem::copy_file(dir / "out" / "report.json", dir / "results" / "batch.json");
    testutil::write_file(dir / "results" / "extra.json",
                         R"({"id": "extra", "executability": {"passed": false,)"
                         R"( "failure_category": "mesh"}, "count_match": false})");
    auto rep = run_cli("report --dir " + (dir / "results").string() + " --json", dir.path());
    REQUIRE(rep.exit_code == 0);
    const auto agg = nlohmann::json::parse(rep.stdout_text);
    REQUIRE(agg["splits"]["All"]["objects"] == 4);
    REQUIRE(agg["splits"]["All"]["executability_rate"] == 0.75);
    REQUIRE(agg["splits"]["All"]["failure_breakdown"]["mesh"] == 0.25);
}

TEST_CASE("regularize command walks a dataset directory", "[cli]") {
    testutil::TempDir dir("cli-reg");
    testutil::write_pipeline_fixture(dir / "in", 2, 8);
    auto result = run_cli("regularize --in " + (dir / "in").string() + " --out " +
                              (dir / "out").string() + " --json",
                          dir.path());
    CAPTURE(result.stderr_text);
    REQUIRE(result.exit_code == 0);
    const auto doc = nlohmann::json::parse(result.stdout_text);
    REQUIRE(doc["kept"] == 2);
    REQUIRE(std::filesystem::exists(dir / "out" / "obj_0" / "model.urdf"));
    REQUIRE(std::filesystem::exists(dir / "out" / "obj_1" / "regularization.json"));
    // obj_1 has a nested chain, so exactly one joint was re-parented
    const auto rep = nlohmann::json::parse(testutil::read_file(dir / "out" / "obj_1" / "regularization.json"));
    REQUIRE(rep["reparented_joints"].size() == 1);
}

TEST_CASE("mesh command writes per-part objs", "[cli]") {
    testutil::TempDir dir("cli-mesh");
    testutil::write_pipeline_fixture(dir / "in", 1, 31);
    auto result = run_cli("mesh --cloud " + (dir / "in" / "obj_0" / "cloud.xyzrgb").string() +
                              " --masks " + (dir / "in" / "obj_0" / "masks.json").string() + " --out " +
                              (dir / "out").string() + " --json",
                          dir.path());
    CAPTURE(result.stderr_text);
    REQUIRE(result.exit_code == 0);
    REQUIRE(std::filesystem::exists(dir / "out" / "link_0.obj"));
    REQUIRE(std::filesystem::exists(dir / "out" / "base.obj"));
}
