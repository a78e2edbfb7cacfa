// artikit command-line toolkit: dataset regularization, prediction
// conversion, part meshing, viewpoint sampling, evaluation and the batch
// pipeline. Every subcommand supports --json (machine output on stdout) and
// --quiet; structured errors go to stderr as JSON.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "artikit/articulation.hpp"
#include "artikit/chamfer.hpp"
#include "artikit/executability.hpp"
#include "artikit/meshing.hpp"
#include "artikit/metrics.hpp"
#include "artikit/mock_predictor.hpp"
#include "artikit/pipeline.hpp"
#include "artikit/pointcloud.hpp"
#include "artikit/regularize.hpp"
#include "artikit/report.hpp"
#include "artikit/urdf.hpp"
#include "artikit/viewsampler.hpp"

namespace {

using json = nlohmann::ordered_json;

struct CommonFlags {
    bool json_output = false;
    bool quiet = false;
    std::string out_path;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
    cmd->add_flag("--json", flags.json_output, "Emit machine-readable JSON on stdout");
    cmd->add_flag("--quiet", flags.quiet, "Suppress human-readable output");
    cmd->add_option("--out", flags.out_path, "Write JSON output to this file instead of stdout");
}

// stdout/file emission honoring --json/--quiet/--out
void deliver(const CommonFlags& flags, const json& machine, const std::string& human) {
    if (!flags.out_path.empty()) {
        std::ofstream file(flags.out_path);
        if (!file) throw artikit::IoError("cannot write " + flags.out_path);
        file << machine.dump(2) << '\n';
    }
    if (flags.json_output && flags.out_path.empty()) {
        std::cout << machine.dump(2) << '\n';
    } else if (!flags.quiet && !flags.json_output && !human.empty()) {
        std::cout << human;
    }
}

int exit_code_for(const artikit::Error& e) {
    const std::string& code = e.code();
    if (code == "xml-syntax" || code == "json-syntax" || code == "schema-violation" ||
        code == "parse-error")
        return 1;
    if (code == "tree-violation" || code == "consistency-violation" || code == "invariant-violation" ||
        code == "key-mismatch")
        return 2;
    if (code == "io-error" || code == "missing-mesh" || code == "empty-cloud") return 3;
    return 1;
}

void print_error(const std::string& code, const std::string& message) {
    json err;
    err["error"] = code;
    err["message"] = message;
    std::cerr << err.dump() << '\n';
}

std::string read_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw artikit::IoError("cannot open " + path);
    std::stringstream buffer;
    buffer << file.rdbuf();
    return buffer.str();
}

int default_parallelism() {
    if (const char* env = std::getenv("ARTIKIT_JOBS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

json warnings_json(const std::vector<std::string>& warnings) {
    json arr = json::array();
    for (const auto& w : warnings) arr.push_back(w);
    return arr;
}

// ---------------------------------------------------------------------------
// regularize
// ---------------------------------------------------------------------------

struct RegularizeArgs {
    std::string in_dir, out_dir;
    int max_parts = 8;
    CommonFlags common;
};

// one URDF per object directory; PartNet-Mobility ships mobility.urdf,
// our pipeline layout uses model.urdf, anything else counts when unique
std::optional<std::filesystem::path> find_object_urdf(const std::filesystem::path& dir) {
    namespace fs = std::filesystem;
    for (const char* name : {"model.urdf", "mobility.urdf"})
        if (fs::exists(dir / name)) return dir / name;
    std::optional<fs::path> unique;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".urdf") continue;
        if (unique) return std::nullopt;  // ambiguous
        unique = entry.path();
    }
    return unique;
}

int cmd_regularize(const RegularizeArgs& args) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(args.in_dir)) throw artikit::IoError("input directory not found: " + args.in_dir);
    fs::create_directories(args.out_dir);

    std::vector<std::string> ids;
    for (const auto& entry : fs::directory_iterator(args.in_dir))
        if (entry.is_directory() && find_object_urdf(entry.path()))
            ids.push_back(entry.path().filename().string());
    std::sort(ids.begin(), ids.end());

    json summary;
    summary["objects"] = json::array();
    int kept = 0, dropped = 0, failed = 0;
    for (const auto& id : ids) {
        json record;
        record["id"] = id;
        try {
            const artikit::UrdfModel model =
                artikit::parse_urdf(read_file(find_object_urdf(fs::path(args.in_dir) / id)->string()));
            const int parts = artikit::articulated_part_count(model);
            record["articulated_parts"] = parts;
            if (parts >= args.max_parts) {
                record["kept"] = false;
                ++dropped;
                summary["objects"].push_back(std::move(record));
                continue;
            }
            auto [regular, rep] = artikit::regularize(model);
            const fs::path obj_out = fs::path(args.out_dir) / id;
            fs::create_directories(obj_out);
            {
                std::ofstream urdf_file(obj_out / "model.urdf");
                urdf_file << artikit::emit_urdf(regular);
            }
            json rep_json;
            rep_json["base_link"] = rep.base_link;
            rep_json["reparented_joints"] = rep.reparented_joints;
            rep_json["consolidated_links"] = json::array();
            for (const auto& [link, count] : rep.consolidated_links)
                rep_json["consolidated_links"].push_back({{"link", link}, {"original_mesh_count", count}});
            {
                std::ofstream rep_file(obj_out / "regularization.json");
                rep_file << rep_json.dump(2) << '\n';
            }
            record["kept"] = true;
            record["reparented"] = rep.reparented_joints.size();
            ++kept;
        } catch (const artikit::Error& e) {
            record["error"] = e.what();
            ++failed;
        }
        summary["objects"].push_back(std::move(record));
    }
    summary["kept"] = kept;
    summary["dropped"] = dropped;
    summary["failed"] = failed;

    std::ostringstream human;
    human << "regularized " << kept << " object(s), dropped " << dropped << " (>= " << args.max_parts
          << " articulated parts), " << failed << " failed\n";
    deliver(args.common, summary, human.str());
    return failed == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// convert
// ---------------------------------------------------------------------------

struct ConvertArgs {
    std::string pred_path, mesh_dir, out_urdf;
    bool allow_missing_mesh = false;
    bool repair = false;
    CommonFlags common;
};

int cmd_convert(const ConvertArgs& args) {
    std::vector<std::string> warnings;
    artikit::PredictionParseOptions parse_options;
    parse_options.repair = args.repair;
    const artikit::ArticulationPrediction prediction =
        artikit::parse_prediction(read_file(args.pred_path), parse_options, &warnings);
    artikit::AssembleOptions assemble_options;
    assemble_options.allow_missing_mesh = args.allow_missing_mesh;
    const artikit::UrdfModel model =
        artikit::assemble_urdf(prediction, args.mesh_dir, assemble_options, &warnings);
    const std::string xml = artikit::emit_urdf(model);
    {
        std::ofstream file(args.out_urdf);
        if (!file) throw artikit::IoError("cannot write " + args.out_urdf);
        file << xml;
    }
    json machine;
    machine["urdf"] = args.out_urdf;
    machine["links"] = model.links.size();
    machine["joints"] = model.joints.size();
    machine["warnings"] = warnings_json(warnings);
    std::ostringstream human;
    human << "wrote " << args.out_urdf << " (" << model.links.size() << " links, " << model.joints.size()
          << " joints)\n";
    for (const auto& w : warnings) human << "warning: " << w << '\n';
    deliver(args.common, machine, human.str());
    return 0;
}

// ---------------------------------------------------------------------------
// mesh
// ---------------------------------------------------------------------------

struct MeshArgs {
    std::string cloud_path, masks_path, out_dir;
    std::string method = "convex-hull";
    double alpha = 0.2;
    CommonFlags common;
};

int cmd_mesh(const MeshArgs& args) {
    const artikit::PointCloud cloud =
        artikit::load_cloud(args.cloud_path, artikit::CloudFormat::XyzRgbText);
    const std::vector<artikit::PartMask> masks = artikit::load_masks(args.masks_path);
    const artikit::MeshMethod method = artikit::detail::mesh_method_from_string(args.method);
    std::filesystem::create_directories(args.out_dir);

    json machine;
    machine["parts"] = json::array();
    std::ostringstream human;
    int failures = 0;
    for (const auto& mask : masks) {
        json record;
        record["part"] = mask.part_name;
        try {
            artikit::validate_part_filename(mask.part_name);
            const artikit::TriMesh mesh = artikit::points_to_mesh(cloud, mask, method, args.alpha);
            const std::filesystem::path path =
                std::filesystem::path(args.out_dir) / (mask.part_name + ".obj");
            artikit::save_obj(mesh, path);
            record["obj"] = path.string();
            record["vertices"] = mesh.vertex_count();
            record["faces"] = mesh.face_count();
            human << mask.part_name << ": " << mesh.vertex_count() << " vertices, "
                  << mesh.face_count() << " faces\n";
        } catch (const artikit::Error& e) {
            record["error"] = e.what();
            human << mask.part_name << ": " << e.what() << '\n';
            ++failures;
        }
        machine["parts"].push_back(std::move(record));
    }
    deliver(args.common, machine, human.str());
    return failures == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------
// sample-views
// ---------------------------------------------------------------------------

struct SampleViewsArgs {
    std::string mode = "sphere";
    int n = 8;
    double elevation = 0.0;
    double radius = 1.0;
    std::uint64_t seed = 0;
    CommonFlags common;
};

int cmd_sample_views(const SampleViewsArgs& args) {
    artikit::ViewpointSet set;
    if (args.mode == "sphere") {
        artikit::MinEnergyOptions options;
        options.radius = args.radius;
        set = artikit::sample_min_energy(args.n, args.seed, options);
    } else if (args.mode == "equator") {
        set = artikit::sample_equatorial(args.n, args.elevation, args.radius);
    } else {
        throw artikit::SchemaViolationError("unknown mode \"" + args.mode + "\" (sphere|equator)");
    }

    json machine;
    machine["mode"] = args.mode;
    machine["n"] = args.n;
    machine["radius"] = args.radius;
    if (set.energy) machine["energy"] = *set.energy;
    machine["views"] = json::array();
    for (const auto& direction : set.directions) {
        const Eigen::Vector3d position = args.radius * direction;
        const Eigen::Vector3d forward = -direction;  // look at the origin
        Eigen::Vector3d up_hint = Eigen::Vector3d::UnitZ();
        if (forward.cross(up_hint).norm() < 1e-9) up_hint = Eigen::Vector3d::UnitX();
        const Eigen::Vector3d right = forward.cross(up_hint).normalized();
        const Eigen::Vector3d up = right.cross(forward);
        json view;
        view["position"] = {position.x(), position.y(), position.z()};
        view["forward"] = {forward.x(), forward.y(), forward.z()};
        view["up"] = {up.x(), up.y(), up.z()};
        view["right"] = {right.x(), right.y(), right.z()};
        machine["views"].push_back(std::move(view));
    }
    std::ostringstream human;
    human << args.mode << " viewpoints: " << set.directions.size();
    if (set.energy) human << ", energy " << artikit::format_double(*set.energy);
    human << '\n';
    deliver(args.common, machine, human.str());
    return 0;
}

// ---------------------------------------------------------------------------
// eval-joints
// ---------------------------------------------------------------------------

struct EvalJointsArgs {
    std::string pred_path, gt_path;
    std::string policy = "hungarian-origin";
    bool axis_line = false;
    bool sign_invariant = false;
    bool repair = false;
    double success_type = -1.0, success_axis = -1.0, success_origin = -1.0;
    CommonFlags common;
};

json joint_errors_to_json(const artikit::JointErrorAggregate& agg) {
    json j;
    if (agg.type_error) j["type_error"] = *agg.type_error;
    if (agg.axis_error_rad) j["axis_error_rad"] = *agg.axis_error_rad;
    if (agg.origin_error_m) j["origin_error_m"] = *agg.origin_error_m;
    j["matched"] = agg.matched;
    j["unmatched_pred"] = agg.unmatched_pred;
    j["unmatched_gt"] = agg.unmatched_gt;
    j["pairs"] = json::array();
    for (const auto& p : agg.pairs) {
        json pair;
        pair["pred"] = p.pred_id;
        pair["gt"] = p.gt_id;
        pair["type_mismatch"] = p.type_mismatch;
        pair["axis_error_rad"] = p.axis_error_rad;
        pair["origin_error_m"] = p.origin_error_m;
        j["pairs"].push_back(std::move(pair));
    }
    return j;
}

int cmd_eval_joints(const EvalJointsArgs& args) {
    artikit::PredictionParseOptions parse_options;
    parse_options.repair = args.repair;
    const artikit::ArticulationPrediction prediction =
        artikit::parse_prediction(read_file(args.pred_path), parse_options);
    const artikit::UrdfModel gt = artikit::parse_urdf(read_file(args.gt_path));
    artikit::JointEvalOptions options;
    options.policy = artikit::detail::policy_from_string(args.policy);
    options.axis_line = args.axis_line;
    options.sign_invariant = args.sign_invariant;
    const artikit::JointErrorAggregate agg = artikit::eval_joints(prediction, gt, options);

    json machine = joint_errors_to_json(agg);
    // joint-success rate needs all three thresholds; they are deliberately
    // argument-only (no published defaults to assert)
    const bool any_threshold = args.success_type >= 0 || args.success_axis >= 0 || args.success_origin >= 0;
    if (any_threshold) {
        if (args.success_type < 0 || args.success_axis < 0 || args.success_origin < 0)
            throw artikit::SchemaViolationError(
                "success rate needs all of --success-type, --success-axis, --success-origin");
        int successes = 0;
        for (const auto& p : agg.pairs) {
            const bool ok = (p.type_mismatch ? 1.0 : 0.0) <= args.success_type &&
                            p.axis_error_rad <= args.success_axis &&
                            p.origin_error_m <= args.success_origin;
            if (ok) ++successes;
        }
        const int total = agg.matched + agg.unmatched_pred + agg.unmatched_gt;
        machine["success_rate"] = total == 0 ? 0.0 : static_cast<double>(successes) / total;
    }

    std::ostringstream human;
    human << "matched " << agg.matched << " pair(s), unmatched pred " << agg.unmatched_pred
          << ", unmatched gt " << agg.unmatched_gt << '\n';
    if (agg.type_error) human << "type error:   " << artikit::format_double(*agg.type_error) << '\n';
    if (agg.axis_error_rad)
        human << "axis error:   " << artikit::format_double(*agg.axis_error_rad) << " rad\n";
    if (agg.origin_error_m)
        human << "origin error: " << artikit::format_double(*agg.origin_error_m) << " m\n";
    deliver(args.common, machine, human.str());
    return 0;
}

// ---------------------------------------------------------------------------
// eval-seg
// ---------------------------------------------------------------------------

struct EvalSegArgs {
    std::string pred_path, gt_path, points_path;
    CommonFlags common;
};

int cmd_eval_seg(const EvalSegArgs& args) {
    const artikit::PointCloud cloud =
        artikit::load_cloud(args.points_path, artikit::CloudFormat::XyzRgbText);
    const std::vector<artikit::PartMask> pred = artikit::load_masks(args.pred_path);
    const std::vector<artikit::PartMask> gt = artikit::load_masks(args.gt_path);
    const artikit::SegEvalResult result = artikit::eval_segmentation(pred, gt, cloud.size());
    json machine;
    machine["miou"] = result.miou;
    machine["count_match"] = result.count_match;
    machine["pred_masks"] = pred.size();
    machine["gt_masks"] = gt.size();
    std::ostringstream human;
    human << "mIoU " << artikit::format_double(result.miou) << ", count "
          << (result.count_match ? "match" : "mismatch") << '\n';
    deliver(args.common, machine, human.str());
    return 0;
}

// ---------------------------------------------------------------------------
// execute
// ---------------------------------------------------------------------------

struct ExecuteArgs {
    std::string urdf_path;
    int samples = 11;
    double bound = 10.0;
    CommonFlags common;
};

json verdict_to_json(const artikit::ExecutabilityVerdict& verdict) {
    json machine;
    machine["passed"] = verdict.passed;
    machine["failure_category"] = artikit::to_string(verdict.failure_category);
    machine["checks"] = json::array();
    for (const auto& record : verdict.details) {
        json c;
        c["check"] = record.check;
        c["passed"] = record.passed;
        if (!record.detail.empty()) c["detail"] = record.detail;
        machine["checks"].push_back(std::move(c));
    }
    return machine;
}

int cmd_execute(const ExecuteArgs& args) {
    artikit::SweepConfig config;
    config.samples_per_joint = args.samples;
    config.bound_factor = args.bound;
    const artikit::ExecutabilityVerdict verdict = artikit::check_executability(args.urdf_path, config);
    std::ostringstream human;
    human << (verdict.passed ? "PASS" : std::string("FAIL (") +
                                            artikit::to_string(verdict.failure_category) + ")")
          << '\n';
    for (const auto& record : verdict.details)
        if (!record.passed) human << "  " << record.check << ": " << record.detail << '\n';
    deliver(args.common, verdict_to_json(verdict), human.str());
    return verdict.passed ? 0 : 1;
}

// ---------------------------------------------------------------------------
// pipeline
// ---------------------------------------------------------------------------

struct PipelineArgs {
    std::string config_path;
    std::string in_dir, out_dir;
    std::string policy;
    std::string splits_path;
    bool axis_line = false;
    bool sign_invariant = false;
    double axis_tilt = -1.0, origin_sigma = -1.0, type_flip = -1.0, drop_part = -1.0;
    std::int64_t seed = -1;
    int parallelism = 0;
    CommonFlags common;
};

int cmd_pipeline(const PipelineArgs& args) {
    artikit::PipelineConfig config;
    if (!args.config_path.empty()) config = artikit::load_pipeline_config(args.config_path);
    if (config.parallelism <= 0) config.parallelism = default_parallelism();
    // CLI > file > defaults
    if (!args.in_dir.empty()) config.input_dir = args.in_dir;
    if (!args.out_dir.empty()) config.output_dir = args.out_dir;
    if (!args.policy.empty()) config.eval.policy = artikit::detail::policy_from_string(args.policy);
    if (args.axis_line) config.eval.axis_line = true;
    if (args.sign_invariant) config.eval.sign_invariant = true;
    if (args.axis_tilt >= 0) config.noise.axis_tilt_rad = args.axis_tilt;
    if (args.origin_sigma >= 0) config.noise.origin_sigma_m = args.origin_sigma;
    if (args.type_flip >= 0) config.noise.type_flip_prob = args.type_flip;
    if (args.drop_part >= 0) config.noise.drop_part_prob = args.drop_part;
    if (args.seed >= 0) config.seed = static_cast<std::uint64_t>(args.seed);
    if (args.parallelism > 0) config.parallelism = args.parallelism;
    if (!args.splits_path.empty()) {
        nlohmann::json doc = nlohmann::json::parse(read_file(args.splits_path));
        config.splits.clear();
        for (const auto& [id, label] : doc.items()) config.splits[id] = label.get<std::string>();
    }
    if (config.input_dir.empty() || config.output_dir.empty())
        throw artikit::SchemaViolationError("pipeline needs --in and --out (or a config file)");
    if (!config.noise.is_zero() && args.seed < 0 && args.config_path.empty())
        throw artikit::SchemaViolationError("--seed is required when noise is enabled");

    const artikit::EvalReport report = artikit::run_pipeline(config);
    deliver(args.common, artikit::report_to_json(report), artikit::report_to_table(report));
    return 0;
}

// ---------------------------------------------------------------------------
// report
// ---------------------------------------------------------------------------

struct ReportArgs {
    std::string dir;
    std::string splits_path;
    CommonFlags common;
};

artikit::ObjectResult object_result_from_json(const nlohmann::json& o, const std::string& fallback_id) {
    artikit::ObjectResult r;
    r.object_id = o.contains("id") ? o["id"].get<std::string>() : fallback_id;
    if (o.contains("error")) r.error = o["error"].get<std::string>();
    if (o.contains("executability")) {
        artikit::ExecutabilityVerdict v;
        v.passed = o["executability"]["passed"].get<bool>();
        const std::string category = o["executability"]["failure_category"].get<std::string>();
        v.failure_category = artikit::FailureCategory::None;
        for (auto c : {artikit::FailureCategory::JsonFormat, artikit::FailureCategory::TreeStructure,
                       artikit::FailureCategory::Parameter, artikit::FailureCategory::Mesh,
                       artikit::FailureCategory::Motion})
            if (category == artikit::to_string(c)) v.failure_category = c;
        r.verdict = v;
    }
    if (o.contains("joints")) {
        artikit::JointErrorAggregate agg;
        const auto& j = o["joints"];
        if (j.contains("type_error")) agg.type_error = j["type_error"].get<double>();
        if (j.contains("axis_error_rad")) agg.axis_error_rad = j["axis_error_rad"].get<double>();
        if (j.contains("origin_error_m")) agg.origin_error_m = j["origin_error_m"].get<double>();
        if (j.contains("matched")) agg.matched = j["matched"].get<int>();
        if (j.contains("unmatched_pred")) agg.unmatched_pred = j["unmatched_pred"].get<int>();
        if (j.contains("unmatched_gt")) agg.unmatched_gt = j["unmatched_gt"].get<int>();
        r.joint_errors = agg;
    }
    if (o.contains("segmentation")) {
        artikit::SegEvalResult seg;
        seg.miou = o["segmentation"]["miou"].get<double>();
        if (o["segmentation"].contains("mask_count_match"))
            seg.count_match = o["segmentation"]["mask_count_match"].get<bool>();
        r.seg = seg;
    }
    if (o.contains("count_match")) r.count_acc = o["count_match"].get<bool>();
    return r;
}

int cmd_report(const ReportArgs& args) {
    namespace fs = std::filesystem;
    if (!fs::is_directory(args.dir)) throw artikit::IoError("results directory not found: " + args.dir);
    std::vector<std::string> files;
    for (const auto& entry : fs::directory_iterator(args.dir))
        if (entry.is_regular_file() && entry.path().extension() == ".json")
            files.push_back(entry.path().string());
    std::sort(files.begin(), files.end());

    std::vector<artikit::ObjectResult> results;
    for (const auto& file : files) {
        nlohmann::json doc = nlohmann::json::parse(read_file(file));
        const std::string stem = fs::path(file).stem().string();
        if (doc.contains("objects")) {  // a full pipeline report
            for (const auto& o : doc["objects"]) results.push_back(object_result_from_json(o, stem));
        } else {
            results.push_back(object_result_from_json(doc, stem));
        }
    }

    std::map<std::string, std::string> splits;
    if (!args.splits_path.empty()) {
        nlohmann::json doc = nlohmann::json::parse(read_file(args.splits_path));
        for (const auto& [id, label] : doc.items()) splits[id] = label.get<std::string>();
    }
    const artikit::EvalReport report = artikit::aggregate_report(std::move(results), splits);
    deliver(args.common, artikit::report_to_json(report), artikit::report_to_table(report));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"articulated-object digital-twin toolkit"};
    app.require_subcommand(1);

    RegularizeArgs regularize_args;
    auto* regularize_cmd = app.add_subcommand("regularize", "Canonicalize a dataset of URDF objects");
    regularize_cmd->add_option("--in", regularize_args.in_dir, "Input dataset directory")->required();
    regularize_cmd->add_option("--out", regularize_args.out_dir, "Output directory")->required();
    regularize_cmd->add_option("--max-parts", regularize_args.max_parts,
                               "Drop objects with this many articulated parts or more");
    regularize_cmd->add_flag("--json", regularize_args.common.json_output,
                             "Emit machine-readable JSON on stdout");
    regularize_cmd->add_flag("--quiet", regularize_args.common.quiet, "Suppress human-readable output");

    ConvertArgs convert_args;
    auto* convert_cmd = app.add_subcommand("convert", "Prediction JSON + meshes -> URDF");
    convert_cmd->add_option("--pred", convert_args.pred_path, "Prediction JSON")->required();
    convert_cmd->add_option("--mesh-dir", convert_args.mesh_dir, "Directory of <link>.obj meshes")->required();
    convert_cmd->add_option("--out-urdf", convert_args.out_urdf, "Output URDF path")->required();
    convert_cmd->add_flag("--allow-missing-mesh", convert_args.allow_missing_mesh,
                          "Reference meshes without checking they exist");
    convert_cmd->add_flag("--repair", convert_args.repair, "Repair missing revolute limits to [0, pi/2]");
    add_common(convert_cmd, convert_args.common);

    MeshArgs mesh_args;
    auto* mesh_cmd = app.add_subcommand("mesh", "Mesh masked point-cloud parts to OBJ files");
    mesh_cmd->add_option("--cloud", mesh_args.cloud_path, "Cloud file (xyzrgb text)")->required();
    mesh_cmd->add_option("--masks", mesh_args.masks_path, "Mask JSON (part -> indices)")->required();
    mesh_cmd->add_option("--out", mesh_args.out_dir, "Output mesh directory")->required();
    mesh_cmd->add_option("--method", mesh_args.method, "convex-hull|alpha");
    mesh_cmd->add_option("--alpha", mesh_args.alpha, "Alpha radius for the alpha method");
    // mesh writes OBJ files; --out is the directory, so no common --out here
    mesh_cmd->add_flag("--json", mesh_args.common.json_output, "Emit machine-readable JSON on stdout");
    mesh_cmd->add_flag("--quiet", mesh_args.common.quiet, "Suppress human-readable output");

    SampleViewsArgs views_args;
    auto* views_cmd = app.add_subcommand("sample-views", "Camera viewpoints on a sphere");
    views_cmd->add_option("--mode", views_args.mode, "sphere|equator");
    views_cmd->add_option("-n,--count", views_args.n, "Number of viewpoints")->required();
    views_cmd->add_option("--elevation", views_args.elevation, "Equator-mode elevation (radians)");
    views_cmd->add_option("--radius", views_args.radius, "Camera distance from the origin");
    views_cmd->add_option("--seed", views_args.seed, "Seed for the spherical optimizer");
    add_common(views_cmd, views_args.common);

    EvalJointsArgs ej_args;
    auto* ej_cmd = app.add_subcommand("eval-joints", "Joint type/axis/origin errors vs ground truth");
    ej_cmd->add_option("--pred", ej_args.pred_path, "Prediction JSON")->required();
    ej_cmd->add_option("--gt", ej_args.gt_path, "Ground-truth URDF")->required();
    ej_cmd->add_option("--policy", ej_args.policy, "hungarian-origin|by-id");
    ej_cmd->add_flag("--axis-line", ej_args.axis_line,
                     "Point-to-axis-line origin error for revolute/continuous joints");
    ej_cmd->add_flag("--sign-invariant", ej_args.sign_invariant, "Fold antipodal axes to zero error");
    ej_cmd->add_flag("--repair", ej_args.repair, "Repair missing revolute limits while parsing");
    ej_cmd->add_option("--success-type", ej_args.success_type, "Success threshold: type error");
    ej_cmd->add_option("--success-axis", ej_args.success_axis, "Success threshold: axis error (rad)");
    ej_cmd->add_option("--success-origin", ej_args.success_origin, "Success threshold: origin error (m)");
    add_common(ej_cmd, ej_args.common);

    EvalSegArgs es_args;
    auto* es_cmd = app.add_subcommand("eval-seg", "Segmentation mIoU and count match");
    es_cmd->add_option("--pred", es_args.pred_path, "Predicted masks JSON")->required();
    es_cmd->add_option("--gt", es_args.gt_path, "Ground-truth masks JSON")->required();
    es_cmd->add_option("--points", es_args.points_path, "Cloud file the masks index into")->required();
    add_common(es_cmd, es_args.common);

    ExecuteArgs exec_args;
    auto* exec_cmd = app.add_subcommand("execute", "Physical-executability verdict for a URDF");
    exec_cmd->add_option("--urdf", exec_args.urdf_path, "URDF file")->required();
    exec_cmd->add_option("--samples", exec_args.samples, "Sweep samples per joint");
    exec_cmd->add_option("--bound", exec_args.bound, "AABB excursion bound factor");
    add_common(exec_cmd, exec_args.common);

    PipelineArgs pipe_args;
    auto* pipe_cmd = app.add_subcommand("pipeline", "Batch: regularize, predict, assemble, evaluate");
    pipe_cmd->add_option("--config", pipe_args.config_path, "Pipeline config JSON");
    pipe_cmd->add_option("--in", pipe_args.in_dir, "Input dataset directory");
    pipe_cmd->add_option("--out", pipe_args.out_dir, "Output directory");
    pipe_cmd->add_option("--policy", pipe_args.policy, "hungarian-origin|by-id");
    pipe_cmd->add_flag("--axis-line", pipe_args.axis_line,
                       "Point-to-axis-line origin error for revolute/continuous joints");
    pipe_cmd->add_flag("--sign-invariant", pipe_args.sign_invariant, "Fold antipodal axes to zero error");
    pipe_cmd->add_option("--axis-tilt", pipe_args.axis_tilt, "Noise: axis tilt (radians)");
    pipe_cmd->add_option("--origin-sigma", pipe_args.origin_sigma, "Noise: origin sigma (meters)");
    pipe_cmd->add_option("--type-flip", pipe_args.type_flip, "Noise: type flip probability");
    pipe_cmd->add_option("--drop-part", pipe_args.drop_part, "Noise: part drop probability");
    pipe_cmd->add_option("--seed", pipe_args.seed, "Seed for all stochastic stages");
    pipe_cmd->add_option("--jobs", pipe_args.parallelism, "Worker threads (default $ARTIKIT_JOBS or 1)");
    pipe_cmd->add_option("--splits", pipe_args.splits_path, "Split labels JSON (id -> label)");
    pipe_cmd->add_flag("--json", pipe_args.common.json_output, "Emit machine-readable JSON on stdout");
    pipe_cmd->add_flag("--quiet", pipe_args.common.quiet, "Suppress human-readable output");
    pipe_cmd->add_option("--report-out", pipe_args.common.out_path, "Also write the report JSON here");

    ReportArgs report_args;
    auto* report_cmd = app.add_subcommand("report", "Aggregate per-object result JSON files");
    report_cmd->add_option("--dir", report_args.dir, "Directory of result JSON files")->required();
    report_cmd->add_option("--splits", report_args.splits_path, "Split labels JSON (id -> label)");
    add_common(report_cmd, report_args.common);

    CLI11_PARSE(app, argc, argv);

    try {
        if (regularize_cmd->parsed()) return cmd_regularize(regularize_args);
        if (convert_cmd->parsed()) return cmd_convert(convert_args);
        if (mesh_cmd->parsed()) return cmd_mesh(mesh_args);
        if (views_cmd->parsed()) return cmd_sample_views(views_args);
        if (ej_cmd->parsed()) return cmd_eval_joints(ej_args);
        if (es_cmd->parsed()) return cmd_eval_seg(es_args);
        if (exec_cmd->parsed()) return cmd_execute(exec_args);
        if (pipe_cmd->parsed()) return cmd_pipeline(pipe_args);
        if (report_cmd->parsed()) return cmd_report(report_args);
    } catch (const artikit::Error& e) {
        print_error(e.code(), e.what());
        return exit_code_for(e);
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
    return 0;
}
