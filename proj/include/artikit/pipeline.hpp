#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "artikit/articulation.hpp"
#include "artikit/chamfer.hpp"
#include "artikit/executability.hpp"
#include "artikit/meshing.hpp"
#include "artikit/metrics.hpp"
#include "artikit/mock_predictor.hpp"
#include "artikit/pointcloud.hpp"
#include "artikit/regularize.hpp"
#include "artikit/report.hpp"
#include "artikit/rng.hpp"

namespace artikit {

// End-to-end batch evaluation over a directory of objects. Each object
// directory holds model.urdf (ground truth), cloud.xyzrgb and masks.json
// (part name -> point indices; a "base" entry, when present, is reserved for
// the root geometry and excluded from segmentation scoring).
struct PipelineConfig {
    std::filesystem::path input_dir;
    std::filesystem::path output_dir;
    NoiseSpec noise;
    std::uint64_t seed = 0;
    JointEvalOptions eval;
    SweepConfig sweep;
    MeshMethod mesh_method = MeshMethod::ConvexHull;
    double alpha = 0.2;
    int parallelism = 1;
    std::map<std::string, std::string> splits;
};

namespace detail {

inline MeshMethod mesh_method_from_string(const std::string& s) {
    if (s == "convex-hull") return MeshMethod::ConvexHull;
    if (s == "alpha") return MeshMethod::Alpha;
    throw SchemaViolationError("unknown mesh method \"" + s + "\"");
}

inline MatchPolicy policy_from_string(const std::string& s) {
    if (s == "hungarian-origin") return MatchPolicy::HungarianOrigin;
    if (s == "by-id") return MatchPolicy::ById;
    throw SchemaViolationError("unknown matching policy \"" + s + "\"");
}

inline ObjectResult run_object(const PipelineConfig& config, const std::string& object_id) {
    ObjectResult result;
    result.object_id = object_id;
    const std::filesystem::path in_dir = config.input_dir / object_id;
    const std::filesystem::path out_dir = config.output_dir / object_id;
    try {
        std::filesystem::create_directories(out_dir / "meshes");

        // ground truth, canonicalized
        std::ifstream urdf_file(in_dir / "model.urdf");
        if (!urdf_file) throw IoError("cannot open " + (in_dir / "model.urdf").string());
        std::stringstream buffer;
        buffer << urdf_file.rdbuf();
        const UrdfModel raw_gt = parse_urdf(buffer.str());
        const auto [gt, reg_report] = regularize(raw_gt);
        (void)reg_report;

        const ArticulationPrediction prediction =
            mock_predict(gt, config.noise, mix_seed(config.seed, object_id));
        {
            std::ofstream pred_file(out_dir / "prediction.json");
            pred_file << serialize_prediction(prediction) << '\n';
        }

        const PointCloud cloud = load_cloud(in_dir / "cloud.xyzrgb", CloudFormat::XyzRgbText);
        const std::vector<PartMask> all_masks = load_masks(in_dir / "masks.json");
        for (const auto& m : all_masks) validate_mask(m, cloud.size());

        std::map<std::string, const PartMask*> masks_by_name;
        for (const auto& m : all_masks) masks_by_name[m.part_name] = &m;
        std::vector<PartMask> gt_masks;
        for (const auto& m : all_masks)
            if (m.part_name != "base") gt_masks.push_back(m);

        // rest transform per predicted link (flat tree: the owning joint's origin)
        std::map<std::string, Eigen::Isometry3d> rest;
        rest["base"] = Eigen::Isometry3d::Identity();
        for (const auto& j : prediction.joints) rest[j.child] = pose_to_transform(j.origin);

        // part meshes from masks, expressed in their link frames
        std::vector<PartMask> pred_masks;
        std::set<int> used_indices;
        for (const auto& link : prediction.links) {
            validate_part_filename(link.link_name);
            auto it = masks_by_name.find(link.link_name);
            if (it == masks_by_name.end())
                throw KeyMismatchError("no mask for predicted link '" + link.link_name + "'");
            pred_masks.push_back(*it->second);
            for (int idx : it->second->member_indices) used_indices.insert(idx);
            TriMesh mesh = points_to_mesh(cloud, *it->second, config.mesh_method, config.alpha);
            const Eigen::Isometry3d to_link = rest.count(link.link_name)
                                                  ? rest[link.link_name].inverse()
                                                  : Eigen::Isometry3d::Identity();
            for (auto& v : mesh.vertices) v = to_link * v;
            save_obj(mesh, out_dir / "meshes" / (link.link_name + ".obj"));
        }

        // base geometry: the declared base mask, else the cloud remainder,
        // else the whole cloud
        if (!prediction.find_link("base")) {
            std::vector<int> base_indices;
            if (auto it = masks_by_name.find("base"); it != masks_by_name.end()) {
                base_indices = it->second->member_indices;
            } else {
                for (int i = 0; i < cloud.size(); ++i)
                    if (!used_indices.count(i)) base_indices.push_back(i);
            }
            PartMask base_mask = make_mask("base", std::move(base_indices));
            TriMesh base_mesh;
            try {
                base_mesh = points_to_mesh(cloud, base_mask, config.mesh_method, config.alpha);
            } catch (const DegenerateGeometryError&) {
                std::vector<int> everything(static_cast<std::size_t>(cloud.size()));
                for (int i = 0; i < cloud.size(); ++i) everything[static_cast<std::size_t>(i)] = i;
                base_mesh = points_to_mesh(cloud, make_mask("base", std::move(everything)),
                                           config.mesh_method, config.alpha);
            }
            save_obj(base_mesh, out_dir / "meshes" / "base.obj");
        }

        AssembleOptions assemble_options;
        assemble_options.recorded_mesh_dir = "meshes";  // URDF lives beside the mesh dir
        const UrdfModel assembled = assemble_urdf(prediction, out_dir / "meshes", assemble_options);
        {
            std::ofstream model_file(out_dir / "model.urdf");
            model_file << emit_urdf(assembled);
        }

        result.verdict = check_executability(out_dir / "model.urdf", config.sweep);
        result.joint_errors = eval_joints(prediction, gt, config.eval);
        result.seg = eval_segmentation(pred_masks, gt_masks, cloud.size());

        std::set<std::string> pred_articulated;
        for (const auto& j : prediction.joints)
            if (j.type != JointType::Fixed) pred_articulated.insert(j.child);
        result.count_acc =
            static_cast<int>(pred_articulated.size()) == articulated_part_count(gt);
    } catch (const std::exception& e) {
        result.error = e.what();
    }
    return result;
}

}  // namespace detail

inline std::vector<std::string> list_object_ids(const std::filesystem::path& input_dir) {
    if (!std::filesystem::is_directory(input_dir))
        throw IoError("input directory not found: " + input_dir.string());
    std::vector<std::string> ids;
    for (const auto& entry : std::filesystem::directory_iterator(input_dir))
        if (entry.is_directory()) ids.push_back(entry.path().filename().string());
    std::sort(ids.begin(), ids.end());
    return ids;
}

// Batch evaluation: per-object failures become report rows, never aborts.
// Deterministic for a fixed (config, seed) regardless of parallelism.
inline EvalReport run_pipeline(const PipelineConfig& config) {
    const std::vector<std::string> ids = list_object_ids(config.input_dir);
    std::filesystem::create_directories(config.output_dir);

    std::vector<ObjectResult> results(ids.size());
    const int workers = std::max(1, std::min<int>(config.parallelism, static_cast<int>(ids.size())));
    if (workers <= 1) {
        for (std::size_t i = 0; i < ids.size(); ++i) results[i] = detail::run_object(config, ids[i]);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&]() {
                for (;;) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= ids.size()) return;
                    results[i] = detail::run_object(config, ids[i]);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    EvalReport report = aggregate_report(std::move(results), config.splits);
    std::ofstream report_file(config.output_dir / "report.json");
    report_file << report_to_json(report).dump(2) << '\n';
    return report;
}

// ---------------------------------------------------------------------------
// Config file (single JSON document; CLI flags override file values)
// ---------------------------------------------------------------------------

inline PipelineConfig load_pipeline_config(const std::filesystem::path& path) {
    std::ifstream file(path);
    if (!file) throw IoError("cannot open " + path.string());
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(file);
    } catch (const nlohmann::json::parse_error& e) {
        throw JsonSyntaxError(path.string() + ": " + e.what());
    }
    PipelineConfig config;
    if (doc.contains("input_dir")) config.input_dir = doc["input_dir"].get<std::string>();
    if (doc.contains("output_dir")) config.output_dir = doc["output_dir"].get<std::string>();
    if (doc.contains("seed")) config.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("noise")) {
        const auto& n = doc["noise"];
        if (n.contains("axis_tilt_rad")) config.noise.axis_tilt_rad = n["axis_tilt_rad"].get<double>();
        if (n.contains("origin_sigma_m")) config.noise.origin_sigma_m = n["origin_sigma_m"].get<double>();
        if (n.contains("type_flip_prob")) config.noise.type_flip_prob = n["type_flip_prob"].get<double>();
        if (n.contains("drop_part_prob")) config.noise.drop_part_prob = n["drop_part_prob"].get<double>();
    }
    if (doc.contains("policy")) config.eval.policy = detail::policy_from_string(doc["policy"].get<std::string>());
    if (doc.contains("axis_line")) config.eval.axis_line = doc["axis_line"].get<bool>();
    if (doc.contains("sign_invariant")) config.eval.sign_invariant = doc["sign_invariant"].get<bool>();
    if (doc.contains("sweep")) {
        const auto& s = doc["sweep"];
        if (s.contains("samples_per_joint")) config.sweep.samples_per_joint = s["samples_per_joint"].get<int>();
        if (s.contains("bound_factor")) config.sweep.bound_factor = s["bound_factor"].get<double>();
    }
    if (doc.contains("mesh_method"))
        config.mesh_method = detail::mesh_method_from_string(doc["mesh_method"].get<std::string>());
    if (doc.contains("alpha")) config.alpha = doc["alpha"].get<double>();
    if (doc.contains("parallelism")) config.parallelism = doc["parallelism"].get<int>();
    if (doc.contains("splits"))
        for (const auto& [id, label] : doc["splits"].items())
            config.splits[id] = label.get<std::string>();
    return config;
}

}  // namespace artikit
