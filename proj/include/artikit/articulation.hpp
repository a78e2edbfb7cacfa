#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "artikit/errors.hpp"
#include "artikit/urdf.hpp"

namespace artikit {

// The segmentation marker as it appears in the structured prediction text.
inline constexpr const char* kSegMarker = "[SEG]";

struct PredictedJoint {
    std::string id;
    JointType type = JointType::Fixed;
    std::string parent;
    std::string child;
    Pose origin;
    Eigen::Vector3d axis = Eigen::Vector3d::UnitX();
    std::optional<JointLimit> limit;
};

inline bool operator==(const PredictedJoint& a, const PredictedJoint& b) {
    return a.id == b.id && a.type == b.type && a.parent == b.parent && a.child == b.child &&
           a.origin == b.origin && (a.axis.array() == b.axis.array()).all() && a.limit == b.limit;
}

struct LinkEntry {
    std::string link_name;
    std::string category;
    bool has_seg_marker = false;
};

inline bool operator==(const LinkEntry& a, const LinkEntry& b) {
    return a.link_name == b.link_name && a.category == b.category &&
           a.has_seg_marker == b.has_seg_marker;
}

// The structured articulation output: a joint list plus an ordered
// link-name -> "category[SEG]" map.
struct ArticulationPrediction {
    std::vector<PredictedJoint> joints;
    std::vector<LinkEntry> links;  // insertion-ordered

    const LinkEntry* find_link(std::string_view name) const {
        for (const auto& l : links)
            if (l.link_name == name) return &l;
        return nullptr;
    }
};

inline bool operator==(const ArticulationPrediction& a, const ArticulationPrediction& b) {
    return a.joints == b.joints && a.links == b.links;
}

struct PredictionParseOptions {
    // When set, a revolute joint without a limit is repaired to {0, pi/2}
    // instead of raising SchemaViolation.
    bool repair = false;
};

namespace detail {

using ordered_json = nlohmann::ordered_json;

inline double json_number(const ordered_json& value, const std::string& path) {
    if (!value.is_number())
        throw SchemaViolationError(path + ": expected a number");
    return value.get<double>();
}

inline Eigen::Vector3d json_triple(const ordered_json& value, const std::string& path) {
    if (!value.is_array() || value.size() != 3)
        throw SchemaViolationError(path + ": expected an array of 3 numbers, got " +
                                   (value.is_array() ? std::to_string(value.size()) + " elements"
                                                     : std::string(value.type_name())));
    return {json_number(value[0], path + "/0"), json_number(value[1], path + "/1"),
            json_number(value[2], path + "/2")};
}

inline const ordered_json& json_field(const ordered_json& object, const std::string& key,
                                      const std::string& path) {
    auto it = object.find(key);
    if (it == object.end()) throw SchemaViolationError(path + ": missing key \"" + key + "\"");
    return *it;
}

inline PredictedJoint parse_predicted_joint(const ordered_json& node, const std::string& path,
                                            const PredictionParseOptions& options,
                                            std::vector<std::string>* warnings) {
    if (!node.is_object()) throw SchemaViolationError(path + ": expected an object");
    PredictedJoint joint;
    const auto& id = json_field(node, "id", path);
    if (!id.is_string()) throw SchemaViolationError(path + "/id: expected a string");
    joint.id = id.get<std::string>();

    const auto& type = json_field(node, "type", path);
    if (!type.is_string()) throw SchemaViolationError(path + "/type: expected a string");
    auto parsed_type = joint_type_from_string(type.get<std::string>());
    if (!parsed_type)
        throw SchemaViolationError(path + "/type: unknown joint type \"" + type.get<std::string>() +
                                   "\" (joint '" + joint.id + "')");
    joint.type = *parsed_type;

    const auto& parent = json_field(node, "parent", path);
    const auto& child = json_field(node, "child", path);
    if (!parent.is_string() || !child.is_string())
        throw SchemaViolationError(path + ": parent/child must be strings");
    joint.parent = parent.get<std::string>();
    joint.child = child.get<std::string>();
    if (joint.parent == joint.child)
        throw SchemaViolationError(path + ": joint '" + joint.id + "' parent equals child");

    const auto& origin = json_field(node, "origin", path);
    if (!origin.is_object()) throw SchemaViolationError(path + "/origin: expected an object");
    joint.origin.xyz = json_triple(json_field(origin, "xyz", path + "/origin"), path + "/origin/xyz");
    joint.origin.rpy = json_triple(json_field(origin, "rpy", path + "/origin"), path + "/origin/rpy");

    joint.axis = json_triple(json_field(node, "axis", path), path + "/axis (joint '" + joint.id + "')");

    if (auto it = node.find("limit"); it != node.end()) {
        if (!it->is_object()) throw SchemaViolationError(path + "/limit: expected an object");
        JointLimit limit;
        limit.lower = json_number(json_field(*it, "lower", path + "/limit"), path + "/limit/lower");
        limit.upper = json_number(json_field(*it, "upper", path + "/limit"), path + "/limit/upper");
        if (joint.type == JointType::Continuous) {
            warn(warnings, path + ": limit on continuous joint '" + joint.id + "' ignored");
        } else {
            joint.limit = limit;
        }
    }

    if (requires_limit(joint.type) && !joint.limit) {
        if (options.repair) {
            joint.limit = JointLimit{0.0, M_PI / 2.0};
            warn(warnings, path + ": joint '" + joint.id + "' missing limit repaired to [0, pi/2]");
        } else {
            throw SchemaViolationError(path + ": joint '" + joint.id + "' is " + to_string(joint.type) +
                                       " but has no limit");
        }
    }
    if (joint.limit && joint.limit->lower > joint.limit->upper)
        throw SchemaViolationError(path + ": joint '" + joint.id + "' limit lower > upper");

    if (is_moving(joint.type)) {
        const double n = joint.axis.norm();
        if (n < 1e-12)
            throw SchemaViolationError(path + "/axis: joint '" + joint.id + "' has a zero axis");
        if (std::fabs(n - 1.0) > 1e-6) {
            joint.axis /= n;
            warn(warnings, path + ": joint '" + joint.id + "' axis renormalized");
        }
    }
    return joint;
}

}  // namespace detail

// Parse and validate the structured articulation JSON. The "[SEG]" suffix on
// each link value is stripped into (category, has_seg_marker). Errors carry
// the JSON path of the offending element.
inline ArticulationPrediction parse_prediction(const std::string& json_text,
                                               const PredictionParseOptions& options = {},
                                               std::vector<std::string>* warnings = nullptr) {
    detail::ordered_json doc;
    try {
        doc = detail::ordered_json::parse(json_text);
    } catch (const nlohmann::json::parse_error& e) {
        throw JsonSyntaxError(e.what());
    }
    if (!doc.is_object()) throw SchemaViolationError("/: expected a JSON object");
    for (const auto& [key, value] : doc.items()) {
        (void)value;
        if (key != "joints" && key != "links")
            detail::warn(warnings, "/" + key + ": unknown top-level key ignored");
    }

    ArticulationPrediction prediction;
    const auto& joints = detail::json_field(doc, "joints", "/");
    if (!joints.is_array()) throw SchemaViolationError("/joints: expected an array");
    int index = 0;
    for (const auto& node : joints) {
        prediction.joints.push_back(detail::parse_predicted_joint(
            node, "/joints/" + std::to_string(index), options, warnings));
        ++index;
    }

    const auto& links = detail::json_field(doc, "links", "/");
    if (!links.is_object()) throw SchemaViolationError("/links: expected an object");
    for (const auto& [name, value] : links.items()) {
        const std::string path = "/links/" + name;
        if (!value.is_string()) throw SchemaViolationError(path + ": expected a string");
        if (prediction.find_link(name))
            throw SchemaViolationError(path + ": duplicate link name");
        LinkEntry entry;
        entry.link_name = name;
        const std::string raw = value.get<std::string>();
        const std::size_t first = raw.find(kSegMarker);
        if (first == std::string::npos) {
            entry.category = raw;
            entry.has_seg_marker = false;
        } else {
            const std::size_t marker_len = std::string(kSegMarker).size();
            if (raw.find(kSegMarker, first + 1) != std::string::npos)
                throw SchemaViolationError(path + ": multiple [SEG] markers in \"" + raw + "\"");
            if (first + marker_len != raw.size())
                throw SchemaViolationError(path + ": [SEG] marker must terminate the value \"" + raw +
                                           "\"");
            entry.category = raw.substr(0, first);
            entry.has_seg_marker = true;
        }
        prediction.links.push_back(std::move(entry));
    }

    // cross-references: every joint endpoint must be a declared link or "base"
    index = 0;
    for (const auto& joint : prediction.joints) {
        const std::string path = "/joints/" + std::to_string(index);
        if (joint.child != "base" && !prediction.find_link(joint.child))
            throw ConsistencyViolationError(path + "/child: joint '" + joint.id +
                                            "' references undeclared link '" + joint.child + "'");
        if (joint.parent != "base" && !prediction.find_link(joint.parent))
            throw ConsistencyViolationError(path + "/parent: joint '" + joint.id +
                                            "' references undeclared link '" + joint.parent + "'");
        ++index;
    }
    return prediction;
}

// Inverse of parse_prediction: emits the schema with keys in canonical order
// and the [SEG] suffix restored.
inline std::string serialize_prediction(const ArticulationPrediction& prediction, int indent = 4) {
    detail::ordered_json doc;
    doc["joints"] = detail::ordered_json::array();
    for (const auto& joint : prediction.joints) {
        detail::ordered_json j;
        j["id"] = joint.id;
        j["type"] = to_string(joint.type);
        j["parent"] = joint.parent;
        j["child"] = joint.child;
        j["origin"]["xyz"] = {joint.origin.xyz.x(), joint.origin.xyz.y(), joint.origin.xyz.z()};
        j["origin"]["rpy"] = {joint.origin.rpy.x(), joint.origin.rpy.y(), joint.origin.rpy.z()};
        j["axis"] = {joint.axis.x(), joint.axis.y(), joint.axis.z()};
        if (joint.limit) {
            j["limit"]["lower"] = joint.limit->lower;
            j["limit"]["upper"] = joint.limit->upper;
        }
        doc["joints"].push_back(std::move(j));
    }
    doc["links"] = detail::ordered_json::object();
    for (const auto& link : prediction.links)
        doc["links"][link.link_name] = link.category + (link.has_seg_marker ? kSegMarker : "");
    return doc.dump(indent);
}

struct AssembleOptions {
    bool allow_missing_mesh = false;
    // By convention "base" is implicit and synthesized; set this to require
    // the prediction to declare it explicitly.
    bool require_explicit_base = false;
    // Path prefix recorded in the model's mesh references (e.g. "meshes" for
    // a URDF that lives next to its mesh directory). Existence checks always
    // use mesh_dir; by default the recorded prefix is mesh_dir itself.
    std::optional<std::string> recorded_mesh_dir;
};

// Build a simulator-loadable model from a prediction: links are
// {base} union prediction.links, each referencing <mesh_dir>/<name>.obj with
// an identity local pose and a placeholder inertial; joints copied verbatim.
inline UrdfModel assemble_urdf(const ArticulationPrediction& prediction,
                               const std::filesystem::path& mesh_dir,
                               const AssembleOptions& options = {},
                               std::vector<std::string>* warnings = nullptr) {
    UrdfModel model;
    model.name = "object";

    std::vector<std::string> link_names;
    if (!prediction.find_link("base")) {
        if (options.require_explicit_base)
            throw SchemaViolationError("prediction does not declare the required \"base\" link");
        link_names.push_back("base");
    }
    for (const auto& entry : prediction.links) link_names.push_back(entry.link_name);

    for (const auto& name : link_names) {
        LinkSpec link;
        link.name = name;
        const std::filesystem::path mesh_path = mesh_dir / (name + ".obj");
        if (!std::filesystem::exists(mesh_path)) {
            if (!options.allow_missing_mesh)
                throw MissingMeshError("mesh file not found: " + mesh_path.string());
            detail::warn(warnings, "missing mesh referenced unchecked: " + mesh_path.string());
        }
        GeometryRef ref;
        ref.mesh_path = options.recorded_mesh_dir
                            ? (std::filesystem::path(*options.recorded_mesh_dir) / (name + ".obj")).string()
                            : mesh_path.string();
        link.visuals.push_back(ref);
        link.collisions.push_back(ref);
        model.links.push_back(std::move(link));
    }

    for (const auto& joint : prediction.joints) {
        JointSpec spec;
        spec.id = joint.id;
        spec.type = joint.type;
        spec.parent = joint.parent;
        spec.child = joint.child;
        spec.origin = joint.origin;
        spec.axis = joint.axis;
        spec.limit = joint.limit;
        model.joints.push_back(std::move(spec));
    }

    auto tree_issues = check_tree(model);
    if (!tree_issues.empty()) throw TreeViolationError(tree_issues.front());
    auto param_issues = check_parameters(model);
    if (!param_issues.empty()) throw SchemaViolationError(param_issues.front());
    return model;
}

}  // namespace artikit
