#pragma once

#include <string>
#include <utility>
#include <vector>

#include "artikit/kinematics.hpp"
#include "artikit/urdf.hpp"

namespace artikit {

struct RegularizationReport {
    std::vector<std::string> reparented_joints;
    std::vector<std::pair<std::string, int>> consolidated_links;  // (link, original mesh count)
    std::string base_link = "base";
};

// Canonicalize a model for dataset use: the root becomes "base", every joint
// is re-parented to it with its origin replaced by the zero-configuration
// transform base -> child, and multi-mesh links are consolidated to their
// first visual/collision entry. World poses at q = 0 are preserved exactly.
inline std::pair<UrdfModel, RegularizationReport> regularize(const UrdfModel& input) {
    {
        auto issues = check_tree(input);
        if (!issues.empty()) throw TreeViolationError(issues.front());
    }
    UrdfModel model = input;
    RegularizationReport report;

    const std::string root = model.root_links().front();
    if (root != "base") {
        if (model.find_link("base"))
            throw SchemaViolationError("cannot rename root '" + root +
                                       "' to \"base\": a different link already has that name");
        for (auto& link : model.links)
            if (link.name == root) link.name = "base";
        for (auto& joint : model.joints) {
            if (joint.parent == root) joint.parent = "base";
            if (joint.child == root) joint.child = "base";
        }
    }

    // zero configuration for every non-fixed joint
    JointConfiguration zero;
    for (const auto& joint : model.joints)
        if (joint.type != JointType::Fixed) zero[joint.id] = 0.0;
    // limits may exclude 0; FK at the rest pose must not reject them
    UrdfModel unlimited = model;
    for (auto& joint : unlimited.joints) joint.limit.reset();
    const TransformMap world = forward_kinematics(unlimited, zero);

    for (auto& joint : model.joints) {
        if (joint.parent == "base") continue;
        const Eigen::Isometry3d& t = world.at(joint.child);
        if (!is_rotation(t.linear(), 1e-9))
            throw DecompositionFailureError("joint '" + joint.id +
                                            "': accumulated rotation is not orthonormal");
        joint.parent = "base";
        joint.origin = transform_to_pose(t);
        report.reparented_joints.push_back(joint.id);
    }

    for (auto& link : model.links) {
        const int total = static_cast<int>(link.visuals.size() + link.collisions.size());
        if (link.visuals.size() > 1 || link.collisions.size() > 1) {
            link.visuals.resize(std::min<std::size_t>(link.visuals.size(), 1));
            link.collisions.resize(std::min<std::size_t>(link.collisions.size(), 1));
            report.consolidated_links.emplace_back(link.name, total);
        }
    }
    return {std::move(model), std::move(report)};
}

// Keep models whose articulated-part count is strictly below max_parts.
inline std::vector<UrdfModel> filter_by_part_count(const std::vector<UrdfModel>& models, int max_parts) {
    if (max_parts < 1) throw InvalidCountError("max_parts must be >= 1");
    std::vector<UrdfModel> kept;
    for (const auto& model : models)
        if (articulated_part_count(model) < max_parts) kept.push_back(model);
    return kept;
}

}  // namespace artikit
