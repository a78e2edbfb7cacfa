#pragma once

#include <Eigen/Geometry>
#include <map>
#include <string>
#include <vector>

#include "artikit/errors.hpp"
#include "artikit/pose.hpp"
#include "artikit/urdf.hpp"

namespace artikit {

using JointConfiguration = std::map<std::string, double>;
using TransformMap = std::map<std::string, Eigen::Isometry3d>;

namespace detail {

inline Eigen::Isometry3d joint_motion(const JointSpec& joint, double q,
                                      std::vector<std::string>* warnings) {
    Eigen::Isometry3d motion = Eigen::Isometry3d::Identity();
    switch (joint.type) {
        case JointType::Revolute:
        case JointType::Continuous:
            motion.linear() = axis_angle_matrix(joint.axis, q);
            break;
        case JointType::Prismatic:
            motion.translation() = joint.axis.normalized() * q;
            break;
        case JointType::Fixed:
            break;
        case JointType::Floating:
        case JointType::Planar:
            warn(warnings, "joint '" + joint.id + "': unsupported-motion for type " +
                               to_string(joint.type) + ", treated as identity");
            break;
    }
    return motion;
}

}  // namespace detail

// World transform of every link: T_world(root) = I and
// T_world(child) = T_world(parent) * T(joint.origin) * Motion(joint, q).
// `q` must supply a value for every non-fixed joint; revolute/prismatic
// values must lie within the joint limits.
inline TransformMap forward_kinematics(const UrdfModel& model, const JointConfiguration& q,
                                       std::vector<std::string>* warnings = nullptr) {
    {
        auto issues = check_tree(model);
        if (!issues.empty()) throw TreeViolationError(issues.front());
    }
    for (const auto& joint : model.joints) {
        if (joint.type == JointType::Fixed) continue;
        auto it = q.find(joint.id);
        if (it == q.end())
            throw MissingConfigurationError("no configuration value for joint '" + joint.id + "'");
        if (requires_limit(joint.type) && joint.limit &&
            (it->second < joint.limit->lower || it->second > joint.limit->upper))
            throw LimitViolationError("joint '" + joint.id + "' value " + format_double(it->second) +
                                      " outside [" + format_double(joint.limit->lower) + ", " +
                                      format_double(joint.limit->upper) + "]");
    }

    TransformMap world;
    world[model.root_links().front()] = Eigen::Isometry3d::Identity();

    // joints ordered parent-before-child by repeated sweeps over the tree
    std::vector<const JointSpec*> pending;
    for (const auto& j : model.joints) pending.push_back(&j);
    while (!pending.empty()) {
        bool progressed = false;
        std::vector<const JointSpec*> next;
        for (const JointSpec* joint : pending) {
            auto parent_it = world.find(joint->parent);
            if (parent_it == world.end()) {
                next.push_back(joint);
                continue;
            }
            const double value = joint->type == JointType::Fixed ? 0.0 : q.at(joint->id);
            world[joint->child] =
                parent_it->second * pose_to_transform(joint->origin) * detail::joint_motion(*joint, value, warnings);
            progressed = true;
        }
        if (!progressed)
            throw TreeViolationError("kinematic tree is not rooted (unreachable joints)");
        pending = std::move(next);
    }
    return world;
}

}  // namespace artikit
