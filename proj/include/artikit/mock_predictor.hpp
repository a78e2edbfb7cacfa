#pragma once

#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "artikit/articulation.hpp"
#include "artikit/rng.hpp"
#include "artikit/urdf.hpp"

namespace artikit {

// Controlled corruption applied to a ground-truth model to exercise the
// evaluation harness. All-zero noise reproduces the model exactly.
struct NoiseSpec {
    double axis_tilt_rad = 0.0;    // exact tilt angle about a random perpendicular
    double origin_sigma_m = 0.0;   // isotropic Gaussian on origin xyz
    double type_flip_prob = 0.0;   // chance of replacing each joint's type
    double drop_part_prob = 0.0;   // chance of dropping each leaf part

    bool is_zero() const {
        return axis_tilt_rad == 0.0 && origin_sigma_m == 0.0 && type_flip_prob == 0.0 &&
               drop_part_prob == 0.0;
    }
};

namespace detail {

inline JointType flip_type(JointType current, Rng& rng) {
    static const JointType kPool[] = {JointType::Prismatic, JointType::Revolute, JointType::Continuous,
                                      JointType::Fixed};
    std::vector<JointType> candidates;
    for (JointType t : kPool)
        if (t != current) candidates.push_back(t);
    return candidates[rng.index(candidates.size())];
}

inline Eigen::Vector3d tilt_axis(const Eigen::Vector3d& axis, double angle, Rng& rng) {
    const Eigen::Vector3d unit = axis.normalized();
    Eigen::Vector3d perp = rng.unit_vector();
    perp -= perp.dot(unit) * unit;
    while (perp.norm() < 1e-9) {
        perp = rng.unit_vector();
        perp -= perp.dot(unit) * unit;
    }
    perp.normalize();
    // rotation of `unit` by `angle` about `perp`; perp . unit = 0 so the
    // Rodrigues formula collapses to a two-term form
    return std::cos(angle) * unit + std::sin(angle) * perp.cross(unit);
}

}  // namespace detail

// Deterministic stand-in for the articulation predictor: emits the JSON image
// of the ground-truth model, optionally corrupted per NoiseSpec. Categories
// default to the link names.
inline ArticulationPrediction mock_predict(const UrdfModel& gt, const NoiseSpec& noise,
                                           std::uint64_t seed) {
    if (noise.axis_tilt_rad < 0 || noise.origin_sigma_m < 0 || noise.type_flip_prob < 0 ||
        noise.type_flip_prob > 1 || noise.drop_part_prob < 0 || noise.drop_part_prob > 1)
        throw std::invalid_argument("noise parameters out of range");
    {
        auto issues = check_tree(gt);
        if (!issues.empty()) throw TreeViolationError(issues.front());
    }
    Rng rng(seed);
    const std::string root = gt.root_links().front();

    // leaf links (no joint uses them as parent) are the only droppable parts
    std::set<std::string> parents;
    for (const auto& j : gt.joints) parents.insert(j.parent);
    std::set<std::string> dropped;
    if (noise.drop_part_prob > 0.0) {
        for (const auto& link : gt.links) {
            if (link.name == root || parents.count(link.name)) continue;
            if (rng.bernoulli(noise.drop_part_prob)) dropped.insert(link.name);
        }
    }

    ArticulationPrediction prediction;
    for (const auto& link : gt.links) {
        if (link.name == root || dropped.count(link.name)) continue;
        prediction.links.push_back({link.name, link.name, true});
    }

    for (const auto& joint : gt.joints) {
        if (dropped.count(joint.child)) continue;
        PredictedJoint pj;
        pj.id = joint.id;
        pj.type = joint.type;
        pj.parent = joint.parent == root ? "base" : joint.parent;
        pj.child = joint.child == root ? "base" : joint.child;
        pj.origin = joint.origin;
        pj.axis = joint.axis;
        pj.limit = joint.limit;

        if (noise.type_flip_prob > 0.0 && rng.bernoulli(noise.type_flip_prob)) {
            pj.type = detail::flip_type(pj.type, rng);
            if (requires_limit(pj.type) && !pj.limit) pj.limit = JointLimit{0.0, M_PI / 2.0};
            if (!requires_limit(pj.type)) pj.limit.reset();
        }
        if (noise.axis_tilt_rad > 0.0) pj.axis = detail::tilt_axis(pj.axis, noise.axis_tilt_rad, rng);
        if (noise.origin_sigma_m > 0.0) pj.origin.xyz += noise.origin_sigma_m * rng.normal3();
        prediction.joints.push_back(std::move(pj));
    }
    return prediction;
}

}  // namespace artikit
