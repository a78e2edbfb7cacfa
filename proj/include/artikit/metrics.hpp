#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "artikit/articulation.hpp"
#include "artikit/assignment.hpp"
#include "artikit/errors.hpp"
#include "artikit/pointcloud.hpp"
#include "artikit/pose.hpp"
#include "artikit/urdf.hpp"

namespace artikit {

// ---------------------------------------------------------------------------
// Segmentation
// ---------------------------------------------------------------------------

inline double mask_iou(const PartMask& a, const PartMask& b) {
    std::vector<int> intersection;
    std::set_intersection(a.member_indices.begin(), a.member_indices.end(), b.member_indices.begin(),
                          b.member_indices.end(), std::back_inserter(intersection));
    const std::size_t uni = a.member_indices.size() + b.member_indices.size() - intersection.size();
    if (uni == 0) return 1.0;  // two empty masks agree perfectly
    return static_cast<double>(intersection.size()) / static_cast<double>(uni);
}

struct SegEvalResult {
    double miou = 0.0;
    bool count_match = false;
};

// Optimal one-to-one matching maximizing total IoU; mIoU averages over GT
// parts with unmatched GT parts contributing zero.
inline SegEvalResult eval_segmentation(const std::vector<PartMask>& pred_masks,
                                       const std::vector<PartMask>& gt_masks, int n_points) {
    for (const auto& m : pred_masks) validate_mask(m, n_points);
    for (const auto& m : gt_masks) validate_mask(m, n_points);
    SegEvalResult result;
    result.count_match = pred_masks.size() == gt_masks.size();
    if (gt_masks.empty()) {
        result.miou = pred_masks.empty() ? 1.0 : 0.0;
        return result;
    }
    std::vector<std::vector<double>> cost(pred_masks.size(), std::vector<double>(gt_masks.size()));
    for (std::size_t i = 0; i < pred_masks.size(); ++i)
        for (std::size_t j = 0; j < gt_masks.size(); ++j)
            cost[i][j] = -mask_iou(pred_masks[i], gt_masks[j]);
    const Assignment assignment = solve_assignment(cost);
    result.miou = -assignment.total_cost / static_cast<double>(gt_masks.size());
    return result;
}

// ---------------------------------------------------------------------------
// Joint parameters
// ---------------------------------------------------------------------------

// Angle between two axis directions in [0, pi]; sign_invariant folds
// antipodal pairs to zero via min(theta, pi - theta).
inline double axis_error(const Eigen::Vector3d& a_pred, const Eigen::Vector3d& a_gt,
                         bool sign_invariant = false) {
    const double np = a_pred.norm(), ng = a_gt.norm();
    if (np < 1e-12 || ng < 1e-12) throw ZeroAxisError("axis_error on a zero axis");
    const double c = std::clamp(a_pred.dot(a_gt) / (np * ng), -1.0, 1.0);
    const double theta = std::acos(c);
    return sign_invariant ? std::min(theta, M_PI - theta) : theta;
}

enum class MatchPolicy { ById, HungarianOrigin };

struct Matching {
    std::vector<std::pair<int, int>> pairs;  // (pred index, gt index)
    std::vector<int> unmatched_pred;
    std::vector<int> unmatched_gt;
};

struct JointPairError {
    std::string pred_id;
    std::string gt_id;
    bool type_mismatch = false;
    double axis_error_rad = 0.0;
    double origin_error_m = 0.0;
};

struct JointErrorAggregate {
    // means over all joints (matched pairs plus unmatched on either side,
    // which count as type errors); empty when there is nothing to compare
    std::optional<double> type_error;
    std::optional<double> axis_error_rad;   // matched pairs only
    std::optional<double> origin_error_m;   // matched pairs only
    int matched = 0;
    int unmatched_pred = 0;
    int unmatched_gt = 0;
    std::vector<JointPairError> pairs;
};

struct JointEvalOptions {
    MatchPolicy policy = MatchPolicy::HungarianOrigin;
    bool axis_line = false;        // point-to-axis-line origin error for revolute/continuous
    bool sign_invariant = false;   // fold antipodal axes
};

namespace detail {

// Depth-first search over assignments in lexicographic (row, ascending col)
// order; the first optimum found is therefore the lowest-index one among all
// cost ties. Exponential, so only used at articulated-object scale.
inline bool lowest_index_refine(const std::vector<std::vector<double>>& cost, double target,
                                std::vector<int>& row_to_col) {
    const int rows = static_cast<int>(cost.size());
    const int cols = static_cast<int>(cost[0].size());
    const int need = std::min(rows, cols);
    const double tol = 1e-9 * std::max(1.0, std::fabs(target));
    std::vector<int> current(static_cast<std::size_t>(rows), -1);
    std::vector<bool> used(static_cast<std::size_t>(cols), false);

    std::function<bool(int, int, double)> dfs = [&](int row, int matched, double running) {
        if (running > target + tol) return false;
        if (row == rows) {
            if (matched != need || std::fabs(running - target) > tol) return false;
            row_to_col = current;
            return true;
        }
        if (matched + (rows - row) < need) return false;  // cannot reach the pair count
        for (int j = 0; j < cols; ++j) {
            if (used[static_cast<std::size_t>(j)]) continue;
            used[static_cast<std::size_t>(j)] = true;
            current[static_cast<std::size_t>(row)] = j;
            if (dfs(row + 1, matched + 1,
                    running + cost[static_cast<std::size_t>(row)][static_cast<std::size_t>(j)]))
                return true;
            used[static_cast<std::size_t>(j)] = false;
            current[static_cast<std::size_t>(row)] = -1;
        }
        if (rows > cols && dfs(row + 1, matched, running)) return true;  // leave this row out
        return false;
    };
    return dfs(0, 0, 0.0);
}

inline Matching match_joints(const std::vector<PredictedJoint>& pred, const std::vector<JointSpec>& gt,
                             MatchPolicy policy) {
    Matching matching;
    std::vector<bool> pred_used(pred.size(), false), gt_used(gt.size(), false);
    if (policy == MatchPolicy::ById) {
        for (std::size_t i = 0; i < pred.size(); ++i)
            for (std::size_t j = 0; j < gt.size(); ++j) {
                if (gt_used[j] || pred[i].id != gt[j].id) continue;
                matching.pairs.emplace_back(static_cast<int>(i), static_cast<int>(j));
                pred_used[i] = gt_used[j] = true;
                break;
            }
    } else {
        std::vector<std::vector<double>> cost(pred.size(), std::vector<double>(gt.size()));
        for (std::size_t i = 0; i < pred.size(); ++i)
            for (std::size_t j = 0; j < gt.size(); ++j)
                cost[i][j] = (pred[i].origin.xyz - gt[j].origin.xyz).norm();
        const Assignment assignment = solve_assignment(cost);
        std::vector<int> row_to_col = assignment.row_to_col;
        if (pred.size() <= 9 && gt.size() <= 9)
            lowest_index_refine(cost, assignment.total_cost, row_to_col);
        for (std::size_t i = 0; i < pred.size(); ++i) {
            if (row_to_col[i] < 0) continue;
            matching.pairs.emplace_back(static_cast<int>(i), row_to_col[i]);
            pred_used[i] = true;
            gt_used[static_cast<std::size_t>(row_to_col[i])] = true;
        }
    }
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (!pred_used[i]) matching.unmatched_pred.push_back(static_cast<int>(i));
    for (std::size_t j = 0; j < gt.size(); ++j)
        if (!gt_used[j]) matching.unmatched_gt.push_back(static_cast<int>(j));
    return matching;
}

// axes compared in the parent frame so equivalent (rpy, axis) encodings agree
inline Eigen::Vector3d axis_in_parent(const Pose& origin, const Eigen::Vector3d& axis) {
    return rpy_to_matrix(origin.rpy) * axis;
}

}  // namespace detail

inline JointErrorAggregate eval_joints(const ArticulationPrediction& prediction, const UrdfModel& gt,
                                       const JointEvalOptions& options = {}) {
    JointErrorAggregate aggregate;
    if (prediction.joints.empty() || gt.joints.empty()) {
        aggregate.unmatched_pred = static_cast<int>(prediction.joints.size());
        aggregate.unmatched_gt = static_cast<int>(gt.joints.size());
        return aggregate;  // empty aggregate
    }

    const Matching matching = detail::match_joints(prediction.joints, gt.joints, options.policy);
    aggregate.matched = static_cast<int>(matching.pairs.size());
    aggregate.unmatched_pred = static_cast<int>(matching.unmatched_pred.size());
    aggregate.unmatched_gt = static_cast<int>(matching.unmatched_gt.size());

    double type_sum = 0.0, axis_sum = 0.0, origin_sum = 0.0;
    for (const auto& [pi, gi] : matching.pairs) {
        const PredictedJoint& p = prediction.joints[static_cast<std::size_t>(pi)];
        const JointSpec& g = gt.joints[static_cast<std::size_t>(gi)];
        JointPairError pair;
        pair.pred_id = p.id;
        pair.gt_id = g.id;
        pair.type_mismatch = p.type != g.type;
        pair.axis_error_rad = axis_error(detail::axis_in_parent(p.origin, p.axis),
                                         detail::axis_in_parent(g.origin, g.axis),
                                         options.sign_invariant);
        if (options.axis_line && (g.type == JointType::Revolute || g.type == JointType::Continuous)) {
            // distance from the predicted origin to the GT axis line; revolute
            // origins are only defined up to sliding along the axis
            const Eigen::Vector3d axis_dir =
                detail::axis_in_parent(g.origin, g.axis).normalized();
            const Eigen::Vector3d delta = p.origin.xyz - g.origin.xyz;
            pair.origin_error_m = (delta - delta.dot(axis_dir) * axis_dir).norm();
        } else {
            pair.origin_error_m = (p.origin.xyz - g.origin.xyz).norm();
        }
        type_sum += pair.type_mismatch ? 1.0 : 0.0;
        axis_sum += pair.axis_error_rad;
        origin_sum += pair.origin_error_m;
        aggregate.pairs.push_back(std::move(pair));
    }

    const int total = aggregate.matched + aggregate.unmatched_pred + aggregate.unmatched_gt;
    aggregate.type_error = (type_sum + aggregate.unmatched_pred + aggregate.unmatched_gt) / total;
    if (aggregate.matched > 0) {
        aggregate.axis_error_rad = axis_sum / aggregate.matched;
        aggregate.origin_error_m = origin_sum / aggregate.matched;
    }
    return aggregate;
}

}  // namespace artikit
