#pragma once

#include <Eigen/Core>
#include <algorithm>
#include <limits>
#include <vector>

#include "artikit/errors.hpp"

namespace artikit {

// Exact nearest-neighbor search over 3D points. Median-split build, branch
// pruned descent on query.
class KdTree {
public:
    explicit KdTree(std::vector<Eigen::Vector3d> points) : points_(std::move(points)) {
        if (points_.empty()) throw EmptyCloudError("kd-tree over zero points");
        order_.resize(points_.size());
        for (std::size_t i = 0; i < points_.size(); ++i) order_[i] = static_cast<int>(i);
        nodes_.reserve(points_.size());
        root_ = build(0, static_cast<int>(order_.size()), 0);
    }

    struct Hit {
        int index;
        double squared_distance;
    };

    Hit nearest(const Eigen::Vector3d& query) const {
        Hit best{-1, std::numeric_limits<double>::infinity()};
        search(root_, query, best);
        return best;
    }

private:
    struct Node {
        int point = -1;
        int axis = 0;
        int left = -1;
        int right = -1;
    };

    std::vector<Eigen::Vector3d> points_;
    std::vector<int> order_;
    std::vector<Node> nodes_;
    int root_ = -1;

    int build(int begin, int end, int depth) {
        if (begin >= end) return -1;
        const int axis = depth % 3;
        const int mid = begin + (end - begin) / 2;
        std::nth_element(order_.begin() + begin, order_.begin() + mid, order_.begin() + end,
                         [&](int a, int b) { return points_[a][axis] < points_[b][axis]; });
        const int node_index = static_cast<int>(nodes_.size());
        nodes_.push_back({order_[mid], axis, -1, -1});
        nodes_[node_index].left = build(begin, mid, depth + 1);
        nodes_[node_index].right = build(mid + 1, end, depth + 1);
        return node_index;
    }

    void search(int node_index, const Eigen::Vector3d& query, Hit& best) const {
        if (node_index < 0) return;
        const Node& node = nodes_[node_index];
        const Eigen::Vector3d& p = points_[static_cast<std::size_t>(node.point)];
        const double d2 = (p - query).squaredNorm();
        if (d2 < best.squared_distance) best = {node.point, d2};
        const double delta = query[node.axis] - p[node.axis];
        const int near = delta < 0.0 ? node.left : node.right;
        const int far = delta < 0.0 ? node.right : node.left;
        search(near, query, best);
        if (delta * delta < best.squared_distance) search(far, query, best);
    }
};

}  // namespace artikit
