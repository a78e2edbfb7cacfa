#pragma once

#include <vector>

#include "artikit/kdtree.hpp"
#include "artikit/mesh.hpp"
#include "artikit/pointcloud.hpp"

namespace artikit {

namespace detail {

inline std::vector<Eigen::Vector3d> positions(const PointCloud& cloud) {
    std::vector<Eigen::Vector3d> out(static_cast<std::size_t>(cloud.size()));
    for (int i = 0; i < cloud.size(); ++i) out[static_cast<std::size_t>(i)] = cloud.position(i);
    return out;
}

}  // namespace detail

// Symmetric Chamfer distance over xyz columns:
//   CD = mean_a min_b |a-b|^2 + mean_b min_a |b-a|^2
inline double chamfer_distance(const PointCloud& a, const PointCloud& b) {
    if (a.size() == 0 || b.size() == 0) throw EmptyCloudError("chamfer distance over an empty cloud");
    const auto pa = detail::positions(a);
    const auto pb = detail::positions(b);
    const KdTree tree_a(pa);
    const KdTree tree_b(pb);
    double sum_ab = 0.0;
    for (const auto& p : pa) sum_ab += tree_b.nearest(p).squared_distance;
    double sum_ba = 0.0;
    for (const auto& p : pb) sum_ba += tree_a.nearest(p).squared_distance;
    return sum_ab / static_cast<double>(pa.size()) + sum_ba / static_cast<double>(pb.size());
}

// Chamfer distance between surfaces via uniform area-weighted sampling.
inline double chamfer_distance(const TriMesh& a, const TriMesh& b, int samples_per_mesh = 10000,
                               std::uint64_t seed = 0) {
    return chamfer_distance(sample_mesh_surface(a, samples_per_mesh, mix_seed(seed, "mesh-a")),
                            sample_mesh_surface(b, samples_per_mesh, mix_seed(seed, "mesh-b")));
}

}  // namespace artikit
