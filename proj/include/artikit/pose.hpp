#pragma once

#include <Eigen/Dense>
#include <Eigen/Geometry>
#include <cmath>

#include "artikit/errors.hpp"

namespace artikit {

// Position (meters) plus fixed-axis roll-pitch-yaw (radians), the URDF
// <origin xyz rpy> convention.
struct Pose {
    Eigen::Vector3d xyz = Eigen::Vector3d::Zero();
    Eigen::Vector3d rpy = Eigen::Vector3d::Zero();
};

inline bool operator==(const Pose& a, const Pose& b) {
    return (a.xyz.array() == b.xyz.array()).all() && (a.rpy.array() == b.rpy.array()).all();
}

// R = Rz(yaw) * Ry(pitch) * Rx(roll), the URDF fixed-axis XYZ convention.
inline Eigen::Matrix3d rpy_to_matrix(const Eigen::Vector3d& rpy) {
    const double cr = std::cos(rpy.x()), sr = std::sin(rpy.x());
    const double cp = std::cos(rpy.y()), sp = std::sin(rpy.y());
    const double cy = std::cos(rpy.z()), sy = std::sin(rpy.z());
    Eigen::Matrix3d r;
    r << cy * cp, cy * sp * sr - sy * cr, cy * sp * cr + sy * sr,
         sy * cp, sy * sp * sr + cy * cr, sy * sp * cr - cy * sr,
         -sp,     cp * sr,                cp * cr;
    return r;
}

inline bool is_rotation(const Eigen::Matrix3d& r, double tol = 1e-9) {
    const Eigen::Matrix3d residual = r.transpose() * r - Eigen::Matrix3d::Identity();
    return residual.cwiseAbs().maxCoeff() < tol && std::fabs(r.determinant() - 1.0) < tol;
}

// Inverse of rpy_to_matrix. At the gimbal singularity |pitch| = pi/2 the
// decomposition is non-unique; roll is pinned to 0 and the remaining rotation
// folded into yaw so outputs stay reproducible.
inline Eigen::Vector3d matrix_to_rpy(const Eigen::Matrix3d& r) {
    if (!is_rotation(r, 1e-6))
        throw DecompositionFailureError("matrix is not orthonormal with unit determinant");
    const double cos_pitch = std::hypot(r(0, 0), r(1, 0));
    if (cos_pitch < 1e-9) {
        const double pitch = r(2, 0) <= 0.0 ? M_PI / 2.0 : -M_PI / 2.0;
        const double yaw = std::atan2(-r(0, 1), r(1, 1));
        return {0.0, pitch, yaw};
    }
    const double pitch = std::atan2(-r(2, 0), cos_pitch);
    const double roll = std::atan2(r(2, 1), r(2, 2));
    const double yaw = std::atan2(r(1, 0), r(0, 0));
    return {roll, pitch, yaw};
}

inline Eigen::Isometry3d pose_to_transform(const Pose& pose) {
    Eigen::Isometry3d t = Eigen::Isometry3d::Identity();
    t.linear() = rpy_to_matrix(pose.rpy);
    t.translation() = pose.xyz;
    return t;
}

inline Pose transform_to_pose(const Eigen::Isometry3d& t) {
    return {t.translation(), matrix_to_rpy(t.linear())};
}

inline Eigen::Matrix3d axis_angle_matrix(const Eigen::Vector3d& axis, double angle) {
    return Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
}

}  // namespace artikit
