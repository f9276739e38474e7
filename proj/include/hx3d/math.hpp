#pragma once

#include <cmath>
#include <numbers>

#include <Eigen/Dense>
#include <Eigen/Geometry>

namespace hx3d {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Quat = Eigen::Quaterniond;

inline constexpr double kPi = std::numbers::pi;

inline double deg_to_rad(double deg) { return deg * kPi / 180.0; }

// Axis-aligned box; min < max per axis for a valid box.
struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
  bool valid() const { return (min.array() < max.array()).all(); }
  Vec3 clamp(const Vec3& p) const { return p.cwiseMax(min).cwiseMin(max); }
};

inline Mat4 translation_matrix(const Vec3& t) {
  Mat4 m = Mat4::Identity();
  m.block<3, 1>(0, 3) = t;
  return m;
}

// Rotation about a unit axis; the axis is normalized here for safety of callers
// that pass user data.
inline Mat4 rotation_matrix(const Vec3& axis, double angle) {
  Mat4 m = Mat4::Identity();
  if (axis.squaredNorm() == 0.0) return m;
  m.block<3, 3>(0, 0) = Eigen::AngleAxisd(angle, axis.normalized()).toRotationMatrix();
  return m;
}

inline Mat4 pose_matrix(const Mat3& rotation, const Vec3& translation) {
  Mat4 m = Mat4::Identity();
  m.block<3, 3>(0, 0) = rotation;
  m.block<3, 1>(0, 3) = translation;
  return m;
}

inline Vec3 transform_point(const Mat4& m, const Vec3& p) {
  return m.block<3, 3>(0, 0) * p + m.block<3, 1>(0, 3);
}

inline Vec3 transform_direction(const Mat4& m, const Vec3& d) { return m.block<3, 3>(0, 0) * d; }

inline bool is_affine(const Mat4& m, double tol = 0.0) {
  return std::abs(m(3, 0)) <= tol && std::abs(m(3, 1)) <= tol && std::abs(m(3, 2)) <= tol &&
         std::abs(m(3, 3) - 1.0) <= tol;
}

// Inverse of a rigid transform (orthonormal rotation block).
inline Mat4 rigid_inverse(const Mat4& m) {
  const Mat3 rt = m.block<3, 3>(0, 0).transpose();
  return pose_matrix(rt, -rt * m.block<3, 1>(0, 3));
}

inline bool all_finite(const Vec3& v) { return v.allFinite(); }

// exp map of a rotation vector as a unit quaternion.
inline Quat quat_exp(const Vec3& rotation_vector) {
  const double angle = rotation_vector.norm();
  if (angle < 1e-300) return Quat::Identity();
  return Quat(Eigen::AngleAxisd(angle, rotation_vector / angle));
}

}  // namespace hx3d
