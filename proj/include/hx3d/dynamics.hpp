#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Cholesky>

#include "hx3d/math.hpp"
#include "hx3d/x3d/types.hpp"

namespace hx3d::dynamics {

enum class DynamicsErrorCode { NonFiniteInput, InvalidBody };

class DynamicsError : public std::runtime_error {
 public:
  DynamicsError(DynamicsErrorCode code, const std::string& what)
      : std::runtime_error((code == DynamicsErrorCode::NonFiniteInput ? "NonFiniteInput: " : "InvalidBody: ") + what),
        code_(code) {}
  DynamicsErrorCode code() const noexcept { return code_; }

 private:
  DynamicsErrorCode code_;
};

// angular_velocity is expressed in the world frame, inertia in the body frame.
struct RigidBodyState {
  Vec3 position = Vec3::Zero();
  Quat orientation = Quat::Identity();
  Vec3 linear_velocity = Vec3::Zero();
  Vec3 angular_velocity = Vec3::Zero();
  double mass = 1.0;
  Mat3 inertia = Mat3::Identity() * 0.1;

  bool operator==(const RigidBodyState& o) const {
    return position == o.position && orientation.coeffs() == o.orientation.coeffs() &&
           linear_velocity == o.linear_velocity && angular_velocity == o.angular_velocity && mass == o.mass &&
           inertia == o.inertia;
  }
};

// World-frame force, torque about the centre of mass.
struct Wrench {
  Vec3 force = Vec3::Zero();
  Vec3 torque = Vec3::Zero();
};

inline bool inertia_valid(const Mat3& inertia) {
  if (!inertia.allFinite()) return false;
  if ((inertia - inertia.transpose()).norm() > 1e-12 * std::max(1.0, inertia.norm())) return false;
  Eigen::LLT<Mat3> llt(inertia);
  return llt.info() == Eigen::Success;
}

inline void validate(const RigidBodyState& s) {
  if (!s.position.allFinite() || !s.linear_velocity.allFinite() || !s.angular_velocity.allFinite() ||
      !s.orientation.coeffs().allFinite() || !std::isfinite(s.mass) || !s.inertia.allFinite())
    throw DynamicsError(DynamicsErrorCode::NonFiniteInput, "body state has a non-finite component");
  if (!(s.mass > 0.0)) throw DynamicsError(DynamicsErrorCode::InvalidBody, "mass must be positive");
  if (!inertia_valid(s.inertia))
    throw DynamicsError(DynamicsErrorCode::InvalidBody, "inertia must be symmetric positive-definite");
}

inline Vec3 angular_momentum(const RigidBodyState& s) {
  const Mat3 r = s.orientation.toRotationMatrix();
  return r * (s.inertia * (r.transpose() * s.angular_velocity));
}

inline Vec3 linear_momentum(const RigidBodyState& s) { return s.mass * s.linear_velocity; }

inline double kinetic_energy(const RigidBodyState& s) {
  const Mat3 r = s.orientation.toRotationMatrix();
  const Vec3 wb = r.transpose() * s.angular_velocity;
  return 0.5 * s.mass * s.linear_velocity.squaredNorm() + 0.5 * wb.dot(s.inertia * wb);
}

// Semi-implicit Euler. The gyroscopic part of Euler's equation
// (I dw/dt = tau - w x Iw) is integrated as an exact rotation of the body
// angular momentum, which keeps |L| constant when torque-free.
inline RigidBodyState step_rigid_body(const RigidBodyState& s, const Wrench& w, double dt) {
  if (!std::isfinite(dt) || !w.force.allFinite() || !w.torque.allFinite())
    throw DynamicsError(DynamicsErrorCode::NonFiniteInput, "wrench and dt must be finite");
  if (!(dt > 0.0)) throw DynamicsError(DynamicsErrorCode::NonFiniteInput, "dt must be positive");
  validate(s);

  RigidBodyState out = s;
  out.linear_velocity = s.linear_velocity + (w.force / s.mass) * dt;
  out.position = s.position + out.linear_velocity * dt;

  const Mat3 r = s.orientation.toRotationMatrix();
  const Vec3 wb = r.transpose() * s.angular_velocity;
  Vec3 lb = s.inertia * wb;
  if (wb.squaredNorm() > 0.0) lb = quat_exp(-wb * dt) * lb;
  lb += r.transpose() * w.torque * dt;
  const Vec3 wb_new = s.inertia.ldlt().solve(lb);

  out.orientation = (s.orientation * quat_exp(wb_new * dt)).normalized();
  out.angular_velocity = out.orientation * wb_new;
  if (!out.position.allFinite() || !out.linear_velocity.allFinite() || !out.angular_velocity.allFinite())
    throw DynamicsError(DynamicsErrorCode::NonFiniteInput, "integration overflowed");
  return out;
}

// Scene-level gravity, off unless a scene turns it on.
struct GravitySettings {
  bool enabled = false;
  Vec3 g = Vec3(0.0, -9.81, 0.0);
};

inline Wrench gravity_wrench(const RigidBodyState& s, const GravitySettings& g) {
  Wrench w;
  if (g.enabled) w.force = s.mass * g.g;
  return w;
}

inline Wrench operator+(const Wrench& a, const Wrench& b) { return {a.force + b.force, a.torque + b.torque}; }

// Body state from a DynamicTransform node (defaults already filled).
inline RigidBodyState body_from_node(const x3d::Node& n) {
  if (n.kind != x3d::NodeKind::DynamicTransform)
    throw DynamicsError(DynamicsErrorCode::InvalidBody, "node is not a DynamicTransform");
  auto opt = [&]<class T>(std::string_view name) -> const T* {
    const x3d::FieldValue* v = n.field(name);
    return v ? std::get_if<T>(v) : nullptr;
  };
  auto vec = [&](std::string_view name) {
    const auto* v = opt.template operator()<x3d::SFVec3f>(name);
    return v ? Vec3(v->v[0], v->v[1], v->v[2]) : Vec3::Zero();
  };
  RigidBodyState s;
  s.position = vec("translation");
  if (const auto* rot = opt.template operator()<x3d::SFRotation>("rotation"))
    s.orientation = Quat(Eigen::AngleAxisd(rot->angle, Vec3(rot->axis[0], rot->axis[1], rot->axis[2])));
  if (const auto* m = opt.template operator()<x3d::SFFloat>("mass")) s.mass = m->value;
  if (const auto* it = opt.template operator()<x3d::MFFloat>("inertiaTensor")) {
    if (it->values.size() != 9) throw DynamicsError(DynamicsErrorCode::InvalidBody, "inertiaTensor needs 9 values");
    for (int i = 0; i < 9; ++i) s.inertia(i / 3, i % 3) = it->values[static_cast<std::size_t>(i)];
  }
  s.linear_velocity = vec("linearVelocity");
  s.angular_velocity = vec("angularVelocity");
  validate(s);
  return s;
}

// Pose of the body as a 4x4 for rendering / field updates.
inline Mat4 body_pose(const RigidBodyState& s) { return pose_matrix(s.orientation.toRotationMatrix(), s.position); }

// SFRotation equivalent of the body orientation.
inline x3d::SFRotation orientation_field(const RigidBodyState& s) {
  const Eigen::AngleAxisd aa(s.orientation);
  x3d::SFRotation r;
  if (aa.angle() == 0.0) return r;
  r.axis = {aa.axis().x(), aa.axis().y(), aa.axis().z()};
  r.angle = aa.angle();
  return r;
}

}  // namespace hx3d::dynamics
