#pragma once

#include <algorithm>

#include "hx3d/geometry/primitives.hpp"
#include "hx3d/haptics/device.hpp"

namespace hx3d::haptics {

using geometry::PlacedShape;

struct ContactResult {
  Vec3 normal_force = Vec3::Zero();
  double penetration = 0.0;
  Vec3 normal = Vec3::UnitY();        // outward surface normal, world
  Vec3 surface_point = Vec3::Zero();  // closest surface point, world
  bool in_contact() const { return penetration > 0.0; }
};

inline double effective_stiffness(const SurfaceParams& s, const HapticDeviceConfig& cfg) {
  return std::min(s.stiffness, cfg.max_stiffness);
}

// Penalty force k·d·n with k = min(surface stiffness, device max stiffness).
inline ContactResult contact_force(const Vec3& device_pos, const PlacedShape& shape, const SurfaceParams& s,
                                   const HapticDeviceConfig& cfg) {
  if (std::holds_alternative<geometry::Capsule>(shape.shape))
    throw geometry::UnsupportedShape("contact rendering supports plane, sphere, cylinder and box");
  const auto q = geometry::query_world(shape, device_pos);
  ContactResult r;
  r.normal = q.normal;
  r.surface_point = q.closest;
  r.penetration = std::max(0.0, -q.signed_distance);
  if (r.penetration > 0.0) r.normal_force = effective_stiffness(s, cfg) * r.penetration * q.normal;
  return r;
}

// Coulomb stick/slip on the god-object proxy. The tangential spring pulls the
// device back towards the proxy; the demanded force is
// tangential_spring·|tangential offset|. Inside the static cone the proxy
// holds; outside it the proxy is repositioned so the spring force equals
// the dynamic-friction magnitude.
inline HapticDeviceState friction_step(const HapticDeviceState& state, const Vec3& normal_force,
                                       double tangential_spring, const SurfaceParams& s) {
  const double fn = normal_force.norm();
  if (!(fn > 0.0)) throw HapticsError(HapticsErrorCode::NotInContact, "friction needs a non-zero normal force");
  const Vec3 n = normal_force / fn;

  HapticDeviceState out = state;
  const Vec3 offset = state.position - state.proxy;
  const Vec3 tangential = offset - n * n.dot(offset);
  const double stretch = tangential.norm();
  const double demanded = tangential_spring * stretch;

  if (demanded <= s.static_friction * fn) {
    out.sticking = true;
    out.tangential_force = -tangential_spring * tangential;
  } else {
    out.sticking = false;
    const Vec3 dir = tangential / stretch;
    const double slip_force = s.dynamic_friction * fn;
    out.proxy = state.proxy + dir * (stretch - slip_force / tangential_spring);
    out.tangential_force = -slip_force * dir;
  }
  out.output_force = normal_force + out.tangential_force;
  return out;
}

// One servo tick from a world-space device position: constrain, contact,
// friction, saturate. `tangential_spring` <= 0 selects the surface's effective
// stiffness.
inline HapticDeviceState world_tick(const HapticDeviceState& prev, const Vec3& world_pos, const PlacedShape& shape,
                                    const SurfaceParams& s, const HapticDeviceConfig& cfg,
                                    double tangential_spring = 0.0) {
  HapticDeviceState st = prev;
  st.position = constrain_state(world_pos, Vec3::Zero(), cfg).first;
  const ContactResult c = contact_force(st.position, shape, s, cfg);
  if (!c.in_contact() || c.normal_force.squaredNorm() == 0.0) {
    st.proxy = st.position;
    st.in_contact = false;
    st.sticking = false;
    st.tangential_force = Vec3::Zero();
    st.output_force = Vec3::Zero();
    return st;
  }
  if (!prev.in_contact) st.proxy = c.surface_point;
  const double kt = tangential_spring > 0.0 ? tangential_spring : effective_stiffness(s, cfg);
  st = friction_step(st, c.normal_force, kt, s);
  st.in_contact = true;
  st.output_force = constrain_state(st.position, st.output_force, cfg).second;
  return st;
}

// Same, starting from a raw device reading.
inline HapticDeviceState device_tick(const HapticDeviceState& prev, const Vec3& raw, const PlacedShape& shape,
                                     const SurfaceParams& s, const HapticDeviceConfig& cfg,
                                     double tangential_spring = 0.0) {
  HapticDeviceState st = world_tick(prev, calibrate_position(raw, cfg.calibration), shape, s, cfg, tangential_spring);
  st.raw_position = raw;
  return st;
}

}  // namespace hx3d::haptics
