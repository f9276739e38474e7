#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

#include "hx3d/math.hpp"
#include "hx3d/x3d/types.hpp"

namespace hx3d::haptics {

enum class HapticsErrorCode { InvalidConfig, NotInContact };

class HapticsError : public std::runtime_error {
 public:
  HapticsError(HapticsErrorCode code, const std::string& what)
      : std::runtime_error((code == HapticsErrorCode::InvalidConfig ? "InvalidConfig: " : "NotInContact: ") + what),
        code_(code) {}
  HapticsErrorCode code() const noexcept { return code_; }

 private:
  HapticsErrorCode code_;
};

// Fixed servo tick of the force pipeline.
inline constexpr double kServoRateHz = 1000.0;
inline constexpr double kServoDt = 1.0 / kServoRateHz;

// Performance envelope of a simulated 3-DOF force-feedback device. Defaults
// are in the range of a desktop pen-type device.
struct HapticDeviceConfig {
  int dof = 3;
  Aabb workspace{Vec3(-0.2, -0.2, -0.2), Vec3(0.2, 0.2, 0.2)};
  double position_resolution = 5e-5;  // m
  double max_force = 3.3;              // N
  double max_stiffness = 1000.0;       // N/m
  Mat4 calibration = Mat4::Identity();
};

struct HapticDeviceState {
  Vec3 raw_position = Vec3::Zero();
  Vec3 position = Vec3::Zero();
  Vec3 proxy = Vec3::Zero();
  Vec3 output_force = Vec3::Zero();
  Vec3 tangential_force = Vec3::Zero();
  bool sticking = false;
  bool in_contact = false;
};

struct SurfaceParams {
  double stiffness = 500.0;  // N/m
  double static_friction = 0.0;
  double dynamic_friction = 0.0;
};

inline bool valid(const SurfaceParams& s) {
  return s.stiffness >= 0.0 && s.static_friction >= 0.0 && s.dynamic_friction >= 0.0;
}

inline SurfaceParams surface_from_node(const x3d::Node& n) {
  return {n.get<x3d::SFFloat>("stiffness").value, n.get<x3d::SFFloat>("staticFriction").value,
          n.get<x3d::SFFloat>("dynamicFriction").value};
}

inline Mat4 calibration_from_node(const x3d::Node& n) {
  const auto& m = n.get<x3d::SFMatrix4>("positionCalibration").m;
  Mat4 out;
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) out(r, c) = m[static_cast<std::size_t>(r * 4 + c)];
  return out;
}

inline void validate(const HapticDeviceConfig& cfg) {
  auto fail = [](const std::string& why) { throw HapticsError(HapticsErrorCode::InvalidConfig, why); };
  if (cfg.dof < 1 || cfg.dof > 6) fail("dof must be in [1, 6]");
  if (!(cfg.position_resolution > 0.0)) fail("position_resolution must be > 0");
  if (!(cfg.max_force > 0.0)) fail("max_force must be > 0");
  if (!(cfg.max_stiffness > 0.0)) fail("max_stiffness must be > 0");
  if (!cfg.workspace.valid()) fail("workspace min must be < max on every axis");
  if (!is_affine(cfg.calibration)) fail("calibration must be affine (bottom row 0 0 0 1)");
  for (int i = 0; i < 3; ++i) {
    const double first = std::ceil(cfg.workspace.min[i] / cfg.position_resolution) * cfg.position_resolution;
    if (first > cfg.workspace.max[i]) fail("workspace axis contains no resolution grid point");
  }
}

// Homogeneous transform of a raw device reading into world metres.
inline Vec3 calibrate_position(const Vec3& raw, const Mat4& calibration) {
  if (!is_affine(calibration)) throw HapticsError(HapticsErrorCode::InvalidConfig, "calibration must be affine");
  return transform_point(calibration, raw);
}

// Grid index of the nearest multiple of `step`; exact halves go away from zero.
inline double grid_index(double x, double step) {
  const double q = x / step;
  const double lower = std::floor(q);
  const double frac = q - lower;
  // Decimal inputs such as 0.0015/0.001 land within a few ulps of .5.
  if (std::abs(frac - 0.5) <= 1e-9) return x >= 0.0 ? lower + 1.0 : lower;
  return std::round(q);
}

inline double quantize(double x, double step) { return grid_index(x, step) * step; }

// Clamps the position into the workspace and onto the resolution grid, and
// saturates the force magnitude at max_force without changing its direction.
inline std::pair<Vec3, Vec3> constrain_state(const Vec3& pos, const Vec3& force, const HapticDeviceConfig& cfg) {
  Vec3 p = cfg.workspace.clamp(pos);
  const double step = cfg.position_resolution;
  for (int i = 0; i < 3; ++i) {
    double n = grid_index(p[i], step);
    if (n * step > cfg.workspace.max[i]) n -= 1.0;
    if (n * step < cfg.workspace.min[i]) n += 1.0;
    p[i] = n * step;
  }

  Vec3 f = force;
  const double mag = f.norm();
  if (mag > cfg.max_force) {
    f *= cfg.max_force / mag;
    // Guard the last ulp so the bound holds exactly.
    while (f.norm() > cfg.max_force) f *= (1.0 - 4.0 * std::numeric_limits<double>::epsilon());
  }
  return {p, f};
}

}  // namespace hx3d::haptics
