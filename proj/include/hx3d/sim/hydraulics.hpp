#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "hx3d/haptics/device.hpp"

namespace hx3d::hydraulics {

enum class HydraulicsErrorCode { NonPositiveArea, StrokeLimitExceeded, InvalidSystem };

class HydraulicsError : public std::runtime_error {
 public:
  HydraulicsError(HydraulicsErrorCode code, const std::string& what)
      : std::runtime_error(std::string(code == HydraulicsErrorCode::NonPositiveArea       ? "NonPositiveArea: "
                                       : code == HydraulicsErrorCode::StrokeLimitExceeded ? "StrokeLimitExceeded: "
                                                                                          : "InvalidSystem: ") +
                           what),
        code_(code) {}
  HydraulicsErrorCode code() const noexcept { return code_; }

 private:
  HydraulicsErrorCode code_;
};

inline constexpr double kStandardGravity = 9.81;

// Two-piston closed circuit. Positions are displacements from rest, + means
// the input piston is pushed in / the output piston has risen.
struct HydraulicSystem {
  double area_in = 0.001;  // m^2
  double area_out = 0.01;  // m^2
  double piston_in_pos = 0.0;
  double piston_out_pos = 0.0;
  double load_mass = 0.0;  // kg on the output piston
  double fluid_volume = 1e-3;
  double stroke_min = -0.1;
  double stroke_max = 0.1;
  bool operator==(const HydraulicSystem&) const = default;
};

inline void validate(const HydraulicSystem& s) {
  if (!(s.area_in > 0.0) || !(s.area_out > 0.0) || !std::isfinite(s.area_in) || !std::isfinite(s.area_out))
    throw HydraulicsError(HydraulicsErrorCode::NonPositiveArea, "piston areas must be positive");
  if (!(s.load_mass >= 0.0) || !(s.fluid_volume > 0.0) || !(s.stroke_min <= 0.0 && s.stroke_max >= 0.0))
    throw HydraulicsError(HydraulicsErrorCode::InvalidSystem, "load, volume or stroke range out of bounds");
}

inline double pressure(double force, double area) {
  if (!(area > 0.0)) throw HydraulicsError(HydraulicsErrorCode::NonPositiveArea, "area must be positive");
  return force / area;
}

// Equal pressure on both pistons.
inline double transmit_force(const HydraulicSystem& s, double input_force) {
  validate(s);
  return input_force * s.area_out / s.area_in;
}

// Output displacement for an input stroke (equal displaced volume).
inline double output_displacement(const HydraulicSystem& s, double input_displacement) {
  return input_displacement * s.area_in / s.area_out;
}

inline HydraulicSystem lift_step(const HydraulicSystem& s, double input_displacement) {
  validate(s);
  if (!std::isfinite(input_displacement)) throw HydraulicsError(HydraulicsErrorCode::InvalidSystem, "displacement must be finite");
  HydraulicSystem out = s;
  out.piston_in_pos = s.piston_in_pos + input_displacement;
  out.piston_out_pos = s.piston_out_pos + output_displacement(s, input_displacement);
  auto outside = [&](double x) { return x < s.stroke_min || x > s.stroke_max; };
  if (outside(out.piston_in_pos) || outside(out.piston_out_pos))
    throw HydraulicsError(HydraulicsErrorCode::StrokeLimitExceeded, "piston would leave its stroke range");
  return out;
}

inline double lifted_height(const HydraulicSystem& s) { return s.piston_out_pos; }

struct Resistance {
  double required = 0.0;          // N, force needed to hold the load
  Vec3 delivered = Vec3::Zero();  // N, what the device renders after clamping
};

// The stylus is bound to the input piston; `push_axis` is the direction the
// user pushes it in, and the rendered force opposes it.
inline Resistance haptic_resistance(const HydraulicSystem& s, double gravity, const haptics::HapticDeviceConfig& cfg,
                                    const Vec3& device_pos = Vec3::Zero(), const Vec3& push_axis = -Vec3::UnitY()) {
  validate(s);
  Resistance r;
  r.required = s.load_mass * gravity * s.area_in / s.area_out;
  r.delivered = haptics::constrain_state(device_pos, -push_axis.normalized() * r.required, cfg).second;
  return r;
}

}  // namespace hx3d::hydraulics
