#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "hx3d/x3d/types.hpp"

namespace hx3d::linac {

enum class LinacErrorCode { UnknownAxis, InvalidValue, InvalidGeometry, InvalidPlan, NotFound, ParseFailed, DirectoryUnreadable };

inline std::string_view to_string(LinacErrorCode c) {
  switch (c) {
    case LinacErrorCode::UnknownAxis: return "UnknownAxis";
    case LinacErrorCode::InvalidValue: return "InvalidValue";
    case LinacErrorCode::InvalidGeometry: return "InvalidGeometry";
    case LinacErrorCode::InvalidPlan: return "InvalidPlan";
    case LinacErrorCode::NotFound: return "NotFound";
    case LinacErrorCode::ParseFailed: return "ParseFailed";
    case LinacErrorCode::DirectoryUnreadable: return "DirectoryUnreadable";
  }
  return "?";
}

class LinacError : public std::runtime_error {
 public:
  LinacError(LinacErrorCode code, const std::string& what, std::vector<x3d::Diagnostic> diags = {})
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), diagnostics_(std::move(diags)) {}
  LinacErrorCode code() const noexcept { return code_; }
  const std::vector<x3d::Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

 private:
  LinacErrorCode code_;
  std::vector<x3d::Diagnostic> diagnostics_;
};

enum class Axis { Gantry, Collimator, CouchRotation, CouchVertical, CouchLongitudinal, CouchLateral };

inline constexpr std::array<Axis, 6> kAllAxes{Axis::Gantry,        Axis::Collimator,        Axis::CouchRotation,
                                               Axis::CouchVertical, Axis::CouchLongitudinal, Axis::CouchLateral};

inline std::string_view to_string(Axis a) {
  switch (a) {
    case Axis::Gantry: return "gantry";
    case Axis::Collimator: return "collimator";
    case Axis::CouchRotation: return "couch_rotation";
    case Axis::CouchVertical: return "couch_vertical";
    case Axis::CouchLongitudinal: return "couch_longitudinal";
    case Axis::CouchLateral: return "couch_lateral";
  }
  return "?";
}

inline Axis axis_from_string(std::string_view name) {
  for (Axis a : kAllAxes)
    if (to_string(a) == name) return a;
  throw LinacError(LinacErrorCode::UnknownAxis, "unknown axis '" + std::string(name) + "'");
}

inline bool is_rotational(Axis a) { return a == Axis::Gantry || a == Axis::Collimator || a == Axis::CouchRotation; }

struct AxisLimits {
  double min = 0.0;
  double max = 0.0;
};

// Translational travel. Fixture values, not vendor figures.
struct LinacLimits {
  AxisLimits vertical{0.0, 0.5};  // + = couch top lowered below isocentre
  AxisLimits longitudinal{-0.3, 0.3};
  AxisLimits lateral{-0.2, 0.2};
};

struct LinacConfiguration {
  double gantry_deg = 0.0;
  double collimator_deg = 0.0;
  double couch_rotation_deg = 0.0;
  double couch_vertical_m = 0.0;
  double couch_longitudinal_m = 0.0;
  double couch_lateral_m = 0.0;
  LinacLimits limits;

  double get(Axis a) const {
    switch (a) {
      case Axis::Gantry: return gantry_deg;
      case Axis::Collimator: return collimator_deg;
      case Axis::CouchRotation: return couch_rotation_deg;
      case Axis::CouchVertical: return couch_vertical_m;
      case Axis::CouchLongitudinal: return couch_longitudinal_m;
      case Axis::CouchLateral: return couch_lateral_m;
    }
    return 0.0;
  }

  AxisLimits limits_of(Axis a) const {
    switch (a) {
      case Axis::CouchVertical: return limits.vertical;
      case Axis::CouchLongitudinal: return limits.longitudinal;
      case Axis::CouchLateral: return limits.lateral;
      default: return {0.0, 360.0};
    }
  }

  bool operator==(const LinacConfiguration& o) const {
    for (Axis a : kAllAxes)
      if (get(a) != o.get(a)) return false;
    return true;
  }
};

// Into [0, 360). fmod is exact, so in-range values come back unchanged.
inline double wrap_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r = 0.0;  // -tiny + 360 rounds up to 360
  return r;
}

inline LinacConfiguration set_axis(const LinacConfiguration& cfg, Axis axis, double value) {
  if (!std::isfinite(value)) throw LinacError(LinacErrorCode::InvalidValue, std::string(to_string(axis)) + " must be finite");
  LinacConfiguration out = cfg;
  auto clamp_to = [&](const AxisLimits& l) { return std::min(std::max(value, l.min), l.max); };
  switch (axis) {
    case Axis::Gantry: out.gantry_deg = wrap_degrees(value); break;
    case Axis::Collimator: out.collimator_deg = wrap_degrees(value); break;
    case Axis::CouchRotation: out.couch_rotation_deg = wrap_degrees(value); break;
    case Axis::CouchVertical: out.couch_vertical_m = clamp_to(cfg.limits.vertical); break;
    case Axis::CouchLongitudinal: out.couch_longitudinal_m = clamp_to(cfg.limits.longitudinal); break;
    case Axis::CouchLateral: out.couch_lateral_m = clamp_to(cfg.limits.lateral); break;
  }
  return out;
}

inline LinacConfiguration set_axis(const LinacConfiguration& cfg, std::string_view axis, double value) {
  return set_axis(cfg, axis_from_string(axis), value);
}

inline bool in_range(const LinacConfiguration& cfg) {
  for (Axis a : kAllAxes) {
    const double v = cfg.get(a);
    const AxisLimits l = cfg.limits_of(a);
    if (!std::isfinite(v)) return false;
    if (is_rotational(a) ? !(v >= 0.0 && v < 360.0) : !(v >= l.min && v <= l.max)) return false;
  }
  return true;
}

}  // namespace hx3d::linac
