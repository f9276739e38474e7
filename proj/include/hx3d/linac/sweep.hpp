#pragma once

#include <cmath>
#include <vector>

#include "hx3d/linac/geometry.hpp"

namespace hx3d::linac {

struct CouchPose {
  double rotation_deg = 0.0;
  double vertical_m = 0.0;
  double longitudinal_m = 0.0;
  double lateral_m = 0.0;
};

struct ControlPoint {
  double gantry_deg = 0.0;
  double collimator_deg = 0.0;
  CouchPose couch;
};

// With `arc` set, consecutive control points are joined by a gantry arc
// sampled every `step_deg` in the direction of increasing angle; collimator
// and couch are interpolated linearly along it.
struct BeamArrangement {
  std::vector<ControlPoint> points;
  bool arc = false;
  double step_deg = 1.0;
};

struct SweepEntry {
  std::size_t control_point = 0;  // index of the control point the sample starts from
  double gantry_deg = 0.0;        // unwrapped arc angle for arc samples
  CollisionReport report;
};

struct AngleInterval {
  double from_deg = 0.0;
  double to_deg = 0.0;
  bool operator==(const AngleInterval&) const = default;
};

inline LinacConfiguration configuration_at(const ControlPoint& p, const LinacLimits& limits) {
  LinacConfiguration c;
  c.limits = limits;
  c = set_axis(c, Axis::Gantry, p.gantry_deg);
  c = set_axis(c, Axis::Collimator, p.collimator_deg);
  c = set_axis(c, Axis::CouchRotation, p.couch.rotation_deg);
  c = set_axis(c, Axis::CouchVertical, p.couch.vertical_m);
  c = set_axis(c, Axis::CouchLongitudinal, p.couch.longitudinal_m);
  c = set_axis(c, Axis::CouchLateral, p.couch.lateral_m);
  return c;
}

inline void validate(const BeamArrangement& plan) {
  if (plan.arc && !(plan.step_deg > 0.0 && std::isfinite(plan.step_deg)))
    throw LinacError(LinacErrorCode::InvalidPlan, "arc step must be positive");
}

// Expanded sample list (control point index, unwrapped gantry angle, pose).
inline std::vector<std::pair<std::size_t, ControlPoint>> expand(const BeamArrangement& plan) {
  validate(plan);
  std::vector<std::pair<std::size_t, ControlPoint>> out;
  if (!plan.arc || plan.points.size() < 2) {
    for (std::size_t i = 0; i < plan.points.size(); ++i) out.emplace_back(i, plan.points[i]);
    return out;
  }
  double start = plan.points.front().gantry_deg;  // unwrapped angle of point i
  for (std::size_t i = 0; i + 1 < plan.points.size(); ++i) {
    const ControlPoint& a = plan.points[i];
    const ControlPoint& b = plan.points[i + 1];
    double span = b.gantry_deg - a.gantry_deg;
    if (span < 0.0) span += 360.0 * std::ceil(-span / 360.0);
    // Integer sample count so accumulated rounding cannot add or drop a sample.
    const auto n = static_cast<std::size_t>(std::floor(span / plan.step_deg + 1e-9));
    const std::size_t first = i == 0 ? 0 : 1;  // shared endpoints appear once
    for (std::size_t k = first; k <= n; ++k) {
      const double t = span > 0.0 ? (k * plan.step_deg) / span : 0.0;
      ControlPoint p;
      p.gantry_deg = start + k * plan.step_deg;
      p.collimator_deg = a.collimator_deg + t * (b.collimator_deg - a.collimator_deg);
      p.couch.rotation_deg = a.couch.rotation_deg + t * (b.couch.rotation_deg - a.couch.rotation_deg);
      p.couch.vertical_m = a.couch.vertical_m + t * (b.couch.vertical_m - a.couch.vertical_m);
      p.couch.longitudinal_m = a.couch.longitudinal_m + t * (b.couch.longitudinal_m - a.couch.longitudinal_m);
      p.couch.lateral_m = a.couch.lateral_m + t * (b.couch.lateral_m - a.couch.lateral_m);
      out.emplace_back(i, p);
    }
    // Arc end not on the step grid: still check the exact end point.
    if (std::abs(n * plan.step_deg - span) > 1e-9) {
      ControlPoint p = b;
      p.gantry_deg = start + span;
      out.emplace_back(i, p);
    }
    start += span;
  }
  return out;
}

inline std::vector<SweepEntry> sweep_beam_arrangement(const BeamArrangement& plan, const LinacGeometry& geo,
                                                      double clearance = 0.0, const LinacLimits& limits = {}) {
  std::vector<SweepEntry> out;
  for (const auto& [index, point] : expand(plan))
    out.push_back({index, point.gantry_deg, check_collision(configuration_at(point, limits), geo, clearance)});
  return out;
}

// Runs of consecutive colliding samples as closed gantry-angle intervals.
inline std::vector<AngleInterval> colliding_intervals(const std::vector<SweepEntry>& entries) {
  std::vector<AngleInterval> out;
  bool open = false;
  for (const auto& e : entries) {
    if (e.report.colliding) {
      if (!open) out.push_back({e.gantry_deg, e.gantry_deg});
      out.back().to_deg = e.gantry_deg;
      open = true;
    } else {
      open = false;
    }
  }
  return out;
}

}  // namespace hx3d::linac
