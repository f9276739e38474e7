#pragma once

#include <cmath>
#include <numeric>
#include <optional>
#include <string_view>
#include <vector>

#include "hx3d/haptics/contact.hpp"

namespace hx3d::haptics {

enum class ProbeKind { Stroke, Press, ContourFollow, Enclosure };

inline std::string_view to_string(ProbeKind k) {
  switch (k) {
    case ProbeKind::Stroke: return "stroke";
    case ProbeKind::Press: return "press";
    case ProbeKind::ContourFollow: return "contour";
    case ProbeKind::Enclosure: return "enclosure";
  }
  return "?";
}

inline std::optional<ProbeKind> probe_kind_from_string(std::string_view s) {
  for (ProbeKind k : {ProbeKind::Stroke, ProbeKind::Press, ProbeKind::ContourFollow, ProbeKind::Enclosure})
    if (to_string(k) == s) return k;
  return std::nullopt;
}

struct ProbeReport {
  ProbeKind kind = ProbeKind::Press;
  std::vector<double> tangential_forces;  // Stroke: |F_t| per tick
  double roughness = 0.0;                 // Stroke: variance of tangential_forces
  double firmness = 0.0;                  // Press: fitted dF/dd, N/m
  std::vector<Vec3> contour;              // ContourFollow: ordered surface points
  double volume = 0.0;                    // Enclosure: m^3
  std::size_t ticks = 0;                  // servo ticks driven through the pipeline
};

struct ProbeSettings {
  std::size_t press_ticks = 400;
  std::size_t stroke_ticks = 1000;
  std::size_t contour_samples = 64;
  std::size_t enclosure_columns = 40;  // per horizontal axis
  double tangential_spring = 0.0;      // <= 0: effective surface stiffness
};

namespace detail {

// Local-frame anchor on the "top" of a primitive: surface point, outward
// normal, and a unit tangent.
struct Anchor {
  Vec3 point;
  Vec3 normal;
  Vec3 tangent;
};

inline Anchor local_anchor(const geometry::Primitive& p) {
  using namespace geometry;
  if (const auto* pl = std::get_if<Plane>(&p)) {
    Vec3 t = pl->normal.unitOrthogonal();
    return {pl->normal * pl->offset, pl->normal, t};
  }
  if (const auto* s = std::get_if<Sphere>(&p)) return {Vec3(0, s->radius, 0), Vec3::UnitY(), Vec3::UnitX()};
  if (const auto* c = std::get_if<Cylinder>(&p)) return {Vec3(0, 0.5 * c->height, 0), Vec3::UnitY(), Vec3::UnitX()};
  if (const auto* b = std::get_if<Box>(&p)) return {Vec3(0, 0.5 * b->size.y(), 0), Vec3::UnitY(), Vec3::UnitX()};
  throw UnsupportedShape("probes support plane, sphere, cylinder and box");
}

// Stroke path in local coordinates at a fixed depth below the surface,
// parameter u in [0, 1].
inline Vec3 local_stroke_point(const geometry::Primitive& p, double u, double depth) {
  using namespace geometry;
  const double s = 2.0 * u - 1.0;  // [-1, 1]
  if (const auto* pl = std::get_if<Plane>(&p)) {
    const Anchor a = local_anchor(p);
    return a.point + a.tangent * (0.01 * s) - pl->normal * depth;
  }
  if (const auto* sp = std::get_if<Sphere>(&p)) {
    const double theta = 0.3 * s;
    return (sp->radius - depth) * Vec3(std::sin(theta), std::cos(theta), 0.0);
  }
  if (const auto* c = std::get_if<Cylinder>(&p)) return Vec3(0.8 * c->radius * s, 0.5 * c->height - depth, 0.0);
  const auto& b = std::get<Box>(p);
  return Vec3(0.4 * b.size.x() * s, 0.5 * b.size.y() - depth, 0.0);
}

inline double variance(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double acc = 0.0;
  for (double x : xs) acc += (x - mean) * (x - mean);
  return acc / static_cast<double>(xs.size());
}

// Least-squares slope of y against x.
inline double fitted_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

// Moves the device from `outside` towards `inside` until first contact, then
// bisects down to the resolution grid. Returns the touch point on the surface
// or nullopt if the segment never makes contact.
inline std::optional<Vec3> first_touch(const Vec3& outside, const Vec3& inside, const PlacedShape& shape,
                                       const SurfaceParams& s, const HapticDeviceConfig& cfg, std::size_t& ticks) {
  constexpr int kCoarseSteps = 200;
  auto probe = [&](const Vec3& p) {
    ++ticks;
    const Vec3 q = constrain_state(p, Vec3::Zero(), cfg).first;
    return std::pair{q, contact_force(q, shape, s, cfg)};
  };
  Vec3 lo = outside;
  for (int i = 1; i <= kCoarseSteps; ++i) {
    const Vec3 p = outside + (inside - outside) * (static_cast<double>(i) / kCoarseSteps);
    auto [q, c] = probe(p);
    if (c.in_contact()) {
      Vec3 hi = p;
      for (int b = 0; b < 40 && (hi - lo).norm() > 0.25 * cfg.position_resolution; ++b) {
        const Vec3 mid = 0.5 * (lo + hi);
        if (probe(mid).second.in_contact()) hi = mid;
        else lo = mid;
      }
      auto [qh, ch] = probe(hi);
      if (!ch.in_contact()) return std::nullopt;
      return Vec3(qh + ch.normal * ch.penetration);
    }
    lo = p;
  }
  return std::nullopt;
}

inline Aabb world_bounds(const PlacedShape& shape) {
  const auto local = geometry::local_bounds(shape.shape);
  if (!local) throw geometry::UnsupportedShape("enclosure needs a bounded shape");
  Aabb out{Vec3::Constant(std::numeric_limits<double>::infinity()),
           Vec3::Constant(-std::numeric_limits<double>::infinity())};
  for (int i = 0; i < 8; ++i) {
    const Vec3 corner((i & 1) ? local->max.x() : local->min.x(), (i & 2) ? local->max.y() : local->min.y(),
                      (i & 4) ? local->max.z() : local->min.z());
    const Vec3 w = transform_point(shape.pose, corner);
    out.min = out.min.cwiseMin(w);
    out.max = out.max.cwiseMax(w);
  }
  return out;
}

}  // namespace detail

// Runs one of the four scripted exploration procedures through the force
// pipeline and summarizes what it felt.
inline ProbeReport exploration_probe(ProbeKind kind, const PlacedShape& shape, const SurfaceParams& s,
                                     const HapticDeviceConfig& cfg, const ProbeSettings& settings = {}) {
  if (std::holds_alternative<geometry::Capsule>(shape.shape))
    throw geometry::UnsupportedShape("probes support plane, sphere, cylinder and box");
  ProbeReport report;
  report.kind = kind;
  const double k = effective_stiffness(s, cfg);

  switch (kind) {
    case ProbeKind::Press: {
      const auto a = detail::local_anchor(shape.shape);
      const Vec3 top = transform_point(shape.pose, a.point);
      const Vec3 n = transform_direction(shape.pose, a.normal);
      // Stay below saturation so the slope is the surface stiffness.
      const double max_depth = k > 0.0 ? std::min(0.005, 0.8 * cfg.max_force / k) : 0.005;
      const double start = 0.002;
      std::vector<double> depth, force;
      HapticDeviceState st;
      for (std::size_t i = 0; i <= settings.press_ticks; ++i) {
        const double t = static_cast<double>(i) / static_cast<double>(settings.press_ticks);
        const Vec3 p = top + n * (start - (start + max_depth) * t);
        st = world_tick(st, p, shape, s, cfg, settings.tangential_spring);
        ++report.ticks;
        const ContactResult c = contact_force(st.position, shape, s, cfg);
        if (c.in_contact()) {
          depth.push_back(c.penetration);
          force.push_back(st.output_force.dot(c.normal));
        }
      }
      report.firmness = depth.size() >= 2 ? detail::fitted_slope(depth, force) : 0.0;
      break;
    }
    case ProbeKind::Stroke: {
      const double depth = k > 0.0 ? std::min(0.001, 0.5 * cfg.max_force / k) : 0.001;
      HapticDeviceState st;
      for (std::size_t i = 0; i <= settings.stroke_ticks; ++i) {
        const double u = static_cast<double>(i) / static_cast<double>(settings.stroke_ticks);
        const Vec3 p = transform_point(shape.pose, detail::local_stroke_point(shape.shape, u, depth));
        st = world_tick(st, p, shape, s, cfg, settings.tangential_spring);
        ++report.ticks;
        if (st.in_contact) report.tangential_forces.push_back(st.tangential_force.norm());
      }
      report.roughness = detail::variance(report.tangential_forces);
      break;
    }
    case ProbeKind::ContourFollow: {
      std::size_t ticks = 0;
      if (const auto* pl = std::get_if<geometry::Plane>(&shape.shape)) {
        const auto a = detail::local_anchor(shape.shape);
        for (std::size_t i = 0; i < settings.contour_samples; ++i) {
          const double s01 = static_cast<double>(i) / static_cast<double>(settings.contour_samples - 1);
          const Vec3 base = a.point + a.tangent * (0.1 * (s01 - 0.5));
          const Vec3 from = transform_point(shape.pose, base + pl->normal * 0.05);
          const Vec3 to = transform_point(shape.pose, base - pl->normal * 0.05);
          if (auto hit = detail::first_touch(from, to, shape, s, cfg, ticks)) report.contour.push_back(*hit);
        }
      } else {
        const auto b = *geometry::local_bounds(shape.shape);
        const double reach = 1.5 * std::max(b.max.cwiseAbs().maxCoeff(), b.min.cwiseAbs().maxCoeff());
        for (std::size_t i = 0; i < settings.contour_samples; ++i) {
          const double theta = 2.0 * kPi * static_cast<double>(i) / static_cast<double>(settings.contour_samples);
          const Vec3 dir(std::cos(theta), std::sin(theta), 0.0);
          const Vec3 from = transform_point(shape.pose, dir * reach);
          const Vec3 to = transform_point(shape.pose, Vec3::Zero());
          if (auto hit = detail::first_touch(from, to, shape, s, cfg, ticks)) report.contour.push_back(*hit);
        }
      }
      report.ticks = ticks;
      break;
    }
    case ProbeKind::Enclosure: {
      const Aabb box = detail::world_bounds(shape);
      const std::size_t g = settings.enclosure_columns;
      const Vec3 span = box.max - box.min;
      const double dx = span.x() / static_cast<double>(g);
      const double dz = span.z() / static_cast<double>(g);
      const double margin = 0.1 * span.y() + 4.0 * cfg.position_resolution;
      std::size_t ticks = 0;
      double vol = 0.0;
      for (std::size_t i = 0; i < g; ++i) {
        for (std::size_t j = 0; j < g; ++j) {
          const double x = box.min.x() + (static_cast<double>(i) + 0.5) * dx;
          const double z = box.min.z() + (static_cast<double>(j) + 0.5) * dz;
          const Vec3 above(x, box.max.y() + margin, z);
          const Vec3 below(x, box.min.y() - margin, z);
          const auto top = detail::first_touch(above, below, shape, s, cfg, ticks);
          if (!top) continue;
          const auto bottom = detail::first_touch(below, above, shape, s, cfg, ticks);
          if (!bottom) continue;
          vol += std::max(0.0, top->y() - bottom->y()) * dx * dz;
        }
      }
      report.volume = vol;
      report.ticks = ticks;
      break;
    }
  }
  return report;
}

}  // namespace hx3d::haptics
