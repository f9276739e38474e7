#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>

#include "hx3d/math.hpp"
#include "hx3d/x3d/types.hpp"

namespace hx3d::geometry {

// Half-space {p : normal·p <= offset}; normal is unit length.
struct Plane {
  Vec3 normal = Vec3::UnitY();
  double offset = 0.0;
};

struct Sphere {
  double radius = 1.0;
};

// Axis along local y, centred on the origin (X3D convention).
struct Cylinder {
  double radius = 1.0;
  double height = 2.0;
};

// Full edge lengths, centred on the origin.
struct Box {
  Vec3 size = Vec3::Constant(2.0);
};

// Segment from (0,-half_length,0) to (0,half_length,0) swept by a sphere.
struct Capsule {
  double radius = 0.5;
  double half_length = 0.5;
};

using Primitive = std::variant<Plane, Sphere, Cylinder, Box, Capsule>;

inline std::string_view primitive_name(const Primitive& p) {
  static constexpr std::string_view names[] = {"plane", "sphere", "cylinder", "box", "capsule"};
  return names[p.index()];
}

struct PlacedShape {
  Primitive shape;
  Mat4 pose = Mat4::Identity();  // local -> world, rigid
};

class UnsupportedShape : public std::invalid_argument {
 public:
  explicit UnsupportedShape(const std::string& what) : std::invalid_argument("UnsupportedShape: " + what) {}
};

inline bool dimensions_valid(const Primitive& p) {
  return std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Plane>) return std::abs(s.normal.norm() - 1.0) < 1e-9;
        else if constexpr (std::is_same_v<T, Sphere>) return s.radius > 0.0;
        else if constexpr (std::is_same_v<T, Cylinder>) return s.radius > 0.0 && s.height > 0.0;
        else if constexpr (std::is_same_v<T, Box>) return (s.size.array() > 0.0).all();
        else return s.radius > 0.0 && s.half_length >= 0.0;
      },
      p);
}

// Maps an X3D geometry node onto a primitive.
inline Primitive primitive_from_node(const x3d::Node& n) {
  switch (n.kind) {
    case x3d::NodeKind::Sphere:
      return Sphere{n.get<x3d::SFFloat>("radius").value};
    case x3d::NodeKind::Cylinder:
      return Cylinder{n.get<x3d::SFFloat>("radius").value, n.get<x3d::SFFloat>("height").value};
    case x3d::NodeKind::Box: {
      const auto& s = n.get<x3d::SFVec3f>("size").v;
      return Box{Vec3(s[0], s[1], s[2])};
    }
    default:
      throw UnsupportedShape(std::string(x3d::to_string(n.kind)) + " is not a geometry node");
  }
}

// Closest-surface query in the shape's local frame.
struct SurfaceQuery {
  double signed_distance = 0.0;  // < 0 inside
  Vec3 normal = Vec3::UnitY();   // outward at the closest surface point
  Vec3 closest = Vec3::Zero();   // closest surface point
};

namespace detail {

inline SurfaceQuery query_plane(const Plane& s, const Vec3& p) {
  const double sd = s.normal.dot(p) - s.offset;
  return {sd, s.normal, p - sd * s.normal};
}

inline SurfaceQuery query_sphere(const Sphere& s, const Vec3& p) {
  const double r = p.norm();
  const Vec3 n = r > 0.0 ? Vec3(p / r) : Vec3::UnitY();
  return {r - s.radius, n, s.radius * n};
}

inline SurfaceQuery query_box(const Box& s, const Vec3& p) {
  const Vec3 half = 0.5 * s.size;
  const Vec3 q = p.cwiseAbs() - half;
  if ((q.array() > 0.0).any()) {
    const Vec3 clamped = p.cwiseMax(-half).cwiseMin(half);
    const Vec3 diff = p - clamped;
    const double d = diff.norm();
    return {d, diff / d, clamped};
  }
  // Inside: nearest face wins; ties resolve to the lowest axis index.
  Eigen::Index axis = 0;
  q.maxCoeff(&axis);
  Vec3 n = Vec3::Zero();
  n[axis] = p[axis] >= 0.0 ? 1.0 : -1.0;
  Vec3 c = p;
  c[axis] = n[axis] * half[axis];
  return {q[axis], n, c};
}

inline SurfaceQuery query_cylinder(const Cylinder& s, const Vec3& p) {
  const double h = 0.5 * s.height;
  const double radial = std::hypot(p.x(), p.z());
  const Vec3 radial_dir = radial > 0.0 ? Vec3(p.x() / radial, 0.0, p.z() / radial) : Vec3::UnitX();
  const double dr = radial - s.radius;
  const double dy = std::abs(p.y()) - h;
  const double sy = p.y() >= 0.0 ? 1.0 : -1.0;
  if (dr > 0.0 && dy > 0.0) {
    const Vec3 rim = s.radius * radial_dir + Vec3(0.0, sy * h, 0.0);
    const Vec3 diff = p - rim;
    const double d = diff.norm();
    return {d, diff / d, rim};
  }
  if (dr > 0.0 || dy > 0.0) {
    if (dr >= dy) return {dr, radial_dir, Vec3(s.radius * radial_dir.x(), p.y(), s.radius * radial_dir.z())};
    return {dy, Vec3(0.0, sy, 0.0), Vec3(p.x(), sy * h, p.z())};
  }
  // Inside.
  if (dr >= dy) return {dr, radial_dir, Vec3(s.radius * radial_dir.x(), p.y(), s.radius * radial_dir.z())};
  return {dy, Vec3(0.0, sy, 0.0), Vec3(p.x(), sy * h, p.z())};
}

inline SurfaceQuery query_capsule(const Capsule& s, const Vec3& p) {
  const Vec3 axis_pt(0.0, std::clamp(p.y(), -s.half_length, s.half_length), 0.0);
  const Vec3 diff = p - axis_pt;
  const double d = diff.norm();
  const Vec3 n = d > 0.0 ? Vec3(diff / d) : Vec3::UnitX();
  return {d - s.radius, n, axis_pt + s.radius * n};
}

}  // namespace detail

inline SurfaceQuery query_local(const Primitive& shape, const Vec3& p) {
  return std::visit(
      [&](const auto& s) -> SurfaceQuery {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Plane>) return detail::query_plane(s, p);
        else if constexpr (std::is_same_v<T, Sphere>) return detail::query_sphere(s, p);
        else if constexpr (std::is_same_v<T, Cylinder>) return detail::query_cylinder(s, p);
        else if constexpr (std::is_same_v<T, Box>) return detail::query_box(s, p);
        else return detail::query_capsule(s, p);
      },
      shape);
}

// Same query for a world-space point; normal and closest point in world.
inline SurfaceQuery query_world(const PlacedShape& ps, const Vec3& p_world) {
  const Mat4 inv = rigid_inverse(ps.pose);
  SurfaceQuery q = query_local(ps.shape, transform_point(inv, p_world));
  q.normal = transform_direction(ps.pose, q.normal);
  q.closest = transform_point(ps.pose, q.closest);
  return q;
}

// Local-frame bounding box; nullopt for unbounded shapes.
inline std::optional<Aabb> local_bounds(const Primitive& shape) {
  return std::visit(
      [](const auto& s) -> std::optional<Aabb> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Plane>) return std::nullopt;
        else if constexpr (std::is_same_v<T, Sphere>) return Aabb{Vec3::Constant(-s.radius), Vec3::Constant(s.radius)};
        else if constexpr (std::is_same_v<T, Cylinder>)
          return Aabb{Vec3(-s.radius, -0.5 * s.height, -s.radius), Vec3(s.radius, 0.5 * s.height, s.radius)};
        else if constexpr (std::is_same_v<T, Box>) return Aabb{-0.5 * s.size, 0.5 * s.size};
        else
          return Aabb{Vec3(-s.radius, -s.half_length - s.radius, -s.radius),
                      Vec3(s.radius, s.half_length + s.radius, s.radius)};
      },
      shape);
}

inline double volume(const Primitive& shape) {
  return std::visit(
      [](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Plane>) return std::numeric_limits<double>::infinity();
        else if constexpr (std::is_same_v<T, Sphere>) return 4.0 / 3.0 * kPi * s.radius * s.radius * s.radius;
        else if constexpr (std::is_same_v<T, Cylinder>) return kPi * s.radius * s.radius * s.height;
        else if constexpr (std::is_same_v<T, Box>) return s.size.prod();
        else
          return kPi * s.radius * s.radius * (2.0 * s.half_length) + 4.0 / 3.0 * kPi * std::pow(s.radius, 3);
      },
      shape);
}

}  // namespace hx3d::geometry
