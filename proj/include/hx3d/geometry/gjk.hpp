#pragma once

#include <array>
#include <cmath>
#include <limits>

#include "hx3d/geometry/primitives.hpp"

namespace hx3d::geometry {

// Convex core + spherical margin. Spheres and capsules have a point/segment
// core; boxes and cylinders have zero margin.
struct SupportShape {
  Primitive shape;
  Mat4 pose = Mat4::Identity();

  double margin() const {
    if (const auto* s = std::get_if<Sphere>(&shape)) return s->radius;
    if (const auto* c = std::get_if<Capsule>(&shape)) return c->radius;
    return 0.0;
  }

  // Furthest core point along a world direction.
  Vec3 support(const Vec3& dir_world) const {
    const Mat3 rot = pose.block<3, 3>(0, 0);
    const Vec3 d = rot.transpose() * dir_world;
    auto sgn = [](double x) { return x >= 0.0 ? 1.0 : -1.0; };
    Vec3 local = std::visit(
        [&](const auto& s) -> Vec3 {
          using T = std::decay_t<decltype(s)>;
          if constexpr (std::is_same_v<T, Box>) {
            const Vec3 h = 0.5 * s.size;
            return Vec3(sgn(d.x()) * h.x(), sgn(d.y()) * h.y(), sgn(d.z()) * h.z());
          } else if constexpr (std::is_same_v<T, Cylinder>) {
            const double radial = std::hypot(d.x(), d.z());
            Vec3 p(0.0, sgn(d.y()) * 0.5 * s.height, 0.0);
            if (radial > 0.0) {
              p.x() = s.radius * d.x() / radial;
              p.z() = s.radius * d.z() / radial;
            }
            return p;
          } else if constexpr (std::is_same_v<T, Capsule>) {
            return Vec3(0.0, sgn(d.y()) * s.half_length, 0.0);
          } else if constexpr (std::is_same_v<T, Sphere>) {
            return Vec3::Zero();
          } else {
            throw UnsupportedShape("planes are unbounded and have no support mapping");
          }
        },
        shape);
    return rot * local + pose.block<3, 1>(0, 3);
  }
};

struct DistanceResult {
  double distance = 0.0;  // >= 0; 0 when the solids touch or overlap
  bool intersecting = false;
  Vec3 point_a = Vec3::Zero();  // closest points (meaningful when separated)
  Vec3 point_b = Vec3::Zero();
  int iterations = 0;
};

namespace detail {

struct SimplexVertex {
  Vec3 w;  // a - b
  Vec3 a;
  Vec3 b;
};

struct ClosestOnSimplex {
  Vec3 v = Vec3::Zero();
  std::array<double, 4> lambda{};
  unsigned mask = 0;
};

// Closest point of conv(vertices) to the origin by enumerating all faces of
// the (at most 4-point) simplex and keeping the best one whose barycentric
// weights are strictly positive.
inline ClosestOnSimplex closest_on_simplex(const std::array<SimplexVertex, 4>& s, int n) {
  ClosestOnSimplex best;
  double best_norm = std::numeric_limits<double>::infinity();
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    int idx[4];
    int k = 0;
    for (int i = 0; i < n; ++i)
      if (mask & (1u << i)) idx[k++] = i;
    std::array<double, 4> lam{};
    Vec3 v;
    if (k == 1) {
      lam[idx[0]] = 1.0;
      v = s[idx[0]].w;
    } else {
      const Vec3 p0 = s[idx[0]].w;
      Eigen::Matrix<double, 3, Eigen::Dynamic> e(3, k - 1);
      for (int j = 1; j < k; ++j) e.col(j - 1) = s[idx[j]].w - p0;
      const Eigen::MatrixXd g = e.transpose() * e;
      const Eigen::VectorXd rhs = -(e.transpose() * p0);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
      lu.setThreshold(1e-12);
      if (!lu.isInvertible()) continue;
      const Eigen::VectorXd mu = lu.solve(rhs);
      double l0 = 1.0;
      bool positive = true;
      for (int j = 1; j < k; ++j) {
        if (!(mu[j - 1] > 0.0)) positive = false;
        l0 -= mu[j - 1];
        lam[idx[j]] = mu[j - 1];
      }
      if (!(l0 > 0.0)) positive = false;
      if (!positive) continue;
      lam[idx[0]] = l0;
      v = p0 + e * mu;
    }
    const double nv = v.squaredNorm();
    if (nv < best_norm) {
      best_norm = nv;
      best.v = v;
      best.lambda = lam;
      best.mask = mask;
    }
  }
  return best;
}

}  // namespace detail

// Minimum distance between two convex solids (GJK on the cores, margins
// subtracted afterwards).
inline DistanceResult gjk_distance(const SupportShape& a, const SupportShape& b, double tolerance = 1e-12) {
  using detail::SimplexVertex;
  DistanceResult result;
  std::array<SimplexVertex, 4> simplex;
  int n = 0;

  auto make_vertex = [&](const Vec3& dir) {
    const Vec3 pa = a.support(-dir);
    const Vec3 pb = b.support(dir);
    return SimplexVertex{pa - pb, pa, pb};
  };

  Vec3 v = a.pose.block<3, 1>(0, 3) - b.pose.block<3, 1>(0, 3);
  if (v.squaredNorm() == 0.0) v = Vec3::UnitX();
  simplex[0] = make_vertex(v);
  v = simplex[0].w;
  n = 1;
  std::array<double, 4> lambda{1.0, 0.0, 0.0, 0.0};

  constexpr int kMaxIterations = 128;
  bool cores_overlap = false;
  int iter = 0;
  for (; iter < kMaxIterations; ++iter) {
    const double vv = v.squaredNorm();
    if (vv <= 1e-24) {
      cores_overlap = true;
      break;
    }
    const SimplexVertex w = make_vertex(v);
    // No further progress towards the origin.
    if (vv - v.dot(w.w) <= tolerance * vv) break;
    bool duplicate = false;
    for (int i = 0; i < n; ++i)
      if ((simplex[i].w - w.w).squaredNorm() <= 1e-30) duplicate = true;
    if (duplicate) break;
    simplex[n] = w;
    const auto closest = detail::closest_on_simplex(simplex, n + 1);
    // Numerically degenerate or not improving: keep the previous simplex.
    if (closest.mask == 0 || closest.v.squaredNorm() >= vv) break;
    ++n;
    std::array<SimplexVertex, 4> kept;
    std::array<double, 4> kept_lambda{};
    int m = 0;
    for (int i = 0; i < n; ++i)
      if (closest.mask & (1u << i)) {
        kept_lambda[m] = closest.lambda[i];
        kept[m++] = simplex[i];
      }
    simplex = kept;
    lambda = kept_lambda;
    n = m;
    v = closest.v;
    if (n == 4) {
      cores_overlap = true;
      break;
    }
  }
  result.iterations = iter;

  Vec3 pa = Vec3::Zero(), pb = Vec3::Zero();
  for (int i = 0; i < n; ++i) {
    pa += lambda[i] * simplex[i].a;
    pb += lambda[i] * simplex[i].b;
  }
  const double margins = a.margin() + b.margin();
  const double core_distance = cores_overlap ? 0.0 : v.norm();
  const double d = core_distance - margins;
  result.intersecting = cores_overlap || d <= 0.0;
  result.distance = result.intersecting ? 0.0 : d;
  if (!cores_overlap && core_distance > 0.0) {
    const Vec3 dir = (pb - pa) / core_distance;
    result.point_a = pa + a.margin() * dir;
    result.point_b = pb - b.margin() * dir;
  } else {
    result.point_a = pa;
    result.point_b = pb;
  }
  return result;
}

}  // namespace hx3d::geometry
