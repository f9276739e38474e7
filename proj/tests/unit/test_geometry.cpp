#include <gtest/gtest.h>

#include <random>

#include "hx3d/geometry/gjk.hpp"

using namespace hx3d;
using namespace hx3d::geometry;

namespace {

Mat4 at(const Vec3& t, const Vec3& axis = Vec3::UnitX(), double angle = 0.0) {
  return translation_matrix(t) * rotation_matrix(axis, angle);
}

// Brute-force solid-to-solid distance: dense surface points of A against the
// exact signed-distance query of B. Slow, independent of GJK.
double sampled_distance(const SupportShape& a, const SupportShape& b, int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < n; ++i) {
    Vec3 d(g(rng), g(rng), g(rng));
    d.normalize();
    // Support point of A plus margin is a boundary point of A.
    const Vec3 p = a.support(d) + a.margin() * d;
    best = std::min(best, query_world(PlacedShape{b.shape, b.pose}, p).signed_distance);
  }
  return best;
}

}  // namespace

TEST(SurfaceQuery, SphereBoxCylinderCapsule) {
  EXPECT_DOUBLE_EQ(query_local(Sphere{1.0}, Vec3(0, 2, 0)).signed_distance, 1.0);
  EXPECT_DOUBLE_EQ(query_local(Sphere{1.0}, Vec3(0, 0.25, 0)).signed_distance, -0.75);

  const Box box{Vec3(2, 4, 6)};
  EXPECT_DOUBLE_EQ(query_local(box, Vec3(3, 0, 0)).signed_distance, 2.0);
  EXPECT_DOUBLE_EQ(query_local(box, Vec3(0, 1.5, 0)).signed_distance, -0.5);
  EXPECT_EQ(query_local(box, Vec3(0, 1.5, 0)).normal, Vec3(0, 1, 0));
  EXPECT_DOUBLE_EQ(query_local(box, Vec3(2, 3, 0)).signed_distance, std::sqrt(2.0));

  const Cylinder cyl{0.5, 2.0};
  EXPECT_DOUBLE_EQ(query_local(cyl, Vec3(0, 1.25, 0)).signed_distance, 0.25);
  EXPECT_DOUBLE_EQ(query_local(cyl, Vec3(1.0, 0, 0)).signed_distance, 0.5);
  EXPECT_DOUBLE_EQ(query_local(cyl, Vec3(0.25, 0.9, 0)).signed_distance, -0.1);
  EXPECT_DOUBLE_EQ(query_local(cyl, Vec3(0, 0, 0)).signed_distance, -0.5);
  EXPECT_DOUBLE_EQ(query_local(cyl, Vec3(3.5, 5.0, 0)).signed_distance, 5.0);

  EXPECT_DOUBLE_EQ(query_local(Capsule{0.1, 1.0}, Vec3(0, 1.5, 0)).signed_distance, 0.4);
  EXPECT_DOUBLE_EQ(query_local(Capsule{0.1, 1.0}, Vec3(0.3, 0.2, 0)).signed_distance, 0.2);
}

TEST(SurfaceQuery, WorldFrame) {
  const PlacedShape ps{Box{Vec3(1, 1, 1)}, at(Vec3(0, 0, 1), Vec3::UnitZ(), kPi / 4)};
  const auto q = query_world(ps, Vec3(0, 0, 2));
  EXPECT_NEAR(q.signed_distance, 0.5, 1e-12);
  EXPECT_TRUE(q.normal.isApprox(Vec3(0, 0, 1), 1e-12));
}

TEST(Gjk, SphereSphere) {
  const SupportShape a{Sphere{0.5}, at(Vec3(0, 0, 0))};
  const SupportShape b{Sphere{0.25}, at(Vec3(2, 0, 0))};
  const auto r = gjk_distance(a, b);
  EXPECT_NEAR(r.distance, 1.25, 1e-12);
  EXPECT_FALSE(r.intersecting);
  EXPECT_TRUE(r.point_a.isApprox(Vec3(0.5, 0, 0), 1e-12));
  const SupportShape c{Sphere{0.25}, at(Vec3(0.6, 0, 0))};
  EXPECT_TRUE(gjk_distance(a, c).intersecting);
}

TEST(Gjk, BoxBoxAxisAligned) {
  const SupportShape a{Box{Vec3(1, 1, 1)}, at(Vec3(0, 0, 0))};
  const SupportShape b{Box{Vec3(1, 1, 1)}, at(Vec3(2, 3, 0))};
  // Gap 1 in x, 2 in y.
  EXPECT_NEAR(gjk_distance(a, b).distance, std::sqrt(5.0), 1e-10);
  const SupportShape c{Box{Vec3(1, 1, 1)}, at(Vec3(0.9, 0.2, 0.1))};
  EXPECT_TRUE(gjk_distance(a, c).intersecting);
  // Face contact counts as touching.
  const SupportShape d{Box{Vec3(1, 1, 1)}, at(Vec3(1.0, 0, 0))};
  EXPECT_NEAR(gjk_distance(a, d).distance, 0.0, 1e-12);
}

TEST(Gjk, CapsuleCapsuleParallel) {
  const SupportShape a{Capsule{0.1, 1.0}, at(Vec3(0, 0, 0))};
  const SupportShape b{Capsule{0.2, 1.0}, at(Vec3(1, 0.5, 0))};
  EXPECT_NEAR(gjk_distance(a, b).distance, 0.7, 1e-10);
}

TEST(Gjk, CylinderAboveBox) {
  // Cylinder bottom cap at y=0.6, box top at y=0.3.
  const SupportShape cyl{Cylinder{0.3, 0.4}, at(Vec3(0.1, 0.8, 0))};
  const SupportShape box{Box{Vec3(1, 0.2, 1)}, at(Vec3(0, 0.2, 0))};
  EXPECT_NEAR(gjk_distance(cyl, box).distance, 0.3, 1e-10);
}

TEST(Gjk, CylinderEdgeToBoxEdge) {
  // Cylinder tilted about z; nearest feature is a rim point.
  const SupportShape cyl{Cylinder{0.2, 0.4}, at(Vec3(0, 1, 0), Vec3::UnitZ(), 0.3)};
  const SupportShape box{Box{Vec3(2, 0.2, 2)}, at(Vec3(0, 0, 0))};
  // Lowest rim point: centre.y - (h/2)cos(a) - r sin(a).
  const double expected = 1.0 - 0.2 * std::cos(0.3) - 0.2 * std::sin(0.3) - 0.1;
  EXPECT_NEAR(gjk_distance(cyl, box).distance, expected, 1e-8);
}

TEST(Gjk, SymmetricUnderSwap) {
  const SupportShape a{Cylinder{0.3, 0.5}, at(Vec3(0.2, 1, 0.3), Vec3(1, 2, 3), 0.7)};
  const SupportShape b{Box{Vec3(0.5, 0.4, 0.3)}, at(Vec3(-0.1, 0, 0), Vec3(0, 1, 1), 1.1)};
  EXPECT_NEAR(gjk_distance(a, b).distance, gjk_distance(b, a).distance, 1e-9);
}

// Random convex pairs against the sampled oracle: the oracle never goes below
// the true distance (boundary points of A), and converges from above.
TEST(Gjk, AgreesWithSampledOracle) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  std::uniform_real_distribution<double> size(0.1, 0.6);
  auto random_shape = [&](int kind) -> Primitive {
    switch (kind % 4) {
      case 0: return Box{Vec3(size(rng), size(rng), size(rng))};
      case 1: return Cylinder{size(rng) * 0.5, size(rng)};
      case 2: return Capsule{size(rng) * 0.5, size(rng) * 0.5};
      default: return Sphere{size(rng) * 0.5};
    }
  };
  for (int i = 0; i < 40; ++i) {
    const SupportShape a{random_shape(i), at(Vec3(u(rng), u(rng), u(rng)), Vec3(u(rng), u(rng), u(rng)), 3 * u(rng))};
    const SupportShape b{random_shape(i / 4 + 1),
                         at(Vec3(u(rng), u(rng), u(rng)) * 2.0, Vec3(u(rng), u(rng), u(rng)), 3 * u(rng))};
    const auto r = gjk_distance(a, b);
    const double sampled = sampled_distance(a, b, 200000, rng);
    if (r.intersecting) {
      EXPECT_LE(sampled, 2e-3) << i;
    } else {
      EXPECT_GE(sampled, r.distance - 1e-9) << i;
      EXPECT_NEAR(sampled, r.distance, 2e-3) << i;
      // Closest points lie on the respective surfaces.
      EXPECT_NEAR(query_world(PlacedShape{a.shape, a.pose}, r.point_a).signed_distance, 0.0, 1e-7);
      EXPECT_NEAR(query_world(PlacedShape{b.shape, b.pose}, r.point_b).signed_distance, 0.0, 1e-7);
    }
  }
}
