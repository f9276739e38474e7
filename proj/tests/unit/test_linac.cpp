#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <random>

#include "hx3d/linac.hpp"
#include "hx3d/x3d.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

using namespace hx3d;
using namespace hx3d::linac;
namespace fs = std::filesystem;

namespace {

x3d::Document load_scene(const fs::path& p) { return x3d::parse_x3d(read_text_file(p)); }

LinacConfiguration random_config(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0, 1);
  LinacConfiguration c;
  c = set_axis(c, Axis::Gantry, 360 * u(rng));
  c = set_axis(c, Axis::Collimator, 360 * u(rng));
  c = set_axis(c, Axis::CouchRotation, 360 * u(rng));
  c = set_axis(c, Axis::CouchVertical, 0.5 * u(rng));
  c = set_axis(c, Axis::CouchLongitudinal, -0.3 + 0.6 * u(rng));
  c = set_axis(c, Axis::CouchLateral, -0.2 + 0.4 * u(rng));
  return c;
}

using hx3d::testing::TempDir;

}  // namespace

// ---------------------------------------------------------------------------
// Axes
// ---------------------------------------------------------------------------

TEST(LinacAxes, Examples) {
  LinacConfiguration c;
  EXPECT_EQ(set_axis(c, Axis::Gantry, 180).gantry_deg, 180.0);
  EXPECT_EQ(set_axis(c, Axis::Collimator, -30).collimator_deg, 330.0);
  EXPECT_EQ(set_axis(c, Axis::CouchVertical, 9.0).couch_vertical_m, 0.5);
  EXPECT_EQ(set_axis(c, Axis::CouchRotation, 360).couch_rotation_deg, 0.0);
  EXPECT_EQ(set_axis(c, Axis::Gantry, -1e-20).gantry_deg, 0.0);
  EXPECT_EQ(set_axis(c, Axis::Gantry, 725).gantry_deg, 5.0);
  EXPECT_EQ(set_axis(c, "couch_lateral", -1).couch_lateral_m, -0.2);
}

TEST(LinacAxes, Errors) {
  try {
    set_axis(LinacConfiguration{}, "tilt", 1.0);
    FAIL();
  } catch (const LinacError& e) {
    EXPECT_EQ(e.code(), LinacErrorCode::UnknownAxis);
  }
  EXPECT_THROW(set_axis(LinacConfiguration{}, Axis::Gantry, NAN), LinacError);
  EXPECT_THROW(set_axis(LinacConfiguration{}, Axis::CouchVertical, INFINITY), LinacError);
}

TEST(LinacAxes, RandomizedRangeAndIdempotence) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> exponent(-30, 30);
  std::uniform_int_distribution<int> axis(0, 5);
  LinacConfiguration c;
  for (int i = 0; i < 100000; ++i) {
    const double v = (rng() & 1 ? 1 : -1) * std::pow(10.0, exponent(rng)) * (1 + (rng() % 1000) / 1000.0);
    const Axis a = kAllAxes[static_cast<std::size_t>(axis(rng))];
    c = set_axis(c, a, v);
    ASSERT_TRUE(in_range(c)) << to_string(a) << " " << v;
    EXPECT_EQ(set_axis(c, a, c.get(a)), c);
  }
}

// ---------------------------------------------------------------------------
// Collision
// ---------------------------------------------------------------------------

TEST(LinacCollision, DefaultPoseClearMatchesAnalytic) {
  const auto geo = reference_geometry();
  const LinacConfiguration cfg;
  const auto r = check_collision(cfg, geo);
  EXPECT_FALSE(r.colliding);
  EXPECT_TRUE(r.pairs.empty());

  // Closest distances at the default pose, by hand from the fixture layout.
  const std::map<std::pair<std::string, std::string>, double> analytic{
      {{"gantry_head", "gantry_stand"}, 0.7}, {{"couch_top", "gantry_head"}, 0.45},
      {{"gantry_head", "patient"}, 0.21},     {{"couch_top", "gantry_stand"}, 0.6},
      {{"gantry_stand", "patient"}, 0.8}};
  const auto exact = pair_distances(cfg, geo);
  ASSERT_EQ(exact.size(), analytic.size());
  for (const auto& p : exact) EXPECT_NEAR(p.min_distance, analytic.at({p.part_a, p.part_b}), 1e-9) << p.part_a << "/" << p.part_b;

  const oracle::LinacOracle brute(geo, 200000, 1);
  for (const auto& e : brute.estimates(cfg)) EXPECT_NEAR(e.estimate, analytic.at({e.a, e.b}), 1e-3) << e.a << "/" << e.b;
}

TEST(LinacCollision, GantryDownCouchLowCollides) {
  const auto geo = reference_geometry();
  LinacConfiguration cfg = set_axis(LinacConfiguration{}, Axis::Gantry, 180);
  cfg = set_axis(cfg, Axis::CouchVertical, cfg.limits.vertical.max);
  const auto r = check_collision(cfg, geo);
  EXPECT_TRUE(r.colliding);
  bool head_couch = false;
  for (const auto& p : r.pairs) head_couch |= p.part_a == "couch_top" && p.part_b == "gantry_head";
  EXPECT_TRUE(head_couch);
  // Sampling oracle sees penetration of the same pair.
  const oracle::LinacOracle brute(geo, 100000, 2);
  for (const auto& e : brute.estimates(cfg)) {
    if (e.a == "couch_top" && e.b == "gantry_head") {
      EXPECT_LE(e.estimate, 0.0);
    }
  }
}

TEST(LinacCollision, EmptyGeometry) {
  const auto r = check_collision(LinacConfiguration{}, LinacGeometry{});
  EXPECT_FALSE(r.colliding);
  EXPECT_TRUE(r.pairs.empty());
}

TEST(LinacCollision, InvalidGeometryRejected) {
  LinacGeometry g = reference_geometry();
  g.parts.push_back(g.parts.front());
  EXPECT_THROW(check_collision(LinacConfiguration{}, g), LinacError);
  g = reference_geometry();
  g.parts[0].shape = geometry::Box{Vec3(0, 1, 1)};
  EXPECT_THROW(check_collision(LinacConfiguration{}, g), LinacError);
}

TEST(LinacCollision, SymmetricUnderPartOrder) {
  std::mt19937_64 rng(4);
  const auto geo = reference_geometry();
  LinacGeometry reversed = geo;
  std::reverse(reversed.parts.begin(), reversed.parts.end());
  for (int i = 0; i < 200; ++i) {
    const auto cfg = random_config(rng);
    EXPECT_EQ(check_collision(cfg, geo, 0.05), check_collision(cfg, reversed, 0.05));
  }
}

TEST(LinacCollision, MonotoneInClearance) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 0.3);
  const auto geo = reference_geometry();
  for (int i = 0; i < 200; ++i) {
    const auto cfg = random_config(rng);
    double c1 = u(rng), c2 = u(rng);
    if (c1 > c2) std::swap(c1, c2);
    const auto small = check_collision(cfg, geo, c1).pairs;
    const auto large = check_collision(cfg, geo, c2).pairs;
    for (const auto& p : small) EXPECT_NE(std::find(large.begin(), large.end(), p), large.end());
  }
}

TEST(LinacCollision, AgreesWithSamplingOracle) {
  std::mt19937_64 rng(6);
  const auto geo = reference_geometry();
  const oracle::LinacOracle brute(geo, 100000, 3);
  int colliding = 0;
  for (int i = 0; i < 30; ++i) {
    const auto cfg = random_config(rng);
    const auto exact = pair_distances(cfg, geo);
    const auto est = brute.estimates(cfg);
    ASSERT_EQ(exact.size(), est.size());
    bool oracle_colliding = false;
    for (std::size_t k = 0; k < est.size(); ++k) {
      ASSERT_EQ(exact[k].part_a, est[k].a);
      ASSERT_EQ(exact[k].part_b, est[k].b);
      EXPECT_TRUE(oracle::verdict_agrees(exact[k].min_distance, est[k].estimate, est[k].tolerance, 0.0))
          << est[k].a << "/" << est[k].b << " exact " << exact[k].min_distance << " est " << est[k].estimate;
      oracle_colliding |= est[k].estimate <= 0.0;
    }
    const bool c = check_collision(cfg, geo).colliding;
    colliding += c;
    if (oracle_colliding) {
      EXPECT_TRUE(c);
    }
  }
  EXPECT_GT(colliding, 0);
  EXPECT_LT(colliding, 30);
}

TEST(LinacCollision, SceneFileMatchesReferenceGeometry) {
  const auto doc = load_scene(fs::path(HX3D_SCENES_DIR) / "linac.x3d");
  EXPECT_TRUE(x3d::validate(doc).empty());
  const auto from_doc = geometry_from_document(doc);
  const auto ref = reference_geometry();
  ASSERT_EQ(from_doc.parts.size(), 6u);  // stand, head, couch top, three patient pieces
  // Per frame pair, the minimum distance must coincide: the patient capsule
  // is exactly the union of the torso cylinder and the two end spheres.
  auto frame_min = [](const LinacGeometry& g, const LinacConfiguration& cfg) {
    std::map<std::pair<Frame, Frame>, double> m;
    auto posed = posed_parts(cfg, g);
    for (std::size_t i = 0; i < posed.size(); ++i)
      for (std::size_t j = 0; j < posed.size(); ++j) {
        if (!frames_interact(posed[i].frame, posed[j].frame) || posed[i].frame > posed[j].frame) continue;
        const double d = geometry::gjk_distance(posed[i].solid, posed[j].solid).distance;
        auto key = std::make_pair(posed[i].frame, posed[j].frame);
        m[key] = m.count(key) ? std::min(m[key], d) : d;
      }
    return m;
  };
  std::mt19937_64 rng(8);
  for (int i = 0; i < 100; ++i) {
    const auto cfg = random_config(rng);
    const auto a = frame_min(ref, cfg);
    const auto b = frame_min(from_doc, cfg);
    ASSERT_EQ(a.size(), b.size());
    for (const auto& [k, v] : a) EXPECT_NEAR(v, b.at(k), 1e-9);
    EXPECT_EQ(check_collision(cfg, ref).colliding, check_collision(cfg, from_doc).colliding);
  }
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

TEST(LinacSweep, EmptyPlan) { EXPECT_TRUE(sweep_beam_arrangement({}, reference_geometry()).empty()); }

TEST(LinacSweep, SingleSafePoint) {
  BeamArrangement plan;
  plan.points.push_back({90, 0, {}});
  const auto out = sweep_beam_arrangement(plan, reference_geometry());
  ASSERT_EQ(out.size(), 1u);
  EXPECT_FALSE(out[0].report.colliding);
  EXPECT_EQ(out[0].report, check_collision(configuration_at(plan.points[0], {}), reference_geometry()));
}

TEST(LinacSweep, FullArcHasOneIntervalAroundHalfTurn) {
  BeamArrangement plan;
  plan.arc = true;
  plan.step_deg = 1.0;
  const CouchPose low{0, 0.5, 0, 0};
  plan.points = {{0, 0, low}, {359, 0, low}};
  const auto geo = reference_geometry();
  const auto out = sweep_beam_arrangement(plan, geo);
  ASSERT_EQ(out.size(), 360u);
  // Per-angle oracle: each entry equals an independent single check.
  for (const auto& e : out) {
    LinacConfiguration cfg = configuration_at({e.gantry_deg, 0, low}, {});
    EXPECT_EQ(e.report, check_collision(cfg, geo));
  }
  const auto intervals = colliding_intervals(out);
  ASSERT_EQ(intervals.size(), 1u);
  EXPECT_LE(intervals[0].from_deg, 180.0);
  EXPECT_GE(intervals[0].to_deg, 180.0);
}

TEST(LinacSweep, ArcExpansion) {
  BeamArrangement plan;
  plan.arc = true;
  plan.step_deg = 2.0;
  plan.points = {{350, 0, {}}, {10, 40, {}}, {15, 40, {}}};
  const auto samples = expand(plan);
  // 350..370 every 2 (11), then 372..375 (372, 374, exact end 375).
  ASSERT_EQ(samples.size(), 14u);
  EXPECT_EQ(samples[10].second.gantry_deg, 370.0);
  EXPECT_NEAR(samples[5].second.collimator_deg, 20.0, 1e-12);
  EXPECT_EQ(samples.back().second.gantry_deg, 375.0);
  plan.step_deg = 0;
  EXPECT_THROW(expand(plan), LinacError);
}

// ---------------------------------------------------------------------------
// Attachments
// ---------------------------------------------------------------------------

TEST(LinacAttachments, FixtureListing) {
  EXPECT_EQ(list_attachments(HX3D_ATTACHMENTS_DIR), (std::vector<std::string>{"cone", "wedge"}));
}

TEST(LinacAttachments, EmptyAndMissingDirectories) {
  TempDir dir("empty");
  EXPECT_TRUE(list_attachments(dir.path).empty());
  try {
    list_attachments(dir.path / "nope");
    FAIL();
  } catch (const LinacError& e) {
    EXPECT_EQ(e.code(), LinacErrorCode::DirectoryUnreadable);
  }
}

TEST(LinacAttachments, ReadThroughSeesNewFiles) {
  TempDir dir("readthrough");
  fs::copy_file(fs::path(HX3D_ATTACHMENTS_DIR) / "wedge.x3d", dir.path / "wedge.x3d");
  std::ofstream(dir.path / "notes.txt") << "not a scene";
  EXPECT_EQ(list_attachments(dir.path), std::vector<std::string>{"wedge"});
  fs::copy_file(fs::path(HX3D_ATTACHMENTS_DIR) / "cone.x3d", dir.path / "bolus.x3d");
  EXPECT_EQ(list_attachments(dir.path), (std::vector<std::string>{"bolus", "wedge"}));
}

TEST(LinacAttachments, LoadGraftsUnderCollimator) {
  const auto doc = load_scene(fs::path(HX3D_SCENES_DIR) / "linac.x3d");
  const auto geo = geometry_from_document(doc);
  const auto cone = load_scene(fs::path(HX3D_ATTACHMENTS_DIR) / "cone.x3d");
  const std::size_t cone_nodes = x3d::count_nodes(cone.root) - 1;
  std::size_t cone_solids = 0;
  x3d::for_each_node(cone.root, [&](const x3d::Node& n, const x3d::NodePath&) { cone_solids += x3d::is_geometry_node(n.kind); });
  ASSERT_EQ(cone_solids, 2u);

  const auto once = load_attachment(doc, geo, HX3D_ATTACHMENTS_DIR, "cone");
  EXPECT_EQ(x3d::count_nodes(once.doc.root), x3d::count_nodes(doc.root) + cone_nodes);
  EXPECT_EQ(once.geometry.attachments.size(), cone_solids);
  EXPECT_EQ(once.geometry.parts.size(), geo.parts.size());
  for (const auto& p : once.geometry.attachments) EXPECT_EQ(p.frame, Frame::Collimator);

  const auto twice = load_attachment(once.doc, once.geometry, HX3D_ATTACHMENTS_DIR, "cone");
  EXPECT_EQ(twice.instance, 2u);
  EXPECT_EQ(x3d::count_nodes(twice.doc.root), x3d::count_nodes(doc.root) + 2 * cone_nodes);
  EXPECT_EQ(twice.geometry.attachments.size(), 2 * cone_solids);
  EXPECT_TRUE(x3d::validate(twice.doc).empty());

  // Grafted geometry follows the collimator frame in the scene graph too.
  const auto cfg = set_axis(LinacConfiguration{}, Axis::Collimator, 90);
  const auto& tip = twice.geometry.attachments.back();
  const Mat4 via_geo = frame_pose(cfg, tip.frame) * tip.local_pose;
  EXPECT_TRUE(via_geo.isApprox(frame_pose(cfg, Frame::Collimator) * translation_matrix(Vec3(0, 0, 0.32)), 1e-12));
}

TEST(LinacAttachments, AttachmentsJoinCollisionChecks) {
  const auto doc = load_scene(fs::path(HX3D_SCENES_DIR) / "linac.x3d");
  const auto loaded = load_attachment(doc, geometry_from_document(doc), HX3D_ATTACHMENTS_DIR, "cone");
  // Head clear of the patient at gantry 0 with the couch raised; the cone tip
  // (0.29 from the isocentre) is not.
  LinacGeometry bare = geometry_from_document(doc);
  LinacConfiguration cfg;
  cfg.limits.vertical.min = -0.1;
  cfg = set_axis(cfg, Axis::CouchVertical, -0.1);
  EXPECT_FALSE(check_collision(cfg, bare).colliding);
  const auto r = check_collision(cfg, loaded.geometry);
  ASSERT_TRUE(r.colliding);
  bool cone_hit = false;
  for (const auto& p : r.pairs) cone_hit |= p.part_a.rfind("cone#1/", 0) == 0 || p.part_b.rfind("cone#1/", 0) == 0;
  EXPECT_TRUE(cone_hit);
}

TEST(LinacAttachments, Errors) {
  const auto doc = load_scene(fs::path(HX3D_SCENES_DIR) / "linac.x3d");
  const auto geo = geometry_from_document(doc);
  try {
    load_attachment(doc, geo, HX3D_ATTACHMENTS_DIR, "xyz");
    FAIL();
  } catch (const LinacError& e) {
    EXPECT_EQ(e.code(), LinacErrorCode::NotFound);
  }
  TempDir dir("broken");
  std::ofstream(dir.path / "bad.x3d") << "<X3D><Scene><Shape><Box size='0 1 1'/></Shape></Scene></X3D>";
  std::ofstream(dir.path / "junk.x3d") << "<X3D><Scene>";
  for (const char* name : {"bad", "junk"}) {
    try {
      load_attachment(doc, geo, dir.path, name);
      FAIL() << name;
    } catch (const LinacError& e) {
      EXPECT_EQ(e.code(), LinacErrorCode::ParseFailed) << name;
    }
  }
  try {
    const auto bad = load_attachment(doc, geo, dir.path, "bad");
  } catch (const LinacError& e) {
    ASSERT_FALSE(e.diagnostics().empty());
    EXPECT_EQ(e.diagnostics().front().code, x3d::DiagnosticCode::NonPositiveDimension);
  }
}
