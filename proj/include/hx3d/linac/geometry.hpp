#pragma once

#include <algorithm>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "hx3d/geometry/gjk.hpp"
#include "hx3d/geometry/primitives.hpp"
#include "hx3d/linac/config.hpp"
#include "hx3d/scene.hpp"

namespace hx3d::linac {

// Room coordinates: isocentre at the origin, x lateral, y towards the gantry
// stand, z up. At gantry 0 the head sits above the isocentre.
enum class Frame { Room, Gantry, Collimator, Couch };

inline std::string_view to_string(Frame f) {
  switch (f) {
    case Frame::Room: return "room";
    case Frame::Gantry: return "gantry";
    case Frame::Collimator: return "collimator";
    case Frame::Couch: return "couch";
  }
  return "?";
}

struct Part {
  std::string name;
  Frame frame = Frame::Room;
  geometry::Primitive shape;
  Mat4 local_pose = Mat4::Identity();  // part -> frame
};

struct LinacGeometry {
  std::vector<Part> parts;
  std::vector<Part> attachments;  // collimator-mounted accessories
};

// Chain: room -> gantry (about y through the isocentre) -> collimator (about
// the beam axis, gantry z); room -> couch (rotation about z, then the three
// translations in the rotated couch frame).
inline Mat4 frame_pose(const LinacConfiguration& cfg, Frame f) {
  switch (f) {
    case Frame::Room: return Mat4::Identity();
    case Frame::Gantry: return rotation_matrix(Vec3::UnitY(), deg_to_rad(cfg.gantry_deg));
    case Frame::Collimator:
      return rotation_matrix(Vec3::UnitY(), deg_to_rad(cfg.gantry_deg)) *
             rotation_matrix(Vec3::UnitZ(), deg_to_rad(cfg.collimator_deg));
    case Frame::Couch:
      return rotation_matrix(Vec3::UnitZ(), deg_to_rad(cfg.couch_rotation_deg)) *
             translation_matrix(Vec3(cfg.couch_lateral_m, cfg.couch_longitudinal_m, -cfg.couch_vertical_m));
  }
  return Mat4::Identity();
}

// Gantry and collimator are one mounted assembly; their parts are never
// paired against each other.
inline bool frames_interact(Frame a, Frame b) {
  if (a == b) return false;
  const bool head_a = a == Frame::Gantry || a == Frame::Collimator;
  const bool head_b = b == Frame::Gantry || b == Frame::Collimator;
  return !(head_a && head_b);
}

inline void validate(const LinacGeometry& geo) {
  std::set<std::string> names;
  auto check = [&](const Part& p) {
    if (p.name.empty()) throw LinacError(LinacErrorCode::InvalidGeometry, "part without a name");
    if (!names.insert(p.name).second) throw LinacError(LinacErrorCode::InvalidGeometry, "duplicate part name '" + p.name + "'");
    if (std::holds_alternative<geometry::Plane>(p.shape))
      throw LinacError(LinacErrorCode::InvalidGeometry, "part '" + p.name + "' is unbounded");
    if (!geometry::dimensions_valid(p.shape))
      throw LinacError(LinacErrorCode::InvalidGeometry, "part '" + p.name + "' has a non-positive dimension");
  };
  for (const auto& p : geo.parts) check(p);
  for (const auto& p : geo.attachments) check(p);
}

// Reference fixture: gantry stand, gantry head, couch top and a capsule patient.
inline LinacGeometry reference_geometry() {
  LinacGeometry g;
  g.parts.push_back({"gantry_stand", Frame::Room, geometry::Box{Vec3(0.8, 0.6, 2.4)},
                     translation_matrix(Vec3(0.0, 1.3, 0.0))});
  // Head: r 0.3, 0.3 long, beam-side face 0.45 from the isocentre.
  g.parts.push_back({"gantry_head", Frame::Gantry, geometry::Cylinder{0.3, 0.3},
                     translation_matrix(Vec3(0.0, 0.0, 0.6)) * rotation_matrix(Vec3::UnitX(), kPi / 2)});
  // Couch top: surface at the couch frame origin height.
  g.parts.push_back({"couch_top", Frame::Couch, geometry::Box{Vec3(0.5, 1.9, 0.05)},
                     translation_matrix(Vec3(0.0, -0.55, -0.025))});
  g.parts.push_back({"patient", Frame::Couch, geometry::Capsule{0.12, 0.68},
                     translation_matrix(Vec3(0.0, -0.6, 0.12))});
  return g;
}

struct PosedPart {
  std::string name;
  Frame frame;
  geometry::SupportShape solid;
};

inline std::vector<PosedPart> posed_parts(const LinacConfiguration& cfg, const LinacGeometry& geo) {
  std::vector<PosedPart> out;
  out.reserve(geo.parts.size() + geo.attachments.size());
  for (const auto* list : {&geo.parts, &geo.attachments})
    for (const Part& p : *list) out.push_back({p.name, p.frame, {p.shape, frame_pose(cfg, p.frame) * p.local_pose}});
  return out;
}

struct PairDistance {
  std::string part_a;  // part_a < part_b
  std::string part_b;
  double min_distance = 0.0;
  bool operator==(const PairDistance&) const = default;
};

struct CollisionReport {
  bool colliding = false;
  std::vector<PairDistance> pairs;
  LinacConfiguration config;
  double clearance = 0.0;
  bool operator==(const CollisionReport& o) const {
    return colliding == o.colliding && pairs == o.pairs && config == o.config && clearance == o.clearance;
  }
};

inline bool pair_reported(double distance, double clearance) { return distance <= 0.0 || distance < clearance; }

// Every interacting pair at or below the clearance, sorted by name.
inline CollisionReport check_collision(const LinacConfiguration& cfg, const LinacGeometry& geo, double clearance = 0.0) {
  validate(geo);
  CollisionReport r;
  r.config = cfg;
  r.clearance = clearance;
  auto posed = posed_parts(cfg, geo);
  // Fixed evaluation order so swapping the input order cannot change a bit.
  std::sort(posed.begin(), posed.end(), [](const PosedPart& a, const PosedPart& b) { return a.name < b.name; });
  for (std::size_t i = 0; i < posed.size(); ++i)
    for (std::size_t j = i + 1; j < posed.size(); ++j) {
      if (!frames_interact(posed[i].frame, posed[j].frame)) continue;
      const auto d = geometry::gjk_distance(posed[i].solid, posed[j].solid);
      if (pair_reported(d.distance, clearance)) r.pairs.push_back({posed[i].name, posed[j].name, d.distance});
    }
  r.colliding = !r.pairs.empty();
  return r;
}

// Minimum distance per interacting pair, regardless of clearance.
inline std::vector<PairDistance> pair_distances(const LinacConfiguration& cfg, const LinacGeometry& geo) {
  return check_collision(cfg, geo, std::numeric_limits<double>::infinity()).pairs;
}

// ---------------------------------------------------------------------------
// Geometry from a scene document
// ---------------------------------------------------------------------------

// Frame transforms are marked by DEF; their own pose fields are ignored (the
// configuration drives them). Everything outside them belongs to the room.
inline constexpr std::string_view kGantryDef = "GANTRY";
inline constexpr std::string_view kCollimatorDef = "COLLIMATOR";
inline constexpr std::string_view kCouchDef = "COUCH";

inline LinacGeometry geometry_from_document(const x3d::Document& doc) {
  LinacGeometry geo;
  std::size_t unnamed = 0;
  auto walk = [&](auto&& self, const x3d::Node& n, Frame frame, const Mat4& pose, std::string_view shape_def) -> void {
    Frame f = frame;
    Mat4 m = pose;
    if (n.def == kGantryDef) f = Frame::Gantry, m = Mat4::Identity();
    else if (n.def == kCollimatorDef) f = Frame::Collimator, m = Mat4::Identity();
    else if (n.def == kCouchDef) f = Frame::Couch, m = Mat4::Identity();
    else m = pose * scene::local_transform(n);

    if (x3d::is_geometry_node(n.kind)) {
      std::string name = !n.def.empty() ? n.def : !shape_def.empty() ? std::string(shape_def) : "part_" + std::to_string(unnamed++);
      geo.parts.push_back({std::move(name), f, geometry::primitive_from_node(n), m});
      return;
    }
    const std::string_view sd = n.kind == x3d::NodeKind::Shape ? std::string_view(n.def) : shape_def;
    for (const auto& c : n.children) self(self, c.node(), f, m, sd);
  };
  walk(walk, doc.root, Frame::Room, Mat4::Identity(), {});
  validate(geo);
  return geo;
}

}  // namespace hx3d::linac
