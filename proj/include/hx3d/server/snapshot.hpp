#pragma once

#include <memory>
#include <string>

#include "hx3d/server/state.hpp"

namespace hx3d::server {

// Immutable once published. `text` is the serialized `body`.
struct Snapshot {
  std::int64_t tick = 0;
  json body;
  std::string text;
  SceneMap scenes;
};

using SnapshotPtr = std::shared_ptr<const Snapshot>;

inline json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

inline json linac_json(const SimState& st, const linac::CollisionReport& report) {
  json config = json::object();
  json limits = json::object();
  for (linac::Axis a : linac::kAllAxes) {
    config[std::string(linac::to_string(a))] = st.linac.get(a);
    const auto l = st.linac.limits_of(a);
    limits[std::string(linac::to_string(a))] = {{"min", l.min}, {"max", l.max}, {"wraps", linac::is_rotational(a)}};
  }
  json pairs = json::array();
  for (const auto& p : report.pairs) pairs.push_back({{"a", p.part_a}, {"b", p.part_b}, {"distance", p.min_distance}});
  return {{"config", config},
          {"limits", limits},
          {"attachments", st.attachments},
          {"collision", {{"colliding", report.colliding}, {"clearance", report.clearance}, {"pairs", pairs}}}};
}

inline json electrolysis_json(const electrolysis::ElectrolysisState& e) {
  using namespace electrolysis;
  const Census c = census(e);
  json counts = json::array();
  for (const auto& [key, n] : c.counts)
    counts.push_back({{"species", to_string(key.first)}, {"phase", to_string(key.second)}, {"count", n}});
  json particles = json::array();
  for (const auto& p : e.particles)
    particles.push_back({{"id", p.id}, {"species", to_string(p.species)}, {"phase", to_string(p.phase)},
                         {"position", vec_json(p.position)}});
  return {{"powered", e.powered},
          {"speed", e.speed},
          {"bulb_intensity", c.bulb_intensity},
          {"electrons_absorbed", e.electrons_absorbed},
          {"electrons_released", e.electrons_released},
          {"census", counts},
          {"particles", particles},
          {"cathode", vec_json(e.cathode_pos)},
          {"anode", vec_json(e.anode_pos)},
          {"tank", {{"min", vec_json(e.tank.min)}, {"max", vec_json(e.tank.max)}}}};
}

inline json hydraulics_json(const hydraulics::HydraulicSystem& h, const haptics::HapticDeviceConfig& device) {
  const double load_force = h.load_mass * hydraulics::kStandardGravity;
  const auto r = hydraulics::haptic_resistance(h, hydraulics::kStandardGravity, device);
  return {{"area_in", h.area_in},
          {"area_out", h.area_out},
          {"piston_in", h.piston_in_pos},
          {"piston_out", h.piston_out_pos},
          {"load_mass", h.load_mass},
          {"pressure", hydraulics::pressure(load_force, h.area_out)},
          {"lifted_height", hydraulics::lifted_height(h)},
          {"required_force", r.required},
          {"delivered_force", vec_json(r.delivered)}};
}

inline SnapshotPtr make_snapshot(const SimState& st, const SimSettings& s, const linac::CollisionReport& report) {
  auto snap = std::make_shared<Snapshot>();
  snap->tick = st.tick;
  snap->scenes = st.scenes;
  json scenes = json::object();
  for (const auto& [name, rev] : st.scene_revisions) scenes[name] = {{"revision", rev}};
  json failures = json::array();
  for (const auto& f : st.failures)
    failures.push_back({{"seq", f.seq}, {"tick", f.tick}, {"target", f.target}, {"error", f.message}});
  snap->body = {{"tick", st.tick},
                {"time", static_cast<double>(st.tick) / s.tick_hz},
                {"applied_seq", st.applied_seq},
                {"linac", linac_json(st, report)},
                {"electrolysis", electrolysis_json(st.electrolysis)},
                {"hydraulics", hydraulics_json(st.hydraulics, st.device)},
                {"scenes", scenes},
                {"diagnostics", failures}};
  snap->text = snap->body.dump();
  return snap;
}

}  // namespace hx3d::server
