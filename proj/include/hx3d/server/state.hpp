#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hx3d/linac.hpp"
#include "hx3d/scene.hpp"
#include "hx3d/server/command.hpp"
#include "hx3d/sim/electrolysis.hpp"
#include "hx3d/sim/hydraulics.hpp"

namespace hx3d::server {

using SceneMap = std::map<std::string, std::shared_ptr<const x3d::Document>, std::less<>>;

struct SimSettings {
  std::filesystem::path scenes_dir;
  std::filesystem::path attachments_dir;
  double tick_hz = 1000.0;
  double publish_hz = 30.0;
  std::uint64_t seed = 1;
  int electrolysis_molecules = 10;
  double clearance = 0.0;  // linac near-miss threshold, m
  std::string linac_scene = "linac";
};

// Command after admission: scene_field values are already typed.
struct QueuedCommand {
  std::uint64_t seq = 0;
  Command command;
  std::optional<scene::FieldUpdate> update;
};

struct CommandFailure {
  std::uint64_t seq = 0;
  std::int64_t tick = 0;
  std::string target;
  std::string message;
};

// Everything the simulation loop owns.
struct SimState {
  std::int64_t tick = 0;
  linac::LinacConfiguration linac;
  linac::LinacGeometry geometry;
  std::vector<std::string> attachments;  // loaded instances, in load order
  electrolysis::ElectrolysisState electrolysis;
  hydraulics::HydraulicSystem hydraulics;
  haptics::HapticDeviceConfig device;
  SceneMap scenes;
  std::map<std::string, std::uint64_t, std::less<>> scene_revisions;
  std::uint64_t applied_seq = 0;
  std::deque<CommandFailure> failures;  // most recent last
};

inline constexpr std::size_t kMaxFailures = 16;

inline SceneMap load_scenes(const std::filesystem::path& dir) {
  SceneMap scenes;
  if (dir.empty()) return scenes;
  std::error_code ec;
  std::filesystem::directory_iterator it(dir, ec);
  if (ec) throw std::runtime_error("cannot read scenes directory " + dir.string() + ": " + ec.message());
  for (const auto& entry : it) {
    if (entry.path().extension() != linac::kSceneExtension) continue;
    const std::string name = entry.path().stem().string();
    try {
      scenes.emplace(name, std::make_shared<const x3d::Document>(x3d::parse_x3d(linac::read_text_file(entry.path()))));
    } catch (const std::exception& e) {
      throw std::runtime_error("scene " + entry.path().string() + ": " + e.what());
    }
  }
  return scenes;
}

inline SimState initial_state(const SimSettings& s) {
  SimState st;
  st.scenes = load_scenes(s.scenes_dir);
  for (const auto& [name, doc] : st.scenes) st.scene_revisions[name] = 1;
  auto it = st.scenes.find(s.linac_scene);
  st.geometry = it == st.scenes.end() ? linac::reference_geometry() : linac::geometry_from_document(*it->second);
  st.electrolysis = electrolysis::init_electrolysis(s.electrolysis_molecules, s.seed);
  return st;
}

namespace detail {

inline void apply(SimState& st, const SimSettings&, const LinacAxisCommand& c) {
  linac::LinacConfiguration cfg = st.linac;
  for (const auto& [axis, value] : c.values) cfg = linac::set_axis(cfg, axis, value);
  st.linac = cfg;
}

inline void apply(SimState& st, const SimSettings& s, const ElectrolysisCommand& c) {
  using A = ElectrolysisCommand::Action;
  switch (c.action) {
    case A::Power: st.electrolysis.powered = c.on; break;
    case A::Speed: st.electrolysis.speed = c.speed; break;
    case A::Reset: {
      auto fresh = electrolysis::init_electrolysis(c.molecules, c.seed.value_or(s.seed), st.electrolysis.kinetics);
      fresh.powered = st.electrolysis.powered;
      fresh.speed = st.electrolysis.speed;
      fresh.tick = st.electrolysis.tick;
      st.electrolysis = std::move(fresh);
      break;
    }
  }
}

inline void apply(SimState& st, const SimSettings&, const HydraulicsCommand& c) {
  using A = HydraulicsCommand::Action;
  hydraulics::HydraulicSystem h = st.hydraulics;
  switch (c.action) {
    case A::Push: h = hydraulics::lift_step(h, c.displacement); break;
    case A::Load: h.load_mass = c.mass; break;
    case A::Areas:
      // Pistons return to rest so the volume balance holds for the new areas.
      h.area_in = c.area_in;
      h.area_out = c.area_out;
      h.piston_in_pos = h.piston_out_pos = 0.0;
      break;
    case A::Reset: h = hydraulics::HydraulicSystem{}; break;
  }
  hydraulics::validate(h);
  st.hydraulics = h;
}

inline void bump(SimState& st, const std::string& scene, std::shared_ptr<const x3d::Document> doc) {
  st.scenes.insert_or_assign(scene, std::move(doc));
  ++st.scene_revisions[scene];
}

inline void apply_field(SimState& st, const SceneFieldCommand& c, const scene::FieldUpdate& u) {
  auto it = st.scenes.find(c.scene);
  if (it == st.scenes.end()) throw std::runtime_error("no scene '" + c.scene + "'");
  scene::FieldUpdate typed = u;
  typed.tick = st.tick;
  bump(st, c.scene, std::make_shared<const x3d::Document>(scene::apply_update(*it->second, typed)));
}

inline void apply(SimState& st, const SimSettings& s, const AttachmentCommand& c) {
  auto it = st.scenes.find(s.linac_scene);
  if (it == st.scenes.end()) throw std::runtime_error("no linac scene to attach to");
  auto r = linac::load_attachment(*it->second, st.geometry, s.attachments_dir, c.name);
  st.geometry = std::move(r.geometry);
  st.attachments.push_back(c.name + "#" + std::to_string(r.instance));
  bump(st, s.linac_scene, std::make_shared<const x3d::Document>(std::move(r.doc)));
}

}  // namespace detail

// Applies one command to `st`. On any error `st` is left untouched and the
// failure is recorded instead.
inline void apply_command(SimState& st, const SimSettings& s, const QueuedCommand& q) {
  SimState next = st;
  try {
    if (const auto* f = std::get_if<SceneFieldCommand>(&q.command.body))
      detail::apply_field(next, *f, q.update.value());
    else
      std::visit(
          [&](const auto& body) {
            if constexpr (!std::is_same_v<std::decay_t<decltype(body)>, SceneFieldCommand>) detail::apply(next, s, body);
          },
          q.command.body);
  } catch (const std::exception& e) {
    st.failures.push_back({q.seq, st.tick, std::string(target_name(q.command.body)), e.what()});
    if (st.failures.size() > kMaxFailures) st.failures.pop_front();
    st.applied_seq = q.seq;
    return;
  }
  next.applied_seq = q.seq;
  st = std::move(next);
}

}  // namespace hx3d::server
