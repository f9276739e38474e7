#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "hx3d/linac/config.hpp"
#include "hx3d/scene.hpp"
#include "hx3d/x3d/parser.hpp"
#include "hx3d/x3d/serializer.hpp"

namespace hx3d::server {

using json = nlohmann::json;

enum class CommandErrorCode { ValidationFailed, UnknownTarget };

inline std::string_view to_string(CommandErrorCode c) {
  return c == CommandErrorCode::ValidationFailed ? "ValidationFailed" : "UnknownTarget";
}

class CommandError : public std::runtime_error {
 public:
  CommandError(CommandErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  CommandErrorCode code() const noexcept { return code_; }

 private:
  CommandErrorCode code_;
};

// {"target": "linac_axis", "params": {"gantry": 190, "couch_vertical": 0.1}}
// Axes are independent, so their order within one command does not matter.
struct LinacAxisCommand {
  std::vector<std::pair<linac::Axis, double>> values;
};

// actions: power {on}, speed {value}, reset {molecules, seed?}
struct ElectrolysisCommand {
  enum class Action { Power, Speed, Reset } action = Action::Power;
  bool on = false;
  double speed = 1.0;
  int molecules = 0;
  std::optional<std::uint64_t> seed;
};

// actions: push {displacement}, load {mass}, areas {area_in, area_out}, reset
struct HydraulicsCommand {
  enum class Action { Push, Load, Areas, Reset } action = Action::Push;
  double displacement = 0.0;
  double mass = 0.0;
  double area_in = 0.0;
  double area_out = 0.0;
};

// {"scene": "linac", "node": "DEF", "field": "translation", "value": "0 1 0"}
// The value text is kept raw here and typed against the target node when the
// handler validates it against the current scene.
struct SceneFieldCommand {
  std::string scene;
  std::string node;
  std::string field;
  std::string value;
};

// {"action": "load", "name": "cone"}
struct AttachmentCommand {
  std::string name;
};

using CommandBody =
    std::variant<LinacAxisCommand, ElectrolysisCommand, HydraulicsCommand, SceneFieldCommand, AttachmentCommand>;

struct Command {
  CommandBody body;
  std::int64_t client_tick = 0;
};

inline std::string_view target_name(const CommandBody& b) {
  static constexpr std::string_view names[] = {"linac_axis", "electrolysis", "hydraulics", "scene_field", "attachment"};
  return names[b.index()];
}

namespace detail {

[[noreturn]] inline void invalid(const std::string& what) { throw CommandError(CommandErrorCode::ValidationFailed, what); }

inline const json& require(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) invalid(where + ": missing '" + key + "'");
  return *it;
}

inline double finite_number(const json& v, const std::string& where) {
  if (!v.is_number()) invalid(where + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) invalid(where + " must be finite");
  return d;
}

inline std::string string_of(const json& v, const std::string& where) {
  if (!v.is_string() || v.get_ref<const std::string&>().empty()) invalid(where + " must be a non-empty string");
  return v.get<std::string>();
}

inline std::string action_of(const json& c, const std::string& fallback = {}) {
  auto it = c.find("action");
  if (it == c.end()) {
    if (fallback.empty()) invalid("missing 'action'");
    return fallback;
  }
  return string_of(*it, "action");
}

// Numbers and number arrays become attribute text; strings pass through.
inline std::string field_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return x3d::format_number(v.get<double>());
  if (v.is_array()) {
    std::string s;
    for (const auto& e : v) {
      if (!e.is_number()) invalid("scene_field value array must hold numbers");
      if (!s.empty()) s += ' ';
      s += x3d::format_number(e.get<double>());
    }
    return s;
  }
  invalid("scene_field value must be a string, number or number array");
}

inline LinacAxisCommand parse_linac(const json& params) {
  if (!params.is_object() || params.empty()) invalid("linac_axis params must be a non-empty object of axis: value");
  LinacAxisCommand c;
  for (const auto& [key, value] : params.items()) {
    linac::Axis axis;
    try {
      axis = linac::axis_from_string(key);
    } catch (const linac::LinacError& e) {
      invalid(e.what());
    }
    c.values.emplace_back(axis, finite_number(value, "linac_axis." + key));
  }
  return c;
}

inline ElectrolysisCommand parse_electrolysis(const json& c, const json& params) {
  ElectrolysisCommand e;
  const std::string action = action_of(c);
  if (action == "power") {
    e.action = ElectrolysisCommand::Action::Power;
    const json& on = require(params, "on", "electrolysis.power");
    if (!on.is_boolean()) invalid("electrolysis.power.on must be a boolean");
    e.on = on.get<bool>();
  } else if (action == "speed") {
    e.action = ElectrolysisCommand::Action::Speed;
    e.speed = finite_number(require(params, "value", "electrolysis.speed"), "electrolysis.speed.value");
    if (e.speed < 0.0) invalid("electrolysis.speed.value must be >= 0");
  } else if (action == "reset") {
    e.action = ElectrolysisCommand::Action::Reset;
    const json& n = require(params, "molecules", "electrolysis.reset");
    if (!n.is_number_integer() || n.get<std::int64_t>() < 0 || n.get<std::int64_t>() > 100000)
      invalid("electrolysis.reset.molecules must be an integer in [0, 100000]");
    e.molecules = n.get<int>();
    if (auto it = params.find("seed"); it != params.end()) {
      if (!it->is_number_integer() || (!it->is_number_unsigned() && it->get<std::int64_t>() < 0)) invalid("electrolysis.reset.seed must be a non-negative integer");
      e.seed = it->get<std::uint64_t>();
    }
  } else {
    invalid("electrolysis has no action '" + action + "'");
  }
  return e;
}

inline HydraulicsCommand parse_hydraulics(const json& c, const json& params) {
  HydraulicsCommand h;
  const std::string action = action_of(c);
  if (action == "push") {
    h.action = HydraulicsCommand::Action::Push;
    h.displacement = finite_number(require(params, "displacement", "hydraulics.push"), "hydraulics.push.displacement");
  } else if (action == "load") {
    h.action = HydraulicsCommand::Action::Load;
    h.mass = finite_number(require(params, "mass", "hydraulics.load"), "hydraulics.load.mass");
    if (h.mass < 0.0) invalid("hydraulics.load.mass must be >= 0");
  } else if (action == "areas") {
    h.action = HydraulicsCommand::Action::Areas;
    h.area_in = finite_number(require(params, "area_in", "hydraulics.areas"), "hydraulics.areas.area_in");
    h.area_out = finite_number(require(params, "area_out", "hydraulics.areas"), "hydraulics.areas.area_out");
    if (!(h.area_in > 0.0) || !(h.area_out > 0.0)) invalid("hydraulics areas must be positive");
  } else if (action == "reset") {
    h.action = HydraulicsCommand::Action::Reset;
  } else {
    invalid("hydraulics has no action '" + action + "'");
  }
  return h;
}

}  // namespace detail

// Structural validation only; checks that need the live scene or the
// attachment directory happen in the engine's admission step.
inline Command parse_command(const json& j) {
  using namespace detail;
  if (!j.is_object()) invalid("command must be a JSON object");
  const std::string target = string_of(require(j, "target", "command"), "target");
  static const json kEmpty = json::object();
  const json* params = &kEmpty;
  if (auto it = j.find("params"); it != j.end()) {
    if (!it->is_object()) invalid("params must be an object");
    params = &*it;
  }
  Command cmd;
  if (auto it = j.find("client_tick"); it != j.end()) {
    if (!it->is_number_integer()) invalid("client_tick must be an integer");
    cmd.client_tick = it->get<std::int64_t>();
  }
  if (target == "linac_axis") {
    const std::string action = action_of(j, "set");
    if (action != "set") invalid("linac_axis has no action '" + action + "'");
    cmd.body = parse_linac(*params);
  } else if (target == "electrolysis") {
    cmd.body = parse_electrolysis(j, *params);
  } else if (target == "hydraulics") {
    cmd.body = parse_hydraulics(j, *params);
  } else if (target == "scene_field") {
    const std::string action = action_of(j, "set");
    if (action != "set") invalid("scene_field has no action '" + action + "'");
    SceneFieldCommand s;
    s.scene = string_of(require(*params, "scene", "scene_field"), "scene_field.scene");
    s.node = string_of(require(*params, "node", "scene_field"), "scene_field.node");
    s.field = string_of(require(*params, "field", "scene_field"), "scene_field.field");
    s.value = field_text(require(*params, "value", "scene_field"));
    cmd.body = std::move(s);
  } else if (target == "attachment") {
    const std::string action = action_of(j, "load");
    if (action != "load") invalid("attachment has no action '" + action + "'");
    cmd.body = AttachmentCommand{string_of(require(*params, "name", "attachment"), "attachment.name")};
  } else {
    throw CommandError(CommandErrorCode::UnknownTarget, "unknown target '" + target + "'");
  }
  return cmd;
}

// Types a scene_field value against the node it addresses.
inline scene::FieldUpdate typed_update(const x3d::Document& doc, const SceneFieldCommand& c) {
  auto it = doc.defs.find(c.node);
  if (it == doc.defs.end()) detail::invalid("scene '" + c.scene + "' has no node '" + c.node + "'");
  const x3d::Node* n = x3d::node_at(doc.root, it->second);
  const x3d::FieldSpec* spec = x3d::find_field(n->kind, x3d::route_field_name(c.field));
  if (!spec) detail::invalid(std::string(x3d::to_string(n->kind)) + " has no field '" + c.field + "'");
  std::vector<x3d::Diagnostic> diags;
  x3d::FieldValue value;
  try {
    value = x3d::parse_field_value(*spec, c.value, c.node + "." + c.field, &diags);
  } catch (const x3d::ParseError& e) {
    detail::invalid(e.what());
  }
  if (!diags.empty()) detail::invalid(diags.front().message);
  return {c.node, std::string(spec->name), std::move(value), 0};
}

}  // namespace hx3d::server
