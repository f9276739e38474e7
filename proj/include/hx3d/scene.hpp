#pragma once

#include <cstdint>
#include <deque>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "hx3d/math.hpp"
#include "hx3d/x3d.hpp"

namespace hx3d::scene {

using x3d::Document;
using x3d::FieldValue;
using x3d::Node;
using x3d::NodeKind;
using x3d::NodePath;

enum class SceneErrorCode { PathNotFound, TypeMismatch };

class SceneError : public std::runtime_error {
 public:
  SceneError(SceneErrorCode code, const std::string& what)
      : std::runtime_error((code == SceneErrorCode::PathNotFound ? "PathNotFound: " : "TypeMismatch: ") + what),
        code_(code) {}
  SceneErrorCode code() const noexcept { return code_; }

 private:
  SceneErrorCode code_;
};

// A node addressed by DEF name or by child-index path from the Scene.
using NodeRef = std::variant<std::string, NodePath>;

struct FieldUpdate {
  NodeRef target;
  std::string field;
  FieldValue value;
  std::int64_t tick = 0;
};

inline NodePath resolve(const Document& doc, const NodeRef& ref) {
  if (const auto* name = std::get_if<std::string>(&ref)) {
    auto it = doc.defs.find(*name);
    if (it == doc.defs.end()) throw SceneError(SceneErrorCode::PathNotFound, "no node with DEF '" + *name + "'");
    return it->second;
  }
  const auto& path = std::get<NodePath>(ref);
  if (!x3d::node_at(doc.root, path)) throw SceneError(SceneErrorCode::PathNotFound, "child index path out of range");
  return path;
}

// Translation then rotation (T·R) for grouping nodes that carry a pose;
// identity for everything else.
inline Mat4 local_transform(const Node& n) {
  if (n.kind != NodeKind::Transform && n.kind != NodeKind::DynamicTransform) return Mat4::Identity();
  const auto& t = n.get<x3d::SFVec3f>("translation").v;
  const auto& r = n.get<x3d::SFRotation>("rotation");
  return translation_matrix(Vec3(t[0], t[1], t[2])) * rotation_matrix(Vec3(r.axis[0], r.axis[1], r.axis[2]), r.angle);
}

// Product of the pose matrices from the Scene down to and including the node
// itself, i.e. the mapping from the node's local frame to world.
inline Mat4 world_transform(const Node& root, const NodePath& path) {
  Mat4 m = Mat4::Identity();
  const Node* n = &root;
  for (std::size_t i : path) {
    if (i >= n->children.size()) throw SceneError(SceneErrorCode::PathNotFound, "child index path out of range");
    n = &n->children[i].node();
    m = m * local_transform(*n);
  }
  return m;
}

inline Mat4 world_transform(const Document& doc, const NodeRef& ref) {
  return world_transform(doc.root, resolve(doc, ref));
}

struct UpdateResult {
  Document doc;
  std::vector<std::size_t> fired_routes;  // indices into doc.routes, in firing order
};

// Replaces one field, then propagates along routes breadth-first. Each route
// fires at most once per update, which also terminates cycles.
inline UpdateResult apply_update_traced(const Document& doc, const FieldUpdate& u) {
  UpdateResult result{doc, {}};
  Document& out = result.doc;

  const NodePath path = resolve(out, u.target);
  Node* target = x3d::node_at(out.root, path);
  const std::string_view field_name = x3d::route_field_name(u.field);
  const x3d::FieldSpec* spec = x3d::find_field(target->kind, field_name);
  if (!spec)
    throw SceneError(SceneErrorCode::PathNotFound,
                     "no field '" + std::string(u.field) + "' on " + std::string(x3d::to_string(target->kind)));
  if (spec->type() != x3d::type_of(u.value))
    throw SceneError(SceneErrorCode::TypeMismatch, std::string(spec->name) + " is " +
                                                       std::string(x3d::to_string(spec->type())) + ", got " +
                                                       std::string(x3d::to_string(x3d::type_of(u.value))));
  target->fields.insert_or_assign(std::string(spec->name), u.value);

  struct Event {
    std::string node;
    std::string field;
  };
  std::deque<Event> pending;
  if (!target->def.empty()) pending.push_back({target->def, std::string(spec->name)});

  std::vector<bool> fired(out.routes.size(), false);
  while (!pending.empty()) {
    const Event ev = std::move(pending.front());
    pending.pop_front();
    for (std::size_t i = 0; i < out.routes.size(); ++i) {
      const x3d::Route& r = out.routes[i];
      if (fired[i] || r.from_node != ev.node || x3d::route_field_name(r.from_field) != ev.field) continue;
      fired[i] = true;
      result.fired_routes.push_back(i);
      auto it = out.defs.find(r.to_node);
      if (it == out.defs.end()) continue;
      Node* dst = x3d::node_at(out.root, it->second);
      const x3d::FieldSpec* dst_spec = dst ? x3d::find_field(dst->kind, x3d::route_field_name(r.to_field)) : nullptr;
      if (!dst_spec || dst_spec->type() != spec->type()) continue;
      dst->fields.insert_or_assign(std::string(dst_spec->name), u.value);
      pending.push_back({r.to_node, std::string(dst_spec->name)});
    }
  }
  return result;
}

inline Document apply_update(const Document& doc, const FieldUpdate& u) { return apply_update_traced(doc, u).doc; }

}  // namespace hx3d::scene
