#pragma once

#include <set>
#include <string>
#include <vector>

#include "hx3d/x3d/schema.hpp"
#include "hx3d/x3d/types.hpp"

namespace hx3d::x3d {

// Maps X3D event names onto their field: "set_translation" and
// "translation_changed" both address "translation".
inline std::string_view route_field_name(std::string_view name) {
  if (name.starts_with("set_")) name.remove_prefix(4);
  if (name.ends_with("_changed")) name.remove_suffix(8);
  return name;
}

inline std::string describe(const Route& r) {
  return r.from_node + "." + r.from_field + " -> " + r.to_node + "." + r.to_field;
}

namespace detail {

inline void check_ranges(const Node& n, const std::string& where, std::vector<Diagnostic>& out) {
  auto positive = [&](std::string_view field, double v) {
    if (!(v > 0.0))
      out.push_back({DiagnosticCode::NonPositiveDimension, where,
                     std::string(field) + " must be > 0, got " + std::to_string(v)});
  };
  auto non_negative = [&](std::string_view field, double v) {
    if (v < 0.0)
      out.push_back({DiagnosticCode::NegativeValue, where, std::string(field) + " must be >= 0, got " + std::to_string(v)});
  };
  switch (n.kind) {
    case NodeKind::Sphere:
      positive("radius", n.get<SFFloat>("radius").value);
      break;
    case NodeKind::Cylinder:
      positive("radius", n.get<SFFloat>("radius").value);
      positive("height", n.get<SFFloat>("height").value);
      break;
    case NodeKind::Box:
      for (double s : n.get<SFVec3f>("size").v) positive("size", s);
      break;
    case NodeKind::DynamicTransform:
      positive("mass", n.get<SFFloat>("mass").value);
      break;
    case NodeKind::FrictionalSurface:
      for (std::string_view f : {"stiffness", "damping", "staticFriction", "dynamicFriction"})
        non_negative(f, n.get<SFFloat>(f).value);
      break;
    default:
      break;
  }
}

}  // namespace detail

// Structural checks. Parse-time notes carried by the document come first.
inline std::vector<Diagnostic> validate(const Document& doc) {
  std::vector<Diagnostic> out = doc.diagnostics;

  std::set<std::string, std::less<>> seen;
  for_each_node(doc.root, [&](const Node& n, const NodePath& path) {
    const std::string where = n.def.empty() ? std::string(to_string(n.kind)) : std::string(to_string(n.kind)) + " " + n.def;
    if (!n.def.empty() && !seen.insert(n.def).second)
      out.push_back({DiagnosticCode::DuplicateDef, n.def, "DEF name '" + n.def + "' is used more than once"});
    for (const Child& c : n.children) {
      if (!container_field_legal(n.kind, c.container_field, c.node().kind))
        out.push_back({DiagnosticCode::IllegalContainerField, where,
                       std::string(to_string(c.node().kind)) + " cannot be placed in " + where + " as '" +
                           c.container_field + "'"});
    }
    detail::check_ranges(n, where, out);
    (void)path;
  });

  for (const Route& r : doc.routes) {
    auto endpoint_type = [&](const std::string& node, const std::string& field) -> const FieldSpec* {
      auto it = doc.defs.find(node);
      if (it == doc.defs.end()) return nullptr;
      const Node* n = node_at(doc.root, it->second);
      return n ? find_field(n->kind, route_field_name(field)) : nullptr;
    };
    const FieldSpec* from = endpoint_type(r.from_node, r.from_field);
    const FieldSpec* to = endpoint_type(r.to_node, r.to_field);
    if (!from || !to) {
      out.push_back({DiagnosticCode::DanglingRoute, describe(r), "route endpoint does not name an existing node field"});
    } else if (from->type() != to->type()) {
      out.push_back({DiagnosticCode::DanglingRoute, describe(r),
                     "route connects " + std::string(to_string(from->type())) + " to " +
                         std::string(to_string(to->type()))});
    }
  }
  return out;
}

inline bool has_code(const std::vector<Diagnostic>& diags, DiagnosticCode code) {
  for (const auto& d : diags)
    if (d.code == code) return true;
  return false;
}

}  // namespace hx3d::x3d
