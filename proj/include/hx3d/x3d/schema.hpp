#pragma once

#include <algorithm>
#include <span>
#include <string_view>
#include <vector>

#include "hx3d/x3d/types.hpp"

namespace hx3d::x3d {

struct FieldSpec {
  std::string_view name;
  FieldValue default_value;
  // Required element count for MFFloat fields; 0 means any length.
  std::size_t mf_arity = 0;
  FieldType type() const { return type_of(default_value); }
};

namespace detail {

inline const std::vector<FieldSpec>& transform_fields() {
  static const std::vector<FieldSpec> f{
      {"translation", SFVec3f{}},
      {"rotation", SFRotation{}},
  };
  return f;
}

inline const std::vector<FieldSpec>& empty_fields() {
  static const std::vector<FieldSpec> f;
  return f;
}

}  // namespace detail

// Legal fields for a node kind, in canonical (serialization) order.
inline const std::vector<FieldSpec>& fields_for(NodeKind kind) {
  switch (kind) {
    case NodeKind::Transform:
      return detail::transform_fields();
    case NodeKind::Material: {
      static const std::vector<FieldSpec> f{
          {"diffuseColor", SFColor{{0.8, 0.8, 0.8}}},
          {"emissiveColor", SFColor{{0.0, 0.0, 0.0}}},
          {"specularColor", SFColor{{0.0, 0.0, 0.0}}},
          {"ambientIntensity", SFFloat{0.2}},
          {"shininess", SFFloat{0.2}},
          {"transparency", SFFloat{0.0}},
      };
      return f;
    }
    case NodeKind::FrictionalSurface: {
      // stiffness in N/m (absolute), damping in N·s/m.
      static const std::vector<FieldSpec> f{
          {"stiffness", SFFloat{500.0}},
          {"damping", SFFloat{0.0}},
          {"staticFriction", SFFloat{0.1}},
          {"dynamicFriction", SFFloat{0.4}},
      };
      return f;
    }
    case NodeKind::Sphere: {
      static const std::vector<FieldSpec> f{{"radius", SFFloat{1.0}}};
      return f;
    }
    case NodeKind::Cylinder: {
      static const std::vector<FieldSpec> f{{"radius", SFFloat{1.0}}, {"height", SFFloat{2.0}}};
      return f;
    }
    case NodeKind::Box: {
      static const std::vector<FieldSpec> f{{"size", SFVec3f{{2.0, 2.0, 2.0}}}};
      return f;
    }
    case NodeKind::HLHapticsDevice: {
      static const std::vector<FieldSpec> f{
          {"positionCalibration", SFMatrix4{}},
          {"orientationCalibration", SFRotation{}},
      };
      return f;
    }
    case NodeKind::DynamicTransform: {
      static const std::vector<FieldSpec> f{
          {"translation", SFVec3f{}},
          {"rotation", SFRotation{}},
          {"mass", SFFloat{1.0}},
          {"inertiaTensor", MFFloat{{0.1, 0.0, 0.0, 0.0, 0.1, 0.0, 0.0, 0.0, 0.1}}, 9},
          {"linearVelocity", SFVec3f{}},
          {"angularVelocity", SFVec3f{}},
      };
      return f;
    }
    case NodeKind::Inline: {
      static const std::vector<FieldSpec> f{{"url", SFString{}}};
      return f;
    }
    case NodeKind::Scene:
    case NodeKind::Group:
    case NodeKind::Shape:
    case NodeKind::Appearance:
    case NodeKind::DeviceInfo:
      return detail::empty_fields();
  }
  return detail::empty_fields();
}

inline const FieldSpec* find_field(NodeKind kind, std::string_view name) {
  const auto& specs = fields_for(kind);
  auto it = std::find_if(specs.begin(), specs.end(), [&](const FieldSpec& s) { return s.name == name; });
  return it == specs.end() ? nullptr : &*it;
}

// containerField a child gets when the attribute is absent.
inline std::string_view default_container_field(NodeKind kind) {
  switch (kind) {
    case NodeKind::Appearance: return "appearance";
    case NodeKind::Material: return "material";
    case NodeKind::FrictionalSurface: return "surface";
    case NodeKind::Sphere:
    case NodeKind::Cylinder:
    case NodeKind::Box: return "geometry";
    case NodeKind::HLHapticsDevice: return "device";
    default: return "children";
  }
}

inline bool is_child_node(NodeKind k) {
  switch (k) {
    case NodeKind::Group:
    case NodeKind::Transform:
    case NodeKind::Shape:
    case NodeKind::DeviceInfo:
    case NodeKind::DynamicTransform:
    case NodeKind::Inline: return true;
    default: return false;
  }
}

inline bool is_geometry_node(NodeKind k) {
  return k == NodeKind::Sphere || k == NodeKind::Cylinder || k == NodeKind::Box;
}

// Whether `child` may sit in `parent` under `container_field`.
inline bool container_field_legal(NodeKind parent, std::string_view container_field, NodeKind child) {
  switch (parent) {
    case NodeKind::Scene:
    case NodeKind::Group:
    case NodeKind::Transform:
    case NodeKind::DynamicTransform:
      return container_field == "children" && is_child_node(child);
    case NodeKind::Shape:
      if (container_field == "appearance") return child == NodeKind::Appearance;
      if (container_field == "geometry") return is_geometry_node(child);
      return false;
    case NodeKind::Appearance:
      if (container_field == "material") return child == NodeKind::Material;
      if (container_field == "surface") return child == NodeKind::FrictionalSurface;
      return false;
    case NodeKind::DeviceInfo:
      return container_field == "device" && child == NodeKind::HLHapticsDevice;
    case NodeKind::HLHapticsDevice:
      return container_field == "stylus" && is_child_node(child);
    default:
      return false;
  }
}

// Populates every legal field that is absent with its default.
inline void fill_defaults(Node& node) {
  for (const FieldSpec& spec : fields_for(node.kind))
    if (!node.fields.contains(spec.name)) node.fields.emplace(std::string(spec.name), spec.default_value);
}

}  // namespace hx3d::x3d
