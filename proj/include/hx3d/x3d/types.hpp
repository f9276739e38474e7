#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hx3d::x3d {

// ---------------------------------------------------------------------------
// Field values
// ---------------------------------------------------------------------------

struct SFFloat {
  double value = 0.0;
  bool operator==(const SFFloat&) const = default;
};

struct SFVec3f {
  std::array<double, 3> v{0.0, 0.0, 0.0};
  bool operator==(const SFVec3f&) const = default;
};

// Axis is unit length once constructed through make_rotation().
struct SFRotation {
  std::array<double, 3> axis{0.0, 0.0, 1.0};
  double angle = 0.0;
  bool operator==(const SFRotation&) const = default;
};

// Row-major 4x4.
struct SFMatrix4 {
  std::array<double, 16> m{1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1, 0, 0, 0, 0, 1};
  double at(std::size_t row, std::size_t col) const { return m[row * 4 + col]; }
  bool operator==(const SFMatrix4&) const = default;
};

struct SFString {
  std::string value;
  bool operator==(const SFString&) const = default;
};

struct SFColor {
  std::array<double, 3> rgb{0.0, 0.0, 0.0};
  bool operator==(const SFColor&) const = default;
};

struct MFFloat {
  std::vector<double> values;
  bool operator==(const MFFloat&) const = default;
};

using FieldValue = std::variant<SFFloat, SFVec3f, SFRotation, SFMatrix4, SFString, SFColor, MFFloat>;

enum class FieldType { SFFloat, SFVec3f, SFRotation, SFMatrix4, SFString, SFColor, MFFloat };

inline FieldType type_of(const FieldValue& v) { return static_cast<FieldType>(v.index()); }

inline std::string_view to_string(FieldType t) {
  switch (t) {
    case FieldType::SFFloat: return "SFFloat";
    case FieldType::SFVec3f: return "SFVec3f";
    case FieldType::SFRotation: return "SFRotation";
    case FieldType::SFMatrix4: return "SFMatrix4f";
    case FieldType::SFString: return "SFString";
    case FieldType::SFColor: return "SFColor";
    case FieldType::MFFloat: return "MFFloat";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Nodes
// ---------------------------------------------------------------------------

enum class NodeKind {
  Scene,
  Group,
  Transform,
  Shape,
  Appearance,
  Material,
  FrictionalSurface,
  Sphere,
  Cylinder,
  Box,
  DeviceInfo,
  HLHapticsDevice,
  DynamicTransform,
  Inline,
};

inline constexpr std::array<NodeKind, 14> kAllNodeKinds{
    NodeKind::Scene,      NodeKind::Group,      NodeKind::Transform,         NodeKind::Shape,
    NodeKind::Appearance, NodeKind::Material,   NodeKind::FrictionalSurface, NodeKind::Sphere,
    NodeKind::Cylinder,   NodeKind::Box,        NodeKind::DeviceInfo,        NodeKind::HLHapticsDevice,
    NodeKind::DynamicTransform, NodeKind::Inline};

inline std::string_view to_string(NodeKind k) {
  switch (k) {
    case NodeKind::Scene: return "Scene";
    case NodeKind::Group: return "Group";
    case NodeKind::Transform: return "Transform";
    case NodeKind::Shape: return "Shape";
    case NodeKind::Appearance: return "Appearance";
    case NodeKind::Material: return "Material";
    case NodeKind::FrictionalSurface: return "FrictionalSurface";
    case NodeKind::Sphere: return "Sphere";
    case NodeKind::Cylinder: return "Cylinder";
    case NodeKind::Box: return "Box";
    case NodeKind::DeviceInfo: return "DeviceInfo";
    case NodeKind::HLHapticsDevice: return "HLHapticsDevice";
    case NodeKind::DynamicTransform: return "DynamicTransform";
    case NodeKind::Inline: return "Inline";
  }
  return "?";
}

inline std::optional<NodeKind> node_kind_from_string(std::string_view name) {
  for (NodeKind k : kAllNodeKinds)
    if (to_string(k) == name) return k;
  return std::nullopt;
}

struct Node;

struct Child {
  std::string container_field;
  // Held through a vector of one so Node can stay a complete value type.
  std::vector<Node> slot;

  const Node& node() const { return slot.front(); }
  Node& node() { return slot.front(); }
  bool operator==(const Child&) const;
};

struct Node {
  NodeKind kind = NodeKind::Group;
  std::string def;
  std::map<std::string, FieldValue, std::less<>> fields;
  std::vector<Child> children;

  const FieldValue* field(std::string_view name) const {
    auto it = fields.find(name);
    return it == fields.end() ? nullptr : &it->second;
  }

  template <class T>
  const T& get(std::string_view name) const {
    const FieldValue* v = field(name);
    if (!v) throw std::out_of_range("no field '" + std::string(name) + "' on " + std::string(to_string(kind)));
    return std::get<T>(*v);
  }

  void add_child(std::string container_field, Node child) {
    Child c;
    c.container_field = std::move(container_field);
    c.slot.push_back(std::move(child));
    children.push_back(std::move(c));
  }

  bool operator==(const Node&) const = default;
};

inline bool Child::operator==(const Child& other) const {
  return container_field == other.container_field && slot == other.slot;
}

// Child indices from the Scene root.
using NodePath = std::vector<std::size_t>;

struct Route {
  std::string from_node;
  std::string from_field;
  std::string to_node;
  std::string to_field;
  bool operator==(const Route&) const = default;
};

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

enum class DiagnosticCode {
  UnknownElement,
  UnknownField,
  BadFieldCount,
  DanglingRoute,
  DuplicateDef,
  IllegalContainerField,
  NonPositiveDimension,
  NegativeValue,
  UnsupportedAttribute,
};

inline std::string_view to_string(DiagnosticCode c) {
  switch (c) {
    case DiagnosticCode::UnknownElement: return "UnknownElement";
    case DiagnosticCode::UnknownField: return "UnknownField";
    case DiagnosticCode::BadFieldCount: return "BadFieldCount";
    case DiagnosticCode::DanglingRoute: return "DanglingRoute";
    case DiagnosticCode::DuplicateDef: return "DuplicateDef";
    case DiagnosticCode::IllegalContainerField: return "IllegalContainerField";
    case DiagnosticCode::NonPositiveDimension: return "NonPositiveDimension";
    case DiagnosticCode::NegativeValue: return "NegativeValue";
    case DiagnosticCode::UnsupportedAttribute: return "UnsupportedAttribute";
  }
  return "?";
}

struct Diagnostic {
  DiagnosticCode code;
  std::string where;  // DEF name, element name, or route text
  std::string message;
  bool operator==(const Diagnostic&) const = default;
};

// ---------------------------------------------------------------------------
// Document
// ---------------------------------------------------------------------------

struct Document {
  Node root{NodeKind::Scene, {}, {}, {}};
  std::vector<Route> routes;
  std::map<std::string, NodePath, std::less<>> defs;
  // Non-fatal notes collected while parsing; not part of structural equality.
  std::vector<Diagnostic> diagnostics;

  bool operator==(const Document& other) const { return root == other.root && routes == other.routes; }
};

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

enum class ParseErrorCode { MalformedMarkup, FieldTypeError, BadFieldCount, UnsupportedEncoding, MissingScene };

inline std::string_view to_string(ParseErrorCode c) {
  switch (c) {
    case ParseErrorCode::MalformedMarkup: return "MalformedMarkup";
    case ParseErrorCode::FieldTypeError: return "FieldTypeError";
    case ParseErrorCode::BadFieldCount: return "BadFieldCount";
    case ParseErrorCode::UnsupportedEncoding: return "UnsupportedEncoding";
    case ParseErrorCode::MissingScene: return "MissingScene";
  }
  return "?";
}

class ParseError : public std::runtime_error {
 public:
  ParseError(ParseErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}
  ParseErrorCode code() const noexcept { return code_; }

 private:
  ParseErrorCode code_;
};

// ---------------------------------------------------------------------------
// Tree helpers
// ---------------------------------------------------------------------------

inline const Node* node_at(const Node& root, const NodePath& path) {
  const Node* n = &root;
  for (std::size_t i : path) {
    if (i >= n->children.size()) return nullptr;
    n = &n->children[i].node();
  }
  return n;
}

inline Node* node_at(Node& root, const NodePath& path) {
  Node* n = &root;
  for (std::size_t i : path) {
    if (i >= n->children.size()) return nullptr;
    n = &n->children[i].node();
  }
  return n;
}

// Visits every node in document (pre-)order with its path.
template <class Fn>
void for_each_node(const Node& root, Fn&& fn, NodePath& path) {
  fn(root, path);
  for (std::size_t i = 0; i < root.children.size(); ++i) {
    path.push_back(i);
    for_each_node(root.children[i].node(), fn, path);
    path.pop_back();
  }
}

template <class Fn>
void for_each_node(const Node& root, Fn&& fn) {
  NodePath path;
  for_each_node(root, fn, path);
}

inline std::size_t count_nodes(const Node& root) {
  std::size_t n = 0;
  for_each_node(root, [&](const Node&, const NodePath&) { ++n; });
  return n;
}

// Rebuilds the DEF table from the tree. First occurrence wins on duplicates.
inline void rebuild_defs(Document& doc) {
  doc.defs.clear();
  for_each_node(doc.root, [&](const Node& n, const NodePath& p) {
    if (!n.def.empty()) doc.defs.emplace(n.def, p);
  });
}

}  // namespace hx3d::x3d
