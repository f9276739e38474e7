#pragma once

#include <charconv>
#include <string>
#include <variant>

#include "hx3d/x3d/schema.hpp"
#include "hx3d/x3d/types.hpp"

namespace hx3d::x3d {

// Shortest representation that parses back to the same double.
inline std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return ec == std::errc{} ? std::string(buf, ptr) : std::string("0");
}

inline std::string escape_xml_attribute(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string format_field(const FieldValue& value) {
  auto join = [](const auto& values) {
    std::string s;
    for (double d : values) {
      if (!s.empty()) s += ' ';
      s += format_number(d);
    }
    return s;
  };
  return std::visit(
      [&](const auto& v) -> std::string {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, SFFloat>) return format_number(v.value);
        else if constexpr (std::is_same_v<T, SFVec3f>) return join(v.v);
        else if constexpr (std::is_same_v<T, SFColor>) return join(v.rgb);
        else if constexpr (std::is_same_v<T, SFRotation>)
          return join(v.axis) + ' ' + format_number(v.angle);
        else if constexpr (std::is_same_v<T, SFMatrix4>) return join(v.m);
        else if constexpr (std::is_same_v<T, SFString>) return escape_xml_attribute(v.value);
        else return join(v.values);
      },
      value);
}

namespace detail {

inline void write_node(std::string& out, const Node& node, std::string_view container, int depth) {
  const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
  out += indent;
  out += '<';
  out += to_string(node.kind);
  if (!node.def.empty()) out += " DEF=\"" + escape_xml_attribute(node.def) + "\"";
  for (const FieldSpec& spec : fields_for(node.kind)) {
    const FieldValue* v = node.field(spec.name);
    if (!v || *v == spec.default_value) continue;
    out += ' ';
    out += spec.name;
    out += "=\"" + format_field(*v) + "\"";
  }
  if (container != default_container_field(node.kind))
    out += " containerField=\"" + escape_xml_attribute(container) + "\"";
  if (node.children.empty()) {
    out += "/>\n";
    return;
  }
  out += ">\n";
  for (const Child& c : node.children) write_node(out, c.node(), c.container_field, depth + 1);
  out += indent + "</" + std::string(to_string(node.kind)) + ">\n";
}

}  // namespace detail

// Canonical XML encoding: two-space indentation, DEF first, non-default fields
// in schema order, routes after the node tree.
inline std::string serialize_x3d(const Document& doc) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<X3D profile=\"Immersive\" version=\"3.3\">\n";
  if (doc.root.children.empty() && doc.routes.empty()) {
    out += "  <Scene/>\n</X3D>\n";
    return out;
  }
  out += "  <Scene>\n";
  for (const Child& c : doc.root.children) detail::write_node(out, c.node(), c.container_field, 2);
  for (const Route& r : doc.routes) {
    out += "    <ROUTE fromNode=\"" + escape_xml_attribute(r.from_node) + "\" fromField=\"" +
           escape_xml_attribute(r.from_field) + "\" toNode=\"" + escape_xml_attribute(r.to_node) + "\" toField=\"" +
           escape_xml_attribute(r.to_field) + "\"/>\n";
  }
  out += "  </Scene>\n</X3D>\n";
  return out;
}

}  // namespace hx3d::x3d
