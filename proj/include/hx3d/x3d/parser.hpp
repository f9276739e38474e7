#pragma once

#include <algorithm>
#include <charconv>
#include <limits>
#include <cmath>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "hx3d/x3d/schema.hpp"
#include "hx3d/x3d/types.hpp"

namespace hx3d::x3d {

namespace detail {

namespace pt = boost::property_tree;

inline constexpr std::string_view kAttrKey = "<xmlattr>";

inline bool is_markup_key(std::string_view key) { return !key.empty() && key.front() == '<'; }

// Splits on whitespace and commas (X3D allows both as separators).
inline std::vector<std::string_view> split_tokens(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  auto sep = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == ','; };
  while (i < text.size()) {
    while (i < text.size() && sep(text[i])) ++i;
    std::size_t j = i;
    while (j < text.size() && !sep(text[j])) ++j;
    if (j > i) out.push_back(text.substr(i, j - i));
    i = j;
  }
  return out;
}

// Accepts leading-dot and leading-plus literals (".05", "+1e-3").
inline double parse_number(std::string_view tok, std::string_view context) {
  std::string_view body = tok;
  if (!body.empty() && body.front() == '+') body.remove_prefix(1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(body.data(), body.data() + body.size(), value);
  if (ec != std::errc{} || ptr != body.data() + body.size() || body.empty() || !std::isfinite(value))
    throw ParseError(ParseErrorCode::FieldTypeError,
                     std::string(context) + ": '" + std::string(tok) + "' is not a finite number");
  return value;
}

inline std::vector<double> parse_numbers(std::string_view text, std::string_view context) {
  std::vector<double> out;
  for (std::string_view tok : split_tokens(text)) out.push_back(parse_number(tok, context));
  return out;
}

inline void require_count(const std::vector<double>& v, std::size_t n, std::string_view context) {
  if (v.size() != n)
    throw ParseError(ParseErrorCode::BadFieldCount, std::string(context) + ": expected " + std::to_string(n) +
                                                        " values, got " + std::to_string(v.size()));
}

}  // namespace detail

// Builds a rotation with a unit axis. Throws FieldTypeError on a zero axis.
inline SFRotation make_rotation(double x, double y, double z, double angle) {
  const double n2 = x * x + y * y + z * z;
  if (!(n2 > 0.0) || !std::isfinite(n2))
    throw ParseError(ParseErrorCode::FieldTypeError, "rotation axis must have nonzero length");
  SFRotation r;
  r.angle = angle;
  // Already-unit axes are kept bit-for-bit so that re-parsing is a fixed point.
  if (std::abs(n2 - 1.0) <= 4.0 * std::numeric_limits<double>::epsilon()) {
    r.axis = {x, y, z};
  } else {
    const double n = std::sqrt(n2);
    r.axis = {x / n, y / n, z / n};
  }
  return r;
}

// Parses a field's attribute text against its declared type. MFFloat fields
// with a fixed arity that are short are padded from the default and reported
// through `diags`; every other arity mismatch is fatal.
inline FieldValue parse_field_value(const FieldSpec& spec, std::string_view text, std::string_view context,
                                    std::vector<Diagnostic>* diags = nullptr) {
  using detail::parse_numbers;
  using detail::require_count;
  switch (spec.type()) {
    case FieldType::SFFloat: {
      auto v = parse_numbers(text, context);
      require_count(v, 1, context);
      return SFFloat{v[0]};
    }
    case FieldType::SFVec3f: {
      auto v = parse_numbers(text, context);
      require_count(v, 3, context);
      return SFVec3f{{v[0], v[1], v[2]}};
    }
    case FieldType::SFColor: {
      auto v = parse_numbers(text, context);
      require_count(v, 3, context);
      return SFColor{{v[0], v[1], v[2]}};
    }
    case FieldType::SFRotation: {
      auto v = parse_numbers(text, context);
      require_count(v, 4, context);
      return make_rotation(v[0], v[1], v[2], v[3]);
    }
    case FieldType::SFMatrix4: {
      auto v = parse_numbers(text, context);
      require_count(v, 16, context);
      SFMatrix4 m;
      std::copy(v.begin(), v.end(), m.m.begin());
      return m;
    }
    case FieldType::SFString:
      return SFString{std::string(text)};
    case FieldType::MFFloat: {
      auto v = parse_numbers(text, context);
      if (spec.mf_arity != 0 && v.size() != spec.mf_arity) {
        if (v.size() > spec.mf_arity)
          require_count(v, spec.mf_arity, context);
        const auto& def = std::get<MFFloat>(spec.default_value).values;
        const std::size_t given = v.size();
        for (std::size_t i = given; i < spec.mf_arity; ++i) v.push_back(def[i]);
        if (diags)
          diags->push_back({DiagnosticCode::BadFieldCount, std::string(context),
                            "expected " + std::to_string(spec.mf_arity) + " values, got " + std::to_string(given) +
                                "; padded from default"});
      }
      return MFFloat{std::move(v)};
    }
  }
  throw ParseError(ParseErrorCode::FieldTypeError, std::string(context) + ": unsupported field type");
}

namespace detail {

class TreeBuilder {
 public:
  explicit TreeBuilder(Document& doc) : doc_(doc) {}

  void build_scene(const pt::ptree& scene) {
    doc_.root = Node{NodeKind::Scene, {}, {}, {}};
    read_children(scene, doc_.root);
    rebuild_defs(doc_);
  }

 private:
  void read_children(const pt::ptree& elem, Node& parent) {
    for (const auto& [key, child] : elem) {
      if (is_markup_key(key)) continue;
      if (key == "ROUTE") {
        read_route(child);
        continue;
      }
      auto kind = node_kind_from_string(key);
      if (!kind || *kind == NodeKind::Scene) {
        doc_.diagnostics.push_back(
            {DiagnosticCode::UnknownElement, key, "element <" + key + "> is not part of the supported subset; skipped"});
        continue;
      }
      std::string container(default_container_field(*kind));
      Node node = read_node(*kind, key, child, container);
      parent.add_child(std::move(container), std::move(node));
    }
  }

  Node read_node(NodeKind kind, const std::string& tag, const pt::ptree& elem, std::string& container) {
    Node node;
    node.kind = kind;
    if (auto attrs = elem.get_child_optional(std::string(kAttrKey))) {
      if (auto def = attrs->get_optional<std::string>("DEF")) node.def = *def;
      const std::string where = node.def.empty() ? tag : tag + " " + node.def;
      for (const auto& [name, value] : *attrs) {
        const std::string& text = value.data();
        if (name == "DEF") continue;
        if (name == "containerField") {
          container = text;
          continue;
        }
        if (name == "USE") {
          doc_.diagnostics.push_back({DiagnosticCode::UnsupportedAttribute, where, "USE is not supported; ignored"});
          continue;
        }
        const FieldSpec* spec = find_field(kind, name);
        if (!spec) {
          doc_.diagnostics.push_back(
              {DiagnosticCode::UnknownField, where, "field '" + name + "' is not legal on " + tag + "; ignored"});
          continue;
        }
        node.fields.insert_or_assign(name, parse_field_value(*spec, text, where + "." + name, &doc_.diagnostics));
      }
    }
    fill_defaults(node);
    read_children(elem, node);
    return node;
  }

  void read_route(const pt::ptree& elem) {
    Route r;
    if (auto attrs = elem.get_child_optional(std::string(kAttrKey))) {
      r.from_node = attrs->get("fromNode", "");
      r.from_field = attrs->get("fromField", "");
      r.to_node = attrs->get("toNode", "");
      r.to_field = attrs->get("toField", "");
    }
    doc_.routes.push_back(std::move(r));
  }

  Document& doc_;
};

inline bool looks_like_classic_vrml(std::string_view text) {
  if (text.size() >= 3 && static_cast<unsigned char>(text[0]) == 0xEF &&
      static_cast<unsigned char>(text[1]) == 0xBB && static_cast<unsigned char>(text[2]) == 0xBF)
    text.remove_prefix(3);
  std::size_t i = text.find_first_not_of(" \t\r\n");
  if (i == std::string_view::npos) return false;
  text.remove_prefix(i);
  return text.starts_with("#VRML") || text.starts_with("#X3D");
}

}  // namespace detail

// Parses the XML encoding of the supported X3D subset. Unknown elements and
// fields are skipped and reported in Document::diagnostics.
inline Document parse_x3d(std::string_view text) {
  namespace pt = boost::property_tree;
  if (detail::looks_like_classic_vrml(text))
    throw ParseError(ParseErrorCode::UnsupportedEncoding, "classic VRML encoding is not supported; use XML");

  pt::ptree tree;
  try {
    std::istringstream in{std::string(text)};
    pt::read_xml(in, tree);
  } catch (const pt::xml_parser_error& e) {
    throw ParseError(ParseErrorCode::MalformedMarkup, e.what());
  } catch (const pt::ptree_error& e) {
    throw ParseError(ParseErrorCode::MalformedMarkup, e.what());
  }

  const pt::ptree* scene = nullptr;
  for (const auto& [key, child] : tree) {
    if (key == "Scene") {
      scene = &child;
      break;
    }
    if (key == "X3D") {
      for (const auto& [k2, c2] : child)
        if (k2 == "Scene") {
          scene = &c2;
          break;
        }
      break;
    }
  }
  if (!scene) throw ParseError(ParseErrorCode::MissingScene, "document has no <Scene> element");

  Document doc;
  detail::TreeBuilder(doc).build_scene(*scene);
  return doc;
}

}  // namespace hx3d::x3d
