#pragma once

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <system_error>
#include <utility>
#include <vector>

#include "hx3d/linac/geometry.hpp"
#include "hx3d/x3d/parser.hpp"
#include "hx3d/x3d/validate.hpp"

namespace hx3d::linac {

inline constexpr std::string_view kSceneExtension = ".x3d";

// Read-through: the directory is scanned on every call.
inline std::vector<std::string> list_attachments(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::directory_iterator it(dir, ec);
  if (ec) throw LinacError(LinacErrorCode::DirectoryUnreadable, dir.string() + ": " + ec.message());
  std::vector<std::string> names;
  for (const auto& entry : it) {
    std::error_code fe;
    if (!entry.is_regular_file(fe) || fe) continue;
    if (entry.path().extension() == kSceneExtension) names.push_back(entry.path().stem().string());
  }
  std::sort(names.begin(), names.end());
  return names;
}

inline std::string read_text_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw LinacError(LinacErrorCode::NotFound, "cannot open " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses and validates an attachment file. Any diagnostic rejects it.
inline x3d::Document read_attachment(const std::filesystem::path& dir, const std::string& name) {
  const auto names = list_attachments(dir);
  if (!std::binary_search(names.begin(), names.end(), name))
    throw LinacError(LinacErrorCode::NotFound, "no attachment named '" + name + "'");
  x3d::Document att;
  try {
    att = x3d::parse_x3d(read_text_file(dir / (name + std::string(kSceneExtension))));
  } catch (const x3d::ParseError& e) {
    throw LinacError(LinacErrorCode::ParseFailed, name + ": " + e.what());
  }
  auto diags = x3d::validate(att);
  if (!diags.empty()) {
    const std::string what = name + ": " + diags.front().message;
    throw LinacError(LinacErrorCode::ParseFailed, what, std::move(diags));
  }
  return att;
}

struct LoadResult {
  x3d::Document doc;
  LinacGeometry geometry;
  std::size_t instance = 0;  // 1-based instance number of this attachment name
};

// Grafts the attachment's top-level nodes under the COLLIMATOR frame of `doc`
// and adds its solids to the geometry. DEF names inside the graft are
// prefixed per instance so repeated loads stay independent.
inline LoadResult load_attachment(const x3d::Document& doc, const LinacGeometry& geo, const std::filesystem::path& dir,
                                  const std::string& name) {
  auto it = doc.defs.find(kCollimatorDef);
  if (it == doc.defs.end()) throw LinacError(LinacErrorCode::InvalidGeometry, "scene has no COLLIMATOR frame");
  const x3d::Document att = read_attachment(dir, name);

  std::size_t instance = 1;
  const std::string stem = name + "#";
  for (const Part& p : geo.attachments)
    if (p.name.rfind(stem, 0) == 0) instance = std::max(instance, std::stoul(p.name.substr(stem.size())) + 1);
  const std::string prefix = name + "_" + std::to_string(instance) + "_";
  const std::string part_prefix = stem + std::to_string(instance) + "/";

  LoadResult r{doc, geo, instance};
  x3d::Node* collimator = x3d::node_at(r.doc.root, it->second);

  x3d::Node graft = att.root;
  x3d::for_each_node(graft, [&](const x3d::Node&, const x3d::NodePath& p) {
    x3d::Node* n = x3d::node_at(graft, p);
    if (!n->def.empty()) n->def = prefix + n->def;
  });
  for (const auto& c : graft.children) collimator->add_child(c.container_field, c.node());
  for (x3d::Route route : att.routes) {
    route.from_node = prefix + route.from_node;
    route.to_node = prefix + route.to_node;
    r.doc.routes.push_back(std::move(route));
  }
  x3d::rebuild_defs(r.doc);

  std::size_t k = 0;
  x3d::for_each_node(att.root, [&](const x3d::Node& n, const x3d::NodePath& p) {
    if (!x3d::is_geometry_node(n.kind)) return;
    const std::string label = n.def.empty() ? std::to_string(k) : n.def;
    ++k;
    r.geometry.attachments.push_back(
        {part_prefix + label, Frame::Collimator, geometry::primitive_from_node(n), scene::world_transform(att.root, p)});
  });
  validate(r.geometry);
  return r;
}

}  // namespace hx3d::linac
