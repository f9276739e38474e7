#include <pthread.h>

#include <algorithm>
#include <csignal>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "hx3d/dynamics.hpp"
#include "hx3d/haptics.hpp"
#include "hx3d/linac.hpp"
#include "hx3d/scene.hpp"
#include "hx3d/server.hpp"
#include "hx3d/x3d.hpp"

namespace {

using namespace hx3d;
using json = nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

x3d::Document load_doc(const std::string& path) { return x3d::parse_x3d(slurp(path)); }

// ---------------------------------------------------------------------------
// validate / canon
// ---------------------------------------------------------------------------

int cmd_validate(const std::vector<std::string>& files) {
  int bad = 0;
  for (const auto& f : files) {
    try {
      const auto doc = load_doc(f);
      auto diags = doc.diagnostics;
      const auto more = x3d::validate(doc);
      for (const auto& d : more)
        if (std::find(diags.begin(), diags.end(), d) == diags.end()) diags.push_back(d);
      if (diags.empty()) {
        std::cout << f << ": ok (" << x3d::count_nodes(doc.root) << " nodes, " << doc.routes.size() << " routes)\n";
        continue;
      }
      ++bad;
      for (const auto& d : diags)
        std::cout << f << ": " << x3d::to_string(d.code) << " at " << d.where << ": " << d.message << '\n';
    } catch (const std::exception& e) {
      ++bad;
      std::cout << f << ": " << e.what() << '\n';
    }
  }
  return bad == 0 ? 0 : 1;
}

int cmd_canon(const std::string& file) {
  std::cout << x3d::serialize_x3d(load_doc(file));
  return 0;
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

struct SweepArgs {
  std::string scene;
  std::vector<double> gantry{0.0, 360.0};
  double step = 1.0;
  double collimator = 0.0;
  linac::CouchPose couch;
  double clearance = 0.0;
  bool verbose = false;
};

int cmd_sweep(const SweepArgs& a) {
  const linac::LinacGeometry geo = a.scene.empty() ? linac::reference_geometry() : linac::geometry_from_document(load_doc(a.scene));
  linac::BeamArrangement plan;
  plan.arc = a.gantry.size() > 1;
  plan.step_deg = a.step;
  for (double g : a.gantry) plan.points.push_back({g, a.collimator, a.couch});
  const auto entries = linac::sweep_beam_arrangement(plan, geo, a.clearance);
  const auto intervals = linac::colliding_intervals(entries);

  json out{{"samples", entries.size()}, {"intervals", json::array()}};
  for (const auto& iv : intervals) out["intervals"].push_back({{"from", iv.from_deg}, {"to", iv.to_deg}});
  if (a.verbose) {
    out["entries"] = json::array();
    for (const auto& e : entries) {
      json pairs = json::array();
      for (const auto& p : e.report.pairs) pairs.push_back({{"a", p.part_a}, {"b", p.part_b}, {"distance", p.min_distance}});
      out["entries"].push_back({{"gantry", e.gantry_deg}, {"colliding", e.report.colliding}, {"pairs", pairs}});
    }
  }
  std::cout << out.dump(2) << '\n';
  return intervals.empty() ? 0 : 2;
}

// ---------------------------------------------------------------------------
// probe / replay: bind the device to one shape of a scene
// ---------------------------------------------------------------------------

struct Touchable {
  haptics::PlacedShape shape;
  haptics::SurfaceParams surface;
  haptics::HapticDeviceConfig device;
};

// First Shape named `def` by itself, its geometry or any ancestor; the first
// shape at all when `def` is empty.
Touchable touchable_from(const x3d::Document& doc, const std::string& def) {
  std::optional<Touchable> found;
  x3d::for_each_node(doc.root, [&](const x3d::Node& n, const x3d::NodePath& path) {
    if (found || n.kind != x3d::NodeKind::Shape) return;
    const x3d::Node* geom = nullptr;
    const x3d::Node* surface = nullptr;
    for (const auto& c : n.children) {
      if (x3d::is_geometry_node(c.node().kind)) geom = &c.node();
      if (c.node().kind == x3d::NodeKind::Appearance)
        for (const auto& ac : c.node().children)
          if (ac.node().kind == x3d::NodeKind::FrictionalSurface) surface = &ac.node();
    }
    if (!geom) return;
    if (!def.empty() && geom->def != def) {
      bool named = false;
      for (std::size_t k = 0; k <= path.size() && !named; ++k)
        named = x3d::node_at(doc.root, x3d::NodePath(path.begin(), path.begin() + static_cast<std::ptrdiff_t>(k)))->def == def;
      if (!named) return;
    }
    Touchable t;
    t.shape = {geometry::primitive_from_node(*geom), scene::world_transform(doc.root, path)};
    if (surface) t.surface = haptics::surface_from_node(*surface);
    found = t;
  });
  if (!found) throw std::runtime_error(def.empty() ? "scene has no shape" : "no shape named '" + def + "'");
  x3d::for_each_node(doc.root, [&](const x3d::Node& n, const x3d::NodePath&) {
    if (n.kind == x3d::NodeKind::HLHapticsDevice) found->device.calibration = haptics::calibration_from_node(n);
  });
  return *found;
}

json vec(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

int cmd_probe(const std::string& scene, const std::string& def, const std::string& kind_name) {
  const auto kind = haptics::probe_kind_from_string(kind_name);
  if (!kind) throw std::runtime_error("unknown probe '" + kind_name + "' (stroke, press, contour, enclosure)");
  const Touchable t = touchable_from(load_doc(scene), def);
  const auto r = haptics::exploration_probe(*kind, t.shape, t.surface, t.device);
  json out{{"probe", haptics::to_string(r.kind)}, {"ticks", r.ticks}};
  switch (r.kind) {
    case haptics::ProbeKind::Stroke: out["roughness"] = r.roughness; break;
    case haptics::ProbeKind::Press: out["firmness"] = r.firmness; break;
    case haptics::ProbeKind::ContourFollow:
      out["contour"] = json::array();
      for (const auto& p : r.contour) out["contour"].push_back(vec(p));
      break;
    case haptics::ProbeKind::Enclosure: out["volume"] = r.volume; break;
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_replay(const std::string& scene, const std::string& def, const std::string& trajectory, bool raw) {
  const Touchable t = touchable_from(load_doc(scene), def);
  std::ifstream in(trajectory);
  if (!in) throw std::runtime_error("cannot open " + trajectory);
  const auto samples = haptics::read_trajectory(in);
  const auto states = haptics::replay_trajectory(samples, t.shape, t.surface, t.device, raw);
  std::cout << "# t x y z fx fy fz sticking\n";
  for (std::size_t i = 0; i < states.size(); ++i) {
    const auto& s = states[i];
    std::cout << x3d::format_number(samples[i].t) << ' ' << x3d::format_number(s.position.x()) << ' '
              << x3d::format_number(s.position.y()) << ' ' << x3d::format_number(s.position.z()) << ' '
              << x3d::format_number(s.output_force.x()) << ' ' << x3d::format_number(s.output_force.y()) << ' '
              << x3d::format_number(s.output_force.z()) << ' ' << (s.sticking ? 1 : 0) << '\n';
  }
  return 0;
}

// ---------------------------------------------------------------------------
// serve
// ---------------------------------------------------------------------------

int cmd_serve(const server::SimSettings& settings, const std::string& host, int port) {
  // SIGINT/SIGTERM are taken by a waiter thread; every other thread inherits
  // the blocked mask.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  server::Engine engine(settings);
  server::HttpServer http(engine);
  if (!http.bind(host, port)) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
  engine.start();
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    http.stop();
  });
  std::cerr << "hx3d serving on http://" << host << ':' << port << " (tick " << settings.tick_hz << " Hz, publish "
            << settings.publish_hz << " Hz)\n";
  http.serve();
  // Unblock the waiter if serve() returned on its own.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  engine.stop();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Web 3D + haptics e-learning engine"};
  app.require_subcommand(1);

  std::vector<std::string> files;
  auto* validate = app.add_subcommand("validate", "Parse and validate X3D files");
  validate->add_option("files", files, "X3D files")->required()->check(CLI::ExistingFile);

  std::string canon_file;
  auto* canon = app.add_subcommand("canon", "Print the canonical serialization of an X3D file");
  canon->add_option("file", canon_file)->required()->check(CLI::ExistingFile);

  SweepArgs sweep_args;
  auto* sweep = app.add_subcommand("sweep", "Collision check a gantry arc; exit 2 if anything collides");
  sweep->add_option("--scene", sweep_args.scene, "Linac scene (default: built-in reference machine)")->check(CLI::ExistingFile);
  sweep->add_option("--gantry", sweep_args.gantry, "Control point gantry angles, deg")->capture_default_str();
  sweep->add_option("--step", sweep_args.step, "Arc sampling step, deg")->capture_default_str();
  sweep->add_option("--collimator", sweep_args.collimator, "Collimator angle, deg");
  sweep->add_option("--couch-rotation", sweep_args.couch.rotation_deg, "deg");
  sweep->add_option("--couch-vertical", sweep_args.couch.vertical_m, "m");
  sweep->add_option("--couch-longitudinal", sweep_args.couch.longitudinal_m, "m");
  sweep->add_option("--couch-lateral", sweep_args.couch.lateral_m, "m");
  sweep->add_option("--clearance", sweep_args.clearance, "Near-miss threshold, m");
  sweep->add_flag("-v,--verbose", sweep_args.verbose, "Print every sample");

  std::string probe_scene, probe_shape, probe_kind = "press";
  auto* probe = app.add_subcommand("probe", "Run a haptic exploration probe against one shape");
  probe->add_option("scene", probe_scene)->required()->check(CLI::ExistingFile);
  probe->add_option("--shape", probe_shape, "DEF of the shape, its geometry or an enclosing group");
  probe->add_option("--kind", probe_kind, "stroke | press | contour | enclosure")->capture_default_str();

  std::string replay_scene, replay_shape, replay_file;
  bool replay_raw = false;
  auto* replay = app.add_subcommand("replay", "Replay a recorded device trajectory through the force pipeline");
  replay->add_option("scene", replay_scene)->required()->check(CLI::ExistingFile);
  replay->add_option("trajectory", replay_file, "Lines of 't x y z'")->required()->check(CLI::ExistingFile);
  replay->add_option("--shape", replay_shape, "DEF of the shape, its geometry or an enclosing group");
  replay->add_flag("--raw", replay_raw, "Positions are raw device readings (apply calibration)");

  server::SimSettings settings;
  settings.scenes_dir = "scenes";
  settings.attachments_dir = "attachments";
  std::string host = "0.0.0.0";
  int port = 8080;
  std::string scenes_dir = settings.scenes_dir.string(), attachments_dir = settings.attachments_dir.string();
  auto* serve = app.add_subcommand("serve", "Run the simulation loop and HTTP server");
  // The config file lives on the root app (options go under a [serve]
  // table); fallthrough lets it follow the subcommand on the command line.
  app.set_config("--config", "", "TOML/INI file; serve options go under a [serve] table");
  serve->fallthrough();
  serve->add_option("--port", port)->capture_default_str();
  serve->add_option("--host", host)->capture_default_str();
  serve->add_option("--scenes-dir", scenes_dir)->capture_default_str();
  serve->add_option("--attachments-dir", attachments_dir)->capture_default_str();
  serve->add_option("--tick-hz", settings.tick_hz)->capture_default_str()->check(CLI::PositiveNumber);
  serve->add_option("--publish-hz", settings.publish_hz)->capture_default_str()->check(CLI::PositiveNumber);
  serve->add_option("--seed", settings.seed)->capture_default_str();
  serve->add_option("--molecules", settings.electrolysis_molecules, "Initial NaCl count")->capture_default_str();
  serve->add_option("--clearance", settings.clearance, "Linac near-miss threshold, m")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(files);
    if (*canon) return cmd_canon(canon_file);
    if (*sweep) return cmd_sweep(sweep_args);
    if (*probe) return cmd_probe(probe_scene, probe_shape, probe_kind);
    if (*replay) return cmd_replay(replay_scene, replay_shape, replay_file, replay_raw);
    if (*serve) {
      settings.scenes_dir = scenes_dir;
      settings.attachments_dir = attachments_dir;
      return cmd_serve(settings, host, port);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
