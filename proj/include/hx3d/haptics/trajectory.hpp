#pragma once

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "hx3d/haptics/contact.hpp"
#include "hx3d/x3d/parser.hpp"
#include "hx3d/x3d/serializer.hpp"

namespace hx3d::haptics {

// One replay line: `t x y z`.
struct TrajectorySample {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
};

// Blank lines and lines starting with '#' are ignored.
inline std::vector<TrajectorySample> read_trajectory(std::istream& in) {
  std::vector<TrajectorySample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto tokens = x3d::detail::split_tokens(line);
    if (tokens.size() != 4)
      throw std::runtime_error("trajectory line " + std::to_string(line_no) + ": expected 't x y z'");
    double v[4];
    try {
      for (int i = 0; i < 4; ++i) v[i] = x3d::detail::parse_number(tokens[static_cast<std::size_t>(i)], "trajectory");
    } catch (const x3d::ParseError&) {
      throw std::runtime_error("trajectory line " + std::to_string(line_no) + ": non-numeric value");
    }
    out.push_back({v[0], Vec3(v[1], v[2], v[3])});
  }
  return out;
}

inline void write_trajectory(std::ostream& out, const std::vector<TrajectorySample>& samples) {
  for (const auto& s : samples)
    out << x3d::format_number(s.t) << ' ' << x3d::format_number(s.position.x()) << ' '
        << x3d::format_number(s.position.y()) << ' ' << x3d::format_number(s.position.z()) << '\n';
}

// Drives the pipeline one tick per sample. Samples are raw device readings
// when `raw` is set, world metres otherwise.
inline std::vector<HapticDeviceState> replay_trajectory(const std::vector<TrajectorySample>& samples,
                                                        const PlacedShape& shape, const SurfaceParams& s,
                                                        const HapticDeviceConfig& cfg, bool raw = false,
                                                        double tangential_spring = 0.0) {
  std::vector<HapticDeviceState> states;
  states.reserve(samples.size());
  HapticDeviceState st;
  for (const auto& sample : samples) {
    st = raw ? device_tick(st, sample.position, shape, s, cfg, tangential_spring)
             : world_tick(st, sample.position, shape, s, cfg, tangential_spring);
    states.push_back(st);
  }
  return states;
}

}  // namespace hx3d::haptics
