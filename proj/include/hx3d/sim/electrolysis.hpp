#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "hx3d/math.hpp"

namespace hx3d::electrolysis {

enum class Species { NaClMolecule, NaIon, ClIon, NaAtom, ClAtom, Cl2Molecule };
enum class Phase { Dissolved, AtCathode, AtAnode, Evaporated };

inline constexpr std::array<Species, 6> kAllSpecies{Species::NaClMolecule, Species::NaIon,  Species::ClIon,
                                                    Species::NaAtom,       Species::ClAtom, Species::Cl2Molecule};
inline constexpr std::array<Phase, 4> kAllPhases{Phase::Dissolved, Phase::AtCathode, Phase::AtAnode, Phase::Evaporated};

inline std::string_view to_string(Species s) {
  switch (s) {
    case Species::NaClMolecule: return "NaCl";
    case Species::NaIon: return "Na+";
    case Species::ClIon: return "Cl-";
    case Species::NaAtom: return "Na";
    case Species::ClAtom: return "Cl";
    case Species::Cl2Molecule: return "Cl2";
  }
  return "?";
}

inline std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::Dissolved: return "dissolved";
    case Phase::AtCathode: return "at_cathode";
    case Phase::AtAnode: return "at_anode";
    case Phase::Evaporated: return "evaporated";
  }
  return "?";
}

inline int charge(Species s) { return s == Species::NaIon ? 1 : s == Species::ClIon ? -1 : 0; }
inline int na_nuclei(Species s) { return s == Species::NaClMolecule || s == Species::NaIon || s == Species::NaAtom; }
inline int cl_nuclei(Species s) {
  switch (s) {
    case Species::NaClMolecule:
    case Species::ClIon:
    case Species::ClAtom: return 1;
    case Species::Cl2Molecule: return 2;
    default: return 0;
  }
}

struct Particle {
  std::uint64_t id = 0;
  Species species = Species::NaClMolecule;
  Vec3 position = Vec3::Zero();
  Phase phase = Phase::Dissolved;
  double dissociate_at = 0.0;  // reaction-clock time; molecules only
  bool operator==(const Particle& o) const {
    return id == o.id && species == o.species && position == o.position && phase == o.phase &&
           dissociate_at == o.dissociate_at;
  }
};

// Kinetics of the abstraction. Rates and speeds scale with the speed slider.
struct Kinetics {
  double dissociation_rate = 0.5;  // 1/s
  double ion_speed = 0.02;         // m/s
  double rise_speed = 0.05;        // m/s, Cl2 bubbles
};

struct ElectrolysisState {
  std::vector<Particle> particles;
  Aabb tank{Vec3(-0.1, 0.0, -0.05), Vec3(0.1, 0.12, 0.05)};
  Vec3 cathode_pos = Vec3(-0.08, 0.05, 0.0);
  Vec3 anode_pos = Vec3(0.08, 0.05, 0.0);
  double speed = 1.0;
  std::int64_t tick = 0;
  bool powered = false;
  Kinetics kinetics;
  double clock = 0.0;  // accumulated speed·dt
  std::uint64_t next_id = 0;
  std::int64_t electrons_absorbed = 0;  // at the cathode
  std::int64_t electrons_released = 0;  // at the anode
  std::size_t migrating = 0;            // ions still in transit after the last tick's move

  bool operator==(const ElectrolysisState& o) const {
    return particles == o.particles && tick == o.tick && powered == o.powered && speed == o.speed &&
           clock == o.clock && next_id == o.next_id && electrons_absorbed == o.electrons_absorbed &&
           electrons_released == o.electrons_released && migrating == o.migrating;
  }
};

namespace detail {

// Uniform in [0, 1) with 53 random bits; 1 - u >= 2^-53 bounds the
// exponential draw.
inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

// Longest possible dissociation delay on the reaction clock.
inline double max_dissociation_time(const Kinetics& k) { return 53.0 * std::log(2.0) / k.dissociation_rate; }

inline ElectrolysisState init_electrolysis(int n_molecules, std::uint64_t seed, const Kinetics& kinetics = {}) {
  if (n_molecules < 0) throw std::invalid_argument("n_molecules must be >= 0");
  ElectrolysisState s;
  s.kinetics = kinetics;
  std::mt19937_64 rng(seed);
  // Molecules start in the bulk, away from the walls and electrodes.
  const Vec3 lo = s.tank.min + Vec3(0.03, 0.01, 0.01);
  const Vec3 hi = s.tank.max - Vec3(0.03, 0.03, 0.01);
  s.particles.reserve(static_cast<std::size_t>(n_molecules));
  for (int i = 0; i < n_molecules; ++i) {
    Particle p;
    p.id = s.next_id++;
    for (int a = 0; a < 3; ++a) p.position[a] = lo[a] + (hi[a] - lo[a]) * detail::unit_draw(rng);
    p.dissociate_at = -std::log(1.0 - detail::unit_draw(rng)) / kinetics.dissociation_rate;
    s.particles.push_back(p);
  }
  return s;
}

inline Particle make_particle(ElectrolysisState& s, Species species, Phase phase, const Vec3& pos) {
  Particle p;
  p.id = s.next_id++;
  p.species = species;
  p.phase = phase;
  p.position = pos;
  return p;
}

namespace detail {

// Moves towards `target` by at most `step`; true on arrival.
inline bool advance(Vec3& pos, const Vec3& target, double step) {
  const Vec3 d = target - pos;
  const double dist = d.norm();
  if (dist <= step) {
    pos = target;
    return true;
  }
  pos += d * (step / dist);
  return false;
}

}  // namespace detail

inline ElectrolysisState step_electrolysis(const ElectrolysisState& s, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("dt must be positive");
  ElectrolysisState out = s;
  ++out.tick;
  out.migrating = 0;
  if (!s.powered || !(s.speed > 0.0)) return out;

  out.clock = s.clock + s.speed * dt;
  const double ion_step = s.kinetics.ion_speed * s.speed * dt;
  const double rise_step = s.kinetics.rise_speed * s.speed * dt;

  std::vector<Particle> next;
  next.reserve(s.particles.size() + s.particles.size() / 2 + 1);
  for (Particle p : s.particles) {
    switch (p.species) {
      case Species::NaClMolecule:
        if (p.dissociate_at <= out.clock) {
          Particle na = p;
          na.species = Species::NaIon;
          na.dissociate_at = 0.0;
          Particle cl = make_particle(out, Species::ClIon, Phase::Dissolved, p.position);
          next.push_back(na);
          next.push_back(cl);
        } else {
          next.push_back(p);
        }
        break;
      case Species::NaIon:
        if (detail::advance(p.position, s.cathode_pos, ion_step)) {
          p.species = Species::NaAtom;
          p.phase = Phase::AtCathode;
          ++out.electrons_absorbed;
        } else {
          ++out.migrating;
        }
        next.push_back(p);
        break;
      case Species::ClIon:
        if (detail::advance(p.position, s.anode_pos, ion_step)) {
          p.species = Species::ClAtom;
          p.phase = Phase::AtAnode;
          ++out.electrons_released;
        } else {
          ++out.migrating;
        }
        next.push_back(p);
        break;
      case Species::Cl2Molecule:
        if (p.phase != Phase::Evaporated) {
          p.position.y() += rise_step;
          if (p.position.y() >= s.tank.max.y()) {
            p.position.y() = s.tank.max.y();
            p.phase = Phase::Evaporated;
          }
        }
        next.push_back(p);
        break;
      default:
        next.push_back(p);
    }
  }

  // Anode pairing, oldest atoms first.
  std::vector<std::size_t> free_cl;
  for (std::size_t i = 0; i < next.size(); ++i)
    if (next[i].species == Species::ClAtom && next[i].phase == Phase::AtAnode) free_cl.push_back(i);
  if (free_cl.size() >= 2) {
    std::vector<bool> drop(next.size(), false);
    std::vector<Particle> formed;
    for (std::size_t k = 0; k + 1 < free_cl.size(); k += 2) {
      drop[free_cl[k]] = drop[free_cl[k + 1]] = true;
      formed.push_back(make_particle(out, Species::Cl2Molecule, Phase::AtAnode, next[free_cl[k]].position));
    }
    std::vector<Particle> kept;
    kept.reserve(next.size());
    for (std::size_t i = 0; i < next.size(); ++i)
      if (!drop[i]) kept.push_back(next[i]);
    kept.insert(kept.end(), formed.begin(), formed.end());
    next = std::move(kept);
  }
  out.particles = std::move(next);
  return out;
}

struct Census {
  std::map<std::pair<Species, Phase>, std::size_t> counts;
  double bulb_intensity = 0.0;

  std::size_t count(Species s) const {
    std::size_t n = 0;
    for (const auto& [k, v] : counts)
      if (k.first == s) n += v;
    return n;
  }
  std::size_t count(Species s, Phase p) const {
    auto it = counts.find({s, p});
    return it == counts.end() ? 0 : it->second;
  }
};

struct NucleiTotals {
  std::size_t na = 0;
  std::size_t cl = 0;
  bool operator==(const NucleiTotals&) const = default;
};

inline NucleiTotals nuclei(const ElectrolysisState& s) {
  NucleiTotals t;
  for (const auto& p : s.particles) {
    t.na += static_cast<std::size_t>(na_nuclei(p.species));
    t.cl += static_cast<std::size_t>(cl_nuclei(p.species));
  }
  return t;
}

// (#Na+ - #Cl-) + (absorbed - released); zero in every reachable state.
inline std::int64_t charge_balance(const ElectrolysisState& s) {
  std::int64_t q = 0;
  for (const auto& p : s.particles) q += charge(p.species);
  return q + s.electrons_absorbed - s.electrons_released;
}

// Bulb lights with the ion flux: migrating ions over all nuclei, so a tank
// where every nucleus is a moving ion reads 1.
inline Census census(const ElectrolysisState& s) {
  Census c;
  for (const auto& p : s.particles) ++c.counts[{p.species, p.phase}];
  const NucleiTotals t = nuclei(s);
  const std::size_t total = t.na + t.cl;
  if (total > 0) c.bulb_intensity = std::clamp(static_cast<double>(s.migrating) / static_cast<double>(total), 0.0, 1.0);
  return c;
}

inline bool quiescent(const ElectrolysisState& s) {
  const auto free_cl = std::count_if(s.particles.begin(), s.particles.end(), [](const Particle& p) {
    return p.species == Species::ClAtom && p.phase == Phase::AtAnode;
  });
  return free_cl < 2 && std::none_of(s.particles.begin(), s.particles.end(), [](const Particle& p) {
    return p.species == Species::NaClMolecule || p.species == Species::NaIon || p.species == Species::ClIon ||
           (p.species == Species::Cl2Molecule && p.phase != Phase::Evaporated) ||
           (p.species == Species::ClAtom && p.phase == Phase::Dissolved);
  });
}

// Upper bound on ticks to quiescence for a powered run at fixed speed and dt:
// slowest dissociation + longest straight drift in the tank + one pairing tick
// + rise through the full tank height.
inline std::int64_t quiescence_tick_bound(const ElectrolysisState& s, double dt) {
  const double per_tick = s.speed * dt;
  const double drift = (s.tank.max - s.tank.min).norm() / s.kinetics.ion_speed;
  const double rise = (s.tank.max.y() - s.tank.min.y()) / s.kinetics.rise_speed;
  return static_cast<std::int64_t>(std::ceil((max_dissociation_time(s.kinetics) + drift + rise) / per_tick)) + 3;
}

inline ElectrolysisState run_to_quiescence(ElectrolysisState s, double dt) {
  const std::int64_t limit = s.tick + quiescence_tick_bound(s, dt);
  while (!quiescent(s) && s.tick < limit) s = step_electrolysis(s, dt);
  return s;
}

}  // namespace hx3d::electrolysis
