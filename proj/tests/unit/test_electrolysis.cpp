#include <gtest/gtest.h>

#include "hx3d/sim/electrolysis.hpp"

using namespace hx3d;
using namespace hx3d::electrolysis;

namespace {

constexpr double kDt = 1e-3;

ElectrolysisState powered(int n, std::uint64_t seed, double speed = 1.0) {
  ElectrolysisState s = init_electrolysis(n, seed);
  s.powered = true;
  s.speed = speed;
  return s;
}

}  // namespace

TEST(Electrolysis, InitEmpty) {
  const auto s = init_electrolysis(0, 1);
  EXPECT_TRUE(s.particles.empty());
  EXPECT_FALSE(s.powered);
  EXPECT_THROW(init_electrolysis(-1, 1), std::invalid_argument);
}

TEST(Electrolysis, InitDeterministicAndInTank) {
  const auto a = init_electrolysis(10, 1);
  const auto b = init_electrolysis(10, 1);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, init_electrolysis(10, 2));
  const auto c = census(a);
  EXPECT_EQ(c.count(Species::NaClMolecule, Phase::Dissolved), 10u);
  for (Species s : kAllSpecies) {
    if (s != Species::NaClMolecule) {
      EXPECT_EQ(c.count(s), 0u);
    }
  }
  EXPECT_EQ(c.bulb_intensity, 0.0);
  for (const auto& p : a.particles) EXPECT_TRUE(a.tank.contains(p.position));
}

TEST(Electrolysis, UnpoweredOnlyTicks) {
  const auto s = init_electrolysis(10, 1);
  auto t = step_electrolysis(s, kDt);
  EXPECT_EQ(t.tick, s.tick + 1);
  t.tick = s.tick;
  EXPECT_EQ(t, s);
}

TEST(Electrolysis, TenMoleculesStoichiometry) {
  const auto end = run_to_quiescence(powered(10, 1), kDt);
  ASSERT_TRUE(quiescent(end));
  const auto c = census(end);
  EXPECT_EQ(c.count(Species::NaAtom, Phase::AtCathode), 10u);
  EXPECT_EQ(c.count(Species::Cl2Molecule, Phase::Evaporated), 5u);
  EXPECT_EQ(c.count(Species::NaIon) + c.count(Species::ClIon), 0u);
  EXPECT_EQ(c.count(Species::NaClMolecule), 0u);
  EXPECT_EQ(c.count(Species::ClAtom), 0u);
  EXPECT_EQ(c.bulb_intensity, 0.0);
}

TEST(Electrolysis, OddChlorinePairing) {
  ElectrolysisState s = init_electrolysis(0, 1);
  s.powered = true;
  for (int i = 0; i < 7; ++i) s.particles.push_back(make_particle(s, Species::ClAtom, Phase::AtAnode, s.anode_pos));
  s.electrons_released = 7;  // as if 7 Cl- had been neutralized
  const auto end = run_to_quiescence(s, kDt);
  const auto c = census(end);
  EXPECT_EQ(c.count(Species::Cl2Molecule, Phase::Evaporated), 3u);
  EXPECT_EQ(c.count(Species::ClAtom, Phase::AtAnode), 1u);
  EXPECT_EQ(nuclei(end).cl, 7u);
}

TEST(Electrolysis, BulbFullFlux) {
  ElectrolysisState s = init_electrolysis(0, 1);
  s.powered = true;
  const int n = 6;
  for (int i = 0; i < n; ++i) {
    s.particles.push_back(make_particle(s, Species::NaIon, Phase::Dissolved, Vec3(0, 0.05, 0)));
    s.particles.push_back(make_particle(s, Species::ClIon, Phase::Dissolved, Vec3(0, 0.05, 0)));
  }
  EXPECT_EQ(census(s).bulb_intensity, 0.0);  // nothing has moved yet
  s = step_electrolysis(s, kDt);
  EXPECT_EQ(census(s).bulb_intensity, 1.0);
  s.powered = false;
  s = step_electrolysis(s, kDt);
  EXPECT_EQ(census(s).bulb_intensity, 0.0);
}

TEST(Electrolysis, ConservationEveryTick) {
  for (int n : {0, 1, 7, 10, 100}) {
    ElectrolysisState s = powered(n, 42 + static_cast<std::uint64_t>(n), 3.0);
    const NucleiTotals expect{static_cast<std::size_t>(n), static_cast<std::size_t>(n)};
    std::size_t molecules = static_cast<std::size_t>(n);
    const std::int64_t limit = quiescence_tick_bound(s, kDt);
    while (!quiescent(s)) {
      s = step_electrolysis(s, kDt);
      ASSERT_EQ(nuclei(s), expect) << "n=" << n << " tick " << s.tick;
      ASSERT_EQ(charge_balance(s), 0) << "n=" << n << " tick " << s.tick;
      const std::size_t m = census(s).count(Species::NaClMolecule);
      ASSERT_LE(m, molecules);
      molecules = m;
      ASSERT_LE(s.tick, limit);
      const auto c = census(s);
      ASSERT_GE(c.bulb_intensity, 0.0);
      ASSERT_LE(c.bulb_intensity, 1.0);
      if (c.count(Species::NaIon) + c.count(Species::ClIon) == 0) {
        ASSERT_EQ(c.bulb_intensity, 0.0);
      }
    }
    EXPECT_EQ(census(s).count(Species::NaAtom, Phase::AtCathode), static_cast<std::size_t>(n));
    EXPECT_EQ(census(s).count(Species::Cl2Molecule, Phase::Evaporated), static_cast<std::size_t>(n / 2));
  }
}

TEST(Electrolysis, DissociationFinishesWithinBound) {
  ElectrolysisState s = powered(100, 9);
  const auto bound = static_cast<std::int64_t>(std::ceil(max_dissociation_time(s.kinetics) / (s.speed * kDt))) + 1;
  for (const auto& p : s.particles) EXPECT_LE(p.dissociate_at, max_dissociation_time(s.kinetics));
  while (census(s).count(Species::NaClMolecule) > 0) {
    s = step_electrolysis(s, kDt);
    ASSERT_LE(s.tick, bound);
  }
}

TEST(Electrolysis, SpeedScalesKinetics) {
  // Same trajectory at double speed in half the ticks, up to rounding of the
  // reaction clock.
  ElectrolysisState slow = powered(10, 5, 1.0);
  ElectrolysisState fast = powered(10, 5, 2.0);
  for (int i = 0; i < 2000; ++i) slow = step_electrolysis(slow, kDt);
  for (int i = 0; i < 1000; ++i) fast = step_electrolysis(fast, kDt);
  EXPECT_EQ(census(slow).count(Species::NaClMolecule), census(fast).count(Species::NaClMolecule));
  ElectrolysisState halted = powered(10, 5, 0.0);
  for (int i = 0; i < 100; ++i) halted = step_electrolysis(halted, kDt);
  EXPECT_EQ(census(halted).count(Species::NaClMolecule), 10u);
}

TEST(Electrolysis, DeterministicTrajectory) {
  auto run = [] {
    ElectrolysisState s = powered(25, 77);
    std::vector<ElectrolysisState> states;
    for (int i = 0; i < 3000; ++i) {
      if (i == 1000) s.speed = 2.5;  // same command at the same tick
      s = step_electrolysis(s, kDt);
      if (i % 100 == 0) states.push_back(s);
    }
    return states;
  };
  EXPECT_EQ(run(), run());
}

TEST(Electrolysis, InvalidDt) {
  EXPECT_THROW(step_electrolysis(init_electrolysis(1, 1), 0.0), std::invalid_argument);
}
