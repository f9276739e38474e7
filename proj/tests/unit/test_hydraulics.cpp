#include <gtest/gtest.h>

#include <random>

#include "hx3d/sim/hydraulics.hpp"

using namespace hx3d;
using namespace hx3d::hydraulics;

namespace {

bool rel_eq(double a, double b, double tol = 1e-12) { return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)}); }

HydraulicSystem machine(double a_in, double a_out) {
  HydraulicSystem s;
  s.area_in = a_in;
  s.area_out = a_out;
  return s;
}

}  // namespace

TEST(Hydraulics, Pressure) {
  EXPECT_NEAR(pressure(10, 0.001), 10000.0, 1e-9);
  EXPECT_EQ(pressure(0, 0.37), 0.0);
  EXPECT_EQ(pressure(10, 1), 10.0);
  try {
    pressure(1, 0);
    FAIL();
  } catch (const HydraulicsError& e) {
    EXPECT_EQ(e.code(), HydraulicsErrorCode::NonPositiveArea);
  }
  EXPECT_THROW(pressure(1, -1), HydraulicsError);
}

TEST(Hydraulics, TransmitForce) {
  EXPECT_NEAR(transmit_force(machine(0.001, 0.01), 10), 100.0, 1e-12);
  EXPECT_EQ(transmit_force(machine(0.02, 0.02), 7.5), 7.5);
  EXPECT_EQ(transmit_force(machine(0.02, 0.01), 10), 5.0);
  EXPECT_THROW(transmit_force(machine(0, 0.01), 10), HydraulicsError);
}

TEST(Hydraulics, LiftStep) {
  const auto s = machine(0.001, 0.01);
  const auto one = lift_step(s, 0.1);
  EXPECT_NEAR(one.piston_out_pos, 0.01, 1e-15);
  EXPECT_NEAR(lifted_height(one), 0.01, 1e-15);
  EXPECT_EQ(lift_step(s, 0.0), s);
  const auto two = lift_step(lift_step(s, 0.05), 0.05);
  EXPECT_NEAR(two.piston_in_pos, one.piston_in_pos, 1e-15);
  EXPECT_NEAR(two.piston_out_pos, one.piston_out_pos, 1e-15);
  try {
    lift_step(s, 0.2);
    FAIL();
  } catch (const HydraulicsError& e) {
    EXPECT_EQ(e.code(), HydraulicsErrorCode::StrokeLimitExceeded);
  }
}

TEST(Hydraulics, HapticResistance) {
  HydraulicSystem s = machine(0.001, 0.01);
  s.load_mass = 100;
  haptics::HapticDeviceConfig cfg;
  cfg.max_force = 200;
  auto r = haptic_resistance(s, kStandardGravity, cfg);
  EXPECT_NEAR(r.required, 98.1, 1e-12);
  EXPECT_NEAR(r.delivered.y(), 98.1, 1e-12);  // opposes a downward push

  cfg.max_force = 1.0;
  r = haptic_resistance(s, kStandardGravity, cfg);
  EXPECT_NEAR(r.required, 98.1, 1e-12);
  EXPECT_NEAR(r.delivered.norm(), 1.0, 1e-15);

  s.load_mass = 0;
  EXPECT_EQ(haptic_resistance(s, kStandardGravity, cfg).required, 0.0);
  EXPECT_EQ(haptic_resistance(s, kStandardGravity, cfg).delivered, Vec3::Zero());
}

// Randomized parameters: the three rules, work balance, swapped-area
// inverse and incompressibility over step sequences.
TEST(Hydraulics, RandomizedLaws) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> area_exp(-5, 0);
  std::uniform_real_distribution<double> f(-1000, 1000);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int i = 0; i < 20000; ++i) {
    const double a1 = std::pow(10.0, area_exp(rng));
    const double a2 = std::pow(10.0, area_exp(rng));
    HydraulicSystem s = machine(a1, a2);
    const double fin = f(rng);
    ASSERT_TRUE(rel_eq(pressure(fin, a1), fin / a1));
    const double fout = transmit_force(s, fin);
    ASSERT_TRUE(rel_eq(pressure(fout, a2), pressure(fin, a1)));
    ASSERT_TRUE(rel_eq(transmit_force(machine(a2, a1), fout), fin));

    s.stroke_min = -1e9;
    s.stroke_max = 1e9;
    const double din = 0.01 * u(rng);
    const auto moved = lift_step(s, din);
    const double dout = moved.piston_out_pos - s.piston_out_pos;
    ASSERT_TRUE(rel_eq(a1 * din, a2 * dout));
    ASSERT_TRUE(rel_eq(fin * din, fout * dout));
  }
}

TEST(Hydraulics, IncompressibleOverSequences) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int seq = 0; seq < 200; ++seq) {
    HydraulicSystem s = machine(0.0005 + 0.002 * (u(rng) + 1), 0.005 + 0.02 * (u(rng) + 1));
    for (int k = 0; k < 500; ++k) {
      const double d = 0.002 * u(rng);
      try {
        s = lift_step(s, d);
      } catch (const HydraulicsError& e) {
        ASSERT_EQ(e.code(), HydraulicsErrorCode::StrokeLimitExceeded);
        continue;
      }
      ASSERT_NEAR(s.area_in * s.piston_in_pos, s.area_out * s.piston_out_pos, 1e-12);
      ASSERT_GE(s.piston_in_pos, s.stroke_min);
      ASSERT_LE(s.piston_in_pos, s.stroke_max);
    }
  }
}
