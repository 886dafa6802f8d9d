#include <gtest/gtest.h>

#include "ods/adiabaticity.hpp"
#include "oracles.hpp"

using namespace ods;

namespace {
DriveParams fig2(double omega) { return DriveParams::symmetric(omega, 0.3, 0.2, 0.3, 0.2); }
const RampSchedule kOn = RampSchedule::always_on();

// (delta / smallest gap)^2 with gaps |D +- sqrt(D^2 + 4 W^2)| / 2.
double ratio_oracle(double delta, double big_delta, double w) {
  const double root = std::sqrt(big_delta * big_delta + 4.0 * w * w);
  const double gap = 0.5 * std::min(std::abs(big_delta + root), std::abs(big_delta - root));
  return (delta / gap) * (delta / gap);
}
}  // namespace

TEST(ThetaRate, Examples) {
  EXPECT_NEAR(theta_rate(fig2(2.0), kOn, 17.0), 0.05, 1e-15);
  const RampSchedule ramp{1.25, 0.0, 500.0, RampShape::kRaisedCosine};
  EXPECT_NEAR(theta_rate(fig2(2.0), ramp, 0.6), 0.05, 1e-15);

  DriveParams p = fig2(1.0);
  p.omega12 = 2.0;
  EXPECT_NEAR(theta_rate(p, kOn, 0.0), 0.1, 1e-15);
  const auto theta = [&](double t) { return mixing_theta(p, kOn, t); };
  EXPECT_NEAR(theta_rate(p, kOn, 0.0), oracle::derivative(theta, 0.0), 1e-8);
}

TEST(ThetaRate, MatchesFiniteDifferences) {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> time(1.0, 300.0);
  for (int trial = 0; trial < 200; ++trial) {
    const DriveParams p = oracle::random_ods_drive(rng);
    const double t = time(rng);
    const auto theta = [&](double s) { return mixing_theta(p, kOn, s); };
    const double fd = oracle::derivative(theta, t, 1e-5);
    EXPECT_NEAR(theta_rate(p, kOn, t), fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST(EvolvingMargin, Fig2Regimes) {
  const AdiabaticityReport a = evolving_margin(fig2(2.0), kOn, 0.0);
  const AdiabaticityReport b = evolving_margin(fig2(0.2), kOn, 0.0);
  const AdiabaticityReport c = evolving_margin(fig2(0.08), kOn, 0.0);
  EXPECT_NEAR(a.ratio, ratio_oracle(0.05, 0.25, 2.0), 1e-15);
  EXPECT_NEAR(b.ratio, ratio_oracle(0.05, 0.25, 0.2), 1e-14);
  EXPECT_NEAR(c.ratio, ratio_oracle(0.05, 0.25, 0.08), 1e-12);
  EXPECT_NEAR(a.ratio, 7.1e-4, 0.05 * 7.1e-4);
  EXPECT_NEAR(b.ratio, 0.203, 0.05 * 0.203);
  EXPECT_NEAR(c.ratio, 4.56, 0.05 * 4.56);
  EXPECT_NEAR(a.gap_minus, 1.8789, 1e-4);
  EXPECT_NEAR(b.gap_minus, 0.11085, 1e-5);
  EXPECT_NEAR(c.gap_minus, 0.02341, 1e-5);
  EXPECT_EQ(a.regime, Regime::kAdiabatic);
  EXPECT_EQ(b.regime, Regime::kMarginal);
  EXPECT_EQ(c.regime, Regime::kViolated);
}

TEST(EvolvingMargin, ZeroBigDeltaReducesToDeltaOverOmega) {
  for (double omega : {0.1, 0.5, 1.0, 3.0}) {
    const DriveParams p = DriveParams::symmetric(omega, 0.05, -0.05, 0.05, -0.05);
    const double expected = (0.05 / omega) * (0.05 / omega);
    EXPECT_NEAR(evolving_margin(p, kOn, 3.3).ratio, expected, 1e-12);
  }
}

TEST(EvolvingMargin, StrictlyDecreasingInOmega) {
  double prev = std::numeric_limits<double>::infinity();
  for (int k = 1; k <= 200; ++k) {
    const double r = evolving_margin(fig2(0.02 * k), kOn, 11.0).ratio;
    EXPECT_LT(r, prev);
    prev = r;
  }
}

TEST(EvolvingMargin, ThresholdsConfigurable) {
  RegimeThresholds loose{0.5, 10.0};
  EXPECT_EQ(evolving_margin(fig2(0.2), kOn, 0.0, loose).regime, Regime::kAdiabatic);
  EXPECT_EQ(evolving_margin(fig2(0.08), kOn, 0.0, loose).regime, Regime::kMarginal);
}

TEST(RampMargin, SuddenSwitchIsFlagged) {
  const RampSchedule sudden{0.0, 0.0, std::numeric_limits<double>::infinity(), RampShape::kInstantaneous};
  const AdiabaticityReport r = ramp_margin(fig2(2.0), sudden);
  EXPECT_TRUE(r.sudden_switch);
  EXPECT_TRUE(std::isinf(r.ratio));
  EXPECT_EQ(r.regime, Regime::kViolated);
}

TEST(RampMargin, ClampsAtEnvelopeFloor) {
  const DriveParams p = fig2(2.0);
  const RampSchedule ramp = RampSchedule::default_for_period(p.period());
  const AdiabaticityReport r = ramp_margin(p, ramp);
  EXPECT_TRUE(r.edge_clamped);
  EXPECT_TRUE(std::isfinite(r.ratio));
  EXPECT_GE(r.envelope, 0.01);
  // Worst sample is the first one above the floor; it matches the arithmetic oracle.
  EXPECT_NEAR(r.ratio, ratio_oracle(0.05, 0.25, 2.0 * r.envelope), 1e-12 * r.ratio);
  EXPECT_LT(r.envelope, 0.02);
  // Far worse than the plateau value.
  EXPECT_GT(r.ratio, 100.0 * evolving_margin(p, kOn, 0.0).ratio);
}

TEST(RampMargin, DoublingOmegaAtFixedSample) {
  const DriveParams p = fig2(2.0);
  const DriveParams q = fig2(4.0);
  const RampSchedule ramp = RampSchedule::default_for_period(p.period());
  const AdiabaticityReport rp = ramp_margin(p, ramp);
  const AdiabaticityReport rq = evolving_margin(q, ramp, rp.t);
  EXPECT_NEAR(rq.ratio, ratio_oracle(0.05, 0.25, 4.0 * rp.envelope), 1e-12 * rq.ratio);
  EXPECT_LT(rq.ratio, rp.ratio / 4.0);
  // On the plateau, where Omega >> D, doubling Omega divides the ratio by ~4.
  const double plateau_ratio = evolving_margin(q, kOn, 0.0).ratio / evolving_margin(p, kOn, 0.0).ratio;
  EXPECT_NEAR(plateau_ratio, 0.25, 0.02);
}

TEST(RampMargin, PlateauWindowEqualsEvolvingMargin) {
  const DriveParams p = fig2(2.0);
  const RampSchedule ramp = RampSchedule::default_for_period(p.period());
  const AdiabaticityReport w = window_margin(p, ramp, 10.0, 50.0);
  EXPECT_FALSE(w.edge_clamped);
  EXPECT_NEAR(w.ratio, evolving_margin(p, ramp, 30.0).ratio, 1e-15);
}

TEST(RampMargin, UnloadRampIncluded) {
  const DriveParams p = fig2(2.0);
  RampSchedule ramp = RampSchedule::default_for_period(p.period());
  ramp.t_off = 40.0;
  const AdiabaticityReport r = ramp_margin(p, ramp);
  EXPECT_TRUE(std::isfinite(r.ratio));
  EXPECT_GE(r.envelope, 0.01);
}
