#include <gtest/gtest.h>

#include <random>

#include "ods/planner.hpp"
#include "oracles.hpp"

using namespace ods;

namespace {
DriveParams fig2(double omega) { return DriveParams::symmetric(omega, 0.3, 0.2, 0.3, 0.2); }
DensityMatrix ground() { return pure_density(PureState::basis(1)); }
constexpr double kT = 2.0 * kPi / 0.05;
}  // namespace

TEST(PlanTransfer, Times) {
  const std::vector<TransferTime> times = plan_transfer(fig2(2.0), 3);
  ASSERT_EQ(times.size(), 4u);
  EXPECT_NEAR(times[0].t, kT / 4.0, 1e-12);
  EXPECT_NEAR(times[0].t, 31.416, 1e-3);
  EXPECT_NEAR(times[1].t, 0.75 * kT, 1e-12);
  EXPECT_NEAR(times[1].t, 94.248, 1e-3);
  for (const TransferTime& tt : times) EXPECT_EQ(tt.destination, 2);
}

TEST(PlanTransfer, Refusals) {
  EXPECT_THROW(plan_transfer(DriveParams::symmetric(2.0, 0.2, 0.2, 0.2, 0.2), 2), NoOscillationError);
  DriveParams unequal = fig2(2.0);
  unequal.omega34 = 1.0;
  EXPECT_THROW(plan_transfer(unequal, 2), NotOdsError);
  EXPECT_THROW(plan_transfer(DriveParams::symmetric(2.0, 0.3, 0.2, 0.4, 0.1), 2), NotOdsError);
  EXPECT_THROW(plan_transfer(fig2(2.0), -1), ArgumentError);
}

TEST(PlanSuperposition, Examples) {
  const DriveParams p = fig2(2.0);
  ProtocolPlan plan = plan_superposition({0.0, 1.3}, p);
  EXPECT_EQ(plan.t0, 0.0);
  EXPECT_EQ(plan.delta_phi, 0.0);

  plan = plan_superposition({kPi / 2.0, 0.4}, p);
  EXPECT_NEAR(plan.t0, kT / 4.0, 1e-12);
  EXPECT_NEAR(plan.t0, plan_transfer(p, 0).front().t, 1e-12);

  plan = plan_superposition({kPi / 4.0, 0.0}, p);
  EXPECT_NEAR(plan.delta_phi, 1.5 * kPi, 1e-12);
  EXPECT_NEAR(plan.t0, kT / 8.0, 1e-12);
  ASSERT_EQ(plan.retrieval_times.size(), 5u);
  EXPECT_NEAR(plan.retrieval_times[3], kT / 8.0 + 3.0 * kT, 1e-9);
}

TEST(PlanSuperposition, RejectsBadTargets) {
  EXPECT_THROW(plan_superposition({-0.1, 0.0}, fig2(2.0)), ArgumentError);
  EXPECT_THROW(plan_superposition({1.6, 0.0}, fig2(2.0)), ArgumentError);
}

TEST(PlanSuperposition, ClosedFormInversionIsExact) {
  std::mt19937_64 rng(123);
  std::uniform_real_distribution<double> alpha(0.0, kPi / 2.0);
  std::uniform_real_distribution<double> beta(-10.0, 10.0);
  for (int trial = 0; trial < 200; ++trial) {
    const DriveParams p = oracle::random_ods_drive(rng, /*equal_rabi=*/true);
    const TargetState target{alpha(rng), beta(rng)};
    const ProtocolPlan plan = plan_superposition(target, p);
    EXPECT_GE(plan.t0, 0.0);
    EXPECT_LT(plan.t0, plan.period);
    const DriveParams drive = apply_plan(plan, p);
    for (double t : plan.retrieval_times) {
      const PureState a0 = dark_state(drive, RampSchedule::always_on(), t);
      EXPECT_NEAR(overlap_magnitude(target.state(), a0), 1.0, 1e-12);
    }
  }
}

// Without decay the only loss is the bright-state admixture of order
// (theta_rate / gap)^2, a few 1e-3 at Omega = 2 and shrinking with Omega.
TEST(RunProtocol, ClosedSystemTransferLossIsNonAdiabatic) {
  const DriveParams p = fig2(2.0);
  const ProtocolResult r = run_protocol(transfer_plan(p), ground(), p, DecoherenceRates::zero(), IntegratorConfig{});
  EXPECT_NEAR(r.retrieval_time, kT / 4.0, 1e-12);
  EXPECT_NEAR(r.final_rho(1, 1).real(), 0.99575, 5e-5);
  EXPECT_NEAR(r.final_rho.trace().real(), 1.0, 1e-10);
  EXPECT_NEAR((r.final_rho * r.final_rho).trace().real(), 1.0, 1e-7);

  IntegratorConfig rk4;
  rk4.method = Method::kRk4Fixed;
  rk4.step = 0.01;
  const ProtocolResult r4 = run_protocol(transfer_plan(p), ground(), p, DecoherenceRates::zero(), rk4);
  EXPECT_NEAR(r4.final_rho(1, 1).real(), r.final_rho(1, 1).real(), 1e-7);

  const DriveParams strong = fig2(6.0);
  const ProtocolResult rs =
      run_protocol(transfer_plan(strong), ground(), strong, DecoherenceRates::zero(), IntegratorConfig{});
  EXPECT_GT(rs.final_rho(1, 1).real(), r.final_rho(1, 1).real());
}

TEST(RunProtocol, OpenSystemTransfer) {
  const DriveParams p = fig2(2.0);
  const ProtocolPlan plan = transfer_plan(p);
  for (std::size_t n : {0u, 1u}) {
    const ProtocolResult r = run_protocol(plan, ground(), p, DecoherenceRates{}, IntegratorConfig{}, n);
    EXPECT_GE(r.final_rho(1, 1).real(), 0.95) << "n=" << n;
    EXPECT_DOUBLE_EQ(r.score.overlap, r.final_rho(1, 1).real());
    EXPECT_NEAR(r.t_end, r.retrieval_time + 0.5 * 0.01 * kT, 1e-9);
  }
}

TEST(RunProtocol, EqualSuperposition) {
  const DriveParams p = fig2(2.0);
  const ProtocolPlan plan = plan_superposition({kPi / 4.0, 0.0}, p);
  const ProtocolResult r = run_protocol(plan, ground(), p, DecoherenceRates{}, IntegratorConfig{});
  EXPECT_GE(r.score.fidelity, 0.95);
  EXPECT_NEAR(r.score.fidelity * r.score.fidelity, r.score.overlap, 1e-12);
}

TEST(RunProtocol, EarlyTargetSkipsToNextPeriod) {
  const DriveParams p = fig2(2.0);
  const ProtocolPlan plan = plan_superposition({0.0, 0.0}, p);
  const ProtocolResult r = run_protocol(plan, ground(), p, DecoherenceRates{}, IntegratorConfig{});
  EXPECT_NEAR(r.retrieval_time, kT, 1e-9);
  EXPECT_GE(r.score.fidelity, 0.95);
}

TEST(RunProtocol, RetrievalGridEquivalence) {
  const DriveParams p = fig2(2.0);
  const ProtocolPlan plan = plan_superposition({0.6, 1.0}, p, 11);
  std::vector<double> fidelities;
  for (std::size_t n : {1u, 2u, 5u, 10u}) {
    fidelities.push_back(run_protocol(plan, ground(), p, DecoherenceRates{}, IntegratorConfig{}, n).score.fidelity);
  }
  for (double f : fidelities) {
    EXPECT_NEAR(f, fidelities.front(), 0.02);
    EXPECT_GE(f, 0.95);
  }
}

TEST(RunProtocol, PeriodicAfterFirstPeriod) {
  const DriveParams p = fig2(2.0);
  const double t0 = kT / 8.0 + kT;
  const std::vector<double> times{0.0, t0, t0 + kT};
  const Trajectory traj = evolve(ground(), p, RampSchedule::default_for_period(kT), DecoherenceRates{}, Frame::kFull,
                                 times, IntegratorConfig{});
  for (int i = 0; i < 3; ++i) EXPECT_LT(std::abs(traj.states[1](i, i).real() - traj.states[2](i, i).real()), 0.02);
}

TEST(RunProtocol, StartingFromLevelTwoWithMatchedClock) {
  const DriveParams p = fig2(2.0);
  DriveParams shifted = p;
  shifted.clock_offset = matched_clock_offset(p, kPi / 2.0);
  EXPECT_NEAR(shifted.clock_offset, kT / 4.0, 1e-12);
  const PureState dark0 = dark_state(shifted, RampSchedule::always_on(), 0.0);
  EXPECT_NEAR(std::norm(dark0[2]), 1.0, 1e-12);

  const RampSchedule s = RampSchedule::default_for_period(kT);
  const auto range = [&](const DensityMatrix& rho0, const DriveParams& d, int level) {
    const Trajectory t = evolve(rho0, d, s, DecoherenceRates{}, Frame::kFull, 0.0, 2.0 * kT, IntegratorConfig{});
    double lo = 1.0, hi = 0.0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double pop = t.states[k](level - 1, level - 1).real();
      lo = std::min(lo, pop);
      hi = std::max(hi, pop);
    }
    return hi - lo;
  };
  const double from_one = range(ground(), p, 1);
  const double from_two = range(pure_density(PureState::basis(2)), shifted, 2);
  EXPECT_NEAR(from_two, from_one, 0.02);

  // Transfer |2> -> |1> at T/4 of the shifted clock.
  ProtocolPlan plan = transfer_plan(p);
  plan.target = PureState::basis(1);
  const ProtocolResult r =
      run_protocol(plan, pure_density(PureState::basis(2)), shifted, DecoherenceRates{}, IntegratorConfig{});
  EXPECT_GE(r.final_rho(0, 0).real(), 0.95);
}

TEST(RunProtocol, MixedInitialStateRuns) {
  const DriveParams p = fig2(2.0);
  const ProtocolResult r =
      run_protocol(transfer_plan(p), DensityMatrix::maximally_mixed(), p, DecoherenceRates{}, IntegratorConfig{});
  EXPECT_TRUE(r.quality.ok());
  EXPECT_GE(r.score.overlap, 0.0);
}

TEST(FidelityScan, ClosedSystemIsBoundedWithoutDrift) {
  const FidelityScan scan = fidelity_scan(fig2(2.0), DecoherenceRates::zero(), IntegratorConfig{}, 20);
  ASSERT_EQ(scan.periods.size(), 21u);
  ASSERT_EQ(scan.inset.size(), 101u);
  EXPECT_EQ(scan.periods[0].fidelity, 1.0);
  double early = 0.0, late = 0.0;
  for (std::size_t n = 1; n <= 20; ++n) {
    const double loss = 1.0 - scan.periods[n].fidelity;
    EXPECT_LT(loss, 3e-3) << "n=" << n;
    (n <= 10 ? early : late) = std::max(n <= 10 ? early : late, loss);
  }
  EXPECT_LT(late, 1.2 * early);
}

TEST(FidelityScan, OpenSystemPlateau) {
  const FidelityScan scan = fidelity_scan(fig2(2.0), DecoherenceRates{}, IntegratorConfig{}, 10);
  EXPECT_EQ(scan.periods[0].fidelity, 1.0);
  EXPECT_EQ(scan.periods[0].n, 0.0);
  EXPECT_NEAR(scan.periods[1].t, kT, 1e-9);
  for (std::size_t n = 1; n < scan.periods.size(); ++n) {
    EXPECT_GT(scan.periods[n].fidelity, 0.95);
    EXPECT_LT(scan.periods[n].fidelity, 1.0);
    EXPECT_NEAR(scan.periods[n].fidelity, scan.periods[1].fidelity, 1e-3);
    EXPECT_DOUBLE_EQ(scan.periods[n].n, static_cast<double>(n));
  }
}
