#pragma once

// Retrieval planning for the oscillating dark state. With Omega12 = Omega34
// the dark state is cos(delta t)|1> - i e^{-i dphi} sin(delta t)|2>, so:
//   * |2> is reached at (1/4 + n/2) T,
//   * cos(a)|1> + e^{ib} sin(a)|2> is reached at t0 + nT with t0 = a/|delta|
//     once dphi is chosen to match the relative phase.
// Unloading the fields at one of these times freezes the atom in that state.

#include <cmath>
#include <optional>
#include <vector>

#include "ods/drive.hpp"
#include "ods/eigensystem.hpp"
#include "ods/lindblad.hpp"
#include "ods/quantum_core.hpp"

namespace ods {

/// cos(alpha)|1> + e^{i beta} sin(alpha)|2>, alpha in [0, pi/2].
struct TargetState {
  double alpha = 0.0;
  double beta = 0.0;

  void validate() const {
    if (!(alpha >= 0.0 && alpha <= 0.5 * kPi) || !std::isfinite(beta)) {
      throw ArgumentError("TargetState: alpha must lie in [0, pi/2] and beta must be finite");
    }
  }

  PureState state() const {
    validate();
    return PureState(std::cos(alpha), std::polar(1.0, beta) * std::sin(alpha), 0.0);
  }

  bool operator==(const TargetState&) const = default;
};

inline double wrap_two_pi(double x) {
  double r = std::fmod(x, 2.0 * kPi);
  if (r < 0.0) r += 2.0 * kPi;
  return r;
}

enum class PlanKind { kTransfer, kSuperposition };

struct ProtocolPlan {
  PlanKind kind = PlanKind::kSuperposition;
  double period = 0.0;
  double delta_phi = 0.0;
  double t0 = 0.0;
  std::vector<double> retrieval_times;  // t0 + nT, or (1/4 + n/2) T for transfer plans
  std::vector<double> transfer_times;   // (1/4 + n/2) T
  RampSchedule schedule;                // upload ramp; t_off is set per retrieval
  PureState target = PureState::basis(2);
};

struct TransferTime {
  int n = 0;
  double t = 0.0;
  int destination = 2;  // bare level the dark state sits on
};

namespace detail {
inline void require_plannable(const DriveParams& params, const char* who) {
  params.validate();
  params.require_ods(who);
  if (!params.equal_rabi()) {
    throw NotOdsError(std::string(who) + ": planning needs Omega12 == Omega34 so that theta = delta t");
  }
  if (params.omega12 == 0.0) throw NotOdsError(std::string(who) + ": fields are off");
  (void)params.period();
}
}  // namespace detail

/// t_n = (1/4 + n/2) T for n = 0..n_max. Starting from |1>, every t_n lands on |2>.
inline std::vector<TransferTime> plan_transfer(const DriveParams& params, int n_max) {
  detail::require_plannable(params, "plan_transfer");
  if (n_max < 0) throw ArgumentError("plan_transfer: n_max must be >= 0");
  const double period = params.period();
  std::vector<TransferTime> out;
  for (int n = 0; n <= n_max; ++n) out.push_back({n, (0.25 + 0.5 * n) * period, 2});
  return out;
}

/// Transfer |1> -> |2>: a plan whose retrieval times are the transfer times.
inline ProtocolPlan transfer_plan(const DriveParams& params, int n_max = 4) {
  ProtocolPlan plan;
  plan.kind = PlanKind::kTransfer;
  plan.period = params.period();
  for (const TransferTime& tt : plan_transfer(params, n_max)) plan.transfer_times.push_back(tt.t);
  plan.retrieval_times = plan.transfer_times;
  plan.t0 = plan.transfer_times.front();
  plan.delta_phi = params.delta_phi();
  plan.schedule = RampSchedule::default_for_period(plan.period);
  plan.target = PureState::basis(2);
  return plan;
}

/// Solves a0(t0) = target up to global phase.
inline ProtocolPlan plan_superposition(const TargetState& target, const DriveParams& params,
                                       int n_retrievals = 5) {
  target.validate();
  detail::require_plannable(params, "plan_superposition");
  if (n_retrievals < 1) throw ArgumentError("plan_superposition: need at least one retrieval time");
  const double delta = params.small_delta();
  const double sign = delta > 0.0 ? 1.0 : -1.0;

  ProtocolPlan plan;
  plan.kind = PlanKind::kSuperposition;
  plan.period = params.period();
  // theta(t0) = sign * alpha; the |2> amplitude -i e^{-i dphi} sin(theta) must equal e^{i beta} sin(alpha).
  plan.delta_phi = target.alpha == 0.0 ? 0.0 : wrap_two_pi(-target.beta - sign * 0.5 * kPi);
  plan.t0 = std::fmod(sign * target.alpha / delta - params.clock_offset, plan.period);
  if (plan.t0 < 0.0) plan.t0 += plan.period;
  for (int n = 0; n < n_retrievals; ++n) plan.retrieval_times.push_back(plan.t0 + n * plan.period);
  for (int n = 0; n < n_retrievals; ++n) plan.transfer_times.push_back((0.25 + 0.5 * n) * plan.period);
  plan.schedule = RampSchedule::default_for_period(plan.period);
  plan.target = target.state();
  return plan;
}

/// Drive with the plan's relative phase applied (phi34 kept, phi12 = phi34 + dphi).
inline DriveParams apply_plan(const ProtocolPlan& plan, DriveParams params) {
  params.phi12 = params.phi34 + plan.delta_phi;
  return params;
}

/// Clock offset that puts the dark state at mixing angle alpha when t = 0.
inline double matched_clock_offset(const DriveParams& params, double alpha) {
  return alpha / params.small_delta();
}

struct ProtocolResult {
  // Raw integrator output. A closed-system run keeps rho rank one, so its
  // smallest eigenvalue sits at integrator error (~-1e-8) and is reported
  // in `quality` rather than rejected.
  Matrix3 final_rho = Matrix3::Identity() / 3.0;
  StateQuality quality;
  Fidelity score;
  double retrieval_time = 0.0;
  double t_end = 0.0;
  RampSchedule schedule;
  Trajectory trajectory;
};

/// Uploads at plan.schedule.t_on, lets the dark state rotate, and unloads with
/// the fall ramp centred on the retrieval time. Picks retrieval_times[index],
/// or the first later one whose unload does not overlap the upload ramp.
/// The state is scored when the fields reach zero.
inline ProtocolResult run_protocol(const ProtocolPlan& plan, const DensityMatrix& rho0,
                                   const DriveParams& params, const DecoherenceRates& rates,
                                   const IntegratorConfig& config, std::size_t index = 0,
                                   Frame frame = Frame::kFull) {
  const DriveParams drive = apply_plan(plan, params);
  RampSchedule schedule = plan.schedule;
  const double tau = schedule.ramp_duration();
  std::optional<double> retrieval;
  for (std::size_t k = index; k < plan.retrieval_times.size(); ++k) {
    const double t_off = plan.retrieval_times[k] - 0.5 * tau;
    if (t_off >= schedule.t_on + tau) {
      retrieval = plan.retrieval_times[k];
      break;
    }
  }
  if (!retrieval) throw ArgumentError("run_protocol: no retrieval time leaves room for the upload ramp");
  schedule.t_off = *retrieval - 0.5 * tau;
  schedule.validate();

  const double t_end = schedule.end();
  double interval = config.sample_interval > 0.0
                        ? config.sample_interval
                        : plan.period / IntegratorConfig::kDefaultSamplesPerPeriod;
  const double t_start = std::isfinite(schedule.t_on) ? std::min(0.0, schedule.t_on) : 0.0;
  std::vector<double> times = sample_grid(t_start, t_end, interval);

  ProtocolResult result;
  result.trajectory = evolve(rho0, drive, schedule, rates, frame, times, config);
  result.final_rho = result.trajectory.back();
  result.quality = state_quality(result.final_rho);
  result.score = fidelity_to_pure(plan.target, result.final_rho);
  result.retrieval_time = *retrieval;
  result.t_end = t_end;
  result.schedule = schedule;
  return result;
}

struct ScanPoint {
  double n = 0.0;  // t / T
  double t = 0.0;
  double fidelity = 0.0;
  double overlap = 0.0;
};

struct FidelityScan {
  std::vector<ScanPoint> periods;  // t = nT, n = 0..n_periods
  std::vector<ScanPoint> inset;    // first period, inset_steps + 1 points
};

/// One long evolution from |1><1| with the fields left on; F against |1> at
/// every integer period, plus a finely sampled first period.
inline FidelityScan fidelity_scan(const DriveParams& params, const DecoherenceRates& rates,
                                  const IntegratorConfig& config, int n_periods,
                                  const RampSchedule* schedule_override = nullptr,
                                  int inset_steps = 100, Frame frame = Frame::kFull) {
  params.validate();
  params.require_ods("fidelity_scan");
  if (n_periods < 1) throw ArgumentError("fidelity_scan: n_periods must be >= 1");
  const double period = params.period();
  const RampSchedule schedule =
      schedule_override ? *schedule_override : RampSchedule::default_for_period(period);

  std::vector<double> times;
  for (int k = 0; k <= inset_steps; ++k) times.push_back(period * k / inset_steps);
  for (int n = 2; n <= n_periods; ++n) times.push_back(period * n);

  const PureState ground = PureState::basis(1);
  const Trajectory traj = evolve(pure_density(ground), params, schedule, rates, frame, times, config);

  FidelityScan scan;
  const auto point = [&](std::size_t k) {
    const Fidelity f = fidelity_to_pure(ground, traj.states[k]);
    return ScanPoint{traj.times[k] / period, traj.times[k], f.fidelity, f.overlap};
  };
  for (int k = 0; k <= inset_steps; ++k) scan.inset.push_back(point(static_cast<std::size_t>(k)));
  scan.periods.push_back(point(0));
  scan.periods.push_back(point(static_cast<std::size_t>(inset_steps)));
  for (std::size_t k = static_cast<std::size_t>(inset_steps) + 1; k < traj.size(); ++k) {
    scan.periods.push_back(point(k));
  }
  for (std::size_t n = 0; n < scan.periods.size(); ++n) scan.periods[n].n = static_cast<double>(n);
  return scan;
}

}  // namespace ods
