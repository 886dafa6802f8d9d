#pragma once

// Adiabatic-following margins: compares the squared rotation rate of the
// dark state, |d theta/dt|^2, with the squared gaps to the bright states.

#include <cmath>
#include <limits>

#include "ods/drive.hpp"
#include "ods/eigensystem.hpp"

namespace ods {

enum class Regime { kAdiabatic, kMarginal, kViolated };

inline const char* to_string(Regime r) {
  switch (r) {
    case Regime::kAdiabatic: return "adiabatic";
    case Regime::kMarginal: return "marginal";
    case Regime::kViolated: return "violated";
  }
  return "?";
}

struct RegimeThresholds {
  double marginal = 0.01;  // ratio >= marginal -> marginal
  double violated = 1.0;   // ratio >= violated -> violated

  Regime classify(double ratio) const noexcept {
    if (!(ratio < violated)) return Regime::kViolated;
    if (ratio >= marginal) return Regime::kMarginal;
    return Regime::kAdiabatic;
  }
};

struct AdiabaticityReport {
  double theta_rate = 0.0;
  double gap_plus = 0.0;   // |lambda0 - lambda+|
  double gap_minus = 0.0;  // |lambda0 - lambda-|
  double ratio = 0.0;      // max over +- of (theta_rate / gap)^2
  Regime regime = Regime::kAdiabatic;
  double t = 0.0;
  double envelope = 1.0;
  // Fields switched on/off in a single step: the ratio is infinite.
  bool sudden_switch = false;
  // Ramp samples below the envelope floor were skipped; the true ratio
  // diverges as the envelope goes to zero.
  bool edge_clamped = false;
};

/// d theta/dt from differentiating tan(theta) = Omega12 sin(u) / (Omega34 cos(u)), u = delta t.
/// The envelope cancels in the ratio, so shared ramps add nothing.
inline double theta_rate(const DriveParams& params, const RampSchedule& /*schedule*/, double t) {
  params.require_ods("theta_rate");
  const double u = params.small_delta() * (t + params.clock_offset);
  const double num = params.omega12 * params.omega34 * params.small_delta();
  if (num == 0.0) return 0.0;
  const double s = std::sin(u), c = std::cos(u);
  const double den = params.omega12 * params.omega12 * s * s + params.omega34 * params.omega34 * c * c;
  return num / den;
}

inline AdiabaticityReport evolving_margin(const DriveParams& params, const RampSchedule& schedule,
                                          double t, const RegimeThresholds& thresholds = {}) {
  AdiabaticityReport r;
  r.t = t;
  r.envelope = envelope(schedule, t);
  r.theta_rate = std::abs(theta_rate(params, schedule, t));
  const auto [lp, lm] = bright_eigenvalues(effective_fields(params, schedule, t));
  r.gap_plus = std::abs(lp);
  r.gap_minus = std::abs(lm);
  const auto term = [&](double gap) {
    if (gap == 0.0) return r.theta_rate == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    const double x = r.theta_rate / gap;
    return x * x;
  };
  r.ratio = std::max(term(r.gap_plus), term(r.gap_minus));
  r.regime = thresholds.classify(r.ratio);
  return r;
}

/// Worst evolving margin over `samples` equally spaced points in (t_begin, t_end],
/// skipping points whose envelope is below `envelope_floor`.
inline AdiabaticityReport window_margin(const DriveParams& params, const RampSchedule& schedule,
                                        double t_begin, double t_end, int samples = 256,
                                        double envelope_floor = 0.01,
                                        const RegimeThresholds& thresholds = {}) {
  AdiabaticityReport worst;
  bool any = false;
  bool clamped = false;
  for (int k = 1; k <= samples; ++k) {
    const double t = t_begin + (t_end - t_begin) * static_cast<double>(k) / samples;
    if (envelope(schedule, t) < envelope_floor) {
      clamped = true;
      continue;
    }
    AdiabaticityReport r = evolving_margin(params, schedule, t, thresholds);
    if (!any || r.ratio > worst.ratio) worst = r;
    any = true;
  }
  if (!any) {
    worst.ratio = std::numeric_limits<double>::infinity();
    worst.regime = Regime::kViolated;
  }
  worst.edge_clamped = clamped;
  return worst;
}

/// Worst margin over the upload ramp (and the unload ramp when t_off is finite).
/// Sudden switching reports an infinite ratio and sets sudden_switch.
inline AdiabaticityReport ramp_margin(const DriveParams& params, const RampSchedule& schedule,
                                      int samples = 256, double envelope_floor = 0.01,
                                      const RegimeThresholds& thresholds = {}) {
  params.require_ods("ramp_margin");
  schedule.validate();
  if (schedule.sudden()) {
    AdiabaticityReport r;
    r.t = schedule.t_on;
    r.envelope = 0.0;
    r.ratio = std::numeric_limits<double>::infinity();
    r.regime = Regime::kViolated;
    r.sudden_switch = true;
    return r;
  }
  AdiabaticityReport worst = window_margin(params, schedule, schedule.t_on,
                                           schedule.t_on + schedule.tau, samples, envelope_floor,
                                           thresholds);
  if (std::isfinite(schedule.t_off)) {
    // Unload ramp sampled on [t_off, t_off + tau), mirrored so the floor test applies.
    AdiabaticityReport down = window_margin(params, schedule, schedule.t_off - schedule.tau / samples,
                                            schedule.t_off + schedule.tau - schedule.tau / samples,
                                            samples, envelope_floor, thresholds);
    const bool clamped = worst.edge_clamped || down.edge_clamped;
    if (down.ratio > worst.ratio) worst = down;
    worst.edge_clamped = clamped;
  }
  return worst;
}

}  // namespace ods
