#pragma once

// Four-field drive of the Lambda system. Fields 1,2 couple |1>-|3> with
// equal amplitude Omega12 and phases (phi12, phi12 - pi); fields 3,4 couple
// |2>-|3> with amplitude Omega34 and common phase phi34. All frequencies are
// in units of gamma31 and times in 1/gamma31 (hbar = 1).

#include <cmath>
#include <limits>
#include <string>

#include "ods/errors.hpp"
#include "ods/quantum_core.hpp"

namespace ods {

namespace units {
/// gamma31 of the 87Rb D1 line, in s^-1.
inline constexpr double kGamma31PerSecond = 36.10e6;
inline constexpr double to_seconds(double t) { return t / kGamma31PerSecond; }
inline constexpr double to_per_second(double rate) { return rate * kGamma31PerSecond; }
inline constexpr double from_seconds(double seconds) { return seconds * kGamma31PerSecond; }
}  // namespace units

inline constexpr double kOdsTolerance = 1e-12;

struct DriveParams {
  double omega12 = 2.0;
  double omega34 = 2.0;
  double phi12 = 0.0;
  double phi34 = 0.0;
  double delta1 = 0.3;
  double delta2 = 0.2;
  double delta3 = 0.3;
  double delta4 = 0.2;
  // Shifts the drive clock: Hamiltonians are evaluated at t + clock_offset.
  // Used to start the oscillation on a dark state other than |1>.
  double clock_offset = 0.0;

  static DriveParams symmetric(double omega, double d1, double d2, double d3, double d4,
                               double phi12 = 0.0, double phi34 = 0.0) {
    DriveParams p;
    p.omega12 = p.omega34 = omega;
    p.delta1 = d1;
    p.delta2 = d2;
    p.delta3 = d3;
    p.delta4 = d4;
    p.phi12 = phi12;
    p.phi34 = phi34;
    return p;
  }

  /// delta = (D1 - D2)/2, the rotation rate of the |1>-side coupling.
  double small_delta() const noexcept { return 0.5 * (delta1 - delta2); }
  /// (D3 - D4)/2, the rotation rate of the |2>-side coupling.
  double small_delta_34() const noexcept { return 0.5 * (delta3 - delta4); }
  double big_delta() const noexcept { return 0.5 * (delta1 + delta2); }
  double big_delta_prime() const noexcept {
    return 0.5 * ((delta1 + delta2) - (delta3 + delta4));
  }
  double delta_phi() const noexcept { return phi12 - phi34; }

  double phi1() const noexcept { return phi12; }
  double phi2() const noexcept { return phi12 - kPi; }
  double phi3() const noexcept { return phi34; }
  double phi4() const noexcept { return phi34; }

  /// T = 2 pi / |delta|.
  double period() const {
    const double d = small_delta();
    if (d == 0.0) throw NoOscillationError("drive has delta = 0: the dark state does not oscillate");
    return 2.0 * kPi / std::abs(d);
  }

  /// Both pairs rotate at the same rate and D' = 0.
  bool is_ods_valid() const noexcept {
    return std::abs(small_delta() - small_delta_34()) <= kOdsTolerance &&
           std::abs(big_delta_prime()) <= kOdsTolerance;
  }

  bool equal_rabi() const noexcept { return omega12 == omega34; }

  void require_ods(const char* who) const {
    if (std::abs(small_delta() - small_delta_34()) > kOdsTolerance) {
      throw NotOdsError(std::string(who) + ": (D1-D2)/2 = " + std::to_string(small_delta()) +
                        " differs from (D3-D4)/2 = " + std::to_string(small_delta_34()));
    }
    if (std::abs(big_delta_prime()) > kOdsTolerance) {
      throw NotOdsError(std::string(who) + ": D' = " + std::to_string(big_delta_prime()) +
                        " must vanish for an oscillating dark state");
    }
  }

  void validate() const {
    const auto check_finite = [](double v, const char* name) {
      if (!std::isfinite(v)) throw ValidationError(name, "must be finite");
    };
    check_finite(omega12, "omega12");
    check_finite(omega34, "omega34");
    check_finite(phi12, "phi12");
    check_finite(phi34, "phi34");
    check_finite(delta1, "delta1");
    check_finite(delta2, "delta2");
    check_finite(delta3, "delta3");
    check_finite(delta4, "delta4");
    check_finite(clock_offset, "clock_offset");
    if (omega12 < 0.0) throw ValidationError("omega12", "must be >= 0");
    if (omega34 < 0.0) throw ValidationError("omega34", "must be >= 0");
  }

  bool operator==(const DriveParams&) const = default;
};

enum class RampShape { kLinear, kRaisedCosine, kInstantaneous };

inline const char* to_string(RampShape s) {
  switch (s) {
    case RampShape::kLinear: return "linear";
    case RampShape::kRaisedCosine: return "raised-cosine";
    case RampShape::kInstantaneous: return "instantaneous";
  }
  return "?";
}

/// Shared envelope for all four fields: rise on [t_on, t_on+tau], plateau,
/// fall on [t_off, t_off+tau]. t_off = +inf means the fields stay on.
struct RampSchedule {
  double tau = 0.0;
  double t_on = 0.0;
  double t_off = std::numeric_limits<double>::infinity();
  RampShape shape = RampShape::kRaisedCosine;

  static constexpr double kDefaultTauPeriods = 0.01;

  static RampSchedule always_on() { return {0.0, -std::numeric_limits<double>::infinity(),
                                            std::numeric_limits<double>::infinity(),
                                            RampShape::kInstantaneous}; }

  /// Default upload: raised-cosine over 0.01 T starting at t = 0, no unload.
  static RampSchedule default_for_period(double period) {
    return {kDefaultTauPeriods * period, 0.0, std::numeric_limits<double>::infinity(),
            RampShape::kRaisedCosine};
  }

  bool sudden() const noexcept { return shape == RampShape::kInstantaneous || tau == 0.0; }
  double ramp_duration() const noexcept { return sudden() ? 0.0 : tau; }
  double plateau_start() const noexcept { return t_on + ramp_duration(); }
  double end() const noexcept { return t_off + ramp_duration(); }

  void validate() const {
    if (!(tau >= 0.0) || !std::isfinite(tau)) throw ValidationError("ramp_tau", "must be finite and >= 0");
    if (std::isnan(t_on) || std::isnan(t_off)) throw ValidationError("ramp_t_on", "must not be NaN");
    if (t_off < t_on + ramp_duration()) {
      throw ValidationError("ramp_t_off", "must be >= t_on + tau");
    }
  }

  bool operator==(const RampSchedule&) const = default;
};

namespace detail {
inline double ramp_profile(RampShape shape, double s) {
  s = std::clamp(s, 0.0, 1.0);
  if (shape == RampShape::kLinear) return s;
  const double v = std::sin(0.5 * kPi * s);
  return v * v;
}
}  // namespace detail

/// Envelope value in [0,1].
inline double envelope(const RampSchedule& schedule, double t) {
  if (t < schedule.t_on) return 0.0;
  if (schedule.sudden()) return t <= schedule.t_off ? 1.0 : 0.0;
  if (t > schedule.t_off + schedule.tau) return 0.0;
  if (t >= schedule.t_off) {
    return 1.0 - detail::ramp_profile(schedule.shape, (t - schedule.t_off) / schedule.tau);
  }
  if (t < schedule.t_on + schedule.tau) {
    return detail::ramp_profile(schedule.shape, (t - schedule.t_on) / schedule.tau);
  }
  return 1.0;
}

struct EffectiveFields {
  Complex p;  // coupling to |1>
  Complex q;  // coupling to |2>
  double big_delta = 0.0;
  double big_delta_prime = 0.0;

  double coupling_norm_sq() const noexcept { return std::norm(p) + std::norm(q); }
};

/// P = -i e^{-i phi12} eps Omega12 sin(delta t), Q = -e^{-i phi34} eps Omega34 cos(delta' t),
/// with delta' = (D3-D4)/2.
inline EffectiveFields effective_fields(const DriveParams& params, const RampSchedule& schedule,
                                        double t) {
  const double eps = envelope(schedule, t);
  const double tc = t + params.clock_offset;
  EffectiveFields f;
  f.p = -kI * std::polar(1.0, -params.phi12) * (eps * params.omega12 * std::sin(params.small_delta() * tc));
  f.q = -std::polar(1.0, -params.phi34) * (eps * params.omega34 * std::cos(params.small_delta_34() * tc));
  f.big_delta = params.big_delta();
  f.big_delta_prime = params.big_delta_prime();
  return f;
}

inline Matrix3 effective_hamiltonian(const EffectiveFields& f) {
  Matrix3 h;
  h << 0.0, 0.0, std::conj(f.p),
       0.0, f.big_delta_prime, std::conj(f.q),
       f.p, f.q, f.big_delta;
  return h;
}

/// Rotating-frame Hamiltonian [[0,0,P*],[0,D',Q*],[P,Q,D]].
inline Matrix3 effective_hamiltonian(const DriveParams& params, const RampSchedule& schedule,
                                     double t) {
  return effective_hamiltonian(effective_fields(params, schedule, t));
}

/// Interaction-picture Hamiltonian, summed field by field:
/// H' = -1/2 [sum_k eps Omega_k e^{-i phi_k} e^{i D_k t} sigma_3g(k) + h.c.].
inline Matrix3 full_hamiltonian(const DriveParams& params, const RampSchedule& schedule, double t) {
  const double eps = envelope(schedule, t);
  const double tc = t + params.clock_offset;
  const auto term = [&](double omega, double phi, double detuning) {
    return eps * omega * std::polar(1.0, -phi) * std::polar(1.0, detuning * tc);
  };
  const Complex c31 = -0.5 * (term(params.omega12, params.phi1(), params.delta1) +
                              term(params.omega12, params.phi2(), params.delta2));
  const Complex c32 = -0.5 * (term(params.omega34, params.phi3(), params.delta3) +
                              term(params.omega34, params.phi4(), params.delta4));
  Matrix3 h = Matrix3::Zero();
  h(2, 0) = c31;
  h(0, 2) = std::conj(c31);
  h(2, 1) = c32;
  h(1, 2) = std::conj(c32);
  return h;
}

}  // namespace ods
