#pragma once

// Instantaneous eigenbasis of the rotating-frame Hamiltonian: the dark
// state |a0> (eigenvalue 0, no |3> component) and the bright pair |a+-> with
// eigenvalues lambda+- = (D +- sqrt(D^2 + 4|P|^2 + 4|Q|^2))/2.

#include <algorithm>
#include <array>
#include <cmath>

#include "ods/drive.hpp"
#include "ods/quantum_core.hpp"

namespace ods {

struct MixingAngles {
  double theta = 0.0;
  double varphi = 0.0;
};

struct EigenSystem {
  PureState a0 = PureState::basis(1);
  PureState a_plus = PureState::basis(3);
  PureState a_minus = PureState::basis(2);
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double lambda0 = 0.0;
  // Set when both couplings vanish: the bare basis is returned.
  bool degenerate = false;
};

/// Mixing angle theta, unwrapped continuously in t.
///
/// tan(theta) = Omega12 sin(delta t) / (Omega34 cos(delta t)). For positive
/// amplitudes theta stays within pi/2 of delta t, which fixes the 2 pi branch
/// pointwise; for Omega12 = Omega34 this gives theta = delta t exactly.
inline double mixing_theta(const DriveParams& params, const RampSchedule& /*schedule*/, double t) {
  params.require_ods("mixing_theta");
  const double u = params.small_delta() * (t + params.clock_offset);
  if (params.equal_rabi() && params.omega12 > 0.0) return u;
  const double wrapped = std::atan2(params.omega12 * std::sin(u), params.omega34 * std::cos(u));
  return wrapped + 2.0 * kPi * std::round((u - wrapped) / (2.0 * kPi));
}

/// varphi = atan2(2 sqrt(|P|^2+|Q|^2), D)/2, in [0, pi/2].
inline double mixing_varphi(const EffectiveFields& fields) {
  return 0.5 * std::atan2(2.0 * std::sqrt(fields.coupling_norm_sq()), fields.big_delta);
}

inline MixingAngles mixing_angles(const DriveParams& params, const RampSchedule& schedule, double t) {
  return {mixing_theta(params, schedule, t), mixing_varphi(effective_fields(params, schedule, t))};
}

/// cos(theta)|1> - i e^{-i dphi} sin(theta)|2> for a given theta.
inline PureState dark_state_at(double theta, double delta_phi) {
  return PureState(std::cos(theta), -kI * std::polar(1.0, -delta_phi) * std::sin(theta), 0.0);
}

inline PureState dark_state(const DriveParams& params, const RampSchedule& schedule, double t) {
  return dark_state_at(mixing_theta(params, schedule, t), params.delta_phi());
}

struct BrightStates {
  PureState a_plus;
  PureState a_minus;
  double lambda_plus;
  double lambda_minus;
};

inline std::array<double, 2> bright_eigenvalues(const EffectiveFields& f) {
  const double root = std::sqrt(f.big_delta * f.big_delta + 4.0 * f.coupling_norm_sq());
  return {0.5 * (f.big_delta + root), 0.5 * (f.big_delta - root)};
}

inline BrightStates bright_states(const DriveParams& params, const RampSchedule& schedule, double t) {
  params.require_ods("bright_states");
  const EffectiveFields f = effective_fields(params, schedule, t);
  const double theta = mixing_theta(params, schedule, t);
  const double varphi = mixing_varphi(f);
  const auto [lp, lm] = bright_eigenvalues(f);
  const double st = std::sin(theta), ct = std::cos(theta);
  const double sp = std::sin(varphi), cp = std::cos(varphi);
  const Complex side1 = -kI * std::polar(1.0, params.delta_phi()) * st;
  const Complex phase3 = std::polar(1.0, -params.phi34);
  return {PureState(side1 * sp, ct * sp, -cp * phase3),
          PureState(side1 * cp, ct * cp, sp * phase3), lp, lm};
}

/// Closed-form eigensystem. Falls back to the bare basis when P = Q = 0.
inline EigenSystem analytic_eigensystem(const DriveParams& params, const RampSchedule& schedule,
                                        double t) {
  params.require_ods("analytic_eigensystem");
  const EffectiveFields f = effective_fields(params, schedule, t);
  EigenSystem es;
  if (f.coupling_norm_sq() == 0.0) {
    es.degenerate = true;
    es.lambda_plus = std::max(f.big_delta, 0.0);
    es.lambda_minus = std::min(f.big_delta, 0.0);
    es.a0 = PureState::basis(1);
    es.a_plus = f.big_delta >= 0.0 ? PureState::basis(3) : PureState::basis(2);
    es.a_minus = f.big_delta >= 0.0 ? PureState::basis(2) : PureState::basis(3);
    return es;
  }
  BrightStates b = bright_states(params, schedule, t);
  es.a0 = dark_state(params, schedule, t);
  es.a_plus = b.a_plus;
  es.a_minus = b.a_minus;
  es.lambda_plus = b.lambda_plus;
  es.lambda_minus = b.lambda_minus;
  return es;
}

/// Multiplies v by the global phase that makes <reference|v> real and >= 0.
inline PureState align_phase(const PureState& v, const PureState& reference) {
  const Complex ov = reference.amplitudes().dot(v.amplitudes());
  if (std::abs(ov) == 0.0) return v;
  return PureState(Vector3(v.amplitudes() * (std::conj(ov) / std::abs(ov))));
}

/// ||H v - lambda v||.
inline double eigen_residual(const Matrix3& h, const PureState& v, double lambda) {
  return (h * v.amplitudes() - lambda * v.amplitudes()).norm();
}

/// Direct Hermitian diagonalization. Eigenvalues ascending are assigned to
/// (a_minus, a0, a_plus); each vector is phased so its largest component is
/// real and positive. lambda0 holds the middle eigenvalue.
inline EigenSystem numerical_eigensystem(const Matrix3& h) {
  if (!h.allFinite() || hermiticity_defect(h) > tolerance::kHermiticity) {
    throw ArgumentError("numerical_eigensystem: matrix is not Hermitian");
  }
  Eigen::SelfAdjointEigenSolver<Matrix3> solver(hermitize(h));
  const auto canonical = [&](int k) {
    Vector3 v = solver.eigenvectors().col(k);
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    const Complex c = v(imax);
    v *= std::conj(c) / std::abs(c);
    return PureState::normalized(v);
  };
  EigenSystem es;
  es.a_minus = canonical(0);
  es.a0 = canonical(1);
  es.a_plus = canonical(2);
  es.lambda_minus = solver.eigenvalues()(0);
  es.lambda0 = solver.eigenvalues()(1);
  es.lambda_plus = solver.eigenvalues()(2);
  return es;
}

}  // namespace ods
