#pragma once

// 3x3 complex linear algebra for the Lambda atom: bare-basis operators,
// pure and mixed states, and the state-quality metrics every other
// module checks against. Basis order is (|1>, |2>, |3>).

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "ods/errors.hpp"

namespace ods {

using Complex = std::complex<double>;
using Matrix3 = Eigen::Matrix3cd;
using Vector3 = Eigen::Vector3cd;

inline constexpr Complex kI{0.0, 1.0};
inline constexpr double kPi = 3.14159265358979323846;

namespace tolerance {
inline constexpr double kNorm = 1e-12;
inline constexpr double kHermiticity = 1e-10;
inline constexpr double kTrace = 1e-10;
inline constexpr double kPositivity = 1e-8;
inline constexpr double kOverlap = 1e-10;
}  // namespace tolerance

/// |i><j| with 1-based level indices.
inline Matrix3 projection_operator(int i, int j) {
  if (i < 1 || i > 3 || j < 1 || j > 3) {
    throw ArgumentError("projection_operator: level indices must be in 1..3, got (" +
                        std::to_string(i) + "," + std::to_string(j) + ")");
  }
  Matrix3 m = Matrix3::Zero();
  m(i - 1, j - 1) = 1.0;
  return m;
}

inline bool all_finite(const Matrix3& m) { return m.allFinite(); }

inline double hermiticity_defect(const Matrix3& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

inline Matrix3 hermitize(const Matrix3& m) { return 0.5 * (m + m.adjoint()); }

/// Smallest eigenvalue of the Hermitian part of m.
inline double min_eigenvalue(const Matrix3& m) {
  Eigen::SelfAdjointEigenSolver<Matrix3> solver(hermitize(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues()(0);
}

class PureState {
 public:
  /// Throws ArgumentError unless |amplitudes| = 1 within 1e-12.
  explicit PureState(const Vector3& amplitudes) : amp_(amplitudes) {
    if (!amp_.allFinite() || std::abs(amp_.norm() - 1.0) > tolerance::kNorm) {
      throw ArgumentError("PureState: amplitudes must be normalized (norm = " +
                          std::to_string(amp_.norm()) + ")");
    }
  }
  PureState(Complex c1, Complex c2, Complex c3) : PureState(Vector3(c1, c2, c3)) {}

  static PureState basis(int level) {
    if (level < 1 || level > 3) throw ArgumentError("PureState::basis: level must be in 1..3");
    Vector3 v = Vector3::Zero();
    v(level - 1) = 1.0;
    return PureState(v);
  }

  /// Normalizes v first; v must be nonzero.
  static PureState normalized(const Vector3& v) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n)) throw ArgumentError("PureState::normalized: zero vector");
    return PureState(Vector3(v / n));
  }

  const Vector3& amplitudes() const noexcept { return amp_; }
  Complex operator[](int level) const { return amp_(level - 1); }

  PureState with_global_phase(double chi) const {
    return PureState(Vector3(std::polar(1.0, chi) * amp_));
  }

 private:
  Vector3 amp_;
};

/// |<a|b>|
inline double overlap_magnitude(const PureState& a, const PureState& b) {
  return std::abs(a.amplitudes().dot(b.amplitudes()));
}

struct StateQuality {
  double hermiticity_defect = 0.0;
  double trace_defect = 0.0;
  double min_eigenvalue = 0.0;

  bool ok() const noexcept {
    return hermiticity_defect < tolerance::kHermiticity && trace_defect < tolerance::kTrace &&
           min_eigenvalue > -tolerance::kPositivity;
  }
};

/// Reports, never throws.
inline StateQuality state_quality(const Matrix3& rho) {
  if (!rho.allFinite()) {
    const double nan = std::nan("");
    return {nan, nan, nan};
  }
  return {hermiticity_defect(rho), std::abs(rho.trace() - 1.0), min_eigenvalue(rho)};
}

/// Hermitian, unit-trace, positive semidefinite 3x3 state.
/// Coherence convention: rho21 = <2|rho|1>.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Matrix3& m) : m_(m) {
    const StateQuality q = state_quality(m_);
    if (!q.ok()) {
      throw NumericalStateError(
          "DensityMatrix: invalid state (hermiticity " + std::to_string(q.hermiticity_defect) +
          ", trace " + std::to_string(q.trace_defect) + ", min eigenvalue " +
          std::to_string(q.min_eigenvalue) + ")");
    }
  }

  static DensityMatrix maximally_mixed() { return DensityMatrix(Matrix3::Identity() / 3.0); }

  const Matrix3& matrix() const noexcept { return m_; }
  Complex operator()(int i, int j) const { return m_(i - 1, j - 1); }

  double population(int level) const { return m_(level - 1, level - 1).real(); }
  Complex rho21() const { return m_(1, 0); }
  double purity() const { return (m_ * m_).trace().real(); }
  StateQuality quality() const { return state_quality(m_); }

 private:
  Matrix3 m_;
};

inline DensityMatrix pure_density(const PureState& psi) {
  const Vector3& v = psi.amplitudes();
  return DensityMatrix(Matrix3(v * v.adjoint()));
}

/// <psi|rho|psi> (the squared fidelity).
inline double overlap(const PureState& target, const Matrix3& rho) {
  const Vector3& v = target.amplitudes();
  const double ov = v.dot(rho * v).real();
  if (ov < -tolerance::kOverlap || !std::isfinite(ov)) {
    throw NumericalStateError("overlap: negative expectation value " + std::to_string(ov));
  }
  return std::clamp(ov, 0.0, 1.0);
}

struct Fidelity {
  double fidelity = 0.0;  // F = sqrt(<psi|rho|psi>)
  double overlap = 0.0;   // F^2
};

inline Fidelity fidelity_to_pure(const PureState& target, const Matrix3& rho) {
  const double ov = overlap(target, rho);
  return {std::sqrt(ov), ov};
}

inline Fidelity fidelity_to_pure(const PureState& target, const DensityMatrix& rho) {
  return fidelity_to_pure(target, rho.matrix());
}

}  // namespace ods
